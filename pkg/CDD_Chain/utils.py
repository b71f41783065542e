# CDD Chain Simulator - Utility functions
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Utility module for the CDD Chain simulator

This module provides utility functions for loading the runtime settings, setting up
logging, writing JSON files and recording the build that produced a result.
"""

# Built-in imports
import os
import re
import json
import logging
import datetime as dt
import subprocess

# External imports
from dotenv import load_dotenv

# Pick up CONFIG_FILE (and friends) from a local .env file, if present
load_dotenv()

# Default path to the runtime settings file
CONFIG_FILE = os.getenv("CONFIG_FILE", "./config.json")

DEFAULT_SETTINGS = {
    "log_level": "INFO",
    "log_dir": "logs",
    "output_dir": "results",
    "max_exact_sites": 12,
    "jobs": 1,
}

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(filename)s - %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"


def load_config(config_path=CONFIG_FILE):
    """
    Load configuration parameters from a JSON file.

    Parameters:
        config_path (str): Path to the configuration JSON file.
        by default, it looks for 'config.json' in the current directory.

    Returns:
        dict: Dictionary containing configuration parameters.

    Raises:
        FileNotFoundError: If the file does not exist.
    """
    logging.debug(f"Loading configuration from [{config_path}]...")
    if not os.path.exists(config_path):
        raise FileNotFoundError(f"Configuration file not found: {config_path}")
    with open(config_path, "r", encoding="utf-8") as f:
        config = json.load(f)
    logging.debug("Configuration loaded successfully.")
    return config


def load_settings(config_path=None):
    """
    Load the runtime settings, filling in defaults for every missing key.

    An explicitly given path must exist. Without a path, the CONFIG_FILE location is
    used when it exists and the defaults are returned otherwise.

    Parameters:
        config_path (str | None): Optional path to a settings JSON file.

    Returns:
        dict: The merged settings.
    """
    settings = dict(DEFAULT_SETTINGS)
    if config_path is not None:
        settings.update(load_config(config_path))
    elif os.path.exists(CONFIG_FILE):
        settings.update(load_config(CONFIG_FILE))
    return settings


def timestamped_log_name(module_name: str) -> str:
    """Return '<module_name>_<YYYYmmdd-HHMMSS>.log'."""
    timestamp = dt.datetime.now().strftime("%Y%m%d-%H%M%S")
    return f"{module_name}_{timestamp}.log"


def setup_logger(log_file="app.log", settings=None):
    """
    Sets up a logger with both file and console handlers.
    The log level is read from the 'log_level' key of the runtime settings.
    Log files are organized in subdirectories under the settings 'log_dir' based on the
    module name.

    Args:
        log_file (str): The name of the log file (e.g., "experiment_cli_20250117-143022.log").
        settings (dict | None): Runtime settings; loaded with load_settings() when None.

    Returns:
        logging.Logger: Configured logger instance.

    Note:
        - Log level values: INFO, DEBUG, WARNING, ERROR, or CRITICAL.
        - Defaults to INFO if not specified or if an invalid value is provided.
        - Logs are saved to: <log_dir>/<module_name>/<log_file>
    """
    log_options = ["INFO", "DEBUG", "WARNING", "ERROR", "CRITICAL"]
    if settings is None:
        settings = load_settings()
    log_level = str(settings.get("log_level", "INFO")).upper()
    if log_level not in log_options:
        log_level = "INFO"

    # "experiment_cli_20250117-143022.log" -> "experiment_cli"
    base_name = os.path.splitext(log_file)[0]
    module_parts = []
    for part in base_name.split("_"):
        if re.match(r"^\d{8}-\d{6}$", part):
            break
        module_parts.append(part)
    module_name = "_".join(module_parts) if module_parts else "general"

    log_dir = os.path.join(settings.get("log_dir", "logs"), module_name)
    os.makedirs(log_dir, exist_ok=True)
    full_log_path = os.path.join(log_dir, log_file)

    logger = logging.getLogger()
    logger.setLevel(getattr(logging, log_level))

    # Repeated calls (tests, several runs in one process) must not stack handlers
    for handler in list(logger.handlers):
        if getattr(handler, "_cdd_chain", False):
            logger.removeHandler(handler)
            handler.close()

    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT)

    file_handler = logging.FileHandler(full_log_path, encoding="utf-8")
    file_handler.setFormatter(formatter)
    file_handler._cdd_chain = True

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler._cdd_chain = True

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)

    return logger


def save_json(data: dict, save_loc: str, file_name: str) -> str:
    """
    Save a dictionary as an indented JSON file.

    Parameters:
        data (dict): JSON-serialisable content.
        save_loc (str): Directory path where the file will be saved.
        file_name (str): Name of the file to save.

    Returns:
        str: The full path of the written file.

    Raises:
        OSError: If the file cannot be written.
    """
    try:
        os.makedirs(save_loc, exist_ok=True)
        save_path = os.path.join(save_loc, file_name)
        with open(save_path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, sort_keys=False)
            f.write("\n")
        logging.info(f"JSON saved successfully at: {save_path}")
        return save_path
    except OSError as e:
        logging.error(f"Failed to save JSON file: {e}")
        raise


def git_describe() -> str:
    """Return `git describe --always --dirty` for the working tree, or "unknown"."""
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            check=True,
        )
        return result.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"
