# CDD Chain Simulator - Result writers
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Output artifacts of a run: CSV tables, SVG plots, a formatted xlsx workbook, the noise
sample and the metadata sidecar.
"""

# Built-in modules
import logging
import os
import re

# External modules
import numpy as np
from matplotlib.figure import Figure
from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils import get_column_letter
from openpyxl.utils.dataframe import dataframe_to_rows
from openpyxl.worksheet.table import Table, TableStyleInfo

# Local imports
from .errors import ConstraintViolation
from .noise_lab import dump_noise_csv
from .utils import save_json

CSV_FLOAT_FORMAT = "%.17g"

DEFAULT_SVG_STYLE = {
    "width": 8.0,
    "height": 5.0,
    "linewidth": 1.5,
    "xlabel": "t",
    "ylabel": None,
    "title": None,
}

HEADER_COLOR = "FFA500"


def _check_table(table) -> None:
    if table.frame.empty or "t" not in table.frame.columns:
        logging.error(f"Table '{table.name}' has an empty time grid")
        raise ConstraintViolation(f"Table '{table.name}' has no rows to write")
    if not table.curve_columns:
        raise ConstraintViolation(f"Table '{table.name}' has no curves")


def emit_csv(tables, out_dir: str) -> list:
    """
    Write one CSV per curve set: column t, then one column per curve, full double precision.

    Every table is checked before the first file is written.

    Returns:
        list[str]: written paths, in table order.

    Raises:
        ConstraintViolation: no tables, or a table with an empty grid.
        OSError: if a file cannot be written.
    """
    if not tables:
        raise ConstraintViolation("No result tables to write")
    for table in tables:
        _check_table(table)
    paths = []
    try:
        os.makedirs(out_dir, exist_ok=True)
        for table in tables:
            path = os.path.join(out_dir, f"{table.name}.csv")
            table.frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
            logging.info(f"CSV saved successfully at: {path}")
            paths.append(path)
    except OSError as e:
        logging.error(f"Failed to save CSV file: {e}")
        raise
    return paths


def emit_svg(table, path: str, style: dict = None) -> str:
    """
    Plot every curve of a table against t as a self-contained SVG.

    Each curve is drawn as one line with gid "curve-<k>"; legend labels carry gid
    "legend-entry-<k>".

    Parameters:
        table (ResultTable): the curve set.
        path (str): output file.
        style (dict | None): overrides of DEFAULT_SVG_STYLE.

    Returns:
        str: the written path.
    """
    _check_table(table)
    style = {**DEFAULT_SVG_STYLE, **(style or {})}
    times = table.frame["t"].to_numpy()

    fig = Figure(figsize=(style["width"], style["height"]))
    ax = fig.add_subplot()
    for k, column in enumerate(table.curve_columns):
        ax.plot(times, table.frame[column].to_numpy(), label=column,
                linewidth=style["linewidth"], gid=f"curve-{k}")
    ax.set_xlabel(style["xlabel"])
    if style["ylabel"]:
        ax.set_ylabel(style["ylabel"])
    ax.set_title(style["title"] or table.name)
    ax.grid(True, alpha=0.3)
    legend = ax.legend(loc="best")
    for k, text in enumerate(legend.get_texts()):
        text.set_gid(f"legend-entry-{k}")

    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        logging.info(f"SVG saved successfully at: {path}")
    except OSError as e:
        logging.error(f"Failed to save SVG file: {e}")
        raise
    return path


def _sheet_title(name: str, used: set) -> str:
    title = re.sub(r"[\[\]:*?/\\]", "_", name)[:31] or "Sheet"
    base, k = title, 1
    while title in used:
        suffix = f"_{k}"
        title = base[: 31 - len(suffix)] + suffix
        k += 1
    used.add(title)
    return title


def _table_name(index: int) -> str:
    return f"Results{index + 1}"


def emit_xlsx(tables, path: str) -> str:
    """
    Save the result tables to one workbook, a formatted table per sheet.

    Parameters:
        tables (list[ResultTable]): curve sets, one sheet each.
        path (str): output .xlsx file.

    Returns:
        str: the written path.
    """
    if not tables:
        raise ConstraintViolation("No result tables to write")
    for table in tables:
        _check_table(table)

    wb = Workbook()
    wb.remove(wb.active)
    header_fill = PatternFill(start_color=HEADER_COLOR, end_color=HEADER_COLOR, fill_type="solid")
    header_font = Font(bold=True)
    used = set()

    for index, result in enumerate(tables):
        ws = wb.create_sheet(_sheet_title(result.name, used))
        for r_idx, row in enumerate(dataframe_to_rows(result.frame, index=False, header=True), start=1):
            for c_idx, value in enumerate(row, start=1):
                ws.cell(row=r_idx, column=c_idx, value=float(value) if isinstance(value, np.floating) else value)

        for cell in ws[1]:
            cell.fill = header_fill
            cell.font = header_font
            cell.alignment = Alignment(wrap_text=True, vertical="top")

        table = Table(displayName=_table_name(index), ref=ws.dimensions)
        table.tableStyleInfo = TableStyleInfo(
            name="TableStyleMedium7",
            showFirstColumn=False,
            showLastColumn=False,
            showRowStripes=False,
            showColumnStripes=True,
        )
        ws.add_table(table)

        for c_idx, column in enumerate(result.frame.columns, start=1):
            ws.column_dimensions[get_column_letter(c_idx)].width = max(12, len(str(column)) + 4)
        ws.freeze_panes = "A2"

    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        wb.save(path)
        logging.info(f"Excel file with formatted tables saved successfully at: {path}")
    except OSError as e:
        logging.error(f"Failed to save Excel file: {e}")
        raise
    return path


def write_metadata(result, out_dir: str) -> str:
    return save_json(result.metadata, out_dir, f"{result.config.name}_metadata.json")


def write_run(result, out_dir: str, svg: bool = False, xlsx: bool = False, noise_csv: bool = False) -> list:
    """
    Write all artifacts of a run into `out_dir`.

    Returns:
        list[str]: every written path (CSV tables first, metadata last).
    """
    paths = emit_csv(result.tables, out_dir)
    if svg:
        for table in result.tables:
            paths.append(emit_svg(table, os.path.join(out_dir, f"{table.name}.svg")))
    if xlsx:
        paths.append(emit_xlsx(result.tables, os.path.join(out_dir, f"{result.config.name}.xlsx")))
    if noise_csv:
        for name, trajectory in result.noise:
            paths.append(dump_noise_csv(trajectory, os.path.join(out_dir, f"{name}_noise_r0.csv")))
    paths.append(write_metadata(result, out_dir))
    return paths
