# CDD Chain Simulator - Exception kinds
# Copyright (C) 2025-2026 CDD Chain contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
# See LICENSE file for full license text.

"""
Exception kinds raised by the simulator.

Every kind carries the exit code the command-line runner returns for it:

- ConfigError: malformed or unknown configuration (exit code 1)
- ConstraintViolation: a precondition of a model or algorithm does not hold (exit code 2)
- NumericalFailure: an integrator, solver or cross-check tolerance was breached (exit code 3)

ConfigError and ConstraintViolation derive from ValueError, so callers that only care
about "bad input" can keep catching ValueError.
"""


class CDDChainError(Exception):
    """Base class for all simulator errors."""

    exit_code = 1


class ConfigError(CDDChainError, ValueError):
    exit_code = 1


class ConstraintViolation(CDDChainError, ValueError):
    exit_code = 2


class NumericalFailure(CDDChainError, ArithmeticError):
    exit_code = 3
