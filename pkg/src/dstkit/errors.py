"""Exception hierarchy; the CLI maps these onto exit codes."""

from __future__ import annotations


class DstkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(DstkitError):
    """Bad configuration or missing input file (CLI exit code 1)."""


class DataError(DstkitError):
    """Malformed or contract-violating data in an input file (CLI exit code 2)."""


class AdapterError(DstkitError):
    """External adapter process could not be launched or used (CLI exit code 3)."""
