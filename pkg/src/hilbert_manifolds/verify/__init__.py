"""Verification suites and the ``hilbert-verify`` command line."""

from .suites import (
    REGISTRY,
    ConfigError,
    SuiteConfig,
    SuiteReport,
    UnknownSuiteError,
    list_suites,
    run_suite,
)

__all__ = [
    "REGISTRY",
    "ConfigError",
    "SuiteConfig",
    "SuiteReport",
    "UnknownSuiteError",
    "list_suites",
    "run_suite",
]
