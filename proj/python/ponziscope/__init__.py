"""Python access to the ponzi analysis core."""

from ._core import (
    Dataset,
    InputError,
    InvariantError,
    extract_addresses,
    get_phase,
    gini,
    partition,
    render_report,
    simulate,
    write_outputs,
)

__all__ = [
    "Dataset",
    "InputError",
    "InvariantError",
    "extract_addresses",
    "get_phase",
    "gini",
    "partition",
    "render_report",
    "simulate",
    "write_outputs",
]
