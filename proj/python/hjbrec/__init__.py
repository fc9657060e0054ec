"""Galerkin HJB solver with recurrence-filled Hermite integral tables."""
import os
from pathlib import Path

_pkg_data = Path(__file__).with_name("data")
if "HJBREC_DATA_DIR" not in os.environ and _pkg_data.is_dir():
    os.environ["HJBREC_DATA_DIR"] = str(_pkg_data)

from ._hjbrec import *  # noqa: E402,F401,F403
from ._hjbrec import (  # noqa: E402
    fill_table,
    hjb_residual,
    inverse_mellin,
    mellin,
    quadrature_table,
    run_cli,
    seed_integral,
    sga,
    simulate,
    verify,
)

__all__ = [
    "fill_table",
    "hjb_residual",
    "inverse_mellin",
    "mellin",
    "quadrature_table",
    "run_cli",
    "seed_integral",
    "sga",
    "simulate",
    "verify",
]
