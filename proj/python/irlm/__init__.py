"""Adaptive increment-ratio estimation of the memory parameter d."""

import os
from pathlib import Path

_shipped = Path(__file__).with_name("data") / "gamma_table_p20"
if _shipped.exists():
    os.environ.setdefault("IRLM_TABLE", str(_shipped))

from ._irlm import (  # noqa: E402
    EstimationError,
    adapt_alpha,
    default_p,
    default_table_path,
    estimate,
    expected_ir,
    gamma_matrix,
    generate,
    ir_profile,
    ir_statistic,
    lambda0,
    lambda0_inv,
    lambda0_prime,
    lambda_,
    psi,
    rho,
    scale_grid,
    sigma_entry,
)

__all__ = [
    "EstimationError",
    "adapt_alpha",
    "default_p",
    "default_table_path",
    "estimate",
    "expected_ir",
    "gamma_matrix",
    "generate",
    "ir_profile",
    "ir_statistic",
    "lambda0",
    "lambda0_inv",
    "lambda0_prime",
    "lambda_",
    "psi",
    "rho",
    "scale_grid",
    "sigma_entry",
]
