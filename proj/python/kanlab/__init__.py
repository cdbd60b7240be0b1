"""KAN time-series laboratory: AR data generation, Hessian spectrum checks,
and small training runs, backed by the C++ core."""

from kanlab._core import (
    bspline,
    condition_summary,
    dct,
    dct_apply,
    generate_series,
    mode_decay,
    rbf,
    residual,
    silu,
    train_run,
    write_dataset,
)

__all__ = [
    "bspline",
    "condition_summary",
    "dct",
    "dct_apply",
    "generate_series",
    "mode_decay",
    "rbf",
    "residual",
    "silu",
    "train_run",
    "write_dataset",
]
