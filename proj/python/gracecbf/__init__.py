"""Control-barrier-function safety filters and the wall-approach benchmark."""

from ._core import (
    Error,
    bound_trajectory,
    characteristic_roots,
    classify_region,
    filter_projection,
    filter_scalar,
    implicit_bound_time,
    layer_transform,
    lyapunov_v1,
    lyapunov_v2,
    run,
    scenarios,
    verify,
)

__all__ = [
    "Error",
    "bound_trajectory",
    "characteristic_roots",
    "classify_region",
    "filter_projection",
    "filter_scalar",
    "implicit_bound_time",
    "layer_transform",
    "lyapunov_v1",
    "lyapunov_v2",
    "run",
    "scenarios",
    "verify",
]
