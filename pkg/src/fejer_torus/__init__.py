"""Fejér summation of Fourier series on the infinite-dimensional torus."""

__version__ = "0.1.0"

from .index_core import (  # noqa: E402
    IncomparableError,
    MultiIndex,
    RectIndex,
    Schedule,
    ScheduleError,
    dominates,
    enumerate_net,
    join,
    schedule_admits,
)
from .kernels import dirichlet, fejer, kernel_tensor  # noqa: E402
from .funcspace import (  # noqa: E402
    AliasingError,
    CylinderGrid,
    QuadratureError,
    SpikeTensor,
    TrigPoly,
    evaluate,
    lemma_check,
    marginalize,
    orlicz_functional,
)
from .summation import (  # noqa: E402
    FourierTable,
    MissingCoefficientError,
    fejer_mean_conv,
    fejer_mean_weights,
    fourier_coeff,
    fourier_table,
    partial_sum,
    strengthened_limit,
)

__all__ = [
    "AliasingError",
    "CylinderGrid",
    "FourierTable",
    "IncomparableError",
    "MissingCoefficientError",
    "MultiIndex",
    "QuadratureError",
    "RectIndex",
    "Schedule",
    "ScheduleError",
    "SpikeTensor",
    "TrigPoly",
    "dirichlet",
    "dominates",
    "enumerate_net",
    "evaluate",
    "fejer",
    "fejer_mean_conv",
    "fejer_mean_weights",
    "fourier_coeff",
    "fourier_table",
    "join",
    "kernel_tensor",
    "lemma_check",
    "marginalize",
    "orlicz_functional",
    "partial_sum",
    "schedule_admits",
    "strengthened_limit",
]
