"""icelab: six-vertex model exact formulas, samplers and random-matrix limit checks."""

import os

# numba's default TBB layer is not available everywhere; workqueue always is.
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from .core import (  # noqa: E402
    BoundaryData,
    SixVertexConfig,
    SpectralParams,
    VertexType,
    WeightTable,
    boltzmann_weight,
    delta,
    gauge_transform,
    weights_from_spectral,
)
from .determinants import SpectralVectors, free_ik_rhs, ik_rhs  # noqa: E402
from .enumeration import dwbc_partition, enumerate_configs, stochastic_free_observable  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "BoundaryData",
    "SixVertexConfig",
    "SpectralParams",
    "SpectralVectors",
    "VertexType",
    "WeightTable",
    "boltzmann_weight",
    "delta",
    "dwbc_partition",
    "enumerate_configs",
    "free_ik_rhs",
    "gauge_transform",
    "ik_rhs",
    "stochastic_free_observable",
    "weights_from_spectral",
    "__version__",
]
