"""Queue-aware analysis of a two-relay cooperative random access network."""
from .analysis import (InstabilityError, StabilityRegion, SymmetricDelayInputs, stability_region,
                       symmetric_delay_closed_form, symmetric_n_user, throughput_two_user)
from .bvp import UnsupportedIndexError, UnsupportedRegionError, solve
from .kernel import KernelAssumptionError, build_kernel, contour
from .model import Coefficients, SystemParams, derive_coefficients
from .phy import Geometry, PhyEnvironment, SuccessProbabilities, build_success_matrix
from .sim import SimConfig, run

__all__ = [n for n in dir() if not n.startswith("_")]
