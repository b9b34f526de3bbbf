"""Digital nets over F2 with small Walsh figure of merit (WAFOM)."""

__version__ = "0.1.0"

from .f2 import (
    MAX_DIGITS,
    DimensionError,
    GeneratingMatrixSet,
    RangeError,
    enumerate_points_gray,
    iter_gray_blocks,
    net_point,
    point_to_reals,
)
from .wafom import WafomTableSet, WafomValue, build_tables, wafom_naive, wafom_tabled
from .search import SearchConfig, SearchTrace, search_extensible
from .seqgen import (
    PrimitivePoly,
    SeqGenConfig,
    primitive_poly,
    search_sequential,
    seqgen_as_digital_net,
    seqgen_points,
    wafom_sequential,
)
from .integrate import IntegrationRequest, mc_integrate, qmc_integrate, qmc_integrate_nested
from .genz import FAMILIES, GenzInstance, exact_integral, genz_eval, run_benchmark
from .io import MatrixFormatError, read_matrices, write_matrices
from .data import load_shipped

__all__ = [
    "FAMILIES",
    "MAX_DIGITS",
    "DimensionError",
    "GeneratingMatrixSet",
    "GenzInstance",
    "IntegrationRequest",
    "MatrixFormatError",
    "PrimitivePoly",
    "RangeError",
    "SearchConfig",
    "SearchTrace",
    "SeqGenConfig",
    "WafomTableSet",
    "WafomValue",
    "build_tables",
    "enumerate_points_gray",
    "exact_integral",
    "genz_eval",
    "iter_gray_blocks",
    "load_shipped",
    "mc_integrate",
    "net_point",
    "point_to_reals",
    "primitive_poly",
    "qmc_integrate",
    "qmc_integrate_nested",
    "read_matrices",
    "run_benchmark",
    "search_extensible",
    "search_sequential",
    "seqgen_as_digital_net",
    "seqgen_points",
    "wafom_naive",
    "wafom_sequential",
    "wafom_tabled",
    "write_matrices",
]
