"""Sign-condition databases for integer polynomial families over ``[0,1]^n``."""

from .appkit import (
    DeltaDetProduct,
    ZeroList,
    boolean_zeros,
    build_consistency_db,
    consistency_query,
    jacobian_transversality_check,
    vandermonde_delta_eval,
)
from .atlas import (
    CellRecord,
    SignDatabase,
    build_adaptive,
    build_uniform,
    coarseness_log2,
    deserialize,
    distance_bound_log2,
    serialize,
)
from .engine import QueryStats, bench, locate, sign_query
from .errors import (
    BoundTooLarge,
    BudgetError,
    CertificateError,
    DomainError,
    GridTooLarge,
    OutOfDomain,
    OutsideRegion,
    ParseError,
    SchemaError,
    SignDBError,
    ZeroRootPresent,
)
from .estimator import ConsistencyIndex, SignConditionIndex
from .numeric import RatInterval, cauchy_lower_bound, interval_ops, log_height_int, log_height_rat
from .poly import MultiPoly, family_cardinality_bound
from .region import Box, ConstSign, Cuts, EmptyRegion, RegionSpec, Undecided, decide_cut, oracle_cut_sample
from .slp import Slp, build_powersum_slp, slp_eval, slp_from_poly, slp_specialize, synth_const

__version__ = "0.1.0"
