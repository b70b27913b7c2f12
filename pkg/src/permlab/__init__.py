"""permlab: exact and Monte Carlo laboratory for permanents of random
discrete matrices.

The package computes permanent distributions of random matrices with
independent finite-support entries, enumerates attainable permanent
value sets, and verifies a battery of anticoncentration inequalities in
exact rational arithmetic.
"""

from .brackets import Interval, certainly_le, certainly_lt, exp_bracket, sqrt_bracket
from .constants import (
    ConstantChain,
    Constraint,
    chain_constraints,
    chain_to_json,
    check_inductive_step,
    derive_constants,
    easy_fp_bound,
    tau,
)
from .dists import (
    FiniteDist,
    ThinningSpec,
    collision_prob,
    convolve,
    convolve_all,
    dist_from_json,
    dist_to_json,
    format_dist,
    hypergeometric_empty_prob,
    max_point_prob,
    parse_dist,
    sample_subset,
    sample_subsets,
    star_zero_prob,
    symmetrize,
)
from .errors import (
    AccumulatorOverflowError,
    CapExceededError,
    ContractError,
    ParseError,
    PermlabError,
)
from .inequalities import (
    BatteryReport,
    InequalityReport,
    SetFamily,
    assumption_battery,
    battery_to_json,
    check_duplication,
    check_monotonicity,
    check_relative_assumption,
    check_relative_halasz,
    duplication_battery,
    halasz_battery,
    heavy_pairs,
    heavy_pairs_battery,
    heavy_pairs_bound,
    kesten_battery,
    kesten_rademacher_battery,
    kesten_ratio,
    monotonicity_battery,
    report_to_json,
)
from .matrices import (
    ColumnSet,
    IntMatrix,
    complement_submatrix,
    det_naive,
    format_matrix,
    identity,
    minor_expansion,
    ones,
    parse_matrix,
    per_naive,
    per_ryser,
    upper_rows,
)
from .ranges import (
    PermRange,
    RangeStore,
    check_brualdi_newman,
    check_krauter,
    growth_report,
    phi,
    phi_with_witnesses,
    range_from_json,
    range_to_json,
)
from .spectrum import (
    Spectrum,
    exact_spectrum,
    mc_spectrum,
    q_max,
    spectrum_to_csv,
    spectrum_to_json,
)
from .structured import (
    StructuredMatrixSpec,
    check_easy_bound,
    check_markov_bound,
    event_E,
    iid_spec,
    sample_structured,
    thin_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "AccumulatorOverflowError",
    "BatteryReport",
    "CapExceededError",
    "ColumnSet",
    "ConstantChain",
    "Constraint",
    "ContractError",
    "FiniteDist",
    "InequalityReport",
    "IntMatrix",
    "Interval",
    "ParseError",
    "PermRange",
    "PermlabError",
    "RangeStore",
    "SetFamily",
    "Spectrum",
    "StructuredMatrixSpec",
    "ThinningSpec",
    "assumption_battery",
    "battery_to_json",
    "certainly_le",
    "certainly_lt",
    "chain_constraints",
    "chain_to_json",
    "check_brualdi_newman",
    "check_duplication",
    "check_easy_bound",
    "check_inductive_step",
    "check_krauter",
    "check_markov_bound",
    "check_monotonicity",
    "check_relative_assumption",
    "check_relative_halasz",
    "collision_prob",
    "complement_submatrix",
    "convolve",
    "convolve_all",
    "derive_constants",
    "det_naive",
    "dist_from_json",
    "dist_to_json",
    "duplication_battery",
    "easy_fp_bound",
    "event_E",
    "exact_spectrum",
    "exp_bracket",
    "format_dist",
    "format_matrix",
    "growth_report",
    "halasz_battery",
    "heavy_pairs",
    "heavy_pairs_battery",
    "heavy_pairs_bound",
    "hypergeometric_empty_prob",
    "identity",
    "iid_spec",
    "kesten_battery",
    "kesten_rademacher_battery",
    "kesten_ratio",
    "max_point_prob",
    "mc_spectrum",
    "minor_expansion",
    "monotonicity_battery",
    "ones",
    "parse_dist",
    "parse_matrix",
    "per_naive",
    "per_ryser",
    "phi",
    "phi_with_witnesses",
    "q_max",
    "range_from_json",
    "range_to_json",
    "report_to_json",
    "sample_structured",
    "sample_subset",
    "sample_subsets",
    "spectrum_to_csv",
    "spectrum_to_json",
    "star_zero_prob",
    "symmetrize",
    "tau",
    "thin_matrix",
    "upper_rows",
]
