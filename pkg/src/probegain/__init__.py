"""Line-center probe gain under a resonant strong drive in a three-level medium."""

from .critical import (
    CriticalSet,
    RegionLabel,
    classify_region,
    critical_x,
    kappa_curve,
    kappa_opt,
    kappa_opt_asymptote,
    limits_ground_n,
    limits_small_gamma_mn,
    spontaneous_halfwidths,
    x1_solid_limit,
)
from .errors import (
    AbsentBranchError,
    ConfigError,
    CurveUndefinedError,
    DomainError,
    InvariantError,
    NoOptimumError,
    NoRootError,
    ProbeGainError,
    UndefinedRatioError,
)
from .model import (
    Drive,
    GainEvaluation,
    Pumping,
    RelaxationSet,
    drive_from_kappa,
    gain_inversion_condition,
    gain_ratio,
    interference_dominance,
    pop_inversion_condition,
    saturated_pop_diff,
    saturation_kappa,
    tau_squared,
)

__version__ = "0.1.0"
