"""Certification, construction, and control of contracting recurrent networks.

The package assembles and checks the eight weighted-norm contractivity
conditions for firing-rate and Hopfield networks in continuous and discrete
time, searches for certificates by dense semidefinite feasibility, generates
contracting weight matrices by exact parameterization, applies the structural
transforms relating the conditions, synthesizes low-gain integral control
gains, and validates everything by simulation.
"""

__version__ = "0.1.0"

from .conditions import (
    ALL_CONDITIONS,
    Architecture,
    Certificate,
    ConditionId,
    Nonlinearity,
    Rate,
    RateKind,
    TimeDomain,
    assemble,
    best_rate,
    check,
    make_certificate,
)
from .feasibility import (
    FeasibilityProblem,
    FeasibilityResult,
    FeasibilityStatus,
    SolverOptions,
    find_certificate,
    min_lambda_max,
)
from .integral_control import (
    GainResult,
    PlantModel,
    assemble_gain_lmi,
    dc_gain_check,
    max_feasible_cr,
    synthesize_gain,
)
from .multipliers import (
    LureSystem,
    MultiplierKind,
    MultiplierMatrix,
    SlopeInterval,
    assemble_lure_ct,
    assemble_lure_dt,
    imm_slope,
    m_cone,
    m_mone,
)
from .parameterization import (
    ParamSeed,
    generate,
    generate_certificate,
    invert,
    psd_shift,
    random_seed,
    seed_from_raw,
    squash,
)
from .simulate import (
    Activation,
    SimTrace,
    blend_act,
    empirical_rate,
    fixed_point,
    identity_act,
    make_activation,
    relu_act,
    sigmoid_act,
    simulate_ct,
    simulate_dt,
    simulate_reduced,
    tanh_act,
    track,
    weighted_distance,
)
from .transforms import (
    DualityMap,
    SKEW_W,
    cone_to_mone,
    disc_to_cts,
    duality_map,
    dualize,
    lds_necessary,
    lemma3_fr_certificate,
    lemma3_hopfield_certificate,
    schur_diag_stability,
    skew_counterexample_vertices,
    spectral_abscissa,
    symmetric_construction,
)

__all__ = [name for name in dir() if not name.startswith("_")]
