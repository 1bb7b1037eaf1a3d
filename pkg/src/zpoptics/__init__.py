"""Stochastic zeropoint-field optics for entanglement swapping.

Beams are linear forms over complex Gaussian vacuum amplitudes, optical
elements are linear maps, and detection probabilities come out both in
closed form (Gaussian moment factorization) and from Monte Carlo sampling
with vacuum-intensity subtraction.
"""

from .config import ConfigError, CorrectionSpec, ScenarioConfig
from .covariance import (
    CovarianceModel,
    gaussian_kernel,
    gaussian_moment,
    isserlis_quadruple,
    pair_correlation,
)
from .detection import (
    DetectorPort,
    InternalConsistencyError,
    ProbabilityReport,
    SignTableRow,
    WickCheck,
    correlation_table,
    double_detection_correlation,
    intensity_correlation,
    joint_probability,
    quadruple_probability,
    sign_table,
    single_rate,
    wick_expansion_check,
)
from .elements import (
    Beam,
    ElementKind,
    ElementSpec,
    apply_bs,
    apply_element,
    apply_pbs,
    apply_phase,
    pdc_source,
    propagate,
)
from .fields import (
    BasisVar,
    FieldExpr,
    ModeId,
    ModeRegistry,
    Pol,
    Source,
    SpaceTimeEvent,
    Wavevector,
    conj,
    linear_combine,
)
from .montecarlo import (
    EstimatorResult,
    JointGaussianSpec,
    build_joint_spec,
    empirical_fourth_moment,
    estimate_joint,
    estimate_quadruple,
    sample,
)
from .swapping import (
    BellLabel,
    BellOutcome,
    CoincidencePattern,
    SwappingScenario,
    WitnessReport,
    apply_feedforward,
    build_scenario,
    classify_pattern,
    swapped_pair_witness,
)

__version__ = "0.1.0"
