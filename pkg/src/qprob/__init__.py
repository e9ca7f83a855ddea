"""Generalized quantum measurement probabilities.

Core pieces: operator algebra (:mod:`qprob.operators`), measurement
procedures and POVMs (:mod:`qprob.measurement`), the probability engine for
prediction, posteriors and retrodiction (:mod:`qprob.probability`), additive
frame-function reconstruction (:mod:`qprob.frames`), a seeded Monte-Carlo
post-selection simulator (:mod:`qprob.simulate`) and a property battery
(:mod:`qprob.verify`).  The HTTP front end lives in :mod:`qprob.service`,
the CLI in :mod:`qprob.cli`.
"""

__version__ = "0.1.0"

from .config import Tolerances, overrides, set_tolerances, tolerances
from .errors import (
    DegenerateProcedureError,
    DimensionMismatchError,
    FrameViolationError,
    IncompatibleEnsembleError,
    IncompatibleStateError,
    InternalConsistencyError,
    LabelCollisionError,
    NotPositiveError,
    NotStandardError,
    OutcomeImpossibleError,
    QprobError,
    UnknownLabelError,
    ValidationError,
)
from .frames import (
    FrameFunction,
    HiddenFrame,
    ReconstructionResult,
    polarization_bases,
    positivity_of_reconstruction,
    reconstruct,
    uniqueness_check,
    verify_additivity,
    verify_scaling,
)
from .measurement import (
    MeasurementProcedure,
    StandardPOVM,
    is_standard,
    merge_outcomes,
    procedure_sum,
    random_povm,
    restrict,
    to_povm,
)
from .operators import (
    DensityOperator,
    EigenDecomposition,
    HermitianOperator,
    PositiveOperator,
    StateVector,
    UnitaryOperator,
    basis_state,
    check_positive,
    eigh,
    identity,
    positive_power,
    projector,
    random_density,
    random_hermitian,
    random_positive,
    random_state,
    random_unitary,
    tensor_product,
    trace_product,
)
from .probability import (
    PosteriorReport,
    PreparationEnsemble,
    ProbabilityReport,
    RetrodictiveState,
    average_state,
    bayes_consistency,
    born_noncontextuality_check,
    general_distribution,
    general_probability,
    posterior,
    retrodict,
    retrodict_via_duality,
    retrodictive_state,
)
from .simulate import (
    NO_HERALD_LABEL,
    SINK_LABEL,
    ComparisonRow,
    FrequencyEstimate,
    Scenario,
    SimulationReport,
    communication_scenario,
    completion_of,
    herald_scenario,
    run,
)
from .verify import PROPERTY_NAMES, PropertyResult, run_battery
