"""Finite classical lattice models as an executable measurement theory.

The package enumerates the full configuration space of a small lattice and
builds, exactly, the objects of a commutative measurement theory on top of
it: the algebra of observables, the complete Boolean algebra of questions,
states with their Riesz pairing, spectral measures with a finite functional
calculus, outcome distributions of individual measurements, and experiments
on separation, weak equivalence and the comparison of statistical ensembles.
"""

__version__ = "0.1.0"

from .errors import (
    EmptyEnergyShell,
    EnumerationCapExceeded,
    InconsistentThread,
    IncompleteLocalTable,
    InvalidEventRule,
    InvalidModelSpec,
    InvalidSpectralMeasure,
    LatticeError,
    NonFiniteValue,
    PhaseSpaceMismatch,
    TableLengthMismatch,
    UndefinedOnSpectrum,
    UnknownConfiguration,
    UnknownSite,
    WeightSumError,
)
from .phase import (
    DEFAULT_ENUM_CAP,
    ModelSpec,
    PhaseSpace,
    Region,
    build_phase_space,
    enumerate_regions,
    ising_chain,
    restrict_configuration,
)
from .observables import (
    Observable,
    constant,
    energy,
    indicator,
    is_idempotent,
    local_observable,
    magnetization,
    observable_from_name,
    occupation,
    pointwise_combine,
    spin,
    sup_norm,
)
from .questions import (
    Question,
    chi,
    chi_mask,
    complement,
    join,
    join_all,
    meet,
    meet_all,
    phi,
    question_from_json,
    question_from_observable,
    unit,
    zero,
)
from .states import (
    LocalState,
    State,
    Thread,
    dirac,
    gibbs,
    grand_canonical,
    marginalize,
    microcanonical,
    mix,
    pair,
    state_of,
    thread_of,
    total_variation,
    uniform,
)
from .spectral import (
    BorelSet,
    Interval,
    SpectralMeasure,
    apply_measure,
    functional_calculus,
    reconstruct,
    resolution,
    spectral_measure,
    spectrum,
)
from .measurement import (
    OutcomeDistribution,
    outcome_distribution,
    probability,
    sample_measurements,
    transmission,
)
from .equivalence import (
    ConvergenceReport,
    ConvergenceRow,
    EquivalenceReport,
    ProbeSet,
    dominated_convergence_demo,
    ensemble_convergence,
    separating_observable,
    states_separate_observables,
    weakly_equivalent,
)
