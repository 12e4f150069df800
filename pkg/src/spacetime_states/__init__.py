"""Density operators for regions of a discrete spacetime.

Assigns a state to every region of every hypersurface of a (1+1)-D lattice,
evolves global states under unitary or foliation-relative-collapse dynamics,
and tests which locality properties the resulting region states satisfy.
"""

from .dynamics import (
    FRC,
    SPIN_FLIP,
    UNITARY,
    EventSchedule,
    GateSpec,
    MeasurementSpec,
    StateHistory,
    evolve_to,
    histories_equal,
    history_along,
    translate_schedule,
    z_measurement,
)
from .errors import (
    BranchAnnihilatedError,
    DimensionError,
    FoliationError,
    InvalidStateError,
    LatticeError,
    NotUnitaryError,
    PreconditionError,
    SpacetimeStateError,
)
from .fock import (
    RegionFactorization,
    RegionPartition,
    TruncatedFockSpace,
    creation_operator,
    embed_first_quantized,
    fock_dimension,
    number_operator,
    region_factorization_iso,
)
from .lattice import (
    Event,
    Foliation,
    Hypersurface,
    Lattice,
    Region,
    enumerate_hypersurfaces_through,
    event_in_past,
    is_spacelike,
    past_cone_slice,
    validate_foliation,
)
from .qstate import (
    DensityOperator,
    LinearOperator,
    StateVector,
    TensorFactorization,
    apply_local,
    density_of,
    partial_trace,
    reduced_density,
    tensor_product,
    trace_distance,
)
from .regions import (
    CONTEXTUALITY,
    FULL_LOCALITY,
    NIHILISM,
    NON_SEPARABILITY,
    ConsistencyReport,
    HierarchyLevel,
    QuasiClassicalDecomposition,
    RegionStateReport,
    classify_hierarchy,
    foliation_consistency,
    joint_vs_marginals,
    lightcone_determinism_check,
    no_signalling_check,
    quasi_classical_decompose,
    region_state,
    supervenience_witness,
)
from .scenarios import (
    ColemanHeppParams,
    EPRParams,
    coleman_hepp,
    epr_scenario,
    narratability_demo,
)
from .settings import set_tolerances, tolerances

__version__ = "0.1.0"
