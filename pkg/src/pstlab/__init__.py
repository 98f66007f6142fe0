"""Perfect state transfer on hypercubes and their Godsil-McKay switched variants."""

from .evolution import (
    EvolutionSchedule,
    FidelityTrace,
    Segment,
    fidelity,
    fidelity_trace,
    propagator,
    schedule_propagator,
)
from .graph import (
    ConnectionSet,
    Graph,
    GraphError,
    SizeCapError,
    cartesian_product,
    complement_vertex,
    convex_combination,
    cubelike,
    hypercube,
    is_connected,
)
from .pst import (
    DerivativeReport,
    PSTReport,
    expected_s_pairs,
    find_pst_pairs,
    fidelity_derivative_analytic,
    fidelity_derivative_numeric,
    protected_set,
    pst_census,
)
from .spectral import (
    DecompositionError,
    SpectralDecomposition,
    Verdict,
    are_cospectral,
    eigendecompose,
    eigenvalue_support,
    is_standard_hadamard_diagonalizable,
    minimal_polynomial,
    pst_obstruction_check,
    standard_hadamard,
)
from .switching import (
    BlockSpec,
    Partition,
    PartitionError,
    build_block_cube,
    canonical_q4_partition,
    gm_switch,
    switched_hypercube,
    validate_gm_partition,
)

__version__ = "0.1.0"
