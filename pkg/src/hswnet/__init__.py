"""Consensus dynamics and network coherence on hierarchical small-world networks."""

from .coherence import (
    CoherenceReport,
    ScalingRow,
    bound_report,
    coherence_from_spectrum,
    h1_closed,
    h2_closed,
    kirchhoff_index,
    scaling_table,
)
from .dynamics import (
    SimConfig,
    SimulationTrace,
    estimate_h1,
    estimate_h2,
    simulate_delay,
    simulate_noiseless,
)
from .errors import BudgetExceeded, GraphError, HswError, SimulationError, SpectrumError
from .graph import (
    Graph,
    GraphMetrics,
    MatrixSet,
    build_baseline,
    build_matrices,
    compute_metrics,
    read_edgelist,
    write_edgelist,
)
from .hsw import (
    HierarchicalNetwork,
    LevelProfile,
    build_hsw,
    level_degree,
    level_profile,
    order_and_size,
)
from .spectral import (
    EigenPair,
    SpectralExtremes,
    SpectrumResult,
    closed_form_spectrum,
    eigenvector_family1,
    eigenvector_family2,
    extremes,
    numeric_spectrum,
    transition_spectrum,
)

__version__ = "0.1.0"
