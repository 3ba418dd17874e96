"""Fibres, symmetry-based synchronization and fibre-aware editing of hypergraphs."""

from .dynamics import (
    CouplingStructure,
    KuramotoParams,
    Trajectory,
    extract_sync_clusters,
    integrate,
    order_parameter_series,
    order_parameters,
    rhs,
    sweep_frustration,
)
from .errors import (
    Disconnected,
    EmptyHyperedge,
    EmptyInput,
    HyperfibreError,
    InputError,
    InvalidCounts,
    MalformedLine,
    NonFiniteState,
    UnbalancedPartition,
)
from .fibration import (
    FibrationResult,
    QuotientIncidence,
    fibres,
    hypergraph_fibres,
    is_balanced,
    lifting_holds,
    quotient,
    refine,
)
from .freqtune import DeltaBound, FrequencyAssignment, assign_frequencies, delta_max, stability_margin
from .hypergraph import (
    DegreeProfile,
    Hypergraph,
    IncidenceBipartite,
    degrees,
    format_hypergraph,
    incidence,
    is_connected,
    largest_component,
    parse_hypergraph,
    project,
    random_hypergraph,
)
from .partition import FibreStats, Partition, fibre_stats, partition_from_json, partition_to_json
from .topoedit import EditConfig, EditReport, inject_redundancy, retarget, sparsify, structured_batch

__version__ = "0.1.0"
