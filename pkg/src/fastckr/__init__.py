"""Fast CKR partitions of sparse graphs, with FRT trees, distance oracles
and spanners built on top of them."""
from .ckr import (
    Partition,
    SamplerTrace,
    ckr_partition_graph,
    ckr_partition_graph_with,
    ckr_partition_metric,
    draw_parameters,
)
from .frt import DistortionReport, empirical_distortion, sample_frt, ultra_distance
from .graph import (
    GraphFormatError,
    WeightedGraph,
    connected_components,
    dijkstra,
    exact_metric,
    format_graph,
    is_connected,
    load_graph,
    read_graph,
)
from .hierarchy import (
    HierarchyTree,
    PaddedSet,
    assemble_hierarchy,
    hierarchy_to_ultrametric,
    padded_points,
    sample_hierarchy,
    sample_level_partitions,
)
from .oracle import (
    DistanceOracle,
    NonMetricError,
    OracleBuildError,
    build_oracle,
    check_metric,
    oracle_from_matrix,
    query,
    query_many,
)
from .scales import (
    BottleneckTree,
    QuotientGraph,
    ScaleFamily,
    ScaleLevel,
    build_bottleneck_tree,
    build_scale_family,
    quotient,
    restrict,
)
from .spanner import Spanner, baswana_sen
from .ultrametric import UltrametricTree

__version__ = "0.1.0"
