"""Tree and vector distance metrics over patient event records, plus clustering."""

from .clustering import (
    ClusterSummary,
    Partition,
    consensus_partition,
    embed_2d,
    kmedoids,
    summarize_clusters,
)
from .distance_matrix import (
    DistanceMatrix,
    MetricSpec,
    cross_metric_report,
    minmax_normalize,
    pairwise_distances,
    smallest_pairs,
)
from .edit_distance import ted, ted_norm
from .ingestion import (
    FrequencyTable,
    PatientDataset,
    build_frequency_table,
    build_tree,
    load_records,
    truncate_code,
)
from .pqgram import PQGramProfile, PQParams, extend_tree, pqgram_distance, pqgram_distance_norm, pqgram_profile
from .tree import LabeledTree, parse_tree, serialize_tree, tree_size
from .vector_metrics import euclidean, hamming, manhattan, minkowski

__version__ = "0.1.0"
