"""Topology-and-time scoring of collaboration-graph nodes for merged identities."""
from .centrality import CentralityVector, centrality_scores
from .graph import (
    CollabEvent,
    EgoNetwork,
    GraphError,
    IsolatedNodeError,
    TemporalGraph,
    UnknownNodeError,
    UnscorableError,
    build_graph,
    decay_weight,
    ego_network,
)
from .mcl import Clustering, MclParams, cluster_assignment, cluster_neighbors
from .scoring import (
    ActivityProfile,
    NcResult,
    ScoreParams,
    ScoreRecord,
    activity_profiles,
    nc_score,
    s_score,
    score_many,
    score_node,
    symmetric_kl,
    tm_score,
)

__version__ = "0.1.0"
