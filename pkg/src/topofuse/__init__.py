"""Fuse author-specific Bayes nets into one consensus DAG and compare prior
and posterior compromise over it."""

from .bayes import CPT, DiscreteBayesNet, JointTable, align_to_consensus, enumerate_joint, extend_cpt, query
from .compromise import (
    CompromiseReport,
    CompromiseWeights,
    compare_compromises,
    posterior_compromise,
    prior_compromise,
)
from .dag import (
    Arc,
    Dag,
    direct_neighbors,
    find_cycle,
    has_directed_path,
    is_acyclic,
    project,
    tau_values,
    transitive_successors,
)
from .fusion import (
    ArcPartition,
    FusionResult,
    FusionTrace,
    classify_arcs,
    fuse_dags,
    fuse_many,
    fuse_many_traced,
    min_eq,
    min_rev,
    replay_trace,
)
from .kernels import BACKEND
from .reversal import ReversalEffect, reverse_arc_cpt, reverse_arc_structural

__version__ = "0.1.0"
