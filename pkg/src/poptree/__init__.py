"""Seeded simulator of a popularity-governed, multi-version directory tree.

Peers browse and update a shared tree of directory and file nodes where
every node may carry versions from many writers; default browsing always
follows the most viewed version.  The package models the multi-writer
namespace, the browsing/updating peer population, and the metrics that
show popularity steering the commonly seen tree toward quality above the
update average.
"""

from .directory import (
    DirectoryStore,
    MainTree,
    NodeVersion,
    expected_quality_fraction,
    init_control_tree,
    main_tree,
    sample_quality,
    serialize_store,
)
from .engine import (
    RunResult,
    SimConfig,
    Simulation,
    TraversalRecord,
    choose_update_index,
    derive_seed,
    run,
    run_single,
)
from .experiment import ExperimentSpec, ResultBundle, run_experiment
from .export import export_dot
from .metrics import (
    AverageSnapshot,
    MajorityEvent,
    MajorityTracker,
    MetricsSeries,
    QualityBucket,
    Snapshot,
    average_snapshots,
    degree_histogram,
    snapshot,
    viewers_by_quality,
    viewers_histogram,
)
from .namespace import (
    Key,
    KeyCollisionError,
    Namespace,
    ValueRecord,
    digest,
    node_name,
)
from .peers import PeerPopulation, PopularityIndex

__version__ = "0.1.0"

__all__ = [
    "AverageSnapshot",
    "DirectoryStore",
    "ExperimentSpec",
    "Key",
    "KeyCollisionError",
    "MainTree",
    "MajorityEvent",
    "MajorityTracker",
    "MetricsSeries",
    "Namespace",
    "NodeVersion",
    "PeerPopulation",
    "PopularityIndex",
    "QualityBucket",
    "ResultBundle",
    "RunResult",
    "SimConfig",
    "Simulation",
    "Snapshot",
    "TraversalRecord",
    "ValueRecord",
    "average_snapshots",
    "choose_update_index",
    "degree_histogram",
    "derive_seed",
    "digest",
    "expected_quality_fraction",
    "export_dot",
    "init_control_tree",
    "main_tree",
    "node_name",
    "run",
    "run_experiment",
    "run_single",
    "sample_quality",
    "serialize_store",
    "snapshot",
    "viewers_by_quality",
    "viewers_histogram",
]
