"""qcity: fuse physical and social city observation streams into
spatio-temporal blocks, mine them, and serve them over HTTP."""

from .fusion import BlockStore, assign, cross_modal_view, related
from .model import Block, Event, Observation, SpatioTemporalKey, validate_observation
from .spatial import Granularity, ZonePartition, build_partition, st_key, time_bucket

__version__ = "0.1.0"

__all__ = [
    "Block",
    "BlockStore",
    "Event",
    "Granularity",
    "Observation",
    "SpatioTemporalKey",
    "ZonePartition",
    "assign",
    "build_partition",
    "cross_modal_view",
    "related",
    "st_key",
    "time_bucket",
    "validate_observation",
    "__version__",
]
