"""Partitions with bounded weak diameter and small two-separating sets."""

from .algorithm_a import (
    AResult, GoodSeed, RadiusFunction, SeedSearchError, algorithm_A, algorithm_a,
    find_good_seed, find_my_cluster, is_good, radius_fn,
)
from .carving import PaddedCarvingError, PaddedSample, padded_carving, sample_padded, warmup_carving
from .ts import (
    OrderedPartition, PartitionError, TSPartition, TSReport, check_ts, cluster_degeneracy,
    degeneracy_to_ts, read_partition, responsibility_regions, separation_violations,
    validate_partition, write_partition,
)
