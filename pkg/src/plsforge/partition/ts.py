"""Two-separated partitions, their checker, and cluster degeneracy."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

from ..graph import FAR, INF, Graph, GraphError, ball_of_set, weak_diameter


class PartitionError(ValueError):
    pass


def as_fraction(x: int | float | str | Fraction) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class OrderedPartition:
    """Clusters in carving order."""

    clusters: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "clusters", tuple(frozenset(c) for c in self.clusters))

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.clusters)

    def __len__(self) -> int:
        return len(self.clusters)

    def __getitem__(self, i: int) -> frozenset[int]:
        return self.clusters[i]


@dataclass(frozen=True)
class TSPartition:
    clusters: tuple[frozenset[int], ...]
    separating: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "clusters", tuple(frozenset(c) for c in self.clusters))
        object.__setattr__(self, "separating", frozenset(self.separating))

    def cluster_index(self) -> dict[int, int]:
        return {v: i for i, c in enumerate(self.clusters) for v in c}

    def x_of(self, i: int) -> frozenset[int]:
        return self.clusters[i] & self.separating


@dataclass
class TSReport:
    ok: bool
    violations: list[str] = field(default_factory=list)
    max_weak_diameter: float = 0
    cost_ratio: Fraction = Fraction(0)


def validate_partition(g: Graph, clusters: Iterable[Iterable[int]]) -> None:
    seen: set[int] = set()
    for i, c in enumerate(clusters):
        c = set(c)
        if not c:
            raise PartitionError(f"cluster {i} is empty")
        if c - set(g.nodes):
            raise PartitionError(f"cluster {i} holds unknown nodes {sorted(c - set(g.nodes))[:5]}")
        if c & seen:
            raise PartitionError(f"cluster {i} overlaps an earlier cluster")
        seen |= c
    if seen != set(g.nodes):
        raise PartitionError(f"{len(set(g.nodes) - seen)} nodes are in no cluster")


def separation_violations(g: Graph, clusters: Sequence[frozenset[int]], x: frozenset[int]) -> list[tuple[int, int]]:
    """Pairs of non-X nodes from different clusters joined without an X-X edge.

    After deleting all X-X edges, a violation exists iff some component holds
    non-X nodes of two clusters. One witness pair per offending component.
    """
    owner = {v: i for i, c in enumerate(clusters) for v in c}
    parent = {v: v for v in g.nodes}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in g.edges():
        if u in x and v in x:
            continue
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    first: dict[int, int] = {}
    bad: dict[int, tuple[int, int]] = {}
    for v in g.nodes:
        if v in x:
            continue
        root = find(v)
        if root not in first:
            first[root] = v
        elif owner[first[root]] != owner[v] and root not in bad:
            bad[root] = (first[root], v)
    return list(bad.values())


def check_ts(g: Graph, p: TSPartition, t: float, eps: int | float | str | Fraction) -> TSReport:
    """Check the three TS conditions; ratios are compared exactly."""
    eps = as_fraction(eps)
    try:
        validate_partition(g, p.clusters)
    except PartitionError as exc:
        return TSReport(False, [f"not a partition: {exc}"], INF, Fraction(0))
    if p.separating - set(g.nodes):
        return TSReport(False, ["separating set has unknown nodes"], INF, Fraction(0))
    violations = []
    worst_diam: float = 0
    worst_ratio = Fraction(0)
    for i, c in enumerate(p.clusters):
        d = weak_diameter(g, c)
        worst_diam = max(worst_diam, d)
        if d > t:
            violations.append(f"cluster {i} has weak diameter {d} > {t}")
        ratio = Fraction(len(c & p.separating), len(c))
        worst_ratio = max(worst_ratio, ratio)
        if ratio > eps:
            violations.append(f"cluster {i} has |C cap X|/|C| = {ratio} > {eps}")
    for a, b in separation_violations(g, p.clusters, p.separating):
        violations.append(f"nodes {a} and {b} of different clusters connect avoiding X-X edges")
    return TSReport(not violations, violations, worst_diam, worst_ratio)


def _near_later(g: Graph, clusters: Sequence[frozenset[int]]) -> list[frozenset[int]]:
    """For each cluster, its members within distance 2 of the later clusters."""
    mat, pos = g.distance_matrix()
    out = []
    remaining = np.ones(g.n, dtype=bool)
    for c in clusters:
        idx = np.fromiter((pos[v] for v in c), dtype=np.int64, count=len(c))
        remaining[idx] = False
        if not remaining.any():
            out.append(frozenset())
            continue
        close = (mat[np.ix_(idx, np.flatnonzero(remaining))] <= 2).any(axis=1)
        out.append(frozenset(v for v, hit in zip((int(g.nodes[i]) for i in idx), close) if hit))
    return out


def cluster_degeneracy(g: Graph, ordered: OrderedPartition | Sequence[Iterable[int]]) -> Fraction:
    """max over i of the fraction of C_i within distance 2 of later clusters."""
    clusters = [frozenset(c) for c in ordered]
    validate_partition(g, clusters)
    worst = Fraction(0)
    for c, near in zip(clusters, _near_later(g, clusters)):
        worst = max(worst, Fraction(len(near), len(c)))
    return worst


def degeneracy_to_ts(g: Graph, ordered: OrderedPartition | Sequence[Iterable[int]]) -> TSPartition:
    """X collects, per cluster, the members within distance 2 of later clusters."""
    clusters = [frozenset(c) for c in ordered]
    validate_partition(g, clusters)
    x: set[int] = set()
    for near in _near_later(g, clusters):
        x |= near
    return TSPartition(tuple(clusters), frozenset(x))


def responsibility_regions(g: Graph, p: TSPartition) -> dict[int, frozenset[int]]:
    """For each cluster index, the nodes whose closed neighbourhood meets C minus X."""
    regions = {}
    for i, c in enumerate(p.clusters):
        free = c - p.separating
        regions[i] = ball_of_set(g, free, 1) if free else frozenset()
    return regions


# ---------------------------------------------------------------- text format

def dump_partition(p: TSPartition, out: TextIO) -> None:
    for i, c in enumerate(p.clusters):
        out.write(f"c {i} " + " ".join(map(str, sorted(c))) + "\n")
    out.write("x " + " ".join(map(str, sorted(p.separating))) + "\n")


def load_partition(src: TextIO) -> TSPartition:
    clusters: dict[int, frozenset[int]] = {}
    x: frozenset[int] | None = None
    for lineno, raw in enumerate(src, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *rest = line.split()
        try:
            nums = [int(v) for v in rest]
        except ValueError:
            raise PartitionError(f"line {lineno}: expected integers") from None
        if tag == "c":
            if not nums or nums[0] in clusters:
                raise PartitionError(f"line {lineno}: malformed or repeated cluster")
            clusters[nums[0]] = frozenset(nums[1:])
        elif tag == "x":
            if x is not None:
                raise PartitionError(f"line {lineno}: repeated separating set")
            x = frozenset(nums)
        else:
            raise PartitionError(f"line {lineno}: unknown record {tag!r}")
    if sorted(clusters) != list(range(len(clusters))):
        raise PartitionError("cluster indices must be 0..k-1")
    return TSPartition(tuple(clusters[i] for i in range(len(clusters))), x or frozenset())


def write_partition(p: TSPartition, target: str | os.PathLike | TextIO) -> None:
    if hasattr(target, "write"):
        dump_partition(p, target)  # type: ignore[arg-type]
        return
    with open(target, "w") as fh:
        dump_partition(p, fh)


def read_partition(source: str | os.PathLike | TextIO) -> TSPartition:
    if hasattr(source, "read"):
        return load_partition(source)  # type: ignore[arg-type]
    with open(source) as fh:
        return load_partition(fh)


__all__ = [
    "OrderedPartition", "TSPartition", "TSReport", "PartitionError", "GraphError",
    "check_ts", "cluster_degeneracy", "degeneracy_to_ts", "separation_violations",
    "responsibility_regions", "validate_partition", "read_partition", "write_partition",
    "as_fraction", "FAR",
]
