"""Randomised ball carving driven by a hashed radius per node id.

Every node, in id order, proposes a ball whose radius comes from a shared
``RadiusFunction``; the ball is taken if growing it by 2 would not expand the
alive set by more than a (1 + 1/t) factor. With a radius function fixed by a
short seed the whole outcome can be recomputed locally by any node.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ..graph import Graph, log2_ceil
from ..rng import hash_index
from .ts import TSPartition, check_ts


class SeedSearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class RadiusFunction:
    """Maps a node id to an even radius uniform over {2tL+2, ..., 8tL}."""

    seed: int
    t: int
    n: int

    @property
    def log_n(self) -> int:
        return log2_ceil(self.n)

    @property
    def low(self) -> int:
        return 2 * self.t * self.log_n + 2

    @property
    def high(self) -> int:
        return 8 * self.t * self.log_n

    @property
    def choices(self) -> int:
        return (self.high - self.low) // 2 + 1

    def __call__(self, node: int) -> int:
        return self.low + 2 * hash_index(self.choices, "radius", self.seed, self.t, self.n, node)


def radius_fn(seed: int, t: int, n: int) -> RadiusFunction:
    if t < 1:
        raise ValueError("t must be >= 1")
    return RadiusFunction(seed, t, n)


@dataclass
class AResult:
    ok: bool
    clusters: list[frozenset[int]]
    separating: frozenset[int]
    taken: frozenset[int]
    centers: dict[int, int] = field(default_factory=dict)  # cluster index -> center
    alive: frozenset[int] = frozenset()

    @property
    def partition(self) -> TSPartition | None:
        return TSPartition(tuple(self.clusters), self.separating) if self.ok else None


def algorithm_a(g: Graph, t: int, R: RadiusFunction, max_steps: int | None = None) -> AResult:
    """One pass over all nodes in id order; see the module docstring.

    ``max_steps`` stops the pass early (used to exercise the failure path).
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    mat, pos = g.distance_matrix()
    nodes = np.array(g.nodes, dtype=np.int64)
    alive = np.ones(g.n, dtype=bool)
    reach = 2 * t * log2_ceil(g.n)
    clusters, centers, taken = [], {}, set()
    x: set[int] = set()
    for step, v in enumerate(g.nodes):
        if max_steps is not None and step >= max_steps:
            break
        row = mat[pos[v]]
        if not (alive & (row <= reach)).any():
            continue
        r = R(v)
        cand = alive & (row <= r)
        outer = int(np.count_nonzero(cand))
        inner = int(np.count_nonzero(alive & (row <= r - 2)))
        if t * outer > (t + 1) * inner:
            continue
        rest = alive & ~cand
        idx = np.flatnonzero(cand)
        if rest.any():
            near = (mat[np.ix_(idx, np.flatnonzero(rest))] <= 2).any(axis=1)
            x.update(int(u) for u in nodes[idx[near]])
        centers[len(clusters)] = v
        clusters.append(frozenset(int(u) for u in nodes[idx]))
        taken.add(v)
        alive = rest
    left = frozenset(int(u) for u in nodes[alive])
    return AResult(not left, clusters, frozenset(x), frozenset(taken), centers, left)


# the name used throughout the documentation
algorithm_A = algorithm_a


@dataclass(frozen=True)
class GoodSeed:
    seed: int
    tries: int
    result: AResult


def is_good(g: Graph, t: int, res: AResult) -> bool:
    if not res.ok:
        return False
    L = log2_ceil(g.n)
    return check_ts(g, res.partition, 16 * t * L, Fraction(1, t)).ok


def find_good_seed(g: Graph, t: int, seed_stream: Iterable[int] | None = None,
                   max_tries: int | None = None) -> GoodSeed:
    """First seed in the stream whose run succeeds and passes the TS check.

    The default stream is 0, 1, 2, ... capped at n^2 tries, which is what a
    2 log n bit seed field can address.
    """
    if seed_stream is None:
        seed_stream = itertools.count()
    if max_tries is None:
        max_tries = max(1, g.n) ** 2
    for tries, s in enumerate(itertools.islice(seed_stream, max_tries), 1):
        res = algorithm_a(g, t, radius_fn(s, t, g.n))
        if is_good(g, t, res):
            return GoodSeed(s, tries, res)
    raise SeedSearchError(f"no good seed among {max_tries} tries")


def find_my_cluster(g: Graph, taken: Iterable[int], R: RadiusFunction, u: int) -> int | None:
    """Smallest taken w with dist(w, u) <= min(R(w), 8tL); None if there is none."""
    limit = 8 * R.t * R.log_n
    dist_u = g.bfs(u)
    best = None
    for w in taken:
        d = dist_u.get(w)
        if d is not None and d <= limit and d <= R(w) and (best is None or w < best):
            best = w
    return best
