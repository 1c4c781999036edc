"""Ball-carving constructions of ordered partitions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..graph import Graph, GraphError, is_connected, weak_diameter
from ..rng import derive_seed, stream
from .ts import OrderedPartition, as_fraction, cluster_degeneracy


class PaddedCarvingError(RuntimeError):
    """No cluster met the boundary bound within the resample budget."""

    def __init__(self, step: int, alive: int, best_ratio: Fraction, bound: Fraction):
        self.step = step
        self.alive = alive
        self.best_ratio = best_ratio
        self.bound = bound
        super().__init__(
            f"step {step}: best boundary ratio {best_ratio} ({float(best_ratio):.4f}) "
            f"exceeds {bound} ({float(bound):.4f}) with {alive} nodes alive; beta may be too small"
        )


def _mask(pos: dict[int, int], n: int, nodes) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[[pos[v] for v in nodes]] = True
    return m


def warmup_carving(g: Graph, t: int) -> OrderedPartition:
    """Grow even-radius balls around the smallest alive id until one stops expanding.

    A ball is cut once |B_j(v) cap L| <= (1 + 1/t) |B_{j-2}(v) cap L|, so at most a
    1/t fraction of the cluster can sit within distance 2 of what stays alive.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    mat, pos = g.distance_matrix()
    nodes = np.array(g.nodes, dtype=np.int64)
    alive = np.ones(g.n, dtype=bool)
    clusters = []
    while alive.any():
        i = int(np.flatnonzero(alive)[0])
        row = mat[i]
        j = 2
        while True:
            outer_mask = alive & (row <= j)
            outer = int(np.count_nonzero(outer_mask))
            inner = int(np.count_nonzero(alive & (row <= j - 2)))
            if t * outer <= (t + 1) * inner:
                break
            j += 2
        clusters.append(frozenset(int(v) for v in nodes[outer_mask]))
        alive &= ~outer_mask
    return OrderedPartition(tuple(clusters))


@dataclass(frozen=True)
class PaddedSample:
    clusters: tuple[frozenset[int], ...]
    radii: dict[int, int]
    seed: int


def _truncated_exponential(rng, rate: float, cap: float) -> float:
    # inverse CDF of Exp(rate) conditioned on being <= cap
    mass = -math.expm1(-rate * cap)
    return -math.log1p(-rng.random() * mass) / rate


def sample_padded(g: Graph, Lambda: int, beta: float | Fraction, seed: int,
                  alive: frozenset[int] | set[int] | None = None) -> PaddedSample:
    """One weakly Lambda-bounded partition of ``alive`` (default: all nodes).

    Every node of ``alive`` acts as a center once, in a seeded random order, and
    claims the still-unclaimed part of its ball. Radii come from an exponential
    with rate beta/Lambda truncated to [0, Lambda/2]. Distances are measured in g.
    """
    if Lambda < 1:
        raise ValueError("Lambda must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not is_connected(g):
        raise GraphError("padded sampling needs a connected graph")
    mat, pos = g.distance_matrix()
    universe = set(g.nodes) if alive is None else set(alive)
    rng = stream(seed, "padded")
    centers = sorted(universe)
    rng.shuffle(centers)
    open_mask = _mask(pos, g.n, universe)
    rate = float(beta) / Lambda
    cap = Lambda / 2
    clusters, radii = [], {}
    nodes = np.array(g.nodes, dtype=np.int64)
    for c in centers:
        r = int(math.floor(_truncated_exponential(rng, rate, cap)))
        grab = open_mask & (mat[pos[c]] <= r)
        if grab.any():
            clusters.append(frozenset(int(v) for v in nodes[grab]))
            radii[c] = r
            open_mask &= ~grab
        if not open_mask.any():
            break
    return PaddedSample(tuple(clusters), radii, seed)


def _boundary_ratios(mat: np.ndarray, pos: dict[int, int], alive: np.ndarray,
                     clusters) -> list[Fraction]:
    out = []
    for c in clusters:
        idx = np.fromiter((pos[v] for v in c), dtype=np.int64, count=len(c))
        rest = alive.copy()
        rest[idx] = False
        if not rest.any():
            out.append(Fraction(0))
            continue
        near = (mat[np.ix_(idx, np.flatnonzero(rest))] <= 2).any(axis=1)
        out.append(Fraction(int(near.sum()), len(c)))
    return out


def padded_carving(g: Graph, t: int, beta: float | Fraction | None = None, seed: int = 0,
                   max_resamples: int = 50) -> OrderedPartition:
    """Carve clusters of weak diameter <= t out of the alive set one at a time.

    Each step samples padded partitions of the alive set and keeps the cluster C
    minimising |C cap B_2(L - C)| / |C|; it is taken once that ratio is at most
    2 beta / t. When the whole alive set already has weak diameter <= t it is
    taken directly (ratio 0). Raises PaddedCarvingError with the best ratio seen
    if a step exhausts ``max_resamples``.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if not is_connected(g):
        raise GraphError("padded carving needs a connected graph")
    if beta is None:
        beta = math.log(max(g.n, 2))
    bound = 2 * as_fraction(beta) / t
    mat, pos = g.distance_matrix()
    alive_set = set(g.nodes)
    clusters = []
    step = 0
    while alive_set:
        if weak_diameter(g, alive_set) <= t:
            clusters.append(frozenset(alive_set))
            break
        alive = _mask(pos, g.n, alive_set)
        best: tuple[Fraction, frozenset[int]] | None = None
        for attempt in range(max_resamples):
            sample = sample_padded(g, t, beta, derive_seed(seed, "step", step, attempt), alive_set)
            ratios = _boundary_ratios(mat, pos, alive, sample.clusters)
            k = min(range(len(ratios)), key=lambda i: (ratios[i], min(sample.clusters[i])))
            if best is None or ratios[k] < best[0]:
                best = (ratios[k], sample.clusters[k])
            if best[0] <= bound:
                break
        if best is None or best[0] > bound:
            raise PaddedCarvingError(step, len(alive_set), best[0] if best else Fraction(1), bound)
        clusters.append(best[1])
        alive_set -= best[1]
        step += 1
    result = OrderedPartition(tuple(clusters))
    for c in result:
        if weak_diameter(g, c) > t:
            raise AssertionError("padded cluster exceeds the diameter bound")
    if cluster_degeneracy(g, result) > bound:
        raise AssertionError("padded carving broke its degeneracy bound")
    return result
