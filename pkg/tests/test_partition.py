import io
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from plsforge.graph import (
    Graph, complete, cycle, dist, grid, layered, log2_ceil, path, random_connected, random_tree,
    weak_diameter,
)
from plsforge.partition import (
    OrderedPartition, PaddedCarvingError, PartitionError, RadiusFunction, SeedSearchError,
    TSPartition, algorithm_a, check_ts, cluster_degeneracy, degeneracy_to_ts, find_good_seed,
    find_my_cluster, padded_carving, radius_fn, read_partition, responsibility_regions,
    sample_padded, warmup_carving, write_partition,
)

import oracles


def random_ordered_partition(g: Graph, rng: random.Random, pieces: int) -> list[frozenset[int]]:
    nodes = list(g.nodes)
    rng.shuffle(nodes)
    cuts = sorted(rng.sample(range(1, len(nodes)), min(pieces, len(nodes)) - 1)) if len(nodes) > 1 else []
    bounds = [0, *cuts, len(nodes)]
    return [frozenset(nodes[a:b]) for a, b in zip(bounds, bounds[1:])]


# ---------------------------------------------------------------- check_ts

def test_check_ts_single_cluster():
    g = grid(4, 4)
    rep = check_ts(g, TSPartition((frozenset(g.nodes),)), 6, 0)
    assert rep.ok and rep.cost_ratio == 0 and rep.max_weak_diameter == 6
    assert not check_ts(g, TSPartition((frozenset(g.nodes),)), 5, 0).ok


def test_check_ts_ratio_two_thirds():
    g = path(4)
    p = TSPartition((frozenset({0, 1, 2}), frozenset({3})), frozenset({1, 2}))
    rep = check_ts(g, p, 3, Fraction(2, 3))
    assert rep.cost_ratio == Fraction(2, 3)
    assert not any("|C cap X|" in v for v in rep.violations)
    assert any("|C cap X|" in v for v in check_ts(g, p, 3, Fraction(1, 2)).violations)


def test_check_ts_path_without_separator():
    g = path(4)
    p = TSPartition((frozenset({0, 1}), frozenset({2, 3})))
    rep = check_ts(g, p, 1, 0)
    assert not rep.ok
    assert any("avoiding X-X" in v for v in rep.violations)
    # a single X node is not enough; two consecutive ones are
    assert not check_ts(g, TSPartition(p.clusters, frozenset({1})), 1, 1).ok
    assert check_ts(g, TSPartition(p.clusters, frozenset({1, 2})), 1, 1).ok


def test_check_ts_rejects_non_partition():
    g = path(3)
    assert not check_ts(g, TSPartition((frozenset({0, 1}),)), 5, 1).ok
    assert not check_ts(g, TSPartition((frozenset({0, 1}), frozenset({1, 2}))), 5, 1).ok


@given(st.integers(min_value=2, max_value=9), st.integers(min_value=0, max_value=10 ** 6),
       st.integers(min_value=1, max_value=4))
def test_two_separation_matches_path_enumeration(n, seed, pieces):
    rng = random.Random(seed)
    g = random_connected(n, p=0.3, seed=seed)
    clusters = random_ordered_partition(g, rng, pieces)
    x = frozenset(v for v in g.nodes if rng.random() < 0.5)
    expected = oracles.two_separated_by_paths(g, clusters, x)
    rep = check_ts(g, TSPartition(tuple(clusters), x), n, 1)
    assert rep.ok == expected
    assert check_ts(g, TSPartition(tuple(clusters), x), 3, Fraction(1, 2)).ok == \
        oracles.check_ts(g, clusters, x, 3, Fraction(1, 2))


# ---------------------------------------------------------------- degeneracy

def test_degeneracy_path_six():
    g = path(6)
    order = [frozenset({0, 1, 2}), frozenset({3, 4, 5})]
    assert cluster_degeneracy(g, order) == Fraction(2, 3)
    assert cluster_degeneracy(g, order[::-1]) == Fraction(2, 3)
    assert degeneracy_to_ts(g, order).separating == frozenset({1, 2})
    assert cluster_degeneracy(g, [frozenset(g.nodes)]) == 0
    assert degeneracy_to_ts(g, [frozenset(g.nodes)]).separating == frozenset()


def test_degeneracy_rejects_bad_partition():
    with pytest.raises(PartitionError):
        cluster_degeneracy(path(3), [frozenset({0})])


@given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=10 ** 6),
       st.integers(min_value=1, max_value=6))
def test_degeneracy_to_ts_is_valid(n, seed, pieces):
    rng = random.Random(seed)
    g = random_connected(n, seed=seed)
    order = random_ordered_partition(g, rng, pieces)
    eps = cluster_degeneracy(g, order)
    assert eps == oracles.degeneracy(g, order)
    t = max(weak_diameter(g, c) for c in order)
    p = degeneracy_to_ts(g, order)
    assert check_ts(g, p, t, eps).ok


@given(st.integers(min_value=2, max_value=30), st.integers(min_value=0, max_value=10 ** 6))
def test_ts_partition_local_cover_and_regions(n, seed):
    rng = random.Random(seed)
    g = random_connected(n, seed=seed)
    p = degeneracy_to_ts(g, random_ordered_partition(g, rng, 3))
    owner = p.cluster_index()
    for v in g.nodes:
        closed = {v, *g.neighbors(v)}
        assert any(closed <= (c | p.separating) for c in p.clusters)
    regions = responsibility_regions(g, p)
    seen: set[int] = set()
    for r in regions.values():
        assert not (r & seen)
        seen |= r
    needing = {u for u in g.nodes if not ({u, *g.neighbors(u)} <= p.separating)}
    assert seen == needing
    assert all(owner[v] == i for i, c in enumerate(p.clusters) for v in c)


def test_partition_text_round_trip(tmp_path):
    p = TSPartition((frozenset({0, 1}), frozenset({2, 5})), frozenset({1, 2}))
    target = tmp_path / "p.txt"
    write_partition(p, target)
    assert read_partition(target) == p
    with pytest.raises(PartitionError):
        read_partition(io.StringIO("c 1 0\n"))
    with pytest.raises(PartitionError):
        read_partition(io.StringIO("c 0 0\nz 1\n"))


# ---------------------------------------------------------------- warmup

def test_warmup_on_complete_graph():
    assert len(warmup_carving(complete(5), 3)) == 1


def test_warmup_on_path_64():
    g = path(64)
    order = warmup_carving(g, 2)
    assert cluster_degeneracy(g, order) <= Fraction(1, 2)
    assert all(weak_diameter(g, c) <= 16 * 2 * 6 for c in order)
    assert sorted(v for c in order for v in c) == list(g.nodes)


@given(st.integers(min_value=1, max_value=60), st.integers(min_value=0, max_value=10 ** 6),
       st.sampled_from([1, 2, 3, 5]))
def test_warmup_invariants(n, seed, t):
    g = random_connected(n, seed=seed)
    order = warmup_carving(g, t)
    assert cluster_degeneracy(g, order) <= Fraction(1, t)
    assert all(weak_diameter(g, c) <= 16 * t * log2_ceil(n) for c in order)


def test_warmup_rejects_bad_t():
    with pytest.raises(ValueError):
        warmup_carving(path(3), 0)


# ---------------------------------------------------------------- padded

def test_sample_padded_is_deterministic_and_bounded():
    g = grid(10, 10)
    for seed in range(20):
        a = sample_padded(g, 6, 2.0, seed)
        assert a.clusters == sample_padded(g, 6, 2.0, seed).clusters
        assert all(weak_diameter(g, c) <= 6 for c in a.clusters)
        assert sorted(v for c in a.clusters for v in c) == list(g.nodes)


def test_sample_padded_large_lambda_usually_one_cluster():
    g = cycle(12)
    singles = sum(len(sample_padded(g, 2 * 6 * 4, 0.01, s).clusters) == 1 for s in range(100))
    assert singles > 50


def test_sample_padded_errors():
    with pytest.raises(ValueError):
        sample_padded(Graph([0, 1]), 3, 1.0, 0)
    with pytest.raises(ValueError):
        sample_padded(path(3), 0, 1.0, 0)


def test_padding_rate_is_within_bound():
    # with radius rate beta/Lambda, a rho-ball is cut with probability about
    # 1 - exp(-2 rho beta / Lambda) once truncation at Lambda/2 is negligible
    g = grid(30, 30)
    mat, pos = g.distance_matrix()
    lam, beta = 80, 2 * math.log(g.n)
    for rho in (1, 2):
        rates = []
        for seed in range(200):
            owner = np.empty(g.n, dtype=np.int64)
            for i, c in enumerate(sample_padded(g, lam, beta, seed).clusters):
                owner[[pos[v] for v in c]] = i
            cut = ((mat <= rho) & (owner[None, :] != owner[:, None])).any(axis=1)
            rates.append(cut.mean())
        mean, se = np.mean(rates), np.std(rates) / math.sqrt(len(rates))
        assert mean <= 1 - math.exp(-2 * rho * beta / lam) + 3 * se


def test_padded_single_cluster_when_t_is_large():
    g = grid(4, 4)
    assert len(padded_carving(g, 2 * 6, math.log(16), seed=1)) == 1


def test_padded_grid_t8():
    g = grid(16, 16)
    beta = math.log(256)
    order = padded_carving(g, 8, beta, seed=0)
    assert cluster_degeneracy(g, order) <= Fraction(2 * beta / 8)
    assert all(weak_diameter(g, c) <= 8 for c in order)


def test_padded_failure_reports_best_ratio():
    with pytest.raises(PaddedCarvingError) as err:
        padded_carving(path(40), 3, 0.01, seed=0, max_resamples=2)
    assert err.value.best_ratio > err.value.bound
    assert err.value.alive > 0


# ---------------------------------------------------------------- radius function and algorithm A

def test_radius_function_range_and_determinism():
    R = radius_fn(7, 2, 100)
    L = log2_ceil(100)
    values = [R(i) for i in range(10 ** 4)]
    assert all(v % 2 == 0 and 2 * 2 * L + 2 <= v <= 8 * 2 * L for v in values)
    assert values == [RadiusFunction(7, 2, 100)(i) for i in range(10 ** 4)]
    assert values != [radius_fn(8, 2, 100)(i) for i in range(10 ** 4)]


def test_radius_function_is_uniform():
    R = radius_fn(3, 1, 64)
    counts = {r: 0 for r in range(R.low, R.high + 1, 2)}
    assert len(counts) == R.choices
    for i in range(10 ** 5):
        counts[R(i)] += 1
    assert chisquare(list(counts.values())).pvalue > 1e-4


def test_algorithm_a_on_small_complete_graph():
    for seed in range(20):
        res = algorithm_a(complete(4), 1, radius_fn(seed, 1, 4))
        assert res.ok and len(res.clusters) == 1 and res.separating == frozenset()


def test_algorithm_a_step_cap_forces_failure():
    g = random_connected(40, seed=1)
    res = algorithm_a(g, 1, radius_fn(0, 1, 40), max_steps=0)
    assert not res.ok and res.alive and res.partition is None


@given(st.integers(min_value=2, max_value=70), st.integers(min_value=0, max_value=10 ** 6),
       st.sampled_from([1, 2]))
def test_algorithm_a_and_find_my_cluster(n, seed, t):
    g = random_connected(n, p=1.5 / n, seed=seed)
    R = radius_fn(seed, t, n)
    res = algorithm_a(g, t, R)
    if not res.ok:
        return
    L = log2_ceil(n)
    assert check_ts(g, res.partition, 16 * t * L, Fraction(1, t)).ok
    for i, c in enumerate(res.clusters):
        center = res.centers[i]
        for v in c:
            assert find_my_cluster(g, res.taken, R, v) == center
    for a in g.nodes[:5]:
        for b in g.nodes:
            fa, fb = find_my_cluster(g, res.taken, R, a), find_my_cluster(g, res.taken, R, b)
            if fa is not None and fa == fb:
                assert dist(g, a, b) <= 16 * t * L


def test_find_my_cluster_edge_cases():
    g = path(10)
    R = radius_fn(0, 1, 10)
    assert all(find_my_cluster(g, [], R, v) is None for v in g.nodes)
    assert find_my_cluster(g, [4], R, 5) == 4


def test_find_good_seed():
    g = random_tree(50, seed=2)
    good = find_good_seed(g, 2)
    again = algorithm_a(g, 2, radius_fn(good.seed, 2, g.n))
    assert again.clusters == good.result.clusters and again.ok
    assert find_good_seed(Graph([0]), 1).seed == 0
    with pytest.raises(SeedSearchError):
        find_good_seed(g, 2, seed_stream=[], max_tries=5)


def test_find_good_seed_usually_first_try():
    tries = [find_good_seed(random_connected(40, seed=s), 1).tries for s in range(100)]
    assert sorted(tries)[50] == 1


def test_layered_graph_partition():
    g = layered(2, 5)
    res = find_good_seed(g, 1).result
    assert check_ts(g, res.partition, 16 * log2_ceil(g.n), 1).ok
