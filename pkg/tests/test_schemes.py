import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from plsforge.bits import LabelFormatError, decode_tuple
from plsforge.graph import (
    Configuration, GraphError, complete, grid, layered, log2_ceil, path, random_connected, star,
)
from plsforge.partition import TSPartition, check_ts, find_good_seed, warmup_carving
from plsforge.pls import (
    PLSError, Scheme, accept, all_accept, reject, check_completeness, check_soundness_exhaustive,
    check_soundness_fuzz, lift_radius, run_scheme, scheme_cost,
)
from plsforge.schemes import (
    ExtensionSolver, ReductionGeometryError, assemble, compile_tradeoff, equal_endpoints,
    equality_configuration, equality_pls, exhaustive_witnesses, lex_decode, lex_encode,
    reduce_to_eq, share_decomposition, string_share, ts_cert_const, ts_cert_logn, warmup_ts_cert,
)
from plsforge.schemes.common import output_is_valid
from plsforge.schemes.equality import encode_witness
from plsforge.schemes.share import piece_graph_connected
from plsforge.schemes.spanning import (
    broken_tree, decode_label, encode_label, is_spanning_tree, spanning_tree_pls,
    tree_configuration,
)
from plsforge.schemes.ts_logn import ts_labels

import oracles


# ---------------------------------------------------------------- lexicographic codec

def test_lex_examples():
    assert lex_encode([5], "101") == {5: "1011"}
    blocks = lex_encode([9, 2, 4], "")
    assert set(blocks.values()) <= {"1", "0"} and lex_decode([2, 4, 9], blocks) == ""
    blocks = lex_encode([1, 2, 3], "1010110")
    assert len({len(b) for b in blocks.values()}) == 1
    assert lex_decode([1, 2, 3], blocks) == "1010110"


@given(st.sets(st.integers(min_value=0, max_value=500), min_size=1, max_size=12),
       st.text(alphabet="01", max_size=40))
def test_lex_matches_definition(cluster, s):
    blocks = lex_encode(cluster, s)
    assert blocks == oracles.lex_blocks(cluster, s)
    assert lex_decode(cluster, blocks) == s


def test_lex_decode_errors():
    with pytest.raises(LabelFormatError):
        lex_decode([1, 2], {1: "1", 2: "10"})
    with pytest.raises(LabelFormatError):
        lex_decode([1, 2], {1: "00", 2: "00"})


@given(st.sets(st.integers(min_value=0, max_value=99), min_size=2, max_size=8),
       st.text(alphabet="01", min_size=1, max_size=30), st.randoms(use_true_random=False))
def test_lex_swapped_blocks(cluster, s, rng):
    blocks = lex_encode(cluster, s)
    a, b = rng.sample(sorted(cluster), 2)
    if blocks[a] == blocks[b]:
        return
    blocks[a], blocks[b] = blocks[b], blocks[a]
    try:
        assert lex_decode(cluster, blocks) != s
    except LabelFormatError:
        pass


# ---------------------------------------------------------------- string sharing

def test_share_decomposition_path_seven():
    pieces, buffer = share_decomposition(path(7), 2)
    assert pieces == [frozenset({0, 1}), frozenset({3, 4})]
    assert buffer == frozenset({2, 5, 6})
    g = path(7)
    for v in g.nodes:
        assert min(g.bfs(v)[u] for p in pieces for u in p) <= 2


def test_share_needs_enough_nodes():
    with pytest.raises(GraphError):
        share_decomposition(path(2), 3)


@given(st.integers(min_value=3, max_value=40), st.integers(min_value=0, max_value=10 ** 6),
       st.integers(min_value=1, max_value=4))
def test_share_completeness(n, seed, r):
    g = random_connected(n, p=1.5 / n, seed=seed)
    if n < r:
        return
    s = "".join(random.Random(seed).choice("01") for _ in range(r))
    scheme = string_share(r, s)
    cfg = Configuration.blank(g)
    labels = scheme.prove(cfg)
    verdicts = run_scheme(scheme, cfg, labels)
    assert all(v.accept and v.aux == s for v in verdicts.values())
    assert scheme_cost(scheme, [cfg]) <= 1 + math.ceil((len(s) + 1) / r)
    assert piece_graph_connected(g, labels, r)


def test_share_rejects_disagreeing_pieces():
    g = path(12)
    scheme = string_share(2, "10")
    cfg = Configuration.blank(g)
    labels = scheme.prove(cfg)
    far_piece = [v for v in g.nodes if labels[v][0] == "0"][-2:]
    for v, block in zip(far_piece, ["01", "10"]):
        labels[v] = "0" + block
    assert not all_accept(run_scheme(scheme, cfg, labels))


@given(st.integers(min_value=0, max_value=10 ** 6))
def test_share_mutations_keep_structure(seed):
    # any all-accept labeling has pieces of size r forming a connected piece graph
    rng = random.Random(seed)
    r = 2
    g = random_connected(rng.randint(4, 14), p=0.2, seed=seed)
    scheme = string_share(r, "1")
    cfg = Configuration.blank(g)
    labels = scheme.prove(cfg)
    for v in rng.sample(list(g.nodes), rng.randint(1, 3)):
        labels[v] = rng.choice(["0", "1", "01", "00", "11", "010", "1"])
    verdicts = run_scheme(scheme, cfg, labels)
    if all_accept(verdicts):
        zero = {v for v, lab in labels.items() if lab[0] == "0"}
        from plsforge.graph import induced_components
        assert all(len(c) == r for c in induced_components(g, zero))
        assert piece_graph_connected(g, labels, r)
        assert len({v.aux for v in verdicts.values()}) == 1


# ---------------------------------------------------------------- logarithmic TS certification

def test_ts_logn_matches_ground_truth():
    g = random_connected(60, seed=4)
    s = warmup_ts_cert(2)
    cfg = Configuration.blank(g)
    p, labels = s.params["certify"](cfg)
    verdicts = run_scheme(s, cfg, labels)
    assert all_accept(verdicts)
    assert set(assemble(verdicts).clusters) == set(p.clusters)
    for v, verdict in verdicts.items():
        home = verdict.aux.home
        assert v in home and home in p.clusters
        assert verdict.aux.x[home] == home & p.separating


def test_ts_logn_merged_ids_on_path():
    g = path(30)
    p = TSPartition((frozenset(range(0, 10)), frozenset(range(10, 20)), frozenset(range(20, 30))),
                    frozenset({8, 9, 10, 11, 18, 19, 20, 21}))
    s = ts_cert_logn(9, Fraction(2, 5), lambda g: p)
    cfg = Configuration.blank(g)
    labels = ts_labels(p)
    assert all_accept(run_scheme(s, cfg, labels))
    labels.update({v: labels[v][0] + "0" for v in range(20, 30)})  # same id as cluster 0
    verdicts = run_scheme(s, cfg, labels)
    if all_accept(verdicts):
        assert output_is_valid(cfg, verdicts, 9, Fraction(2, 5))


@given(st.integers(min_value=0, max_value=10 ** 6))
def test_ts_logn_bit_flips(seed):
    rng = random.Random(seed)
    g = random_connected(rng.randint(8, 30), seed=seed)
    t = rng.choice([1, 2])
    s = warmup_ts_cert(t)
    cfg = Configuration.blank(g)
    labels = s.prove(cfg)
    v = rng.choice(g.nodes)
    labels[v] = ("0" if labels[v][0] == "1" else "1") + labels[v][1:]
    verdicts = run_scheme(s, cfg, labels)
    if all_accept(verdicts):
        assert output_is_valid(cfg, verdicts, 16 * t * log2_ceil(g.n), Fraction(1, t))


def test_ts_logn_prover_refuses_bad_partition():
    bad = TSPartition((frozenset({0, 1}), frozenset({2, 3})))
    s = ts_cert_logn(1, 0, lambda g: bad)
    with pytest.raises(ValueError):
        s.prove(Configuration.blank(path(4)))


# ---------------------------------------------------------------- constant-cost TS certification

@pytest.mark.parametrize("n,t", [(32, 1), (64, 2), (128, 1)])
def test_ts_const_replays_algorithm(n, t):
    g = random_connected(n, seed=n + t)
    s = ts_cert_const(t)
    cfg = Configuration.blank(g)
    verdicts = run_scheme(s, cfg, s.prove(cfg))
    assert all_accept(verdicts)
    truth = find_good_seed(g, t).result
    assert set(assemble(verdicts).clusters) == set(truth.clusters)
    assert assemble(verdicts).separating == truth.separating


def test_ts_const_cost_is_flat():
    costs = [scheme_cost(ts_cert_const(1), [Configuration.blank(random_connected(n, seed=1))])
             for n in (32, 64, 128, 256)]
    assert max(costs) <= 6


@given(st.integers(min_value=0, max_value=10 ** 6))
def test_ts_const_in_t_flips(seed):
    rng = random.Random(seed)
    g = random_connected(rng.randint(16, 40), p=0.08, seed=seed)
    t = 1
    s = ts_cert_const(t)
    cfg = Configuration.blank(g)
    labels = s.prove(cfg)
    v = rng.choice(g.nodes)
    labels[v] = ("0" if labels[v][0] == "1" else "1") + labels[v][1:]
    verdicts = run_scheme(s, cfg, labels)
    if all_accept(verdicts):
        assert output_is_valid(cfg, verdicts, 16 * t * log2_ceil(g.n), Fraction(1, t))


def test_ts_const_rejects_wrong_n():
    g = random_connected(20, seed=2)
    s = ts_cert_const(1)
    labels = s.prove(Configuration.blank(g))
    other = random_connected(40, seed=2)
    cfg = Configuration.blank(other)
    padded = {v: labels.get(v, "000") for v in other.nodes}
    assert not all_accept(run_scheme(s, cfg, padded))


# ---------------------------------------------------------------- spanning tree

def test_spanning_tree_star():
    g = star(8)
    cfg = Configuration(g, {0: "", **{v: "0" for v in range(1, 8)}})
    s = spanning_tree_pls()
    labels = s.prove(cfg)
    assert all(decode_label(labels[v])[2] == 1 for v in range(1, 8))
    assert all_accept(run_scheme(s, cfg, labels))


def test_spanning_tree_corrupted_distance():
    g = path(6)
    cfg = Configuration(g, {0: "", **{v: format(v - 1, "b") for v in range(1, 6)}})
    s = spanning_tree_pls()
    labels = s.prove(cfg)
    labels[3] = encode_label(0, 2, 7)
    verdicts = run_scheme(s, cfg, labels)
    assert not verdicts[3].accept or not verdicts[4].accept


@given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=10 ** 6))
def test_spanning_tree_predicate_matches_networkx(n, seed):
    cfg = tree_configuration(random_connected(n, seed=seed), seed)
    assert is_spanning_tree(cfg)
    broken = broken_tree(cfg, seed)
    parents = {v: (None if s == "" else int(s, 2)) for v, s in broken.inputs.items()}
    assert is_spanning_tree(broken) == oracles.spanning_tree_ok(broken.graph, parents) is False


def test_spanning_tree_forest_exhaustive():
    g = path(4)
    forest = Configuration(g, {0: "", 1: "0", 2: "", 3: "10"})
    rep = check_soundness_exhaustive(spanning_tree_pls(), forest, 4, pred=is_spanning_tree)
    assert rep.ok


def test_spanning_tree_extension_hook():
    g = grid(3, 3)
    cfg = tree_configuration(g, 1)
    s = spanning_tree_pls()
    honest = s.prove(cfg)
    free = frozenset({4, 5, 8})
    from plsforge.pls import extract_view
    view = extract_view(g, cfg.inputs, honest, 4, 4)
    fixed = {u: honest[u] for u in g.nodes if u not in free}
    ext = s.extend(view, fixed, free, frozenset(g.nodes))
    assert ext == {u: honest[u] for u in free}


# ---------------------------------------------------------------- compiler

def compiled(t, ts="const", strategy="hook"):
    cert = ts_cert_const(t) if ts == "const" else warmup_ts_cert(t)
    return compile_tradeoff(spanning_tree_pls(), cert, ExtensionSolver(strategy))


@pytest.mark.parametrize("ts", ["const", "logn"])
def test_compiled_completeness(ts):
    cfgs = [tree_configuration(random_connected(n, seed=n), n) for n in (20, 40, 64)]
    rep = check_completeness(compiled(4, ts), cfgs, is_spanning_tree)
    assert rep.ok


def two_coloring():
    """Bipartiteness with one-bit colours; the hook propagates parity from fixed nodes."""
    def prover(cfg):
        g = cfg.graph
        root = g.nodes[0]
        return {v: str(d % 2) for v, d in g.bfs(root).items()}

    def verifier(view):
        v = view.center
        if view.labels[v] not in ("0", "1"):
            return reject("not a colour")
        if any(view.labels[u] == view.labels[v] for u in view.neighbors(v)):
            return reject("clash")
        return accept()

    def extend(view, fixed, free, check):
        out = dict(fixed)
        todo = [u for u in fixed if any(w in free for w in view.neighbors(u))] or [min(free)]
        out.setdefault(todo[0], "0")
        while todo:
            u = todo.pop()
            for w in view.neighbors(u):
                if w in free and w not in out:
                    out[w] = "1" if out[u] == "0" else "0"
                    todo.append(w)
        return {u: out.get(u, "0") for u in free}

    return Scheme("two-coloring", 1, prover, verifier, extend=extend)


@pytest.mark.parametrize("ts", ["const", "logn"])
def test_exhaustive_solver_agrees_with_hook(ts):
    cfgs = [Configuration.blank(path(14)), Configuration.blank(grid(3, 4))]
    for cfg in cfgs:
        cert = ts_cert_const(1) if ts == "const" else warmup_ts_cert(1)
        runs = []
        for strategy in ("hook", "exhaustive"):
            s = compile_tradeoff(two_coloring(), cert, ExtensionSolver(strategy, max_bits=1))
            runs.append(run_scheme(s, cfg, s.prove(cfg)))
        assert all_accept(runs[0]) and runs[0] == runs[1]


def test_two_coloring_odd_cycle_is_rejected():
    from plsforge.graph import cycle
    s = compile_tradeoff(two_coloring(), warmup_ts_cert(1), ExtensionSolver("exhaustive", max_bits=1))
    rep = check_soundness_exhaustive(s, Configuration.blank(cycle(3)), 6, budget=1 << 22)
    assert rep.ok


def test_compiled_single_cluster_cost_is_ts_cost():
    g = complete(10)
    cfg = tree_configuration(g, 0)
    ts = warmup_ts_cert(1)
    p, _ = ts.params["certify"](cfg)
    assert p.separating == frozenset()
    s = compile_tradeoff(spanning_tree_pls(), ts)
    labels = s.prove(cfg)
    ts_labels_ = ts.prove(cfg)
    for v in g.nodes:
        ts_part, block = decode_tuple(labels[v], 2)
        assert ts_part == ts_labels_[v]
        assert block in {"0", "1"}


def test_compiled_rejects_broken_trees_under_fuzzing():
    s = compiled(2)
    for seed in range(3):
        valid = tree_configuration(random_connected(16, seed=seed), seed)
        invalid = broken_tree(valid, seed)
        rep = check_soundness_fuzz(s, invalid, 300, seed=seed, nearby=[valid], pred=is_spanning_tree)
        assert rep.ok


def test_compiled_exhaustive_soundness_tiny():
    invalid = broken_tree(tree_configuration(random_connected(7, seed=3), 3), 3)
    for ts in ("const", "logn"):
        assert check_soundness_exhaustive(compiled(1, ts), invalid, 3, pred=is_spanning_tree).ok


# ---------------------------------------------------------------- equality gadget and reduction

def test_equality_all_zero_accepts():
    cfg = equality_configuration(1, 3, "0" * 9, "0" * 9)
    assert equal_endpoints(cfg)
    assert check_completeness(equality_pls(), [cfg], equal_endpoints).ok


def test_equality_input_lengths():
    with pytest.raises(ValueError):
        equality_configuration(1, 3, "0" * 8, "0" * 9)


def test_equality_cost_is_linear_in_m():
    for m in (3, 5, 7, 9):
        cfg = equality_configuration(2, m, "1" * m * m, "1" * m * m)
        cost = scheme_cost(equality_pls(), [cfg])
        assert cost == m + max(1, (m - 1).bit_length()) <= 2 * m


def test_equality_exhaustive_soundness():
    cfg = equality_configuration(1, 3, "0" * 9, "0" * 8 + "1")
    max_bits = scheme_cost(equality_pls(), [equality_configuration(1, 3, "0" * 9, "0" * 9)])
    assert check_soundness_exhaustive(equality_pls(), cfg, max_bits, pred=equal_endpoints).ok


def test_reduction_honest_and_malformed():
    x = "101" * 3
    tr = reduce_to_eq(equality_pls(), 1, 3, x, x)
    assert tr.both_accept and not tr.parse_failure
    short = reduce_to_eq(equality_pls(), 1, 3, x, x, witness="11")
    assert short.parse_failure and not short.alice_accepts and not short.bob_accepts


def test_reduction_players_cover_their_layers():
    tr = reduce_to_eq(lift_radius(equality_pls(), 2), 2, 3, "0" * 9, "0" * 9)
    assert tr.both_accept
    assert sorted(tr.alice_nodes + tr.bob_nodes) == list(layered(2, 3).nodes)


def test_reduction_geometry_guard():
    with pytest.raises(ReductionGeometryError):
        reduce_to_eq(lift_radius(equality_pls(), 3), 1, 3, "0" * 9, "0" * 9)


def test_reduction_honest_witness_for_other_input_fails():
    x, y = "0" * 9, "0" * 8 + "1"
    w = encode_witness(equality_pls().prove(equality_configuration(1, 3, x, x)))
    tr = reduce_to_eq(equality_pls(), 1, 3, x, y, witness=w)
    assert tr.alice_accepts and not tr.bob_accepts
