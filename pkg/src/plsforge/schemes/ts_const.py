"""Certifying a TS partition with O(1) bits per node.

The prover picks a seed for which the hashed-radius carving succeeds and
shares (seed, n) through the string-sharing scheme. Each node then replays
the carving locally: knowing which nodes were ball centers (InT) and the
radius function, it recomputes its own cluster and the clusters around it.

Label layout: InT bit, InX bit, InU bit, then the sharing block.
"""

from __future__ import annotations

from fractions import Fraction

from ..bits import LabelFormatError, bits_to_int, fixed_width
from ..graph import Configuration, log2_ceil
from ..partition import RadiusFunction, TSPartition, find_good_seed
from ..pls import LocalView, Scheme, Verdict, accept, reject
from .common import TSOutput, bit
from .share import ShareReject, read_shared, share_labels


def share_radius(n: int) -> int:
    return min(3 * log2_ceil(n) + 2, max(n, 1))


def seed_string(seed: int, n: int) -> str:
    L = log2_ceil(n)
    return fixed_width(seed, 2 * L) + fixed_width(n, L + 1)


def parse_seed_string(s: str, n: int) -> tuple[int, int]:
    L = log2_ceil(n)
    if len(s) != 3 * L + 1:
        raise LabelFormatError("shared string has the wrong length")
    return bits_to_int(s[:2 * L]), bits_to_int(s[2 * L:])


def const_radius(t: int, n: int) -> int:
    return 40 * t * log2_ceil(n) + 2


def _split(label: str) -> tuple[bool, str]:
    if len(label) < 3:
        raise LabelFormatError("label shorter than its three flags")
    return label[2] == "1", label[3:]


def ts_const_verifier(view: LocalView, t: int) -> Verdict:
    n = view.n
    L = log2_ceil(n)
    labels = view.labels
    v = view.center
    _split(labels[v])
    r = share_radius(n)
    try:
        shared = read_shared(view.restrict(min(view.radius, 4 * r + 2)), r, _split)
        seed, n_claimed = parse_seed_string(shared, n)
    except ShareReject as exc:
        return reject(f"sharing: {exc}")
    if n_claimed != n:
        return reject("shared node count is wrong")
    R = RadiusFunction(seed, t, n)
    reach = 8 * t * L
    depth = view.depth
    exact = view.radius - reach  # owners are exact for nodes up to this depth

    owner: dict[int, int] = {}
    for w in sorted(u for u in view.nodes if bit(labels[u], 0)):
        limit = min(R(w), reach)
        for u, d in view.bfs(w).items():
            if d <= limit and depth[u] <= exact and u not in owner:
                owner[u] = w
    mine = owner.get(v)
    if mine is None:
        return reject("no taken center claims this node")

    def group(f: int) -> frozenset[int]:
        return frozenset(u for u, o in owner.items() if o == f)

    # every member is within 8tL of the center f, so the weak diameter is <= 16tL
    home = group(mine)
    xs = frozenset(u for u in home if bit(labels[u], 1))
    if Fraction(len(xs), len(home)) > Fraction(1, t):
        return reject("too many separating nodes in own cluster")
    clusters = {home: xs}
    for w in sorted(view.ball_of_set(home, 2)):
        f = owner.get(w)
        if f is None:
            return reject(f"node {w} near the cluster has no center")
        c = group(f)
        if c not in clusters:
            clusters[c] = frozenset(u for u in c if bit(labels[u], 1))
        if w not in home and not bit(labels[w], 1):
            if any(d <= 2 and not bit(labels[u], 1) for u, d in view.bfs(w).items() if u in home):
                return reject("non-separating nodes of two clusters within distance 2")
    return accept(TSOutput(home, frozenset(clusters), clusters))


def ts_cert_const(t: int) -> Scheme:
    """Certifies a (16tL, 1/t)-TS partition; cost 3 + ceil((3L+2)/r) bits."""
    if t < 1:
        raise ValueError("t must be >= 1")

    def certify(cfg: Configuration):
        g = cfg.graph
        good = find_good_seed(g, t)
        res = good.result
        p = TSPartition(tuple(res.clusters), res.separating)
        shared = share_labels(g, share_radius(g.n), seed_string(good.seed, g.n))
        labels = {}
        for v in g.nodes:
            in_u, block = shared[v]
            labels[v] = ("1" if v in res.taken else "0") + ("1" if v in res.separating else "0") \
                + ("1" if in_u else "0") + block
        return p, labels

    return Scheme(
        "ts-cert-const",
        lambda n: const_radius(t, n),
        lambda cfg: certify(cfg)[1],
        lambda view: ts_const_verifier(view, t),
        params={"certify": certify, "t": t,
                "diameter": lambda n: 16 * t * log2_ceil(n), "eps": Fraction(1, t)},
    )
