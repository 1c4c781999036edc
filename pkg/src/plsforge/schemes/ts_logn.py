"""Certifying a given TS partition with O(log n) bits per node.

Label layout: the InX bit, then the cluster identifier in binary. A node
rebuilds its cluster as the same-identifier nodes around it and checks the
clusters within distance 2 of it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from ..bits import LabelFormatError, int_to_bits
from ..graph import Configuration, Graph, log2_ceil
from ..partition import TSPartition, check_ts, degeneracy_to_ts, warmup_carving
from ..pls import LocalView, Scheme, Verdict, accept, reject
from .common import TSOutput, as_bound

Bound = int | Callable[[int], int]
Ratio = Fraction | Callable[[int], Fraction]
Partitioner = Callable[[Graph], TSPartition]


def ts_labels(p: TSPartition) -> dict[int, str]:
    return {v: ("1" if v in p.separating else "0") + int_to_bits(i)
            for i, c in enumerate(p.clusters) for v in c}


def _parse(label: str) -> tuple[bool, str]:
    if not label:
        raise LabelFormatError("empty label")
    return label[0] == "1", label[1:]


def ts_logn_verifier(view: LocalView, diameter: int, eps: Fraction) -> Verdict:
    labels = view.labels
    v = view.center
    parsed: dict[int, tuple[bool, str]] = {}

    def info(u: int) -> tuple[bool, str]:
        if u not in parsed:
            parsed[u] = _parse(labels[u])
        return parsed[u]

    reach = 3 * diameter + 2

    def cluster_around(u: int) -> frozenset[int]:
        ident = info(u)[1]
        return frozenset(w for w, d in view.bfs(u).items() if d <= reach and info(w)[1] == ident)

    home = cluster_around(v)
    if any(view.dist(a, b) > diameter for a in home for b in home if a < b):
        return reject("own cluster too wide")
    around = view.ball_of_set(home, 2)
    clusters = {}
    for u in sorted(around):
        c = cluster_around(u)
        if c not in clusters:
            if any(view.dist(a, b) > diameter for a in c for b in c if a < b):
                return reject(f"cluster of {u} too wide")
            xs = frozenset(w for w in c if info(w)[0])
            if Fraction(len(xs), len(c)) > eps:
                return reject(f"cluster of {u} has too many separating nodes")
            clusters[c] = xs
    for u in home:
        if info(u)[0]:
            continue
        for w, d in view.bfs(u).items():
            if 0 < d <= 2 and not info(w)[0] and w not in home:
                return reject("non-separating nodes of two clusters within distance 2")
    return accept(TSOutput(home, frozenset(clusters), clusters))


def ts_cert_logn(diameter: Bound, eps: Ratio, partitioner: Partitioner) -> Scheme:
    """Scheme certifying the partition ``partitioner`` builds; radius 3*diameter + 2.

    ``diameter`` and ``eps`` may depend on n. The prover refuses partitions that
    do not meet them.
    """
    def certify(cfg: Configuration):
        p = partitioner(cfg.graph)
        report = check_ts(cfg.graph, p, as_bound(diameter, cfg.n), as_bound(eps, cfg.n))
        if not report.ok:
            raise ValueError(f"partitioner produced an invalid TS partition: {report.violations[:2]}")
        return p, ts_labels(p)

    def verifier(view: LocalView) -> Verdict:
        return ts_logn_verifier(view, as_bound(diameter, view.n), Fraction(as_bound(eps, view.n)))

    return Scheme(
        "ts-cert-logn",
        lambda n: 3 * as_bound(diameter, n) + 2,
        lambda cfg: certify(cfg)[1],
        verifier,
        params={"certify": certify, "diameter": diameter, "eps": eps},
    )


def warmup_ts_cert(t: int) -> Scheme:
    """The logarithmic certifier fed by warmup carving: diameter 16tL, ratio 1/t."""
    def partitioner(g: Graph) -> TSPartition:
        return degeneracy_to_ts(g, warmup_carving(g, t))

    s = ts_cert_logn(lambda n: 16 * t * log2_ceil(n), Fraction(1, t), partitioner)
    s.params["t"] = t
    return s
