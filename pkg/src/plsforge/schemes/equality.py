"""Equality of the two endpoint inputs of a layered graph, and the two-party simulation.

In ``layered(t, m)`` the endpoints hold m*m-bit strings. The radius-1 scheme
writes segment i of the string on the i-th node of every even layer; interior
single nodes check that both neighbouring layers carry identical copies, and
endpoints compare the copies against their input.

Label of an even-layer node: index i in fixed width, then the segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..bits import LabelFormatError, decode_tuple, encode_tuple, fixed_width
from ..graph import Configuration, layered, layered_layers
from ..pls import (
    Labeling, LabelSearch, LocalView, PLSError, Scheme, SoundnessReport, Verdict,
    accept, extract_view, reject,
)
from ..bits import all_bitstrings, count_bitstrings


class ReductionGeometryError(AssertionError):
    """A simulated view reached the other player's private input."""


def index_width(m: int) -> int:
    return max(1, (m - 1).bit_length())


def equality_configuration(t: int, m: int, x: str, y: str) -> Configuration:
    if len(x) != m * m or len(y) != m * m:
        raise ValueError("endpoint inputs must have m*m bits")
    layers = layered_layers(t, m)
    inputs = {v: "" for layer in layers for v in layer}
    inputs[layers[0][0]] = x
    inputs[layers[-1][0]] = y
    return Configuration(layered(t, m), inputs)


def endpoints(cfg: Configuration) -> list[int]:
    return [v for v in cfg.graph.nodes if cfg.graph.degree(v) % 2 == 1]


def equal_endpoints(cfg: Configuration) -> bool:
    ends = endpoints(cfg)
    return len(ends) == 2 and cfg.inputs[ends[0]] == cfg.inputs[ends[1]]


def _prover(cfg: Configuration) -> Labeling:
    g = cfg.graph
    ends = endpoints(cfg)
    x = cfg.inputs[min(ends)]
    m = g.degree(min(ends))
    w = index_width(m)
    labels = {v: "" for v in g.nodes}
    # even-layer nodes are exactly the degree-2 nodes; their rank inside the layer is the index
    seen: set[int] = set()
    frontier = [min(ends)]
    while frontier:
        nxt: set[int] = set()
        for u in frontier:
            seen.add(u)
        for u in frontier:
            nxt |= {z for z in g.neighbors(u) if z not in seen}
        layer = sorted(nxt)
        if layer and g.degree(layer[0]) == 2:
            for i, z in enumerate(layer):
                labels[z] = fixed_width(i, w) + x[i * m:(i + 1) * m]
        frontier = layer
    return labels


def _read(label: str, m: int) -> tuple[int, str]:
    w = index_width(m)
    if len(label) < w:
        raise LabelFormatError("label shorter than its index field")
    i = int(label[:w], 2)
    if i >= m:
        raise LabelFormatError("index out of range")
    return i, label[w:]


def _verifier(view: LocalView) -> Verdict:
    v = view.center
    deg = len(view.neighbors(v))
    if deg == 2:
        return accept()
    if deg < 2:
        return reject("not a layered graph")
    labels = view.labels
    if deg % 2 == 0:
        m = deg // 2
        copies: dict[int, list[str]] = {}
        for u in sorted(view.neighbors(v)):
            i, _ = _read(labels[u], m)
            copies.setdefault(i, []).append(labels[u])
            if len(copies[i]) > 2 or (len(copies[i]) == 2 and copies[i][0] != copies[i][1]):
                return reject(f"segment {i} not copied consistently")
        if any(len(copies.get(i, ())) != 2 for i in range(m)):
            return reject("some segment is missing")
        return accept()
    m = deg
    segments: dict[int, str] = {}
    for u in sorted(view.neighbors(v)):
        i, seg = _read(labels[u], m)
        if i in segments:
            return reject(f"segment {i} appears twice")
        segments[i] = seg
    if "".join(segments[i] for i in range(m)) != view.inputs[v]:
        return reject("segments do not spell the input")
    return accept()


def equality_pls() -> Scheme:
    """Radius-1 scheme for equal endpoint inputs on layered graphs; cost w + m."""
    return Scheme("equality-gadget", 1, _prover, _verifier)


# ---------------------------------------------------------------- two-party simulation

@dataclass
class CommTranscript:
    witness: str
    alice_accepts: bool
    bob_accepts: bool
    parse_failure: bool = False
    alice_nodes: list[int] = field(default_factory=list)
    bob_nodes: list[int] = field(default_factory=list)

    @property
    def both_accept(self) -> bool:
        return self.alice_accepts and self.bob_accepts


class _Players:
    """Alice owns layers 1..t+1, Bob layers t+2..2t+3; each sees only its own input."""

    def __init__(self, scheme: Scheme, t: int, m: int, x: str, y: str):
        layers = layered_layers(t, m)
        self.scheme = scheme
        self.g = layered(t, m)
        self.alice = [v for layer in layers[:t + 1] for v in layer]
        self.bob = [v for layer in layers[t + 1:] for v in layer]
        self.a_end, self.b_end = layers[0][0], layers[-1][0]
        base = {v: "" for v in self.g.nodes}
        self.inputs = {
            "alice": {**base, self.a_end: x},
            "bob": {**base, self.b_end: y},
        }
        self.radius = scheme.radius_for(self.g.n)
        self._views: dict[int, LocalView] = {}
        for v in self.g.nodes:
            who = "alice" if v in set(self.alice) else "bob"
            hidden = self.b_end if who == "alice" else self.a_end
            view = extract_view(self.g, self.inputs[who], None, v, self.radius)
            if hidden in view:
                raise ReductionGeometryError(
                    f"{who}'s view of node {v} contains the other endpoint {hidden}")
            self._views[v] = view

    def evaluate(self, v: int, labels: Mapping[int, str]) -> Verdict:
        return self.scheme.verify(self._views[v].with_labels(labels))


def encode_witness(labels: Labeling) -> str:
    return encode_tuple(labels[v] for v in sorted(labels))


def reduce_to_eq(t_pls: Scheme, t: int, m: int, x: str, y: str,
                 witness: str | None = None) -> CommTranscript:
    """Alice and Bob each run the verifier on their half of layered(t, m).

    Without a witness the honest one for (x, x) is used. A witness that does not
    split into one label per node makes both players reject.
    """
    players = _Players(t_pls, t, m, x, y)
    if witness is None:
        witness = encode_witness(t_pls.prove(equality_configuration(t, m, x, x)))
    nodes = sorted(players.g.nodes)
    try:
        parts = decode_tuple(witness, len(nodes))
    except LabelFormatError:
        return CommTranscript(witness, False, False, True, players.alice, players.bob)
    labels = dict(zip(nodes, parts))
    alice = all(players.evaluate(v, labels).accept for v in players.alice)
    bob = all(players.evaluate(v, labels).accept for v in players.bob)
    return CommTranscript(witness, alice, bob, False, players.alice, players.bob)


def exhaustive_witnesses(t_pls: Scheme, t: int, m: int, x: str, y: str, max_bits: int,
                         budget: int = 1 << 24) -> SoundnessReport:
    """Search every witness made of labels of at most ``max_bits`` bits.

    A witness is a violation when both simulated players accept it.
    """
    players = _Players(t_pls, t, m, x, y)
    nodes = sorted(players.g.nodes)
    order = players.alice + players.bob
    search = LabelSearch(order, nodes, all_bitstrings(max_bits), players.evaluate, budget=budget)
    found = next(iter(search), None)
    raw = count_bitstrings(max_bits) ** len(nodes)
    if found is None:
        return SoundnessReport(True, [], search.spent, raw, "search")
    witness = {v: found[0].get(v, "") for v in nodes}
    return SoundnessReport(False, [witness], search.spent, raw, "search")
