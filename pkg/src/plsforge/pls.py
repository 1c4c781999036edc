"""Proof labeling schemes: local views, a runner, and completeness/soundness harnesses.

A scheme is a prover (configuration -> one bit string per node) and a verifier
that sees only the radius-r ball around one node, with the inputs and labels
of that ball. Soundness can be checked exhaustively for tiny instances: labels
are enumerated lazily, so a node's label is branched on only when some
verifier actually reads it.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

from .bits import LabelFormatError, all_bitstrings, count_bitstrings, is_bits
from .graph import INF, Configuration, Graph
from .rng import stream

Labeling = dict[int, str]


class PLSError(RuntimeError):
    pass


class EnumerationBudgetExceeded(PLSError):
    pass


class MissingLabel(Exception):
    """A verifier asked for a label that a lazy search has not fixed yet."""

    def __init__(self, node: int):
        super().__init__(node)
        self.node = node


@dataclass(frozen=True)
class Verdict:
    accept: bool
    aux: Any = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.accept


def accept(aux: Any = None) -> Verdict:
    return Verdict(True, aux)


def reject(reason: str = "") -> Verdict:
    return Verdict(False, None, reason)


# ---------------------------------------------------------------- local views

class _Topology:
    """Induced ball shared by all label variants of one view."""

    __slots__ = ("adj", "depth", "cache")

    def __init__(self, adj: dict[int, frozenset[int]], depth: dict[int, int]):
        self.adj = adj
        self.depth = depth
        self.cache: dict[int, dict[int, int]] = {}


class _SubMapping(Mapping):
    """Read-through restriction of a (possibly lazy) label mapping to a key set."""

    def __init__(self, base: Mapping[int, str], keys: frozenset[int] | Mapping):
        self._base = base
        self._keys = keys

    def __getitem__(self, k: int) -> str:
        if k not in self._keys:
            raise KeyError(k)
        return self._base[k]

    def __iter__(self):
        return iter(sorted(self._keys))

    def __len__(self) -> int:
        return len(self._keys)


class LocalView:
    """What a node sees: the induced radius-r ball with inputs, labels and n."""

    def __init__(self, center: int, radius: int, topo: _Topology, inputs: Mapping[int, str],
                 labels: Mapping[int, str] | None, n: int):
        self.center = center
        self.radius = radius
        self._topo = topo
        self.inputs = inputs
        self.labels: Mapping[int, str] = labels if labels is not None else {}
        self._labelled = labels is not None
        self.n = n

    @property
    def adj(self) -> Mapping[int, frozenset[int]]:
        return self._topo.adj

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(self._topo.adj)

    @property
    def depth(self) -> Mapping[int, int]:
        """Distance of every view node from the center."""
        return self._topo.depth

    def __contains__(self, u: object) -> bool:
        return u in self._topo.adj

    def neighbors(self, u: int) -> frozenset[int]:
        return self._topo.adj[u]

    def bfs(self, src: int) -> dict[int, int]:
        """Distances inside the view; they never undercut true distances."""
        cache = self._topo.cache
        if src in cache:
            return cache[src]
        if src == self.center:
            cache[src] = dict(self._topo.depth)
            return cache[src]
        adj = self._topo.adj
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        cache[src] = dist
        return dist

    def dist(self, a: int, b: int) -> float:
        return self.bfs(a).get(b, INF)

    def ball(self, u: int, r: float) -> frozenset[int]:
        return frozenset(w for w, d in self.bfs(u).items() if d <= r)

    def ball_of_set(self, s: Iterable[int], r: int) -> frozenset[int]:
        s = set(s)
        seen = {v: 0 for v in s}
        queue = deque(s)
        while queue:
            u = queue.popleft()
            if seen[u] >= r:
                continue
            for w in self._topo.adj[u]:
                if w not in seen:
                    seen[w] = seen[u] + 1
                    queue.append(w)
        return frozenset(seen)

    def exact_within(self, u: int) -> int:
        """Largest r for which the view contains the true r-ball of u."""
        return self.radius - self._topo.depth[u]

    def around(self, u: int, r: int, labels: Mapping[int, str] | None = None) -> "LocalView":
        """The radius-r view of node u, carved out of this view."""
        if r > self.exact_within(u):
            raise PLSError(f"radius {r} around {u} leaves this view")
        depth = {w: d for w, d in self.bfs(u).items() if d <= r}
        keys = frozenset(depth)
        adj = {w: self._topo.adj[w] & keys for w in keys}
        base = self.labels if labels is None else labels
        sub = _restrict(base, keys) if labels is not None or self._labelled else None
        return LocalView(u, r, _Topology(adj, depth), {w: self.inputs[w] for w in keys}, sub, self.n)

    def restrict(self, r: int) -> "LocalView":
        return self.around(self.center, r)

    def with_labels(self, labels: Mapping[int, str]) -> "LocalView":
        return LocalView(self.center, self.radius, self._topo, self.inputs,
                         _restrict(labels, frozenset(self._topo.adj)), self.n)

    def _key(self):
        return (self.center, self.radius, self.n, dict(self._topo.adj), dict(self.inputs),
                dict(self.labels))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LocalView) and self._key() == other._key()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"LocalView(center={self.center}, radius={self.radius}, size={len(self._topo.adj)})"


def _restrict(labels: Mapping[int, str], keys: frozenset[int]) -> Mapping[int, str]:
    if isinstance(labels, dict):
        missing = [k for k in keys if k not in labels]
        if missing:
            raise PLSError(f"labeling has no entry for node {min(missing)}")
        return {k: labels[k] for k in keys}
    return _SubMapping(labels, keys)


def extract_view(g: Graph, inputs: Mapping[int, str], labeling: Mapping[int, str] | None,
                 v: int, t: int) -> LocalView:
    if t < 0:
        raise PLSError("radius must be non-negative")
    depth = {w: d for w, d in g.bfs(v).items() if d <= t}
    keys = frozenset(depth)
    adj = {w: g.neighbors(w) & keys for w in keys}
    labels = None if labeling is None else _restrict(labeling, keys)
    return LocalView(v, t, _Topology(adj, depth), {w: inputs[w] for w in keys}, labels, g.n)


# ---------------------------------------------------------------- schemes

Prover = Callable[[Configuration], Labeling]
Verifier = Callable[[LocalView], Verdict]


@dataclass
class Scheme:
    name: str
    radius: int | Callable[[int], int]
    prover: Prover
    verifier: Verifier
    # optional hook for radius-1 schemes: (view, fixed, free, check) -> labels | None
    extend: Callable[..., Labeling | None] | None = None
    params: dict = field(default_factory=dict)

    def radius_for(self, n: int) -> int:
        return self.radius(n) if callable(self.radius) else self.radius

    def prove(self, cfg: Configuration) -> Labeling:
        labels = self.prover(cfg)
        if set(labels) != set(cfg.graph.nodes):
            raise PLSError(f"{self.name}: prover must label every node exactly once")
        for v, s in labels.items():
            if not is_bits(s):
                raise PLSError(f"{self.name}: label of node {v} is not a bit string")
        return labels

    def verify(self, view: LocalView) -> Verdict:
        try:
            return self.verifier(view)
        except LabelFormatError as exc:
            return reject(f"malformed label: {exc}")


def lift_radius(s: Scheme, t: int) -> Scheme:
    """The same scheme run with a larger view; the verifier trims it back."""
    def verifier(view: LocalView) -> Verdict:
        return s.verify(view.restrict(s.radius_for(view.n)))

    if t < s.radius_for(2):
        raise PLSError("can only lift to a larger radius")
    return Scheme(f"{s.name}@r{t}", t, s.prover, verifier, s.extend, dict(s.params))


class _Views:
    """Label-free views per node, built once and relabelled on demand."""

    def __init__(self, s: Scheme, cfg: Configuration):
        self.scheme = s
        self.cfg = cfg
        self.radius = s.radius_for(cfg.n)
        self._cache: dict[int, LocalView] = {}

    def __getitem__(self, v: int) -> LocalView:
        view = self._cache.get(v)
        if view is None:
            view = extract_view(self.cfg.graph, self.cfg.inputs, None, v, self.radius)
            self._cache[v] = view
        return view

    def evaluate(self, v: int, labels: Mapping[int, str]) -> Verdict:
        return self.scheme.verify(self[v].with_labels(labels))


def run_scheme(s: Scheme, cfg: Configuration, labeling: Mapping[int, str],
               nodes: Iterable[int] | None = None, stop_on_reject: bool = False) -> dict[int, Verdict]:
    """Verdict of every node (or of ``nodes``), each computed from its own view."""
    missing = set(cfg.graph.nodes) - set(labeling)
    if missing:
        raise PLSError(f"labeling misses nodes {sorted(missing)[:5]}")
    views = _Views(s, cfg)
    out = {}
    for v in (cfg.graph.nodes if nodes is None else nodes):
        out[v] = views.evaluate(v, labeling)
        if stop_on_reject and not out[v].accept:
            break
    return out


def all_accept(verdicts: Mapping[int, Verdict]) -> bool:
    return all(v.accept for v in verdicts.values())


def scheme_cost(s: Scheme, cfgs: Iterable[Configuration]) -> int:
    return max((len(x) for cfg in cfgs for x in s.prove(cfg).values()), default=0)


@dataclass
class CompletenessReport:
    ok: bool
    checked: int
    failures: list[tuple[int, int, str]] = field(default_factory=list)
    cost: int = 0


def check_completeness(s: Scheme, cfgs: Iterable[Configuration],
                       pred: Callable[[Configuration], bool] | None = None) -> CompletenessReport:
    """Run the honest prover on every configuration; every node must accept."""
    failures = []
    checked = cost = 0
    for i, cfg in enumerate(cfgs):
        if pred is not None and not pred(cfg):
            raise PLSError(f"configuration {i} does not satisfy the predicate")
        labels = s.prove(cfg)
        cost = max(cost, max((len(x) for x in labels.values()), default=0))
        for v, verdict in run_scheme(s, cfg, labels).items():
            if not verdict.accept:
                failures.append((i, v, verdict.reason))
        checked += 1
    return CompletenessReport(not failures, checked, failures, cost)


# ---------------------------------------------------------------- soundness

class _PartialLabels(Mapping):
    def __init__(self, fixed: Mapping[int, str], assigned: dict[int, str], free: frozenset[int]):
        self._fixed = fixed
        self._assigned = assigned
        self._free = free

    def __getitem__(self, k: int) -> str:
        if k in self._free:
            try:
                return self._assigned[k]
            except KeyError:
                raise MissingLabel(k) from None
        return self._fixed[k]

    def __iter__(self):
        return iter(sorted(set(self._fixed) | self._free))

    def __len__(self) -> int:
        return len(set(self._fixed) | self._free)


class LabelSearch:
    """Every class of assignments to ``free`` under which all checkers accept.

    Verifiers are evaluated on partial assignments; reading an unassigned label
    raises MissingLabel and the search branches on that node. Labels never read
    are left out of a yielded assignment, since any value works for them.
    ``budget`` caps the number of verifier evaluations; ``spent`` counts them.
    """

    def __init__(self, checkers: Sequence[int], free: Iterable[int], alphabet: Sequence[str],
                 evaluate: Callable[[int, Mapping[int, str]], Verdict],
                 fixed: Mapping[int, str] | None = None, budget: int = 1 << 24):
        self.checkers = list(checkers)
        self.free = frozenset(free)
        self.alphabet = list(alphabet)
        self.evaluate = evaluate
        self.budget = budget
        self.spent = 0
        self._assigned: dict[int, str] = {}
        self._labels = _PartialLabels(fixed or {}, self._assigned, self.free)
        self._accepted: dict[int, Verdict] = {}

    def __iter__(self) -> Iterator[tuple[Labeling, dict[int, Verdict]]]:
        return self._rec()

    def _rec(self) -> Iterator[tuple[Labeling, dict[int, Verdict]]]:
        assigned, accepted = self._assigned, self._accepted
        newly = []
        try:
            for v in self.checkers:
                if v in accepted:
                    continue
                self.spent += 1
                if self.spent > self.budget:
                    raise EnumerationBudgetExceeded(f"more than {self.budget} verifier evaluations")
                try:
                    verdict = self.evaluate(v, self._labels)
                except MissingLabel as miss:
                    u = miss.node
                    for lab in self.alphabet:
                        assigned[u] = lab
                        yield from self._rec()
                    del assigned[u]
                    return
                if not verdict.accept:
                    return
                accepted[v] = verdict
                newly.append(v)
            yield dict(assigned), dict(accepted)
        finally:
            for v in newly:
                accepted.pop(v, None)


@dataclass
class SoundnessReport:
    ok: bool
    violations: list[Labeling] = field(default_factory=list)
    explored: int = 0
    raw_space: int = 0
    strategy: str = "search"
    note: str = ""


def enumerate_accepting(s: Scheme, cfg: Configuration, max_bits: int,
                        budget: int = 1 << 24) -> LabelSearch:
    """All-accept labelings with labels of at most ``max_bits`` bits (lazily grouped)."""
    views = _Views(s, cfg)
    nodes = list(cfg.graph.nodes)
    return LabelSearch(nodes, nodes, all_bitstrings(max_bits), views.evaluate, budget=budget)


def check_soundness_exhaustive(s: Scheme, cfg: Configuration, max_bits: int,
                               budget: int = 1 << 24, strategy: str = "search",
                               pred: Callable[[Configuration], bool] | None = None) -> SoundnessReport:
    """Look for a labeling with labels <= max_bits bits that every node accepts.

    ``strategy="brute"`` walks the full product of labels and refuses when it has
    more than ``budget`` elements; ``"search"`` branches lazily and charges
    ``budget`` per verifier evaluation. Both are complete.
    """
    if pred is not None and pred(cfg):
        raise PLSError("soundness is only meaningful on configurations outside the predicate")
    nodes = list(cfg.graph.nodes)
    raw = count_bitstrings(max_bits) ** len(nodes)
    if strategy == "brute":
        if raw > budget:
            raise EnumerationBudgetExceeded(f"{raw} labelings exceed the budget of {budget}")
        views = _Views(s, cfg)
        alphabet = list(all_bitstrings(max_bits))
        for combo in product(alphabet, repeat=len(nodes)):
            labeling = dict(zip(nodes, combo))
            if all(views.evaluate(v, labeling).accept for v in nodes):
                return SoundnessReport(False, [labeling], raw, raw, "brute")
        return SoundnessReport(True, [], raw, raw, "brute")
    if strategy != "search":
        raise ValueError(f"unknown strategy {strategy!r}")
    search = enumerate_accepting(s, cfg, max_bits, budget)
    gen = iter(search)
    found = next(gen, None)
    gen.close()
    spent = search.spent
    if found is None:
        return SoundnessReport(True, [], spent, raw, "search")
    partial, _ = found
    return SoundnessReport(False, [{v: partial.get(v, "") for v in nodes}], spent, raw, "search")


@dataclass
class FuzzReport:
    ok: bool
    trials: int
    violations: list[Labeling] = field(default_factory=list)
    note: str = "randomised evidence, not a proof"


def _mutate(label: str, rng: random.Random) -> str:
    op = rng.randrange(4)
    if op == 0 and label:
        i = rng.randrange(len(label))
        return label[:i] + ("1" if label[i] == "0" else "0") + label[i + 1:]
    if op == 1 and label:
        return label[:rng.randrange(len(label))]
    if op == 2:
        i = rng.randrange(len(label) + 1)
        return label[:i] + rng.choice("01") + label[i:]
    return "".join(rng.choice("01") for _ in range(len(label)))


def check_soundness_fuzz(s: Scheme, cfg: Configuration, trials: int, seed: int = 0,
                         nearby: Sequence[Configuration] = (), max_bits: int | None = None,
                         pred: Callable[[Configuration], bool] | None = None) -> FuzzReport:
    """Random, mutated and spliced labelings; any all-accept is a violation.

    Honest labelings of the ``nearby`` valid configurations seed the mutation
    and splicing strategies.
    """
    if pred is not None and pred(cfg):
        raise PLSError("soundness is only meaningful on configurations outside the predicate")
    rng = stream(seed, "fuzz", s.name)
    nodes = list(cfg.graph.nodes)
    honest = [s.prove(c) for c in nearby]
    honest = [h for h in honest if set(h) == set(nodes)]
    if max_bits is None:
        max_bits = max((len(x) for h in honest for x in h.values()), default=16)
    views = _Views(s, cfg)
    violations = []
    for trial in range(trials):
        kind = trial % 3 if honest else 0
        if kind == 0:
            labeling = {v: "".join(rng.choice("01") for _ in range(rng.randint(0, max_bits)))
                        for v in nodes}
        elif kind == 1:
            labeling = dict(rng.choice(honest))
            for v in rng.sample(nodes, rng.randint(0, min(3, len(nodes)))):
                labeling[v] = _mutate(labeling[v], rng)
        else:
            base = rng.choice(honest)
            donors = [rng.choice(honest) for _ in range(2)]
            labeling = dict(base)
            for v in rng.sample(nodes, rng.randint(1, len(nodes))):
                labeling[v] = rng.choice(donors)[rng.choice(nodes)]
        order = nodes[:]
        rng.shuffle(order)
        if all(views.evaluate(v, labeling).accept for v in order):
            violations.append(labeling)
    return FuzzReport(not violations, trials, violations)


# ---------------------------------------------------------------- label dumps

def dump_labeling(labeling: Mapping[int, str]) -> str:
    from .bits import bits_to_hex
    return "".join(f"l {v} {bits_to_hex(s)} {len(s)}\n" for v, s in sorted(labeling.items()))


def load_labeling(text: str) -> Labeling:
    from .bits import hex_to_bits
    out: Labeling = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] != "l":
            raise LabelFormatError(f"line {lineno}: expected 'l <id> <hex> <bitlen>'")
        try:
            v, nbits = int(parts[1]), int(parts[3])
        except ValueError:
            raise LabelFormatError(f"line {lineno}: bad integer") from None
        if v in out:
            raise LabelFormatError(f"line {lineno}: node {v} labelled twice")
        out[v] = hex_to_bits(parts[2], nbits)
    return out
