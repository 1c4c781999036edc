"""Undirected graphs over integer node ids.

BFS is the only distance primitive. Everything else here (balls, weak
diameters, components) is built on the per-source BFS cache of a ``Graph``.
The module also holds the instance generators and the text file format.
"""

from __future__ import annotations

import io
import math
import os
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, TextIO

import numpy as np

from .bits import LabelFormatError, bits_to_hex, hex_to_bits, is_bits

INF = math.inf
# sentinel for "unreachable" inside integer distance matrices
FAR = np.iinfo(np.int32).max


class GraphError(ValueError):
    pass


class GraphFormatError(GraphError):
    pass


class Graph:
    """Simple undirected graph. Immutable once built."""

    def __init__(self, nodes: Iterable[int] = (), edges: Iterable[tuple[int, int]] = ()):
        adj: dict[int, set[int]] = {}
        for v in nodes:
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 0:
                raise GraphError(f"node ids must be non-negative integers, got {v!r}")
            adj.setdefault(int(v), set())
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if u not in adj or v not in adj:
                raise GraphError(f"edge ({u}, {v}) mentions an unknown node")
            adj[u].add(v)
            adj[v].add(u)
        self._adj: dict[int, frozenset[int]] = {v: frozenset(nb) for v, nb in adj.items()}
        self._nodes: tuple[int, ...] = tuple(sorted(adj))
        self._bfs: dict[int, dict[int, int]] = {}
        self._matrix: tuple[np.ndarray, dict[int, int]] | None = None

    @property
    def nodes(self) -> tuple[int, ...]:
        return self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    @property
    def n(self) -> int:
        return len(self._nodes)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __iter__(self):
        return iter(self._nodes)

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise GraphError(f"unknown node {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    @property
    def adjacency(self) -> Mapping[int, frozenset[int]]:
        return self._adj

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self._nodes for v in self._adj[u] if u < v)

    @property
    def num_edges(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"

    def bfs(self, source: int) -> dict[int, int]:
        """Distances from ``source`` to every reachable node (cached)."""
        cached = self._bfs.get(source)
        if cached is not None:
            return cached
        if source not in self._adj:
            raise GraphError(f"unknown node {source}")
        dist = {source: 0}
        queue = deque([source])
        adj = self._adj
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for w in adj[u]:
                if w not in dist:
                    dist[w] = du
                    queue.append(w)
        self._bfs[source] = dist
        return dist

    def index(self) -> dict[int, int]:
        return self.distance_matrix()[1]

    def distance_matrix(self) -> tuple[np.ndarray, dict[int, int]]:
        """All-pairs BFS distances as an integer matrix; FAR marks unreachable."""
        if self._matrix is None:
            pos = {v: i for i, v in enumerate(self._nodes)}
            mat = np.full((self.n, self.n), FAR, dtype=np.int64)
            for v in self._nodes:
                row = mat[pos[v]]
                for w, d in self.bfs(v).items():
                    row[pos[w]] = d
            self._matrix = (mat, pos)
        return self._matrix

    def induced(self, keep: Iterable[int]) -> "Graph":
        keep = set(keep)
        return Graph(keep, ((u, v) for u, v in self.edges() if u in keep and v in keep))


@dataclass(frozen=True)
class Configuration:
    """A graph together with a bit-string input at every node."""

    graph: Graph
    inputs: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        inputs = dict(self.inputs) if self.inputs else {v: "" for v in self.graph.nodes}
        if set(inputs) != set(self.graph.nodes):
            raise GraphError("input map must cover exactly the node set")
        for v, s in inputs.items():
            if not is_bits(s):
                raise GraphError(f"input of node {v} is not a bit string")
        object.__setattr__(self, "inputs", inputs)

    @classmethod
    def blank(cls, g: Graph) -> "Configuration":
        return cls(g, {v: "" for v in g.nodes})

    @property
    def n(self) -> int:
        return self.graph.n


# ---------------------------------------------------------------- distances

def dist(g: Graph, u: int, v: int) -> float:
    return g.bfs(u).get(v, INF)


def ball(g: Graph, v: int, r: float) -> frozenset[int]:
    if r < 0:
        return frozenset()
    return frozenset(w for w, d in g.bfs(v).items() if d <= r)


def ball_of_set(g: Graph, s: Iterable[int], r: float) -> frozenset[int]:
    """Nodes within distance r of some member of s (multi-source BFS)."""
    s = set(s)
    if r < 0 or not s:
        return frozenset()
    seen = {v: 0 for v in s}
    queue = deque(s)
    while queue:
        u = queue.popleft()
        if seen[u] >= r:
            continue
        for w in g.neighbors(u):
            if w not in seen:
                seen[w] = seen[u] + 1
                queue.append(w)
    return frozenset(seen)


def dist_to_set(g: Graph, v: int, s: Iterable[int]) -> float:
    d = g.bfs(v)
    return min((d.get(w, INF) for w in s), default=INF)


def weak_diameter(g: Graph, s: Iterable[int]) -> float:
    """Largest distance in g between two members of s (0 for |s| <= 1)."""
    members = sorted(set(s))
    if len(members) <= 1:
        return 0
    mat, pos = g.distance_matrix()
    idx = np.fromiter((pos[v] for v in members), dtype=np.int64, count=len(members))
    worst = int(mat[np.ix_(idx, idx)].max())
    return INF if worst == FAR else worst


def induced_components(g: Graph, s: Iterable[int]) -> list[frozenset[int]]:
    """Connected components of g[s], ordered by their smallest id."""
    s = set(s)
    comps = []
    seen: set[int] = set()
    for v in sorted(s):
        if v in seen:
            continue
        comp = {v}
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if w in s and w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n == 0 or len(g.bfs(g.nodes[0])) == g.n


def diameter(g: Graph) -> float:
    return weak_diameter(g, g.nodes)


def log2_ceil(n: int) -> int:
    """ceil(log2 n), never below 1 so that radius ranges stay non-empty."""
    return max(1, (max(n, 1) - 1).bit_length())


# ---------------------------------------------------------------- generators

def path(n: int) -> Graph:
    return Graph(range(n), ((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 nodes")
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def grid(rows: int, cols: int | None = None) -> Graph:
    cols = rows if cols is None else cols
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(range(rows * cols), edges)


def complete(n: int) -> Graph:
    return Graph(range(n), ((i, j) for i in range(n) for j in range(i + 1, n)))


def star(n: int) -> Graph:
    return Graph(range(n), ((0, i) for i in range(1, n)))


def random_tree(n: int, seed: int = 0) -> Graph:
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    edges = [(order[i], order[rng.randrange(i)]) for i in range(1, n)]
    return Graph(range(n), edges)


def random_connected(n: int, p: float | None = None, seed: int = 0) -> Graph:
    """Random spanning tree plus each remaining pair independently with prob. p."""
    rng = random.Random(seed)
    if p is None:
        p = min(1.0, 2.0 / max(n, 1))
    order = list(range(n))
    rng.shuffle(order)
    edges = {tuple(sorted((order[i], order[rng.randrange(i)]))) for i in range(1, n)}
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < p:
                edges.add((i, j))
    return Graph(range(n), sorted(edges))


def layered_layers(t: int, m: int) -> list[list[int]]:
    """Node ids of each layer of ``layered(t, m)``, layer 1 first."""
    if t < 1 or m < 3 or m % 2 == 0:
        raise GraphError("layered graphs need t >= 1 and odd m >= 3")
    layers, nxt = [], 0
    for i in range(1, 2 * t + 4):
        size = 1 if i % 2 == 1 else m
        layers.append(list(range(nxt, nxt + size)))
        nxt += size
    return layers


def layered(t: int, m: int) -> Graph:
    """2t+3 layers; odd layers are single nodes, even layers hold m nodes.

    Consecutive layers are completely joined.
    """
    layers = layered_layers(t, m)
    edges = [(a, b) for lo, hi in zip(layers, layers[1:]) for a in lo for b in hi]
    return Graph(range(layers[-1][-1] + 1), edges)


def relabel(g: Graph, mapping: Mapping[int, int]) -> Graph:
    if len(set(mapping.values())) != len(mapping) or set(mapping) != set(g.nodes):
        raise GraphError("relabelling must be a bijection on the node set")
    return Graph(mapping.values(), ((mapping[u], mapping[v]) for u, v in g.edges()))


def gapped_ids(g: Graph, seed: int = 0, spread: int = 8) -> dict[int, int]:
    """A random injective id map into range(spread * n), for id-gap testing."""
    rng = random.Random(seed)
    fresh = rng.sample(range(max(1, spread * g.n)), g.n)
    return dict(zip(g.nodes, fresh))


GENERATORS: dict[str, Callable[..., Graph]] = {
    "path": path,
    "cycle": cycle,
    "grid": grid,
    "complete": complete,
    "star": star,
    "random_tree": random_tree,
    "random_connected": random_connected,
    "layered": layered,
}

_SEEDED = {"random_tree", "random_connected"}


def generate(kind: str, *args, seed: int = 0, **kwargs) -> Graph:
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise GraphError(f"unknown graph kind {kind!r}; choose from {sorted(GENERATORS)}") from None
    if kind in _SEEDED:
        kwargs["seed"] = seed
    return gen(*args, **kwargs)


# ---------------------------------------------------------------- text format

def dump_configuration(cfg: Configuration | Graph, out: TextIO) -> None:
    if isinstance(cfg, Graph):
        cfg = Configuration.blank(cfg)
    g = cfg.graph
    out.write(f"n {g.n}\n")
    for v in g.nodes:
        out.write(f"v {v}\n")
    for u, v in g.edges():
        out.write(f"e {u} {v}\n")
    for v in g.nodes:
        s = cfg.inputs[v]
        if s:
            out.write(f"i {v} {bits_to_hex(s)} {len(s)}\n")


def load_configuration(src: TextIO) -> Configuration:
    declared = None
    nodes: list[int] = []
    seen_nodes: set[int] = set()
    edges: set[tuple[int, int]] = set()
    directed: set[tuple[int, int]] = set()
    inputs: dict[int, str] = {}

    def bad(lineno: int, msg: str) -> GraphFormatError:
        return GraphFormatError(f"line {lineno}: {msg}")

    for lineno, raw in enumerate(src, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *rest = line.split()
        try:
            nums = [int(x) for x in rest] if tag in ("n", "v", "e") else None
        except ValueError:
            raise bad(lineno, "expected integers") from None
        if tag == "n":
            if len(nums) != 1 or declared is not None:
                raise bad(lineno, "malformed or repeated node count")
            declared = nums[0]
        elif tag == "v":
            if len(nums) != 1 or nums[0] < 0:
                raise bad(lineno, "malformed node line")
            if nums[0] in seen_nodes:
                raise bad(lineno, f"node {nums[0]} declared twice")
            seen_nodes.add(nums[0])
            nodes.append(nums[0])
        elif tag == "e":
            if len(nums) != 2:
                raise bad(lineno, "malformed edge line")
            a, b = nums
            if a == b:
                raise bad(lineno, f"self-loop at {a}")
            if (a, b) in directed:
                raise bad(lineno, f"duplicate edge {a} {b}")
            directed.add((a, b))
            edges.add((min(a, b), max(a, b)))
        elif tag == "i":
            if len(rest) not in (2, 3):
                raise bad(lineno, "malformed input line")
            try:
                v = int(rest[0])
                nbits = int(rest[2]) if len(rest) == 3 else None
                inputs[v] = hex_to_bits(rest[1], nbits)
            except (ValueError, LabelFormatError) as exc:
                raise bad(lineno, str(exc)) from None
        else:
            raise bad(lineno, f"unknown record {tag!r}")
    if declared is None:
        raise GraphFormatError("missing node count line")
    if declared != len(nodes):
        raise GraphFormatError(f"node count says {declared} but {len(nodes)} nodes declared")
    for a, b in edges:
        if a not in seen_nodes or b not in seen_nodes:
            raise GraphFormatError(f"edge ({a}, {b}) mentions an undeclared node")
    for v in inputs:
        if v not in seen_nodes:
            raise GraphFormatError(f"input for undeclared node {v}")
    g = Graph(nodes, sorted(edges))
    return Configuration(g, {v: inputs.get(v, "") for v in g.nodes})


def write_graph(cfg: Configuration | Graph, target: str | os.PathLike | TextIO) -> None:
    if hasattr(target, "write"):
        dump_configuration(cfg, target)  # type: ignore[arg-type]
        return
    with open(target, "w") as fh:
        dump_configuration(cfg, fh)


def read_configuration(source: str | os.PathLike | TextIO) -> Configuration:
    if hasattr(source, "read"):
        return load_configuration(source)  # type: ignore[arg-type]
    with open(source) as fh:
        return load_configuration(fh)


def read_graph(source: str | os.PathLike | TextIO) -> Graph:
    return read_configuration(source).graph


def dumps(cfg: Configuration | Graph) -> str:
    buf = io.StringIO()
    dump_configuration(cfg, buf)
    return buf.getvalue()


def loads(text: str) -> Configuration:
    return load_configuration(io.StringIO(text))
