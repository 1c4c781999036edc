"""Radius-1 certification of a spanning tree given by parent pointers.

Each node's input is its parent's id in binary, or the empty string at the
root. The label is the tuple (root id, parent id, distance to the root).
"""

from __future__ import annotations

import random
from typing import Mapping

from ..bits import LabelFormatError, bits_to_int, decode_tuple, encode_tuple, int_to_bits
from ..graph import Configuration, Graph, is_connected, random_connected
from ..pls import Labeling, LocalView, Scheme, Verdict, accept, reject


def parent_pointers(cfg: Configuration) -> dict[int, int | None] | None:
    """Parsed inputs, or None when some input is not a binary id."""
    out: dict[int, int | None] = {}
    for v, s in cfg.inputs.items():
        if s == "":
            out[v] = None
        else:
            try:
                out[v] = bits_to_int(s)
            except LabelFormatError:
                return None
    return out


def is_spanning_tree(cfg: Configuration) -> bool:
    g = cfg.graph
    parents = parent_pointers(cfg)
    if parents is None or not is_connected(g):
        return False
    roots = [v for v, p in parents.items() if p is None]
    if len(roots) != 1:
        return False
    for v, p in parents.items():
        if p is not None and p not in g.neighbors(v):
            return False
    for v in g.nodes:
        steps, cur = 0, v
        while parents[cur] is not None:
            cur = parents[cur]
            steps += 1
            if steps > g.n:
                return False
    return True


def encode_label(root: int, parent: int, depth: int) -> str:
    return encode_tuple([int_to_bits(root), int_to_bits(parent), int_to_bits(depth)])


def decode_label(label: str) -> tuple[int, int, int]:
    a, b, c = decode_tuple(label, 3)
    return bits_to_int(a), bits_to_int(b), bits_to_int(c)


def _prover(cfg: Configuration) -> Labeling:
    if not is_spanning_tree(cfg):
        raise ValueError("inputs do not describe a spanning tree")
    parents = parent_pointers(cfg)
    root = next(v for v, p in parents.items() if p is None)
    depth: dict[int, int] = {root: 0}

    def depth_of(v: int) -> int:
        chain = []
        while v not in depth:
            chain.append(v)
            v = parents[v]
        d = depth[v]
        for u in reversed(chain):
            d += 1
            depth[u] = d
        return depth[chain[0]] if chain else d

    return {v: encode_label(root, v if parents[v] is None else parents[v], depth_of(v))
            for v in cfg.graph.nodes}


def _verifier(view: LocalView) -> Verdict:
    v = view.center
    labels = view.labels
    root, parent, d = decode_label(labels[v])
    inp = view.inputs[v]
    if inp == "":
        if root != v or parent != v or d != 0:
            return reject("root label inconsistent")
    else:
        p = bits_to_int(inp)
        if p not in view.neighbors(v) or parent != p or d < 1:
            return reject("parent pointer inconsistent")
        if decode_label(labels[p])[2] != d - 1:
            return reject("distance does not drop towards the parent")
    for u in sorted(view.neighbors(v)):
        if decode_label(labels[u])[0] != root:
            return reject("neighbours disagree on the root")
    return accept()


def _extend(view: LocalView, fixed: Mapping[int, str], free: frozenset[int],
            check: frozenset[int]) -> Labeling | None:
    """Labels inside a cluster are forced by the parent chains, so follow them.

    Every free node's chain either reaches a free root or a node with a fixed
    label; that anchor determines root and distance along the chain.
    """
    state: dict[int, tuple[int, int]] = {}
    parent_of: dict[int, int] = {}

    def resolve(v: int) -> bool:
        path: list[int] = []
        on_path: set[int] = set()
        cur = v
        while True:
            if cur in state:
                base = state[cur]
                break
            if cur not in free:
                if cur not in fixed:
                    return False
                try:
                    root, _, d = decode_label(fixed[cur])
                except LabelFormatError:
                    return False
                base = (root, d)
                break
            if cur in on_path:
                return False
            inp = view.inputs[cur]
            if inp == "":
                state[cur] = base = (cur, 0)
                parent_of[cur] = cur
                break
            try:
                p = bits_to_int(inp)
            except LabelFormatError:
                return False
            if p not in view.neighbors(cur):
                return False
            path.append(cur)
            on_path.add(cur)
            parent_of[cur] = p
            cur = p
        root, d = base
        for u in reversed(path):
            d += 1
            state[u] = (root, d)
        return True

    for v in sorted(free):
        if not resolve(v):
            return None
    return {v: encode_label(state[v][0], parent_of[v], state[v][1]) for v in free}


def spanning_tree_pls() -> Scheme:
    return Scheme("spanning-tree", 1, _prover, _verifier, extend=_extend)


def tree_inputs(g: Graph, seed: int = 0) -> dict[int, str]:
    """Parent pointers of a random BFS tree from a random root."""
    rng = random.Random(seed)
    root = rng.choice(g.nodes)
    parents = {root: None}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            nbrs = sorted(g.neighbors(u))
            rng.shuffle(nbrs)
            for w in nbrs:
                if w not in parents:
                    parents[w] = u
                    nxt.append(w)
        frontier = nxt
    return {v: "" if p is None else int_to_bits(p) for v, p in parents.items()}


def tree_configuration(g: Graph, seed: int = 0) -> Configuration:
    return Configuration(g, tree_inputs(g, seed))


def broken_tree(cfg: Configuration, seed: int = 0) -> Configuration:
    """A nearby configuration that is not a spanning tree.

    Either a second root appears, or some parent pointer is redirected to a
    neighbour inside its own subtree, closing a cycle.
    """
    rng = random.Random(seed)
    g = cfg.graph
    parents = parent_pointers(cfg)
    inputs = dict(cfg.inputs)
    non_roots = [v for v in g.nodes if parents[v] is not None]
    if rng.random() < 0.5 or not non_roots:
        v = rng.choice(non_roots) if non_roots else g.nodes[0]
        inputs[v] = ""
        out = Configuration(g, inputs)
        if not is_spanning_tree(out):
            return out
    children: dict[int, list[int]] = {v: [] for v in g.nodes}
    for v, p in parents.items():
        if p is not None:
            children[p].append(v)
    order = non_roots[:]
    rng.shuffle(order)
    for v in order:
        below, stack = set(), [v]
        while stack:
            u = stack.pop()
            below.add(u)
            stack.extend(children[u])
        options = sorted(w for w in g.neighbors(v) if w in below)
        if options:
            inputs = dict(cfg.inputs)
            inputs[v] = int_to_bits(rng.choice(options))
            return Configuration(g, inputs)
    inputs = dict(cfg.inputs)
    inputs[non_roots[0]] = ""
    return Configuration(g, inputs)


def random_tree_configuration(n: int, seed: int = 0, p: float | None = None) -> Configuration:
    return tree_configuration(random_connected(n, p, seed=seed), seed)
