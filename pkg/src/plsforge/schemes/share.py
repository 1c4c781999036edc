"""Giving every node the same short string at O(1) bits per node.

The prover cuts the graph into connected pieces of exactly r nodes (the
0-clusters), separated by a buffer set U, so that every node is within
distance r of some piece. Each piece stores the string spread over its members.
A node reconstructs the string from every piece it can see completely.

Label layout: one InU bit, then the node's block of the spread string.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Mapping

from ..bits import LabelFormatError
from ..graph import Configuration, Graph, GraphError, induced_components
from ..pls import LocalView, Scheme, Verdict, accept, reject
from .codec import lex_decode, lex_encode


class ShareReject(Exception):
    pass


def share_decomposition(g: Graph, r: int) -> tuple[list[frozenset[int]], frozenset[int]]:
    """Pieces of exactly r connected nodes plus the buffer set U.

    While some component of the remaining graph has at least r nodes, take the
    first r nodes of a BFS from its smallest id, and move their remaining
    neighbours into U. Whatever is left at the end also joins U.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if g.n < r:
        raise GraphError(f"graph has {g.n} nodes, fewer than r = {r}")
    active = set(g.nodes)
    pieces: list[frozenset[int]] = []
    buffer: set[int] = set()
    while True:
        big = [c for c in induced_components(g, active) if len(c) >= r]
        if not big:
            break
        comp = big[0]
        start = min(comp)
        chosen = [start]
        seen = {start}
        queue = deque([start])
        while queue and len(chosen) < r:
            u = queue.popleft()
            for w in sorted(g.neighbors(u)):
                if w in comp and w not in seen and len(chosen) < r:
                    seen.add(w)
                    chosen.append(w)
                    queue.append(w)
        piece = frozenset(chosen)
        ring = {w for u in piece for w in g.neighbors(u) if w in active} - piece
        pieces.append(piece)
        buffer |= ring
        active -= piece | ring
    buffer |= active
    return pieces, frozenset(buffer)


def share_labels(g: Graph, r: int, s: str) -> dict[int, tuple[bool, str]]:
    """(InU, block) per node for sharing s with piece size r."""
    pieces, buffer = share_decomposition(g, r)
    out = {v: (True, "") for v in buffer}
    for piece in pieces:
        for v, block in lex_encode(piece, s).items():
            out[v] = (False, block)
    return out


Split = Callable[[str], tuple[bool, str]]


def _split_plain(label: str) -> tuple[bool, str]:
    if not label:
        raise LabelFormatError("missing InU bit")
    return label[0] == "1", label[1:]


def read_shared(view: LocalView, r: int, split: Split = _split_plain) -> str:
    """The string held by every piece visible from the center, or ShareReject.

    Needs a view of radius at least 4r+2. Pieces are components of InU=0 nodes;
    one counts as seen when it lies within distance 4r+1 of the center.
    Labels are read layer by layer outwards and the verdict is settled as soon
    as a violation is certain, which keeps exhaustive label searches small.
    """
    reach = 4 * r + 1
    if view.radius < reach + 1:
        raise ValueError("view too small for the sharing verifier")
    depth = view.depth
    labels = view.labels
    layers: list[list[int]] = [[] for _ in range(reach + 2)]
    for u in view.nodes:
        if depth[u] <= reach + 1:
            layers[depth[u]].append(u)

    parent: dict[int, int] = {}
    members: dict[int, list[int]] = {}
    blocks: dict[int, str] = {}

    def find(u: int) -> int:
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    found: str | None = None
    nearest: int | None = None
    open_roots: set[int] = set()
    for d, layer in enumerate(layers):
        for u in sorted(layer):
            in_u, block = split(labels[u])
            if in_u:
                continue
            parent[u] = u
            members[u] = [u]
            blocks[u] = block
            open_roots.add(u)
            for w in view.neighbors(u):
                if w in parent:
                    a, b = find(u), find(w)
                    if a != b:
                        parent[a] = b
                        members[b].extend(members.pop(a))
                        open_roots.discard(a)
            root = find(u)
            group = members[root]
            if len(group) > r and min(depth[w] for w in group) <= r:
                raise ShareReject("a piece near the center has more than r nodes")
        # every piece whose deepest node is above this layer is now complete
        for root in sorted(open_roots):
            group = members[root]
            if max(depth[w] for w in group) >= d:
                continue
            open_roots.discard(root)
            closest = min(depth[w] for w in group)
            if closest <= r and len(group) != r:
                raise ShareReject("a piece near the center does not have exactly r nodes")
            try:
                s = lex_decode(group, {w: blocks[w] for w in group})
            except LabelFormatError as exc:
                raise ShareReject(f"undecodable piece: {exc}") from None
            if found is not None and s != found:
                raise ShareReject("pieces disagree")
            found = s
            nearest = closest if nearest is None else min(nearest, closest)
    for root in open_roots:
        if min(depth[w] for w in members[root]) <= r:
            raise ShareReject("a piece near the center reaches beyond sight")
    if found is None:
        raise ShareReject("no complete piece in sight")
    if nearest > r:
        raise ShareReject("nearest piece is farther than r")
    return found


def share_verdict(view: LocalView, r: int, split: Split = _split_plain) -> Verdict:
    try:
        return accept(read_shared(view, r, split))
    except ShareReject as exc:
        return reject(str(exc))


def string_share(r: int, s: str) -> Scheme:
    """Scheme whose verifier outputs s at every node; radius 4r+2.

    Works on connected graphs with at least r nodes; cost 1 + ceil((|s|+1)/r).
    """
    def prover(cfg: Configuration) -> dict[int, str]:
        return {v: ("1" if in_u else "0") + block
                for v, (in_u, block) in share_labels(cfg.graph, r, s).items()}

    def verifier(view: LocalView) -> Verdict:
        return share_verdict(view.restrict(4 * r + 2), r)

    return Scheme("string-share", 4 * r + 2, prover, verifier, params={"r": r, "s": s})


def piece_graph_connected(g: Graph, labels: Mapping[int, str], r: int) -> bool:
    """Pieces joined when within distance 2r+1 of each other; used by property tests."""
    zero = {v for v, lab in labels.items() if lab and lab[0] == "0"}
    pieces = induced_components(g, zero)
    if not pieces:
        return False
    owner = {v: i for i, p in enumerate(pieces) for v in p}
    reach = {i: set() for i in range(len(pieces))}
    for i, p in enumerate(pieces):
        for v in p:
            for w, d in g.bfs(v).items():
                if d <= 2 * r + 1 and w in owner:
                    reach[i].add(owner[w])
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in reach[i] - seen:
            seen.add(j)
            stack.append(j)
    return len(seen) == len(pieces)
