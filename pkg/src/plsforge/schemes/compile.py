"""Turning a radius-1 scheme into a larger-radius scheme with shorter labels.

Given a TS partition certified by a TS scheme, only the separating nodes X keep
their radius-1 labels, and those are stored spread over the whole cluster.
Each cluster's leader (largest id in C minus X) checks that the labels it
reads from X can be completed inside the cluster so that every node whose
neighbourhood meets C minus X would accept.

Label layout: a two-component tuple (TS label, block of the cluster's X labels).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..bits import LabelFormatError, all_bitstrings, decode_tuple, encode_tuple
from ..graph import Configuration
from ..pls import (
    Labeling, LabelSearch, LocalView, PLSError, Scheme, Verdict, accept, reject,
)
from .codec import lex_decode, lex_encode
from .common import TSOutput


class ExtensionBudgetExceeded(PLSError):
    pass


@dataclass(frozen=True)
class ExtensionSolver:
    """How a leader looks for a completion of the X labels inside its cluster.

    ``hook`` defers to the base scheme's own ``extend``; ``exhaustive`` searches
    all labels of up to ``max_bits`` bits, charging ``budget`` evaluations.
    """

    strategy: str = "hook"
    max_bits: int = 6
    budget: int = 1 << 20

    def solve(self, base: Scheme, view: LocalView, fixed: Mapping[int, str],
              free: frozenset[int], check: frozenset[int]) -> Labeling | None:
        if self.strategy == "hook":
            if base.extend is None:
                raise PLSError(f"{base.name} has no extension hook")
            return base.extend(view, dict(fixed), free, check)
        if self.strategy != "exhaustive":
            raise ValueError(f"unknown strategy {self.strategy!r}")

        def evaluate(u: int, labels: Mapping[int, str]) -> Verdict:
            return base.verify(view.around(u, 1, labels))

        search = LabelSearch(sorted(check), free, all_bitstrings(self.max_bits), evaluate,
                             fixed=fixed, budget=self.budget)
        try:
            found = next(iter(search), None)
        except PLSError as exc:
            raise ExtensionBudgetExceeded(str(exc)) from None
        if found is None:
            return None
        return {u: found[0].get(u, "") for u in free}


class _Part(Mapping):
    """Lazy projection of compiled labels onto one tuple component."""

    def __init__(self, labels: Mapping[int, str], index: int):
        self._labels = labels
        self._index = index

    def __getitem__(self, u: int) -> str:
        return decode_tuple(self._labels[u], 2)[self._index]

    def __iter__(self):
        return iter(self._labels)

    def __len__(self) -> int:
        return len(self._labels)


def compile_tradeoff(base: Scheme, ts: Scheme, solver: ExtensionSolver | None = None) -> Scheme:
    solver = solver or ExtensionSolver("hook" if base.extend else "exhaustive")
    certify = ts.params["certify"]

    def prover(cfg: Configuration) -> Labeling:
        p, ts_lab = certify(cfg)
        inner = base.prove(cfg)
        labels = {}
        for c in p.clusters:
            xs = sorted(c & p.separating)
            blocks = lex_encode(c, encode_tuple(inner[u] for u in xs))
            for u in c:
                labels[u] = encode_tuple([ts_lab[u], blocks[u]])
        return labels

    def verifier(view: LocalView) -> Verdict:
        v = view.center
        decode_tuple(view.labels[v], 2)
        ts_part = _Part(view.labels, 0)
        blocks = _Part(view.labels, 1)
        verdict = ts.verify(view.restrict(ts.radius_for(view.n)).with_labels(ts_part))
        if not verdict.accept:
            return reject(f"partition: {verdict.reason}")
        out: TSOutput = verdict.aux
        home = out.home
        xlabels: dict[int, str] = {}
        decoded: set[frozenset[int]] = set()

        def load(c: frozenset[int]) -> None:
            if c in decoded:
                return
            xs = sorted(out.x[c])
            parts = decode_tuple(lex_decode(c, {u: blocks[u] for u in c}))
            if len(parts) != len(xs):
                raise LabelFormatError("wrong number of stored labels")
            xlabels.update(zip(xs, parts))
            decoded.add(c)

        def load_for(nodes) -> bool:
            for u in nodes:
                if u in xlabels:
                    continue
                c = out.cluster_of(u)
                if c is None or u not in out.x[c]:
                    return False
                load(c)
            return True

        load(home)
        around = view.ball(v, 1)
        if all(_in_x(out, u) for u in around):
            load_for(around)
            if not base.verify(view.around(v, 1, {u: xlabels[u] for u in around})).accept:
                return reject("surrounded separating node rejects")
        free = home - out.x[home]
        if free and v == max(free):
            check = view.ball_of_set(free, 1)
            need = view.ball_of_set(check, 1) - free
            if not load_for(need):
                return reject("region around the cluster is not covered by separating nodes")
            fixed = {u: xlabels[u] for u in need}
            ext = solver.solve(base, view, fixed, frozenset(free), check)
            if ext is None:
                return reject("no good extension inside the cluster")
            full = {**fixed, **{u: ext.get(u, "") for u in free}}
            for u in sorted(check):
                if not base.verify(view.around(u, 1, full)).accept:
                    return reject("extension fails at a checked node")
        return accept(out)

    radius = ts.radius
    return Scheme(f"compiled:{base.name}:{ts.name}", radius, prover, verifier,
                  params={"base": base, "ts": ts, "solver": solver})


def _in_x(out: TSOutput, u: int) -> bool:
    c = out.cluster_of(u)
    return c is not None and u in out.x[c]
