"""Shared pieces of the partition certifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from ..bits import LabelFormatError
from ..graph import Configuration
from ..partition import TSPartition, check_ts
from ..pls import Labeling, Verdict


@dataclass(frozen=True)
class TSOutput:
    """A node's local picture of the partition: its cluster and the nearby ones."""

    home: frozenset[int]
    clusters: frozenset[frozenset[int]]
    x: Mapping[frozenset[int], frozenset[int]] = field(default_factory=dict)

    def cluster_of(self, u: int) -> frozenset[int] | None:
        for c in self.clusters:
            if u in c:
                return c
        return None


def bit(label: str, i: int) -> bool:
    if len(label) <= i:
        raise LabelFormatError(f"label too short for flag {i}")
    return label[i] == "1"


def assemble(verdicts: Mapping[int, Verdict]) -> TSPartition:
    """Glue every node's home cluster into one partition (all must have accepted)."""
    homes: dict[frozenset[int], frozenset[int]] = {}
    for v, verdict in verdicts.items():
        if not verdict.accept:
            raise ValueError(f"node {v} rejected")
        out: TSOutput = verdict.aux
        homes[out.home] = out.x.get(out.home, frozenset())
    x = frozenset().union(*homes.values()) if homes else frozenset()
    ordered = sorted(homes, key=min)
    return TSPartition(tuple(ordered), x)


# certify(cfg) -> (partition, labels); each TS scheme keeps one in params
Certifier = Callable[[Configuration], tuple[TSPartition, Labeling]]


def as_bound(value: int | Fraction | Callable[[int], int | Fraction], n: int):
    return value(n) if callable(value) else value


def output_is_valid(cfg: Configuration, verdicts: Mapping[int, Verdict], diameter: float, eps) -> bool:
    try:
        p = assemble(verdicts)
    except ValueError:
        return False
    return check_ts(cfg.graph, p, diameter, eps).ok
