"""Splitting one bit string evenly over the members of a cluster, in id order."""

from __future__ import annotations

from typing import Iterable, Mapping

from ..bits import LabelFormatError, pad, unpad


def lex_encode(cluster: Iterable[int], s: str) -> dict[int, str]:
    members = sorted(cluster)
    if not members:
        raise ValueError("cannot spread a string over an empty cluster")
    padded = pad(s, len(members))
    width = len(padded) // len(members)
    return {v: padded[i * width:(i + 1) * width] for i, v in enumerate(members)}


def lex_decode(cluster: Iterable[int], parts: Mapping[int, str]) -> str:
    """Inverse of lex_encode; unequal block lengths or bad padding raise."""
    members = sorted(cluster)
    if not members:
        raise LabelFormatError("empty cluster")
    blocks = [parts[v] for v in members]
    if len({len(b) for b in blocks}) != 1:
        raise LabelFormatError("blocks of unequal length")
    return unpad("".join(blocks))
