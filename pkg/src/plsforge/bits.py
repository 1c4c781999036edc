"""Bit strings as ``str`` of '0'/'1', with the small codecs labels are built from.

Variable-length tuple components are prefixed by their length in Elias-gamma
form, so a concatenation can always be split back apart.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator, Sequence


class LabelFormatError(ValueError):
    """A bit string does not follow the layout a decoder expects."""


def is_bits(s: object) -> bool:
    return isinstance(s, str) and all(c in "01" for c in s)


def require_bits(s: str, what: str = "label") -> str:
    if not is_bits(s):
        raise LabelFormatError(f"{what} is not a bit string: {s!r}")
    return s


def int_to_bits(k: int) -> str:
    if k < 0:
        raise ValueError(f"negative integer {k}")
    return format(k, "b")


def bits_to_int(s: str) -> int:
    if not s or not is_bits(s):
        raise LabelFormatError(f"not a binary integer: {s!r}")
    return int(s, 2)


def fixed_width(k: int, width: int) -> str:
    if k < 0 or k >= (1 << width):
        raise ValueError(f"{k} does not fit in {width} bits")
    return format(k, "b").zfill(width) if width else ""


def gamma_encode(k: int) -> str:
    """Elias-gamma code of a positive integer."""
    if k < 1:
        raise ValueError("gamma code needs k >= 1")
    b = format(k, "b")
    return "0" * (len(b) - 1) + b


def gamma_decode(s: str, pos: int = 0) -> tuple[int, int]:
    """Decode one gamma codeword starting at ``pos``; return (value, next pos)."""
    zeros = 0
    while pos + zeros < len(s) and s[pos + zeros] == "0":
        zeros += 1
    end = pos + 2 * zeros + 1
    if end > len(s):
        raise LabelFormatError("truncated length prefix")
    return int(s[pos + zeros:end], 2), end


def encode_tuple(parts: Iterable[str]) -> str:
    out = []
    for p in parts:
        require_bits(p, "tuple component")
        out.append(gamma_encode(len(p) + 1))
        out.append(p)
    return "".join(out)


def decode_tuple(s: str, count: int | None = None) -> list[str]:
    """Split a self-delimiting tuple; the whole string must be consumed.

    With ``count`` given, exactly that many components are required.
    """
    require_bits(s)
    parts: list[str] = []
    pos = 0
    while pos < len(s):
        length, pos = gamma_decode(s, pos)
        length -= 1
        if pos + length > len(s):
            raise LabelFormatError("component runs past the end")
        parts.append(s[pos:pos + length])
        pos += length
    if count is not None and len(parts) != count:
        raise LabelFormatError(f"expected {count} components, got {len(parts)}")
    return parts


def pad(s: str, k: int) -> str:
    """Append a 1 and then zeros up to the smallest multiple of k above |s|."""
    if k < 1:
        raise ValueError("block count must be positive")
    total = (len(s) // k + 1) * k
    return s + "1" + "0" * (total - len(s) - 1)


def unpad(s: str) -> str:
    cut = s.rfind("1")
    if cut < 0:
        raise LabelFormatError("padding marker missing")
    return s[:cut]


def all_bitstrings(max_bits: int) -> Iterator[str]:
    """Every bit string of length 0..max_bits, shortest first."""
    for length in range(max_bits + 1):
        for combo in product("01", repeat=length):
            yield "".join(combo)


def count_bitstrings(max_bits: int) -> int:
    return (1 << (max_bits + 1)) - 1


def bits_to_hex(bits: str) -> str:
    require_bits(bits)
    if not bits:
        return "0"
    padded = bits + "0" * (-len(bits) % 4)
    return format(int(padded, 2), "x").zfill(len(padded) // 4)


def hex_to_bits(hexstr: str, nbits: int | None = None) -> str:
    try:
        value = int(hexstr, 16)
    except ValueError as exc:
        raise LabelFormatError(f"bad hex string {hexstr!r}") from exc
    width = 4 * len(hexstr)
    bits = format(value, "b").zfill(width)
    if nbits is None:
        return bits
    if nbits > width:
        raise LabelFormatError(f"bit length {nbits} exceeds hex width {width}")
    if "1" in bits[nbits:]:
        raise LabelFormatError("nonzero bits beyond the stated length")
    return bits[:nbits]


def max_len(labels: Sequence[str] | Iterable[str]) -> int:
    return max((len(x) for x in labels), default=0)
