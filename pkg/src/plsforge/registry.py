"""Named schemes with their predicates and instance generators.

Names: ``ts-cert-logn``, ``ts-cert-const``, ``string-share``, ``spanning-tree``,
``equality-gadget`` and ``compiled:<base>:<ts>``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .graph import Configuration, Graph, is_connected, random_connected
from .pls import Scheme
from .rng import derive_seed, stream
from .schemes import (
    ExtensionSolver, compile_tradeoff, equal_endpoints, equality_configuration, equality_pls,
    string_share, ts_cert_const, warmup_ts_cert,
)
from .schemes.spanning import broken_tree, is_spanning_tree, tree_configuration, spanning_tree_pls

ConfigGen = Callable[[int], Configuration]


class UnknownScheme(KeyError):
    pass


@dataclass
class Entry:
    scheme: Scheme
    predicate: Callable[[Configuration], bool]
    valid: ConfigGen
    invalid: ConfigGen | None = None
    meta: dict = field(default_factory=dict)

    def valid_configs(self, count: int, seed: int = 0) -> list[Configuration]:
        return [self.valid(derive_seed(seed, self.scheme.name, "valid", i)) for i in range(count)]


def _connected(cfg: Configuration) -> bool:
    return is_connected(cfg.graph)


def _random_graph(seed: int, lo: int, hi: int) -> Graph:
    rng = random.Random(seed)
    return random_connected(rng.randint(lo, hi), seed=seed)


def _blank(lo: int, hi: int) -> ConfigGen:
    return lambda seed: Configuration.blank(_random_graph(seed, lo, hi))


def _trees(lo: int, hi: int) -> ConfigGen:
    return lambda seed: tree_configuration(_random_graph(seed, lo, hi), seed)


def _broken_trees(lo: int, hi: int) -> ConfigGen:
    return lambda seed: broken_tree(_trees(lo, hi)(seed), seed)


def _equality(t: int, m: int, equal: bool) -> ConfigGen:
    def gen(seed: int) -> Configuration:
        rng = stream(seed, "equality", t, m)
        x = "".join(rng.choice("01") for _ in range(m * m))
        y = x
        if not equal:
            i = rng.randrange(m * m)
            y = x[:i] + ("1" if x[i] == "0" else "0") + x[i + 1:]
        return equality_configuration(t, m, x, y)
    return gen


def _base(name: str, t: int, m: int) -> Entry:
    if name == "ts-cert-logn":
        return Entry(warmup_ts_cert(t), _connected, _blank(8, 48), meta={"t": t})
    if name == "ts-cert-const":
        return Entry(ts_cert_const(t), _connected, _blank(8, 48), meta={"t": t})
    if name == "string-share":
        r = 3
        return Entry(string_share(r, "101"), _connected, _blank(r, 40), meta={"r": r, "s": "101"})
    if name == "spanning-tree":
        return Entry(spanning_tree_pls(), is_spanning_tree, _trees(4, 40), _broken_trees(4, 40))
    if name == "equality-gadget":
        return Entry(equality_pls(), equal_endpoints, _equality(1, m, True), _equality(1, m, False),
                     meta={"m": m})
    raise UnknownScheme(name)


def get(name: str, t: int = 2, m: int = 3, solver: str | None = None) -> Entry:
    """Entry for a registered name; ``t`` parameterises the partition certifiers."""
    if name.startswith("compiled:"):
        parts = name.split(":")
        if len(parts) != 3:
            raise UnknownScheme(name)
        base, ts = _base(parts[1], t, m), _base(parts[2], t, m)
        if "t" not in ts.meta:
            raise UnknownScheme(f"{parts[2]} does not certify a partition")
        strategy = solver or ("hook" if base.scheme.extend else "exhaustive")
        s = compile_tradeoff(base.scheme, ts.scheme, ExtensionSolver(strategy))
        ts_params = ts.scheme.params
        meta = {"t": t, "eps": str(ts_params["eps"]), "solver": strategy,
                "base": parts[1], "ts": parts[2]}
        return Entry(s, base.predicate, base.valid, base.invalid, meta)
    return _base(name, t, m)


NAMES = ("ts-cert-logn", "ts-cert-const", "string-share", "spanning-tree", "equality-gadget",
         "compiled:spanning-tree:ts-cert-logn", "compiled:spanning-tree:ts-cert-const")
