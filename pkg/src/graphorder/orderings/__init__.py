"""Vertex ordering schemes and a by-name registry."""

from __future__ import annotations

from typing import Callable

from ..graph import Graph, Permutation
from .amd import amd
from .basic import identity_order, random_order, reverse
from .fiedler import fcut1
from .nd import NdParams, nested_dissection
from .rcm import rcm
from .slashburn import HUB_RATIO_SWEEP, SlashburnParams, slashburn

__all__ = [
    "METHODS", "HUB_RATIO_SWEEP", "NdParams", "SlashburnParams", "amd", "fcut1",
    "identity_order", "nested_dissection", "order", "random_order", "rcm", "reverse", "slashburn",
]


def _vifps(graph: Graph, stats=None, **kw) -> Permutation:
    # imported late: vifps itself builds on the orderings package
    from ..vifps import ParetoParams, vifps
    return vifps(graph, ParetoParams(**kw) if kw else None, stats)


def _nd(graph: Graph, stats=None, **kw) -> Permutation:
    return nested_dissection(graph, NdParams(**kw) if kw else None, stats)


def _fiedler(graph: Graph, stats=None, **kw) -> Permutation:
    from ..spectral import SolverConfig
    return fcut1(graph, SolverConfig(**kw) if kw else None, stats)


def _slashburn(graph: Graph, stats=None, **kw) -> Permutation:
    return slashburn(graph, SlashburnParams(**kw) if kw else None)


METHODS: dict[str, Callable[..., Permutation]] = {
    "rcm": lambda g, stats=None: rcm(g),
    "amd": lambda g, stats=None: amd(g),
    "slashburn": _slashburn,
    "nd": _nd,
    "fiedler": _fiedler,
    "fcut1": _fiedler,
    "vifps": _vifps,
    "identity": lambda g, stats=None: identity_order(g),
    "random": lambda g, stats=None, seed=0: random_order(g, seed),
}


def order(graph: Graph, method: str, stats: dict | None = None, **params) -> Permutation:
    """Run the ordering called ``method``.

    Keyword arguments build its parameter object; ``stats`` collects solver
    counters for the spectral methods.
    """
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown ordering method {method!r}; choose from {', '.join(METHODS)}") from None
    return fn(graph, stats, **params)
