"""Structural analysis of single conjunctive queries."""

from __future__ import annotations

from dataclasses import dataclass, field

from .acyclicity import is_acyclic
from .errors import CapExceeded
from .homomorphisms import find_homomorphism
from .structures import (ConjunctiveQuery, GaifmanGraph, gaifman_graph,
                         induced_substructure, is_self_join_free)
from .treewidth import DEFAULT_EXACT_CAP, treewidth_bounds, treewidth_exact

DEFAULT_CORE_CAP = 12


def contract(q: ConjunctiveQuery) -> GaifmanGraph:
    """``G[X]`` plus an edge between any two free variables adjacent to a
    common connected component of ``G[Y]``."""
    g = gaifman_graph(q.body)
    free = q.free
    base = g.subgraph(free)
    quantified = g.subgraph(q.quantified)
    extra = set()
    for comp in quantified.components():
        touching = set()
        for y in comp:
            touching |= g.neighbors(y) & free
        touching = sorted(touching, key=str)
        for i, u in enumerate(touching):
            for v in touching[i + 1:]:
                extra.add((u, v))
    return base.with_edges(extra)


def _check_cap(q, cap):
    n = len(q.body.universe)
    if n > cap:
        raise CapExceeded("query universe size", n, cap)


def _shrinking_endomorphism(q: ConjunctiveQuery):
    """An endomorphism fixing the free variables that misses some element,
    or ``None``.  Quantified elements are tried in universe order."""
    pin = {x: x for x in q.free}
    for y in q.quantified:
        target = induced_substructure(q.body, [e for e in q.body.universe if e != y])
        h = find_homomorphism(q.body, target, pin)
        if h is not None:
            return h
    return None


def is_counting_minimal(q: ConjunctiveQuery, cap: int = DEFAULT_CORE_CAP) -> bool:
    """Every endomorphism that is the identity on the free variables is onto."""
    if q.is_quantifier_free():
        return True
    _check_cap(q, cap)
    return _shrinking_endomorphism(q) is None


def counting_core(q: ConjunctiveQuery, cap: int = DEFAULT_CORE_CAP) -> ConjunctiveQuery:
    """A #minimal query with the same answer counts, obtained by restricting
    to images of non-surjective free-fixing endomorphisms until none is left."""
    if q.is_quantifier_free():
        return q
    _check_cap(q, cap)
    while True:
        h = _shrinking_endomorphism(q)
        if h is None:
            return q
        image = set(h.values()) | q.free
        q = ConjunctiveQuery(induced_substructure(q.body, image), q.free)


def degree_of_freedom(q: ConjunctiveQuery) -> int:
    g = gaifman_graph(q.body)
    return max((len(g.neighbors(y) & q.free) for y in q.quantified), default=0)


def self_join_free(q: ConjunctiveQuery) -> bool:
    return is_self_join_free(q.body)


@dataclass
class CqReport:
    """Per-query analysis.  Fields that could not be computed within the
    configured caps are ``None`` and explained in ``errors``."""

    acyclic: bool
    treewidth: int | None
    contract_treewidth: int | None
    is_minimal: bool | None
    core: ConjunctiveQuery | None
    core_treewidth: int | None
    core_contract_treewidth: int | None
    self_join_free: bool
    degree_of_freedom: int
    classification: str | None = None
    bound: int | None = None
    errors: dict = field(default_factory=dict)

    POLY_TIME = "PolyTime"
    HARD = "Hard"


def _width(g, cap, errors, name):
    try:
        return treewidth_exact(g, cap)[0]
    except CapExceeded as exc:
        lo, hi = treewidth_bounds(g)
        errors[name] = f"{exc}; bounds [{lo}, {hi}]"
        return None


def classify_cq(q: ConjunctiveQuery, bound: int | None = None,
                core_cap: int = DEFAULT_CORE_CAP, tw_cap: int = DEFAULT_EXACT_CAP) -> CqReport:
    """Analyze ``q``.

    With ``bound`` set, the query is classified ``PolyTime`` when both the
    treewidth of its #core and of the contract of its #core are at most
    ``bound``, else ``Hard``.  Without a bound only raw widths are reported.
    """
    errors: dict = {}
    tw = _width(gaifman_graph(q.body), tw_cap, errors, "treewidth")
    ctw = _width(contract(q), tw_cap, errors, "contract_treewidth")
    try:
        core = counting_core(q, core_cap)
        minimal = len(core.body.universe) == len(q.body.universe)
    except CapExceeded as exc:
        core, minimal = None, None
        errors["core"] = str(exc)
    core_tw = core_ctw = None
    if core is not None:
        core_tw = _width(gaifman_graph(core.body), tw_cap, errors, "core_treewidth")
        core_ctw = _width(contract(core), tw_cap, errors, "core_contract_treewidth")
    classification = None
    if bound is not None and core_tw is not None and core_ctw is not None:
        ok = core_tw <= bound and core_ctw <= bound
        classification = CqReport.POLY_TIME if ok else CqReport.HARD
    return CqReport(
        acyclic=is_acyclic(q.body),
        treewidth=tw,
        contract_treewidth=ctw,
        is_minimal=minimal,
        core=core,
        core_treewidth=core_tw,
        core_contract_treewidth=core_ctw,
        self_join_free=is_self_join_free(q.body),
        degree_of_freedom=degree_of_freedom(q),
        classification=classification,
        bound=bound,
        errors=errors,
    )
