"""CQ expansion of a UCQ, the linear-time decision and hereditary treewidth.

For every nonempty subset ``J`` of the disjuncts the combined query (union
of the selected bodies) is formed; combined queries are grouped by
isomorphism (after taking #cores when quantified variables are present) and
each group gets the coefficient ``sum (-1)^(|J|+1)`` over its subsets.
"""

from __future__ import annotations

import enum
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .acyclicity import is_acyclic
from .analysis import DEFAULT_CORE_CAP, counting_core
from .canonical import canonical_form
from .errors import CapExceeded, PreconditionError
from .structures import ConjunctiveQuery, Structure, Ucq, gaifman_graph
from .treewidth import DEFAULT_EXACT_CAP, treewidth_exact

DEFAULT_MAX_DISJUNCTS = 20
TRIANGLE_CONJECTURE = "conditional on the Triangle Conjecture"
HIGHER_ARITY_CAVEAT = "arity > 2: acyclicity verdict only, unconditional meaning not established"


class Mode(str, enum.Enum):
    ISOMORPHISM_ONLY = "IsomorphismOnly"
    CORE_AND_ISOMORPHISM = "CoreAndIsomorphism"


@dataclass
class ExpansionEntry:
    query: ConjunctiveQuery
    coefficient: int
    witness_subsets: list
    code: bytes


@dataclass
class ExpansionTable:
    entries: list
    source: Ucq
    mode: Mode
    keep_zeros: bool = False
    _by_code: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_code = {e.code: e for e in self.entries}

    def nonzero(self):
        return [e for e in self.entries if e.coefficient != 0]

    def entry_for(self, q: ConjunctiveQuery):
        if self.mode is Mode.CORE_AND_ISOMORPHISM:
            q = counting_core(q)
        return self._by_code.get(canonical_form(q))

    def coefficient_of(self, q: ConjunctiveQuery) -> int:
        e = self.entry_for(q)
        return 0 if e is None else e.coefficient

    def __len__(self):
        return len(self.entries)


def combined_query(psi: Ucq, j) -> ConjunctiveQuery:
    """Union of the disjuncts with (0-based) indices in ``j``."""
    j = sorted(set(j))
    if not j:
        raise PreconditionError("combined query needs a nonempty subset")
    if j[0] < 0 or j[-1] >= len(psi):
        raise PreconditionError(f"subset {j} is not within 0..{len(psi) - 1}")
    rels: dict = {name: set() for name, _ in psi.signature}
    universe: list = psi.free_order
    for i in j:
        d = psi.disjuncts[i]
        universe = universe + list(d.universe)
        for name, ts in d.relations.items():
            rels[name] |= ts
    return ConjunctiveQuery(Structure(psi.signature, tuple(universe), rels), psi.free)


def _bits(mask):
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _gray_shard(psi: Ucq, mode: Mode, start: int, stop: int, core_cap: int):
    """Partial table over Gray-code indices ``start..stop-1`` (index 0 is the
    empty subset and is skipped)."""
    atom_mult: Counter = Counter()
    elem_mult: Counter = Counter()
    bodies = [(d.atoms(), [e for e in d.universe if e not in psi.free]) for d in psi.disjuncts]
    free = psi.free_order

    def toggle(i, sign):
        atoms, quantified = bodies[i]
        for a in atoms:
            atom_mult[a] += sign
        for e in quantified:
            elem_mult[e] += sign

    current = 0
    partial: dict = {}
    core_memo: dict = {}
    for g in range(start, stop):
        gray = g ^ (g >> 1)
        if g == start:
            for i in _bits(gray):
                toggle(i, 1)
        else:
            flipped = gray ^ current
            i = flipped.bit_length() - 1
            toggle(i, 1 if gray & flipped else -1)
        current = gray
        if gray == 0:
            continue
        rels: dict = {name: set() for name, _ in psi.signature}
        for (name, t), m in atom_mult.items():
            if m > 0:
                rels[name].add(t)
        universe = tuple(free) + tuple(e for e, m in elem_mult.items() if m > 0)
        q = ConjunctiveQuery(Structure(psi.signature, universe, rels), psi.free)
        code = canonical_form(q)
        if mode is Mode.CORE_AND_ISOMORPHISM:
            if code not in core_memo:
                core = counting_core(q, core_cap)
                core_memo[code] = (core, canonical_form(core))
            q, code = core_memo[code]
        subset = tuple(_bits(gray))
        sign = 1 if len(subset) % 2 else -1
        if code in partial:
            rep, coef, witnesses = partial[code]
            partial[code] = (rep, coef + sign, witnesses + [subset])
        else:
            partial[code] = (q, sign, [subset])
    return partial


def _merge(parts):
    merged: dict = {}
    for part in parts:
        for code, (q, coef, witnesses) in part.items():
            if code in merged:
                rep, c, w = merged[code]
                merged[code] = (rep, c + coef, w + witnesses)
            else:
                merged[code] = (q, coef, list(witnesses))
    return merged


def cq_expansion(psi: Ucq, mode: Mode | str | None = None, keep_zeros: bool = False,
                 max_disjuncts: int = DEFAULT_MAX_DISJUNCTS, core_cap: int = DEFAULT_CORE_CAP,
                 jobs: int | None = None) -> ExpansionTable:
    """Expansion table of ``psi``.

    ``IsomorphismOnly`` groups combined queries by isomorphism and is only
    accepted for quantifier-free input; ``CoreAndIsomorphism`` replaces each
    combined query by its #core first.  The default picks the former for
    quantifier-free input.  Subsets are visited in Gray-code order and can be
    split over ``jobs`` worker processes; the result does not depend on it.
    """
    if mode is None:
        mode = Mode.ISOMORPHISM_ONLY if psi.is_quantifier_free() else Mode.CORE_AND_ISOMORPHISM
    mode = Mode(mode)
    ell = len(psi)
    if ell > max_disjuncts:
        raise CapExceeded("number of disjuncts", ell, max_disjuncts)
    if mode is Mode.ISOMORPHISM_ONLY and not psi.is_quantifier_free():
        raise PreconditionError("IsomorphismOnly mode needs a quantifier-free UCQ; use CoreAndIsomorphism")
    jobs = jobs or int(os.environ.get("UCQ_JOBS", "1") or 1)
    total = 1 << ell
    if jobs > 1 and ell >= 6:
        step = -(-total // jobs)
        bounds = [(s, min(s + step, total)) for s in range(0, total, step)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_gray_shard, psi, mode, a, b, core_cap) for a, b in bounds]
            merged = _merge(f.result() for f in futures)
    else:
        merged = _merge([_gray_shard(psi, mode, 0, total, core_cap)])
    entries = []
    for code, (q, coef, witnesses) in sorted(merged.items()):
        if coef == 0 and not keep_zeros:
            continue
        witnesses = sorted(witnesses, key=lambda s: (len(s), s))
        rep = combined_query(psi, witnesses[0])
        if mode is Mode.CORE_AND_ISOMORPHISM:
            rep = counting_core(rep, core_cap)
        entries.append(ExpansionEntry(rep, coef, witnesses, code))
    return ExpansionTable(entries, psi, mode, keep_zeros)


def coefficient(psi: Ucq, q: ConjunctiveQuery, mode: Mode | str | None = None, **kw) -> int:
    """Coefficient of the class of ``q`` in the expansion of ``psi`` (0 if absent)."""
    return cq_expansion(psi, mode, **kw).coefficient_of(q)


@dataclass
class MetaVerdict:
    linear_time: bool
    blocking_terms: list
    assumption: str = TRIANGLE_CONJECTURE
    caveat: str | None = None


def _require_quantifier_free(psi: Ucq, what):
    if not psi.is_quantifier_free():
        raise PreconditionError(f"{what} is defined for quantifier-free UCQs only")


def meta_decide(psi: Ucq, table: ExpansionTable | None = None, **kw) -> MetaVerdict:
    """Linear-time countability: every nonzero-coefficient term is acyclic."""
    _require_quantifier_free(psi, "the linear-time decision")
    table = table or cq_expansion(psi, Mode.ISOMORPHISM_ONLY, **kw)
    blocking = [e for e in table.nonzero() if not is_acyclic(e.query.body)]
    caveat = HIGHER_ARITY_CAVEAT if psi.arity() > 2 else None
    return MetaVerdict(not blocking, blocking, TRIANGLE_CONJECTURE, caveat)


def hereditary_treewidth(psi: Ucq, table: ExpansionTable | None = None,
                         tw_cap: int = DEFAULT_EXACT_CAP, **kw) -> int:
    """Largest treewidth among nonzero-coefficient terms."""
    _require_quantifier_free(psi, "hereditary treewidth")
    table = table or cq_expansion(psi, Mode.ISOMORPHISM_ONLY, **kw)
    return max(treewidth_exact(gaifman_graph(e.query.body), tw_cap)[0] for e in table.nonzero())


def check_labelled_graph(psi: Ucq):
    if psi.arity() > 2:
        raise PreconditionError("WL-dimension needs arity at most 2")
    for body in psi.disjuncts:
        for name, t in body.atoms():
            if len(set(t)) < len(t):
                raise PreconditionError(f"self-loop atom {name}({', '.join(t)}) is not allowed")


def wl_dimension(psi: Ucq, **kw) -> int:
    """WL-dimension of a quantifier-free UCQ on labelled graphs, computed as
    its hereditary treewidth."""
    _require_quantifier_free(psi, "WL-dimension")
    check_labelled_graph(psi)
    return hereditary_treewidth(psi, **kw)


def subset_label(subset) -> str:
    """1-based rendering of a 0-based subset."""
    return "{" + ",".join(str(i + 1) for i in sorted(subset)) + "}"
