"""Backtracking homomorphism search.

Source elements are ordered greedily (pinned first, then connected and
smallest-domain first).  For every atom and every position at which one of
its variables gets bound, a hash index from the values of the already bound
positions to the admissible values of the new variable is built once per
call, so every atom is checked exactly when its last variable is assigned.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Mapping

from .errors import PreconditionError, SignatureError
from .structures import Structure


class SearchPlan:
    """A compiled search from ``src`` into ``dst`` with a fixed variable order."""

    def __init__(self, src: Structure, dst: Structure, order):
        self.src = src
        self.dst = dst
        self.order = list(order)
        self.position = {v: i for i, v in enumerate(self.order)}
        self.values = list(dst.universe)
        n = len(self.order)
        # per step: list of (bound step indices, index dict)
        self.constraints = [[] for _ in range(n)]
        all_values = frozenset(range(len(self.values)))
        self.all_values = all_values
        didx = dst.index
        for name, tuples in src.relations.items():
            dst_tuples = [tuple(didx[e] for e in t) for t in dst.relations.get(name, ())]
            for t in tuples:
                steps = sorted({self.position[v] for v in t})
                for s in steps:
                    v = self.order[s]
                    v_pos = [p for p, x in enumerate(t) if x == v]
                    bound_pos = [p for p, x in enumerate(t) if self.position[x] < s]
                    bound_steps = tuple(self.position[t[p]] for p in bound_pos)
                    index: dict = defaultdict(set)
                    for dt in dst_tuples:
                        val = dt[v_pos[0]]
                        if any(dt[p] != val for p in v_pos[1:]):
                            continue
                        index[tuple(dt[p] for p in bound_pos)].add(val)
                    self.constraints[s].append((bound_steps, dict(index)))

    def candidates(self, step, vals):
        cons = self.constraints[step]
        if not cons:
            return self.all_values
        best = None
        for bound_steps, index in cons:
            got = index.get(tuple(vals[i] for i in bound_steps))
            if not got:
                return ()
            best = got if best is None else best & got
            if not best:
                return ()
        return best

    def search(self, vals, start, stop):
        """Yield once per consistent assignment of steps ``start..stop-1``.

        ``vals`` is mutated in place and holds the assignment when yielded.
        """
        if start >= stop:
            yield vals
            return
        for c in sorted(self.candidates(start, vals)):
            vals[start] = c
            yield from self.search(vals, start + 1, stop)
        vals[start] = None

    def exists(self, vals, start, stop):
        for _ in self.search(vals, start, stop):
            return True
        return False


def initial_domains(src: Structure, dst: Structure) -> dict[str, int]:
    """Size of the projection-based domain of every source element."""
    sizes = {v: len(dst.universe) for v in src.universe}
    for name, tuples in src.relations.items():
        dst_tuples = dst.relations.get(name, ())
        for t in tuples:
            for p, v in enumerate(t):
                sizes[v] = min(sizes[v], len({dt[p] for dt in dst_tuples}))
    return sizes


def greedy_order(src: Structure, dst: Structure, first=(), groups=None):
    """Variable order: ``first`` as given, then greedily by connectivity and
    domain size.  ``groups`` optionally partitions the remaining variables
    into blocks that are ordered one after another (e.g. free before
    quantified)."""
    sizes = initial_domains(src, dst)
    neighbors = defaultdict(set)
    for ts in src.relations.values():
        for t in ts:
            for u in t:
                neighbors[u].update(t)
    order = list(first)
    placed = set(order)
    rank = src.index
    if groups is None:
        groups = [[v for v in src.universe if v not in placed]]
    for group in groups:
        remaining = [v for v in group if v not in placed]
        while remaining:
            def key(v):
                connected = len(neighbors[v] & placed)
                return (connected == 0, sizes[v], -connected, rank[v])
            v = min(remaining, key=key)
            remaining.remove(v)
            order.append(v)
            placed.add(v)
    return order


def check_pin(src: Structure, dst: Structure, pin: Mapping):
    if not src.signature.issubset(dst.signature):
        missing = [n for n, a in src.signature if dst.signature.arities.get(n) != a]
        raise SignatureError(f"source symbols {missing} are not in the target signature")
    members = set(dst.universe)
    for k, v in pin.items():
        if k not in src.index:
            raise PreconditionError(f"pinned element {k!r} is not in the source")
        if v not in members:
            raise PreconditionError(f"pin maps {k!r} to {v!r} outside the target universe")


def _pinned_plan(src, dst, pin):
    check_pin(src, dst, pin)
    order = greedy_order(src, dst, first=list(pin))
    plan = SearchPlan(src, dst, order)
    vals = [None] * len(order)
    didx = dst.index
    for i, v in enumerate(order[: len(pin)]):
        c = didx[pin[v]]
        if c not in plan.candidates(i, vals):
            return plan, None
        vals[i] = c
    return plan, vals


def enumerate_homomorphisms(src: Structure, dst: Structure, pin: Mapping | None = None) -> list[dict]:
    """All homomorphisms from ``src`` to ``dst`` extending ``pin``."""
    pin = dict(pin or {})
    plan, vals = _pinned_plan(src, dst, pin)
    if vals is None:
        return []
    out = []
    for vals in plan.search(vals, len(pin), len(plan.order)):
        out.append({v: plan.values[vals[i]] for i, v in enumerate(plan.order)})
    return out


def exists_homomorphism(src: Structure, dst: Structure, pin: Mapping | None = None) -> bool:
    pin = dict(pin or {})
    plan, vals = _pinned_plan(src, dst, pin)
    if vals is None:
        return False
    return plan.exists(vals, len(pin), len(plan.order))


def find_homomorphism(src: Structure, dst: Structure, pin: Mapping | None = None) -> dict | None:
    pin = dict(pin or {})
    plan, vals = _pinned_plan(src, dst, pin)
    if vals is None:
        return None
    for vals in plan.search(vals, len(pin), len(plan.order)):
        return {v: plan.values[vals[i]] for i, v in enumerate(plan.order)}
    return None


def is_homomorphism(src: Structure, dst: Structure, h: Mapping) -> bool:
    """Direct check of the homomorphism condition on every tuple."""
    for name, tuples in src.relations.items():
        target = dst.relations.get(name, frozenset())
        for t in tuples:
            if tuple(h[e] for e in t) not in target:
                return False
    return True
