"""Relational structures, conjunctive queries and unions of them.

A :class:`Structure` doubles as a query body and as a database.  Elements
are plain strings; relations are sets of tuples.  Everything here is
immutable after construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping

from .errors import PreconditionError, SignatureError

_NUM_SPLIT = re.compile(r"(\d+)")


def natural_key(name):
    """Sort key that orders ``x2`` before ``x10``."""
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in _NUM_SPLIT.split(str(name)) if p)


@dataclass(frozen=True)
class Signature:
    """Relation symbols with arities, kept sorted by name."""

    symbols: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        names = [n for n, _ in self.symbols]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate relation symbol in {names}")
        for name, arity in self.symbols:
            if not isinstance(arity, int) or arity < 1:
                raise SignatureError(f"symbol {name} has invalid arity {arity!r}")
        object.__setattr__(self, "symbols", tuple(sorted(self.symbols, key=lambda s: natural_key(s[0]))))

    @classmethod
    def of(cls, mapping: Mapping[str, int]) -> "Signature":
        return cls(tuple(mapping.items()))

    @cached_property
    def arities(self) -> dict[str, int]:
        return dict(self.symbols)

    @property
    def names(self):
        return [n for n, _ in self.symbols]

    def arity(self, name):
        return self.arities[name]

    def __contains__(self, name):
        return name in self.arities

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def issubset(self, other: "Signature") -> bool:
        return all(other.arities.get(n) == a for n, a in self.symbols)

    def union(self, other: "Signature") -> "Signature":
        merged = dict(self.arities)
        for name, arity in other.symbols:
            if merged.setdefault(name, arity) != arity:
                raise SignatureError(f"symbol {name} used with arities {merged[name]} and {arity}")
        return Signature.of(merged)

    def intersection(self, other: "Signature") -> "Signature":
        return Signature(tuple(s for s in self.symbols if other.arities.get(s[0]) == s[1]))

    def max_arity(self):
        return max((a for _, a in self.symbols), default=0)


@dataclass(frozen=True, eq=False)
class Structure:
    """A finite relational structure.

    ``relations`` maps every symbol of the signature to a frozenset of
    tuples (possibly empty).  Use :meth:`from_atoms` for convenient
    construction.
    """

    signature: Signature
    universe: tuple[str, ...]
    relations: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        universe = tuple(dict.fromkeys(self.universe))
        object.__setattr__(self, "universe", universe)
        members = set(universe)
        rels = {}
        for name, arity in self.signature:
            tuples = frozenset(tuple(t) for t in self.relations.get(name, ()))
            for t in tuples:
                if len(t) != arity:
                    raise SignatureError(f"tuple {t} in {name} does not have arity {arity}")
                for e in t:
                    if e not in members:
                        raise PreconditionError(f"element {e!r} of {name}{t} is not in the universe")
            rels[name] = tuples
        extra = set(self.relations) - set(rels)
        if extra:
            raise SignatureError(f"relations {sorted(extra)} are not in the signature")
        object.__setattr__(self, "relations", rels)

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[str, tuple]], universe=(), signature: Signature | None = None):
        """Build a structure from ``(symbol, tuple)`` pairs.

        The universe is ``universe`` followed by every element mentioned in
        an atom, in first-appearance order.  Missing signature entries are
        inferred from the atoms.
        """
        atoms = [(r, tuple(t)) for r, t in atoms]
        arities = dict(signature.arities) if signature is not None else {}
        rels: dict[str, set] = {n: set() for n in arities}
        elems = list(universe)
        for r, t in atoms:
            if not t:
                raise SignatureError(f"relation {r} has arity 0")
            if arities.setdefault(r, len(t)) != len(t):
                raise SignatureError(f"symbol {r} used with arities {arities[r]} and {len(t)}")
            rels.setdefault(r, set()).add(t)
            elems.extend(t)
        return cls(Signature.of(arities), tuple(elems), rels)

    # --- basic views -----------------------------------------------------

    def atoms(self):
        """All ``(symbol, tuple)`` pairs in a deterministic order."""
        out = []
        for name, _ in self.signature:
            for t in sorted(self.relations[name], key=lambda t: tuple(natural_key(e) for e in t)):
                out.append((name, t))
        return out

    def tuple_count(self):
        return sum(len(ts) for ts in self.relations.values())

    def size(self):
        """Encoding size ``|tau| + |U| + sum |R| * arity(R)``."""
        return (len(self.signature) + len(self.universe)
                + sum(len(self.relations[n]) * a for n, a in self.signature))

    def active_elements(self):
        """Elements that occur in at least one tuple."""
        seen = {}
        for ts in self.relations.values():
            for t in ts:
                for e in t:
                    seen[e] = None
        return [e for e in self.universe if e in seen]

    def isolated_elements(self):
        active = set(self.active_elements())
        return [e for e in self.universe if e not in active]

    @cached_property
    def index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.universe)}

    def with_signature(self, signature: Signature) -> "Structure":
        """Same tuples over a larger signature (new symbols are empty)."""
        merged = self.signature.union(signature)
        return Structure(merged, self.universe, self.relations)

    def rename(self, mapping: Mapping[str, str]) -> "Structure":
        """Apply an injective renaming of elements (unmapped names stay)."""
        f = lambda e: mapping.get(e, e)  # noqa: E731
        rels = {n: {tuple(f(e) for e in t) for t in ts} for n, ts in self.relations.items()}
        return Structure(self.signature, tuple(f(e) for e in self.universe), rels)

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (self.signature == other.signature and set(self.universe) == set(other.universe)
                and self.relations == other.relations)

    def __hash__(self):
        return hash((self.signature, frozenset(self.universe),
                     frozenset((n, ts) for n, ts in self.relations.items())))

    def __repr__(self):
        atoms = ", ".join(f"{r}({','.join(t)})" for r, t in self.atoms())
        return f"Structure(U={list(self.universe)}, [{atoms}])"

    def __len__(self):
        return self.size()


@dataclass(frozen=True)
class ConjunctiveQuery:
    """A query body together with its free variables."""

    body: Structure
    free: frozenset = frozenset()

    def __post_init__(self):
        free = frozenset(self.free)
        object.__setattr__(self, "free", free)
        missing = free - set(self.body.universe)
        if missing:
            raise PreconditionError(f"free variables {sorted(missing)} not in the universe")

    @property
    def quantified(self):
        return [v for v in self.body.universe if v not in self.free]

    @property
    def free_order(self):
        return sorted(self.free, key=natural_key)

    def is_quantifier_free(self):
        return len(self.free) == len(self.body.universe)

    @classmethod
    def quantifier_free(cls, body: Structure) -> "ConjunctiveQuery":
        return cls(body, frozenset(body.universe))


@dataclass(frozen=True)
class Ucq:
    """A union of conjunctive queries sharing the free variables.

    Every disjunct carries the whole shared signature and has the free
    variables in its universe; quantified variables of different disjuncts
    are disjoint.
    """

    disjuncts: tuple[Structure, ...]
    free: frozenset = frozenset()

    def __post_init__(self):
        disjuncts = tuple(self.disjuncts)
        if not disjuncts:
            raise PreconditionError("a UCQ needs at least one disjunct")
        free = frozenset(self.free)
        sig = disjuncts[0].signature
        for d in disjuncts[1:]:
            if d.signature != sig:
                raise SignatureError("disjuncts of a UCQ must share one signature")
        seen = set()
        for d in disjuncts:
            uni = set(d.universe)
            if not free <= uni:
                raise PreconditionError(f"free variables {sorted(free - uni)} missing from a disjunct")
            quantified = uni - free
            clash = quantified & seen
            if clash:
                raise PreconditionError(f"quantified variables {sorted(clash)} shared between disjuncts")
            seen |= quantified
        object.__setattr__(self, "disjuncts", disjuncts)
        object.__setattr__(self, "free", free)

    @classmethod
    def build(cls, disjuncts: Iterable[Structure], free=()) -> "Ucq":
        """Align signatures, add the free variables to every universe and
        rename quantified variables apart where two disjuncts reuse a name."""
        disjuncts = list(disjuncts)
        free = frozenset(free)
        sig = Signature()
        for d in disjuncts:
            sig = sig.union(d.signature)
        used = set(free)
        for d in disjuncts:
            used |= set(d.universe)
        seen: set = set()
        out = []
        for i, d in enumerate(disjuncts):
            mapping = {}
            for v in d.universe:
                if v in free:
                    continue
                if v in seen:
                    n = 2
                    while f"{v}_{n}" in used:
                        n += 1
                    mapping[v] = f"{v}_{n}"
                    used.add(mapping[v])
                seen.add(mapping.get(v, v))
            d = d.rename(mapping) if mapping else d
            d = Structure(sig, tuple(sorted(free, key=natural_key)) + d.universe, d.relations)
            out.append(d)
        return cls(tuple(out), free)

    @classmethod
    def single(cls, q: ConjunctiveQuery) -> "Ucq":
        return cls((q.body,), q.free)

    def __len__(self):
        return len(self.disjuncts)

    @property
    def signature(self) -> Signature:
        return self.disjuncts[0].signature

    @property
    def free_order(self):
        return sorted(self.free, key=natural_key)

    def disjunct(self, i) -> ConjunctiveQuery:
        return ConjunctiveQuery(self.disjuncts[i], self.free)

    def queries(self):
        return [self.disjunct(i) for i in range(len(self))]

    def is_quantifier_free(self):
        return all(set(d.universe) == self.free for d in self.disjuncts)

    def arity(self):
        return self.signature.max_arity()


@dataclass(frozen=True)
class GaifmanGraph:
    vertices: tuple[str, ...]
    edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(dict.fromkeys(self.vertices)))
        edges = frozenset(frozenset(e) for e in self.edges)
        vs = set(self.vertices)
        for e in edges:
            if len(e) != 2:
                raise PreconditionError(f"edge {set(e)} is not a pair of distinct vertices")
            if not e <= vs:
                raise PreconditionError(f"edge {set(e)} leaves the vertex set")
        object.__setattr__(self, "edges", edges)

    @cached_property
    def adjacency(self) -> dict[str, set]:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            u, v = tuple(e)
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def neighbors(self, v):
        return self.adjacency[v]

    def subgraph(self, keep) -> "GaifmanGraph":
        keep = set(keep)
        return GaifmanGraph(tuple(v for v in self.vertices if v in keep),
                            frozenset(e for e in self.edges if e <= keep))

    def with_edges(self, extra) -> "GaifmanGraph":
        return GaifmanGraph(self.vertices, self.edges | frozenset(frozenset(e) for e in extra))

    def components(self):
        """Connected components as lists, in vertex order."""
        seen = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp, stack = [], [v]
            seen.add(v)
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self.adjacency[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(comp)
        return comps

    def is_forest(self):
        return len(self.edges) == len(self.vertices) - len(self.components())

    def is_subgraph_of(self, other: "GaifmanGraph") -> bool:
        return set(self.vertices) <= set(other.vertices) and self.edges <= other.edges


# --- operations ----------------------------------------------------------

def gaifman_graph(s: Structure) -> GaifmanGraph:
    edges = set()
    for ts in s.relations.values():
        for t in ts:
            distinct = list(dict.fromkeys(t))
            for i, u in enumerate(distinct):
                for v in distinct[i + 1:]:
                    edges.add(frozenset((u, v)))
    return GaifmanGraph(s.universe, frozenset(edges))


def union_structures(a: Structure, b: Structure) -> Structure:
    if a.signature != b.signature:
        raise SignatureError("union needs identical signatures")
    rels = {n: a.relations[n] | b.relations[n] for n in a.relations}
    return Structure(a.signature, a.universe + b.universe, rels)


def tensor_product(a: Structure, b: Structure) -> Structure:
    """Componentwise product over the shared symbols.

    Elements of the product are named ``<u,v>``.
    """
    sig = a.signature.intersection(b.signature)
    if not len(sig):
        raise SignatureError("tensor product needs at least one shared symbol")
    pair = lambda u, v: f"<{u},{v}>"  # noqa: E731
    universe = tuple(pair(u, v) for u, v in product(a.universe, b.universe))
    rels = {}
    for name, _ in sig:
        rels[name] = {tuple(pair(u, v) for u, v in zip(s, t))
                      for s in a.relations[name] for t in b.relations[name]}
    return Structure(sig, universe, rels)


def induced_substructure(s: Structure, keep) -> Structure:
    keep = set(keep)
    outside = keep - set(s.universe)
    if outside:
        raise PreconditionError(f"elements {sorted(outside)} are not in the universe")
    rels = {n: {t for t in ts if all(e in keep for e in t)} for n, ts in s.relations.items()}
    return Structure(s.signature, tuple(e for e in s.universe if e in keep), rels)


def is_self_join_free(s: Structure) -> bool:
    return all(len(ts) <= 1 for ts in s.relations.values())
