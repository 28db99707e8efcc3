"""Abstract simplicial complexes and their reduction to UCQs.

A complex is stored as its ground set and facets.  The reduction takes an
irreducible, non-trivial complex whose ground set is not a face, encodes it
as a power complex over one synthetic element per facet, and emits one
disjunct per ground element: the union of the stretched-clique layers
indexed by the facets that avoid that element.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import CapExceeded, PreconditionError
from .structures import Structure, Ucq, natural_key

DEFAULT_MAX_GROUND = 24
FACET_CROSSCHECK_CAP = 12


@dataclass(frozen=True)
class Complex:
    ground: tuple
    facets: tuple

    def __post_init__(self):
        ground = tuple(dict.fromkeys(str(x) for x in self.ground))
        if not ground:
            raise PreconditionError("a complex needs a nonempty ground set")
        members = set(ground)
        facets = []
        for f in self.facets:
            f = frozenset(str(x) for x in f)
            if not f <= members:
                raise PreconditionError(f"facet {sorted(f, key=natural_key)} leaves the ground set")
            if f and f not in facets:
                facets.append(f)
        maximal = [f for f in facets if not any(f < g for g in facets)]
        if len(maximal) != len(facets):
            warnings.warn("discarding non-maximal facets", stacklevel=3)
        covered = set().union(*maximal) if maximal else set()
        for x in ground:
            if x not in covered:
                maximal.append(frozenset([x]))
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "facets", tuple(maximal))

    def is_trivial(self):
        return len(self.ground) == 1

    def ground_is_face(self):
        return any(len(f) == len(self.ground) for f in self.facets)

    def sorted_facets(self):
        return [sorted(f, key=natural_key) for f in self.facets]

    def delete(self, y) -> "Complex":
        """The complex without ``y`` (faces containing ``y`` removed)."""
        ground = [x for x in self.ground if x != y]
        facets = [f - {y} for f in self.facets]
        facets = [f for f in facets if f]
        facets = [f for i, f in enumerate(facets)
                  if not any(f < g or (f == g and j < i) for j, g in enumerate(facets))]
        return Complex(tuple(ground), tuple(facets))


def _check_ground(c: Complex, cap):
    if len(c.ground) > cap:
        raise CapExceeded("ground set size", len(c.ground), cap)


def enumerate_faces(c: Complex, max_ground: int = DEFAULT_MAX_GROUND) -> list:
    """All faces (including the empty set), by size then element order."""
    _check_ground(c, max_ground)
    faces = set()
    for f in c.facets:
        items = sorted(f, key=natural_key)
        for r in range(len(items) + 1):
            faces.update(frozenset(s) for s in combinations(items, r))
    order = {x: i for i, x in enumerate(sorted(c.ground, key=natural_key))}
    return sorted(faces, key=lambda s: (len(s), sorted(order[x] for x in s)))


def reduced_euler_characteristic(c: Complex, max_ground: int = DEFAULT_MAX_GROUND) -> int:
    """Minus the alternating count of faces, the empty face included."""
    return -sum((-1) ** len(s) for s in enumerate_faces(c, max_ground))


def reduced_euler_by_facets(c: Complex, max_facets: int = FACET_CROSSCHECK_CAP) -> int:
    """Same value by inclusion-exclusion over facet families.

    A family of facets with empty common intersection contributes
    ``-(-1)^(|T|+1)``; families with nonempty intersection cancel.
    """
    k = len(c.facets)
    if k > max_facets:
        raise CapExceeded("number of facets", k, max_facets)
    total = 0
    for r in range(1, k + 1):
        for family in combinations(c.facets, r):
            if not frozenset.intersection(*family):
                total += (-1) ** (r + 1)
    return -total


def dominates(c: Complex, x, y) -> bool:
    """``x`` dominates ``y``: every facet containing ``y`` contains ``x``."""
    x, y = str(x), str(y)
    if x == y:
        raise PreconditionError("domination needs two distinct elements")
    for e in (x, y):
        if e not in c.ground:
            raise PreconditionError(f"{e!r} is not in the ground set")
    return all(x in f for f in c.facets if y in f)


def find_domination(c: Complex):
    """First ``(x, y)`` with ``x`` dominating ``y``, scanning ``y`` then ``x`` in
    sorted order; ``None`` if the complex is irreducible."""
    ordered = sorted(c.ground, key=natural_key)
    for y in ordered:
        for x in ordered:
            if x != y and dominates(c, x, y):
                return x, y
    return None


def is_irreducible(c: Complex) -> bool:
    return find_domination(c) is None


def reduce_to_irreducible(c: Complex) -> Complex:
    while True:
        pair = find_domination(c)
        if pair is None:
            return c
        c = c.delete(pair[1])


@dataclass(frozen=True)
class PowerComplexData:
    universe: tuple
    ground: tuple
    mapping: dict

    def faces_contain(self, family) -> bool:
        """A family of ground sets is a face iff it does not cover the universe."""
        covered = set().union(*family) if family else set()
        return covered != set(self.universe)


def power_complex(c: Complex) -> PowerComplexData:
    """Isomorphic power complex; facets keep their input order, so facet
    ``i`` becomes ``E{i}``."""
    if c.is_trivial():
        raise PreconditionError("power complex needs a non-trivial complex")
    if c.ground_is_face():
        raise PreconditionError("power complex needs a ground set that is not a face")
    if not is_irreducible(c):
        raise PreconditionError("power complex needs an irreducible complex")
    universe = tuple(f"E{i + 1}" for i in range(len(c.facets)))
    mapping = {x: frozenset(universe[i] for i, f in enumerate(c.facets) if x not in f) for x in c.ground}
    ground = tuple(mapping[x] for x in c.ground)
    return PowerComplexData(universe, ground, mapping)


# --- stretched cliques ------------------------------------------------------

def clique_edges(t: int):
    """Edges of ``K_t`` in circulant order: all ``(i, i+1)`` around the cycle,
    then ``(i, i+2)``, and so on.  For ``t = 3`` this is the directed
    triangle 1->2->3->1."""
    seen = set()
    edges = []
    for dist in range(1, t // 2 + 1):
        for i in range(1, t + 1):
            j = (i - 1 + dist) % t + 1
            key = frozenset((i, j))
            if key not in seen:
                seen.add(key)
                edges.append((i, j))
    return edges


def stretch_symbol(edge_index: int, j: int) -> str:
    """Relation name of the ``j``-th stretch edge of the ``edge_index``-th clique edge."""
    return f"R_e{edge_index}_{j}"


@dataclass(frozen=True)
class StretchedClique:
    t: int
    k: int
    structure: Structure
    edges: tuple
    stretch: dict  # (edge_index, j) -> (u, v)


def build_stretched_clique(t: int, k: int) -> StretchedClique:
    """Clique on ``v1..vt`` whose every edge is a path of ``k`` edges, each
    edge carrying its own singleton binary relation."""
    if t < 2 or k < 1:
        raise PreconditionError(f"stretched clique needs t >= 2 and k >= 1, got t={t}, k={k}")
    edges = clique_edges(t)
    universe = [f"v{i}" for i in range(1, t + 1)]
    atoms = []
    stretch = {}
    for m, (a, b) in enumerate(edges, start=1):
        path = [f"v{a}"] + [f"p{m}_{s}" for s in range(1, k)] + [f"v{b}"]
        universe.extend(path[1:-1])
        for j in range(1, k + 1):
            stretch[(m, j)] = (path[j - 1], path[j])
            atoms.append((stretch_symbol(m, j), (path[j - 1], path[j])))
    s = Structure.from_atoms(atoms, universe=universe)
    assert len(s.universe) == t + (k - 1) * comb(t, 2)
    return StretchedClique(t, k, s, tuple(edges), stretch)


def layer(sc: StretchedClique, i: int) -> Structure:
    """The ``i``-th stretch edge of every clique edge (``1 <= i <= k``), over
    the full universe and signature."""
    if not 1 <= i <= sc.k:
        raise PreconditionError(f"layer index {i} not in 1..{sc.k}")
    rels = {stretch_symbol(m, i): {sc.stretch[(m, i)]} for m in range(1, len(sc.edges) + 1)}
    return Structure(sc.structure.signature, sc.structure.universe, rels)


def layers_union(sc: StretchedClique, indices) -> Structure:
    rels: dict = {}
    for i in indices:
        for name, ts in layer(sc, i).relations.items():
            rels.setdefault(name, set()).update(ts)
    return Structure(sc.structure.signature, sc.structure.universe, rels)


@dataclass(frozen=True)
class ReductionResult:
    """Either ``euler`` is set (degenerate branch) or ``ucq`` is."""

    euler: int | None
    ucq: Ucq | None
    reduced: Complex
    power: PowerComplexData | None = None
    clique: StretchedClique | None = None


def reduce_complex_to_ucq(c: Complex, t: int, max_ground: int = DEFAULT_MAX_GROUND) -> ReductionResult:
    """Either the reduced Euler characteristic (when the complex is a simplex
    or reduces to a point, both giving 0) or a quantifier-free UCQ whose
    combined query is the ``k``-stretched ``t``-clique and whose coefficient
    on it is minus the reduced Euler characteristic."""
    if t < 2:
        raise PreconditionError(f"t must be at least 2, got {t}")
    if c.ground_is_face():
        return ReductionResult(0, None, c)
    r = reduce_to_irreducible(c)
    if r.is_trivial() or r.ground_is_face():
        return ReductionResult(reduced_euler_characteristic(r, max_ground), None, r)
    pc = power_complex(r)
    sc = build_stretched_clique(t, len(pc.universe))
    bodies = []
    for x in r.ground:
        indices = sorted(int(e[1:]) for e in pc.mapping[x])
        bodies.append(layers_union(sc, indices))
    psi = Ucq(tuple(bodies), frozenset(sc.structure.universe))
    return ReductionResult(None, psi, r, pc, sc)


def random_complex(n: int, rng, max_facets: int | None = None, max_size: int | None = None) -> Complex:
    """Random complex on ground ``1..n`` from random subsets of at most
    ``max_size`` elements (normalized)."""
    if n < 1:
        raise PreconditionError("random complex needs n >= 1")
    ground = [str(i) for i in range(1, n + 1)]
    count = rng.randint(1, max_facets or 2 * n)
    facets = []
    for _ in range(count):
        size = rng.randint(1, min(n, max_size or n))
        facets.append(frozenset(rng.sample(ground, size)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Complex(tuple(ground), tuple(facets))
