"""Generators for the fixed example queries, complexes and query families."""

from __future__ import annotations

import random

from .simplicial import Complex, random_complex, stretch_symbol
from .structures import ConjunctiveQuery, Structure, Ucq

# The two example complexes on {1,2,3,4}; facet order fixes the numbering of
# the synthetic power-complex elements.
DELTA1_FACETS = [("2", "3", "4"), ("1", "2"), ("1", "3"), ("1", "4")]
DELTA2_FACETS = [("1", "2"), ("2", "3"), ("1", "3"), ("4",)]

K34_VARIABLES = tuple(f"x{i}" for i in range(12))


def delta1() -> Complex:
    return Complex(("1", "2", "3", "4"), tuple(frozenset(f) for f in DELTA1_FACETS))


def delta2() -> Complex:
    return Complex(("1", "2", "3", "4"), tuple(frozenset(f) for f in DELTA2_FACETS))


def s_atoms(subset):
    """Atoms of the 12-cycle substructure using stretch positions ``subset``.

    The three clique edges of the 4-stretched triangle are the arcs
    x0..x4, x4..x8 and x8..x0; position ``a`` of arc ``m`` joins
    ``x(4(m-1)+a-1)`` and ``x(4(m-1)+a)`` (indices mod 12).
    """
    atoms = []
    for a in sorted(subset):
        if not 1 <= a <= 4:
            raise ValueError(f"stretch position {a} not in 1..4")
        for m in (1, 2, 3):
            base = 4 * (m - 1)
            u = f"x{(base + a - 1) % 12}"
            v = f"x{(base + a) % 12}"
            atoms.append((stretch_symbol(m, a), (u, v)))
    return atoms


def k34_signature_structure(atoms) -> Structure:
    full = Structure.from_atoms(s_atoms([1, 2, 3, 4]))
    return Structure.from_atoms(atoms, universe=K34_VARIABLES, signature=full.signature)


def s_structure(subset) -> Structure:
    return k34_signature_structure(s_atoms(subset))


def s_query(subset) -> ConjunctiveQuery:
    return ConjunctiveQuery.quantifier_free(s_structure(subset))


def k34_query() -> ConjunctiveQuery:
    return s_query([1, 2, 3, 4])


def k34_database() -> Structure:
    return s_structure([1, 2, 3, 4])


PSI1_SUBSETS = [(1,), (3, 4), (2, 4), (2, 3)]
PSI2_SUBSETS = [(2, 4), (3, 4), (1, 4), (1, 2, 3)]
FIGURE2_SUBSETS = [(1,), (2, 4), (1, 4), (3, 4), (2, 3), (1, 2, 3)]


def psi_from_subsets(subsets) -> Ucq:
    return Ucq(tuple(s_structure(a) for a in subsets), frozenset(K34_VARIABLES))


def psi1() -> Ucq:
    return psi_from_subsets(PSI1_SUBSETS)


def psi2() -> Ucq:
    return psi_from_subsets(PSI2_SUBSETS)


def subset_name(subset) -> str:
    return "s" + "".join(str(a) for a in subset)


# --- phi/psi families --------------------------------------------------------

def _xs(k):
    return [f"x{i}" for i in range(1, k + 1)] + ["x_bot"]


def appendix_phi(k: int, i: int, j: int) -> ConjunctiveQuery:
    """Exists y: E_i(x_i, y), E_j(x_j, y) and E_l(x_l, x_bot) for the other l."""
    if not (1 <= i < j <= k):
        raise ValueError(f"need 1 <= i < j <= k, got i={i}, j={j}, k={k}")
    y = f"y_{i}_{j}"
    atoms = [(f"E{i}", (f"x{i}", y)), (f"E{j}", (f"x{j}", y))]
    atoms += [(f"E{m}", (f"x{m}", "x_bot")) for m in range(1, k + 1) if m not in (i, j)]
    signature = Structure.from_atoms([(f"E{m}", ("a", "b")) for m in range(1, k + 1)]).signature
    body = Structure.from_atoms(atoms, universe=_xs(k), signature=signature)
    return ConjunctiveQuery(body, frozenset(_xs(k)))


def appendix_phi_union(k: int) -> Ucq:
    """Union of ``appendix_phi(k, i, j)`` over all ``i < j``."""
    if k < 3:
        raise ValueError("the phi family needs k >= 3")
    qs = [appendix_phi(k, i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)]
    return Ucq(tuple(q.body for q in qs), frozenset(_xs(k)))


def appendix_psi(k: int) -> ConjunctiveQuery:
    """Exists y: E(x_i, x_bot) and E(x_i, y) for every i."""
    if k < 1:
        raise ValueError("the psi family needs k >= 1")
    atoms = []
    for i in range(1, k + 1):
        atoms.append(("E", (f"x{i}", "x_bot")))
        atoms.append(("E", (f"x{i}", "y")))
    body = Structure.from_atoms(atoms, universe=_xs(k))
    return ConjunctiveQuery(body, frozenset(_xs(k)))


def appendix_psi_core(k: int) -> ConjunctiveQuery:
    """The star E(x_i, x_bot) for every i, all variables free."""
    body = Structure.from_atoms([("E", (f"x{i}", "x_bot")) for i in range(1, k + 1)], universe=_xs(k))
    return ConjunctiveQuery.quantifier_free(body)


def seeded_random_complex(n: int, seed: int) -> Complex:
    return random_complex(n, random.Random(seed))
