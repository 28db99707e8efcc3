import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from helpers import GRAPH_SIG, answer_set, nx_isomorphic, random_cq, random_database
from ucq.analysis import (CqReport, classify_cq, contract, counting_core, degree_of_freedom,
                          is_counting_minimal)
from ucq.canonical import canonical_form
from ucq.errors import CapExceeded
from ucq.fixtures import appendix_phi, appendix_psi, appendix_psi_core, k34_query
from ucq.structures import ConjunctiveQuery, Structure, Ucq


def q_of(atoms, free, universe=()):
    return ConjunctiveQuery(Structure.from_atoms(atoms, universe=universe), frozenset(free))


def test_contract_of_star_through_quantified_variable():
    q = q_of([("E", ("x1", "y")), ("E", ("x2", "y")), ("E", ("x3", "y"))], {"x1", "x2", "x3"})
    g = contract(q)
    assert set(g.vertices) == {"x1", "x2", "x3"}
    assert len(g.edges) == 3


@pytest.mark.parametrize("k", [3, 4, 5])
def test_appendix_psi_contract_is_clique_plus_star(k):
    g = contract(appendix_psi(k))
    xs = [f"x{i}" for i in range(1, k + 1)]
    want = {frozenset(e) for e in combinations(xs, 2)} | {frozenset((x, "x_bot")) for x in xs}
    assert g.edges == want


def test_appendix_phi_contract():
    g = contract(appendix_phi(4, 1, 3))
    assert frozenset(("x1", "x3")) in g.edges
    assert frozenset(("x2", "x_bot")) in g.edges


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_psi_core_is_star(k):
    core = counting_core(appendix_psi(k))
    assert canonical_form(core) == canonical_form(appendix_psi_core(k))
    assert not is_counting_minimal(appendix_psi(k))
    assert is_counting_minimal(core)


def test_quantifier_free_is_minimal_without_cap():
    q = k34_query()
    assert is_counting_minimal(q, cap=1)
    assert counting_core(q, cap=1) is q


def test_core_cap():
    q = appendix_psi(12)
    with pytest.raises(CapExceeded):
        counting_core(q, cap=12)


def test_degree_of_freedom():
    assert degree_of_freedom(appendix_psi(4)) == 4
    assert degree_of_freedom(k34_query()) == 0


def test_classify_k34():
    r = classify_cq(k34_query())
    assert r.treewidth == 2
    assert not r.acyclic
    assert r.is_minimal
    assert r.classification is None


def test_classify_with_bound():
    assert classify_cq(appendix_psi(3), bound=1).classification == CqReport.POLY_TIME
    assert classify_cq(k34_query(), bound=1).classification == CqReport.HARD


def test_classify_reports_caps_per_field():
    r = classify_cq(appendix_psi(12), core_cap=5)
    assert r.core is None
    assert "core" in r.errors
    assert r.treewidth == 2


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_core_preserves_answers_and_is_minimal(seed):
    rng = random.Random(seed)
    q = random_cq(rng, max_vars=5)
    core = counting_core(q)
    assert is_counting_minimal(core)
    assert core.free == q.free
    assert set(core.body.universe) <= set(q.body.universe)
    for _ in range(3):
        d = random_database(rng, 3, GRAPH_SIG)
        assert answer_set(Ucq.single(core), d) == answer_set(Ucq.single(q), d)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_core_unique_up_to_isomorphism(seed):
    rng = random.Random(seed)
    q = random_cq(rng, max_vars=5)
    names = list(q.body.universe)
    rng.shuffle(names)
    shuffled = ConjunctiveQuery(Structure(q.body.signature, tuple(names), q.body.relations), q.free)
    assert nx_isomorphic(counting_core(q), counting_core(shuffled))
