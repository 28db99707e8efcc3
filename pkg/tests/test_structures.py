import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from helpers import GRAPH_SIG, random_cq, random_database, to_nx
from ucq.errors import PreconditionError, SignatureError
from ucq.structures import (ConjunctiveQuery, GaifmanGraph, Signature, Structure, Ucq,
                            gaifman_graph, induced_substructure, is_self_join_free,
                            natural_key, tensor_product, union_structures)


def test_natural_key_orders_numeric_suffixes():
    assert sorted(["x10", "x2", "x1"], key=natural_key) == ["x1", "x2", "x10"]


def test_signature_rejects_conflicts():
    with pytest.raises(SignatureError):
        Signature.of({"E": 2}).union(Signature.of({"E": 3}))
    with pytest.raises(ValueError):
        Signature.of({"E": 0})


def test_structure_rejects_foreign_elements():
    with pytest.raises(ValueError):
        Structure(Signature.of({"E": 2}), ("a",), {"E": {("a", "b")}})


def test_structure_rejects_wrong_arity():
    with pytest.raises(ValueError):
        Structure(Signature.of({"E": 2}), ("a", "b"), {"E": {("a", "b", "a")}})


def test_from_atoms_and_size():
    s = Structure.from_atoms([("E", ("a", "b")), ("U", ("c",))])
    assert s.universe == ("a", "b", "c")
    assert s.size() == 2 + 3 + 2 + 1
    assert s.atoms() == [("E", ("a", "b")), ("U", ("c",))]


def test_gaifman_graph_of_triangle():
    s = Structure.from_atoms([("E", ("a", "b")), ("E", ("b", "c")), ("E", ("c", "a"))])
    g = gaifman_graph(s)
    assert len(g.edges) == 3
    assert not g.is_forest()


def test_gaifman_graph_of_ternary_atom_is_triangle():
    s = Structure.from_atoms([("R", ("a", "b", "c"))])
    assert len(gaifman_graph(s).edges) == 3


def test_gaifman_ignores_self_loops():
    s = Structure.from_atoms([("E", ("a", "a"))])
    assert gaifman_graph(s).edges == frozenset()


def test_union_needs_same_signature():
    a = Structure.from_atoms([("E", ("a", "b"))])
    b = Structure.from_atoms([("F", ("a", "b"))])
    with pytest.raises(SignatureError):
        union_structures(a, b)


def test_union_structures_merges_tuples():
    sig = Signature.of({"E": 2})
    a = Structure.from_atoms([("E", ("a", "b"))], signature=sig)
    b = Structure.from_atoms([("E", ("b", "c"))], signature=sig)
    u = union_structures(a, b)
    assert set(u.universe) == {"a", "b", "c"}
    assert u.tuple_count() == 2


def test_tensor_product_of_edges():
    a = Structure.from_atoms([("E", ("a", "b"))], universe=["a", "b"])
    b = Structure.from_atoms([("E", ("x", "y")), ("E", ("y", "x"))])
    p = tensor_product(a, b)
    assert len(p.universe) == 4
    assert p.tuple_count() == 2


def test_tensor_product_needs_shared_symbols():
    a = Structure.from_atoms([("E", ("a", "b"))])
    b = Structure.from_atoms([("F", ("a", "b"))])
    with pytest.raises(SignatureError):
        tensor_product(a, b)


def test_induced_substructure_drops_tuples():
    s = Structure.from_atoms([("E", ("a", "b")), ("E", ("b", "c"))])
    sub = induced_substructure(s, ["a", "b"])
    assert sub.atoms() == [("E", ("a", "b"))]


def test_self_join_free():
    assert is_self_join_free(Structure.from_atoms([("E", ("a", "b")), ("F", ("b", "c"))]))
    assert not is_self_join_free(Structure.from_atoms([("E", ("a", "b")), ("E", ("b", "c"))]))


def test_ucq_requires_disjoint_quantified_variables():
    sig = Signature.of({"E": 2})
    a = Structure.from_atoms([("E", ("x", "y"))], signature=sig)
    with pytest.raises(PreconditionError):
        Ucq((a, a), frozenset({"x"}))


def test_ucq_build_renames_apart():
    a = Structure.from_atoms([("E", ("x", "y"))])
    b = Structure.from_atoms([("F", ("x", "y"))])
    psi = Ucq.build([a, b], ["x"])
    assert list(psi.signature.names) == ["E", "F"]
    quantified = [set(d.universe) - {"x"} for d in psi.disjuncts]
    assert not quantified[0] & quantified[1]


def test_ucq_requires_free_variables_everywhere():
    a = Structure.from_atoms([("E", ("x", "y"))])
    b = Structure.from_atoms([("E", ("z", "w"))])
    with pytest.raises(PreconditionError):
        Ucq((a, b), frozenset({"x"}))


def test_free_variables_must_be_in_universe():
    with pytest.raises(ValueError):
        ConjunctiveQuery(Structure.from_atoms([("E", ("a", "b"))]), frozenset({"z"}))


def test_components_and_forest():
    g = GaifmanGraph(("a", "b", "c", "d"), frozenset({frozenset(("a", "b"))}))
    assert len(g.components()) == 3
    assert g.is_forest()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_forest_check_matches_networkx(seed):
    q = random_cq(random.Random(seed), max_vars=6)
    g = gaifman_graph(q.body)
    assert g.is_forest() == nx.is_forest(to_nx(g)) if g.vertices else True
    assert len(g.components()) == nx.number_connected_components(to_nx(g))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_tensor_product_sizes(seed):
    rng = random.Random(seed)
    a = random_database(rng, 3, GRAPH_SIG)
    b = random_database(rng, 3, GRAPH_SIG)
    p = tensor_product(a, b)
    assert len(p.universe) == len(a.universe) * len(b.universe)
    for name, _ in GRAPH_SIG:
        assert len(p.relations[name]) == len(a.relations[name]) * len(b.relations[name])
