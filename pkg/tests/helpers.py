"""Random generators and independent oracles shared by the test modules."""

from __future__ import annotations

from itertools import permutations, product
from pathlib import Path

import networkx as nx

from ucq.structures import ConjunctiveQuery, Signature, Structure, Ucq

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

GRAPH_SIG = Signature.of({"E": 2, "F": 2, "U": 1})


def random_atoms(rng, elements, signature=GRAPH_SIG, count=None, loops=True):
    names = list(signature.names)
    count = rng.randint(1, 5) if count is None else count
    atoms = []
    for _ in range(count):
        r = rng.choice(names)
        t = tuple(rng.choice(elements) for _ in range(signature.arity(r)))
        if not loops and len(set(t)) < len(t):
            continue
        atoms.append((r, t))
    return atoms


def random_cq(rng, max_vars=5, max_free=None, signature=GRAPH_SIG, quantified=True, loops=True, tag=""):
    n = rng.randint(1, max_vars)
    names = [f"v{i}" for i in range(n)]
    if quantified:
        k = rng.randint(0, n if max_free is None else min(n, max_free))
        free = names[:k]
    else:
        free = names
    rename = {v: (v if v in free else f"{v}{tag}q") for v in names}
    atoms = [(r, tuple(rename[e] for e in t)) for r, t in random_atoms(rng, names, signature, loops=loops)]
    body = Structure.from_atoms(atoms, universe=[rename[v] for v in names], signature=signature)
    return ConjunctiveQuery(body, frozenset(free))


def random_ucq(rng, max_disjuncts=4, max_vars=5, quantified=False, loops=True, signature=GRAPH_SIG):
    n = rng.randint(1, max_vars)
    free = [f"v{i}" for i in range(n)]
    bodies = []
    for i in range(rng.randint(1, max_disjuncts)):
        extra = [f"y{i}_{j}" for j in range(rng.randint(0, 2))] if quantified else []
        atoms = random_atoms(rng, free + extra, signature, loops=loops)
        # query files cannot express quantified variables outside every atom
        used = [y for y in extra if any(y in t for _, t in atoms)]
        bodies.append(Structure.from_atoms(atoms, universe=free + used, signature=signature))
    return Ucq.build(bodies, free)


def random_database(rng, max_elements=4, signature=GRAPH_SIG, density=None):
    n = rng.randint(1, max_elements)
    elements = [f"d{i}" for i in range(n)]
    p = rng.random() if density is None else density
    rels = {}
    for name, arity in signature:
        rels[name] = {t for t in product(elements, repeat=arity) if rng.random() < p}
    return Structure(signature, tuple(elements), rels)


# --- oracles ----------------------------------------------------------------

def answer_set(psi: Ucq, d: Structure) -> set:
    """All answers by exhaustive enumeration (free variables in natural order)."""
    free = psi.free_order
    out = set()
    for a in product(d.universe, repeat=len(free)):
        h = dict(zip(free, a))
        for body in psi.disjuncts:
            quantified = [e for e in body.universe if e not in psi.free]
            hit = False
            for b in product(d.universe, repeat=len(quantified)):
                g = dict(h, **dict(zip(quantified, b)))
                if all(tuple(g[e] for e in t) in d.relations.get(name, ()) for name, t in body.atoms()):
                    hit = True
                    break
            if hit:
                out.add(a)
                break
    return out


def incidence_graph(body: Structure, free=()) -> nx.Graph:
    """Colored incidence graph: isomorphic iff the structures are isomorphic
    by a map that keeps the free set."""
    g = nx.Graph()
    for e in body.universe:
        g.add_node(("e", e), color=("elem", e in free))
    for i, (name, t) in enumerate(body.atoms()):
        g.add_node(("a", i), color=("atom", name))
        for pos, e in enumerate(t):
            port = ("p", i, pos)
            g.add_node(port, color=("pos", pos))
            g.add_edge(("a", i), port)
            g.add_edge(port, ("e", e))
    return g


def nx_isomorphic(a: ConjunctiveQuery, b: ConjunctiveQuery) -> bool:
    return nx.is_isomorphic(incidence_graph(a.body, a.free), incidence_graph(b.body, b.free),
                            node_match=lambda x, y: x["color"] == y["color"])


def brute_treewidth(g) -> int:
    """Minimum over all elimination orderings (small graphs only)."""
    vertices = list(g.vertices)
    if not vertices:
        return 0
    best = len(vertices) - 1
    for order in permutations(vertices):
        adj = {v: set(g.neighbors(v)) for v in vertices}
        width = 0
        for v in order:
            nb = adj.pop(v)
            width = max(width, len(nb))
            for u in nb:
                adj[u] |= nb - {u}
                adj[u].discard(v)
        best = min(best, width)
    return best


def to_nx(g) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(tuple(e) for e in g.edges)
    return h
