"""Alpha-acyclicity via GYO reduction, and the join forest it yields."""

from __future__ import annotations

from dataclasses import dataclass

from .structures import Structure, gaifman_graph


@dataclass(frozen=True)
class JoinForest:
    """Atoms of a structure arranged as a join forest.

    ``order`` lists atom indices children-before-parents (the GYO removal
    order); ``parent[i]`` is ``None`` for roots.
    """

    atoms: list
    parent: dict
    order: list

    def running_intersection_holds(self) -> bool:
        """Every variable's atoms form a connected subtree."""
        vars_of = [set(t) for _, t in self.atoms]
        everything = set().union(*vars_of) if vars_of else set()
        for v in everything:
            holding = {i for i, vs in enumerate(vars_of) if v in vs}
            tops = [i for i in holding if self.parent[i] not in holding]
            if len(tops) != 1:
                return False
        return True


def gyo(hyperedges):
    """Run GYO reduction.

    Returns ``(acyclic, parent, order)`` where ``parent`` maps an edge index
    to the index of the edge that absorbed it (``None`` when it vanished).
    """
    edges = [set(e) for e in hyperedges]
    alive = set(range(len(edges)))
    parent: dict = {}
    order: list = []
    changed = True
    while changed and alive:
        changed = False
        counts: dict = {}
        for i in alive:
            for v in edges[i]:
                counts[v] = counts.get(v, 0) + 1
        for i in sorted(alive):
            lonely = {v for v in edges[i] if counts[v] == 1}
            if lonely:
                edges[i] -= lonely
                changed = True
        for i in sorted(alive):
            if not edges[i]:
                alive.discard(i)
                parent[i] = None
                order.append(i)
                changed = True
                continue
            for j in sorted(alive):
                if j != i and edges[i] <= edges[j]:
                    alive.discard(i)
                    parent[i] = j
                    order.append(i)
                    changed = True
                    break
    return not alive, parent, order


def join_forest(s: Structure) -> JoinForest | None:
    """Join forest of the atoms of ``s``, or ``None`` if ``s`` is cyclic."""
    atoms = s.atoms()
    ok, parent, order = gyo([set(t) for _, t in atoms])
    if not ok:
        return None
    return JoinForest(atoms, parent, order)


def is_acyclic(s: Structure) -> bool:
    """Forest test on the Gaifman graph for arity at most two, GYO otherwise."""
    if s.signature.max_arity() <= 2:
        return gaifman_graph(s).is_forest()
    return gyo([set(t) for _, t in s.atoms()])[0]


def is_alpha_acyclic(s: Structure) -> bool:
    return gyo([set(t) for _, t in s.atoms()])[0]
