"""Tree decompositions and treewidth.

``treewidth_exact`` first eliminates vertices with the simplicial and
almost-simplicial rules, then solves the remaining kernel with a dynamic
program over vertex subsets (the width of eliminating ``v`` after the set
``S`` is the number of vertices outside ``S`` reachable from ``v`` through
``S``).  Everything is expressed as an elimination ordering, from which the
witness decomposition is built.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded, PreconditionError
from .structures import GaifmanGraph

DEFAULT_EXACT_CAP = 20


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed by node id; ``parent`` maps each node to its parent (the
    root maps to ``None``)."""

    bags: dict
    parent: dict
    root: object = None

    @property
    def width(self):
        if not self.bags:
            return 0
        return max(0, max(len(b) for b in self.bags.values()) - 1)

    def tree_edges(self):
        return [(c, p) for c, p in self.parent.items() if p is not None]

    def violations(self, g: GaifmanGraph) -> list[str]:
        """Reasons the decomposition is invalid for ``g`` (empty if valid)."""
        problems = []
        nodes = set(self.bags)
        if set(self.parent) != nodes:
            problems.append("parent map and bags disagree on the node set")
            return problems
        roots = [n for n, p in self.parent.items() if p is None]
        if nodes and len(roots) != 1:
            problems.append(f"expected one root, found {len(roots)}")
        for n in nodes:
            seen, x = set(), n
            while x is not None:
                if x in seen:
                    problems.append(f"cycle through node {n}")
                    break
                seen.add(x)
                x = self.parent.get(x)
        covered = set().union(*self.bags.values()) if self.bags else set()
        missing = set(g.vertices) - covered
        if missing:
            problems.append(f"(C1) vertices {sorted(missing)} in no bag")
        for e in g.edges:
            if not any(e <= b for b in self.bags.values()):
                problems.append(f"(C2) edge {sorted(e)} in no bag")
        for v in g.vertices:
            holding = {n for n, b in self.bags.items() if v in b}
            if not holding:
                continue
            # connected iff exactly one holding node has its parent outside the set
            tops = [n for n in holding if self.parent[n] not in holding]
            if len(tops) != 1:
                problems.append(f"(C3) nodes containing {v} are not connected")
        return problems

    def is_valid(self, g: GaifmanGraph) -> bool:
        return not self.violations(g)


def decomposition_from_ordering(g: GaifmanGraph, ordering) -> TreeDecomposition:
    """Standard elimination-ordering decomposition; node ids are positions."""
    ordering = list(ordering)
    if sorted(ordering, key=str) != sorted(g.vertices, key=str):
        raise PreconditionError("ordering must be a permutation of the vertices")
    pos = {v: i for i, v in enumerate(ordering)}
    adj = {v: set(ns) for v, ns in g.adjacency.items()}
    bags, parent = {}, {}
    for i, v in enumerate(ordering):
        later = adj[v]
        bags[i] = frozenset(later | {v})
        parent[i] = min((pos[u] for u in later), default=None)
        for u in later:
            adj[u] |= later - {u}
            adj[u].discard(v)
    roots = [i for i, p in parent.items() if p is None]
    for a, b in zip(roots, roots[1:]):
        parent[a] = b
    if not bags:
        bags[0] = frozenset()
        parent[0] = None
    root = next(i for i, p in parent.items() if p is None)
    return TreeDecomposition(bags, parent, root)


def ordering_width(g: GaifmanGraph, ordering) -> int:
    return decomposition_from_ordering(g, ordering).width


def _adjacency(g):
    return {v: set(ns) for v, ns in g.adjacency.items()}


def _eliminate(adj, v):
    ns = adj.pop(v)
    for u in ns:
        adj[u].discard(v)
        adj[u] |= ns - {u}
    return len(ns)


def degeneracy_lower_bound(g: GaifmanGraph) -> int:
    """Maximum over the minimum-degree deletion sequence of the minimum degree."""
    adj = _adjacency(g)
    best = 0
    while adj:
        v = min(adj, key=lambda x: (len(adj[x]), str(x)))
        best = max(best, len(adj[v]))
        for u in adj.pop(v):
            adj[u].discard(v)
    return best


def min_fill_ordering(g: GaifmanGraph):
    adj = _adjacency(g)
    order = []
    while adj:
        def fill(v):
            ns = list(adj[v])
            return sum(1 for i, a in enumerate(ns) for b in ns[i + 1:] if b not in adj[a])
        v = min(adj, key=lambda x: (fill(x), len(adj[x]), str(x)))
        order.append(v)
        _eliminate(adj, v)
    return order


def treewidth_bounds(g: GaifmanGraph) -> tuple[int, int]:
    """``(lower, upper)`` from minimum-degree degeneracy and min-fill."""
    if not g.vertices:
        return 0, 0
    return degeneracy_lower_bound(g), ordering_width(g, min_fill_ordering(g))


def _is_clique(adj, vs):
    vs = list(vs)
    return all(b in adj[a] for i, a in enumerate(vs) for b in vs[i + 1:])


def _reduce(adj, low):
    """Apply simplicial / almost simplicial eliminations; returns (prefix, low)."""
    prefix = []
    changed = True
    while changed:
        changed = False
        for v in sorted(adj, key=str):
            ns = adj[v]
            if _is_clique(adj, ns):
                low = max(low, len(ns))
            elif len(ns) <= low and any(_is_clique(adj, ns - {u}) for u in ns):
                pass
            else:
                continue
            prefix.append(v)
            _eliminate(adj, v)
            changed = True
    return prefix, low


def _subset_dp(vertices, adj, upper):
    """Optimal elimination ordering of a connected kernel, or ``None`` if no
    ordering of width < ``upper`` exists."""
    n = len(vertices)
    bit = {v: 1 << i for i, v in enumerate(vertices)}
    nb = [0] * n
    for i, v in enumerate(vertices):
        for u in adj[v]:
            nb[i] |= bit[u]
    full = (1 << n) - 1

    def q(s, i):
        comp = 1 << i
        frontier = comp
        reach = 0
        while frontier:
            f = frontier
            grow = 0
            while f:
                low = f & -f
                grow |= nb[low.bit_length() - 1]
                f ^= low
            reach |= grow
            new = grow & s & ~comp
            comp |= new
            frontier = new
        return bin(reach & ~s & ~(1 << i)).count("1")

    best = {0: (-1, None, None)}
    layer = [0]
    found = None
    for size in range(n):
        nxt = {}
        for s in layer:
            tw_s = best[s][0]
            remaining = n - size
            if remaining - 1 <= max(tw_s, 0):
                cand = max(tw_s, remaining - 1)
                if cand < upper and (found is None or cand < found[0]):
                    found = (cand, s)
                continue
            rest = full & ~s
            while rest:
                low = rest & -rest
                i = low.bit_length() - 1
                rest ^= low
                val = max(tw_s, q(s, i))
                if val >= upper:
                    continue
                t = s | low
                if t not in best or val < best[t][0]:
                    best[t] = (val, s, i)
                    nxt[t] = None
        layer = list(nxt)
        if not layer:
            break
    if full in best and (found is None or best[full][0] <= found[0]):
        found = (best[full][0], full)
    if found is None:
        return None
    width, s = found
    tail = [v for i, v in enumerate(vertices) if not (s >> i) & 1]
    order = []
    while s:
        _, prev, i = best[s]
        order.append(vertices[i])
        s = prev
    order.reverse()
    return width, order + tail


def treewidth_exact(g: GaifmanGraph, cap: int = DEFAULT_EXACT_CAP) -> tuple[int, TreeDecomposition]:
    """True treewidth with a validated witness decomposition.

    ``cap`` bounds the size of each connected kernel left after the
    reduction rules; larger kernels raise :class:`CapExceeded`.
    """
    if not g.vertices:
        return 0, decomposition_from_ordering(g, [])
    low, _ = treewidth_bounds(g)
    adj = _adjacency(g)
    prefix, low = _reduce(adj, low)
    order = list(prefix)
    kernel = GaifmanGraph(tuple(v for v in g.vertices if v in adj),
                          frozenset(frozenset((u, v)) for u in adj for v in adj[u]))
    for comp in kernel.components():
        sub = kernel.subgraph(comp)
        heuristic = min_fill_ordering(sub)
        upper = ordering_width(sub, heuristic)
        comp_low = max(degeneracy_lower_bound(sub), 0)
        if upper <= max(low, comp_low):
            order.extend(heuristic)
            continue
        if len(comp) > cap:
            raise CapExceeded("treewidth kernel size", len(comp), cap)
        sub_adj = _adjacency(sub)
        res = _subset_dp(list(sub.vertices), sub_adj, upper)
        order.extend(heuristic if res is None else res[1])
    td = decomposition_from_ordering(g, order)
    return td.width, td


def treewidth(g: GaifmanGraph, cap: int = DEFAULT_EXACT_CAP) -> int:
    return treewidth_exact(g, cap)[0]
