"""Canonical forms of conjunctive queries.

Color refinement on elements (colors fed by the symbols, positions and
colors of the tuples an element occurs in), then individualization of the
first non-singleton cell with automorphism pruning.  Isolated elements are
only counted.  Exact and deterministic; meant for universes of a few dozen
elements.
"""

from __future__ import annotations

import json

from .structures import ConjunctiveQuery, Structure, Ucq, natural_key


class _Canonizer:
    def __init__(self, body: Structure, free):
        free = set(free)
        active = body.active_elements()
        self.isolated_free = sum(1 for e in body.isolated_elements() if e in free)
        self.isolated_quantified = len(body.universe) - len(active) - self.isolated_free
        self.elements = active
        idx = {e: i for i, e in enumerate(active)}
        self.n = len(active)
        symbols = sorted((name for name, _ in body.signature if body.relations[name]), key=natural_key)
        self.symbols = [(name, body.signature.arity(name)) for name in symbols]
        self.atoms = []
        for si, name in enumerate(symbols):
            for t in body.relations[name]:
                self.atoms.append((si, tuple(idx[e] for e in t)))
        self.occurrences = [[] for _ in range(self.n)]
        for ai, (si, t) in enumerate(self.atoms):
            for p, e in enumerate(t):
                self.occurrences[e].append((si, p, ai))
        self.free_flags = [1 if e in free else 0 for e in active]
        self.best = None
        self.best_labeling = None
        self.automorphisms: list[list[int]] = []

    def refine(self, colors):
        """Iterate to a stable coloring; colors are ranks of label-free signatures."""
        n_classes = len(set(colors))
        while True:
            sigs = []
            for e in range(self.n):
                occ = sorted((si, p, tuple(colors[x] for x in self.atoms[ai][1]))
                             for si, p, ai in self.occurrences[e])
                sigs.append((colors[e], tuple(occ)))
            ranking = {s: r for r, s in enumerate(sorted(set(sigs)))}
            colors = [ranking[s] for s in sigs]
            k = len(ranking)
            if k == n_classes:
                return colors
            n_classes = k

    def code_for(self, colors):
        labeling = colors  # discrete: color is the label
        free = tuple(sorted(labeling[e] for e in range(self.n) if self.free_flags[e]))
        rels = {}
        for si, t in self.atoms:
            rels.setdefault(si, []).append(tuple(labeling[e] for e in t))
        body = tuple((name, arity, tuple(sorted(rels[si]))) for si, (name, arity) in enumerate(self.symbols))
        return (self.n, self.isolated_free, self.isolated_quantified, free, body)

    def search(self, colors, prefix):
        if len(set(colors)) == self.n:
            code = self.code_for(colors)
            if self.best is None or code < self.best:
                self.best, self.best_labeling = code, colors
            elif code == self.best:
                inverse = {lab: e for e, lab in enumerate(self.best_labeling)}
                self.automorphisms.append([inverse[colors[e]] for e in range(self.n)])
            return
        counts = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min(c for c, k in counts.items() if k > 1)
        cell = [e for e in range(self.n) if colors[e] == target]
        explored = []
        for e in cell:
            if explored and self._same_orbit(e, explored, prefix):
                continue
            explored.append(e)
            split = [2 * c + 1 for c in colors]
            split[e] = 2 * target
            self.search(self.refine(split), prefix + [e])

    def _same_orbit(self, e, explored, prefix):
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.automorphisms:
            if all(g[p] == p for p in prefix):
                for x in range(self.n):
                    a, b = find(x), find(g[x])
                    if a != b:
                        parent[a] = b
        root = find(e)
        return any(find(x) == root for x in explored)

    def run(self):
        if self.n == 0:
            self.best, self.best_labeling = self.code_for([]), []
        else:
            self.search(self.refine(list(self.free_flags)), [])
        return self.best, self.best_labeling


def canonical_code(body: Structure, free=()) -> tuple:
    """Canonical invariant as a nested tuple (comparable, hashable)."""
    return _Canonizer(body, free).run()[0]


def canonical_labeling(body: Structure, free=()) -> dict:
    """Map active elements to canonical labels ``0..n-1``."""
    c = _Canonizer(body, free)
    _, labeling = c.run()
    return {e: labeling[i] for i, e in enumerate(c.elements)}


def encode(code: tuple) -> bytes:
    return json.dumps(code, separators=(",", ":")).encode()


def canonical_form(q: ConjunctiveQuery) -> bytes:
    """Byte code equal for two queries iff they are isomorphic with the
    free sets corresponding."""
    return encode(canonical_code(q.body, q.free))


def ucq_canonical_form(psi: Ucq) -> bytes:
    """Canonical code of an ordered UCQ.

    Relation symbols are tagged with the disjunct position, so two UCQs get
    the same code iff one variable bijection fixing the free set maps every
    disjunct onto the disjunct at the same position.
    """
    atoms = []
    universe = list(psi.free_order)
    for i, d in enumerate(psi.disjuncts):
        universe.extend(d.universe)
        for name, t in d.atoms():
            atoms.append((f"{name}@{i}", t))
    tagged = Structure.from_atoms(atoms, universe=universe)
    return encode(["ucq", len(psi), canonical_code(tagged, psi.free)])
