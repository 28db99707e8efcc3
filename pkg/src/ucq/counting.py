"""Counting answers of CQs and UCQs in a database.

Several independent engines are provided so they can check each other:

* ``count_cq_bruteforce`` enumerates every assignment of the free variables
  and every extension of it.
* ``count_cq_backtracking`` runs an indexed backtracking search over the
  free variables and a memoized satisfiability search for the rest.
* ``count_cq_acyclic`` is join-tree dynamic programming for acyclic
  quantifier-free queries, linear in the database for a fixed query.
* ``count_ucq_direct`` counts the union of answer sets without
  inclusion-exclusion; ``count_ucq_expansion`` goes through the CQ expansion.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from operator import itemgetter

from .acyclicity import is_acyclic, join_forest
from .errors import CapExceeded, PreconditionError, SignatureError
from .homomorphisms import SearchPlan, exists_homomorphism, greedy_order
from .structures import ConjunctiveQuery, Structure, Ucq

DEFAULT_ASSIGNMENT_CAP = 10**7


class Method(str, enum.Enum):
    BRUTE_FORCE = "BruteForce"
    BACKTRACKING = "Backtracking"
    YANNAKAKIS = "Yannakakis"
    INCLUSION_EXCLUSION = "InclusionExclusion"
    DIRECT = "Direct"


@dataclass(frozen=True)
class AnswerCount:
    value: int
    method: Method

    def __int__(self):
        return self.value


def align(body: Structure, d: Structure) -> Structure:
    """``d`` extended with empty relations for query symbols it lacks.

    Raises :class:`SignatureError` when a symbol is used with two arities.
    """
    for name, arity in body.signature:
        other = d.signature.arities.get(name)
        if other is not None and other != arity:
            raise SignatureError(f"symbol {name} has arity {arity} in the query and {other} in the database")
    if body.signature.issubset(d.signature):
        return d
    return d.with_signature(body.signature)


def _split_isolated_free(q: ConjunctiveQuery):
    active = set(q.body.active_elements())
    return [x for x in q.free_order if x not in active]


# --- brute force ----------------------------------------------------------

def count_cq_bruteforce(q: ConjunctiveQuery, d: Structure, cap: int = DEFAULT_ASSIGNMENT_CAP) -> AnswerCount:
    d = align(q.body, d)
    n = len(d.universe)
    isolated = _split_isolated_free(q)
    free = [x for x in q.free_order if x not in isolated]
    quantified = q.quantified
    if n ** len(free) > cap:
        raise CapExceeded("free assignments", n ** len(free), cap)
    tuples = [(t, d.relations[r]) for r, ts in q.body.relations.items() for t in ts]
    total = 0
    for a in product(d.universe, repeat=len(free)):
        h = dict(zip(free, a))
        for b in product(d.universe, repeat=len(quantified)):
            h.update(zip(quantified, b))
            if all(tuple(h[e] for e in t) in rel for t, rel in tuples):
                total += 1
                break
    return AnswerCount(total * n ** len(isolated), Method.BRUTE_FORCE)


# --- backtracking ---------------------------------------------------------

def count_cq_backtracking(q: ConjunctiveQuery, d: Structure) -> AnswerCount:
    d = align(q.body, d)
    n = len(d.universe)
    isolated = _split_isolated_free(q)
    free = [x for x in q.free_order if x not in isolated]
    quantified = [y for y in q.quantified]
    order = greedy_order(q.body, d, groups=[free, quantified])
    plan = SearchPlan(q.body, d, order)
    f = len(free)
    total_steps = len(order)
    vals = [None] * total_steps
    factor = n ** len(isolated)
    if f == 0:
        found = plan.exists(vals, 0, total_steps)
        return AnswerCount(int(found) * factor, Method.BACKTRACKING)
    if f == total_steps:
        count = _count_last_level(plan, vals, f)
        return AnswerCount(count * factor, Method.BACKTRACKING)
    key_steps = sorted({b for s in range(f, total_steps)
                        for bound, _ in plan.constraints[s] for b in bound if b < f})
    memo: dict = {}
    count = 0
    for vals in plan.search(vals, 0, f):
        key = tuple(vals[i] for i in key_steps)
        hit = memo.get(key)
        if hit is None:
            hit = memo[key] = plan.exists(vals, f, total_steps)
        if hit:
            count += 1
    return AnswerCount(count * factor, Method.BACKTRACKING)


def _count_last_level(plan, vals, stop):
    """Count consistent assignments of steps ``0..stop-1``, summing the
    candidate set sizes at the last step instead of enumerating them."""
    if stop == 1:
        return len(plan.candidates(0, vals))
    total = 0
    for vals in plan.search(vals, 0, stop - 1):
        total += len(plan.candidates(stop - 1, vals))
    return total


# --- acyclic (join tree) --------------------------------------------------

def count_cq_acyclic(q: ConjunctiveQuery, d: Structure) -> AnswerCount:
    """Homomorphism count of an acyclic quantifier-free query.

    One bottom-up pass over the GYO join forest.  Each atom streams its
    tuples once: a tuple's weight is the product of the children's messages
    at its shared variables (zero drops it, the semi-join), and the weights
    are summed by the variables shared with the parent.  Only the messages
    are stored, so memory stays proportional to the shared-variable values.
    """
    if not q.is_quantifier_free():
        raise PreconditionError("count_cq_acyclic needs a quantifier-free query")
    if not is_acyclic(q.body):
        raise PreconditionError("count_cq_acyclic needs an acyclic query")
    forest = join_forest(q.body)
    if forest is None:
        raise PreconditionError("count_cq_acyclic needs an alpha-acyclic query")
    d = align(q.body, d)
    n = len(d.universe)
    isolated = _split_isolated_free(q)
    children: dict = defaultdict(list)
    for i in forest.order:
        if forest.parent[i] is not None:
            children[forest.parent[i]].append(i)
    messages: dict = {}
    total = 1
    for i in forest.order:
        name, t = forest.atoms[i]
        rows = d.relations[name]
        first = {}
        for pos, v in enumerate(t):
            first.setdefault(v, pos)
        if len(first) < len(t):
            rows = [row for row in rows if all(row[p] == row[first[v]] for p, v in enumerate(t))]
        incoming = []
        for c in children[i]:
            _, ct = forest.atoms[c]
            shared = sorted(v for v in first if v in ct)
            incoming.append((_key_function([first[v] for v in shared]), messages.pop(c)))
        p = forest.parent[i]
        if p is None:
            out = 0
        else:
            _, pt = forest.atoms[p]
            out_key = _key_function([first[v] for v in sorted(v for v in first if v in pt)])
            out = defaultdict(int)
        for row in rows:
            w = 1
            for key, message in incoming:
                w *= message.get(key(row), 0)
                if not w:
                    break
            else:
                if p is None:
                    out += w
                else:
                    out[out_key(row)] += w
        if p is None:
            total *= out
        else:
            messages[i] = out
    return AnswerCount(total * n ** len(isolated), Method.YANNAKAKIS)


def _key_function(positions):
    """Projection of a row onto ``positions``; a bare value for one position."""
    return itemgetter(*positions) if positions else (lambda row: ())


def count_cq(q: ConjunctiveQuery, d: Structure) -> AnswerCount:
    """Join-tree counting when it applies, backtracking otherwise."""
    if q.is_quantifier_free() and is_acyclic(q.body) and join_forest(q.body) is not None:
        return count_cq_acyclic(q, d)
    return count_cq_backtracking(q, d)


# --- unions ---------------------------------------------------------------

def count_ucq_direct(psi: Ucq, d: Structure, cap: int = DEFAULT_ASSIGNMENT_CAP) -> AnswerCount:
    """Number of free assignments that answer at least one disjunct.

    Depth-first over the free variables.  A value is rejected for a
    disjunct when some atom of that disjunct has no tuple with the value at
    the variable's position; a variable no remaining disjunct mentions is
    skipped with a factor ``|U(D)|``.  A disjunct is settled as soon as all
    free variables occurring in its atoms are assigned (one extension
    check); once some disjunct holds, every completion counts.  ``cap``
    bounds the number of search nodes.
    """
    for body in psi.disjuncts:
        d = align(body, d)
    values = list(d.universe)
    n = len(values)
    free = psi.free_order
    dis = []
    for body in psi.disjuncts:
        active = set(body.active_elements())
        occurring = [x for x in free if x in active]
        free_atoms = [(t, d.relations[r]) for r, ts in body.relations.items()
                      for t in ts if all(e in psi.free for e in t)]
        domains = {}
        for r, ts in body.relations.items():
            for t in ts:
                for p, e in enumerate(t):
                    if e in psi.free:
                        allowed = {row[p] for row in d.relations[r]}
                        domains[e] = domains[e] & allowed if e in domains else allowed
        dis.append((body, set(occurring), free_atoms, domains))
    # order: repeatedly take a variable of the disjunct closest to completion
    order: list = []
    remaining = [set(occ) for _, occ, _, _ in dis]
    while any(remaining):
        i = min((k for k in range(len(dis)) if remaining[k]), key=lambda k: (len(remaining[k]), k))
        x = min(remaining[i], key=lambda v: free.index(v))
        order.append(x)
        for r in remaining:
            r.discard(x)
    order += [x for x in free if x not in order]
    depth_of = {x: i for i, x in enumerate(order)}
    complete_at = [max((depth_of[x] for x in occ), default=-1) for _, occ, _, _ in dis]
    atom_checks = [[] for _ in order]
    for k, (_, _, atoms, _) in enumerate(dis):
        for t, rel in atoms:
            atom_checks[max(depth_of[e] for e in t)].append((k, t, rel))
    settle = [[] for _ in order]
    for k, c in enumerate(complete_at):
        if c >= 0:
            settle[c].append(k)
    mentions = [[k for k in range(len(dis)) if x in dis[k][1]] for x in order]
    memo: dict = {}
    nodes = 0

    def holds(k, a):
        body, occ, _, _ = dis[k]
        key = (k, tuple(sorted((x, a[x]) for x in occ)))
        if key not in memo:
            memo[key] = exists_homomorphism(body, d, {x: a[x] for x in occ})
        return memo[key]

    # disjuncts mentioning no free variable are decided up front
    alive = set(range(len(dis)))
    for k, c in enumerate(complete_at):
        if c < 0:
            if holds(k, {}):
                return AnswerCount(n ** len(free), Method.DIRECT)
            alive.discard(k)

    def dfs(depth, alive, a):
        nonlocal nodes
        if not alive or depth == len(order):
            return 0
        x = order[depth]
        if not any(k in alive for k in mentions[depth]):
            nodes += 1
            return n * dfs(depth + 1, alive, a)
        total = 0
        for v in values:
            nodes += 1
            if nodes > cap:
                raise CapExceeded("direct UCQ search nodes", nodes, cap)
            a[x] = v
            now = {k for k in alive if x not in dis[k][3] or v in dis[k][3][x]}
            for k, t, rel in atom_checks[depth]:
                if k in now and tuple(a[e] for e in t) not in rel:
                    now.discard(k)
            satisfied = False
            for k in settle[depth]:
                if k in now:
                    if holds(k, a):
                        satisfied = True
                        break
                    now.discard(k)
            if satisfied:
                total += n ** (len(order) - depth - 1)
            elif now:
                total += dfs(depth + 1, now, a)
        del a[x]
        return total

    return AnswerCount(dfs(0, alive, {}), Method.DIRECT)


def count_ucq_bruteforce(psi: Ucq, d: Structure, cap: int = DEFAULT_ASSIGNMENT_CAP) -> AnswerCount:
    """Enumerate every assignment of the free variables and test each
    disjunct by enumerating every extension.  Oracle only."""
    for body in psi.disjuncts:
        d = align(body, d)
    free = psi.free_order
    n = len(d.universe)
    if n ** len(free) > cap:
        raise CapExceeded("free assignments", n ** len(free), cap)
    checks = []
    for body in psi.disjuncts:
        quantified = [e for e in body.universe if e not in psi.free]
        tuples = [(t, d.relations[r]) for r, ts in body.relations.items() for t in ts]
        checks.append((quantified, tuples))

    def extends(h, quantified, tuples):
        for b in product(d.universe, repeat=len(quantified)):
            h.update(zip(quantified, b))
            if all(tuple(h[e] for e in t) in rel for t, rel in tuples):
                return True
        return False

    total = 0
    for a in product(d.universe, repeat=len(free)):
        h = dict(zip(free, a))
        if any(extends(h, quantified, tuples) for quantified, tuples in checks):
            total += 1
    return AnswerCount(total, Method.BRUTE_FORCE)


def count_ucq_expansion(psi: Ucq, d: Structure, table=None, jobs: int = 1, cq_counter=None) -> AnswerCount:
    """Sum of coefficient times answer count over the CQ expansion.

    ``cq_counter(q, d)`` counts a single term; :func:`count_cq` by default.
    """
    cq_counter = cq_counter or count_cq
    from .expansion import cq_expansion, Mode

    if table is None:
        mode = Mode.ISOMORPHISM_ONLY if psi.is_quantifier_free() else Mode.CORE_AND_ISOMORPHISM
        table = cq_expansion(psi, mode)
    src = table.source
    if src.signature != psi.signature or src.free != psi.free:
        raise PreconditionError("expansion table was built for a different UCQ (signature or free set differs)")
    for body in psi.disjuncts:
        d = align(body, d)
    entries = [e for e in table.entries if e.coefficient]
    if jobs > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(lambda e: cq_counter(e.query, d).value, entries))
    else:
        counts = [cq_counter(e.query, d).value for e in entries]
    total = sum(e.coefficient * c for e, c in zip(entries, counts))
    return AnswerCount(total, Method.INCLUSION_EXCLUSION)
