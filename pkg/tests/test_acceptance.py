"""Acceptance gate: twelve criteria, each timed against its limit.

Every test prints one ``[acceptance] Cn PASS|FAIL`` line (shown even
without ``-s``) before asserting.
"""

import gc
import io
import json
import random
import time
from contextlib import redirect_stdout
from itertools import combinations

import pytest

from helpers import FIXTURES, GRAPH_SIG, answer_set, nx_isomorphic, random_cq, random_database, random_ucq
from ucq.analysis import counting_core
from ucq.canonical import canonical_form, ucq_canonical_form
from ucq.cli import main
from ucq.counting import (count_cq, count_cq_acyclic, count_cq_bruteforce, count_ucq_direct,
                          count_ucq_expansion)
from ucq.expansion import coefficient, meta_decide, wl_dimension
from ucq.fixtures import appendix_psi, appendix_psi_core, k34_query, psi1, psi2
from ucq.formats import parse_query
from ucq.simplicial import (build_stretched_clique, random_complex, reduce_complex_to_ucq,
                            reduce_to_irreducible, reduced_euler_characteristic)
from ucq.structures import (ConjunctiveQuery, GaifmanGraph, Signature, Structure, Ucq,
                            gaifman_graph, tensor_product)
from ucq.treewidth import treewidth_exact
from ucq.verification import verify_reduction


@pytest.fixture
def report(capsys):
    def _report(number, passed, seconds, limit, detail=""):
        ok = passed and seconds < limit
        with capsys.disabled():
            print(f"\n[acceptance] C{number} {'PASS' if ok else 'FAIL'} "
                  f"({seconds:.2f}s, limit {limit}s) {detail}".rstrip())
        assert passed, detail
        assert seconds < limit, f"took {seconds:.2f}s, limit {limit}s"
    return _report


def cli_json(*argv):
    out = io.StringIO()
    with redirect_stdout(out):
        code = main([str(a) for a in argv] + ["--json"])
    return code, json.loads(out.getvalue())


def test_c01_euler_characteristics(report):
    start = time.perf_counter()
    _, d1 = cli_json("complex", "euler", FIXTURES / "delta1.cx")
    _, d2 = cli_json("complex", "euler", FIXTURES / "delta2.cx")
    elapsed = time.perf_counter() - start
    values = (d1["euler"], d2["euler"])
    report(1, values == (-2, 0), elapsed, 1, f"euler={values}")


def test_c02_reduction_golden(report):
    start = time.perf_counter()
    _, r1 = cli_json("complex", "reduce", FIXTURES / "delta1.cx", "--t", 3)
    _, r2 = cli_json("complex", "reduce", FIXTURES / "delta2.cx", "--t", 3)
    ok1 = ucq_canonical_form(parse_query(r1["query"])) == ucq_canonical_form(psi1())
    ok2 = ucq_canonical_form(parse_query(r2["query"])) == ucq_canonical_form(psi2())
    elapsed = time.perf_counter() - start
    report(2, ok1 and ok2, elapsed, 1, f"delta1={ok1} delta2={ok2}")


def test_c03_coefficient_theorem(report):
    start = time.perf_counter()
    c1 = coefficient(psi1(), k34_query())
    c2 = coefficient(psi2(), k34_query())
    elapsed = time.perf_counter() - start
    report(3, (c1, c2) == (2, 0), elapsed, 5, f"coefficients={(c1, c2)}")


def test_c04_reduction_contract_random(report):
    start = time.perf_counter()
    rng = random.Random(4)
    checked = degenerate = 0
    failures = []
    shapes = set()
    while checked < 50:
        n = rng.randint(2, 6)
        # facets smaller than the ground set keep most draws off the degenerate branches
        c = random_complex(n, rng, max_size=rng.randint(1, max(1, n - 1)))
        res = reduce_complex_to_ucq(c, 3)
        if res.ucq is None:
            degenerate += 1
            if res.euler != reduced_euler_characteristic(c):
                failures.append(("euler branch", c))
            continue
        checked += 1
        shapes.add((len(res.ucq), res.clique.k))
        r = verify_reduction(c, res.ucq, 3)
        if not r.passed:
            failures.append((c, [i.number for i in r.items if not i.passed]))
    elapsed = time.perf_counter() - start
    report(4, not failures, elapsed, 120,
           f"{checked} reductions verified, {degenerate} degenerate, "
           f"max disjuncts {max(s[0] for s in shapes)}, max k {max(s[1] for s in shapes)}, failures={failures[:3]}")


def test_c05_meta(report):
    start = time.perf_counter()
    v1, v2 = meta_decide(psi1()), meta_decide(psi2())
    blocker = (len(v1.blocking_terms) == 1
               and canonical_form(v1.blocking_terms[0].query) == canonical_form(k34_query()))
    elapsed = time.perf_counter() - start
    ok = v2.linear_time and not v1.linear_time and blocker
    report(5, ok, elapsed, 5, f"psi2 linear={v2.linear_time} psi1 linear={v1.linear_time} blocker K_3^4={blocker}")


def test_c06_expansion_equals_direct(report):
    start = time.perf_counter()
    rng = random.Random(6)
    mismatches = []
    for i in range(100):
        psi = random_ucq(rng, max_disjuncts=4, max_vars=5, quantified=False)
        d = random_database(rng, 4, GRAPH_SIG)
        a = count_ucq_expansion(psi, d).value
        b = count_ucq_direct(psi, d).value
        if a != b:
            mismatches.append((i, a, b))
    elapsed = time.perf_counter() - start
    report(6, not mismatches, elapsed, 120, f"100 pairs, mismatches={mismatches[:3]}")


def test_c07_tensor_multiplicativity(report):
    start = time.perf_counter()
    rng = random.Random(7)
    mismatches = []
    for i in range(50):
        q = random_cq(rng, max_vars=5)
        d = random_database(rng, 4, GRAPH_SIG)
        b = random_database(rng, 4, GRAPH_SIG)
        lhs = count_cq(q, tensor_product(d, b)).value
        rhs = count_cq(q, d).value * count_cq(q, b).value
        if lhs != rhs:
            mismatches.append((i, lhs, rhs))
    elapsed = time.perf_counter() - start
    report(7, not mismatches, elapsed, 60, f"50 triples, mismatches={mismatches[:3]}")


def test_c08_euler_invariance(report):
    start = time.perf_counter()
    rng = random.Random(8)
    bad = []
    for i in range(200):
        c = random_complex(rng.randint(1, 8), rng)
        if reduced_euler_characteristic(reduce_to_irreducible(c)) != reduced_euler_characteristic(c):
            bad.append(i)
    elapsed = time.perf_counter() - start
    report(8, not bad, elapsed, 60, f"200 complexes, changed={bad[:5]}")


def _random_tree(rng, n):
    vs = [f"t{i}" for i in range(n)]
    edges = [frozenset((vs[i], vs[rng.randrange(i)])) for i in range(1, n)]
    return GaifmanGraph(tuple(vs), frozenset(edges))


def test_c09_treewidth_spot_checks(report):
    start = time.perf_counter()
    problems = []
    for t in (3, 4):
        for k in (1, 2, 3):
            g = gaifman_graph(build_stretched_clique(t, k).structure)
            w, td = treewidth_exact(g)
            if w != t - 1 or td.violations(g):
                problems.append(("K_t^k", t, k, w))
    rng = random.Random(9)
    for n in range(2, 21):
        g = _random_tree(rng, n)
        w, td = treewidth_exact(g)
        if w != 1 or td.violations(g):
            problems.append(("tree", n, w))
    for n in range(1, 9):
        vs = [f"k{i}" for i in range(n)]
        g = GaifmanGraph(tuple(vs), frozenset(frozenset(e) for e in combinations(vs, 2)))
        w, td = treewidth_exact(g)
        if w != n - 1 or td.violations(g):
            problems.append(("K_n", n, w))
    elapsed = time.perf_counter() - start
    report(9, not problems, elapsed, 30, f"problems={problems}")


def test_c10_core_correctness(report):
    start = time.perf_counter()
    problems = []
    cores = {}
    for k in range(2, 6):
        core = counting_core(appendix_psi(k))
        cores[k] = core
        if not nx_isomorphic(core, appendix_psi_core(k)):
            problems.append(("shape", k))
    rng = random.Random(10)
    sig = Signature.of({"E": 2})
    for i in range(50):
        d = random_database(rng, 4, sig)
        for k, core in cores.items():
            want = len(answer_set(Ucq.single(appendix_psi(k)), d))
            if count_cq_bruteforce(core, d).value != want or count_cq(core, d).value != want:
                problems.append(("answers", i, k))
    elapsed = time.perf_counter() - start
    report(10, not problems, elapsed, 60, f"problems={problems[:5]}")


def test_c11_wl_dimension(report):
    start = time.perf_counter()
    w2, w1 = wl_dimension(psi2()), wl_dimension(psi1())
    elapsed = time.perf_counter() - start
    report(11, (w2, w1) == (1, 2), elapsed, 5, f"wl(psi2)={w2} wl(psi1)={w1}")


SCALING_SIG = Signature.of({"E": 2, "F": 2, "U": 1})


def _scaling_query():
    atoms = [("E", ("x", "y")), ("F", ("y", "z")), ("E", ("z", "w")), ("U", ("w",)), ("F", ("y", "v"))]
    return ConjunctiveQuery.quantifier_free(Structure.from_atoms(atoms, signature=SCALING_SIG))


def _scaling_database(tuples, rng, domain=1000):
    """Exactly ``tuples`` facts over a fixed domain; doubling raises density,
    so the answer count grows much faster than the database."""
    elements = [f"e{i}" for i in range(domain)]
    u = {(e,) for e in elements}
    per = (tuples - domain) // 2
    rels = {"E": set(), "F": set(), "U": u}
    for name in ("E", "F"):
        target = per if name == "E" else tuples - domain - per
        while len(rels[name]) < target:
            rels[name].add((rng.choice(elements), rng.choice(elements)))
    return Structure(SCALING_SIG, tuple(elements), rels)


def test_c12_yannakakis_scaling(report):
    start = time.perf_counter()
    q = _scaling_query()
    rng = random.Random(12)
    sizes = [10_000 * 2 ** i for i in range(5)]
    databases = [_scaling_database(size, rng) for size in sizes]
    assert [d.tuple_count() for d in databases] == sizes
    samples = [[] for _ in sizes]
    # sizes interleaved round by round so machine drift hits all of them;
    # collector off and best-of-rounds, as timeit does
    gc.collect()
    gc.disable()
    try:
        for _ in range(9):
            for i, d in enumerate(databases):
                t0 = time.perf_counter()
                count_cq_acyclic(q, d)
                samples[i].append(time.perf_counter() - t0)
    finally:
        gc.enable()
    times = [min(ts) for ts in samples]
    ratios = [b / a for a, b in zip(times, times[1:])]
    elapsed = time.perf_counter() - start
    report(12, all(r <= 2.5 for r in ratios), elapsed, 120,
           "ratios=" + ", ".join(f"{r:.2f}" for r in ratios))
