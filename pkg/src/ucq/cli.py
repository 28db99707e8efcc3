"""Command-line interface: ``ucq analyze|expand|meta|count|complex|wl-dim|generate``.

Every report is built as one JSON-compatible dictionary.  ``--json`` prints
it as JSON; otherwise it is flattened to ``path: value`` lines, so both
renderings carry the same data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

from . import fixtures
from .acyclicity import is_acyclic
from .analysis import classify_cq
from .counting import (count_cq, count_cq_acyclic, count_cq_backtracking,
                       count_cq_bruteforce, count_ucq_direct, count_ucq_expansion)
from .errors import UcqError
from .expansion import (DEFAULT_MAX_DISJUNCTS, TRIANGLE_CONJECTURE, Mode, cq_expansion,
                        meta_decide, subset_label, wl_dimension)
from .formats import (parse_complex, parse_database, parse_query, read_text,
                      serialize_complex, serialize_database, serialize_query)
from .simplicial import (DEFAULT_MAX_GROUND, build_stretched_clique, reduce_complex_to_ucq,
                         reduced_euler_by_facets, reduced_euler_characteristic, FACET_CROSSCHECK_CAP)
from .structures import ConjunctiveQuery, Ucq, natural_key
from .verification import verify_reduction

DEFAULT_MAX_UNIVERSE = 20
EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2


# --- rendering ------------------------------------------------------------

def query_json(q: ConjunctiveQuery) -> dict:
    return {
        "free": q.free_order,
        "quantified": sorted(q.quantified, key=natural_key),
        "atoms": [f"{name}({', '.join(t)})" for name, t in q.body.atoms()],
    }


def _scalar(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def flatten(payload, prefix=""):
    """``[(path, text)]`` for every leaf; empty containers become ``[]``/``{}``."""
    rows = []
    if isinstance(payload, dict):
        if not payload and prefix:
            rows.append((prefix, "{}"))
        for key, value in payload.items():
            rows += flatten(value, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(payload, list):
        if not payload:
            rows.append((prefix, "[]"))
        for i, value in enumerate(payload, start=1):
            rows += flatten(value, f"{prefix}.{i}")
    else:
        rows.append((prefix, _scalar(payload)))
    return rows


def render_table(payload) -> str:
    return "\n".join(f"{path}: {text}" for path, text in flatten(payload)) + "\n"


def emit(args, payload, out=None):
    out = out or sys.stdout
    if args.json:
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(render_table(payload))


# --- commands -------------------------------------------------------------

def _load_query(path) -> Ucq:
    return parse_query(read_text(path))


def cmd_analyze(args):
    psi = _load_query(args.query)
    reports = []
    for i, q in enumerate(psi.queries(), start=1):
        r = classify_cq(q, bound=args.bound, core_cap=args.max_universe, tw_cap=args.max_universe)
        reports.append({
            "disjunct": i,
            "query": query_json(q),
            "acyclic": r.acyclic,
            "treewidth": r.treewidth,
            "contract_treewidth": r.contract_treewidth,
            "is_minimal": r.is_minimal,
            "core": query_json(r.core) if r.core is not None else None,
            "core_treewidth": r.core_treewidth,
            "core_contract_treewidth": r.core_contract_treewidth,
            "self_join_free": r.self_join_free,
            "degree_of_freedom": r.degree_of_freedom,
            "bound": r.bound,
            "classification": r.classification,
            "errors": dict(r.errors),
        })
    emit(args, {"command": "analyze", "file": args.query, "disjuncts": reports})
    return EXIT_OK


def _expansion(args, psi, mode=None):
    return cq_expansion(psi, mode, keep_zeros=getattr(args, "keep_zeros", False),
                        max_disjuncts=args.max_disjuncts, core_cap=args.max_universe, jobs=args.jobs)


def cmd_expand(args):
    psi = _load_query(args.query)
    table = _expansion(args, psi, args.mode)
    entries = []
    for e in table.entries:
        entries.append({
            "coefficient": e.coefficient,
            "acyclic": is_acyclic(e.query.body),
            "elements": len(e.query.body.universe),
            "query": query_json(e.query),
            "witnesses": [subset_label(s) for s in e.witness_subsets],
        })
    emit(args, {"command": "expand", "file": args.query, "mode": table.mode.value,
                "disjuncts": len(psi), "entries": entries})
    return EXIT_OK


def cmd_meta(args):
    psi = _load_query(args.query)
    table = _expansion(args, psi, Mode.ISOMORPHISM_ONLY)
    verdict = meta_decide(psi, table)
    emit(args, {
        "command": "meta",
        "file": args.query,
        "assumption": f"verdict {TRIANGLE_CONJECTURE}",
        "linear_time": verdict.linear_time,
        "blocking_terms": [query_json(e.query) for e in verdict.blocking_terms],
        "caveat": verdict.caveat,
    })
    return EXIT_OK if verdict.linear_time else EXIT_NO


_CQ_ENGINES = {
    "brute": count_cq_bruteforce,
    "backtrack": count_cq_backtracking,
    "yannakakis": count_cq_acyclic,
}


def cmd_count(args):
    psi = _load_query(args.query)
    d = parse_database(read_text(args.database))
    engine = args.engine
    if engine == "expansion" or (len(psi) > 1 and engine in ("auto", "backtrack", "yannakakis")):
        counter = count_cq if engine in ("auto", "expansion") else _CQ_ENGINES[engine]
        table = _expansion(args, psi)
        result = count_ucq_expansion(psi, d, table, jobs=args.jobs or 1, cq_counter=counter)
    elif len(psi) > 1:
        result = count_ucq_direct(psi, d)
    else:
        q = psi.disjunct(0)
        result = count_cq(q, d) if engine == "auto" else _CQ_ENGINES[engine](q, d)
    emit(args, {"command": "count", "engine": engine, "method": result.method.value, "count": result.value})
    return EXIT_OK


def cmd_wl_dim(args):
    psi = _load_query(args.query)
    value = wl_dimension(psi, tw_cap=args.max_universe, max_disjuncts=args.max_disjuncts, jobs=args.jobs)
    emit(args, {"command": "wl-dim", "file": args.query, "wl_dimension": value})
    return EXIT_OK


def cmd_complex_euler(args):
    c = parse_complex(read_text(args.complex))
    value = reduced_euler_characteristic(c, args.max_ground)
    check = reduced_euler_by_facets(c) if len(c.facets) <= FACET_CROSSCHECK_CAP else None
    if check is not None and check != value:
        raise UcqError(f"internal mismatch: faces give {value}, facets give {check}")
    emit(args, {"command": "complex euler", "file": args.complex, "euler": value, "facet_check": check})
    return EXIT_OK


def _reduce_payload(args, c):
    res = reduce_complex_to_ucq(c, args.t, args.max_ground)
    payload = {
        "command": "complex reduce",
        "branch": "euler" if res.ucq is None else "ucq",
        "euler": res.euler,
        "t": args.t,
        "k": None if res.clique is None else res.clique.k,
        "reduced_ground": " ".join(res.reduced.ground),
        "reduced_facets": [" ".join(f) for f in res.reduced.sorted_facets()],
        "query": None if res.ucq is None else serialize_query(res.ucq),
    }
    return payload, res


def cmd_complex_reduce(args):
    c = parse_complex(read_text(args.complex))
    payload, res = _reduce_payload(args, c)
    if args.json:
        text = json.dumps(payload, indent=2) + "\n"
    else:
        header = {key: value for key, value in payload.items() if key != "query"}
        text = "".join(f"# {line}\n" for line in render_table(header).splitlines())
        text += payload["query"] or ""
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _read_reduce_output(text):
    """``(psi, euler)`` from the output of ``complex reduce`` (either rendering)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        return (parse_query(data["query"]) if data.get("query") else None), data.get("euler")
    euler = None
    for line in text.splitlines():
        if line.startswith("# euler:"):
            value = line.split(":", 1)[1].strip()
            euler = None if value == "-" else int(value)
    has_query = any(line.split("#", 1)[0].strip().startswith("FREE") for line in text.splitlines())
    return (parse_query(text) if has_query else None), euler


def cmd_complex_verify(args):
    c = parse_complex(read_text(args.complex))
    text = None
    if args.ucq == "-":
        text = sys.stdin.read()
    elif args.ucq:
        text = read_text(args.ucq)
    elif not sys.stdin.isatty():
        text = sys.stdin.read()
    if not text or not text.strip():
        text = _reduce_payload(args, c)[0]["query"]
        if text is None:
            text = f"# euler: {reduce_complex_to_ucq(c, args.t, args.max_ground).euler}\n"
    psi, claimed = _read_reduce_output(text)
    euler = reduced_euler_characteristic(c, args.max_ground)
    if psi is None:
        passed = claimed == euler
        emit(args, {"command": "complex verify", "branch": "euler", "euler": euler,
                    "claimed": claimed, "passed": passed})
        return EXIT_OK if passed else EXIT_NO
    report = verify_reduction(c, psi, args.t_given, args.max_ground, args.max_disjuncts)
    emit(args, {
        "command": "complex verify",
        "branch": "ucq",
        "t": report.t,
        "k": report.k,
        "euler": report.euler,
        "passed": report.passed,
        "items": [{"item": it.number, "name": it.name, "passed": it.passed,
                   "value": it.value, "expected": it.expected}
                  for it in report.items],
    })
    return EXIT_OK if report.passed else EXIT_NO


def _write(out_dir, name, text, written):
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    written.append(path)


def generate_files(family, out_dir, k=None, t=None, n=None, seed=None) -> list:
    """Write the files of ``family`` into ``out_dir``; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    written: list = []
    if family == "figure1":
        _write(out_dir, "delta1.cx", serialize_complex(fixtures.delta1()), written)
        _write(out_dir, "delta2.cx", serialize_complex(fixtures.delta2()), written)
    elif family == "figure2":
        for subset in fixtures.FIGURE2_SUBSETS:
            q = fixtures.s_query(subset)
            _write(out_dir, fixtures.subset_name(subset) + ".ucq", serialize_query(Ucq.single(q)), written)
        _write(out_dir, "psi1.ucq", serialize_query(fixtures.psi1()), written)
        _write(out_dir, "psi2.ucq", serialize_query(fixtures.psi2()), written)
        _write(out_dir, "k34.ucq", serialize_query(Ucq.single(fixtures.k34_query())), written)
        _write(out_dir, "k34.db", serialize_database(fixtures.k34_database()), written)
    elif family == "appendix-phi":
        _write(out_dir, f"phi_k{k}.ucq", serialize_query(fixtures.appendix_phi_union(k)), written)
    elif family == "appendix-psi":
        _write(out_dir, f"psi_k{k}.ucq", serialize_query(Ucq.single(fixtures.appendix_psi(k))), written)
    elif family == "stretched-clique":
        sc = build_stretched_clique(t, k)
        q = ConjunctiveQuery.quantifier_free(sc.structure)
        _write(out_dir, f"clique_t{t}_k{k}.ucq", serialize_query(Ucq.single(q)), written)
        _write(out_dir, f"clique_t{t}_k{k}.db", serialize_database(sc.structure), written)
    elif family == "random-complex":
        c = fixtures.seeded_random_complex(n, seed)
        _write(out_dir, f"random_n{n}_s{seed}.cx", serialize_complex(c), written)
    else:
        raise UcqError(f"unknown family {family!r}")
    return written


def cmd_generate(args):
    files = generate_files(args.family, args.out, k=args.k, t=args.t, n=args.n, seed=args.seed)
    emit(args, {"command": "generate", "family": args.family, "files": files})
    return EXIT_OK


# --- parser ---------------------------------------------------------------

def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--max-disjuncts", type=_positive, default=DEFAULT_MAX_DISJUNCTS)
    common.add_argument("--max-universe", type=_positive, default=DEFAULT_MAX_UNIVERSE,
                        help="cap for exact treewidth and #core search")
    common.add_argument("--max-ground", type=_positive, default=DEFAULT_MAX_GROUND)
    common.add_argument("--jobs", type=_positive, default=None,
                        help="worker count (default: $UCQ_JOBS or 1)")

    parser = argparse.ArgumentParser(prog="ucq", description="Analyze unions of conjunctive queries.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="structural report per disjunct")
    p.add_argument("query")
    p.add_argument("--bound", type=int, default=None, help="width bound for the PolyTime/Hard label")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("expand", parents=[common], help="CQ expansion with coefficients")
    p.add_argument("query")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    p.add_argument("--keep-zeros", action="store_true")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("meta", parents=[common], help="linear-time countability (exit 0 yes, 1 no, 2 error)")
    p.add_argument("query")
    p.set_defaults(func=cmd_meta)

    p = sub.add_parser("count", parents=[common], help="count answers in a database")
    p.add_argument("query")
    p.add_argument("database")
    p.add_argument("--engine", choices=["auto", "brute", "backtrack", "yannakakis", "expansion"], default="auto")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("wl-dim", parents=[common], help="WL-dimension of a quantifier-free UCQ")
    p.add_argument("query")
    p.set_defaults(func=cmd_wl_dim)

    p = sub.add_parser("complex", help="simplicial complex tools")
    csub = p.add_subparsers(dest="action", required=True)
    q = csub.add_parser("euler", parents=[common], help="reduced Euler characteristic")
    q.add_argument("complex")
    q.set_defaults(func=cmd_complex_euler)
    q = csub.add_parser("reduce", parents=[common], help="emit the UCQ (or the Euler value)")
    q.add_argument("complex")
    q.add_argument("--t", type=int, default=3)
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_complex_reduce)
    q = csub.add_parser("verify", parents=[common], help="check a reduce output against the complex")
    q.add_argument("complex")
    q.add_argument("--ucq", default=None, help="reduce output to check ('-' for stdin)")
    q.add_argument("--t", type=int, default=None, dest="t_given")
    q.set_defaults(func=cmd_complex_verify)

    p = sub.add_parser("generate", parents=[common], help="write fixture files")
    p.add_argument("family", choices=["figure1", "figure2", "appendix-phi", "appendix-psi",
                                      "stretched-clique", "random-complex"])
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_generate)
    return parser


_REQUIRED = {
    "appendix-phi": ("k",),
    "appendix-psi": ("k",),
    "stretched-clique": ("t", "k"),
    "random-complex": ("n",),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "generate":
        missing = [f"--{name}" for name in _REQUIRED.get(args.family, ()) if getattr(args, name) is None]
        if missing:
            parser.error(f"{args.family} needs {' '.join(missing)}")
    if args.command == "complex" and args.action == "verify":
        args.t = args.t_given if args.t_given is not None else 3
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            return args.func(args)
    except (UcqError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
