"""Text formats for queries, databases and complexes.

Query file::

    FREE x1 x2
    CQ
    E(x1, y)
    E(y, x2)
    CQ
    E(x1, x2)

Database file: one fact ``R(a, b)`` per line, optional ``DOMAIN a b c``.
Complex file: ``GROUND 1 2 3 4`` then one ``FACET ...`` line per facet.
``#`` starts a comment; blank lines are ignored.
"""

from __future__ import annotations

import re
import warnings

from .errors import ParseError
from .simplicial import Complex
from .structures import Signature, Structure, Ucq, natural_key

IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
CONST = r"[A-Za-z0-9_]+"
_IDENT_RE = re.compile(IDENT + r"\Z")
_CONST_RE = re.compile(CONST + r"\Z")
_ATOM_RE = re.compile(r"\s*(" + IDENT + r")\s*\(([^()]*)\)\s*(?:,|&|∧)?")


def _lines(text):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield n, line


def _parse_atoms(line, lineno, token_re, what):
    atoms = []
    pos = 0
    while pos < len(line):
        if line[pos:].strip() == "":
            break
        m = _ATOM_RE.match(line, pos)
        if not m:
            raise ParseError(f"expected an atom like R({what}, ...)", lineno, pos + 1)
        name, args = m.group(1), m.group(2)
        terms = [a.strip() for a in args.split(",")] if args.strip() else []
        if not terms:
            raise ParseError(f"atom {name}() has no arguments", lineno, m.start(1) + 1)
        for term in terms:
            if not token_re.match(term):
                col = line.find(term, m.start(2)) + 1
                raise ParseError(f"invalid {what} {term!r}", lineno, col)
        atoms.append((name, tuple(terms), m.start(1) + 1))
        pos = m.end()
    return atoms


def _check_arity(arities, name, arity, lineno, col):
    if arities.setdefault(name, arity) != arity:
        raise ParseError(f"symbol {name} used with arity {arity}, earlier {arities[name]}", lineno, col)


def parse_query(text: str) -> Ucq:
    free = None
    blocks: list = []
    arities: dict = {}
    for lineno, line in _lines(text):
        head = line.split()[0]
        if head == "FREE":
            if free is not None:
                raise ParseError("second FREE line", lineno, 1)
            if blocks:
                raise ParseError("FREE must come before the first CQ", lineno, 1)
            names = line.split()[1:]
            for v in names:
                if not _IDENT_RE.match(v):
                    raise ParseError(f"invalid variable {v!r}", lineno, line.find(v) + 1)
            free = list(dict.fromkeys(names))
        elif head == "CQ":
            if free is None:
                raise ParseError("missing FREE line before CQ", lineno, 1)
            if line.strip() != "CQ":
                raise ParseError("CQ must stand on its own line", lineno, 1)
            blocks.append([])
        else:
            if not blocks:
                raise ParseError("atom outside a CQ block", lineno, 1)
            for name, terms, col in _parse_atoms(line, lineno, _IDENT_RE, "variable"):
                _check_arity(arities, name, len(terms), lineno, col)
                blocks[-1].append((name, terms))
    if free is None:
        raise ParseError("missing FREE line")
    if not blocks:
        raise ParseError("no CQ block")
    signature = Signature.of(arities)
    bodies = [Structure.from_atoms(atoms, universe=free, signature=signature) for atoms in blocks]
    return Ucq.build(bodies, free)


def serialize_query(psi: Ucq) -> str:
    lines = ["FREE" + "".join(" " + v for v in psi.free_order)]
    for body in psi.disjuncts:
        lines.append("CQ")
        for name, t in body.atoms():
            lines.append(f"{name}({', '.join(t)})")
    return "\n".join(lines) + "\n"


def parse_database(text: str) -> Structure:
    domain: list = []
    atoms: list = []
    arities: dict = {}
    for lineno, line in _lines(text):
        head = line.split()[0]
        if head == "DOMAIN":
            for c in line.split()[1:]:
                if not _CONST_RE.match(c):
                    raise ParseError(f"invalid constant {c!r}", lineno, line.find(c) + 1)
                domain.append(c)
            continue
        for name, terms, col in _parse_atoms(line, lineno, _CONST_RE, "constant"):
            _check_arity(arities, name, len(terms), lineno, col)
            atoms.append((name, terms))
    return Structure.from_atoms(atoms, universe=domain, signature=Signature.of(arities))


def serialize_database(d: Structure) -> str:
    for e in d.universe:
        if not _CONST_RE.match(e):
            raise ValueError(f"element {e!r} cannot be written as a constant")
    lines = ["DOMAIN " + " ".join(d.universe)] if d.universe else []
    lines += [f"{name}({', '.join(t)})" for name, t in d.atoms()]
    return "\n".join(lines) + "\n"


def parse_complex(text: str) -> Complex:
    ground = None
    facets = []
    for lineno, line in _lines(text):
        parts = line.split()
        head, items = parts[0], parts[1:]
        for it in items:
            if not _CONST_RE.match(it):
                raise ParseError(f"invalid element {it!r}", lineno, line.find(it) + 1)
        if head == "GROUND":
            if ground is not None:
                raise ParseError("second GROUND line", lineno, 1)
            ground = items
        elif head == "FACET":
            if ground is None:
                raise ParseError("FACET before GROUND", lineno, 1)
            outside = [it for it in items if it not in ground]
            if outside:
                raise ParseError(f"facet element {outside[0]!r} not in GROUND", lineno, line.find(outside[0]) + 1)
            facets.append(frozenset(items))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, 1)
    if not ground:
        raise ParseError("missing or empty GROUND line")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        c = Complex(tuple(ground), tuple(facets))
    for w in caught:
        warnings.warn(str(w.message), stacklevel=2)
    return c


def serialize_complex(c: Complex) -> str:
    lines = ["GROUND " + " ".join(c.ground)]
    for f in c.facets:
        lines.append("FACET " + " ".join(sorted(f, key=natural_key)))
    return "\n".join(lines) + "\n"


def read_text(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()
