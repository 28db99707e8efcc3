"""Machine check of the complex-to-UCQ reduction contract."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .acyclicity import is_acyclic
from .canonical import canonical_form
from .errors import PreconditionError
from .expansion import DEFAULT_MAX_DISJUNCTS, Mode, combined_query, cq_expansion
from .simplicial import (DEFAULT_MAX_GROUND, Complex, build_stretched_clique,
                         reduced_euler_characteristic)
from .structures import ConjunctiveQuery, Ucq, is_self_join_free


@dataclass
class ContractItem:
    number: int
    name: str
    passed: bool
    value: object = None
    expected: object = None


@dataclass
class ContractReport:
    t: int
    k: int
    euler: int
    items: list = field(default_factory=list)

    @property
    def passed(self):
        return all(item.passed for item in self.items)


def infer_clique_shape(psi: Ucq, t: int | None = None):
    """``(t, k)`` such that the combined query could be ``K_t^k``.

    ``K_t^k`` has ``k * C(t,2)`` relation symbols and ``t + (k-1) * C(t,2)``
    elements; the difference of the two counts determines ``t``.
    """
    symbols = len(psi.signature)
    elements = len(combined_query(psi, range(len(psi))).body.universe)
    candidates = [t] if t is not None else range(2, symbols + 3)
    for tt in candidates:
        edges = comb(tt, 2)
        if edges and symbols % edges == 0:
            k = symbols // edges
            if k >= 1 and tt + (k - 1) * edges == elements:
                return tt, k
    raise PreconditionError(
        f"{symbols} symbols over {elements} elements is not the shape of a stretched clique"
        + (f" with t={t}" if t is not None else ""))


def verify_reduction(c: Complex, psi: Ucq, t: int | None = None,
                     max_ground: int = DEFAULT_MAX_GROUND,
                     max_disjuncts: int = DEFAULT_MAX_DISJUNCTS) -> ContractReport:
    """Check the five guarantees of a reduction output ``psi`` for ``c``."""
    t, k = infer_clique_shape(psi, t)
    euler = reduced_euler_characteristic(c, max_ground)
    report = ContractReport(t, k, euler)
    whole = combined_query(psi, range(len(psi)))
    clique = ConjunctiveQuery.quantifier_free(build_stretched_clique(t, k).structure)
    iso = psi.is_quantifier_free() and canonical_form(whole) == canonical_form(clique)
    report.items.append(ContractItem(1, f"combined query is K_{t}^{k}", iso))

    table = cq_expansion(psi, Mode.CORE_AND_ISOMORPHISM if not psi.is_quantifier_free()
                         else Mode.ISOMORPHISM_ONLY, max_disjuncts=max_disjuncts)
    coef = table.coefficient_of(whole)
    report.items.append(ContractItem(2, "coefficient of the combined query", coef == -euler, coef, -euler))

    whole_code = table.entry_for(whole).code if table.entry_for(whole) else None
    cyclic = [e for e in table.nonzero() if e.code != whole_code and not is_acyclic(e.query.body)]
    report.items.append(ContractItem(3, "other nonzero terms acyclic", not cyclic, len(cyclic), 0))

    report.items.append(ContractItem(4, "disjuncts at most ground size", len(psi) <= len(c.ground),
                                     len(psi), len(c.ground)))

    bad = [i + 1 for i, body in enumerate(psi.disjuncts)
           if not (is_acyclic(body) and is_self_join_free(body) and body.signature.max_arity() == 2)]
    report.items.append(ContractItem(5, "disjuncts acyclic, self-join-free, arity 2", not bad, bad, []))
    return report
