"""Batch verification of all properties embedded in a specification."""

from __future__ import annotations

from ..diagnostics import Diagnostics
from ..lang.ast import AsmSpecification, Logic, PropertyDecl
from ..signature import extract_signature, typecheck_formula, typecheck_spec
from .ctl import Verdict, check_ctl
from .kripke import Limits, SpecNotWellTyped, build_kripke
from .ltl import check_ltl_bounded

DEFAULT_LTL_BOUND = 20


def verify_spec(
    spec: AsmSpecification, limits: Limits | None = None, ltl_bound: int = DEFAULT_LTL_BOUND
) -> list[tuple[PropertyDecl, Verdict | Diagnostics]]:
    """Build one state graph and check every embedded property in order.

    A property that fails to type-check contributes its diagnostics instead
    of a verdict; the remaining properties are still checked.
    """
    core = typecheck_spec(spec, include_properties=False)
    if core.has_errors():
        raise SpecNotWellTyped(core)
    sig = extract_signature(spec)
    ks = build_kripke(spec, limits)
    results: list[tuple[PropertyDecl, Verdict | Diagnostics]] = []
    for prop in spec.properties:
        checked = typecheck_formula(prop.formula, sig, prop.logic)
        if isinstance(checked, Diagnostics):
            results.append((prop, checked))
            continue
        if prop.logic is Logic.CTL:
            results.append((prop, check_ctl(ks, checked)))
        else:
            results.append((prop, check_ltl_bounded(ks, checked, ltl_bound)))
    return results
