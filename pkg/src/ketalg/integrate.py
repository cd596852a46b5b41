"""Symbolic integration over real-line variables.

Two mechanisms eliminate an integration variable from a term:
delta elimination (int f(x) D[x-y] dx = f(y)) and recognition of
square-integrable wave-packet pairs (f*(x) g(x) -> <f|g>, with
<f|f> = 1 for unit-norm packets). Anything else diverges.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .errors import DivergentIntegralError
from .scalars import (
    AbsSquared,
    DeltaFunction,
    InnerProductFunction,
    NumberLiteral,
    ProductOfScalars,
    Scalar,
    SingleVarFunctionScalar,
    SumOfScalars,
    as_scalar,
    conjugate,
    expand,
    free_variables,
    product_of,
    replace_var,
    simplify,
    sum_of,
)


def _unfold_abs_squared(s: Scalar, variables: set) -> Scalar:
    """Rewrite |x|^2 back into x * x* wherever x mentions an integration
    variable, so pair recognition can see the conjugate factors."""
    if isinstance(s, AbsSquared):
        inner = _unfold_abs_squared(s.inner, variables)
        if free_variables(inner) & variables:
            return product_of([inner, conjugate(inner)])
        return AbsSquared(inner)
    if isinstance(s, SumOfScalars):
        return SumOfScalars([_unfold_abs_squared(t, variables) for t in s.terms])
    if isinstance(s, ProductOfScalars):
        return ProductOfScalars([_unfold_abs_squared(f, variables) for f in s.factors])
    return s


def _eliminate_deltas(factors: list, active: set) -> list:
    """Consume deltas whose arguments are integration variables,
    substituting the partner variable through the remaining factors."""
    while True:
        for i, f in enumerate(factors):
            if not isinstance(f, DeltaFunction):
                continue
            if f.var_a == f.var_b:
                raise DivergentIntegralError(
                    f"delta at zero argument: {f} (square of a delta?)")
            if f.var_a in active or f.var_b in active:
                if f.var_a in active:
                    gone, keep = f.var_a, f.var_b
                else:
                    gone, keep = f.var_b, f.var_a
                rest = factors[:i] + factors[i + 1:]
                factors = [replace_var(g, gone, keep) for g in rest]
                active.discard(gone)
                break
        else:
            return factors


def _recognize_pairs(factors: list, active: set) -> list:
    """Rewrite the f*(x) g(x) pair for each remaining integration variable;
    any other remaining dependence is divergent."""
    for v in sorted(active):
        dep = [f for f in factors if v in free_variables(f)]
        if not dep:
            continue
        ok = (len(dep) == 2
              and all(isinstance(f, SingleVarFunctionScalar) for f in dep)
              and all(f.var_name == v for f in dep)
              and dep[0].conjugated != dep[1].conjugated)
        if not ok:
            detail = ", ".join(str(f) for f in dep)
            raise DivergentIntegralError(
                f"cannot integrate out '{v}': no delta and no conjugate "
                f"function pair among [{detail}]")
        conj = dep[0] if dep[0].conjugated else dep[1]
        plain = dep[1] if dep[0].conjugated else dep[0]
        factors = [f for f in factors if f is not dep[0] and f is not dep[1]]
        if conj.func_name != plain.func_name:
            factors.append(InnerProductFunction(conj.func_name, plain.func_name))
        # f*(x) f(x) integrates to <f|f> = 1: nothing to append.
    return factors


def _integrate_term(term: Scalar, variables: set) -> Scalar:
    if isinstance(term, ProductOfScalars):
        factors = list(term.factors)
    else:
        factors = [term]
    factors.sort(key=Scalar.sort_key)
    active = set(variables)
    factors = _eliminate_deltas(factors, active)
    factors = _recognize_pairs(factors, active)
    if not factors:
        return NumberLiteral(1)
    return product_of(factors)


def integrate(s, variables: Optional[Iterable[str]] = None) -> Scalar:
    """Integrate out variables of an expression over the full real line.

    With ``variables`` omitted, every free variable is integrated.
    Per expanded term: deltas substitute their partner variable, remaining
    f*(x) g(x) pairs become <f|g> (or 1 when f == g), and terms without a
    given variable pass through unchanged. A variable that cannot be
    eliminated, a requested variable absent from the whole expression, or
    a delta at zero argument raises DivergentIntegralError.
    """
    s = as_scalar(s)
    free = free_variables(s)
    if variables is None:
        wanted = set(free)
    else:
        wanted = {str(v) for v in variables}
        missing = wanted - free
        if missing:
            raise DivergentIntegralError(
                "integration variable(s) appear nowhere in the expression: "
                + ", ".join(sorted(missing)))
    if not wanted:
        return simplify(s)
    body = expand(_unfold_abs_squared(as_scalar(s), wanted))
    terms = body.terms if isinstance(body, SumOfScalars) else [body]
    return simplify(sum_of([_integrate_term(t, wanted) for t in terms]))
