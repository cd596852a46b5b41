"""Symbolic scalar expressions: amplitudes built from numbers, variables,
wave-packet functions, delta distributions, and their sums and products.

All values are immutable; every operation returns a new expression.
"""

from __future__ import annotations

import cmath
import itertools
from typing import Iterable, Union

from .errors import NotNumericError

#: Magnitudes below this count as zero when pruning during simplification.
ZERO_TOLERANCE = 1e-12

Number = Union[int, float, complex]


def _normalize_number(value):
    if isinstance(value, bool):
        return int(value)
    if type(value) in (int, float, complex):
        return value
    # numpy scalars and other numeric subclasses
    if isinstance(value, int):
        return int(value)
    if isinstance(value, float):
        return float(value)
    if isinstance(value, complex):
        return complex(value)
    raise TypeError(f"not a number: {value!r}")


class Scalar:
    """Base class of the scalar expression tree.

    Equality and hashing compare canonical simplified forms, so two
    expressions are equal exactly when they simplify to the same tree.
    """

    __slots__ = ("_key", "_simplified")

    def __init__(self):
        self._key = None
        self._simplified = None

    def sort_key(self):
        """Total order key: (variant rank, canonical payload).

        Delta-distribution arguments are sorted inside the key so that
        D[w-v] and D[v-w] share one key, matching their symmetric equality.
        """
        if self._key is None:
            self._key = self._make_key()
        return self._key

    def _make_key(self):
        raise NotImplementedError

    # -- algebra ----------------------------------------------------------

    def conjugate(self) -> "Scalar":
        return conjugate(self)

    def simplify(self) -> "Scalar":
        return simplify(self)

    def expand(self) -> "Scalar":
        return expand(self)

    def replace_var(self, old=None, new=None) -> "Scalar":
        return replace_var(self, old, new)

    def free_variables(self) -> set:
        return free_variables(self)

    # -- operators ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Scalar) or _is_number_like(other):
            return add(self, other)
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, Scalar) or _is_number_like(other):
            return multiply(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if _is_number_like(other):
            return multiply(other, self)
        return NotImplemented

    def __neg__(self):
        return multiply(NumberLiteral(-1), self)

    def __sub__(self, other):
        # Symbolic subtraction is not defined; only numbers can be negated.
        if _is_number_like(other):
            return add(self, NumberLiteral(-_normalize_number(other)))
        if isinstance(other, NumberLiteral):
            return add(self, NumberLiteral(-other.value))
        return NotImplemented

    def __rsub__(self, other):
        if _is_number_like(other):
            return add(other, multiply(NumberLiteral(-1), self))
        return NotImplemented

    def __truediv__(self, other):
        # Division only by a nonzero number (multiplication by reciprocal).
        if isinstance(other, NumberLiteral):
            other = other.value
        if _is_number_like(other):
            value = _normalize_number(other)
            if value == 0:
                raise ZeroDivisionError("scalar division by zero")
            return multiply(self, NumberLiteral(1 / value))
        return NotImplemented

    def __eq__(self, other):
        if _is_number_like(other):
            other = NumberLiteral(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return simplify(self).sort_key() == simplify(other).sort_key()

    def __hash__(self):
        return hash(simplify(self).sort_key())


def _is_number_like(value) -> bool:
    return isinstance(value, (int, float, complex)) and not isinstance(value, Scalar)


def as_scalar(value) -> Scalar:
    """Coerce a plain number to a NumberLiteral; pass scalars through."""
    if isinstance(value, Scalar):
        return value
    return NumberLiteral(_normalize_number(value))


class NumberLiteral(Scalar):
    """A literal complex number; must be finite."""

    __slots__ = ("value",)

    def __init__(self, value: Number):
        super().__init__()
        value = _normalize_number(value)
        if not cmath.isfinite(complex(value)):
            raise ValueError(f"number literal must be finite, got {value!r}")
        self.value = value

    def _make_key(self):
        c = complex(self.value)
        return (0, (c.real, c.imag))

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"NumberLiteral({self.value!r})"


class Variable(Scalar):
    """A named complex-valued symbol, optionally conjugated."""

    __slots__ = ("name", "conjugated")

    def __init__(self, name: str, conjugated: bool = False):
        super().__init__()
        if not name:
            raise ValueError("variable name must be non-empty")
        self.name = name
        self.conjugated = bool(conjugated)

    def _make_key(self):
        return (1, (self.name, self.conjugated))

    def __str__(self):
        return f"({self.name}*)" if self.conjugated else self.name

    def __repr__(self):
        if self.conjugated:
            return f"Variable({self.name!r}, conjugated=True)"
        return f"Variable({self.name!r})"


class AbsSquared(Scalar):
    """|x|^2 of an inner expression; always real and non-negative."""

    __slots__ = ("inner",)

    def __init__(self, inner: Scalar):
        super().__init__()
        self.inner = as_scalar(inner)

    def _make_key(self):
        return (2, (self.inner.sort_key(),))

    def __str__(self):
        return f"|{self.inner}|^2"

    def __repr__(self):
        return f"AbsSquared({self.inner!r})"


class SingleVarFunctionScalar(Scalar):
    """A wave-packet function of one variable, e.g. phi(w) or phi*(w)."""

    __slots__ = ("func_name", "var_name", "conjugated")

    def __init__(self, func_name: str, var_name: str, conjugated: bool = False):
        super().__init__()
        if not func_name or not var_name:
            raise ValueError("function and variable names must be non-empty")
        self.func_name = func_name
        self.var_name = var_name
        self.conjugated = bool(conjugated)

    def _make_key(self):
        return (3, (self.func_name, self.var_name, self.conjugated))

    def __str__(self):
        star = "*" if self.conjugated else ""
        return f"{self.func_name}{star}({self.var_name})"

    def __repr__(self):
        if self.conjugated:
            return (f"SingleVarFunctionScalar({self.func_name!r}, "
                    f"{self.var_name!r}, conjugated=True)")
        return f"SingleVarFunctionScalar({self.func_name!r}, {self.var_name!r})"


class InnerProductFunction(Scalar):
    """The overlap <f|g> of two named wave-packet functions."""

    __slots__ = ("left_func", "right_func")

    def __init__(self, left_func: str, right_func: str):
        super().__init__()
        if not left_func or not right_func:
            raise ValueError("function names must be non-empty")
        self.left_func = left_func
        self.right_func = right_func

    def _make_key(self):
        return (4, (self.left_func, self.right_func))

    def __str__(self):
        return f"<{self.left_func}|{self.right_func}>"

    def __repr__(self):
        return f"InnerProductFunction({self.left_func!r}, {self.right_func!r})"


class DeltaFunction(Scalar):
    """A delta distribution D[a-b].

    Equality and hashing are symmetric in the two arguments (the delta is
    even); rendering keeps the construction order so bra variables print
    before ket variables, e.g. "D[w-v]".
    """

    __slots__ = ("var_a", "var_b")

    def __init__(self, var_a: str, var_b: str):
        super().__init__()
        if not var_a or not var_b:
            raise ValueError("delta arguments must be non-empty")
        self.var_a = var_a
        self.var_b = var_b

    def _make_key(self):
        return (7, tuple(sorted((self.var_a, self.var_b))))

    def __str__(self):
        return f"D[{self.var_a}-{self.var_b}]"

    def __repr__(self):
        return f"DeltaFunction({self.var_a!r}, {self.var_b!r})"


class SumOfScalars(Scalar):
    """A sum of scalar terms; never empty."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable):
        super().__init__()
        self.terms = tuple(as_scalar(t) for t in terms)
        if not self.terms:
            raise ValueError("empty sum is forbidden; use NumberLiteral(0)")

    def _make_key(self):
        return (5, tuple(sorted(t.sort_key() for t in self.terms)))

    def __iter__(self):
        return iter(self.terms)

    def __str__(self):
        return "(" + " + ".join(str(t) for t in self.terms) + ")"

    def __repr__(self):
        return f"SumOfScalars([{', '.join(repr(t) for t in self.terms)}])"


class ProductOfScalars(Scalar):
    """A product of scalar factors; never empty. All scalars commute."""

    __slots__ = ("factors",)

    def __init__(self, factors: Iterable):
        super().__init__()
        self.factors = tuple(as_scalar(f) for f in factors)
        if not self.factors:
            raise ValueError("empty product is forbidden; use NumberLiteral(1)")

    def _make_key(self):
        return (6, tuple(sorted(f.sort_key() for f in self.factors)))

    def __iter__(self):
        return iter(self.factors)

    def __str__(self):
        return "*".join(str(f) for f in self.factors)

    def __repr__(self):
        return f"ProductOfScalars([{', '.join(repr(f) for f in self.factors)}])"


_ATOMS = (NumberLiteral, Variable, SingleVarFunctionScalar,
          InnerProductFunction, DeltaFunction)


# -- construction helpers ---------------------------------------------------


def sum_of(terms) -> Scalar:
    """Build a flattened sum node; empty input gives NumberLiteral(0)."""
    flat = []
    for t in terms:
        t = as_scalar(t)
        if isinstance(t, SumOfScalars):
            flat.extend(t.terms)
        else:
            flat.append(t)
    if not flat:
        return NumberLiteral(0)
    if len(flat) == 1:
        return flat[0]
    return SumOfScalars(flat)


def product_of(factors) -> Scalar:
    """Build a flattened product node; empty input gives NumberLiteral(1)."""
    flat = []
    for f in factors:
        f = as_scalar(f)
        if isinstance(f, ProductOfScalars):
            flat.extend(f.factors)
        else:
            flat.append(f)
    if not flat:
        return NumberLiteral(1)
    if len(flat) == 1:
        return flat[0]
    return ProductOfScalars(flat)


def add(a, b) -> Scalar:
    """Sum of two scalars, folding literal numbers eagerly."""
    a, b = as_scalar(a), as_scalar(b)
    if isinstance(a, NumberLiteral) and isinstance(b, NumberLiteral):
        return NumberLiteral(a.value + b.value)
    if isinstance(a, NumberLiteral) and a.value == 0:
        return b
    if isinstance(b, NumberLiteral) and b.value == 0:
        return a
    return sum_of([a, b])


def _conjugate_pair_base(a: Scalar, b: Scalar):
    """Return the unconjugated atom if a and b differ only in the
    conjugated flag, else None."""
    if type(a) is not type(b):
        return None
    if isinstance(a, Variable):
        if a.name == b.name and a.conjugated != b.conjugated:
            return Variable(a.name)
    elif isinstance(a, SingleVarFunctionScalar):
        if (a.func_name == b.func_name and a.var_name == b.var_name
                and a.conjugated != b.conjugated):
            return SingleVarFunctionScalar(a.func_name, a.var_name)
    return None


def multiply(a, b) -> Scalar:
    """Product of two scalars.

    Literal numbers fold eagerly and x * conjugate(x) is recognised as
    |x|^2 for atoms carrying a conjugated flag.
    """
    a, b = as_scalar(a), as_scalar(b)
    if isinstance(a, NumberLiteral) and isinstance(b, NumberLiteral):
        return NumberLiteral(a.value * b.value)
    for num, other in ((a, b), (b, a)):
        if isinstance(num, NumberLiteral):
            if num.value == 0:
                return NumberLiteral(0)
            if num.value == 1:
                return other
    base = _conjugate_pair_base(a, b)
    if base is not None:
        return AbsSquared(base)
    return product_of([a, b])


# -- conjugation ------------------------------------------------------------


def conjugate(s) -> Scalar:
    """Complex conjugate of an expression.

    Deltas and |x|^2 are real and unchanged; <f|g> swaps to <g|f>; sums
    and products map element-wise (order preserved).
    """
    s = as_scalar(s)
    if isinstance(s, NumberLiteral):
        return NumberLiteral(s.value.conjugate())
    if isinstance(s, Variable):
        return Variable(s.name, not s.conjugated)
    if isinstance(s, SingleVarFunctionScalar):
        return SingleVarFunctionScalar(s.func_name, s.var_name, not s.conjugated)
    if isinstance(s, InnerProductFunction):
        return InnerProductFunction(s.right_func, s.left_func)
    if isinstance(s, (DeltaFunction, AbsSquared)):
        return s
    if isinstance(s, SumOfScalars):
        return SumOfScalars([conjugate(t) for t in s.terms])
    if isinstance(s, ProductOfScalars):
        return ProductOfScalars([conjugate(f) for f in s.factors])
    raise TypeError(f"cannot conjugate {type(s).__name__}")


# -- expansion ---------------------------------------------------------------


def expand(s) -> Scalar:
    """Distribute all products over sums (no sum remains under a product)."""
    s = as_scalar(s)
    if isinstance(s, _ATOMS):
        return s
    if isinstance(s, AbsSquared):
        return AbsSquared(expand(s.inner))
    if isinstance(s, SumOfScalars):
        return sum_of([expand(t) for t in s.terms])
    if isinstance(s, ProductOfScalars):
        choice_lists = []
        for f in s.factors:
            fe = expand(f)
            if isinstance(fe, SumOfScalars):
                choice_lists.append(list(fe.terms))
            else:
                choice_lists.append([fe])
        if all(len(c) == 1 for c in choice_lists):
            return product_of([c[0] for c in choice_lists])
        terms = [product_of(combo) for combo in itertools.product(*choice_lists)]
        return sum_of(terms)
    raise TypeError(f"cannot expand {type(s).__name__}")


# -- simplification ----------------------------------------------------------


def _is_zero_number(s: Scalar) -> bool:
    return isinstance(s, NumberLiteral) and abs(s.value) < ZERO_TOLERANCE


def _merge_conjugate_pairs(factors):
    """Rewrite x, x* factor pairs into a single AbsSquared(x)."""
    out = []
    for f in factors:
        if isinstance(f, (Variable, SingleVarFunctionScalar)):
            for i, g in enumerate(out):
                base = _conjugate_pair_base(f, g) if type(g) is type(f) else None
                if base is not None:
                    out[i] = AbsSquared(base)
                    break
            else:
                out.append(f)
        else:
            out.append(f)
    return out


def _simplify_pass(s: Scalar) -> Scalar:
    if isinstance(s, NumberLiteral):
        if s.value != 0 and abs(s.value) < ZERO_TOLERANCE:
            return NumberLiteral(0)
        return s
    if isinstance(s, (Variable, SingleVarFunctionScalar, DeltaFunction)):
        return s
    if isinstance(s, InnerProductFunction):
        # Wave packets are unit-norm by assumption: <f|f> = 1.
        if s.left_func == s.right_func:
            return NumberLiteral(1)
        return s
    if isinstance(s, AbsSquared):
        inner = _simplify_pass(s.inner)
        if isinstance(inner, NumberLiteral):
            return NumberLiteral(abs(inner.value) ** 2)
        return AbsSquared(inner)
    if isinstance(s, SumOfScalars):
        terms = []
        for t in s.terms:
            t = _simplify_pass(t)
            if isinstance(t, SumOfScalars):
                terms.extend(t.terms)
            else:
                terms.append(t)
        numeric = 0
        rest = []
        for t in terms:
            if isinstance(t, NumberLiteral):
                numeric = numeric + t.value
            else:
                rest.append(t)
        rest.sort(key=Scalar.sort_key)
        if abs(numeric) >= ZERO_TOLERANCE:
            rest.insert(0, NumberLiteral(numeric))
        if not rest:
            return NumberLiteral(0)
        if len(rest) == 1:
            return rest[0]
        return SumOfScalars(rest)
    if isinstance(s, ProductOfScalars):
        factors = []
        for f in s.factors:
            f = _simplify_pass(f)
            if isinstance(f, ProductOfScalars):
                factors.extend(f.factors)
            else:
                factors.append(f)
        numeric = 1
        rest = []
        for f in factors:
            if isinstance(f, NumberLiteral):
                numeric = numeric * f.value
            else:
                rest.append(f)
        if abs(numeric) < ZERO_TOLERANCE:
            return NumberLiteral(0)
        rest = _merge_conjugate_pairs(rest)
        rest.sort(key=Scalar.sort_key)
        if not rest:
            return NumberLiteral(numeric)
        if abs(numeric - 1) >= ZERO_TOLERANCE:
            rest.insert(0, NumberLiteral(numeric))
        if len(rest) == 1:
            return rest[0]
        return ProductOfScalars(rest)
    raise TypeError(f"cannot simplify {type(s).__name__}")


def simplify(s) -> Scalar:
    """Rewrite to canonical form: flattened, number-folded, zero/one pruned,
    conjugate pairs merged, children sorted. Idempotent.

    Works on scalars and on any object exposing a ``simplify`` method
    (states, operators).
    """
    if not isinstance(s, Scalar):
        if _is_number_like(s):
            s = NumberLiteral(s)
        else:
            return s.simplify()
    if s._simplified is not None:
        return s._simplified
    out = _simplify_pass(s)
    # _simplify_pass is bottom-up; iterate in case a rewrite exposes another.
    while True:
        nxt = _simplify_pass(out)
        if nxt.sort_key() == out.sort_key():
            break
        out = nxt
    out._simplified = out
    s._simplified = out
    return out


# -- substitution ------------------------------------------------------------


def _rename(s: Scalar, fn) -> Scalar:
    if isinstance(s, (NumberLiteral, InnerProductFunction)):
        return s
    if isinstance(s, Variable):
        return Variable(fn(s.name), s.conjugated)
    if isinstance(s, SingleVarFunctionScalar):
        return SingleVarFunctionScalar(s.func_name, fn(s.var_name), s.conjugated)
    if isinstance(s, DeltaFunction):
        return DeltaFunction(fn(s.var_a), fn(s.var_b))
    if isinstance(s, AbsSquared):
        return AbsSquared(_rename(s.inner, fn))
    if isinstance(s, SumOfScalars):
        return SumOfScalars([_rename(t, fn) for t in s.terms])
    if isinstance(s, ProductOfScalars):
        return ProductOfScalars([_rename(f, fn) for f in s.factors])
    raise TypeError(f"cannot rename variables in {type(s).__name__}")


def replace_var(s, old: str = None, new: str = None):
    """Rename variables in an expression.

    With (old, new) given, renames every occurrence of ``old``; with no
    arguments, appends a prime to every variable name (w -> w'). Works on
    scalars and on any object exposing a ``replace_var`` method.
    """
    if (old is None) != (new is None):
        raise ValueError("replace_var needs both old and new, or neither")
    if not isinstance(s, Scalar):
        if _is_number_like(s):
            s = NumberLiteral(s)
        else:
            return s.replace_var(old, new)
    if old is None:
        return _rename(s, lambda name: name + "'")
    return _rename(s, lambda name: new if name == old else name)


# -- queries -----------------------------------------------------------------


def free_variables(s) -> set:
    """All variable identifiers in the expression (symbols, function
    arguments, delta arguments). Function names are not variables."""
    if not isinstance(s, Scalar):
        if _is_number_like(s):
            return set()
        return s.free_variables()
    if isinstance(s, (NumberLiteral, InnerProductFunction)):
        return set()
    if isinstance(s, Variable):
        return {s.name}
    if isinstance(s, SingleVarFunctionScalar):
        return {s.var_name}
    if isinstance(s, DeltaFunction):
        return {s.var_a, s.var_b}
    if isinstance(s, AbsSquared):
        return free_variables(s.inner)
    if isinstance(s, SumOfScalars):
        return set().union(*(free_variables(t) for t in s.terms))
    if isinstance(s, ProductOfScalars):
        return set().union(*(free_variables(f) for f in s.factors))
    raise TypeError(f"no free variables defined for {type(s).__name__}")


def is_number(s) -> bool:
    """True when the expression contains only literals combined by sums,
    products and |.|^2, so it evaluates to a plain complex number."""
    s = as_scalar(s)
    if isinstance(s, NumberLiteral):
        return True
    if isinstance(s, AbsSquared):
        return is_number(s.inner)
    if isinstance(s, SumOfScalars):
        return all(is_number(t) for t in s.terms)
    if isinstance(s, ProductOfScalars):
        return all(is_number(f) for f in s.factors)
    return False


def to_complex(s) -> complex:
    """Evaluate a numeric expression; raises NotNumericError otherwise."""
    s = as_scalar(s)
    if isinstance(s, NumberLiteral):
        return complex(s.value)
    if isinstance(s, AbsSquared):
        return complex(abs(to_complex(s.inner)) ** 2)
    if isinstance(s, SumOfScalars):
        return sum((to_complex(t) for t in s.terms), complex(0))
    if isinstance(s, ProductOfScalars):
        out = complex(1)
        for f in s.factors:
            out *= to_complex(f)
        return out
    raise NotNumericError(f"not a numeric expression: {s}")


def to_json_dict(s) -> dict:
    """Machine-readable dump of the expression tree:
    {"kind": <variant>, "args": [...]}."""
    s = as_scalar(s)
    kind = type(s).__name__
    if isinstance(s, NumberLiteral):
        c = complex(s.value)
        return {"kind": kind, "args": [c.real, c.imag]}
    if isinstance(s, Variable):
        return {"kind": kind, "args": [s.name, s.conjugated]}
    if isinstance(s, AbsSquared):
        return {"kind": kind, "args": [to_json_dict(s.inner)]}
    if isinstance(s, SingleVarFunctionScalar):
        return {"kind": kind, "args": [s.func_name, s.var_name, s.conjugated]}
    if isinstance(s, InnerProductFunction):
        return {"kind": kind, "args": [s.left_func, s.right_func]}
    if isinstance(s, DeltaFunction):
        return {"kind": kind, "args": [s.var_a, s.var_b]}
    if isinstance(s, SumOfScalars):
        return {"kind": kind, "args": [to_json_dict(t) for t in s.terms]}
    if isinstance(s, ProductOfScalars):
        return {"kind": kind, "args": [to_json_dict(f) for f in s.factors]}
    raise TypeError(f"cannot serialize {kind}")
