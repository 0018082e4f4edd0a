"""Exact sparse multivariate polynomial and rational-function arithmetic.

A polynomial is stored as a dictionary mapping exponent tuples to rational
coefficients (``Fraction``).  Exponent tuples have one entry per variable of
the owning ``Polynomial``, so ``x^2*y`` over variables ``("x", "y")`` is
``{(2, 1): Fraction(1)}``.  Zero coefficients are never stored; the zero
polynomial is the empty dict.  All values are immutable after construction
and every operation is a pure function, so instances can be shared freely.

The string form is canonical: terms are emitted in descending graded
lexicographic order (total degree first, then the exponent tuple), which
makes printed expressions directly diffable.  The accepted input grammar is
the same language: integer or rational literals such as ``3`` or ``5/2``,
variable identifiers, ``+ - * ^`` and parentheses, with no implicit
multiplication.

GCDs are computed with a primitive polynomial remainder sequence, recursing
on the variable set; this keeps everything in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import mpmath as mp

Scalar = Union[int, Fraction]


class SymError(Exception):
    """Base class for errors raised by the symbolic core."""


class VariableError(SymError):
    """A symbol is missing from, or foreign to, a variable list."""


class EvaluationError(SymError):
    """Evaluation hit a pole, a log of a non-positive value, or a gap."""


class ParseError(SymError):
    """Input string does not conform to the expression grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _fraction(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational scalar, got {type(value).__name__}")


def grlex_key(exponents: tuple[int, ...]) -> tuple:
    """Sort key realizing graded lexicographic order (degree, then lex)."""
    return (sum(exponents), exponents)


@dataclass(frozen=True)
class Polynomial:
    """Multivariate polynomial over the rationals in canonical sparse form."""

    variables: tuple[str, ...]
    terms: Mapping[tuple[int, ...], Fraction]

    # -- construction -----------------------------------------------------

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        clean = {}
        nvars = len(self.variables)
        for exps, coeff in self.terms.items():
            coeff = _fraction(coeff)
            if len(exps) != nvars:
                raise VariableError(
                    f"exponent vector {exps} does not match variables {self.variables}"
                )
            if coeff != 0:
                clean[tuple(exps)] = coeff
        object.__setattr__(self, "terms", clean)

    @staticmethod
    def zero(variables: Sequence[str]) -> "Polynomial":
        return Polynomial(tuple(variables), {})

    @staticmethod
    def constant(variables: Sequence[str], value: Scalar) -> "Polynomial":
        variables = tuple(variables)
        value = _fraction(value)
        if value == 0:
            return Polynomial(variables, {})
        return Polynomial(variables, {(0,) * len(variables): value})

    @staticmethod
    def variable(variables: Sequence[str], name: str) -> "Polynomial":
        variables = tuple(variables)
        if name not in variables:
            raise VariableError(f"unknown variable {name!r}; have {variables}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return Polynomial(variables, {exps: Fraction(1)})

    # -- predicates and views ---------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise SymError(f"{self} is not constant")
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def total_degree(self) -> int:
        if self.is_zero():
            raise SymError("total degree of the zero polynomial is undefined")
        return max(sum(e) for e in self.terms)

    def degree_in(self, var: str) -> int:
        i = self._index(var)
        if self.is_zero():
            return -1
        return max(e[i] for e in self.terms)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        """Leading (exponent, coefficient) under graded lex order."""
        if self.is_zero():
            raise SymError("the zero polynomial has no leading term")
        exps = max(self.terms, key=grlex_key)
        return exps, self.terms[exps]

    def order_at_origin(self) -> int:
        """Smallest total degree among monomials with nonzero coefficient."""
        if self.is_zero():
            raise SymError("order of the zero polynomial is undefined")
        return min(sum(e) for e in self.terms)

    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise VariableError(f"unknown variable {var!r}; have {self.variables}") from None

    def _require_same(self, other: "Polynomial") -> None:
        if self.variables != other.variables:
            raise VariableError(
                f"variable lists differ: {self.variables} vs {other.variables}"
            )

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._require_same(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            out[exps] = out.get(exps, Fraction(0)) + coeff
        return Polynomial(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = _fraction(other)
            if c == 0:
                return Polynomial.zero(self.variables)
            return Polynomial(self.variables, {e: k * c for e, k in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._require_same(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                acc = out.get(key)
                out[key] = c1 * c2 if acc is None else acc + c1 * c2
        return Polynomial(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise SymError("polynomial exponent must be a non-negative integer")
        result = Polynomial.constant(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.variables, other)
        if isinstance(other, Polynomial):
            return other
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.variables, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    # -- calculus -----------------------------------------------------------

    def diff(self, var: str) -> "Polynomial":
        i = self._index(var)
        out = {}
        for exps, coeff in self.terms.items():
            if exps[i] == 0:
                continue
            new = list(exps)
            new[i] -= 1
            key = tuple(new)
            out[key] = out.get(key, Fraction(0)) + coeff * exps[i]
        return Polynomial(self.variables, out)

    def evaluate(self, point: "Point | Mapping[str, Scalar]") -> Fraction:
        coords = _point_coords(point)
        vals = []
        for v in self.variables:
            if v not in coords:
                raise EvaluationError(f"point does not cover variable {v!r}")
            vals.append(_fraction(coords[v]))
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            term = coeff
            for val, e in zip(vals, exps):
                if e:
                    term *= val**e
            total += term
        return total

    def evaluate_float(self, point: Mapping[str, float]) -> float:
        vals = [float(point[v]) for v in self.variables]
        total = 0.0
        for exps, coeff in self.terms.items():
            term = float(coeff)
            for val, e in zip(vals, exps):
                if e:
                    term *= val**e
            total += term
        return total

    def translate(self, point: "Point | Mapping[str, Scalar]") -> "Polynomial":
        """Substitute x -> x + a for every variable, moving `point` to the origin."""
        coords = _point_coords(point)
        shifted = {v: Polynomial.variable(self.variables, v) + _fraction(coords.get(v, 0))
                   for v in self.variables}
        return self.substitute(shifted)

    def substitute(self, mapping: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Substitute polynomials for variables; all images share one variable list."""
        images = []
        target_vars = None
        for v in self.variables:
            img = mapping.get(v)
            if img is None:
                raise VariableError(f"substitution does not cover variable {v!r}")
            if target_vars is None:
                target_vars = img.variables
            elif img.variables != target_vars:
                raise VariableError("substitution images use inconsistent variable lists")
            images.append(img)
        assert target_vars is not None
        result = Polynomial.zero(target_vars)
        for exps, coeff in self.terms.items():
            term = Polynomial.constant(target_vars, coeff)
            for img, e in zip(images, exps):
                if e:
                    term = term * img**e
            result = result + term
        return result

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        """Rename variables in place (permutations and relabelings)."""
        new_vars = tuple(mapping.get(v, v) for v in self.variables)
        if len(set(new_vars)) != len(new_vars):
            raise VariableError("variable renaming collides")
        return Polynomial(new_vars, dict(self.terms))

    def embed(self, variables: Sequence[str]) -> "Polynomial":
        """View the polynomial over a superset variable list."""
        variables = tuple(variables)
        positions = [variables.index(v) for v in self.variables]
        out = {}
        for exps, coeff in self.terms.items():
            new = [0] * len(variables)
            for pos, e in zip(positions, exps):
                new[pos] = e
            out[tuple(new)] = coeff
        return Polynomial(variables, out)

    # -- printing -----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, key=grlex_key, reverse=True):
            coeff = self.terms[exps]
            mono = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.variables, exps)
                if e
            )
            mag = abs(coeff)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            sign = "-" if coeff < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r}, vars={self.variables})"


@dataclass(frozen=True)
class Point:
    """Exact rational evaluation site, one coordinate per symbol."""

    coordinates: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(
            self,
            "coordinates",
            {name: _fraction(val) for name, val in self.coordinates.items()},
        )

    @staticmethod
    def of(**coords: Scalar) -> "Point":
        return Point({k: _fraction(v) for k, v in coords.items()})

    def __getitem__(self, name: str) -> Fraction:
        return self.coordinates[name]

    def covers(self, variables: Iterable[str]) -> bool:
        return all(v in self.coordinates for v in variables)


def _point_coords(point) -> Mapping[str, Scalar]:
    if isinstance(point, Point):
        return point.coordinates
    return point


# -- division and gcd -------------------------------------------------------


def poly_divmod(p: Polynomial, d: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Single-divisor multivariate division by graded-lex leading terms.

    Returns (q, r) with p = q*d + r and no monomial of r divisible by the
    leading monomial of d.
    """
    p._require_same(d)
    if d.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    variables = p.variables
    d_exps, d_coeff = d.leading()
    quotient: dict[tuple[int, ...], Fraction] = {}
    remainder: dict[tuple[int, ...], Fraction] = {}
    work = dict(p.terms)
    while work:
        exps = max(work, key=grlex_key)
        coeff = work.pop(exps)
        if all(a >= b for a, b in zip(exps, d_exps)):
            q_exps = tuple(a - b for a, b in zip(exps, d_exps))
            q_coeff = coeff / d_coeff
            quotient[q_exps] = quotient.get(q_exps, Fraction(0)) + q_coeff
            for e2, c2 in d.terms.items():
                if e2 == d_exps:
                    continue
                key = tuple(a + b for a, b in zip(q_exps, e2))
                val = work.get(key, Fraction(0)) - q_coeff * c2
                if val == 0:
                    work.pop(key, None)
                else:
                    work[key] = val
        else:
            remainder[exps] = coeff
    return Polynomial(variables, quotient), Polynomial(variables, remainder)


def divides_exactly(d: Polynomial, p: Polynomial) -> tuple[bool, Polynomial]:
    """Return (True, quotient) when d divides p exactly, else (False, remainder)."""
    if p.is_zero():
        return True, Polynomial.zero(p.variables)
    q, r = poly_divmod(p, d)
    if r.is_zero():
        return True, q
    return False, r


def _exact_quotient(p: Polynomial, d: Polynomial) -> Polynomial:
    ok, q = divides_exactly(d, p)
    if not ok:
        raise SymError("division expected to be exact was not")
    return q


def monic(p: Polynomial) -> Polynomial:
    """Scale so the graded-lex leading coefficient is 1; canonical gcd form."""
    if p.is_zero():
        return p
    _, lead = p.leading()
    return p * (Fraction(1) / lead)


def _univar_view(p: Polynomial, idx: int) -> dict[int, Polynomial]:
    """View p as univariate in variable idx with polynomial coefficients."""
    coeffs: dict[int, dict[tuple[int, ...], Fraction]] = {}
    for exps, coeff in p.terms.items():
        deg = exps[idx]
        rest = list(exps)
        rest[idx] = 0
        coeffs.setdefault(deg, {})[tuple(rest)] = coeff
    return {deg: Polynomial(p.variables, terms) for deg, terms in coeffs.items()}


def _from_univar(view: Mapping[int, Polynomial], idx: int, variables) -> Polynomial:
    total: dict[tuple[int, ...], Fraction] = {}
    for deg, poly in view.items():
        for exps, coeff in poly.terms.items():
            new = list(exps)
            new[idx] += deg
            total[tuple(new)] = coeff
    return Polynomial(variables, total)


def _content(view: Mapping[int, Polynomial], variables) -> Polynomial:
    cont = Polynomial.zero(variables)
    for poly in view.values():
        cont = gcd(cont, poly)
    return cont


def _pseudo_rem(a: dict[int, Polynomial], b: dict[int, Polynomial], variables):
    """Pseudo remainder of univariate-view polynomials with polynomial coefficients."""
    da, db = max(a), max(b)
    lb = b[db]
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        shift = dr - db
        new: dict[int, Polynomial] = {}
        degrees = set(k for k in r) | set(k + shift for k in b)
        for k in degrees:
            term = r.get(k, Polynomial.zero(variables)) * lb
            if k - shift in b:
                term = term - lr * b[k - shift]
            if not term.is_zero():
                new[k] = term
        r = new
        if dr in r and max(r) == dr:
            # leading term failed to cancel; should not happen
            raise SymError("pseudo-division failed to reduce degree")
    return r


def gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Greatest common divisor, canonicalized to leading coefficient 1.

    gcd(p, 0) = p (canonicalized).  Uses content/primitive-part recursion
    with a primitive polynomial remainder sequence.
    """
    if isinstance(p, Polynomial) and isinstance(q, Polynomial):
        p._require_same(q)
    if p.is_zero():
        return monic(q)
    if q.is_zero():
        return monic(p)
    if p.is_constant() or q.is_constant():
        return Polynomial.constant(p.variables, 1)
    variables = p.variables
    main = None
    for i in range(len(variables)):
        if any(e[i] for e in p.terms) or any(e[i] for e in q.terms):
            main = i
            break
    assert main is not None
    a = _univar_view(p, main)
    b = _univar_view(q, main)
    if max(a) == 0 or max(b) == 0:
        # one input does not involve the main variable: gcd divides its content
        small = p if max(a) == 0 else q
        big_view = b if max(a) == 0 else a
        return monic(gcd(small, _content(big_view, variables)))
    ca = _content(a, variables)
    cb = _content(b, variables)
    cont = gcd(ca, cb)
    a = {d: _exact_quotient(c, ca) for d, c in a.items()}
    b = {d: _exact_quotient(c, cb) for d, c in b.items()}
    if max(a) < max(b):
        a, b = b, a
    while True:
        r = _pseudo_rem(a, b, variables)
        if not r:
            g = _from_univar(b, main, variables)
            break
        if max(r) == 0:
            g = Polynomial.constant(variables, 1)
            break
        rc = _content(r, variables)
        a, b = b, {d: _exact_quotient(c, rc) for d, c in r.items()}
    return monic(cont * g)


def coprime(p: Polynomial, q: Polynomial) -> bool:
    return gcd(p, q).is_constant()


def shares_noninvertible_factor(p: Polynomial, q: Polynomial, at: Point) -> bool:
    """True iff p and q share a factor vanishing at the given point.

    Decided via the gcd: a shared non-invertible factor exists exactly when
    gcd(p, q) is non-constant and evaluates to zero at the point.
    """
    g = gcd(p, q)
    if g.is_constant():
        return False
    return g.evaluate(at) == 0


# -- rational functions -------------------------------------------------------


@dataclass(frozen=True)
class RationalFunction:
    """Reduced quotient of polynomials; denominator monic under graded lex."""

    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self):
        num, den = self.numerator, self.denominator
        num._require_same(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            den = Polynomial.constant(num.variables, 1)
        else:
            g = gcd(num, den)
            if not g.is_constant():
                num = _exact_quotient(num, g)
                den = _exact_quotient(den, g)
            _, lead = den.leading()
            if lead != 1:
                inv = Fraction(1) / lead
                num = num * inv
                den = den * inv
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @staticmethod
    def from_polynomial(p: Polynomial) -> "RationalFunction":
        return RationalFunction(p, Polynomial.constant(p.variables, 1))

    @staticmethod
    def zero(variables: Sequence[str]) -> "RationalFunction":
        return RationalFunction.from_polynomial(Polynomial.zero(variables))

    @staticmethod
    def constant(variables: Sequence[str], value: Scalar) -> "RationalFunction":
        return RationalFunction.from_polynomial(Polynomial.constant(variables, value))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.numerator.variables

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_constant(self) -> bool:
        return self.numerator.is_constant() and self.denominator.is_constant()

    def is_polynomial(self) -> bool:
        return self.denominator.is_constant()

    def as_polynomial(self) -> Polynomial:
        if not self.is_polynomial():
            raise SymError(f"{self} is not a polynomial")
        return self.numerator * (Fraction(1) / self.denominator.constant_value())

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(self.variables, other)
        if isinstance(other, Polynomial):
            return RationalFunction.from_polynomial(other)
        if isinstance(other, RationalFunction):
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division of rational functions by zero")
        return RationalFunction(
            self.numerator * other.denominator, self.denominator * other.numerator
        )

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __eq__(self, other) -> bool:
        coerced = self._coerce(other)
        if coerced is NotImplemented:
            return NotImplemented
        return (
            self.numerator == coerced.numerator
            and self.denominator == coerced.denominator
        )

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def diff(self, var: str) -> "RationalFunction":
        num, den = self.numerator, self.denominator
        return RationalFunction(
            num.diff(var) * den - num * den.diff(var), den * den
        )

    def evaluate(self, point: Point | Mapping[str, Scalar]) -> Fraction:
        den = self.denominator.evaluate(point)
        if den == 0:
            raise EvaluationError(f"denominator {self.denominator} vanishes at {point}")
        return self.numerator.evaluate(point) / den

    def evaluate_float(self, point: Mapping[str, float]) -> float:
        den = self.denominator.evaluate_float(point)
        if den == 0.0:
            raise EvaluationError(f"denominator {self.denominator} vanishes at {point}")
        return self.numerator.evaluate_float(point) / den

    def substitute(self, mapping: Mapping[str, Polynomial]) -> "RationalFunction":
        return RationalFunction(
            self.numerator.substitute(mapping), self.denominator.substitute(mapping)
        )

    def rename(self, mapping: Mapping[str, str]) -> "RationalFunction":
        return RationalFunction(self.numerator.rename(mapping), self.denominator.rename(mapping))

    def __str__(self) -> str:
        if self.denominator == Polynomial.constant(self.variables, 1):
            return str(self.numerator)
        return f"({self.numerator}) / ({self.denominator})"

    def __repr__(self) -> str:
        return f"RationalFunction({str(self)!r})"


# -- log-linear expressions ---------------------------------------------------


@dataclass(frozen=True)
class LogLinearExpr:
    """Rational part plus a rational-coefficient combination of logs.

    Log arguments are pairwise coprime, non-constant polynomials; terms with
    equal arguments are merged and zero coefficients dropped.  Differentiation
    is exact: d/dx of c*log(p) is c*p_x/p.
    """

    rational_part: RationalFunction
    log_terms: tuple[tuple[Fraction, Polynomial], ...] = ()

    def __post_init__(self):
        merged: list[tuple[Fraction, Polynomial]] = []
        for coeff, arg in self.log_terms:
            coeff = _fraction(coeff)
            if coeff == 0:
                continue
            if arg.is_constant():
                raise SymError(f"log argument {arg} is constant")
            if arg.variables != self.rational_part.variables:
                raise VariableError("log argument variable list differs from rational part")
            for k, (c0, a0) in enumerate(merged):
                if a0 == arg:
                    merged[k] = (c0 + coeff, a0)
                    break
            else:
                merged.append((coeff, arg))
        merged = [(c, a) for c, a in merged if c != 0]
        for i in range(len(merged)):
            for j in range(i + 1, len(merged)):
                if not coprime(merged[i][1], merged[j][1]):
                    raise SymError(
                        f"log arguments {merged[i][1]} and {merged[j][1]} share a factor"
                    )
        object.__setattr__(self, "log_terms", tuple(merged))

    @staticmethod
    def from_rational(r: RationalFunction) -> "LogLinearExpr":
        return LogLinearExpr(r, ())

    @staticmethod
    def from_polynomial(p: Polynomial) -> "LogLinearExpr":
        return LogLinearExpr(RationalFunction.from_polynomial(p), ())

    @staticmethod
    def zero(variables: Sequence[str]) -> "LogLinearExpr":
        return LogLinearExpr(RationalFunction.zero(variables), ())

    @property
    def variables(self) -> tuple[str, ...]:
        return self.rational_part.variables

    def is_zero(self) -> bool:
        return self.rational_part.is_zero() and not self.log_terms

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Polynomial, RationalFunction)):
            other = LogLinearExpr(self.rational_part._coerce(other), ())
        if not isinstance(other, LogLinearExpr):
            return NotImplemented
        return LogLinearExpr(
            self.rational_part + other.rational_part,
            self.log_terms + other.log_terms,
        )

    __radd__ = __add__

    def __neg__(self):
        return LogLinearExpr(
            -self.rational_part, tuple((-c, a) for c, a in self.log_terms)
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Polynomial, RationalFunction)):
            other = LogLinearExpr(self.rational_part._coerce(other), ())
        if not isinstance(other, LogLinearExpr):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, Fraction)):
            return NotImplemented
        c = _fraction(scalar)
        return LogLinearExpr(
            self.rational_part * c, tuple((k * c, a) for k, a in self.log_terms)
        )

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogLinearExpr):
            return NotImplemented
        if self.rational_part != other.rational_part:
            return False
        return sorted(self.log_terms, key=lambda t: str(t[1])) == sorted(
            other.log_terms, key=lambda t: str(t[1])
        )

    def __hash__(self):
        return hash((self.rational_part, frozenset(self.log_terms)))

    def diff(self, var: str) -> RationalFunction:
        out = self.rational_part.diff(var)
        for coeff, arg in self.log_terms:
            out = out + RationalFunction(arg.diff(var) * coeff, arg)
        return out

    def evaluate(self, point: Point | Mapping[str, Scalar], digits: int = 30):
        """High-precision numeric value; exact substitution feeds mpmath logs."""
        with mp.workdps(digits):
            total = mp.mpf(0)
            rat = self.rational_part.evaluate(point)
            total += mp.mpf(rat.numerator) / mp.mpf(rat.denominator)
            for coeff, arg in self.log_terms:
                val = arg.evaluate(point)
                if val <= 0:
                    raise EvaluationError(f"log argument {arg} is {val} <= 0 at {point}")
                total += (mp.mpf(coeff.numerator) / mp.mpf(coeff.denominator)) * mp.log(
                    mp.mpf(val.numerator) / mp.mpf(val.denominator)
                )
            return total

    def evaluate_float(self, point: Mapping[str, float]) -> float:
        import math

        total = self.rational_part.evaluate_float(point)
        for coeff, arg in self.log_terms:
            val = arg.evaluate_float(point)
            if val <= 0:
                raise EvaluationError(f"log argument {arg} is {val} <= 0 at {point}")
            total += float(coeff) * math.log(val)
        return total

    def substitute(self, mapping: Mapping[str, Polynomial]) -> "LogLinearExpr":
        """Polynomial substitution; log arguments must stay log-linear compatible."""
        rat = self.rational_part.substitute(mapping)
        terms = tuple((c, a.substitute(mapping)) for c, a in self.log_terms)
        return LogLinearExpr(rat, terms)

    def __str__(self) -> str:
        parts = []
        if not self.rational_part.is_zero():
            parts.append(str(self.rational_part))
        for coeff, arg in self.log_terms:
            if coeff == 1:
                parts.append(f"log({arg})")
            else:
                parts.append(f"{coeff}*log({arg})")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"LogLinearExpr({str(self)!r})"


# -- the generic differentiate entry point ------------------------------------


def differentiate(expr, var: str) -> RationalFunction:
    """Exact partial derivative of a polynomial, rational, or log-linear value."""
    if isinstance(expr, Polynomial):
        expr._index(var)
        return RationalFunction.from_polynomial(expr.diff(var))
    if isinstance(expr, RationalFunction):
        expr.numerator._index(var)
        return expr.diff(var)
    if isinstance(expr, LogLinearExpr):
        expr.rational_part.numerator._index(var)
        return expr.diff(var)
    raise TypeError(f"cannot differentiate {type(expr).__name__}")


def evaluate(expr, point: Point | Mapping[str, Scalar], digits: int = 30):
    """Exact evaluation for polynomial/rational values, numeric for log-linear."""
    if isinstance(expr, (Polynomial, RationalFunction)):
        return expr.evaluate(point)
    if isinstance(expr, LogLinearExpr):
        return expr.evaluate(point, digits=digits)
    raise TypeError(f"cannot evaluate {type(expr).__name__}")


# -- parsing -------------------------------------------------------------------


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos >= len(self.text):
            return None, self.pos
        ch = self.text[self.pos]
        start = self.pos
        if ch.isdigit():
            end = start
            while end < len(self.text) and self.text[end].isdigit():
                end += 1
            # rational literal: digits '/' digits
            if end < len(self.text) and self.text[end] == "/":
                k = end + 1
                if k < len(self.text) and self.text[k].isdigit():
                    while k < len(self.text) and self.text[k].isdigit():
                        k += 1
                    return ("number", Fraction(self.text[start:end] + "/" + self.text[end + 1 : k]), k), start
            return ("number", Fraction(int(self.text[start:end])), end), start
        if ch.isalpha() or ch == "_":
            end = start
            while end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "_"):
                end += 1
            return ("name", self.text[start:end], end), start
        if ch in "+-*^()":
            return (ch, ch, start + 1), start
        raise ParseError(f"unexpected character {ch!r}", start)

    def next(self):
        tok, _ = self.peek()
        if tok is not None:
            self.pos = tok[2]
        return tok


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.lex = _Lexer(text)
        self.variables = variables

    def parse(self) -> Polynomial:
        result = self.expr()
        tok, pos = self.lex.peek()
        if tok is not None:
            raise ParseError(f"unexpected trailing input {tok[1]!r}", pos)
        return result

    def expr(self) -> Polynomial:
        tok, _ = self.lex.peek()
        negate = False
        if tok is not None and tok[0] in "+-":
            self.lex.next()
            negate = tok[0] == "-"
        result = self.term()
        if negate:
            result = -result
        while True:
            tok, _ = self.lex.peek()
            if tok is None or tok[0] not in "+-":
                return result
            self.lex.next()
            rhs = self.term()
            result = result + rhs if tok[0] == "+" else result - rhs

    def term(self) -> Polynomial:
        result = self.factor()
        while True:
            tok, _ = self.lex.peek()
            if tok is None or tok[0] != "*":
                return result
            self.lex.next()
            result = result * self.factor()

    def factor(self) -> Polynomial:
        tok, pos = self.lex.peek()
        if tok is not None and tok[0] == "-":
            self.lex.next()
            return -self.factor()
        base = self.atom()
        tok, pos = self.lex.peek()
        if tok is not None and tok[0] == "^":
            self.lex.next()
            etok, epos = self.lex.peek()
            if etok is None or etok[0] != "number" or etok[1].denominator != 1:
                raise ParseError("exponent must be a non-negative integer", epos)
            self.lex.next()
            return base ** int(etok[1])
        return base

    def atom(self) -> Polynomial:
        tok, pos = self.lex.peek()
        if tok is None:
            raise ParseError("unexpected end of input", pos)
        if tok[0] == "number":
            self.lex.next()
            return Polynomial.constant(self.variables, tok[1])
        if tok[0] == "name":
            self.lex.next()
            if tok[1] not in self.variables:
                raise ParseError(f"unknown variable {tok[1]!r}", pos)
            return Polynomial.variable(self.variables, tok[1])
        if tok[0] == "(":
            self.lex.next()
            inner = self.expr()
            close, cpos = self.lex.peek()
            if close is None or close[0] != ")":
                raise ParseError("expected ')'", cpos)
            self.lex.next()
            return inner
        raise ParseError(f"unexpected token {tok[1]!r}", pos)


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse the canonical grammar over an explicit, ordered variable list."""
    return _Parser(text, tuple(variables)).parse()
