"""First-order operators, Lie-algebra realizations, and second-order assembly.

A first-order operator acts on scalars as ``T(f) = v(f) + eta*f`` where ``v``
is a vector field and ``eta`` a multiplier function.  Quadratic combinations
``sum C[i][j] T_i T_j + sum L[k] T_k`` expand to a ``SecondOrderOp`` holding a
symmetric matrix of second-order coefficients, a first-order vector, and a
zeroth-order term.  The induced contravariant metric is fixed by the
convention that the operator's second-order part reads ``-1/2 g^{ij} d_i d_j``,
i.e. ``g = -2 A``.

Everything is exact over rational-function entries and immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from ._linalg import solve_linear
from .symcore import (
    LogLinearExpr,
    Polynomial,
    RationalFunction,
    SymError,
    VariableError,
    differentiate,
    grlex_key,
    parse_polynomial,
)

ScalarExpr = Union[Polynomial, RationalFunction, LogLinearExpr]


def _as_rational(value, variables) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction.from_polynomial(value)
    if isinstance(value, (int, Fraction)):
        return RationalFunction.constant(variables, value)
    if isinstance(value, str):
        return RationalFunction.from_polynomial(parse_polynomial(value, variables))
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational function")


@dataclass(frozen=True)
class VectorField:
    """Vector field with one rational-function component per coordinate."""

    components: tuple[RationalFunction, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise SymError("vector field needs at least one component")
        vars0 = comps[0].variables
        for c in comps:
            if c.variables != vars0:
                raise VariableError("vector field components use different variable lists")
        if len(comps) != len(vars0):
            raise SymError(
                f"component count {len(comps)} does not match dimension {len(vars0)}"
            )
        object.__setattr__(self, "components", comps)

    @staticmethod
    def zero(variables: Sequence[str]) -> "VectorField":
        return VectorField(tuple(RationalFunction.zero(variables) for _ in variables))

    @staticmethod
    def of(variables: Sequence[str], *components) -> "VectorField":
        return VectorField(tuple(_as_rational(c, tuple(variables)) for c in components))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.components[0].variables

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def apply(self, expr: ScalarExpr) -> RationalFunction:
        """Directional derivative: sum_i v^i d_i expr."""
        out = RationalFunction.zero(self.variables)
        for comp, var in zip(self.components, self.variables):
            if not comp.is_zero():
                out = out + comp * differentiate(expr, var)
        return out

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "VectorField":
        return VectorField(tuple(-a for a in self.components))

    def __mul__(self, scalar) -> "VectorField":
        s = _as_rational(scalar, self.variables)
        return VectorField(tuple(a * s for a in self.components))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


@dataclass(frozen=True)
class FirstOrderOp:
    """Operator f -> vector(f) + multiplier*f."""

    vector: VectorField
    multiplier: RationalFunction

    def __post_init__(self):
        if self.multiplier.variables != self.vector.variables:
            raise VariableError("multiplier variable list differs from vector field")

    @staticmethod
    def from_components(variables: Sequence[str], components, multiplier=0) -> "FirstOrderOp":
        variables = tuple(variables)
        return FirstOrderOp(
            VectorField.of(variables, *components), _as_rational(multiplier, variables)
        )

    @property
    def variables(self) -> tuple[str, ...]:
        return self.vector.variables

    def apply(self, expr: ScalarExpr) -> RationalFunction:
        out = self.vector.apply(expr)
        if not self.multiplier.is_zero():
            if isinstance(expr, LogLinearExpr):
                if expr.log_terms:
                    raise SymError(
                        "multiplier action on a log-bearing expression leaves the "
                        "log-linear class"
                    )
                expr = expr.rational_part
            out = out + self.multiplier * _as_rational(expr, self.variables)
        return out

    def __str__(self) -> str:
        return f"{self.vector} + ({self.multiplier})"


def lie_bracket(X: FirstOrderOp, Y: FirstOrderOp) -> FirstOrderOp:
    """Commutator [X, Y] as a first-order operator.

    The vector part is the usual vector-field bracket; the multiplier part is
    X acting on Y's multiplier minus Y acting on X's multiplier.
    """
    if X.variables != Y.variables:
        raise VariableError("operators live on different variable lists")
    v, w = X.vector, Y.vector
    comps = tuple(
        v.apply(w.components[j]) - w.apply(v.components[j])
        for j in range(len(v.components))
    )
    mult = v.apply(Y.multiplier) - w.apply(X.multiplier)
    return FirstOrderOp(VectorField(comps), mult)


@dataclass(frozen=True)
class Realization:
    """Ordered list of first-order generators, optionally bracket-closed."""

    generators: tuple[FirstOrderOp, ...]
    name: str = ""

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise SymError("realization needs at least one generator")
        vars0 = gens[0].variables
        for g in gens:
            if g.variables != vars0:
                raise VariableError("generators use different variable lists")
        object.__setattr__(self, "generators", gens)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.generators[0].variables

    def __len__(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class CoefficientSpec:
    """Symmetric quadratic coefficients C and linear coefficients L."""

    C: tuple[tuple[Fraction, ...], ...]
    L: tuple[Fraction, ...]

    def __post_init__(self):
        C = tuple(tuple(Fraction(v) for v in row) for row in self.C)
        L = tuple(Fraction(v) for v in self.L)
        m = len(L)
        if len(C) != m or any(len(row) != m for row in C):
            raise SymError("C must be square with size matching L")
        for i in range(m):
            for j in range(m):
                if C[i][j] != C[j][i]:
                    raise SymError(f"C is not symmetric at ({i}, {j})")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "L", L)

    @property
    def size(self) -> int:
        return len(self.L)


@dataclass(frozen=True)
class SecondOrderOp:
    """A^{ij} d_i d_j + b^i d_i + c with A symmetric."""

    A: tuple[tuple[RationalFunction, ...], ...]
    b: VectorField
    c: RationalFunction

    def __post_init__(self):
        A = tuple(tuple(row) for row in self.A)
        n = len(self.b.components)
        if len(A) != n or any(len(row) != n for row in A):
            raise SymError("A must be square and match the dimension")
        for i in range(n):
            for j in range(n):
                if A[i][j] != A[j][i]:
                    raise SymError(f"A is not symmetric at ({i}, {j})")
        object.__setattr__(self, "A", A)

    @staticmethod
    def zero(variables: Sequence[str]) -> "SecondOrderOp":
        variables = tuple(variables)
        z = RationalFunction.zero(variables)
        n = len(variables)
        return SecondOrderOp(
            tuple(tuple(z for _ in range(n)) for _ in range(n)),
            VectorField.zero(variables),
            z,
        )

    @property
    def variables(self) -> tuple[str, ...]:
        return self.b.variables

    def apply(self, expr: ScalarExpr) -> RationalFunction:
        variables = self.variables
        out = RationalFunction.zero(variables)
        firsts = [differentiate(expr, v) for v in variables]
        for i, vi in enumerate(variables):
            for j in range(len(variables)):
                if not self.A[i][j].is_zero():
                    out = out + self.A[i][j] * firsts[j].diff(vi)
        for bi, fi in zip(self.b.components, firsts):
            if not bi.is_zero():
                out = out + bi * fi
        if not self.c.is_zero():
            out = out + self.c * _as_rational(expr, variables)
        return out

    def __add__(self, other: "SecondOrderOp") -> "SecondOrderOp":
        n = len(self.A)
        return SecondOrderOp(
            tuple(
                tuple(self.A[i][j] + other.A[i][j] for j in range(n)) for i in range(n)
            ),
            self.b + other.b,
            self.c + other.c,
        )

    def __sub__(self, other: "SecondOrderOp") -> "SecondOrderOp":
        return self + (other * Fraction(-1))

    def __mul__(self, scalar) -> "SecondOrderOp":
        s = _as_rational(scalar, self.variables)
        n = len(self.A)
        return SecondOrderOp(
            tuple(tuple(self.A[i][j] * s for j in range(n)) for i in range(n)),
            self.b * s,
            self.c * s,
        )

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SecondOrderOp):
            return NotImplemented
        return self.A == other.A and self.b.components == other.b.components and self.c == other.c

    def __hash__(self):
        return hash((self.A, self.b.components, self.c))


@dataclass(frozen=True)
class MetricTensor:
    """Contravariant metric: symmetric matrix of rational functions."""

    g: tuple[tuple[RationalFunction, ...], ...]

    def __post_init__(self):
        g = tuple(tuple(row) for row in self.g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise SymError("metric matrix must be square")
        for i in range(n):
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise SymError(f"metric is not symmetric at ({i}, {j})")
        object.__setattr__(self, "g", g)

    @staticmethod
    def from_polynomials(variables: Sequence[str], rows) -> "MetricTensor":
        variables = tuple(variables)
        return MetricTensor(
            tuple(tuple(_as_rational(v, variables) for v in row) for row in rows)
        )

    @staticmethod
    def diagonal(variables: Sequence[str], entries) -> "MetricTensor":
        variables = tuple(variables)
        z = RationalFunction.zero(variables)
        ents = [_as_rational(e, variables) for e in entries]
        n = len(ents)
        return MetricTensor(
            tuple(tuple(ents[i] if i == j else z for j in range(n)) for i in range(n))
        )

    @property
    def variables(self) -> tuple[str, ...]:
        return self.g[0][0].variables

    @property
    def dimension(self) -> int:
        return len(self.g)

    def det(self) -> RationalFunction:
        g = self.g
        if len(g) == 3:
            return (
                g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
                - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
            )
        if len(g) == 2:
            return g[0][0] * g[1][1] - g[0][1] * g[1][0]
        if len(g) == 1:
            return g[0][0]
        raise SymError("determinant implemented for dimensions 1-3")

    def scale(self, factor) -> "MetricTensor":
        s = _as_rational(factor, self.variables)
        return MetricTensor(tuple(tuple(e * s for e in row) for row in self.g))

    def is_diagonal(self) -> bool:
        n = len(self.g)
        return all(self.g[i][j].is_zero() for i in range(n) for j in range(n) if i != j)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MetricTensor):
            return NotImplemented
        return self.g == other.g

    def __hash__(self):
        return hash(self.g)


def compose(X: FirstOrderOp, Y: FirstOrderOp) -> SecondOrderOp:
    """Exact expansion of the product X Y as a second-order operator."""
    if X.variables != Y.variables:
        raise VariableError("operators live on different variable lists")
    variables = X.variables
    n = len(variables)
    v, w = X.vector.components, Y.vector.components
    half = Fraction(1, 2)
    A = tuple(
        tuple((v[i] * w[j] + v[j] * w[i]) * half for j in range(n)) for i in range(n)
    )
    b = VectorField(
        tuple(
            X.vector.apply(w[j]) + X.multiplier * w[j] + Y.multiplier * v[j]
            for j in range(n)
        )
    )
    c = X.vector.apply(Y.multiplier) + X.multiplier * Y.multiplier
    return SecondOrderOp(A, b, c)


def first_order_as_second(T: FirstOrderOp) -> SecondOrderOp:
    variables = T.variables
    z = RationalFunction.zero(variables)
    n = len(variables)
    return SecondOrderOp(
        tuple(tuple(z for _ in range(n)) for _ in range(n)), T.vector, T.multiplier
    )


def build_lie_algebraic(spec: CoefficientSpec, realization: Realization) -> SecondOrderOp:
    """Expand sum_ij C^{ij} T_i T_j + sum_k L^k T_k over the realization."""
    if spec.size != len(realization):
        raise SymError(
            f"coefficient size {spec.size} does not match generator count {len(realization)}"
        )
    gens = realization.generators
    out = SecondOrderOp.zero(realization.variables)
    for i, Ti in enumerate(gens):
        for j, Tj in enumerate(gens):
            cij = spec.C[i][j]
            if cij != 0:
                out = out + compose(Ti, Tj) * cij
    for k, Tk in enumerate(gens):
        lk = spec.L[k]
        if lk != 0:
            out = out + first_order_as_second(Tk) * lk
    return out


def extract_metric(H: SecondOrderOp) -> MetricTensor:
    """Induced contravariant metric g = -2A (second-order part -1/2 g^{ij} d_ij)."""
    minus_two = Fraction(-2)
    return MetricTensor(tuple(tuple(a * minus_two for a in row) for row in H.A))


def laplace_beltrami(g: MetricTensor) -> SecondOrderOp:
    """Laplace-Beltrami operator assembled from the contravariant metric.

    Coefficient of d_j is sum_i [d_i(g^{ij}) - g^{ij} d_i(det)/(2 det)]; the
    second-order part is g itself.
    """
    det = g.det()
    if det.is_zero():
        raise SymError("metric is identically degenerate")
    variables = g.variables
    n = g.dimension
    two_det = det * Fraction(2)
    b = []
    for j in range(n):
        acc = RationalFunction.zero(variables)
        for i, vi in enumerate(variables):
            acc = acc + g.g[i][j].diff(vi)
            acc = acc - g.g[i][j] * det.diff(vi) / two_det
        b.append(acc)
    return SecondOrderOp(g.g, VectorField(tuple(b)), RationalFunction.zero(variables))


def decompose(H: SecondOrderOp, g: MetricTensor) -> tuple[VectorField, RationalFunction]:
    """Split H = -1/2 Delta(g) + V + U0; returns the exact (V, U0)."""
    if extract_metric(H) != g:
        raise SymError("metric does not match the operator's second-order part")
    delta = laplace_beltrami(g)
    half = Fraction(1, 2)
    V = VectorField(
        tuple(
            bh + half * bd
            for bh, bd in zip(H.b.components, delta.b.components)
        )
    )
    return V, H.c


def check_imprimitivity(realization: Realization, lam: ScalarExpr) -> bool:
    """True iff every generator maps lam to a function of lam.

    Functional dependence is tested as identical vanishing of all 2x2 minors
    of the matrix [grad T(lam); grad lam], which is an exact rational-function
    computation.
    """
    variables = realization.variables
    lam_rf: ScalarExpr = lam
    dlam = [differentiate(lam_rf, v) for v in variables]
    if all(d.is_zero() for d in dlam):
        raise SymError("lambda must be nonconstant")
    for T in realization.generators:
        tlam = T.apply(lam_rf)
        dtlam = [tlam.diff(v) for v in variables]
        for i in range(len(variables)):
            for j in range(i + 1, len(variables)):
                minor = dtlam[i] * dlam[j] - dtlam[j] * dlam[i]
                if not minor.is_zero():
                    return False
    return True


@dataclass(frozen=True)
class ClosureReport:
    closed: bool
    witness: Optional[tuple[int, int, FirstOrderOp]] = None

    def __bool__(self) -> bool:
        return self.closed


def _polynomial_entries(T: FirstOrderOp) -> list[Polynomial]:
    entries = list(T.vector.components) + [T.multiplier]
    polys = []
    for e in entries:
        if not e.is_polynomial():
            raise SymError(
                "closure verification requires polynomial generator entries"
            )
        polys.append(e.as_polynomial())
    return polys


def verify_closure_under_bracket(realization: Realization) -> ClosureReport:
    """Check every pairwise bracket lies in the rational span of the generators.

    Solved as an exact linear system on monomial coefficient vectors.
    """
    gens = realization.generators
    gen_entries = [_polynomial_entries(T) for T in gens]
    slots = len(gen_entries[0])
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            bracket = lie_bracket(gens[i], gens[j])
            target = _polynomial_entries(bracket)
            monomials = set()
            for polys in gen_entries:
                for s in range(slots):
                    monomials.update(polys[s].terms)
            for s in range(slots):
                monomials.update(target[s].terms)
            keys = sorted(monomials, key=grlex_key)
            rows = []
            rhs = []
            for s in range(slots):
                for key in keys:
                    rows.append(
                        [gen_entries[k][s].terms.get(key, Fraction(0)) for k in range(len(gens))]
                    )
                    rhs.append(target[s].terms.get(key, Fraction(0)))
            if solve_linear(rows, rhs) is None:
                return ClosureReport(False, (i, j, bracket))
    return ClosureReport(True)
