"""Covariant metric data, curvature tensors, and the gradient-flow trap demo.

Curvature is computed along the standard Levi-Civita route from the exact
covariant metric.  For metrics with polynomial entries the Christoffel
symbols are carried as polynomial numerators over the shared denominator
2*det^2, and Riemann components over its square; zero testing then needs no
gcd reduction at all, which keeps exact flatness checks of degree-six
determinant metrics fast.  Diagonal metrics additionally get the specialized
diagonal Ricci expressions, whose exact relation to the coordinate Ricci is
``expr_i = 4 g^2 (g^{ii})^2 Ric_ii``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .operators import MetricTensor, VectorField
from .symcore import (
    LogLinearExpr,
    Polynomial,
    RationalFunction,
    SymError,
    differentiate,
    divides_exactly,
)


@dataclass(frozen=True)
class CovariantMetric:
    """Lower-index metric together with the contravariant metric it inverts."""

    g_lower: tuple[tuple[RationalFunction, ...], ...]
    g_upper: MetricTensor

    @property
    def variables(self) -> tuple[str, ...]:
        return self.g_upper.variables

    @property
    def dimension(self) -> int:
        return len(self.g_lower)

    def verify_inverse(self) -> bool:
        """Exact check that g_lower * g_upper is the identity."""
        n = self.dimension
        variables = self.variables
        one = RationalFunction.constant(variables, 1)
        zero = RationalFunction.zero(variables)
        for i in range(n):
            for j in range(n):
                acc = zero
                for k in range(n):
                    acc = acc + self.g_lower[i][k] * self.g_upper.g[k][j]
                if acc != (one if i == j else zero):
                    return False
        return True


@dataclass(frozen=True)
class Christoffel:
    """Levi-Civita connection coefficients, symmetric in the lower indices."""

    gamma: tuple[tuple[tuple[RationalFunction, ...], ...], ...]
    variables: tuple[str, ...]

    def __getitem__(self, idx):
        k, i, j = idx
        return self.gamma[k][i][j]


@dataclass(frozen=True)
class RiemannTensor:
    """Components R^l_{ijk}, antisymmetric in the last two indices."""

    components: tuple[tuple[tuple[tuple[RationalFunction, ...], ...], ...], ...]
    variables: tuple[str, ...]

    def __getitem__(self, idx):
        l, i, j, k = idx
        return self.components[l][i][j][k]


@dataclass(frozen=True)
class RicciTensor:
    components: tuple[tuple[RationalFunction, ...], ...]
    variables: tuple[str, ...]

    def __getitem__(self, idx):
        i, j = idx
        return self.components[i][j]


@dataclass(frozen=True)
class FlatnessReport:
    flat: bool
    witness_index: Optional[tuple[int, int, int, int]] = None
    witness_component: Optional[RationalFunction] = None

    def __bool__(self) -> bool:
        return self.flat


@dataclass
class Trajectory:
    """Gradient-flow sample path with degeneracy diagnostics."""

    times: list[float]
    points: list[dict[str, float]]
    det_values: list[float]
    step: float
    min_abs_det: float
    sign_constant: bool
    truncated_reason: Optional[str] = None

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise SymError("trajectory times must be strictly increasing")


# -- inversion ----------------------------------------------------------------


def _adjugate3(g: MetricTensor) -> list[list[RationalFunction]]:
    m = g.g
    if g.dimension != 3:
        raise SymError("adjugate implemented for dimension 3")
    c = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            s = [k for k in range(3) if k != j]
            minor = m[r[0]][s[0]] * m[r[1]][s[1]] - m[r[0]][s[1]] * m[r[1]][s[0]]
            sign = Fraction(-1) if (i + j) % 2 else Fraction(1)
            c[j][i] = minor * sign  # transposed cofactor
    return c


def invert_metric(g: MetricTensor) -> CovariantMetric:
    """Exact adjugate-over-determinant inverse of the contravariant metric."""
    det = g.det()
    if det.is_zero():
        raise SymError("metric is identically degenerate")
    adj = _adjugate3(g)
    lower = tuple(tuple(adj[i][j] / det for j in range(3)) for i in range(3))
    return CovariantMetric(lower, g)


# -- Christoffel / curvature --------------------------------------------------


def _polynomial_entries(g: MetricTensor) -> Optional[list[list[Polynomial]]]:
    rows = []
    for row in g.g:
        out = []
        for entry in row:
            if not entry.is_polynomial():
                return None
            out.append(entry.as_polynomial())
        rows.append(out)
    return rows


def _christoffel_numerators(g: MetricTensor):
    """Christoffel symbols of a polynomial metric as (numerators, 2*det^2).

    gamma^k_ij = N[k][i][j] / (2 det^2), everything polynomial.
    """
    P = _polynomial_entries(g)
    if P is None:
        return None
    variables = g.variables
    n = g.dimension
    adj = [[e.as_polynomial() for e in row] for row in _adjugate_poly(P, variables)]
    d = _det3_poly(P)
    dd = [d.diff(v) for v in variables]
    # B[i][l][j]: numerator of d_i (adj_{lj}/d) over d^2
    B = [
        [
            [adj[l][j].diff(variables[i]) * d - adj[l][j] * dd[i] for j in range(n)]
            for l in range(n)
        ]
        for i in range(n)
    ]
    N = [[[Polynomial.zero(variables) for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = Polynomial.zero(variables)
                for l in range(n):
                    if P[k][l].is_zero():
                        continue
                    acc = acc + P[k][l] * (B[i][l][j] + B[j][l][i] - B[l][i][j])
                N[k][i][j] = acc
                N[k][j][i] = acc
    den = d * d * Fraction(2)
    return N, den, d


def _adjugate_poly(P, variables):
    g = MetricTensor.from_polynomials(variables, P)
    return _adjugate3(g)


def _det3_poly(P) -> Polynomial:
    return (
        P[0][0] * (P[1][1] * P[2][2] - P[1][2] * P[2][1])
        - P[0][1] * (P[1][0] * P[2][2] - P[1][2] * P[2][0])
        + P[0][2] * (P[1][0] * P[2][1] - P[1][1] * P[2][0])
    )


def christoffel(gl: CovariantMetric) -> Christoffel:
    """Levi-Civita connection from the covariant metric, exact."""
    g = gl.g_upper
    variables = gl.variables
    n = gl.dimension
    fast = _christoffel_numerators(g)
    if fast is not None:
        N, den, _ = fast
        gamma = tuple(
            tuple(tuple(RationalFunction(N[k][i][j], den) for j in range(n)) for i in range(n))
            for k in range(n)
        )
        return Christoffel(gamma, variables)
    half = Fraction(1, 2)
    lower = gl.g_lower
    gamma = []
    for k in range(n):
        rows = []
        for i in range(n):
            cols = []
            for j in range(n):
                acc = RationalFunction.zero(variables)
                for l in range(n):
                    term = (
                        lower[l][i].diff(variables[j])
                        + lower[l][j].diff(variables[i])
                        - lower[i][j].diff(variables[l])
                    )
                    acc = acc + g.g[k][l] * term
                cols.append(acc * half)
            rows.append(tuple(cols))
        gamma.append(tuple(rows))
    return Christoffel(tuple(gamma), variables)


def _riemann_components(g: MetricTensor):
    """Yield ((l, i, j, k), component) for j < k, exact, lazily."""
    variables = g.variables
    n = g.dimension
    fast = _christoffel_numerators(g)
    if fast is not None:
        N, e, _ = fast
        de = [e.diff(v) for v in variables]
        dN = {}

        def ndiff(k, i, j, by):
            key = (k, i, j, by)
            if key not in dN:
                dN[key] = N[k][i][j].diff(variables[by])
            return dN[key]

        for l in range(n):
            for i in range(n):
                for j in range(n):
                    for k in range(j + 1, n):
                        num = (
                            (ndiff(l, i, k, j) - ndiff(l, i, j, k)) * e
                            - N[l][i][k] * de[j]
                            + N[l][i][j] * de[k]
                        )
                        for m in range(n):
                            num = num + N[l][j][m] * N[m][i][k] - N[l][k][m] * N[m][i][j]
                        if num.is_zero():
                            comp = RationalFunction.zero(variables)
                        else:
                            comp = RationalFunction(num, e * e)
                        yield (l, i, j, k), comp
        return
    gamma = christoffel(invert_metric(g)).gamma
    for l in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(j + 1, n):
                    comp = (
                        gamma[l][i][k].diff(variables[j])
                        - gamma[l][i][j].diff(variables[k])
                    )
                    for m in range(n):
                        comp = comp + gamma[l][j][m] * gamma[m][i][k]
                        comp = comp - gamma[l][k][m] * gamma[m][i][j]
                    yield (l, i, j, k), comp


def riemann(gamma: Christoffel) -> RiemannTensor:
    """Curvature R^l_{ijk} = d_j G^l_{ik} - d_k G^l_{ij} + G G - G G, exact."""
    variables = gamma.variables
    n = len(gamma.gamma)
    G = gamma.gamma
    comps = [
        [[[RationalFunction.zero(variables) for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for _ in range(n)
    ]
    for l in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(j + 1, n):
                    comp = G[l][i][k].diff(variables[j]) - G[l][i][j].diff(variables[k])
                    for m in range(n):
                        comp = comp + G[l][j][m] * G[m][i][k]
                        comp = comp - G[l][k][m] * G[m][i][j]
                    comps[l][i][j][k] = comp
                    comps[l][i][k][j] = -comp
    return RiemannTensor(
        tuple(tuple(tuple(tuple(r) for r in rr) for rr in rrr) for rrr in comps), variables
    )


def ricci(riem: RiemannTensor) -> RicciTensor:
    """Contraction Ric_{ij} = R^l_{ilj}."""
    n = len(riem.components)
    variables = riem.variables
    comps = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = RationalFunction.zero(variables)
            for l in range(n):
                acc = acc + riem[(l, i, l, j)]
            row.append(acc)
        comps.append(tuple(row))
    return RicciTensor(tuple(comps), variables)


def is_flat(g: MetricTensor) -> FlatnessReport:
    """True iff every Riemann component reduces to the zero rational function."""
    if g.det().is_zero():
        raise SymError("metric is identically degenerate")
    for idx, comp in _riemann_components(g):
        if not comp.is_zero():
            return FlatnessReport(False, idx, comp)
    return FlatnessReport(True)


# -- diagonal fast-path formulas ------------------------------------------------


def _as_rf(value, variables) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction.from_polynomial(value)
    raise TypeError("diagonal entries must be polynomials or rational functions")


def ricci_diagonal_via_paper_formula(
    P, Q, R, variables: Optional[Sequence[str]] = None
) -> tuple[RationalFunction, RationalFunction, RationalFunction]:
    """Specialized diagonal Ricci expressions for the metric diag(P, Q, R).

    Returns the three rearranged quantities built from H^i = g^{ii} d_i and
    g = PQR.  Exactly, each returned expression equals
    ``4 g^2 (g^{ii})^2 Ric_ii`` with Ric the coordinate Ricci tensor of the
    general pipeline; the rearrangement exists because the H^i frame absorbs
    the diagonal scaling.
    """
    if variables is None:
        variables = P.variables
    variables = tuple(variables)
    if len(variables) != 3:
        raise SymError("diagonal Ricci formulas are three dimensional")
    P = _as_rf(P, variables)
    Q = _as_rf(Q, variables)
    R = _as_rf(R, variables)
    x, y, z = variables
    g = P * Q * R

    def H(entry, var, expr):
        return entry * expr.diff(var)

    Px, Py, Pz = P.diff(x), P.diff(y), P.diff(z)
    Qx, Qy, Qz = Q.diff(x), Q.diff(y), Q.diff(z)
    Rx, Ry, Rz = R.diff(x), R.diff(y), R.diff(z)

    e1 = (
        Fraction(-3) * H(P, x, g) * H(P, x, g)
        + Fraction(2) * g * H(P, x, H(P, x, g))
        + g * g * (
            Py * Qy + Pz * Rz
            + Fraction(2) * Q * Py.diff(y)
            + Fraction(2) * R * Pz.diff(z)
            + Px * Px
            - Fraction(2) * P * Px.diff(x)
        )
        + g * (
            Fraction(2) * P * P * P * Qx * Rx
            + P * P * Q * Px * Rx
            + P * P * R * Px * Qx
            - P * Q * Q * Py * Ry
            - P * R * R * Pz * Qz
            - Fraction(3) * Q * R * R * Pz * Pz
            - Fraction(3) * Q * Q * R * Py * Py
        )
    )
    e2 = (
        Fraction(-3) * H(Q, y, g) * H(Q, y, g)
        + Fraction(2) * g * H(Q, y, H(Q, y, g))
        + g * g * (
            Px * Qx + Qz * Rz
            + Fraction(2) * R * Qz.diff(z)
            + Fraction(2) * P * Qx.diff(x)
            + Qy * Qy
            - Fraction(2) * Q * Qy.diff(y)
        )
        + g * (
            Fraction(2) * Q * Q * Q * Py * Ry
            + P * Q * Q * Qy * Ry
            + Q * Q * R * Py * Qy
            - P * P * Q * Rx * Qx
            - Q * R * R * Pz * Qz
            - Fraction(3) * P * R * R * Qz * Qz
            - Fraction(3) * P * P * R * Qx * Qx
        )
    )
    e3 = (
        Fraction(-3) * H(R, z, g) * H(R, z, g)
        + Fraction(2) * g * H(R, z, H(R, z, g))
        + g * g * (
            Qy * Ry + Px * Rx
            + Fraction(2) * Q * Ry.diff(y)
            + Fraction(2) * P * Rx.diff(x)
            + Rz * Rz
            - Fraction(2) * R * Rz.diff(z)
        )
        + g * (
            Fraction(2) * R * R * R * Pz * Qz
            + Q * R * R * Pz * Rz
            + P * R * R * Qz * Rz
            - Q * Q * R * Py * Ry
            - P * P * R * Qx * Rx
            - Fraction(3) * P * Q * Q * Ry * Ry
            - Fraction(3) * P * P * Q * Rx * Rx
        )
    )
    return e1, e2, e3


def frame_ricci_diagonal(
    P, Q, R, variables: Optional[Sequence[str]] = None
) -> tuple[RationalFunction, RationalFunction, RationalFunction]:
    """Diagonal Ricci of diag(P,Q,R) in the scaled frame {g^{ii} d_i}.

    Computed through the general curvature pipeline; component i is
    ``2 (g^{ii})^2 Ric_ii``.  The rearranged expressions of
    :func:`ricci_diagonal_via_paper_formula` equal ``2 g^2`` times these.
    """
    if variables is None:
        variables = P.variables
    variables = tuple(variables)
    g = MetricTensor.diagonal(variables, [P, Q, R])
    ric = ricci(riemann(christoffel(invert_metric(g))))
    diag = [_as_rf(e, variables) for e in (P, Q, R)]
    return tuple(
        Fraction(2) * diag[i] * diag[i] * ric[(i, i)] for i in range(3)
    )


@dataclass(frozen=True)
class HDivisibility:
    exact: bool
    quotients: Optional[tuple[Polynomial, Polynomial, Polynomial]] = None
    failure_index: Optional[int] = None
    remainder: Optional[Polynomial] = None


def h_divisibility(P: Polynomial, Q: Polynomial, R: Polynomial) -> HDivisibility:
    """Divide H^i(g) = g^{ii} d_i(g) by g = PQR exactly, for i = 1, 2, 3.

    Returns the three quotients when every division is exact, else the first
    failing index with its remainder witness.
    """
    variables = P.variables
    if Q.variables != variables or R.variables != variables:
        raise SymError("diagonal entries use different variable lists")
    if len(variables) != 3:
        raise SymError("h-divisibility check is three dimensional")
    g = P * Q * R
    if g.is_zero():
        raise SymError("metric determinant is identically zero")
    quotients = []
    for i, (entry, var) in enumerate(zip((P, Q, R), variables)):
        h_of_g = entry * g.diff(var)
        ok, result = divides_exactly(g, h_of_g)
        if not ok:
            return HDivisibility(False, None, i, result)
        quotients.append(result)
    return HDivisibility(True, tuple(quotients))


# -- numeric gradient-flow demo --------------------------------------------------


def gradient_flow_trap_demo(
    g: MetricTensor,
    f: LogLinearExpr | RationalFunction | Polynomial,
    start: dict[str, float],
    steps: int = 1000,
    dt: float = 1e-3,
    near_locus_eps: float = 1e-9,
) -> Trajectory:
    """Fixed-step RK4 integration of x' = g grad f with det-sign monitoring.

    The flow uses the metric exactly as given (component i of the velocity is
    sum_j g^{ij} d_j f).  Reports the sign of det g at every accepted step and
    the minimum |det| attained; integration truncates when evaluation fails
    (pole or log outside its domain).
    """
    variables = g.variables
    if not all(v in start for v in variables):
        raise SymError("start point does not cover the metric variables")
    det = g.det()
    det0 = det.evaluate_float(start)
    if det0 == 0.0:
        raise SymError("start point lies on the degeneracy locus")
    grads = [
        sum(
            (g.g[i][j] * differentiate(f, vj) for j, vj in enumerate(variables)),
            RationalFunction.zero(variables),
        )
        for i in range(len(variables))
    ]

    def velocity(pt):
        return [comp.evaluate_float(pt) for comp in grads]

    times = [0.0]
    points = [dict(start)]
    dets = [det0]
    sign0 = math.copysign(1.0, det0)
    min_abs = abs(det0)
    sign_constant = True
    reason = None
    current = dict(start)
    t = 0.0
    for _ in range(steps):
        try:
            k1 = velocity(current)
            p2 = {v: current[v] + 0.5 * dt * k1[i] for i, v in enumerate(variables)}
            k2 = velocity(p2)
            p3 = {v: current[v] + 0.5 * dt * k2[i] for i, v in enumerate(variables)}
            k3 = velocity(p3)
            p4 = {v: current[v] + dt * k3[i] for i, v in enumerate(variables)}
            k4 = velocity(p4)
            nxt = {
                v: current[v] + dt * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) / 6.0
                for i, v in enumerate(variables)
            }
            dval = det.evaluate_float(nxt)
        except (SymError, OverflowError, ValueError) as exc:
            reason = f"step failed: {exc}"
            break
        if not all(math.isfinite(val) for val in nxt.values()) or not math.isfinite(dval):
            reason = "trajectory left the chart (non-finite values)"
            break
        t += dt
        current = nxt
        times.append(t)
        points.append(dict(current))
        dets.append(dval)
        min_abs = min(min_abs, abs(dval))
        if dval != 0.0 and math.copysign(1.0, dval) != sign0:
            sign_constant = False
    return Trajectory(
        times=times,
        points=points,
        det_values=dets,
        step=dt,
        min_abs_det=min_abs,
        sign_constant=sign_constant,
        truncated_reason=reason,
    )
