"""Shared constructors for the worked examples used across test modules."""

from fractions import Fraction

import pytest

from liesep.operators import (
    CoefficientSpec,
    FirstOrderOp,
    MetricTensor,
    Realization,
)
from liesep.symcore import parse_polynomial

UVW = ("u", "v", "w")
XYZ = ("x", "y", "z")


def p_uvw(text):
    return parse_polynomial(text, UVW)


def p_xyz(text):
    return parse_polynomial(text, XYZ)


def a13_realization() -> Realization:
    gens = []
    for var in UVW:
        gens.append(FirstOrderOp.from_components(UVW, ["1" if v == var else "0" for v in UVW]))
        gens.append(FirstOrderOp.from_components(UVW, [var if v == var else "0" for v in UVW]))
    # order: d_u, u d_u, d_v, v d_v, d_w, w d_w
    return Realization(tuple(gens), name="a1+a1+a1")


def a13_spec(alpha, beta, gamma) -> CoefficientSpec:
    alpha, beta, gamma = Fraction(alpha), Fraction(beta), Fraction(gamma)
    C = [
        [Fraction(1, 2), 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 1, 0],
        [0, 1, 0, 1, 0, 0],
        [0, 0, 1, 0, 2, 0],
        [0, 1, 0, 2, 0, 1],
        [0, 0, 0, 0, 1, 0],
    ]
    L = [0, 2 * alpha, 4 * beta - 4, 4 * alpha, 4 * beta + 4 * gamma - 6, 4 * alpha]
    return CoefficientSpec(tuple(tuple(Fraction(v) for v in row) for row in C), tuple(L))


def a13_metric() -> MetricTensor:
    rows = [
        ["-1", "-2*u", "-2*u"],
        ["-2*u", "-4*v", "-4*v"],
        ["-2*u", "-4*v", "-4*w"],
    ]
    return MetricTensor.from_polynomials(UVW, [[p_uvw(t) for t in row] for row in rows])


def a3_realization() -> Realization:
    gens = []
    coeffs = ["1", "x", "y", "z"]
    # column-major like the canonical affine listing: d_x, d_y, d_z, then x d_x ...
    for c in ["1"]:
        for var in XYZ:
            gens.append(
                FirstOrderOp.from_components(XYZ, [c if v == var else "0" for v in XYZ])
            )
    for c in ["x", "y", "z"]:
        for var in XYZ:
            gens.append(
                FirstOrderOp.from_components(XYZ, [c if v == var else "0" for v in XYZ])
            )
    return Realization(tuple(gens), name="affine(3)")


def sl4_metric() -> MetricTensor:
    rows = [
        ["2*x^2 - z^2 - 4*y - 8", "2*(x*y - 6*x)", "3*x*z"],
        ["2*(x*y - 6*x)", "4*(y^2 - 2*x^2 - 2*z^2 - 4)", "2*(y*z + 6*z)"],
        ["3*x*z", "2*(y*z + 6*z)", "2*z^2 - x^2 + 4*y - 8"],
    ]
    return MetricTensor.from_polynomials(XYZ, [[p_xyz(t) for t in row] for row in rows])


@pytest.fixture
def a13():
    return a13_realization()


@pytest.fixture
def a3():
    return a3_realization()
