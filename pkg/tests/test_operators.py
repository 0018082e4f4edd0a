"""Operator assembly, metric extraction, Laplace-Beltrami, imprimitivity."""

import random
from fractions import Fraction

import pytest

from conftest import (
    UVW,
    XYZ,
    a13_metric,
    a13_spec,
    p_uvw,
    p_xyz,
)
from liesep.operators import (
    CoefficientSpec,
    FirstOrderOp,
    MetricTensor,
    Realization,
    SecondOrderOp,
    VectorField,
    build_lie_algebraic,
    check_imprimitivity,
    compose,
    decompose,
    extract_metric,
    first_order_as_second,
    laplace_beltrami,
    lie_bracket,
    verify_closure_under_bracket,
)
from liesep.symcore import (
    LogLinearExpr,
    Polynomial,
    RationalFunction,
    SymError,
    parse_polynomial,
)


def rf_uvw(text):
    return RationalFunction.from_polynomial(p_uvw(text))


class TestLieBracket:
    def test_canonical_a1_relation(self):
        d_u = FirstOrderOp.from_components(UVW, ["1", "0", "0"])
        u_d_u = FirstOrderOp.from_components(UVW, ["u", "0", "0"])
        assert lie_bracket(d_u, u_d_u).vector.components == d_u.vector.components
        assert lie_bracket(d_u, u_d_u).multiplier.is_zero()

    def test_rotation_pair(self):
        x_d_y = FirstOrderOp.from_components(XYZ, ["0", "x", "0"])
        y_d_x = FirstOrderOp.from_components(XYZ, ["y", "0", "0"])
        b = lie_bracket(x_d_y, y_d_x)
        expected = FirstOrderOp.from_components(XYZ, ["x", "-y", "0"])
        assert b.vector.components == expected.vector.components

    def test_self_bracket_vanishes(self):
        T = FirstOrderOp.from_components(XYZ, ["x*y", "z", "1"], multiplier="x")
        b = lie_bracket(T, T)
        assert b.vector.is_zero() and b.multiplier.is_zero()


class TestBuild:
    def test_a13_expansion(self, a13):
        alpha, beta, gamma = Fraction(2), Fraction(3), Fraction(5)
        H = build_lie_algebraic(a13_spec(alpha, beta, gamma), a13)
        expected_A = [
            ["1/2", "u", "u"],
            ["u", "2*v", "2*v"],
            ["u", "2*v", "2*w"],
        ]
        for i in range(3):
            for j in range(3):
                assert H.A[i][j] == rf_uvw(expected_A[i][j])
        assert H.b.components[0] == rf_uvw(f"{2*alpha}*u")
        assert H.b.components[1] == rf_uvw(f"{4*beta - 3} + {4*alpha}*v")
        assert H.b.components[2] == rf_uvw(f"{4*beta + 4*gamma - 5} + {4*alpha}*w")
        assert H.c.is_zero()

    def test_single_generator(self, a13):
        spec = CoefficientSpec(
            tuple(tuple(Fraction(0) for _ in range(6)) for _ in range(6)),
            (Fraction(1), 0, 0, 0, 0, 0),
        )
        H = build_lie_algebraic(spec, a13)
        assert H.b.components[0] == rf_uvw("1")
        assert all(H.A[i][j].is_zero() for i in range(3) for j in range(3))

    def test_linearity_in_coefficients(self, a13):
        rng = random.Random(42)

        def random_spec():
            C = [[Fraction(0)] * 6 for _ in range(6)]
            for i in range(6):
                for j in range(i, 6):
                    C[i][j] = C[j][i] = Fraction(rng.randint(-2, 2))
            L = tuple(Fraction(rng.randint(-3, 3)) for _ in range(6))
            return CoefficientSpec(tuple(tuple(r) for r in C), L)

        for _ in range(5):
            s1 = random_spec()
            s2 = random_spec()
            joint = CoefficientSpec(
                tuple(
                    tuple(s1.C[i][j] + s2.C[i][j] for j in range(6)) for i in range(6)
                ),
                tuple(s1.L[k] + s2.L[k] for k in range(6)),
            )
            H = build_lie_algebraic(joint, a13)
            H12 = build_lie_algebraic(s1, a13) + build_lie_algebraic(s2, a13)
            assert H == H12

    def test_metric_ignores_antisymmetric_part(self, a13):
        rng = random.Random(43)
        C = [[Fraction(rng.randint(-2, 2)) for _ in range(6)] for _ in range(6)]
        sym = [[(C[i][j] + C[j][i]) / 2 for j in range(6)] for i in range(6)]
        spec = CoefficientSpec(tuple(tuple(r) for r in sym), (Fraction(0),) * 6)
        H_sym = build_lie_algebraic(spec, a13)
        H_raw = SecondOrderOp.zero(UVW)
        for i in range(6):
            for j in range(6):
                if C[i][j]:
                    H_raw = H_raw + compose(a13.generators[i], a13.generators[j]) * C[i][j]
        assert extract_metric(H_raw) == extract_metric(H_sym)

    def test_size_mismatch(self, a13):
        spec = CoefficientSpec(((Fraction(1),),), (Fraction(0),))
        with pytest.raises(SymError):
            build_lie_algebraic(spec, a13)


class TestExtractMetric:
    def test_a13_reproduces_reference_metric(self, a13):
        H = build_lie_algebraic(a13_spec(1, 2, 3), a13)
        assert extract_metric(H) == a13_metric()

    def test_euclidean(self):
        half = Fraction(-1, 2)
        ident = MetricTensor.diagonal(XYZ, ["1", "1", "1"])
        H = SecondOrderOp(
            tuple(
                tuple(ident.g[i][j] * half for j in range(3)) for i in range(3)
            ),
            VectorField.zero(XYZ),
            RationalFunction.zero(XYZ),
        )
        assert extract_metric(H) == ident


class TestLaplaceBeltrami:
    def test_euclidean(self):
        ident = MetricTensor.diagonal(XYZ, ["1", "1", "1"])
        delta = laplace_beltrami(ident)
        assert delta.b.is_zero()
        assert delta.A == ident.g

    def test_second_order_part_is_the_metric(self):
        g = MetricTensor.diagonal(XYZ, ["1 + x^2", "2", "1 + y^2"])
        assert laplace_beltrami(g).A == g.g

    def test_cylindrical_comparison_metric(self):
        g = MetricTensor.diagonal(XYZ, ["1", "1", "z^2"])
        delta = laplace_beltrami(g)
        assert delta.b.components[0].is_zero()
        assert delta.b.components[1].is_zero()
        assert delta.b.components[2] == RationalFunction.from_polynomial(p_xyz("z"))

    def test_reference_metric_first_order(self):
        delta = laplace_beltrami(a13_metric())
        assert delta.b.components[0].is_zero()
        assert delta.b.components[1] == rf_uvw("-4")
        assert delta.b.components[2] == rf_uvw("-6")

    def test_degenerate_metric_rejected(self):
        g = MetricTensor.diagonal(XYZ, ["1", "0", "1"])
        with pytest.raises(SymError):
            laplace_beltrami(g)


class TestDecompose:
    def test_reference_operator(self, a13):
        alpha, beta, gamma = Fraction(1), Fraction(2), Fraction(3)
        H = build_lie_algebraic(a13_spec(alpha, beta, gamma), a13)
        V, U0 = decompose(H, a13_metric())
        # exact remainder after removing -1/2 Delta; the constant offsets
        # (0, -5, -8) relative to the naive divergence-free reading are real
        assert V.components[0] == rf_uvw(f"{2*alpha}*u")
        assert V.components[1] == rf_uvw(f"{4*beta - 5} + {4*alpha}*v")
        assert V.components[2] == rf_uvw(f"{4*beta + 4*gamma - 8} + {4*alpha}*w")
        assert U0.is_zero()

    def test_pure_laplacian(self):
        g = MetricTensor.diagonal(XYZ, ["1", "1", "z^2"])
        H = laplace_beltrami(g) * Fraction(-1, 2)
        V, U0 = decompose(H, g)
        assert V.is_zero()
        assert U0.is_zero()

    def test_metric_mismatch(self):
        g = MetricTensor.diagonal(XYZ, ["1", "1", "1"])
        H = laplace_beltrami(MetricTensor.diagonal(XYZ, ["1", "1", "z^2"])) * Fraction(-1, 2)
        with pytest.raises(SymError):
            decompose(H, g)


class TestImprimitivity:
    def test_a13_invariant_foliations(self, a13):
        for name in ("u", "v"):
            lam = LogLinearExpr.from_polynomial(p_uvw(name))
            assert check_imprimitivity(a13, lam)

    def test_a3_is_primitive(self, a3):
        for text in ("x", "x^2 + y^2", "x^2 + y^2 + z^2"):
            lam = LogLinearExpr.from_polynomial(p_xyz(text))
            assert not check_imprimitivity(a3, lam)

    def test_reparametrization_invariance(self, a13):
        for name in ("u", "v"):
            lam = p_uvw(name)
            reparam = LogLinearExpr.from_polynomial(lam + lam**3)
            assert check_imprimitivity(a13, reparam)

    def test_constant_rejected(self, a13):
        with pytest.raises(SymError):
            check_imprimitivity(a13, LogLinearExpr.from_polynomial(Polynomial.constant(UVW, 4)))


class TestClosure:
    def test_a13_closed(self, a13):
        assert verify_closure_under_bracket(a13).closed

    def test_a3_closed(self, a3):
        assert verify_closure_under_bracket(a3).closed

    def test_sl2_truncation_fails(self):
        gens = (
            FirstOrderOp.from_components(("x",), ["1"]),
            FirstOrderOp.from_components(("x",), ["x^2"]),
        )
        report = verify_closure_under_bracket(Realization(gens))
        assert not report.closed
        i, j, bracket = report.witness
        assert (i, j) == (0, 1)
        assert bracket.vector.components[0] == RationalFunction.from_polynomial(
            parse_polynomial("2*x", ("x",))
        )


class TestApply:
    def test_second_order_leibniz_samples(self):
        rng = random.Random(5)
        g = MetricTensor.diagonal(XYZ, ["1", "1 + x^2", "z^2"])
        H = laplace_beltrami(g)
        # H(f*h) - f*H(h) - h*H(f) == 2 A(grad f, grad h) on samples
        for _ in range(4):
            f = Polynomial(XYZ, {(rng.randint(0, 2), rng.randint(0, 2), 0): Fraction(rng.randint(1, 3))})
            h = Polynomial(XYZ, {(0, rng.randint(0, 2), rng.randint(0, 2)): Fraction(rng.randint(1, 3))})
            left = H.apply(f * h) - f * H.apply(h) - h * H.apply(f)
            cross = RationalFunction.zero(XYZ)
            for i, vi in enumerate(XYZ):
                for j, vj in enumerate(XYZ):
                    cross = cross + g.g[i][j] * f.diff(vi) * h.diff(vj)
            assert left == cross * 2

    def test_compose_matches_sequential_application(self):
        X = FirstOrderOp.from_components(XYZ, ["y", "0", "1"], multiplier="x")
        Y = FirstOrderOp.from_components(XYZ, ["0", "x*z", "0"], multiplier="2")
        f = p_xyz("x^2*y + z")
        seq = X.apply(RationalFunction.from_polynomial(f).numerator)  # X(f)
        seq = X.apply(Y.apply(f).as_polynomial())
        joint = compose(X, Y).apply(f)
        assert joint == seq
