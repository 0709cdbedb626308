import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastica2d.complex_analytic import (
    AnalyticExpr,
    ExpTerm,
    Monomial,
    antiderivative,
    derivative,
    evaluate,
    laurent_of_reciprocal_conj,
    principal_part,
    taylor,
    wirtinger_fd,
)
from elastica2d.errors import LogarithmRequired, PoleEvaluation, WrongZeroOrder

Z = AnalyticExpr.identity()
quartic = AnalyticExpr.polynomial([-1, 0, 0, 0, 1])

small = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, small, small)


def test_eval_root_pole_euler():
    assert evaluate(quartic, 1) == 0
    with pytest.raises(PoleEvaluation):
        evaluate(AnalyticExpr.monomial(0.1, -1, 1), 1)
    assert abs(evaluate(AnalyticExpr.exp(1, 1), 1j * np.pi) - (-1)) < 1e-15


def test_pole_threshold_is_a_distance():
    k = AnalyticExpr.monomial(1, -1, 1)
    with pytest.raises(PoleEvaluation):
        k(1 + 1e-13)
    assert abs(k(1 + 1e-6) - 1e6) < 1e-3


def test_pole_evaluation_is_a_zero_division():
    with pytest.raises(ZeroDivisionError):
        AnalyticExpr.monomial(1, -2)(0)


def test_vectorized_eval_matches_scalar(rng):
    z = rng.normal(size=7) + 1j * rng.normal(size=7)
    e = quartic + AnalyticExpr.exp(0.5, 1j) + AnalyticExpr.monomial(2, -1, 3)
    vec = evaluate(e, z)
    assert np.allclose(vec, [evaluate(e, complex(w)) for w in z], rtol=0, atol=1e-13)


def test_derivative_examples():
    e = AnalyticExpr.polynomial([0, -1, 0, 0, 0, 0.2])
    assert derivative(e).isclose(quartic)
    c, n = 1.3, 2
    H = AnalyticExpr.exp(2 * c / n, n / 2)
    assert derivative(H).isclose(AnalyticExpr.exp(c, n / 2))
    assert derivative(AnalyticExpr.constant(5)) == AnalyticExpr()


def test_antiderivative_examples():
    assert antiderivative(quartic).isclose(AnalyticExpr.polynomial([0, -1, 0, 0, 0, 0.2]))
    with pytest.raises(LogarithmRequired):
        antiderivative(AnalyticExpr.monomial(1, -1, 1))
    c, n = 0.7, 3
    assert antiderivative(AnalyticExpr.exp(c * c, n)).isclose(AnalyticExpr.exp(c * c / n, n))


def test_entire_and_polynomial_flags():
    assert quartic.is_entire and quartic.is_polynomial
    k = AnalyticExpr.monomial(1, -1, 1j)
    assert not k.is_entire and k.pole_centers == [1j]
    assert AnalyticExpr.exp(1, 1).is_entire and not AnalyticExpr.exp(1, 1).is_polynomial


def test_like_terms_merge_and_cancel():
    e = AnalyticExpr.monomial(1, 2) + AnalyticExpr.monomial(-1, 2)
    assert e == AnalyticExpr()
    assert (Z + Z).terms == (Monomial(2, 1, 0j),)


def test_immutable():
    with pytest.raises(AttributeError):
        quartic.terms = ()


def test_from_roots_matches_product():
    e = AnalyticExpr.from_roots([(1, 2), (-1j, 1)], 3)
    z = 0.3 + 0.8j
    assert abs(e(z) - 3 * (z - 1) ** 2 * (z + 1j)) < 1e-14


def test_taylor_of_polynomial_about_point():
    c = taylor(quartic, 1, 5)
    assert np.allclose(c, [0, 4, 6, 4, 1])


def test_taylor_negative_power_generalised_binomial():
    # 1/(z - 2) about 0: -sum z^j / 2^(j+1)
    c = taylor(AnalyticExpr.monomial(1, -1, 2), 0, 4)
    assert np.allclose(c, [-1 / 2, -1 / 4, -1 / 8, -1 / 16])


def test_taylor_exp():
    c = taylor(AnalyticExpr.exp(2, 1j), 0.5, 4)
    base = 2 * cmath.exp(0.5j)
    assert np.allclose(c, [base, base * 1j, base * (1j) ** 2 / 2, base * (1j) ** 3 / 6])


def test_principal_part_examples():
    assert np.allclose(principal_part(-4 / 5, quartic, 1, 1), [-1 / 5])
    assert np.allclose(principal_part(0, quartic, 1j, 1), [0])
    assert np.allclose(principal_part(1, AnalyticExpr.monomial(1, 2), 0, 2), [1, 0])


def test_principal_part_wrong_order():
    with pytest.raises(WrongZeroOrder):
        principal_part(1, quartic, 1, 2)
    with pytest.raises(WrongZeroOrder):
        principal_part(1, AnalyticExpr.monomial(1, 3), 0, 2)


def test_principal_part_simple_zero_formula(rng):
    h = AnalyticExpr.from_roots([(0.4 - 0.2j, 1), (1.5, 1)], 0.7 + 0.1j)
    p = 0.4 - 0.2j
    numer = 0.3 + 0.9j
    (c,) = principal_part(numer, h, p, 1)
    assert abs(c - numer / np.conj(derivative(h)(p))) < 1e-14


@pytest.mark.parametrize("order", [1, 2, 3])
def test_principal_part_removes_singularity(order):
    p = 0.2 + 0.1j
    h = AnalyticExpr.from_roots([(p, order), (-1, 1)], 1.1)
    numer = 0.8 - 0.3j
    coeffs = principal_part(numer, h, p, order)

    def remainder(z):
        # factored h: the expanded polynomial loses digits next to a multiple root
        w = np.conj(z - p)
        pp = sum(c * w ** m for m, c in zip(range(-order, 0), coeffs))
        return numer / np.conj(1.1 * (z - p) ** order * (z + 1)) - pp

    sup = [np.max(np.abs(remainder(p + r * np.exp(1j * np.linspace(0, 2 * np.pi, 64))))) for r in (1e-2, 1e-3)]
    assert sup[1] < 2 * sup[0] + 1e-6
    assert sup[0] < 10


def test_laurent_includes_regular_terms():
    # 1/conj(z^2 (1 + z)) = wbar^-2 (1 - wbar + wbar^2 ...)
    h = AnalyticExpr.polynomial([0, 0, 1, 1])
    c = laurent_of_reciprocal_conj(1, h, 0, 2, upto=1)
    assert np.allclose(c, [1, -1, 1, -1])


def test_wirtinger_fd_examples():
    assert np.allclose(wirtinger_fd(lambda z: z, 0.3 + 0.1j), (1, 0))
    assert np.allclose(wirtinger_fd(np.conj, 0.3 + 0.1j), (0, 1))
    fz, fzb = wirtinger_fd(lambda z: z * z, 1 + 1j, 1e-5)
    assert abs(fz - (2 + 2j)) < 1e-8 and abs(fzb) < 1e-8


def test_wirtinger_fd_vectorized(rng):
    z = rng.normal(size=5) + 1j * rng.normal(size=5)
    fz, fzb = wirtinger_fd(lambda w: w * np.conj(w), z)
    assert np.allclose(fz, np.conj(z), atol=1e-9) and np.allclose(fzb, z, atol=1e-9)


def test_str_is_readable():
    s = str(AnalyticExpr.monomial(0.1, -1, 1))
    assert "z" in s and "-1" in s


def test_mixed_products():
    e = AnalyticExpr.exp(2, 1) * AnalyticExpr.exp(3, 1j)
    assert e.terms == (ExpTerm(6, 1 + 1j),)
    with pytest.raises(ValueError):
        Z * AnalyticExpr.exp(1, 1)


term = st.one_of(
    st.builds(Monomial, cplx, st.integers(0, 4), cplx),
    st.builds(Monomial, cplx, st.integers(-3, -2), st.just(0j)),
    st.builds(ExpTerm, cplx, cplx),
)
expr = st.lists(term, min_size=1, max_size=4).map(AnalyticExpr)


@settings(max_examples=60, deadline=None)
@given(expr)
def test_derivative_of_antiderivative_is_identity(e):
    assert derivative(antiderivative(e)).isclose(e, rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(expr, expr, st.builds(complex, st.floats(0.5, 1.5), st.floats(0.5, 1.5)))
def test_sum_and_product_evaluate_pointwise(a, b, z):
    scale = 1 + abs(a(z)) + abs(b(z))
    assert abs((a + b)(z) - (a(z) + b(z))) <= 1e-12 * scale
    try:
        prod = a * b
    except ValueError:
        return
    assert abs(prod(z) - a(z) * b(z)) <= 1e-10 * scale**2


@settings(max_examples=40, deadline=None)
@given(expr, st.builds(complex, st.floats(0.5, 1.5), st.floats(0.5, 1.5)))
def test_fd_detects_holomorphy(e, z):
    fz, fzb = wirtinger_fd(e, z, 1e-4)
    d = derivative(e)(z)
    scale = 1 + abs(d) + max(abs(e(z + s)) for s in (1e-4, -1e-4, 1e-4j, -1e-4j))
    assert abs(fzb) < 1e-6 * scale
    assert abs(fz - d) < 1e-6 * scale
