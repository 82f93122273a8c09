import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowhjm.basis import (
    OrthonormalBasis,
    RieszRepresenter,
    eval_basis,
    eval_curve,
    generator,
    get_basis,
    gram_schmidt_numeric,
    inner_product_w,
    riesz_representer,
    weight,
)

E = np.eye(7)


def test_weight():
    assert weight(0.0) == 1.0
    xi = np.linspace(0, 10, 50)
    assert np.all(np.diff(weight(xi)) > 0)


def test_eval_basis_examples():
    assert eval_basis(1, 3.7) == 1.0
    assert eval_basis(2, 0.0) == 0.0
    assert eval_basis(3, 1.0) == pytest.approx(math.exp(-1), abs=1e-15)
    assert eval_basis(3, 1.0) == pytest.approx(0.3678794, abs=1e-7)


def test_printed_e5_is_the_literal_formula():
    expected = (1 - 36 - 6) / (42 * math.sqrt(5)) * math.exp(-1)
    assert eval_basis(5, 1.0, variant="printed") == pytest.approx(expected, rel=1e-14)


def test_orthonormal_e5_matches_gram_schmidt_oracle():
    gs = gram_schmidt_numeric([generator(i) for i in range(1, 8)])
    assert eval_basis(5, 1.0) == pytest.approx(float(gs[4](1.0)), abs=1e-10)
    assert eval_basis(5, 1.0) == pytest.approx(math.exp(-1) / 6, abs=1e-14)
    # the printed e_5 is not what Gram-Schmidt produces
    assert abs(eval_basis(5, 1.0, variant="printed") - float(gs[4](1.0))) > 0.1


def test_eval_basis_errors():
    with pytest.raises(IndexError):
        eval_basis(0, 1.0)
    with pytest.raises(IndexError):
        eval_basis(8, 1.0)
    with pytest.raises(ValueError):
        eval_basis(2, -0.1)
    with pytest.raises(ValueError):
        OrthonormalBasis(8, "printed")


def test_decay_of_higher_functions():
    b = get_basis(7)
    far = b.values(60.0)
    assert far[0] == 1.0
    assert far[1] == pytest.approx(-1.0)
    assert np.all(np.abs(far[2:]) < 1e-15)


def test_closed_form_derivatives_match_finite_differences():
    b = get_basis(9)
    xi = np.linspace(0.01, 8, 40)
    h = 1e-6
    fd = (b.values(xi + h) - b.values(xi - h)) / (2 * h)
    np.testing.assert_allclose(b.derivatives(xi), fd, atol=1e-8)


def test_inner_product_examples():
    assert inner_product_w(E[0], E[0]) == 1.0
    assert abs(inner_product_w(E[1], E[2])) < 1e-6
    assert inner_product_w(E[3], E[3]) == pytest.approx(1.0, abs=1e-6)


def test_e4_norm_by_high_precision_integration():
    # independent of the polynomial machinery: mpmath quadrature of the printed e_4
    mpmath.mp.dps = 30
    f = lambda t: mpmath.mpf(1) / 2 * (t**2 - 2 * t) * mpmath.exp(-t)
    df = lambda t: mpmath.diff(f, t)
    norm2 = f(0) ** 2 + mpmath.quad(lambda t: mpmath.exp(t) * df(t) ** 2, [0, mpmath.inf])
    assert float(norm2) == pytest.approx(1.0, abs=1e-20)
    assert inner_product_w(E[3], E[3]) == pytest.approx(float(norm2), abs=1e-12)


def test_inner_product_callable_and_coefficients_agree():
    b = get_basis(7)
    f = lambda xi: b.values(xi)[4]
    g = lambda xi: b.values(xi)[2] + 0.5 * b.values(xi)[3]
    assert inner_product_w(f, g) == pytest.approx(inner_product_w(E[4], E[2] + 0.5 * E[3]), abs=1e-9)


def test_inner_product_rejects_non_finite():
    with pytest.raises(ValueError):
        inner_product_w(lambda xi: np.full_like(xi, np.nan), E[0])


def test_orthonormality_all_pairs():
    G = np.array([[inner_product_w(E[i], E[j]) for j in range(7)] for i in range(7)])
    assert np.max(np.abs(G - np.eye(7))) < 1e-6


def test_orthonormality_beyond_seven():
    eye = np.eye(10)
    G = np.array([[inner_product_w(eye[i], eye[j]) for j in range(10)] for i in range(10)])
    assert np.max(np.abs(G - np.eye(10))) < 1e-6


def test_printed_variant_is_not_orthogonal():
    # the literal e_5 overlaps e_3 by -12 sqrt(5) / 35
    val = inner_product_w(E[2], E[4], variant="printed")
    assert val == pytest.approx(-12 * math.sqrt(5) / 35, abs=1e-9)
    assert inner_product_w(E[4], E[4], variant="printed") == pytest.approx(1.0, abs=1e-9)


def test_eval_curve_examples():
    x = np.zeros(7)
    x[0] = 0.42
    assert eval_curve(x, 2.5) == pytest.approx(0.42, abs=1e-15)
    assert eval_curve(E[1], 0.0) == 0.0
    x = np.array([0.3, -0.2, 0.1, 0, 0, 0, 0])
    expected = 0.3 - 0.2 * (math.exp(-0.5) - 1) + 0.1 * 0.5 * math.exp(-0.5)
    assert eval_curve(x, 0.5) == pytest.approx(expected, abs=1e-15)


def test_eval_curve_batches():
    rng = np.random.default_rng(0)
    X = rng.uniform(-0.5, 0.5, (4, 7))
    xi = np.array([0.0, 0.3, 1.0])
    out = eval_curve(X, xi)
    assert out.shape == (4, 3)
    np.testing.assert_allclose(out[2], [eval_curve(X[2], v) for v in xi], rtol=1e-14)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-1, 1), min_size=7, max_size=7),
    st.lists(st.floats(-1, 1), min_size=7, max_size=7),
    st.floats(-3, 3),
    st.floats(-3, 3),
    st.floats(0, 10),
)
def test_eval_curve_is_linear(x, y, a, c, xi):
    x, y = np.array(x), np.array(y)
    lhs = eval_curve(a * x + c * y, xi)
    rhs = a * eval_curve(x, xi) + c * eval_curve(y, xi)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_gram_schmidt_single_constant():
    (e1,) = gram_schmidt_numeric([generator(1)])
    np.testing.assert_allclose(e1(np.linspace(0, 5, 7)), 1.0, atol=1e-12)


def test_gram_schmidt_two_generators():
    e1, e2 = gram_schmidt_numeric([generator(1), generator(2)])
    xi = np.linspace(0, 5, 11)
    np.testing.assert_allclose(e2(xi), np.exp(-xi) - 1, atol=1e-10)


def test_gram_schmidt_reproduces_closed_forms():
    gs = gram_schmidt_numeric([generator(i) for i in range(1, 8)])
    xi = np.linspace(0, 5, 100)
    closed = get_basis(7).values(xi)
    for i in range(7):
        np.testing.assert_allclose(gs[i](xi), closed[i], atol=1e-5)


def test_gram_schmidt_dependent_generators():
    gens = [generator(1), generator(2), lambda xi: 2.0 * generator(2)(xi)]
    with pytest.raises(ValueError, match="generator 3"):
        gram_schmidt_numeric(gens)


def test_riesz_examples():
    assert riesz_representer(0.0, 3.0) == 1.0
    assert riesz_representer(2.0, 0.0) == 1.0
    assert riesz_representer(1.0, 2.0) == pytest.approx(2 - math.exp(-1), abs=1e-15)
    assert riesz_representer(1.0, 2.0) == pytest.approx(1.6321206, abs=1e-7)
    h = RieszRepresenter(1.0)
    assert float(h(2.0)) == riesz_representer(1.0, 2.0)


@pytest.mark.parametrize("xi", [0.0, 0.05, 1 / 12, 0.5, 1.0])
def test_riesz_reproduces_point_values(xi):
    h = RieszRepresenter(xi)
    vals = get_basis(7).values(xi)
    for i in range(7):
        assert abs(inner_product_w(h, E[i]) - vals[i]) < 1e-5
