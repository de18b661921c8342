"""Chebyshev node placement, tensor interpolation, and the error bound."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourier_mpc.chebyshev import (
    MAX_DEGREE,
    ChebModel,
    cheb_nodes,
    error_bound,
    interp_1d,
    interp_2d,
)


def cheb_eval(coeffs, x):
    return np.polynomial.chebyshev.chebval(x, coeffs)


@pytest.mark.parametrize("m", [0, 1, 4, 9, 32])
def test_nodes_are_roots_of_the_next_polynomial(m):
    x = cheb_nodes(m)
    s = np.arange(m + 1)
    assert x == pytest.approx(np.cos((2 * s + 1) * np.pi / (2 * m + 2)),
                              abs=1e-15)
    basis = [0.0] * (m + 1) + [1.0]
    assert np.polynomial.chebyshev.chebval(x, basis) == pytest.approx(
        np.zeros(m + 1), abs=1e-12
    )


def test_degree_cap():
    with pytest.raises(ValueError):
        cheb_nodes(MAX_DEGREE + 1)
    with pytest.raises(ValueError):
        interp_1d(lambda x: x, -1)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=9))
@settings(max_examples=60, deadline=None)
def test_interpolation_reproduces_polynomials_exactly(coeffs):
    # interpolation at m+1 nodes is exact for any degree-m polynomial
    m = len(coeffs) - 1
    got = interp_1d(lambda x: cheb_eval(coeffs, x), m)
    assert got == pytest.approx(np.array(coeffs), abs=1e-9)


def test_interpolant_matches_function_at_nodes():
    f = math.exp
    m = 10
    c = interp_1d(f, m)
    for x in cheb_nodes(m):
        assert cheb_eval(c, x) == pytest.approx(f(x), abs=1e-12)


def test_square_at_degree_one_hits_the_bound_exactly():
    c = interp_1d(lambda x: x * x, 1)
    grid = np.linspace(-1, 1, 20001)
    err = float(np.max(np.abs(cheb_eval(c, grid) - grid**2)))
    bound = error_bound(2.0, 1)
    assert bound == pytest.approx(0.5, abs=1e-12)
    assert err == pytest.approx(0.5, abs=1e-12)


FOUR_FUNCTIONS = [
    # (f, bound on |f^(m+1)| over [-1, 1] for any m)
    (lambda x: x * x, lambda m: 2.0 if m == 1 else 0.0),
    (math.exp, lambda m: math.e),
    (lambda x: math.sin(math.pi * x / 2), lambda m: (math.pi / 2) ** (m + 1)),
    (lambda x: 1.0 / (2.0 - x), lambda m: math.factorial(m + 1)),
]


@pytest.mark.parametrize("fi", range(4))
@pytest.mark.parametrize("m", [1, 3, 6, 10])
def test_bound_dominates_observed_error(fi, m):
    f, deriv = FOUR_FUNCTIONS[fi]
    c = interp_1d(f, m)
    grid = np.linspace(-1, 1, 2001)
    err = float(np.max(np.abs(cheb_eval(c, grid) - np.vectorize(f)(grid))))
    assert err <= error_bound(deriv(m), m) + 1e-12


def test_tensor_interpolation_of_bilinear_form_is_exact():
    model = interp_2d(lambda a, b: 2.0 + a * b - 0.5 * a, 1, 1)
    c = model.matrix()
    assert c == pytest.approx(np.array([[2.0, 0.0], [-0.5, 1.0]]), abs=1e-12)
    rng = np.random.default_rng(0)
    for a, b in rng.uniform(-1, 1, (20, 2)):
        assert model(float(a), float(b)) == pytest.approx(
            2.0 + a * b - 0.5 * a, abs=1e-12
        )


def test_tensor_interpolation_converges_on_smooth_function():
    phi = lambda a, b: math.exp(-(a * a + b * b) / 2)
    errs = []
    for m in (4, 8, 14):
        model = interp_2d(phi, m, m)
        grid = np.linspace(-1, 1, 41)
        errs.append(max(abs(model(float(a), float(b)) - phi(a, b))
                        for a in grid for b in grid))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-10


def test_model_record_round_trip():
    model = interp_2d(lambda a, b: a + b, 2, 3, bound=0.25)
    again = ChebModel.from_record(model.to_record())
    assert again == model
