"""Coefficient sets, closed-form sums, and the dual-path sum identity."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourier_mpc.fourier import (
    CoefficientSet,
    MixedParity,
    NonPositiveIdentitySum,
    TauOutOfRange,
    coefficients_by_quadrature,
    constants_pipeline,
    constants_product,
    convolve,
    cosine_coefficients,
    cross_integral,
    dense,
    identity_gap,
    kernel_transform,
    moment,
    moment_tail_bound,
    normalize_eta,
    normalized_cosine_basis,
    parity_split,
    sum_alternating,
    sum_inverse,
    sum_inverse_squared,
)

TAUS = [0.1, 0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.9]


def brute(fn, tau, terms=2_000_000):
    m = np.arange(1, terms + 1, dtype=float)
    return float(fn(m, tau).sum())


@pytest.mark.parametrize("tau", TAUS)
def test_closed_form_sums_match_brute_force(tau):
    assert sum_inverse(tau) == pytest.approx(
        brute(lambda m, t: 1.0 / (m * m - t * t), tau), abs=1e-6
    )
    assert sum_inverse_squared(tau) == pytest.approx(
        brute(lambda m, t: 1.0 / (m * m - t * t) ** 2, tau), rel=1e-9
    )
    # alternating series converge slowly; average consecutive partial sums
    m = np.arange(1, 200_001, dtype=float)
    terms = ((-1.0) ** m) / (m * m - tau * tau)
    partial = np.cumsum(terms)
    assert sum_alternating(tau) == pytest.approx(
        0.5 * (partial[-1] + partial[-2]), abs=1e-9
    )


def test_quadrature_recovers_trig_polynomial():
    def f(x):
        return (0.15 + 0.5 * math.cos(math.pi * x)
                - 0.2 * math.cos(3 * math.pi * x)
                + 0.7 * math.sin(2 * math.pi * x))

    quad = coefficients_by_quadrature(f, M=8)
    assert quad.alpha0 == pytest.approx(0.3, abs=1e-10)
    assert np.array(quad.cosine) == pytest.approx(
        [0.5, 0.0, -0.2, 0.0, 0.0, 0.0, 0.0, 0.0], abs=1e-10
    )
    assert np.array(quad.sine) == pytest.approx(
        [0.0, 0.7, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], abs=1e-10
    )


def test_tau_range_is_enforced():
    for bad in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(TauOutOfRange):
            cosine_coefficients(bad)


def test_moment_closed_form_vs_truncation():
    cs = cosine_coefficients(1.0 / 6.0)
    closed = moment(cs, 2)
    alphas = cs.alphas(2_000_000)
    assert closed == pytest.approx(float((alphas**2)[::-1].sum()), abs=1e-10)


def test_moment_tail_bound_is_certified():
    cs = cosine_coefficients(0.4)
    rule = cs.cosine
    for M in (8, 64):
        tail = float((rule.alphas(10 * M)[M:] ** 2).sum())
        assert tail <= moment_tail_bound(rule.alpha0, rule.tau, 2, M)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("tau", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_normalization_identity(tau, n):
    basis = normalized_cosine_basis(tau, n)
    assert abs(identity_gap(basis, n)) < 1e-9


def test_normalize_eta_scales_all_inputs():
    cs = cosine_coefficients(0.3)
    eta, sets = normalize_eta([cs, cs, cs])
    assert all(s.normalized and s.eta == eta for s in sets)
    c, s = constants_product(sets)
    assert c + s == pytest.approx(1.0, abs=1e-12)


def test_normalize_eta_rejects_non_positive_sum():
    bad = dense(0.0, (), (-2.0,))
    with pytest.raises(NonPositiveIdentitySum):
        normalize_eta([bad, bad, bad])  # odd product of negative sine modes


# -- convolution machinery --------------------------------------------------

def test_cosine_convolution_matches_quadrature():
    # convolve two dense cosine sets and compare against the sampled convolution
    rng = np.random.default_rng(1)
    a = dense(rng.normal(), rng.normal(size=4) / np.arange(1, 5) ** 2)
    b = dense(rng.normal(), rng.normal(size=4) / np.arange(1, 5) ** 2)

    def f(cs):
        def val(x):
            out = cs.alpha0 / 2.0
            for m, am in enumerate(cs.cosine, start=1):
                out += am * math.cos(m * math.pi * x)
            return out
        return val

    fa, fb = f(a), f(b)
    K = 512
    t = -1.0 + 2.0 * np.arange(K) / K
    for x in (0.0, 0.37, -0.81):
        direct = float(np.mean([fa(ti) * fb(x - ti) for ti in t]) * 2.0)
        conv = convolve(a, b)
        assert f(conv)(x) == pytest.approx(direct, abs=1e-10)


def test_sine_convolution_flips_to_cosine_with_sign():
    a = dense(0.0, (), (1.0, 0.5))
    b = dense(0.0, (), (2.0, -1.0))
    out = convolve(a, b)
    assert out.alpha0 == 0.0
    assert out.cosine == (-2.0, 0.5)
    assert out.sine == ()


def test_convolve_rejects_mixed_parity():
    mixed = dense(1.0, (0.5,), (0.5,))
    pure = dense(1.0, (0.5,))
    with pytest.raises(MixedParity):
        convolve(mixed, pure)
    with pytest.raises(MixedParity):
        convolve(pure, dense(0.0, (), (1.0,)))


def test_kernel_transform_moves_sine_modes_to_cosine():
    s = dense(0.0, (), (0.3, -0.7, 0.1))
    out = kernel_transform(s)
    assert out.cosine == (0.3, -0.7, 0.1)
    assert out.sine == ()
    # zero input passes through as zero
    z = kernel_transform(dense(0.0))
    assert z.alpha0 == 0.0 and z.cosine == ()
    with pytest.raises(MixedParity):
        kernel_transform(dense(1.0, (0.5,)))


def test_cross_integral_is_the_parseval_cross_sum():
    a = dense(1.0, (0.5, 0.25), (0.1,))
    b = dense(2.0, (1.0, -1.0), (0.3,))
    expected = 0.5 * 2.0 + (0.5 - 0.25) + 0.03
    assert cross_integral(a, b) == pytest.approx(expected, abs=1e-12)


def _random_sets(rng, n, M=32):
    out = []
    for _ in range(n):
        decay = rng.uniform(1.0, 3.0)
        m = np.arange(1, M + 1, dtype=float)
        out.append(dense(rng.normal(), rng.normal(size=M) / m**decay,
                         rng.normal(size=M) / m**decay))
    return out


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_dual_path_identity(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        sets = _random_sets(rng, n)
        c_pipe, s_pipe = constants_pipeline(sets)
        c_prod, s_prod = constants_product(sets)
        lhs, rhs = c_pipe + s_pipe, c_prod + s_prod
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_pipeline_components_match_product_components():
    rng = np.random.default_rng(9)
    for n in (2, 3, 4, 5):
        sets = _random_sets(rng, n, M=8)
        c_pipe, s_pipe = constants_pipeline(sets)
        c_prod, s_prod = constants_product(sets)
        assert c_pipe == pytest.approx(c_prod, abs=1e-12)
        assert s_pipe == pytest.approx(s_prod, abs=1e-12)


def test_parity_split_partitions_the_set():
    cs = dense(1.0, (0.5,), (0.25,))
    even, odd = parity_split(cs)
    assert even.sine == () and odd.alpha0 == 0.0 and odd.cosine == ()
    assert odd.sine == (0.25,)


@given(st.floats(0.05, 0.95))
@settings(max_examples=30, deadline=None)
def test_unnormalized_alpha0_form(tau):
    cs = cosine_coefficients(tau)
    assert cs.alpha0 == pytest.approx(
        2.0 * math.sin(math.pi * tau) / (math.pi * tau), rel=1e-14
    )
