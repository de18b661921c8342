"""Fourier coefficient sets, series moments, and the n-function sum identity.

A :class:`CoefficientSet` holds the trigonometric coefficients of a periodic
square-integrable function on ``[-l, l]``: a constant mode ``alpha0``, cosine
coefficients (either a closed-form cosine-family rule or a dense truncated
array) and dense sine coefficients.

The central identity, for n inputs,

    C + S = (1/2) prod_j alpha0_j + sum_m prod_j alpha_mj + sum_m prod_j beta_mj

is computed along two independent paths: direct products
(:func:`constants_product`) and a convolution pipeline in coefficient space
(:func:`constants_pipeline`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

DEFAULT_DENSE_M = 512
MAX_MOMENT_TERMS = 2_000_000


class FourierError(Exception):
    """Base class for coefficient-set errors."""


class TauOutOfRange(FourierError):
    pass


class MixedParity(FourierError):
    pass


class ToleranceUnreachable(FourierError):
    pass


class NonPositiveIdentitySum(FourierError):
    pass


@dataclass(frozen=True)
class CosineRule:
    """Closed-form cosine family: ``alpha_m = alpha0 * tau^2 (-1)^m / (tau^2 - m^2)``."""

    tau: float
    l: float
    alpha0: float

    def alpha(self, m: int) -> float:
        t2 = self.tau * self.tau
        return self.alpha0 * t2 * ((-1.0) ** m) / (t2 - m * m)

    def alphas(self, M: int) -> np.ndarray:
        m = np.arange(1, M + 1)
        t2 = self.tau * self.tau
        return self.alpha0 * t2 * ((-1.0) ** m) / (t2 - m * m)


@dataclass(frozen=True)
class CoefficientSet:
    """Fourier data of one main function.

    ``cosine`` is either a :class:`CosineRule` or a tuple of dense cosine
    coefficients ``alpha_1..alpha_M``; ``sine`` is a (possibly empty) tuple of
    dense sine coefficients.
    """

    alpha0: float
    cosine: object = ()  # CosineRule | tuple[float, ...]
    sine: tuple = ()
    l: float = 1.0
    normalized: bool = False
    eta: float | None = None

    @property
    def is_closed_form(self) -> bool:
        return isinstance(self.cosine, CosineRule)

    @property
    def M(self) -> int:
        if self.is_closed_form:
            return 0
        return max(len(self.cosine), len(self.sine))

    def alphas(self, M: int) -> np.ndarray:
        if self.is_closed_form:
            return self.cosine.alphas(M)
        out = np.zeros(M)
        arr = np.asarray(self.cosine, dtype=float)
        out[: min(M, arr.size)] = arr[:M]
        return out

    def betas(self, M: int) -> np.ndarray:
        out = np.zeros(M)
        arr = np.asarray(self.sine, dtype=float)
        out[: min(M, arr.size)] = arr[:M]
        return out

    def scaled(self, factor: float) -> "CoefficientSet":
        cosine = self.cosine
        if self.is_closed_form:
            cosine = replace(cosine, alpha0=cosine.alpha0 * factor)
        else:
            cosine = tuple(factor * a for a in cosine)
        return replace(
            self,
            alpha0=self.alpha0 * factor,
            cosine=cosine,
            sine=tuple(factor * b for b in self.sine),
        )

    def to_record(self) -> dict:
        rec = {"alpha0": self.alpha0, "l": self.l, "normalized": self.normalized}
        if self.is_closed_form:
            rec["cosine_rule"] = {"tau": self.cosine.tau, "alpha0": self.cosine.alpha0}
        else:
            rec["cosine"] = list(self.cosine)
        rec["sine"] = list(self.sine)
        if self.eta is not None:
            rec["eta"] = self.eta
        return rec


def dense(alpha0: float = 0.0, cosine: Sequence[float] = (), sine: Sequence[float] = (),
          l: float = 1.0) -> CoefficientSet:
    return CoefficientSet(float(alpha0), tuple(map(float, cosine)),
                          tuple(map(float, sine)), l)


def cosine_coefficients(tau: float, l: float = 1.0, n: int = 2) -> CoefficientSet:
    """Unnormalized coefficients of ``cos(pi tau x / l)``.

    ``alpha0 = 2 sin(pi tau)/(pi tau)`` and the higher modes follow the
    closed-form cosine rule.  ``n`` is the intended number of inputs for later
    normalization; it only gets validated here.
    """
    if not 0.0 < tau < 1.0:
        raise TauOutOfRange(f"tau must lie strictly in (0, 1), got {tau}")
    if n < 2:
        raise ValueError("n must be >= 2")
    alpha0 = 2.0 * math.sin(math.pi * tau) / (math.pi * tau)
    return CoefficientSet(alpha0, CosineRule(tau, l, alpha0), (), l)


def coefficients_by_quadrature(f: Callable[[float], float], l: float = 1.0,
                               M: int = 32) -> CoefficientSet:
    """Dense coefficients of ``f`` on ``[-l, l]`` via periodic trapezoid sums.

    The point count is chosen so any pure mode of index <= M is reproduced to
    better than 1e-10 (aliasing pushed beyond the truncation).
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    K = 8 * (M + 1)
    x = -l + 2.0 * l * np.arange(K) / K
    y = np.array([f(xi) for xi in x], dtype=float)
    alpha0 = 2.0 * y.sum() / K
    m = np.arange(1, M + 1)
    phase = np.pi * np.outer(m, x) / l
    alphas = 2.0 * (np.cos(phase) @ y) / K
    betas = 2.0 * (np.sin(phase) @ y) / K
    return CoefficientSet(alpha0, tuple(alphas), tuple(betas), l)


# -- closed-form series sums ------------------------------------------------

def sum_inverse(tau: float) -> float:
    """``sum_m 1/(m^2 - tau^2)`` for tau in (0, 1)."""
    pt = math.pi * tau
    return (1.0 - pt / math.tan(pt)) / (2.0 * tau * tau)


def sum_alternating(tau: float) -> float:
    """``sum_m (-1)^m/(m^2 - tau^2)`` for tau in (0, 1)."""
    pt = math.pi * tau
    return (1.0 - pt / math.sin(pt)) / (2.0 * tau * tau)


def sum_inverse_squared(tau: float) -> float:
    """``sum_m 1/(m^2 - tau^2)^2``, obtained by differentiating in tau."""
    pt = math.pi * tau
    s = math.sin(pt)
    return -1.0 / (2.0 * tau ** 4) + (
        math.pi * math.sin(2.0 * pt) + 2.0 * math.pi ** 2 * tau
    ) / (8.0 * tau ** 3 * s * s)


def moment_tail_bound(amplitude: float, tau: float, n: int, M: int) -> float:
    """Certified bound on ``sum_{m>M} |alpha_m|^n`` for the cosine rule."""
    c = abs(amplitude) * tau * tau
    # for m > M: (m^2 - tau^2)^n >= m^(2n) (1 - tau^2/(M+1)^2)^n
    shrink = (1.0 - tau * tau / ((M + 1) ** 2)) ** n
    # sum_{m>M} m^(-2n) <= integral_M^inf x^(-2n) dx
    return (c ** n) * (M ** (1 - 2 * n)) / ((2 * n - 1) * shrink)


def moment(cs: CoefficientSet, n: int, tolerance: float = 1e-12) -> float:
    """``M_n = sum_m alpha_m^n`` of the cosine part.

    Closed form for the cosine rule at n=2; adaptive truncation with an
    analytic tail bound otherwise (terms decay like ``m^(-2n)``).
    """
    if n < 2:
        raise ValueError("moment order must be >= 2")
    if cs.is_closed_form:
        rule = cs.cosine
        if n == 2:
            c = rule.alpha0 * rule.tau * rule.tau
            return c * c * sum_inverse_squared(rule.tau)
        M = 64
        while moment_tail_bound(rule.alpha0, rule.tau, n, M) > tolerance:
            M *= 2
            if M > MAX_MOMENT_TERMS:
                raise ToleranceUnreachable(
                    f"tail bound not below {tolerance} within {MAX_MOMENT_TERMS} terms"
                )
        terms = rule.alphas(M) ** n
        return float(terms[::-1].sum())
    return float((np.asarray(cs.cosine, dtype=float) ** n).sum())


def parity_split(cs: CoefficientSet):
    """Split into the even (constant + cosine) and odd (sine) parts."""
    even = replace(cs, sine=())
    odd = CoefficientSet(0.0, (), cs.sine, cs.l, cs.normalized, cs.eta)
    return even, odd


def _require_single_parity(cs: CoefficientSet) -> str:
    has_cos = cs.alpha0 != 0.0 or (
        cs.is_closed_form or any(a != 0.0 for a in cs.cosine)
    )
    has_sin = any(b != 0.0 for b in cs.sine)
    if has_cos and has_sin:
        raise MixedParity("operand carries both cosine and sine components")
    return "sine" if has_sin else "cosine"


def _common_M(a: CoefficientSet, b: CoefficientSet) -> int:
    M = max(a.M, b.M)
    return M if M > 0 else DEFAULT_DENSE_M


def convolve(a: CoefficientSet, b: CoefficientSet) -> CoefficientSet:
    """Periodic convolution ``(1/l) int a(t) b(x-t) dt`` in coefficient space.

    cosine * cosine keeps cosine parity with coefficients ``(alpha0 alpha0',
    alpha_m alpha_m')`` (the constant *term* of the result is half that);
    sine * sine yields cosine parity with ``-beta_m beta_m'``.
    """
    pa, pb = _require_single_parity(a), _require_single_parity(b)
    if pa != pb:
        raise MixedParity("convolution of mixed parities is not defined here")
    M = _common_M(a, b)
    if pa == "cosine":
        return CoefficientSet(a.alpha0 * b.alpha0,
                              tuple(a.alphas(M) * b.alphas(M)), (), a.l)
    return CoefficientSet(0.0, tuple(-a.betas(M) * b.betas(M)), (), a.l)


def kernel_transform(s: CoefficientSet) -> CoefficientSet:
    """Map a sine-parity set to cosine parity, mode for mode.

    Realizes the singular-kernel integral transform purely in coefficient
    space; the kernel itself is never discretized.
    """
    has_cos = s.alpha0 != 0.0 or s.is_closed_form or any(a != 0.0 for a in s.cosine)
    if has_cos:
        raise MixedParity("kernel transform expects a sine-parity input")
    return CoefficientSet(0.0, tuple(s.sine), (), s.l)


def cross_integral(a: CoefficientSet, b: CoefficientSet) -> float:
    """``(1/l) int a(x) b(x) dx`` as the classical coefficient cross-sum."""
    M = _common_M(a, b)
    return float(
        0.5 * a.alpha0 * b.alpha0
        + (a.alphas(M) * b.alphas(M)).sum()
        + (a.betas(M) * b.betas(M)).sum()
    )


def _star_identity(l: float, M: int) -> CoefficientSet:
    # identity element of the coefficient-space convolution
    return CoefficientSet(1.0, (1.0,) * M, (), l)


def _chain(parts: list) -> CoefficientSet:
    out = parts[0]
    for p in parts[1:]:
        out = convolve(out, p)
    return out


def _pair_tree(parts: list, l: float, M: int) -> CoefficientSet:
    """Pair up two by two and convolve until one function remains."""
    if not parts:
        return _star_identity(l, M)
    while len(parts) > 1:
        nxt = [convolve(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def constants_pipeline(inputs: Sequence[CoefficientSet]):
    """(C, S) via sequential convolutions and one final integral.

    C chains the even parts of the first n-1 inputs and integrates against the
    n-th; S pairs the sine parts (even n) or routes the last one through the
    kernel transform (odd n).  Each sine-sine convolution flips the sign of
    the underlying sine-coefficient product, so the accumulated parity sign is
    divided back out at the end; the convolution tree itself is untouched.
    """
    n = len(inputs)
    if n < 2:
        raise ValueError("need at least two inputs")
    M = max(max(cs.M for cs in inputs), 1)
    evens, odds = zip(*(parity_split(cs) for cs in inputs))

    chain = _chain(list(evens[: n - 1]))
    c_const = cross_integral(chain, evens[n - 1])

    if n % 2 == 0:
        head = _pair_tree(list(odds[: n - 2]), inputs[0].l, M)
        tail = convolve(odds[n - 2], odds[n - 1])
        s_const = cross_integral(head, tail) * ((-1.0) ** (n // 2))
    else:
        head = _pair_tree(list(odds[: n - 1]), inputs[0].l, M)
        hat = kernel_transform(odds[n - 1])
        s_const = -cross_integral(hat, head) * ((-1.0) ** ((n - 1) // 2 + 1))
    return c_const, s_const


def constants_product(inputs: Sequence[CoefficientSet], tolerance: float = 1e-12):
    """(C, S) by direct products: the identity's right-hand side."""
    n = len(inputs)
    if n < 2:
        raise ValueError("need at least two inputs")
    c_zero = 0.5 * math.prod(cs.alpha0 for cs in inputs)
    if all(cs.is_closed_form for cs in inputs):
        M = 64
        while _product_tail(inputs, M) > tolerance:
            M *= 2
            if M > MAX_MOMENT_TERMS:
                raise ToleranceUnreachable("product tail bound will not converge")
    else:
        M = max(max(cs.M for cs in inputs), 1)
    alphas = np.prod([cs.alphas(M) for cs in inputs], axis=0)
    betas = np.prod([cs.betas(M) for cs in inputs], axis=0)
    return c_zero + float(alphas[::-1].sum()), float(betas[::-1].sum())


def _product_tail(inputs, M: int) -> float:
    bound = 1.0
    for cs in inputs:
        rule = cs.cosine
        c = abs(rule.alpha0) * rule.tau * rule.tau
        shrink = 1.0 - rule.tau * rule.tau / ((M + 1) ** 2)
        bound *= c / shrink
    n = len(inputs)
    return bound * (M ** (1 - 2 * n)) / (2 * n - 1)


def normalize_eta(inputs: Sequence[CoefficientSet], tolerance: float = 1e-12):
    """Scale each input by ``eta = (C + S)^(-1/n)`` so the identity sums to 1."""
    n = len(inputs)
    c_const, s_const = constants_product(inputs, tolerance)
    total = c_const + s_const
    if total <= 0.0:
        raise NonPositiveIdentitySum(
            f"identity sum {total} <= 0: no real normalization exists"
        )
    eta = total ** (-1.0 / n)
    out = []
    for cs in inputs:
        scaled = cs.scaled(eta)
        out.append(replace(scaled, normalized=True, eta=eta))
    return eta, out


def normalized_cosine_basis(tau: float, n: int, l: float = 1.0) -> CoefficientSet:
    """Shared even main function, normalized so ``alpha0^n/2 + M_n = 1``."""
    phi = cosine_coefficients(tau, l, n)
    _, sets = normalize_eta([phi] * n)
    return sets[0]


def identity_gap(cs: CoefficientSet, n: int, tolerance: float = 1e-12) -> float:
    """``alpha0^n/2 + M_n - 1``; zero (to tolerance) for a normalized even set."""
    return cs.alpha0 ** n / 2.0 + moment(cs, n, tolerance) - 1.0
