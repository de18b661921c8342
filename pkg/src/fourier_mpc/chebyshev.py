"""Tensor Chebyshev interpolation on [-1, 1]^2.

Lowers a general two-variable expression to the bilinear form
``sum_{r,p} c_rp T_r(a) T_p(b)`` that the masking protocol can evaluate,
together with the classical interpolation error bound at Chebyshev nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

MAX_DEGREE = 32


@dataclass(frozen=True)
class ChebModel:
    """Tensor interpolant with degrees (m, m') and coefficient matrix c_rp."""

    degree_a: int
    degree_b: int
    coeffs: tuple  # row-major (m+1) x (m'+1)
    bound: float = 0.0

    def matrix(self) -> np.ndarray:
        return np.array(self.coeffs).reshape(self.degree_a + 1, self.degree_b + 1)

    def __call__(self, a, b):
        c = self.matrix()
        ta = np.polynomial.chebyshev.chebvander(np.atleast_1d(a), self.degree_a)
        tb = np.polynomial.chebyshev.chebvander(np.atleast_1d(b), self.degree_b)
        out = np.einsum("ir,rp,ip->i", ta, c, tb)
        return float(out[0]) if np.isscalar(a) else out

    def to_record(self) -> dict:
        return {
            "degree_a": self.degree_a,
            "degree_b": self.degree_b,
            "coeffs": list(self.coeffs),
            "bound": self.bound,
        }

    @staticmethod
    def from_record(rec: dict) -> "ChebModel":
        return ChebModel(int(rec["degree_a"]), int(rec["degree_b"]),
                         tuple(rec["coeffs"]), float(rec["bound"]))


def _check_degree(m: int) -> None:
    if m < 0:
        raise ValueError("degree must be non-negative")
    if m > MAX_DEGREE:
        raise ValueError(f"degree capped at {MAX_DEGREE}")


def cheb_nodes(m: int) -> np.ndarray:
    """Roots of T_{m+1}: ``x_s = cos((2s+1) pi / (2m+2))``, decreasing in s."""
    _check_degree(m)
    s = np.arange(m + 1)
    return np.cos((2 * s + 1) * np.pi / (2 * m + 2))


def _dct_matrix(m: int) -> np.ndarray:
    # row r = weights turning node samples into the T_r coefficient
    s = np.arange(m + 1)
    r = np.arange(m + 1)
    cosines = np.cos(np.outer(r, (2 * s + 1)) * np.pi / (2 * m + 2))
    w = np.full(m + 1, 2.0 / (m + 1))
    w[0] = 1.0 / (m + 1)
    return cosines * w[:, None]


def interp_1d(f: Callable[[float], float], m: int) -> np.ndarray:
    """Chebyshev coefficients c_r with sum c_r T_r matching f at all m+1 nodes."""
    _check_degree(m)
    samples = np.array([f(x) for x in cheb_nodes(m)], dtype=float)
    return _dct_matrix(m) @ samples


def interp_2d(phi: Callable[[float, float], float], m: int, mp: int,
              bound: float = 0.0) -> ChebModel:
    """Nested tensor interpolation: first in a, then each c_r(b) in b."""
    _check_degree(m)
    _check_degree(mp)
    xb = cheb_nodes(mp)
    # columns: 1-d interpolation in a at each fixed b node
    c_of_b = np.column_stack([interp_1d(lambda a: phi(a, b), m) for b in xb])
    coeffs = c_of_b @ _dct_matrix(mp).T
    return ChebModel(m, mp, tuple(coeffs.ravel()), bound)


def error_bound(max_deriv: float, m: int) -> float:
    """``max|f^(m+1)| / (2^m (m+1)!)`` for interpolation at the m+1 nodes."""
    if max_deriv < 0:
        raise ValueError("derivative bound must be non-negative")
    _check_degree(m)
    return max_deriv / (2.0 ** m * math.factorial(m + 1))
