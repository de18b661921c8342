"""Graded symbolic algebra with a deferred-evaluation numerical map.

Expressions are finite sums ``sum_n c_n * T^[n]`` where ``T^[n]`` is an
abstract grade-n symbol and ``c_n`` are complex scalars, optionally carrying
formal k-th-root factors.  The star product adds grades; the evaluation map
sends grade 0 to the identity, even grades to -1 and odd grades to +i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Mapping

#: coefficients with magnitude <= PRUNE_EPS are dropped during canonicalization
PRUNE_EPS = 0.0


class ThetaError(Exception):
    """Base class for algebra errors."""


class RootBaseMismatch(ThetaError):
    """Raised when two root factors with different bases are star-multiplied."""


class NonPositiveScale(ThetaError):
    """Raised when a formal root is requested with a non-positive real scale."""


class UnresolvedRoot(ThetaError):
    """Raised when evaluating an expression whose root factors did not collapse."""


def _canon_terms(terms: Mapping[int, complex], eps: float = PRUNE_EPS) -> tuple:
    out = []
    for grade in sorted(terms):
        c = complex(terms[grade])
        if abs(c) > eps or (eps == 0.0 and c != 0):
            out.append((int(grade), c))
    return tuple(out)


@dataclass(frozen=True)
class RootFactor:
    """A formal factor ``(scale * base**exponent)**(1/order)``.

    ``scale`` is a positive real rooted numerically on collapse; ``base`` is a
    canonical grade->coefficient tuple rooted only symbolically.
    """

    base: tuple
    order: int
    exponent: int
    scale: float


@dataclass(frozen=True)
class ThetaExpr:
    """Immutable graded expression: term map plus optional root factors."""

    terms: tuple = field(default=())
    roots: tuple = field(default=())

    # -- constructors -------------------------------------------------------

    @staticmethod
    def scalar(c: complex) -> "ThetaExpr":
        return ThetaExpr(_canon_terms({0: c}))

    @staticmethod
    def theta(n: int, coeff: complex = 1.0) -> "ThetaExpr":
        if n < 0:
            raise ValueError("grade must be non-negative")
        return ThetaExpr(_canon_terms({n: coeff}))

    @staticmethod
    def from_terms(terms: Mapping[int, complex]) -> "ThetaExpr":
        return ThetaExpr(_canon_terms(terms))

    # -- views --------------------------------------------------------------

    def term_map(self) -> dict:
        return dict(self.terms)

    def coeff(self, grade: int) -> complex:
        for g, c in self.terms:
            if g == grade:
                return c
        return 0j

    @property
    def is_scalar(self) -> bool:
        return not self.roots and all(g == 0 for g, _ in self.terms)

    @property
    def grades(self) -> tuple:
        return tuple(g for g, _ in self.terms)

    # -- operator sugar -----------------------------------------------------

    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return scale(other, self)
        return star_mul(self, _coerce(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __sub__(self, other):
        return add(self, scale(-1, _coerce(other)))

    def __neg__(self):
        return scale(-1, self)

    def eval_t(self) -> complex:
        return eval_t(self)

    def to_record(self) -> dict:
        rec = {"terms": [[g, c.real, c.imag] for g, c in self.terms]}
        if self.roots:
            rec["roots"] = [
                {
                    "base": [[g, c.real, c.imag] for g, c in r.base],
                    "order": r.order,
                    "exponent": r.exponent,
                    "scale": r.scale,
                }
                for r in self.roots
            ]
        return rec

    @staticmethod
    def from_record(rec: dict) -> "ThetaExpr":
        terms = {int(g): complex(re, im) for g, re, im in rec["terms"]}
        roots = tuple(
            RootFactor(
                base=tuple((int(g), complex(re, im)) for g, re, im in r["base"]),
                order=int(r["order"]),
                exponent=int(r["exponent"]),
                scale=float(r["scale"]),
            )
            for r in rec.get("roots", [])
        )
        return ThetaExpr(_canon_terms(terms), roots)


ZERO = ThetaExpr()
ONE = ThetaExpr.scalar(1.0)


def _coerce(x) -> ThetaExpr:
    if isinstance(x, ThetaExpr):
        return x
    if isinstance(x, (int, float, complex)):
        return ThetaExpr.scalar(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as ThetaExpr")


def add(lhs: ThetaExpr, rhs: ThetaExpr) -> ThetaExpr:
    """Coefficient-wise addition over grades."""
    if lhs.roots or rhs.roots:
        raise ThetaError("addition of root-carrying expressions is not defined")
    out = lhs.term_map()
    for g, c in rhs.terms:
        out[g] = out.get(g, 0j) + c
    return ThetaExpr(_canon_terms(out))


def scale(s: complex, e: ThetaExpr) -> ThetaExpr:
    """Scalar multiplication, distributing over all grades."""
    return ThetaExpr(_canon_terms({g: s * c for g, c in e.terms}), e.roots)


def _poly_mul(a: tuple, b: tuple) -> tuple:
    out: dict = {}
    for ga, ca in a:
        for gb, cb in b:
            g = ga + gb
            out[g] = out.get(g, 0j) + ca * cb
    return _canon_terms(out)


def _merge_roots(roots: Iterable[RootFactor]):
    """Group factors by (base, order), accumulating exponents and scales.

    Returns (collapsed_polynomial_terms, remaining_factors).  A group whose
    accumulated exponent is an exact multiple of its order collapses to
    ``scale**(q/ ... )``; partial exponents stay symbolic.
    """
    groups: dict = {}
    for r in roots:
        key = (r.base, r.order)
        if key in groups:
            exp, sc = groups[key]
            groups[key] = (exp + r.exponent, sc * r.scale)
        else:
            groups[key] = (r.exponent, r.scale)

    collapsed = ((0, 1.0 + 0j),)
    remaining = []
    for (base, order), (exp, sc) in groups.items():
        if exp % order == 0:
            q = exp // order
            factor = ((0, complex(sc ** (1.0 / order))),)
            for _ in range(q):
                factor = _poly_mul(factor, base)
            collapsed = _poly_mul(collapsed, factor)
        else:
            remaining.append(RootFactor(base, order, exp, sc))
    return collapsed, tuple(remaining)


def star_mul(lhs: ThetaExpr, rhs: ThetaExpr) -> ThetaExpr:
    """Star product: grades add, scalar factors multiply ordinarily.

    Root factors combine only when they share a base (scales accumulate and
    exponents add, collapsing once the exponent reaches the root order);
    mixing distinct bases raises :class:`RootBaseMismatch`.
    """
    lhs, rhs = _coerce(lhs), _coerce(rhs)
    roots = lhs.roots + rhs.roots
    terms = _poly_mul(lhs.terms, rhs.terms)
    if roots:
        collapsed, remaining = _merge_roots(roots)
        if len({(r.base, r.order) for r in remaining}) > 1:
            raise RootBaseMismatch(
                "star product of root factors with different bases is undefined"
            )
        terms = _poly_mul(terms, collapsed)
        return ThetaExpr(terms, remaining)
    return ThetaExpr(terms)


def power(e: ThetaExpr, m: int) -> ThetaExpr:
    """Repeated star product; ``power(e, 0)`` is 1."""
    if m < 0:
        raise ValueError("exponent must be non-negative")
    return reduce(star_mul, [e] * m, ONE)


def formal_root(base: ThetaExpr, order: int, real_scale: float = 1.0) -> ThetaExpr:
    """Deferred k-th root of ``real_scale * base``.

    The positive real scale is rooted numerically on collapse; the symbolic
    base only collapses once ``order`` copies have been star-multiplied.
    """
    if order < 1:
        raise ValueError("root order must be >= 1")
    if real_scale <= 0:
        raise NonPositiveScale("root scale must be strictly positive")
    if base.roots:
        raise ThetaError("nested root factors are not supported")
    if order == 1:
        return scale(real_scale, base)
    return ThetaExpr(
        ((0, 1.0 + 0j),),
        (RootFactor(base.terms, order, 1, float(real_scale)),),
    )


def grade_value(n: int) -> complex:
    """Numerical value assigned to a bare grade-n symbol (grade 0 passes through)."""
    if n == 0:
        return 1.0 + 0j
    return -1.0 + 0j if n % 2 == 0 else 1j


def eval_t(e: ThetaExpr) -> complex:
    """Evaluate a fully star-multiplied expression to a complex number."""
    e = _coerce(e)
    if e.roots:
        raise UnresolvedRoot("expression still carries uncollapsed root factors")
    return sum((c * grade_value(g) for g, c in e.terms), 0j)
