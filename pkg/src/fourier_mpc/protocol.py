"""Masking protocols over Fourier coefficient streams.

Pure round functions for the baseline split/mask schemes, the two-party
complex-mask protocol, the n-party graded-mask protocol, and the multi-node
category scheme built on formal roots, plus the diagnostics (independent
residual oracle, constructive view simulation) that probe them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .fourier import CoefficientSet, identity_gap, moment
from .theta import ThetaExpr, eval_t, formal_root, grade_value, star_mul

NODE_SIGNS_2P = (1 + 0j, -1 + 0j, 1j, -1j)
CATEGORIES = "ABCD"


class ProtocolError(Exception):
    pass


class ZeroCodeInProductMode(ProtocolError):
    pass


class UnnormalizedBasis(ProtocolError):
    pass


class NOutOfRange(ProtocolError):
    pass


class OracleMismatch(ProtocolError):
    pass


class TelescopeViolation(ProtocolError):
    pass


class SubsetTooLarge(ProtocolError):
    pass


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SecretInput:
    """One party's secret code, its public linear weight, and the shared
    public product weight."""

    code: float
    weight: float
    y: float


@dataclass(frozen=True)
class PartyMasks:
    """Additive mask scalars of one party: (a0, b0) for the zero mode and
    (a, b) for the coefficient stream."""

    zero: tuple
    stream: tuple


@dataclass(frozen=True)
class MaskSet:
    parties: tuple
    # supplementary multiplicative masks, shape [category][user][slot],
    # present only for the multi-node scheme; the last slot holds the
    # telescoping inverse of the product of the others.
    supp_zero: tuple = ()
    supp_stream: tuple = ()


@dataclass(frozen=True)
class HyperVector:
    """One party-to-node packet: additive share plus masked entries.

    ``zero_entry``/``stream_entry`` are complex scalars (two-party), graded
    expressions (n-party rank-1), or tuples of graded expressions (dense
    mode and the multi-node root packets)."""

    share: float
    zero_entry: object
    stream_entry: object
    root_order: int = 0


@dataclass(frozen=True)
class Transcript:
    protocol: str
    inputs: tuple
    masks: MaskSet
    basis: CoefficientSet
    shares: tuple  # [user][part]
    node_inputs: tuple  # [node][user] -> HyperVector (4-node schemes)
    node_outputs: tuple
    display: complex
    expected: float
    residual: complex
    iota: int = 0
    mode: str = "rank1"
    truncation: int = 0
    category_inputs: tuple = ()  # [category][slot][user] -> HyperVector

    def to_record(self) -> dict:
        def entry(e):
            if isinstance(e, ThetaExpr):
                return e.to_record()
            if isinstance(e, tuple):
                return [entry(x) for x in e]
            c = complex(e)
            return [c.real, c.imag]

        return {
            "protocol": self.protocol,
            "iota": self.iota,
            "mode": self.mode,
            "truncation": self.truncation,
            "inputs": [[p.code, p.weight, p.y] for p in self.inputs],
            "masks": {
                "parties": [
                    {"zero": list(p.zero), "stream": list(p.stream)}
                    for p in self.masks.parties
                ],
                "supp_zero": _nested_list(self.masks.supp_zero),
                "supp_stream": _nested_list(self.masks.supp_stream),
            },
            "basis": self.basis.to_record(),
            "shares": [list(s) for s in self.shares],
            "node_inputs": [
                [
                    {"share": hv.share, "zero": entry(hv.zero_entry),
                     "stream": entry(hv.stream_entry)}
                    for hv in per_node
                ]
                for per_node in self.node_inputs
            ],
            "node_outputs": [entry(o) for o in self.node_outputs],
            "display": [self.display.real, self.display.imag],
            "expected": self.expected,
            "residual": [self.residual.real, self.residual.imag],
        }


def _nested_list(x):
    if isinstance(x, tuple):
        return [_nested_list(v) for v in x]
    return x


# ---------------------------------------------------------------------------
# mask sampling and share splitting
# ---------------------------------------------------------------------------

def split_secret(value: float, parts: int, seed: int = 0, rng=None) -> tuple:
    """Split ``value`` into ``parts`` reals summing exactly to it; the last
    share fixes the sum.  Deterministic under ``seed``."""
    if parts < 1:
        raise ValueError("parts must be >= 1")
    rng = np.random.default_rng(seed) if rng is None else rng
    head = rng.uniform(-10.0, 10.0, size=parts - 1)
    return tuple(head) + (value - float(head.sum()),)


def sample_masks(n: int, seed: int, kappa: int = 0,
                 mask_scale: float = 10.0) -> MaskSet:
    """Seeded masks: additive scalars uniform on [-scale, scale], supplementary
    multiplicative masks log-uniform on [0.1, 10] with a telescoping last slot."""
    rng = np.random.default_rng(seed)
    parties = tuple(
        PartyMasks(zero=tuple(rng.uniform(-mask_scale, mask_scale, 2)),
                   stream=tuple(rng.uniform(-mask_scale, mask_scale, 2)))
        for _ in range(n)
    )

    def supp() -> tuple:
        cats = []
        for _ in range(4):
            users = []
            for _ in range(n):
                free = np.exp(rng.uniform(np.log(0.1), np.log(10.0), kappa - 1))
                users.append(tuple(free) + (float(1.0 / free.prod()),))
            cats.append(tuple(users))
        return tuple(cats)

    if kappa > 0:
        return MaskSet(parties, supp(), supp())
    return MaskSet(parties)


# ---------------------------------------------------------------------------
# baseline schemes
# ---------------------------------------------------------------------------

def baseline_round(codes: Sequence[float], mode: str = "sum",
                   node_count: int = 2, seed: int = 0) -> Transcript:
    """Sum-only or product-only splitting across ``node_count`` nodes."""
    rng = np.random.default_rng(seed)
    codes = [float(c) for c in codes]
    if mode == "sum":
        pieces = [split_secret(c, node_count, rng=rng) for c in codes]
        outputs = tuple(sum(p[i] for p in pieces) for i in range(node_count))
        display = sum(outputs)
        expected = sum(codes)
    elif mode == "product":
        if any(c == 0.0 for c in codes):
            raise ZeroCodeInProductMode("product mode requires nonzero codes")
        pieces = []
        for c in codes:
            # multiplicative masks: all but the last factor free, last fixes it
            free = np.exp(rng.uniform(np.log(0.5), np.log(2.0), node_count - 1))
            pieces.append(tuple(free) + (c / float(free.prod()),))
        outputs = tuple(
            math.prod(p[i] for p in pieces) for i in range(node_count)
        )
        display = math.prod(outputs)
        expected = math.prod(codes)
    else:
        raise ValueError(f"unknown baseline mode {mode!r}")

    node_inputs = tuple(
        tuple(HyperVector(p[i], 0.0, 0.0) for p in pieces)
        for i in range(node_count)
    )
    dummy = SecretInput(0.0, 0.0, 0.0)
    return Transcript(
        protocol=f"baseline-{mode}",
        inputs=tuple(SecretInput(c, 1.0, 0.0) for c in codes),
        masks=MaskSet(()), basis=CoefficientSet(0.0),
        shares=tuple(pieces), node_inputs=node_inputs, node_outputs=outputs,
        display=complex(display), expected=float(expected),
        residual=complex(display) - expected,
    )


# ---------------------------------------------------------------------------
# two-party protocol (complex masks)
# ---------------------------------------------------------------------------

def _check_basis(basis: CoefficientSet, n: int, tol: float = 1e-6) -> float:
    gap = identity_gap(basis, n)
    if not basis.normalized or abs(gap) > tol:
        raise UnnormalizedBasis(
            f"basis not normalized for n={n} (identity gap {gap:.3e})"
        )
    return moment(basis, n)


def _shares_for(inputs, seed, parts, shares):
    if shares is not None:
        out = tuple(tuple(map(float, s)) for s in shares)
        for p, s in zip(inputs, out):
            if len(s) != parts or abs(sum(s) - p.weight * p.code) > 1e-9 * (
                1 + abs(p.weight * p.code)
            ):
                raise ValueError("provided shares do not sum to weight*code")
        return out
    rng = np.random.default_rng(seed)
    return tuple(
        split_secret(p.weight * p.code, parts, rng=rng) for p in inputs
    )


def _expected(inputs) -> float:
    return sum(p.weight * p.code for p in inputs) + inputs[0].y * math.prod(
        p.code for p in inputs
    )


def two_party_round(alice: SecretInput, bob: SecretInput, masks: MaskSet,
                    basis: CoefficientSet, seed: int = 0, shares=None,
                    mode: str = "rank1", truncation: int = 256) -> Transcript:
    """Four-node round for two parties using ordinary complex masks."""
    inputs = (alice, bob)
    if alice.y != bob.y:
        raise ValueError("parties must share the public product weight")
    m2 = _check_basis(basis, 2)
    y = alice.y
    sign = 1.0 if y > 0 else -1.0
    root_y = math.sqrt(abs(y))
    c = [root_y * p.code for p in inputs]
    w0 = [complex(*pm.zero) for pm in masks.parties]
    w = [complex(*pm.stream) for pm in masks.parties]
    shares = _shares_for(inputs, seed, 4, shares)
    alpha0 = basis.alpha0
    alphas = basis.alphas(truncation) if mode == "dense" else None

    node_inputs, outputs = [], []
    for i, s in enumerate(NODE_SIGNS_2P):
        hvs = []
        for j in range(2):
            zero_entry = alpha0 * (c[j] + s * w0[j])
            if mode == "dense":
                stream_entry = tuple((c[j] + s * w[j]) * a for a in alphas)
            else:
                stream_entry = c[j] + s * w[j]
            hvs.append(HyperVector(shares[j][i], zero_entry, stream_entry))
        node_inputs.append(tuple(hvs))
        zero_prod = hvs[0].zero_entry * hvs[1].zero_entry
        if mode == "dense":
            stream_sum = sum(
                e1 * e2 for e1, e2 in zip(hvs[0].stream_entry, hvs[1].stream_entry)
            )
        else:
            stream_sum = hvs[0].stream_entry * hvs[1].stream_entry * m2
        outputs.append(
            shares[0][i] + shares[1][i] + sign * (zero_prod / 8 + stream_sum / 4)
        )

    display = sum(outputs)
    expected = _expected(inputs)
    return Transcript(
        protocol="two-party", inputs=inputs, masks=masks, basis=basis,
        shares=shares, node_inputs=tuple(node_inputs),
        node_outputs=tuple(outputs), display=display, expected=expected,
        residual=display - expected, mode=mode,
        truncation=truncation if mode == "dense" else 0,
    )


# ---------------------------------------------------------------------------
# n-party protocol (graded masks)
# ---------------------------------------------------------------------------

def _theta_masks(masks: MaskSet):
    """(omega, omega-hat) graded mask scalars per party."""
    w = [ThetaExpr.from_terms({0: pm.stream[0], 1: pm.stream[1]})
         for pm in masks.parties]
    w_hat = [ThetaExpr.from_terms({0: -pm.stream[1], 1: pm.stream[0]})
             for pm in masks.parties]
    w0 = [ThetaExpr.from_terms({0: pm.zero[0], 1: pm.zero[1]})
          for pm in masks.parties]
    w0_hat = [ThetaExpr.from_terms({0: -pm.zero[1], 1: pm.zero[0]})
              for pm in masks.parties]
    return w0, w, w0_hat, w_hat


def _node_mask_table(masks: MaskSet):
    """Per node: (zero-mode mask, stream mask, +/-1) for the four nodes."""
    w0, w, w0_hat, w_hat = _theta_masks(masks)
    return (
        (w0, w, 1.0),
        (w0, w, -1.0),
        (w0_hat, w_hat, 1.0),
        (w0_hat, w_hat, -1.0),
    )


def n_party_round(inputs: Sequence[SecretInput], masks: MaskSet,
                  basis: CoefficientSet, seed: int = 0, shares=None,
                  mode: str = "rank1", truncation: int = 256) -> Transcript:
    """Four-node round for n parties; masks live in the graded algebra."""
    n = len(inputs)
    if n < 2:
        raise NOutOfRange("need at least two parties")
    if len({p.y for p in inputs}) != 1:
        raise ValueError("parties must share the public product weight")
    mn = _check_basis(basis, n)
    y = inputs[0].y
    sign = 1.0 if y > 0 else -1.0
    root_y = abs(y) ** (1.0 / n)
    c = [root_y * p.code for p in inputs]
    shares = _shares_for(inputs, seed, 4, shares)
    alpha0 = basis.alpha0
    alphas = basis.alphas(truncation) if mode == "dense" else None

    node_inputs, outputs = [], []
    for i, (zmask, smask, s) in enumerate(_node_mask_table(masks)):
        hvs = []
        for j in range(n):
            zero_entry = alpha0 * (c[j] + s * zmask[j])
            base = c[j] + s * smask[j]
            if mode == "dense":
                stream_entry = tuple(a * base for a in alphas)
            else:
                stream_entry = base
            hvs.append(HyperVector(shares[j][i], zero_entry, stream_entry))
        node_inputs.append(tuple(hvs))
        zero_prod = reduce(star_mul, (hv.zero_entry for hv in hvs))
        if mode == "dense":
            stream_sum = ThetaExpr()
            for m in range(truncation):
                stream_sum = stream_sum + reduce(
                    star_mul, (hv.stream_entry[m] for hv in hvs)
                )
        else:
            stream_sum = mn * reduce(star_mul, (hv.stream_entry for hv in hvs))
        share_sum = sum(shares[j][i] for j in range(n))
        outputs.append(
            share_sum + sign * ((1 / 8) * zero_prod + (1 / 4) * stream_sum)
        )

    total = reduce(lambda a, b: a + b, outputs)
    display = eval_t(total)
    expected = _expected(inputs)
    return Transcript(
        protocol="n-party", inputs=tuple(inputs), masks=masks, basis=basis,
        shares=shares, node_inputs=tuple(node_inputs),
        node_outputs=tuple(outputs), display=display, expected=expected,
        residual=display - expected, mode=mode,
        truncation=truncation if mode == "dense" else 0,
    )


# ---------------------------------------------------------------------------
# independent residual oracle
# ---------------------------------------------------------------------------

def _expand_product(factors) -> complex:
    """Expand a product of (grade0, grade1) pairs term by term and apply the
    grade map to each term; fully independent of the symbolic engine."""
    total = 0j
    for picks in itertools.product(*[
        ((0, f0), (1, f1)) for f0, f1 in factors
    ]):
        grade = sum(g for g, _ in picks)
        coeff = math.prod(v for _, v in picks)
        total += coeff * grade_value(grade)
    return total


def oracle_display(inputs: Sequence[SecretInput], masks: MaskSet,
                   basis: CoefficientSet) -> complex:
    """Display value by brute-force expansion of the four node brackets."""
    n = len(inputs)
    y = inputs[0].y
    sign = 1.0 if y > 0 else -1.0
    root_y = abs(y) ** (1.0 / n)
    c = [root_y * p.code for p in inputs]
    mn = moment(basis, n)
    a0n = basis.alpha0 ** n

    def bracket(mask_pairs) -> complex:
        total = 0j
        for s in (1.0, -1.0):
            zero = _expand_product(
                [(c[j] + s * z0, s * z1) for j, (z0, z1) in
                 enumerate(p[0] for p in mask_pairs)]
            )
            stream = _expand_product(
                [(c[j] + s * t0, s * t1) for j, (t0, t1) in
                 enumerate(p[1] for p in mask_pairs)]
            )
            total += a0n / 8 * zero + mn / 4 * stream
        return total

    plain = [((pm.zero[0], pm.zero[1]), (pm.stream[0], pm.stream[1]))
             for pm in masks.parties]
    hatted = [((-pm.zero[1], pm.zero[0]), (-pm.stream[1], pm.stream[0]))
              for pm in masks.parties]
    linear = sum(p.weight * p.code for p in inputs)
    return linear + sign * (bracket(plain) + bracket(hatted))


def residual_diagnostic(inputs: Sequence[SecretInput], masks: MaskSet,
                        basis: CoefficientSet, tol: float = 1e-10) -> complex:
    """Protocol residual, cross-checked against the subset-expansion oracle."""
    t = n_party_round(inputs, masks, basis)
    oracle = oracle_display(inputs, masks, basis) - t.expected
    if abs(t.residual - oracle) > tol:
        raise OracleMismatch(
            f"protocol residual {t.residual} vs oracle {oracle}"
        )
    return t.residual


# ---------------------------------------------------------------------------
# multi-node category scheme
# ---------------------------------------------------------------------------

def multi_node_round(inputs: Sequence[SecretInput], iota: int, masks: MaskSet,
                     basis: CoefficientSet, seed: int = 0,
                     shares=None) -> Transcript:
    """3f+1-node scheme: four categories of kappa = 3*iota first-level nodes
    holding formal kappa-th roots, plus four second-level nodes."""
    if iota < 0:
        raise ValueError("iota must be >= 0")
    if iota == 0:
        return n_party_round(inputs, masks, basis, seed=seed, shares=shares)
    n = len(inputs)
    if n < 2:
        raise NOutOfRange("need at least two parties")
    kappa = 3 * iota
    if not masks.supp_zero or len(masks.supp_zero[0][0]) != kappa:
        raise ValueError("mask set lacks supplementary masks for this iota")
    mn = _check_basis(basis, n)
    y = inputs[0].y
    sign = 1.0 if y > 0 else -1.0
    root_y = abs(y) ** (1.0 / n)
    c = [root_y * p.code for p in inputs]
    shares = _shares_for(inputs, seed, 4 * kappa, shares)
    alpha0 = basis.alpha0

    table = _node_mask_table(masks)
    category_inputs = []
    for cat in range(4):
        zmask, smask, s = table[cat]
        zero_bases = [alpha0 * (c[j] + s * zmask[j]) for j in range(n)]
        stream_bases = [c[j] + s * smask[j] for j in range(n)]
        slots = []
        for slot in range(kappa):
            hvs = []
            for j in range(n):
                part = cat * kappa + slot
                hvs.append(HyperVector(
                    share=shares[j][part],
                    zero_entry=formal_root(
                        zero_bases[j], kappa, masks.supp_zero[cat][j][slot]
                    ),
                    stream_entry=formal_root(
                        stream_bases[j], kappa, masks.supp_stream[cat][j][slot]
                    ),
                    root_order=kappa,
                ))
            slots.append(tuple(hvs))
        category_inputs.append(tuple(slots))

    outputs = []
    for cat in range(4):
        _, _, s = table[cat]
        slots = category_inputs[cat]
        for sup in (masks.supp_zero[cat], masks.supp_stream[cat]):
            for j in range(n):
                tele = math.prod(sup[j])
                if abs(tele - 1.0) > 1e-12:
                    raise TelescopeViolation(
                        f"category {CATEGORIES[cat]} user {j}: product {tele}"
                    )
        zero_prod = ThetaExpr.scalar(1.0)
        stream_prod = ThetaExpr.scalar(1.0)
        for j in range(n):
            zj = reduce(star_mul, (slots[s_][j].zero_entry for s_ in range(kappa)))
            sj = reduce(star_mul, (slots[s_][j].stream_entry for s_ in range(kappa)))
            zero_prod = star_mul(zero_prod, zj)
            stream_prod = star_mul(stream_prod, sj)
        share_sum = sum(
            slots[s_][j].share for s_ in range(kappa) for j in range(n)
        )
        outputs.append(
            share_sum
            + sign * ((1 / 8) * zero_prod + (mn / 4) * stream_prod)
        )

    total = reduce(lambda a, b: a + b, outputs)
    display = eval_t(total)
    expected = _expected(inputs)
    return Transcript(
        protocol="multi-node", inputs=tuple(inputs), masks=masks, basis=basis,
        shares=shares, node_inputs=(), node_outputs=tuple(outputs),
        display=display, expected=expected, residual=display - expected,
        iota=iota, category_inputs=tuple(category_inputs),
    )


# ---------------------------------------------------------------------------
# privacy: constructive view simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimulatedRun:
    """Alternative masks and shares reproducing a corrupted view set."""

    masks: MaskSet
    shares: tuple
    inputs: tuple


def _entry_components(entry, alpha0: float):
    """(grade-0, grade-1) real components of a zero/stream entry, with the
    public alpha0 factor divided out of zero-mode entries by the caller."""
    if isinstance(entry, ThetaExpr):
        return entry.coeff(0).real, entry.coeff(1).real
    e = complex(entry)
    return e.real, e.imag


def _fused_root(entry: ThetaExpr) -> tuple:
    """Wire view of a root-factor packet: the scale folded into the base
    coefficients, as (grade-0, grade-1) reals."""
    r = entry.roots[0]
    m = {g: r.scale * c for g, c in r.base}
    return m.get(0, 0j).real, m.get(1, 0j).real


def _solve_pair_from_entry(kind: int, s: float, obs0: float, obs1: float,
                           c_alt: float):
    """Invert one masked entry for the mask pair (a, b).

    kind 0: entry = c + s*(a + T b); kind 1: entry = c + s*(T a - b)."""
    if kind == 0:
        return (obs0 - c_alt) / s, obs1 / s
    return obs1 / s, (c_alt - obs0) / s


def simulate_views(transcript: Transcript, corrupted: Sequence[int],
                   alt_secrets: Sequence[float]) -> SimulatedRun:
    """Construct masks/shares under which ``alt_secrets`` reproduce the
    corrupted nodes' views; raises :class:`SubsetTooLarge` beyond the
    tolerated corruption threshold."""
    corrupted = sorted(set(corrupted))
    if transcript.protocol == "multi-node":
        return _simulate_multi_node(transcript, corrupted, alt_secrets)
    if transcript.protocol not in ("two-party", "n-party"):
        raise ProtocolError(f"no view simulation for {transcript.protocol}")
    if len(corrupted) > 1:
        raise SubsetTooLarge(
            "four-node schemes tolerate at most one corrupted node"
        )
    n = len(transcript.inputs)
    alt_inputs = tuple(
        SecretInput(float(a), p.weight, p.y)
        for a, p in zip(alt_secrets, transcript.inputs)
    )
    if not corrupted:
        return SimulatedRun(transcript.masks, transcript.shares, alt_inputs)

    node = corrupted[0]
    if not 1 <= node <= 4:
        raise ValueError("node labels are 1..4")
    y = transcript.inputs[0].y
    root_y = abs(y) ** (1.0 / n)
    alpha0 = transcript.basis.alpha0
    s = (1.0, -1.0, 1.0, -1.0)[node - 1]
    kind = 0 if node <= 2 else 1

    parties, shares = [], []
    for j in range(n):
        hv = transcript.node_inputs[node - 1][j]
        c_alt = root_y * alt_inputs[j].code
        if transcript.protocol == "two-party":
            sc = NODE_SIGNS_2P[node - 1]
            w0 = (complex(hv.zero_entry) / alpha0 - c_alt) / sc
            stream = hv.stream_entry
            if isinstance(stream, tuple):  # dense: recover the rank-1 scalar
                stream = complex(stream[0]) / transcript.basis.alphas(1)[0]
            w = (complex(stream) - c_alt) / sc
            parties.append(PartyMasks((w0.real, w0.imag), (w.real, w.imag)))
        else:
            z0, z1 = _entry_components(hv.zero_entry, alpha0)
            zero = _solve_pair_from_entry(kind, s, z0 / alpha0, z1 / alpha0, c_alt)
            stream = hv.stream_entry
            if isinstance(stream, tuple):
                a1 = transcript.basis.alphas(1)[0]
                t0, t1 = stream[0].coeff(0).real / a1, stream[0].coeff(1).real / a1
            else:
                t0, t1 = _entry_components(stream, alpha0)
            parties.append(PartyMasks(
                zero, _solve_pair_from_entry(kind, s, t0, t1, c_alt)
            ))
        # pin the observed share piece, let the others absorb the difference
        total = alt_inputs[j].weight * alt_inputs[j].code
        others = split_secret(total - hv.share, 3, seed=1000 + j)
        pieces = list(others[: node - 1]) + [hv.share] + list(others[node - 1:])
        shares.append(tuple(pieces))
    return SimulatedRun(MaskSet(tuple(parties)), tuple(shares), alt_inputs)


def _multi_node_tolerated(transcript: Transcript, corrupted) -> bool:
    """Tolerated iff >= 3 categories keep an uncorrupted first-level node and
    >= 1 second-level node is uncorrupted.

    Node labels: ("cat", category, slot) and ("node", i) with i in 1..4."""
    kappa = 3 * transcript.iota
    clean_cats = 0
    for cat in range(4):
        slots = {lbl[2] for lbl in corrupted if lbl[0] == "cat" and lbl[1] == cat}
        if len(slots) < kappa:
            clean_cats += 1
    clean_second = 4 - len({lbl[1] for lbl in corrupted if lbl[0] == "node"})
    return clean_cats >= 3 and clean_second >= 1


def _simulate_multi_node(transcript: Transcript, corrupted,
                         alt_secrets) -> SimulatedRun:
    n = len(transcript.inputs)
    kappa = 3 * transcript.iota
    if not _multi_node_tolerated(transcript, corrupted):
        raise SubsetTooLarge("corrupted set exceeds the tolerated threshold")

    # a corrupted second-level node sees all of its category's slot packets
    observed_slots = {(lbl[1], lbl[2]) for lbl in corrupted if lbl[0] == "cat"}
    for lbl in corrupted:
        if lbl[0] == "node":
            observed_slots |= {(lbl[1] - 1, s) for s in range(kappa)}
    observed_cats = sorted({cat for cat, _ in observed_slots})

    alt_inputs = tuple(
        SecretInput(float(a), p.weight, p.y)
        for a, p in zip(alt_secrets, transcript.inputs)
    )
    if not observed_slots:
        return SimulatedRun(transcript.masks, transcript.shares, alt_inputs)
    y = transcript.inputs[0].y
    root_y = abs(y) ** (1.0 / n)
    alpha0 = transcript.basis.alpha0
    full_cats = [
        cat for cat in range(4)
        if len({s for cc, s in observed_slots if cc == cat}) == kappa
    ]

    # per category: how (u, v) = (grade0, grade1) depend on c and the mask
    # pair (a, b): u = c + p*a + q*b, v = r*a + t*b
    comp = {0: (1, 0, 0, 1), 1: (-1, 0, 0, -1),
            2: (0, -1, 1, 0), 3: (0, 1, -1, 0)}

    def fused(cat, slot, j):
        hv = transcript.category_inputs[cat][slot][j]
        return _fused_root(hv.zero_entry), _fused_root(hv.stream_entry)

    def recover_full(cat, j, which, divisor):
        # a fully observed category reveals its masked base exactly: the
        # supplementary scales telescope out of the product over slots
        prod = math.prod(fused(cat, s, j)[which][0] for s in range(kappa))
        first = fused(cat, 0, j)[which]
        u = math.copysign(abs(prod) ** (1.0 / kappa), first[0]) / divisor
        return u, u * first[1] / first[0]

    def solve_pair(full_obs, ratio_obs, c_alt):
        """Least-squares (a', b') from absolute and ratio observations."""
        rows, rhs = [], []
        for cat, (u, v) in full_obs.items():
            p, q, r, t = comp[cat]
            rows.append([p, q]); rhs.append(u - c_alt)
            rows.append([r, t]); rhs.append(v)
        for cat, (u, v) in ratio_obs.items():
            p, q, r, t = comp[cat]
            # v*u' - u*v' = 0  with  u' = c' + p a' + q b', v' = r a' + t b'
            rows.append([v * p - u * r, v * q - u * t])
            rhs.append(-v * c_alt)
        sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        return float(sol[0]), float(sol[1])

    parties = []
    zero_scales = {}
    stream_scales = {}
    for j in range(n):
        c_alt = root_y * alt_inputs[j].code
        zero_full, zero_ratio, stream_full, stream_ratio = {}, {}, {}, {}
        for cat in observed_cats:
            if cat in full_cats:
                zero_full[cat] = recover_full(cat, j, 0, alpha0)
                stream_full[cat] = recover_full(cat, j, 1, 1.0)
            else:
                slot = min(s for cc, s in observed_slots if cc == cat)
                fz, fs = fused(cat, slot, j)
                zero_ratio[cat] = fz
                stream_ratio[cat] = fs
        zero_pair = solve_pair(zero_full, zero_ratio, c_alt)
        stream_pair = solve_pair(stream_full, stream_ratio, c_alt)
        parties.append(PartyMasks(zero_pair, stream_pair))

        # supplementary scales at every observed slot follow from the solved base
        for cat, slot in observed_slots:
            p, q, _, _ = comp[cat]
            fz, fs = fused(cat, slot, j)
            u_alt = c_alt + p * zero_pair[0] + q * zero_pair[1]
            zero_scales[(cat, j, slot)] = fz[0] / (alpha0 * u_alt)
            u_s = c_alt + p * stream_pair[0] + q * stream_pair[1]
            stream_scales[(cat, j, slot)] = fs[0] / u_s

    def rebuild_supp(observed_scales, original):
        cats = []
        for cat in range(4):
            users = []
            for j in range(n):
                row = list(original[cat][j])
                fixed = {s: v for (cc, jj, s), v in observed_scales.items()
                         if cc == cat and jj == j}
                free = [s for s in range(kappa) if s not in fixed]
                for s, v in fixed.items():
                    row[s] = v
                # keep the telescoping product at exactly one via a free slot
                if free:
                    anchor = free[-1]
                    rest = math.prod(row[s] for s in range(kappa) if s != anchor)
                    row[anchor] = 1.0 / rest
                users.append(tuple(row))
            cats.append(tuple(users))
        return tuple(cats)

    supp_zero = rebuild_supp(zero_scales, transcript.masks.supp_zero)
    supp_stream = rebuild_supp(stream_scales, transcript.masks.supp_stream)

    shares = []
    for j in range(n):
        total = alt_inputs[j].weight * alt_inputs[j].code
        pieces = [0.0] * (4 * kappa)
        fixed_sum = 0.0
        free = []
        for part in range(4 * kappa):
            cat, slot = divmod(part, kappa)
            if (cat, slot) in observed_slots:
                pieces[part] = transcript.category_inputs[cat][slot][j].share
                fixed_sum += pieces[part]
            else:
                free.append(part)
        fill = split_secret(total - fixed_sum, len(free), seed=2000 + j)
        for part, v in zip(free, fill):
            pieces[part] = v
        shares.append(tuple(pieces))

    return SimulatedRun(
        MaskSet(tuple(parties), supp_zero, supp_stream),
        tuple(shares), alt_inputs,
    )


# ---------------------------------------------------------------------------
# wrapped display
# ---------------------------------------------------------------------------

def wrapped_display(transcript: Transcript, f) -> float:
    """Apply a publicly visible outer function to the displayed argument."""
    return float(f(transcript.display.real))
