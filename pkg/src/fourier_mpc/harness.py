"""Deterministic in-process protocol simulation.

Runs a scenario as message-passing parties (users, nodes, display), records
the message pattern, captures corrupted-node views, and checks the two
operational invariants: no node talks to a node on its own level, and every
tolerated corrupted view set is reproducible under alternative secrets.
"""

from __future__ import annotations

import json
import time

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python < 3.11
    import tomli as tomllib

from dataclasses import dataclass, field, asdict
from fractions import Fraction

import numpy as np

from .fourier import normalized_cosine_basis
from .protocol import (
    MaskSet,
    PartyMasks,
    ProtocolError,
    SecretInput,
    SubsetTooLarge,
    Transcript,
    baseline_round,
    multi_node_round,
    n_party_round,
    sample_masks,
    simulate_views,
    two_party_round,
)
from .theta import ThetaError, ThetaExpr

VIEW_TOL = 1e-12


class ConfigInvalid(Exception):
    pass


@dataclass(frozen=True)
class Scenario:
    kind: str
    n: int = 2
    iota: int = 0
    tau: float = 1.0 / 6.0
    l: float = 1.0
    secrets: tuple = ()
    weights: tuple = ()
    y: float = 0.0
    seed: int = 0
    tolerance: float = 1e-9
    mode: str = "rank1"
    truncation: int = 256
    corrupted: tuple = ()
    baseline_mode: str = "sum"
    node_count: int = 4
    shares: tuple = ()  # optional explicit per-user share splits
    party_masks: tuple = ()  # optional explicit ((a0,b0),(a,b)) per user

    @staticmethod
    def from_dict(raw: dict) -> "Scenario":
        raw = dict(raw)
        kind = raw.pop("kind", None)
        if kind not in ("baseline", "two-party", "n-party", "multi-node"):
            raise ConfigInvalid(f"unknown scenario kind {kind!r}")
        tau = raw.pop("tau", 1.0 / 6.0)
        if isinstance(tau, str):
            tau = float(Fraction(tau))
        masks = tuple(
            PartyMasks(tuple(pm["zero"]), tuple(pm["stream"]))
            for pm in raw.pop("party_masks", ())
        )
        fields = {
            "n", "iota", "l", "secrets", "weights", "y", "seed", "tolerance",
            "mode", "truncation", "corrupted", "baseline_mode", "node_count",
            "shares",
        }
        unknown = set(raw) - fields
        if unknown:
            raise ConfigInvalid(f"unknown scenario fields {sorted(unknown)}")
        tuplify = {"secrets", "weights", "shares", "corrupted"}
        kwargs = {
            k: _deep_tuple(v) if k in tuplify else v for k, v in raw.items()
        }
        sc = Scenario(kind=kind, tau=float(tau), party_masks=masks, **kwargs)
        if sc.secrets and sc.weights and len(sc.secrets) != len(sc.weights):
            raise ConfigInvalid("secrets and weights must have equal length")
        return sc

    @staticmethod
    def from_toml(path) -> "Scenario":
        with open(path, "rb") as fh:
            return Scenario.from_dict(tomllib.load(fh))


def _deep_tuple(x):
    if isinstance(x, list):
        return tuple(_deep_tuple(v) for v in x)
    return x


@dataclass(frozen=True)
class MessageRecord:
    phase: str
    sender: tuple  # (role, index)
    receiver: tuple
    payload: str


@dataclass
class MessageLog:
    records: list = field(default_factory=list)

    def send(self, phase, sender, receiver, payload):
        self.records.append(MessageRecord(phase, sender, receiver, payload))

    def counts(self) -> dict:
        out: dict = {}
        for r in self.records:
            out[r.phase] = out.get(r.phase, 0) + 1
        return out

    def to_record(self) -> list:
        return [
            {"phase": r.phase, "sender": list(r.sender),
             "receiver": list(r.receiver), "payload": r.payload}
            for r in self.records
        ]


@dataclass(frozen=True)
class Report:
    display_re: float
    display_im: float
    expected: float
    residual: float
    privacy: str
    messages: dict
    elapsed_ms: float

    def to_record(self) -> dict:
        return asdict(self)


def serialize(transcript: Transcript, log: MessageLog) -> bytes:
    """Canonical byte serialization; identical scenarios give identical bytes."""
    doc = {"transcript": transcript.to_record(), "log": log.to_record()}
    return json.dumps(doc, sort_keys=True).encode()


# ---------------------------------------------------------------------------
# running scenarios
# ---------------------------------------------------------------------------

def _inputs(sc: Scenario):
    if not sc.secrets or not sc.weights:
        raise ConfigInvalid("scenario needs secrets and weights")
    return tuple(
        SecretInput(float(a), float(x), float(sc.y))
        for a, x in zip(sc.secrets, sc.weights)
    )


def _masks(sc: Scenario, kappa: int) -> MaskSet:
    if sc.party_masks:
        return MaskSet(sc.party_masks) if kappa == 0 else MaskSet(
            sc.party_masks,
            sample_masks(len(sc.party_masks), sc.seed, kappa).supp_zero,
            sample_masks(len(sc.party_masks), sc.seed, kappa).supp_stream,
        )
    return sample_masks(len(sc.secrets), sc.seed, kappa)


def run_transcript(sc: Scenario) -> Transcript:
    """Execute the scenario's round function only."""
    if sc.kind == "baseline":
        return baseline_round(sc.secrets, sc.baseline_mode, sc.node_count,
                              sc.seed)
    inputs = _inputs(sc)
    n = len(inputs)
    shares = sc.shares or None
    if sc.kind == "two-party":
        if n != 2:
            raise ConfigInvalid("two-party scenario needs exactly 2 secrets")
        basis = normalized_cosine_basis(sc.tau, 2, sc.l)
        return two_party_round(inputs[0], inputs[1], _masks(sc, 0), basis,
                               seed=sc.seed, shares=shares, mode=sc.mode,
                               truncation=sc.truncation)
    if sc.kind == "n-party":
        basis = normalized_cosine_basis(sc.tau, n, sc.l)
        return n_party_round(inputs, _masks(sc, 0), basis, seed=sc.seed,
                             shares=shares, mode=sc.mode,
                             truncation=sc.truncation)
    basis = normalized_cosine_basis(sc.tau, n, sc.l)
    return multi_node_round(inputs, sc.iota, _masks(sc, 3 * sc.iota), basis,
                            seed=sc.seed, shares=shares)


def _build_log(sc: Scenario, t: Transcript) -> MessageLog:
    log = MessageLog()
    if t.protocol.startswith("baseline"):
        nodes = len(t.node_outputs)
        for j in range(len(t.inputs)):
            for i in range(nodes):
                log.send("user-node", ("user", j), ("node", i + 1), "piece")
        for i in range(nodes):
            log.send("node-display", ("node", i + 1), ("display", 0), "value")
        return log
    n = len(t.inputs)
    if t.protocol == "multi-node":
        kappa = 3 * t.iota
        for j in range(n):
            for cat in range(4):
                for s in range(kappa):
                    log.send("user-node", ("user", j),
                             ("category", cat * kappa + s), "hyper-vector")
        # category slots feed their second-level node: a distinct phase, so
        # the no-inter-node invariant stays about same-level traffic
        for cat in range(4):
            for s in range(kappa):
                log.send("second level", ("category", cat * kappa + s),
                         ("node", cat + 1), "slot packet")
    else:
        for j in range(n):
            for i in range(4):
                log.send("user-node", ("user", j), ("node", i + 1),
                         "hyper-vector")
    for i in range(4):
        log.send("node-display", ("node", i + 1), ("display", 0), "value")
    return log


def assert_no_internode_traffic(log: MessageLog) -> str:
    """PASS iff no message travels between two nodes on the same level."""
    for r in log.records:
        if r.sender[0] == r.receiver[0] and r.sender[0] in ("node", "category"):
            return "FAIL"
    return "PASS"


# ---------------------------------------------------------------------------
# privacy check
# ---------------------------------------------------------------------------

def _entry_close(a, b, tol: float) -> bool:
    if isinstance(a, ThetaExpr) or isinstance(b, ThetaExpr):
        grades = set(a.grades) | set(b.grades)
        return all(abs(a.coeff(g) - b.coeff(g)) <= tol for g in grades)
    if isinstance(a, tuple):
        return len(a) == len(b) and all(
            _entry_close(x, y, tol) for x, y in zip(a, b)
        )
    return abs(complex(a) - complex(b)) <= tol


def _fused_pair(entry):
    r = entry.roots[0]
    m = {g: r.scale * c for g, c in r.base}
    return (m.get(0, 0j), m.get(1, 0j))


def _corrupted_views_match(t: Transcript, t2: Transcript, corrupted,
                           tol: float = VIEW_TOL) -> bool:
    if t.protocol == "multi-node":
        kappa = 3 * t.iota
        slots = {(lbl[1], lbl[2]) for lbl in corrupted if lbl[0] == "cat"}
        for lbl in corrupted:
            if lbl[0] == "node":
                slots |= {(lbl[1] - 1, s) for s in range(kappa)}
        for cat, s in slots:
            for j in range(len(t.inputs)):
                hv, hv2 = t.category_inputs[cat][s][j], t2.category_inputs[cat][s][j]
                if abs(hv.share - hv2.share) > tol:
                    return False
                for e, e2 in ((hv.zero_entry, hv2.zero_entry),
                              (hv.stream_entry, hv2.stream_entry)):
                    if not _entry_close(_fused_pair(e), _fused_pair(e2), tol):
                        return False
        return True
    for node in corrupted:
        for j in range(len(t.inputs)):
            hv, hv2 = t.node_inputs[node - 1][j], t2.node_inputs[node - 1][j]
            if abs(hv.share - hv2.share) > tol:
                return False
            if not _entry_close(hv.zero_entry, hv2.zero_entry, tol):
                return False
            if not _entry_close(hv.stream_entry, hv2.stream_entry, tol):
                return False
    return True


def privacy_check(transcript: Transcript, corrupted,
                  seed: int = 7, tol: float = VIEW_TOL) -> tuple:
    """(verdict, detail): PASS iff the corrupted views are reproduced under a
    randomly drawn alternative secret vector."""
    corrupted = tuple(corrupted)
    if not corrupted:
        return "PASS", "no corrupted nodes"
    rng = np.random.default_rng(seed)
    alt = rng.uniform(0.5, 5.0, len(transcript.inputs))
    try:
        sim = simulate_views(transcript, corrupted, alt)
    except SubsetTooLarge as exc:
        return "FAIL", f"beyond threshold: {exc}"
    try:
        if transcript.protocol == "two-party":
            rerun = two_party_round(sim.inputs[0], sim.inputs[1], sim.masks,
                                    transcript.basis, shares=sim.shares,
                                    mode=transcript.mode,
                                    truncation=transcript.truncation or 256)
        elif transcript.protocol == "n-party":
            rerun = n_party_round(sim.inputs, sim.masks, transcript.basis,
                                  shares=sim.shares, mode=transcript.mode,
                                  truncation=transcript.truncation or 256)
        else:
            rerun = multi_node_round(sim.inputs, transcript.iota, sim.masks,
                                     transcript.basis, shares=sim.shares)
    except (ProtocolError, ThetaError, ValueError) as exc:
        return "FAIL", f"simulated run rejected: {exc}"
    if _corrupted_views_match(transcript, rerun, corrupted, tol):
        return "PASS", "views reproduced under alternative secrets"
    return "FAIL", "simulated views deviate beyond tolerance"


# ---------------------------------------------------------------------------
# top-level entry point
# ---------------------------------------------------------------------------

def run(scenario: Scenario):
    """Execute a scenario; returns (Transcript, MessageLog, Report)."""
    start = time.perf_counter()
    transcript = run_transcript(scenario)
    log = _build_log(scenario, transcript)
    if assert_no_internode_traffic(log) != "PASS":
        raise ConfigInvalid("internal error: node-to-node traffic recorded")
    if scenario.corrupted and not transcript.protocol.startswith("baseline"):
        corrupted = _parse_corrupted(scenario.corrupted)
        privacy, detail = privacy_check(transcript, corrupted)
        privacy = f"{privacy} ({detail})"
    else:
        privacy = "PASS (no corrupted nodes)"
    elapsed = (time.perf_counter() - start) * 1e3
    report = Report(
        display_re=transcript.display.real,
        display_im=transcript.display.imag,
        expected=transcript.expected,
        residual=abs(transcript.residual),
        privacy=privacy,
        messages=log.counts(),
        elapsed_ms=elapsed,
    )
    return transcript, log, report


def _parse_corrupted(raw):
    """Scenario corruption labels: ints for the 4-node schemes, or
    ["cat", c, s] / ["node", i] entries for the multi-node scheme."""
    out = []
    for item in raw:
        if isinstance(item, int):
            out.append(item)
        else:
            item = tuple(item)
            out.append((item[0],) + tuple(int(v) for v in item[1:]))
    return tuple(out)
