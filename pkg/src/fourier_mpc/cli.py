"""Command-line front end.

Subcommands map to simulation scenarios and verification suites; exit code 0
means success with verdict PASS, 1 a FAIL verdict, 2 a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

import numpy as np

from . import chebyshev
from .fourier import (
    constants_pipeline,
    constants_product,
    normalized_cosine_basis,
)
from .harness import ConfigInvalid, Report, Scenario, run
from .protocol import (
    ProtocolError,
    SecretInput,
    oracle_display,
    n_party_round,
    sample_masks,
)

GOLDEN_SCENARIO = "worked_example.toml"


def _tau_arg(text: str) -> float:
    try:
        value = float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from exc
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("tau must lie strictly in (0, 1)")
    return value


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", help="scenario file (TOML)")
    p.add_argument("--n", type=int, default=None, help="number of users")
    p.add_argument("--iota", type=int, default=None, help="category parameter")
    p.add_argument("--tau", type=_tau_arg, default=None,
                   help="basis parameter, rational like 1/6")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("rank1", "dense"), default=None)
    p.add_argument("--truncation", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--out", help="write the report to this path")
    p.add_argument("--json", action="store_true", dest="as_json",
                   help="machine-readable report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fourier-mpc",
        description="Masked multi-party expression display over Fourier "
                    "coefficient streams",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("run-two-party", "run a two-party scenario"),
        ("run-n-party", "run an n-party scenario"),
        ("run-multi-node", "run a multi-node category scenario"),
        ("run-baseline", "run a baseline splitting scenario"),
        ("paper-example", "run the bundled worked-example scenario"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        if name == "run-baseline":
            p.add_argument("--baseline-mode", choices=("sum", "product"),
                           default="sum")

    p = sub.add_parser("verify-identity",
                       help="check the n-function sum identity along two "
                            "independent computation paths")
    _add_common(p)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--dense-m", type=int, default=32)

    p = sub.add_parser("diagnose-residual",
                       help="compare the protocol residual against the "
                            "brute-force expansion oracle")
    _add_common(p)

    p = sub.add_parser("approx",
                       help="lower a two-variable expression to a Chebyshev "
                            "tensor form and report the error bound")
    _add_common(p)
    p.add_argument("--func", choices=("bilinear", "square", "gauss", "ratio"),
                   default="bilinear")
    p.add_argument("--degree", type=int, default=8)
    p.add_argument("--degree-b", type=int, default=None)
    p.add_argument("--max-deriv", type=float, default=None,
                   help="bound on the (m+1)-th partial derivative")
    return parser


def _emit(args, lines, payload) -> None:
    text = json.dumps(payload, sort_keys=True) if args.as_json \
        else "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _scenario_from_args(args, kind: str) -> Scenario:
    if args.scenario:
        sc = Scenario.from_toml(args.scenario)
    else:
        n = args.n or (2 if kind in ("two-party", "baseline") else 3)
        rng = np.random.default_rng(args.seed)
        sc = Scenario(
            kind=kind, n=n,
            secrets=tuple(rng.uniform(0.5, 3.0, n)),
            weights=tuple(rng.uniform(-2.0, 2.0, n)),
            y=float(rng.uniform(0.5, 2.0)),
            iota=args.iota if args.iota is not None else (1 if kind == "multi-node" else 0),
            seed=args.seed,
        )
    overrides = {}
    for name in ("iota", "tau", "seed", "mode", "truncation", "tolerance"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    if getattr(args, "baseline_mode", None):
        overrides["baseline_mode"] = args.baseline_mode
    if overrides:
        from dataclasses import replace
        sc = replace(sc, **overrides)
    return sc


def _run_scenario(args, sc: Scenario) -> int:
    transcript, log, report = run(sc)
    verdict = "PASS"
    reasons = []
    if abs(transcript.display.imag) > sc.tolerance:
        reasons.append("imaginary part above tolerance")
    n = len(transcript.inputs)
    correctness_expected = transcript.protocol.startswith("baseline") or n <= 3
    if correctness_expected and abs(report.residual) > 1e-8 * (
        1 + abs(report.expected)
    ):
        reasons.append("residual above tolerance")
    if report.privacy.startswith("FAIL"):
        reasons.append(report.privacy)
    if reasons:
        verdict = "FAIL"
    payload = report.to_record() | {"verdict": verdict, "reasons": reasons}
    lines = [f"{k}={v}" for k, v in report.to_record().items()]
    lines.append(f"verdict={verdict}" + (f" ({'; '.join(reasons)})" if reasons else ""))
    _emit(args, lines, payload)
    return 0 if verdict == "PASS" else 1


def _cmd_run(args, kind: str) -> int:
    return _run_scenario(args, _scenario_from_args(args, kind))


def _cmd_paper_example(args) -> int:
    path = resources.files("fourier_mpc.data").joinpath(GOLDEN_SCENARIO)
    with resources.as_file(path) as p:
        sc = Scenario.from_toml(p)
    return _run_scenario(args, sc)


def _cmd_verify_identity(args) -> int:
    n = args.n or 3
    tol = args.tolerance or 1e-9
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    m = np.arange(1, args.dense_m + 1)
    for _ in range(args.trials):
        sets = [_dense_set(rng, m, rng.uniform(1.0, 3.0)) for _ in range(n)]
        c_pipe, s_pipe = constants_pipeline(sets)
        c_prod, s_prod = constants_product(sets)
        lhs, rhs = c_pipe + s_pipe, c_prod + s_prod
        rel = abs(lhs - rhs) / max(1.0, abs(rhs))
        worst = max(worst, rel)
    verdict = "PASS" if worst <= tol else "FAIL"
    _emit(args, [f"n={n}", f"trials={args.trials}",
                 f"worst_relative_gap={worst:.3e}", f"verdict={verdict}"],
          {"n": n, "trials": args.trials, "worst_relative_gap": worst,
           "verdict": verdict})
    return 0 if verdict == "PASS" else 1


def _dense_set(rng, m, decay):
    from .fourier import dense

    alphas = rng.normal(size=m.size) / m.astype(float) ** decay
    betas = rng.normal(size=m.size) / m.astype(float) ** decay
    return dense(rng.normal(), alphas, betas)


def _cmd_diagnose_residual(args) -> int:
    n = args.n or 4
    rng = np.random.default_rng(args.seed)
    inputs = [
        SecretInput(float(a), float(x), 1.0)
        for a, x in zip(rng.uniform(0.5, 2.0, n), rng.uniform(-1.0, 1.0, n))
    ]
    masks = sample_masks(n, args.seed, mask_scale=2.0)
    basis = normalized_cosine_basis(args.tau or 1.0 / 6.0, n)
    t = n_party_round(inputs, masks, basis)
    oracle = oracle_display(inputs, masks, basis) - t.expected
    gap = abs(t.residual - oracle)
    verdict = "PASS" if gap <= (args.tolerance or 1e-10) else "FAIL"
    _emit(args, [f"n={n}", f"residual={t.residual}", f"oracle={oracle}",
                 f"path_gap={gap:.3e}", f"verdict={verdict}"],
          {"n": n, "residual": [t.residual.real, t.residual.imag],
           "oracle": [oracle.real, oracle.imag], "path_gap": gap,
           "verdict": verdict})
    return 0 if verdict == "PASS" else 1


_APPROX_FUNCS = {
    "bilinear": lambda a, b: a * b,
    "square": lambda a, b: (a + b) ** 2,
    "gauss": lambda a, b: float(np.exp(-(a * a + b * b))),
    "ratio": lambda a, b: 1.0 / (2.0 + a * b),
}


def _cmd_approx(args) -> int:
    phi = _APPROX_FUNCS[args.func]
    m = args.degree
    mp = args.degree_b if args.degree_b is not None else m
    bound = (chebyshev.error_bound(args.max_deriv, m)
             if args.max_deriv is not None else None)
    model = chebyshev.interp_2d(phi, m, mp, bound or 0.0)
    grid = np.linspace(-1.0, 1.0, 41)
    err = max(
        abs(model(float(a), float(b)) - phi(float(a), float(b)))
        for a in grid for b in grid
    )
    verdict = "PASS" if bound is None or err <= bound + 1e-12 else "FAIL"
    lines = [f"func={args.func}", f"degrees=({m},{mp})",
             f"max_grid_error={err:.3e}"]
    payload = {"func": args.func, "degree_a": m, "degree_b": mp,
               "max_grid_error": err, "verdict": verdict}
    if bound is not None:
        lines.append(f"bound={bound:.3e}")
        payload["bound"] = bound
    lines.append(f"verdict={verdict}")
    _emit(args, lines, payload)
    return 0 if verdict == "PASS" else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "run-two-party":
            return _cmd_run(args, "two-party")
        if args.command == "run-n-party":
            return _cmd_run(args, "n-party")
        if args.command == "run-multi-node":
            return _cmd_run(args, "multi-node")
        if args.command == "run-baseline":
            return _cmd_run(args, "baseline")
        if args.command == "paper-example":
            return _cmd_paper_example(args)
        if args.command == "verify-identity":
            return _cmd_verify_identity(args)
        if args.command == "diagnose-residual":
            return _cmd_diagnose_residual(args)
        if args.command == "approx":
            return _cmd_approx(args)
    except (ConfigInvalid, ProtocolError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
