#!/usr/bin/env python3
"""Sweep the dual-path sum identity over tau, n, and truncation depth.

Two independent computations of (C, S) — the convolution pipeline and the
direct product/cross-sum path — must agree. This sweep reports the worst
relative gap over random dense coefficient sets for each (n, M) cell, and
separately verifies the normalization identity alpha0^n/2 + M_n = 1 over a
tau grid.
"""

import argparse

import numpy as np

from fourier_mpc.fourier import (
    constants_pipeline,
    constants_product,
    dense,
    identity_gap,
    normalized_cosine_basis,
)


def random_sets(rng, n, M):
    m = np.arange(1, M + 1, dtype=float)
    out = []
    for _ in range(n):
        decay = rng.uniform(1.0, 3.0)
        out.append(dense(rng.normal(), rng.normal(size=M) / m**decay,
                         rng.normal(size=M) / m**decay))
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("dual-path identity, worst relative gap:")
    print(f"{'n':>3} " + " ".join(f"{f'M={M}':>12}" for M in (8, 32, 128)))
    for n in range(2, 7):
        row = [f"{n:>3}"]
        for M in (8, 32, 128):
            rng = np.random.default_rng(args.seed + 100 * n + M)
            worst = 0.0
            for _ in range(args.trials):
                sets = random_sets(rng, n, M)
                c1, s1 = constants_pipeline(sets)
                c2, s2 = constants_product(sets)
                lhs, rhs = c1 + s1, c2 + s2
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
            row.append(f"{worst:>12.3e}")
        print(" ".join(row))

    print("\nnormalization identity |alpha0^n/2 + M_n - 1|:")
    taus = (0.1, 0.25, 0.5, 0.75, 0.9)
    print(f"{'n':>3} " + " ".join(f"{f'tau={t}':>12}" for t in taus))
    for n in range(2, 6):
        gaps = [abs(identity_gap(normalized_cosine_basis(t, n), n))
                for t in taus]
        print(f"{n:>3} " + " ".join(f"{g:>12.3e}" for g in gaps))


if __name__ == "__main__":
    main()
