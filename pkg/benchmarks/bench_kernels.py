"""Compare the numba and pure-numpy paths of the prime-field kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both variants are imported explicitly, so the env flag does not matter here;
results are checked for equality before timing is reported.
"""

import argparse
import time

import numpy as np

from dgquot._accel import HAVE_NUMBA
from dgquot.kernels import (
    eval_quadratic_numba,
    eval_quadratic_numpy,
    rref_mod_p_numba,
    rref_mod_p_numpy,
)


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def quadratic_case(rng, n_var, n_out, n_lin, n_quad, samples, p):
    lin = (rng.integers(0, n_out, n_lin), rng.integers(0, n_var, n_lin), rng.integers(1, p, n_lin))
    quad = (rng.integers(0, n_out, n_quad), rng.integers(0, n_var, n_quad), rng.integers(0, n_var, n_quad), rng.integers(1, p, n_quad))
    x = rng.integers(0, p, (samples, n_var))
    return x, lin, quad


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba not installed; only the numpy path is available")
        return
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<28}{'size':<22}{'numba s':>10}{'numpy s':>10}{'ratio':>8}")
    for m, n, p in [(60, 80, 2), (200, 260, 3), (400, 500, 101)]:
        a = rng.integers(0, p, (m, n))
        rref_mod_p_numba(a[:2, :2], p)  # compile
        tn, (rn, pn) = best_of(lambda: rref_mod_p_numba(a, p), args.repeat)
        tp, (rp, pp) = best_of(lambda: rref_mod_p_numpy(a, p), args.repeat)
        assert np.array_equal(rn, rp) and np.array_equal(pn, pp)
        print(f"{'rref_mod_p':<28}{f'{m}x{n} p={p}':<22}{tn:>10.4f}{tp:>10.4f}{tp / tn:>8.1f}")

    for n_var, n_out, n_quad, samples in [(40, 30, 2000, 1000), (120, 90, 20000, 10000)]:
        x, lin, quad = quadratic_case(rng, n_var, n_out, n_var, n_quad, samples, 2)
        eval_quadratic_numba(x[:1], lin, quad, n_out, 2)
        tn, on = best_of(lambda: eval_quadratic_numba(x, lin, quad, n_out, 2), args.repeat)
        tp, op = best_of(lambda: eval_quadratic_numpy(x, lin, quad, n_out, 2), args.repeat)
        assert np.array_equal(on, op)
        print(f"{'eval_quadratic_mod_p':<28}{f'{samples}x{n_quad} terms':<22}{tn:>10.4f}{tp:>10.4f}{tp / tn:>8.1f}")


if __name__ == "__main__":
    main()
