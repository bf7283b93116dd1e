"""Compiled vs reference kernel timings.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from polarook.kernels import _reference as ref

try:
    from polarook.kernels import _fast as fast
except ImportError:
    fast = None


def _time(fn, reps):
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def bench_case(name, make_args, runner, reps_ref, reps_fast):
    args = make_args()
    t_ref = _time(lambda: runner(ref, *args), reps_ref)
    if fast is None:
        print(f"{name:<34} reference {t_ref * 1e3:8.2f} ms   compiled: not built")
        return
    t_fast = _time(lambda: runner(fast, *args), reps_fast)
    print(
        f"{name:<34} reference {t_ref * 1e3:8.2f} ms   "
        f"compiled {t_fast * 1e3:8.3f} ms   speedup {t_ref / t_fast:6.1f}x"
    )


def main():
    rng = np.random.default_rng(0)
    print("kernel benchmark (one frame per call)")

    def sc_args(N):
        return lambda: (
            rng.normal(0, 2.5, N),
            np.full(N, ref.DECIDE, np.uint8),
            np.zeros(N, np.uint8),
        )

    def sc_run(mod, llr, acts, forced):
        mod.sc_pass(llr, acts, forced)

    for N in (1024, 4096, 65536):
        bench_case(f"sc_pass            N={N:>6}", sc_args(N), sc_run, 3, 30)

    def scl_args(N, L):
        def make():
            acts = (rng.random(N) < 0.7).astype(np.uint8)
            return rng.normal(0, 2.5, N), acts, np.zeros(N, np.uint8), L

        return make

    def scl_run(mod, llr, acts, forced, L):
        mod.scl_pass(llr, acts, forced, L)

    for N, L in ((1024, 8), (1024, 32), (4096, 32)):
        bench_case(f"scl_pass           N={N:>6} L={L:<3}", scl_args(N, L), scl_run, 2, 10)

    def shaped_args(N):
        def make():
            acts = np.full(N, ref.RANDOM, np.uint8)
            return np.full(N, 1.1), acts, np.zeros(N, np.uint8)

        return make

    def shaped_run(mod, llr, acts, forced):
        mod.sc_pass(llr, acts, forced, uniforms=np.random.default_rng(1).random(llr.shape[0]))

    for N in (1024, 4096):
        bench_case(f"shaping pass       N={N:>6}", shaped_args(N), shaped_run, 3, 30)


if __name__ == "__main__":
    main()
