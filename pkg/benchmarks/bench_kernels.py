"""Time the compiled and numpy two-mode kernels side by side.

    python3 benchmarks/bench_kernels.py [--dims 32 64 128] [--repeat 5]

Reports the best-of-repeat time per call for the interferometer and
harmonic-conversion generator actions, and for a full Krylov evolution
exp(i chi G)|psi> driven by each backend.
"""
import argparse
import timeit

import numpy as np

from gravkerr import kernels
from gravkerr.fock import make_tmsv
from gravkerr.krylov import expm_hermitian_action


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench(dims, repeat):
    backends = kernels.backends()
    rng = np.random.default_rng(0)
    rows = []
    for d in dims:
        psi = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        thg_psi = np.ascontiguousarray(psi[:, :4])
        evolve_psi = make_tmsv(0.5, dim=d, tol=1.0).amplitudes.copy()
        number = max(1, 20000 // (d * d))
        for name, mod in backends.items():
            def mz():
                return mod.mz_apply(psi, 0.5, 0.5)

            def thg():
                return mod.thg_apply(thg_psi)

            def evolve():
                def matvec(v):
                    return mod.mz_apply(v.reshape(d, d), 0.5, 0.5).ravel()
                return expm_hermitian_action(matvec, evolve_psi.ravel(), 1e-2)

            rows.append((d, name, best(mz, repeat, number), best(thg, repeat, number),
                         best(evolve, repeat, 1)))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[16, 32, 64, 128])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rows = bench(args.dims, args.repeat)
    print(f"selected backend: {kernels.BACKEND}")
    print(f"{'dim':>5} {'backend':>8} {'mz_apply':>12} {'thg_apply':>12} {'evolve':>12}")
    by_dim = {}
    for d, name, t_mz, t_thg, t_ev in rows:
        by_dim.setdefault(d, {})[name] = (t_mz, t_thg, t_ev)
        print(f"{d:>5} {name:>8} {t_mz * 1e6:>10.1f}us {t_thg * 1e6:>10.1f}us {t_ev * 1e3:>10.2f}ms")
    if "cython" in kernels.backends():
        print("speed-up of the compiled backend (python time / cython time):")
        for d, t in by_dim.items():
            ratios = [p / c for p, c in zip(t["python"], t["cython"])]
            print(f"{d:>5} mz {ratios[0]:5.2f}x  thg {ratios[1]:5.2f}x  evolve {ratios[2]:5.2f}x")


if __name__ == "__main__":
    main()
