"""Compare the compiled and pure-Python cluster kernels on Z^2 boxes.

Run with ``python3 benchmarks/bench_kernels.py [--sides 64 128 256] [--repeat 3]``.
"""

import argparse
import time

import numpy as np

from scaleinv.percolation import BoxSpec, bernoulli_sites, box_substrate
from scaleinv.percolation import _kernels_py

try:
    from scaleinv.percolation import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sides", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--p", type=float, default=0.6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
    backends = [("python", _kernels_py)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'side':>6} {'kernel':>10} {'backend':>8} {'seconds':>10} {'speedup':>8}")
    for n in args.sides:
        sub = box_substrate(BoxSpec(2, n))
        cfg = bernoulli_sites(sub, args.p, seed=1)
        mask = cfg.open.astype(np.uint8)
        base = {}
        labels = None
        for name, mod in backends:
            t, lab = best_of(lambda: mod.label_clusters(sub.indptr, sub.indices, mask), args.repeat)
            if labels is None:
                labels = lab
            elif not np.array_equal(labels, lab):
                raise SystemExit("backends disagree on labels")
            base.setdefault("label", t)
            print(f"{n:>6} {'label':>10} {name:>8} {t:>10.4f} {base['label'] / t:>8.1f}")
        counts = np.bincount(labels[labels >= 0])
        # second-largest cluster keeps the diameter run short but non-trivial
        target = int(np.argsort(-counts)[1]) if len(counts) > 1 else 0
        members = np.flatnonzero(labels == target).astype(np.int64)
        for name, mod in backends:
            t, d = best_of(lambda: mod.cluster_diameter(sub.indptr, sub.indices, members, labels, n * n),
                           args.repeat)
            base.setdefault("diam", t)
            print(f"{n:>6} {'diameter':>10} {name:>8} {t:>10.4f} {base['diam'] / t:>8.1f}  (size {len(members)}, diameter {d})")


if __name__ == "__main__":
    main()
