"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py --rows-r 2000 --rows-s 4000 --attr-len 100

Prints one CSV row per (backend, task) with the median wall time.
"""

import argparse
import csv
import random
import statistics
import sys
import time
from contextlib import contextmanager

from sigjoin import _backend
from sigjoin.gf import build_context
from sigjoin.join import HASH_BASELINE, HASH_SIGNATURE, JoinSpec, hash_join
from sigjoin.relation import GenSpec, generate_pair


@contextmanager
def use_backend(name):
    saved = _backend.kernels
    _backend.kernels = _backend.get(name)
    try:
        yield
    finally:
        _backend.kernels = saved


def median_ms(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        times.append(time.perf_counter_ns() - t0)
    return statistics.median(times) / 1e6


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows-r", type=int, default=2000)
    ap.add_argument("--rows-s", type=int, default=4000)
    ap.add_argument("--attr-len", type=int, default=100)
    ap.add_argument("--pages", type=int, default=64, help="4 KB pages signed per throughput run")
    ap.add_argument("--repetitions", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    ctx = build_context(16)
    rng = random.Random(args.seed)
    pages = [rng.randbytes(4096) for _ in range(args.pages)]
    gen = generate_pair(GenSpec(args.rows_r, args.rows_s, args.attr_len, seed=args.seed))
    mb = len(pages) * 4096 / 2**20

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["backend", "task", "median_ms", "note"])
    for name in sorted(_backend.BACKENDS):
        kern = _backend.get(name)
        ms = median_ms(lambda: kern.sign_throughput(pages, ctx, 2), args.repetitions)
        w.writerow([name, "sign_4k_pages", f"{ms:.3f}", f"{ms / mb:.2f} ms/MB"])
        with use_backend(name):
            for algo in (HASH_BASELINE, HASH_SIGNATURE):
                spec = JoinSpec(algorithm=algo)
                res = hash_join(gen.r, gen.s, spec)
                ms = median_ms(lambda: hash_join(gen.r, gen.s, spec), args.repetitions)
                w.writerow([name, algo, f"{ms:.3f}", f"{len(res)} pairs"])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
