#!/usr/bin/env python3
"""Compare the edit-distance kernels (numba jit vs pure numpy).

    python3 benchmarks/bench_editdist.py
    python3 benchmarks/bench_editdist.py --sizes 16,64,256,1024 --repeats 30

The jit kernel needs one warmup call for compilation; it is excluded from
the timings.  Set SCRIPTEVAL_NO_NUMBA=1 before running to confirm the
package works without the jit (this script still times both kernels by
calling them directly).
"""

from __future__ import annotations

import argparse
import random
import statistics
import string
import time

from scripteval._editdist import (
    _codepoints,
    _njit_levenshtein,
    _numpy_levenshtein,
    backend,
    levenshtein,
)

ALPHABET = string.ascii_lowercase + string.digits + " "


def random_pair(rng: random.Random, size: int) -> tuple[str, str]:
    a = "".join(rng.choice(ALPHABET) for _ in range(size))
    # mutate ~20% of positions so distances are non-trivial
    chars = list(a)
    for i in range(len(chars)):
        if rng.random() < 0.2:
            chars[i] = rng.choice(ALPHABET)
    return a, "".join(chars)


def time_kernel(kernel, pairs, repeats: int) -> float:
    """Median seconds per call over `repeats` passes."""
    laps = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for a, b in pairs:
            kernel(a, b)
        laps.append((time.perf_counter() - t0) / len(pairs))
    return statistics.median(laps)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="16,64,256,1024",
                        help="comma-separated string lengths")
    parser.add_argument("--pairs", type=int, default=20,
                        help="random pairs per size")
    parser.add_argument("--repeats", type=int, default=20,
                        help="timing passes per kernel")
    parser.add_argument("--seed", type=int, default=1234)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rng = random.Random(args.seed)

    kernels = {"numpy": lambda a, b: _numpy_levenshtein(_codepoints(a),
                                                        _codepoints(b))}
    if _njit_levenshtein is not None:
        kernels["numba"] = lambda a, b: _njit_levenshtein(_codepoints(a),
                                                          _codepoints(b))
        _njit_levenshtein(_codepoints("warm"), _codepoints("up"))  # compile
    else:
        print("numba kernel unavailable (SCRIPTEVAL_NO_NUMBA set or numba "
              "missing); timing numpy only")
    print(f"dispatching backend for scripteval.levenshtein: {backend()}")

    header = f"{'size':>6} " + "".join(f"{name + ' us/op':>14}" for name in kernels)
    if len(kernels) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for size in sizes:
        pairs = [random_pair(rng, size) for _ in range(args.pairs)]
        for a, b in pairs:  # cross-check while we are here
            got = {name: kernel(a, b) for name, kernel in kernels.items()}
            assert len(set(got.values())) == 1, f"kernel mismatch: {got}"
            assert next(iter(got.values())) == levenshtein(a, b)
        per = {name: time_kernel(kernel, pairs, args.repeats)
               for name, kernel in kernels.items()}
        row = f"{size:>6} " + "".join(f"{per[name] * 1e6:>14.2f}" for name in per)
        if len(per) == 2:
            row += f"{per['numpy'] / per['numba']:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
