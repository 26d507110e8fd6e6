"""Compare the compiled LCS/edit-distance kernel against the Python fallback.

Usage: python benchmarks/bench_lcs.py [--n 2000] [--len 40] [--seed 0]
"""

import argparse
import random
import time

from netrans import _simdist_py

try:
    from netrans import _simdist_c
except ImportError:
    _simdist_c = None

ALPHABET = "北京上海广州深圳abcdefghijklmnop0123456789"


def make_pairs(n, max_len, seed):
    rng = random.Random(seed)
    return [
        (
            "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, max_len))),
            "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, max_len))),
        )
        for _ in range(n)
    ]


def bench(kernel, pairs):
    started = time.perf_counter()
    acc = 0
    for a, b in pairs:
        acc += kernel.lcs_length(a, b)
        acc += kernel.edit_distance_indel(a, b)
    return time.perf_counter() - started, acc


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=2000, help="number of string pairs")
    parser.add_argument("--len", dest="max_len", type=int, default=40,
                        help="maximum string length")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    pairs = make_pairs(args.n, args.max_len, args.seed)
    py_time, py_acc = bench(_simdist_py, pairs)
    print(f"{'kernel':<10}{'time':>10}  {'pairs/s':>12}")
    print(f"{'python':<10}{py_time:>9.3f}s  {args.n / py_time:>12.0f}")
    if _simdist_c is None:
        print("compiled kernel not built; run: python setup.py build_ext --inplace")
        return
    c_time, c_acc = bench(_simdist_c, pairs)
    assert c_acc == py_acc, "kernels disagree"
    print(f"{'c':<10}{c_time:>9.3f}s  {args.n / c_time:>12.0f}")
    print(f"speedup: {py_time / c_time:.1f}x")


if __name__ == "__main__":
    main()
