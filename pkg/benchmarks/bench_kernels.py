"""Wall-clock comparison of the compiled and numpy greedy-code kernels.

Usage: python benchmarks/bench_kernels.py [--cases 16:5,20:6,24:8] [--repeat 1]

Prints one CSV row per (backend, length, distance) with the code size, the
verified minimum distance and the best wall time in seconds.
"""

from __future__ import annotations

import argparse
import sys
import time

from lpreps import _kernels_py

try:
    from lpreps import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _cases(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.split(","):
        length, distance = item.split(":")
        out.append((int(length), int(distance)))
    return out


def bench(backend, length: int, distance: int, repeat: int) -> tuple[int, int, float]:
    seeds = [0, (1 << length) - 1]
    best = float("inf")
    words: list[int] = []
    for _ in range(repeat):
        start = time.perf_counter()
        words = backend.greedy_code(length, distance, seeds)
        best = min(best, time.perf_counter() - start)
    return len(words), backend.min_pairwise_distance(words), best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cases", default="16:5,20:6,24:8")
    parser.add_argument("--repeat", type=int, default=1)
    args = parser.parse_args(argv)
    backends = [_kernels_py] + ([_compiled] if _compiled is not None else [])
    print("backend,length,distance,size,min_distance,seconds")
    for length, distance in _cases(args.cases):
        for backend in backends:
            size, dmin, seconds = bench(backend, length, distance, args.repeat)
            print(f"{backend.BACKEND},{length},{distance},{size},{dmin},{seconds:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
