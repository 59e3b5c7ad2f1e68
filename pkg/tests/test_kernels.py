import os
import random
import subprocess
import sys

import pytest

import oracles
from lpreps import _kernels_py, kernels

try:
    from lpreps import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernel not built")


def seeds(n):
    return [0, (1 << n) - 1]


@pytest.mark.parametrize("n,m", [(8, 3), (12, 4), (16, 5), (20, 6)])
def test_fallback_matches_the_oracle_and_distance_holds(n, m):
    words = _kernels_py.greedy_code(n, m, seeds(n))
    if n <= 16:
        assert sorted(words) == oracles.greedy_code(n, m)
    assert _kernels_py.min_pairwise_distance(words) >= m


@needs_compiled
@pytest.mark.parametrize("n,m", [(8, 3), (12, 4), (16, 5), (20, 6)])
def test_backends_agree(n, m):
    assert compiled.greedy_code(n, m, seeds(n)) == _kernels_py.greedy_code(n, m, seeds(n))


@needs_compiled
def test_min_distance_backends_agree_with_oracle():
    rng = random.Random(0)
    for _ in range(20):
        words = rng.sample(range(1 << 14), rng.randint(2, 60))
        expected = oracles.min_pairwise_distance(words)
        assert compiled.min_pairwise_distance(words) == expected
        assert _kernels_py.min_pairwise_distance(words) == expected
    assert compiled.min_pairwise_distance([5]) == _kernels_py.min_pairwise_distance([5]) == -1


def test_environment_forces_the_fallback():
    env = dict(os.environ, LPREPS_KERNELS="numpy")
    out = subprocess.run(
        [sys.executable, "-c", "from lpreps import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_selected_backend():
    assert kernels.BACKEND in ("cython", "numpy")
    if compiled is not None and os.environ.get("LPREPS_KERNELS") != "numpy":
        assert kernels.BACKEND == "cython"
