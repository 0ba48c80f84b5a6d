import json
import os
import subprocess
import sys

import numpy as np
import pytest

from rieszlab import _accel

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")

N = 200_000
MU = _accel.NUMPY_KERNELS["sieve_mobius"](N)

CASES = {
    "riesz_direct_sum": [(0.5, MU, 4000), (50.0, MU, N)],
    "s_sum": [(0.01, MU, 3000), (1.0, MU, 40)],
    "s_prime_sum": [(0.01, MU, 3000), (1.0, MU, 40)],
    "kbar_sum": [(0.01, MU, 3000), (1.5, MU, 40)],
    "mu_weighted_sum": [(2, MU, N), (3, MU, 1000)],
    "cos_comp_sum": [(1e3, MU, N, 1), (1e3, MU, N, 2)],
    "pz_comp_sum": [(1e4, 0.0, 0.0, MU, N, 1), (1e4, 0.3, 0.2, MU, N, 2)],
}


def test_sieves_identical():
    assert np.array_equal(_accel.NUMPY_KERNELS["sieve_mobius"](N), _accel.NUMBA_KERNELS["sieve_mobius"](N))


@pytest.mark.parametrize("name, args", [(k, a) for k, v in CASES.items() for a in v])
def test_backends_agree(name, args):
    a = np.atleast_1d(np.asarray(_accel.NUMPY_KERNELS[name](*args), dtype=float))
    b = np.atleast_1d(np.asarray(_accel.NUMBA_KERNELS[name](*args), dtype=float))
    scale = max(float(np.max(np.abs(a))), 1e-300)
    # summands are at most of order one, and several sums cancel to far below that
    assert float(np.max(np.abs(a - b))) <= 1e-12 * scale + 1e-14


def _probe(env_value):
    env = dict(os.environ, RIESZLAB_DISABLE_NUMBA=env_value)
    code = (
        "import json; from rieszlab import _accel, riesz; "
        "print(json.dumps([_accel.backend(), riesz.riesz_direct(1.0).value]))"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_environment_switch_selects_numpy():
    nb, r_nb = _probe("0")
    np_, r_np = _probe("1")
    assert (nb, np_) == ("numba", "numpy")
    assert r_np == pytest.approx(r_nb, rel=1e-14)
