import os
import subprocess
import sys

import numpy as np
import pytest

from qsep import _kernels_py
from qsep.bipartitions import bipartition_classes, matricize
from qsep.quadratic import family_table

compiled = pytest.importorskip("qsep._kernels")


def _vectors(n, seed):
    rng = np.random.default_rng(seed)
    return [rng.standard_normal(n) + 1j * rng.standard_normal(n) for _ in range(2)]


@pytest.mark.parametrize("dims", [(2, 2), (2, 3, 4), (2, 2, 2, 2), (3, 3, 3)])
def test_backends_agree(dims):
    t = family_table(dims)
    a1, a2 = _vectors(int(np.prod(dims)), 1)
    for x, y in zip(compiled.family_coefficients(a1, a2, t.u, t.v, t.mu, t.nu),
                    _kernels_py.family_coefficients(a1, a2, t.u, t.v, t.mu, t.nu)):
        assert np.allclose(x, y, rtol=0, atol=1e-13)
    assert np.isclose(compiled.minor_norm_sq(a1, t.u, t.v, t.mu, t.nu),
                      _kernels_py.minor_norm_sq(a1, t.u, t.v, t.mu, t.nu), rtol=1e-13)
    for cls in bipartition_classes(len(dims)):
        m = matricize(a1.reshape(dims), cls)
        assert np.isclose(compiled.biquadratic(m), _kernels_py.biquadratic(m), rtol=1e-13)


@pytest.mark.parametrize("n", [1, 7, 600, 1300])
def test_pair_cross_norm(n):
    x, y = _vectors(n, n)
    want = float(np.sum(np.abs(np.outer(x, y) - np.outer(y, x)) ** 2))
    assert np.isclose(compiled.pair_cross_norm_sq(x, y), want, rtol=1e-12)
    assert np.isclose(_kernels_py.pair_cross_norm_sq(x, y), want, rtol=1e-12)


def test_empty_inputs():
    e = np.zeros(0, dtype=np.intp)
    a = np.ones(4, dtype=complex)
    assert compiled.minor_norm_sq(a, e, e, e, e) == 0.0
    alpha, _, _ = compiled.family_coefficients(a, a, e, e, e, e)
    assert len(alpha) == 0


def test_forced_fallback_gives_same_verdict():
    script = (
        "import qsep, numpy as np\n"
        "from qsep.oracle import build_separable_rank2\n"
        "a, b = qsep.random_product_state((2, 3, 4), 1), qsep.random_product_state((2, 3, 4), 2)\n"
        "v = qsep.decide(qsep.rank2_eigendecompose(build_separable_rank2((a, b), 0.3)))\n"
        "print(qsep.BACKEND, v.status.value, repr(v.p_prime))\n"
    )
    outs = {}
    for backend in ("python", "auto"):
        env = dict(os.environ, QSEP_BACKEND=backend)
        proc = subprocess.run([sys.executable, "-c", script], env=env, capture_output=True, text=True, check=True)
        outs[backend] = proc.stdout.split()
    assert outs["python"][0] == "python" and outs["auto"][0] == "cython"
    assert outs["python"][1] == outs["auto"][1] == "Separable"
    assert abs(float(outs["python"][2]) - float(outs["auto"][2])) < 1e-12
