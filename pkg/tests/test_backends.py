import os
import subprocess
import sys

import numpy as np
import pytest

from corrbreak import _kernels_numpy as npk

nbk = pytest.importorskip("corrbreak._kernels_numba")


def _close(a, b, tol=1e-10):
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, atol=tol, rtol=tol)


@pytest.mark.parametrize("kind", [0, 1])
def test_local_linear_agrees(kind):
    rng = np.random.default_rng(kind)
    t = np.arange(1, 301) / 300
    y = rng.standard_normal(300)
    _close(npk.local_linear(t, y, 0.1, kind)[:4], nbk.local_linear(t, y, 0.1, kind)[:4])


@pytest.mark.parametrize("zero", [False, True])
def test_classical_bootstrap_agrees(zero):
    rng = np.random.default_rng(3)
    C = rng.standard_normal((2, 200 - 6 + 1))
    R = rng.standard_normal((50, 200 - 6 + 1))
    _close([npk.classical_bootstrap(C, R, 6, 200, zero)], [nbk.classical_bootstrap(C, R, 6, 200, zero)])


def test_relevant_bootstrap_agrees():
    rng = np.random.default_rng(4)
    C = rng.standard_normal((2, 200 - 5 + 1))
    R = rng.standard_normal((40, 200 - 5 + 1))
    th = np.array([0.4, 0.55])
    _close(npk.relevant_bootstrap(C, R, 5, 200, th), nbk.relevant_bootstrap(C, R, 5, 200, th))


def test_ar_filter_agrees():
    rng = np.random.default_rng(5)
    coefs = rng.uniform(-0.4, 0.4, size=(500, 2))
    eps = rng.standard_normal(500)
    _close([npk.ar_filter(coefs, eps, 100)], [nbk.ar_filter(coefs, eps, 100)], 1e-12)


def _report_under(backend):
    code = ("from corrbreak import kernels; from corrbreak.classical import run_classical_test;"
            "from corrbreak.bootstrap import BootstrapConfig; from corrbreak.simulation import simulate;"
            "r = run_classical_test(simulate('II', 400, 1), (1, 2), boot=BootstrapConfig(B=200));"
            "print(kernels.BACKEND, repr(r.statistic), repr(r.critical_value), r.window)")
    env = dict(os.environ, CORRBREAK_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return out.stdout.split()


def test_env_flag_selects_backend_with_same_decision():
    a, b = _report_under("numba"), _report_under("numpy")
    assert a[0] == "numba" and b[0] == "numpy"
    assert a[3] == b[3]
    np.testing.assert_allclose([float(x) for x in a[1:3]], [float(x) for x in b[1:3]], rtol=1e-9)


def test_bad_flag_fails_import():
    env = dict(os.environ, CORRBREAK_BACKEND="fortran")
    res = subprocess.run([sys.executable, "-c", "import corrbreak.kernels"], env=env, capture_output=True)
    assert res.returncode != 0
