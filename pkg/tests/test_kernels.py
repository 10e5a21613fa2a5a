import os
import subprocess
import sys

import numpy as np
import pytest

from qeig import _kernels
from qeig.qmat import QMatrix, fullrand
from qeig.schur import hessenberg_reduce

from conftest import random_triangular

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")

NB = _kernels.NUMBA_KERNELS
NP = _kernels.NUMPY_KERNELS
ATOL = 1e-13


def test_same_kernel_names():
    assert set(NB) == set(NP) == set(_kernels._NAMES)


@pytest.mark.parametrize("m", [1, 2, 3, 7])
def test_house(m, rng):
    for x in (rng.standard_normal((m, 4)), np.zeros((m, 4)), np.eye(m, 4)):
        out = []
        for ks in (NB, NP):
            v, tau = np.zeros((m, 4)), np.zeros(4)
            beta = ks["house"](x.copy(), m, v, tau)
            out.append((beta, v, tau))
        assert out[0][0] == pytest.approx(out[1][0], rel=1e-14, abs=0)
        assert np.allclose(out[0][1], out[1][1], atol=ATOL)
        assert np.allclose(out[0][2], out[1][2], atol=ATOL)


def test_reflect(rng):
    A = rng.standard_normal((6, 5, 4))
    v = rng.standard_normal((3, 4))
    v[0] = (1, 0, 0, 0)
    tau = rng.standard_normal(4)
    for name, args in (("reflect_left", (3, 2, 1, 5)), ("reflect_right", (3, 1, 0, 6))):
        a1, a2 = A.copy(), A.copy()
        NB[name](a1, v, tau, *args)
        NP[name](a2, v, tau, *args)
        assert np.allclose(a1, a2, atol=ATOL)


def test_rotations(rng):
    A = rng.standard_normal((5, 5, 4))
    c = rng.standard_normal(4)
    c /= np.linalg.norm(c) * 1.2
    s = float(np.sqrt(1 - c @ c))
    for name, args in (("rot_left", (1, c, s, 0, 5)), ("rot_right", (2, c, s, 1, 4))):
        a1, a2 = A.copy(), A.copy()
        NB[name](a1, *args)
        NP[name](a2, *args)
        assert np.allclose(a1, a2, atol=ATOL)


def test_chase_and_accumulate():
    H, _ = hessenberg_reduce(fullrand(9, 3))
    outs = []
    for ks in (NB, NP):
        h = H.data.copy()
        V, TAU = np.zeros((9, 3, 4)), np.zeros((9, 4))
        nref = ks["chase"](h, 1, 7, -0.4, 0.9, V, TAU)
        U = QMatrix.identity(9).data
        ks["apply_seq_right"](U, V, TAU, 1, 7, nref)
        outs.append((nref, h, U))
    assert outs[0][0] == outs[1][0] == 6
    assert np.allclose(outs[0][1], outs[1][1], atol=ATOL)
    assert np.allclose(outs[0][2], outs[1][2], atol=ATOL)


def test_solve_triu(rng):
    T = random_triangular(rng, 7).data
    b = rng.standard_normal((7, 4))
    b1, b2 = b.copy(), b.copy()
    r1 = NB["solve_triu"](T, 7, 0.3, 0.2, b1)
    r2 = NP["solve_triu"](T, 7, 0.3, 0.2, b2)
    assert r1 == r2 == (1.0, -1)
    assert np.allclose(b1, b2, atol=1e-12 * np.abs(b1).max())


def test_backend_env_flag():
    code = "import qeig; print(qeig.BACKEND)"
    for want in ("numpy", "numba"):
        out = subprocess.run([sys.executable, "-c", code], env=dict(os.environ, QEIG_BACKEND=want),
                             capture_output=True, text=True, check=True)
        assert out.stdout.strip() == want
    bad = subprocess.run([sys.executable, "-c", code], env=dict(os.environ, QEIG_BACKEND="cuda"),
                         capture_output=True, text=True)
    assert bad.returncode != 0


def test_numpy_backend_end_to_end():
    code = ("import qeig\n"
            "from qeig.oracle import metrics\n"
            "A = qeig.fullrand(14, 2)\n"
            "d = qeig.schur_decompose(A)\n"
            "m = metrics(A, d.U, d.T)\n"
            "print(qeig.BACKEND, d.stats.aed_calls > 0, m.e1 < 1e-13 and m.e2 < 1e-13)\n")
    out = subprocess.run([sys.executable, "-c", code], env=dict(os.environ, QEIG_BACKEND="numpy"),
                         capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True", "True"]
