import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qeig import QMatrix, aed_step, fullrand, reorder_selected, swap_adjacent
from qeig.qmat import Rotation2, frob_norm
from qeig.quat import EPS, Quaternion
from qeig.reorder import AedConfig, _swap_data, _swap_fast, aed_window_size
from qeig.schur import hessenberg_reduce, make_shift, qr_sweep

from conftest import random_triangular


def diag_c(T):
    d = T.diagonal()
    return d[:, 0] + 1j * d[:, 1]


def similarity_residual(T0, Q, T):
    return frob_norm(Q.H @ T0 @ Q - T)


# ---------------------------------------------------------------------------
# swap


def test_swap_real_two_by_two():
    T = QMatrix.from_complex(np.array([[1, 5], [0, 2]], dtype=complex))
    T0 = T.copy()
    Q = QMatrix.identity(2)
    G = swap_adjacent(T, Q, 0)
    assert abs(G.c - Quaternion(5 / np.sqrt(26))) <= 4 * EPS
    assert list(diag_c(T)) == [2, 1]
    assert T.is_upper_triangular()
    assert frob_norm(G.matrix().H @ T0 @ G.matrix() - T) <= 1e-14
    assert Q == G.matrix()


def test_swap_same_class_is_identity(rng):
    T = random_triangular(rng, 3)
    T.data[1, 1] = T.data[0, 0]
    T0 = T.copy()
    G = swap_adjacent(T, None, 0)
    assert G == Rotation2.identity()
    assert T == T0


def test_swap_twice_restores_diagonal(rng):
    T = random_triangular(rng, 4)
    d0 = diag_c(T)
    swap_adjacent(T, None, 1)
    swap_adjacent(T, None, 1)
    assert np.array_equal(diag_c(T), d0)


def test_swap_index_check(rng):
    T = random_triangular(rng, 3)
    with pytest.raises(IndexError):
        swap_adjacent(T, None, 2)


def test_fused_swap_matches_reference(rng):
    for n in (2, 5, 9):
        T = random_triangular(rng, n)
        Q = QMatrix.identity(n)
        spike = rng.standard_normal((n, 4))
        T1, Q1, s1 = T.data.copy(), Q.data.copy(), spike.copy()
        T2, Q2, s2 = T.data.copy(), Q.data.copy(), spike.copy()
        for k in range(n - 1):
            _swap_data(T1, Q1, k, s1)
            _swap_fast(T2, Q2, k, s2)
        assert np.allclose(T1, T2, rtol=0, atol=1e-13 * frob_norm(T))
        assert np.allclose(Q1, Q2, rtol=0, atol=1e-13)
        assert np.allclose(s1, s2, rtol=0, atol=1e-13)
        assert np.array_equal(np.diagonal(T1[..., :2]), np.diagonal(T2[..., :2]))


# ---------------------------------------------------------------------------
# reorder


def test_reorder_trivial_masks(rng):
    T = random_triangular(rng, 4)
    T0 = T.copy()
    assert reorder_selected(T, None, [1, 1, 1, 1]) == [0, 1, 2, 3]
    assert reorder_selected(T, None, [0, 0, 0, 0]) == [0, 1, 2, 3]
    assert T == T0


def test_reorder_moves_last_to_front(rng):
    T = random_triangular(rng, 3)
    a, b, c = diag_c(T)
    perm = reorder_selected(T, None, [0, 0, 1])
    assert perm == [2, 0, 1]
    assert list(diag_c(T)) == [c, a, b]


def test_reorder_mask_length(rng):
    with pytest.raises(ValueError):
        reorder_selected(random_triangular(rng, 3), None, [1, 0])


def test_reorder_random_16(rng):
    T = random_triangular(rng, 16)
    T0 = T.copy()
    Q = QMatrix.identity(16)
    mask = rng.random(16) < 0.4
    perm = reorder_selected(T, Q, mask)
    k = int(mask.sum())
    assert sorted(diag_c(T)[:k].tolist(), key=lambda z: (z.real, z.imag)) == \
        sorted(diag_c(T0)[mask].tolist(), key=lambda z: (z.real, z.imag))
    assert perm[:k] == sorted(np.flatnonzero(mask).tolist())
    assert T.is_upper_triangular()
    assert similarity_residual(T0, Q, T) <= 100 * 16 * EPS * frob_norm(T0)


@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_reorder_property(n, seed):
    rng = np.random.default_rng(seed)
    T = random_triangular(rng, n)
    T0 = T.copy()
    Q = QMatrix.identity(n)
    mask = rng.random(n) < 0.5
    perm = reorder_selected(T, Q, mask)
    assert np.array_equal(diag_c(T), diag_c(T0)[perm])
    assert T.is_upper_triangular()
    assert similarity_residual(T0, Q, T) <= 100 * n * EPS * frob_norm(T0)
    assert frob_norm(Q.H @ Q - QMatrix.identity(n)) <= 100 * n * EPS


# ---------------------------------------------------------------------------
# AED


@pytest.mark.parametrize("n, nw", [(11, 0), (12, 4), (29, 4), (30, 6), (64, 10), (149, 10),
                                   (150, 24), (256, 24), (589, 24), (590, 64), (1024, 64)])
def test_window_schedule(n, nw):
    assert aed_window_size(n) == nw


def test_window_override_and_validation():
    assert aed_window_size(40, AedConfig(window=8)) == 8
    assert aed_window_size(40, AedConfig(window=100)) == 39
    for bad in (dict(nibble=-1), dict(nibble=101), dict(window=1), dict(spike_rule="loose")):
        with pytest.raises(ValueError):
            AedConfig(**bad)


def test_aed_zero_spike_deflates_everything(rng):
    n = 14
    H = random_triangular(rng, n)
    U = QMatrix.identity(n)
    H0 = H.copy()
    out = aed_step(H, U, 0, n - 1, AedConfig(window=4))
    assert (out.n_deflated, out.n_undeflatable) == (4, 0)
    assert similarity_residual(H0, U, H) <= 1e-13 * frob_norm(H0)


def test_aed_large_spike_undeflatable():
    H, _ = hessenberg_reduce(fullrand(16, 1))
    U = QMatrix.identity(16)
    H0 = H.copy()
    out = aed_step(H, U, 0, 15, AedConfig(window=4, spike_rule="never"))
    assert (out.n_deflated, out.n_undeflatable) == (0, 4)
    assert H == H0 and U == QMatrix.identity(16)


def test_aed_outcome_accounting_and_similarity():
    n = 40
    H, _ = hessenberg_reduce(fullrand(n, 2))
    U = QMatrix.identity(n)
    H0 = H.copy()
    hi = n - 1
    for _ in range(6):
        out = aed_step(H, U, 0, hi)
        assert out.n_deflated + out.n_undeflatable == out.window == aed_window_size(n)
        assert out.spike.shape == (out.window,)
        assert H.is_hessenberg()
        hi -= out.n_deflated
        if hi < 12:
            break
    assert similarity_residual(H0, U, H) <= 1e-13 * frob_norm(H0)
    assert frob_norm(U.H @ U - QMatrix.identity(n)) <= 1e-13


def test_aed_deflated_entries_standardized():
    n = 30
    H, _ = hessenberg_reduce(fullrand(n, 4))
    for _ in range(40):
        out = aed_step(H, None, 0, n - 1, AedConfig(window=6))
        if out.n_deflated:
            break
        # plain sweeps until the bottom has converged far enough to deflate
        qr_sweep(H, None, 0, n - 1, make_shift(H, 0, n - 1))
    assert out.n_deflated > 0
    d = H.diagonal()[n - out.n_deflated:]
    assert np.all(d[:, 2:] == 0.0) and np.all(d[:, 1] >= 0.0)
    for k in range(n - out.n_deflated, n):
        assert np.all(H.data[k, k - 1] == 0.0)


def test_aed_small_blocks_are_noops():
    H, _ = hessenberg_reduce(fullrand(5, 0))
    H0 = H.copy()
    out = aed_step(H, None, 3, 4)
    assert out.window == 0 and H == H0
    with pytest.raises(IndexError):
        aed_step(H, None, 0, 5)
