import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qmaxcorr import linalg
from qmaxcorr.errors import ConvergenceFailure, DimensionMismatch, NotHermitian, NotPSD


def random_complex(shape, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_hermitian_eig_descending_and_reconstructs():
    g = random_complex((5, 5), 0)
    h = g + g.conj().T
    spec = linalg.hermitian_eig(h)
    assert np.all(np.diff(spec.eigenvalues) <= 0)
    assert_allclose(spec.reconstruct(), h, atol=1e-12)
    assert_allclose(spec.eigenvalues, np.sort(np.linalg.eigvalsh(h))[::-1], atol=1e-12)


def test_hermitian_eig_rejects_non_hermitian_and_non_square():
    with pytest.raises(NotHermitian):
        linalg.hermitian_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(DimensionMismatch):
        linalg.hermitian_eig(np.ones((2, 3)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_svd_reconstructs_and_orders(m, n, seed):
    a = random_complex((m, n), seed)
    spec = linalg.svd(a)
    assert_allclose(spec.reconstruct(), a, atol=1e-12)
    assert np.all(np.diff(spec.singular_values) <= 0)
    # right_vectors holds V itself: A V = U S
    assert_allclose(a @ spec.right_vectors, spec.left_vectors * spec.singular_values, atol=1e-12)


def test_svd_falls_back_then_raises(monkeypatch):
    calls = []

    def broken(a, full_matrices, lapack_driver):
        calls.append(lapack_driver)
        raise np.linalg.LinAlgError("no convergence")

    monkeypatch.setattr(linalg.scipy.linalg, "svd", broken)
    with pytest.raises(ConvergenceFailure):
        linalg.svd(np.eye(2))
    assert calls == ["gesdd", "gesvd"]


def test_psd_functions_on_rank_deficient_matrix():
    v = random_complex((4, 2), 3)
    m = v @ v.conj().T
    s = linalg.psd_inverse_sqrt(m)
    p = linalg.support_projector(m)
    assert_allclose(s @ m @ s, p, atol=1e-10)
    assert_allclose(p @ p, p, atol=1e-12)
    assert np.trace(p).real == pytest.approx(2.0)
    r = linalg.psd_sqrt(m)
    assert_allclose(r @ r, m, atol=1e-12)
    assert_allclose(s @ r, p, atol=1e-10)


def test_psd_rejects_negative_eigenvalue():
    with pytest.raises(NotPSD):
        linalg.psd_sqrt(np.diag([1.0, -0.1]))
    # tiny negatives are rounding noise
    assert_allclose(linalg.psd_sqrt(np.diag([1.0, -1e-14])), np.diag([1.0, 0.0]))


def test_frobenius_and_trace_norm():
    a, b = random_complex((3, 3), 4), random_complex((3, 3), 5)
    assert linalg.frobenius_inner(a, b) == pytest.approx(np.trace(a.conj().T @ b))
    assert linalg.frobenius_norm(a) == pytest.approx(np.sqrt(linalg.frobenius_inner(a, a).real))
    h = a + a.conj().T
    assert linalg.trace_norm(h) == pytest.approx(np.sum(np.abs(np.linalg.eigvalsh(h))))
    with pytest.raises(DimensionMismatch):
        linalg.frobenius_inner(np.eye(2), np.eye(3))


def test_is_close():
    assert linalg.is_close(np.eye(2), np.eye(2) + 1e-12)
    assert not linalg.is_close(np.eye(2), np.eye(2) + 1e-6)
