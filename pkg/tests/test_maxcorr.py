import warnings

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qmaxcorr import channels, classical, maxcorr, states
from qmaxcorr.errors import (
    DegenerateOptimizer,
    DimensionMismatch,
    NotNormalized,
    OutOfRange,
    WitnessConstructionFailed,
)

dims_st = st.tuples(st.integers(1, 3), st.integers(1, 3))


def swap(rho):
    da, db = rho.dims
    t = rho.tensor().transpose(1, 0, 3, 2).reshape(da * db, da * db)
    return states.validate_density(t, (db, da))


def hermitian_basis(d):
    out = []
    for i in range(d):
        e = np.zeros((d, d), complex)
        e[i, i] = 1
        out.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), complex)
            e[i, j] = e[j, i] = 1 / np.sqrt(2)
            out.append(e)
            e = np.zeros((d, d), complex)
            e[i, j], e[j, i] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            out.append(e)
    return out


def hermitian_restricted_mu(rho):
    """Best correlation over hermitian X, Y only, as a whitened real bilinear form."""
    ra, rb = states.marginals(rho)
    ba, bb = hermitian_basis(rho.dim_a), hermitian_basis(rho.dim_b)
    ga = np.array([[np.trace(ra @ a @ b).real for b in ba] for a in ba])
    gb = np.array([[np.trace(rb @ a @ b).real for b in bb] for a in bb])
    t = np.array([[np.trace(rho.matrix @ np.kron(a, b)).real for b in bb] for a in ba])
    w = scipy.linalg.fractional_matrix_power(ga, -0.5) @ t @ scipy.linalg.fractional_matrix_power(gb, -0.5)
    return np.sort(np.linalg.eigvalsh(w @ w.T).clip(0))[::-1][1] ** 0.5


@pytest.mark.parametrize("p", [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0])
def test_isotropic_spectrum(p):
    c = maxcorr.schmidt_spectrum(states.isotropic_state(p)).coefficients
    assert_allclose(c, [1.0, p, p, p], atol=1e-10)


def test_realign_round_trip_and_product():
    rng = np.random.default_rng(0)
    z = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    assert_allclose(maxcorr.unrealign(maxcorr.realign(z, 2, 3), 2, 3), z)
    m, n = rng.standard_normal((2, 2)), rng.standard_normal((3, 3))
    assert_allclose(maxcorr.realign(np.kron(m, n), 2, 3), np.outer(m.ravel(), n.ravel()))
    with pytest.raises(DimensionMismatch):
        maxcorr.realign(z, 3, 3)
    with pytest.raises(DimensionMismatch):
        maxcorr.unrealign(z, 2, 3)


@settings(max_examples=30, deadline=None)
@given(dims_st, st.integers(0, 2**31 - 1), st.booleans())
def test_spectrum_structure(dims, seed, low_rank):
    rank = min(1 + seed % 2, dims[0] * dims[1]) if low_rank else None
    rho = states.random_bipartite(*dims, rank=rank, seed=seed)
    spec = maxcorr.schmidt_spectrum(rho)
    c = spec.coefficients
    assert len(c) == min(dims[0] ** 2, dims[1] ** 2)
    assert c[0] == pytest.approx(1.0, abs=1e-8)
    assert np.all(np.diff(c) <= 1e-12) and np.all(c >= 0) and c[0] <= 1 + 1e-8
    assert_allclose(spec.reconstruct(), maxcorr.tilde_operator(rho).matrix, atol=1e-9)
    ra, rb = states.marginals(rho)
    assert_allclose(spec.a_vectors[0], scipy.linalg.sqrtm(ra), atol=1e-7)
    gram = np.array([[np.vdot(a, b) for b in spec.a_vectors] for a in spec.a_vectors])
    assert_allclose(gram, np.eye(len(c)), atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(dims_st, st.integers(0, 2**31 - 1))
def test_local_unitary_and_swap_invariance(dims, seed):
    rho = states.random_bipartite(*dims, seed=seed)
    c = maxcorr.schmidt_spectrum(rho).coefficients
    u, v = channels.random_unitary(dims[0], seed=seed + 1), channels.random_unitary(dims[1], seed=seed + 2)
    assert_allclose(maxcorr.schmidt_spectrum(states.local_unitary(rho, u, v)).coefficients, c, atol=1e-9)
    assert_allclose(maxcorr.schmidt_spectrum(swap(rho)).coefficients, c, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(dims_st, st.integers(0, 2**31 - 1))
def test_omega_singular_values_match_spectrum(dims, seed):
    rho = states.random_bipartite(*dims, seed=seed)
    s = np.linalg.svd(maxcorr.omega_tilde_from_rho(rho), compute_uv=False)
    c = maxcorr.schmidt_spectrum(rho).coefficients
    assert_allclose(s[:len(c)], c, atol=1e-9)


def test_omega_superoperator_definition():
    rng = np.random.default_rng(3)
    z = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    w = maxcorr.omega_superoperator(z, 2, 3)
    rebuilt = np.zeros_like(z)
    for i in range(2):
        for j in range(2):
            ket_bra = np.zeros((2, 2))
            ket_bra[i, j] = 1
            out = w[:, j * 2 + i].reshape(3, 3)
            rebuilt += np.kron(ket_bra, out)
    assert_allclose(rebuilt, z)


def test_classical_embedding_agrees():
    for seed in range(10):
        dist = classical.random_distribution(3, 4, seed=seed)
        assert maxcorr.maximal_correlation(states.embed_classical(dist)) == pytest.approx(
            classical.classical_maximal_correlation(dist), abs=1e-9)


def test_mu_k_indexing():
    rho = states.isotropic_state(0.4)
    assert maxcorr.mu_k(rho, 1) == pytest.approx(1.0)
    assert maxcorr.mu_k(rho, 4) == pytest.approx(0.4)
    for k in (0, 5):
        with pytest.raises(OutOfRange):
            maxcorr.mu_k(rho, k)


def test_single_coefficient_means_zero():
    rho = states.product_state(np.eye(1), np.eye(3) / 3)
    assert maxcorr.maximal_correlation(rho) == 0.0


def check_optimizer(rho, pair):
    res = maxcorr.optimizer_residuals(rho, pair)
    assert max(res.values()) < 1e-8, res
    assert pair.value == pytest.approx(maxcorr.maximal_correlation(rho), abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(dims_st.filter(lambda d: min(d) > 1), st.integers(0, 2**31 - 1))
def test_optimizers_attain_mu(dims, seed):
    rho = states.random_bipartite(*dims, seed=seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateOptimizer)
        pair = maxcorr.extract_optimizers(rho)
    check_optimizer(rho, pair)


@pytest.mark.parametrize("rho", [
    states.embed_classical(classical.random_distribution(3, 3, seed=1)),
    states.isotropic_state(0.6),
    states.bell_state(),
], ids=["classical", "isotropic", "bell"])
def test_hermitian_optimizers_where_they_exist(rho):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateOptimizer)
        pair = maxcorr.extract_optimizers(rho)
    assert pair.hermitian
    assert_allclose(pair.x_a, pair.x_a.conj().T)
    assert_allclose(pair.y_b, pair.y_b.conj().T)
    assert np.trace(rho.matrix @ np.kron(pair.x_a, pair.y_b)).real == pytest.approx(pair.value)
    check_optimizer(rho, pair)


@pytest.mark.parametrize("seed", range(5))
def test_generic_states_have_no_hermitian_optimizer(seed):
    # for generic states the best hermitian pair is strictly worse than mu,
    # so the flag must stay false rather than report a hermitian pair
    rho = states.random_bipartite(2, 2, seed=seed)
    mu = maxcorr.maximal_correlation(rho)
    assert hermitian_restricted_mu(rho) < mu - 1e-3
    pair = maxcorr.extract_optimizers(rho)
    assert not pair.hermitian and not pair.degenerate
    check_optimizer(rho, pair)


def test_hermitian_oracle_agrees_on_real_symmetric_cases():
    rho = states.embed_classical(classical.random_distribution(3, 2, seed=4))
    assert hermitian_restricted_mu(rho) == pytest.approx(maxcorr.maximal_correlation(rho), abs=1e-9)


def test_degenerate_warning():
    with pytest.warns(DegenerateOptimizer):
        pair = maxcorr.extract_optimizers(states.isotropic_state(0.5))
    assert pair.degenerate


def test_optimizers_undefined_at_zero():
    with pytest.raises(OutOfRange):
        maxcorr.extract_optimizers(states.product_state(np.eye(2) / 2, np.eye(2) / 2))


def test_bell_witness():
    wit = maxcorr.common_data_witness(states.bell_state())
    assert_allclose(wit.distribution.p, [[0.5, 0.0], [0.0, 0.5]], atol=1e-8)
    for e in (wit.m.effect, wit.n.effect):
        assert_allclose(e @ e, e, atol=1e-6)


@pytest.mark.parametrize("p", [0.0, 0.5, 0.95])
def test_witness_absent_below_one(p):
    assert maxcorr.common_data_witness(states.isotropic_state(p)) is None


@pytest.mark.parametrize("seed", range(5))
def test_witness_on_decomposable_embedding(seed):
    dist = classical.block_distribution([(0, 2), (1,)], [(1,), (0, 2)], seed=seed)
    wit = maxcorr.common_data_witness(states.embed_classical(dist))
    p = wit.distribution.p
    assert max(p[0, 1], p[1, 0]) <= 1e-8
    assert 0 < p[0, 0] < 1 and 0 < p[1, 1] < 1


def test_witness_refuses_without_hermitian_optimizer():
    rho = states.random_bipartite(3, 3, rank=2, seed=0)
    assert maxcorr.maximal_correlation(rho) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(WitnessConstructionFailed):
        maxcorr.common_data_witness(rho)


@settings(max_examples=30, deadline=None)
@given(dims_st, st.integers(0, 2**31 - 1), st.booleans())
def test_pure_state_dichotomy(dims, seed, product):
    da, db = dims
    if product:
        psi = np.kron(states.random_pure_vector(da, seed=seed), states.random_pure_vector(db, seed=seed + 1))
    else:
        psi = states.random_pure_vector(da * db, seed=seed)
    expected = 0.0 if product or min(da, db) == 1 else 1.0
    assert maxcorr.pure_state_mu(psi, da, db) == expected
    assert maxcorr.maximal_correlation(states.pure_state(psi, dims)) == pytest.approx(expected, abs=1e-6)


def test_pure_state_errors():
    with pytest.raises(NotNormalized):
        maxcorr.pure_state_mu([1.0, 1.0, 0.0, 0.0], 2, 2)
    with pytest.raises(DimensionMismatch):
        maxcorr.pure_state_mu([1.0, 0.0, 0.0], 2, 2)
    with pytest.raises(OutOfRange):
        maxcorr.pure_state_optimizers([1.0, 0.0, 0.0, 0.0], 2, 2)


@pytest.mark.parametrize("seed", range(5))
def test_explicit_pure_state_optimizers(seed):
    psi = states.random_pure_vector(6, seed=seed)
    rho = states.pure_state(psi, (2, 3))
    x, y = maxcorr.pure_state_optimizers(psi, 2, 3)
    pair = maxcorr.OptimizerPair(x, y, 1.0, True, False)
    res = maxcorr.optimizer_residuals(rho, pair)
    assert max(res.values()) < 1e-9, res
    assert np.trace(rho.matrix @ np.kron(x, y)).real == pytest.approx(1.0)
