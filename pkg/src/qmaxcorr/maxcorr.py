"""
Quantum maximal correlation and the operator-Schmidt spectrum of the
normalized operator

    rho~ = (I (x) rho_B^{-1/2}) rho (rho_A^{-1/2} (x) I),

with inverse square roots taken on the supports of the marginals. The
maximal correlation is the second operator-Schmidt coefficient of rho~; the
first is always 1 with Schmidt pair (rho_A^{1/2}, rho_B^{1/2}).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .channels import BinaryMeasurement, measure_binary
from .classical import JointDistribution
from .errors import (
    DegenerateOptimizer,
    DimensionMismatch,
    NotNormalized,
    OutOfRange,
    TopCoefficientDeviation,
    WitnessConstructionFailed,
)
from .linalg import frobenius_norm, hermitian_eig, psd_inverse_sqrt, psd_sqrt, support_projector, svd
from .states import BipartiteState, marginals

TOP_TOL = 1e-6
CLAMP_TOL = 1e-8
TIE_TOL = 1e-10
HERMITIAN_TOL = 1e-8
CLUSTER_GAP = 1e-6
EFFECT_CLIP = 1e-6
WITNESS_TOL = 1e-6
PURE_RANK_TOL = 1e-10


@dataclass(frozen=True)
class TildeOperator:
    dim_a: int
    dim_b: int
    matrix: np.ndarray


@dataclass(frozen=True)
class SchmidtSpectrum:
    """``rho~ = sum_i coefficients[i] * a_vectors[i] (x) b_vectors[i]``."""

    dim_a: int
    dim_b: int
    coefficients: np.ndarray
    a_vectors: tuple
    b_vectors: tuple

    def reconstruct(self) -> np.ndarray:
        return sum(c * np.kron(m, n) for c, m, n in zip(self.coefficients, self.a_vectors, self.b_vectors))


@dataclass(frozen=True)
class OptimizerPair:
    """Observables attaining ``|tr(rho X (x) Y^dagger)| = value``.

    ``hermitian`` reports whether both were brought to hermitian form;
    ``degenerate`` is set when the second coefficient is tied with the third,
    in which case the pair is one of many optimizers.
    """

    x_a: np.ndarray
    y_b: np.ndarray
    value: float
    hermitian: bool
    degenerate: bool


@dataclass(frozen=True)
class CommonDataWitness:
    m: BinaryMeasurement
    n: BinaryMeasurement
    distribution: JointDistribution


def _dims_of(z, dim_a, dim_b) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    n = dim_a * dim_b
    if z.shape != (n, n):
        raise DimensionMismatch(f"operator of shape {z.shape} does not act on {dim_a}x{dim_b}")
    return z


def tilde_operator(rho: BipartiteState) -> TildeOperator:
    rho_a, rho_b = marginals(rho)
    ia = psd_inverse_sqrt(rho_a)
    ib = psd_inverse_sqrt(rho_b)
    m = np.kron(np.eye(rho.dim_a), ib) @ rho.matrix @ np.kron(ia, np.eye(rho.dim_b))
    return TildeOperator(rho.dim_a, rho.dim_b, m)


def realign(z, dim_a: int, dim_b: int) -> np.ndarray:
    """Realigned matrix ``R[(i, j), (k, l)] = <i k| Z |j l>``.

    Rows enumerate the A-operator basis ``|i><j|`` (index ``i * dim_a + j``),
    columns the B-operator basis ``|k><l|``. A product ``M (x) N`` maps to
    ``vec(M) vec(N)^T`` with row-major ``vec``, so the singular values of R
    are the operator-Schmidt coefficients of Z.
    """
    z = _dims_of(z, dim_a, dim_b)
    t = z.reshape(dim_a, dim_b, dim_a, dim_b).transpose(0, 2, 1, 3)
    return t.reshape(dim_a * dim_a, dim_b * dim_b)


def unrealign(r, dim_a: int, dim_b: int) -> np.ndarray:
    r = np.asarray(r, dtype=complex)
    if r.shape != (dim_a * dim_a, dim_b * dim_b):
        raise DimensionMismatch(f"realigned matrix of shape {r.shape} does not match {dim_a}x{dim_b}")
    n = dim_a * dim_b
    return r.reshape(dim_a, dim_a, dim_b, dim_b).transpose(0, 2, 1, 3).reshape(n, n)


def _complement(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as columns) of the complement of unit vector ``u``."""
    q, _ = np.linalg.qr(u[:, None], mode="complete")
    return q[:, 1:]


def schmidt_spectrum(rho: BipartiteState) -> SchmidtSpectrum:
    """Operator-Schmidt decomposition of ``rho~``.

    The leading coefficient comes from a plain SVD of the realigned matrix and
    is checked against 1. The leading pair is pinned to
    ``(rho_A^{1/2}, rho_B^{1/2})``; the remaining pairs come from the SVD of
    the realigned matrix compressed onto the orthogonal complements of that
    pair. This keeps every later Schmidt vector exactly orthogonal to the
    leading one even when the second coefficient is also 1.
    """
    da, db = rho.dims
    rho_a, rho_b = marginals(rho)
    r = realign(tilde_operator(rho).matrix, da, db)
    top = float(svd(r).singular_values[0])
    if abs(top - 1.0) > TOP_TOL:
        raise TopCoefficientDeviation(f"leading Schmidt coefficient is {top!r}, expected 1")

    sa, sb = psd_sqrt(rho_a), psd_sqrt(rho_b)
    u1 = sa.ravel()
    v1 = sb.ravel().conj()
    pair_err = max(np.linalg.norm(r @ v1 - u1), np.linalg.norm(r.conj().T @ u1 - v1))
    if pair_err > TOP_TOL:
        raise TopCoefficientDeviation(
            f"(rho_A^1/2, rho_B^1/2) is not a leading Schmidt pair (residual {pair_err:.3e})"
        )

    qa, qb = _complement(u1), _complement(v1)
    coeffs = [top]
    a_vecs = [sa]
    b_vecs = [sb]
    if qa.shape[1] and qb.shape[1]:
        inner = svd(qa.conj().T @ r @ qb)
        left = qa @ inner.left_vectors
        right = qb @ inner.right_vectors
        coeffs.extend(inner.singular_values)
        a_vecs.extend(left[:, s].reshape(da, da) for s in range(left.shape[1]))
        b_vecs.extend(right[:, s].conj().reshape(db, db) for s in range(right.shape[1]))
    return SchmidtSpectrum(da, db, np.array(coeffs), tuple(a_vecs), tuple(b_vecs))


def _clamp_unit(x: float) -> float:
    if x < -CLAMP_TOL or x > 1 + CLAMP_TOL:
        raise TopCoefficientDeviation(f"maximal correlation {x!r} outside [0, 1]")
    return min(max(x, 0.0), 1.0)


def maximal_correlation(rho: BipartiteState) -> float:
    c = schmidt_spectrum(rho).coefficients
    return _clamp_unit(float(c[1])) if len(c) > 1 else 0.0


def mu_k(rho: BipartiteState, k: int) -> float:
    """k-th Schmidt coefficient of ``rho~`` (1-based, so ``mu_k(rho, 2)`` is mu)."""
    c = schmidt_spectrum(rho).coefficients
    if not 1 <= k <= len(c):
        raise OutOfRange(f"k must be in [1, {len(c)}], got {k}")
    return _clamp_unit(float(c[k - 1]))


def _hermitian_combination(xs, ys):
    """Unit complex vector ``c`` with ``sum c_t X_t`` and ``sum c_t Y_t`` both hermitian.

    This is a real-linear null-space problem in ``(Re c, Im c)``; returns
    ``None`` if the null space is empty at ``HERMITIAN_TOL``.
    """
    cols_re, cols_im = [], []
    for x, y in zip(xs, ys):
        cols_re.append(np.concatenate([(x - x.conj().T).ravel(), (y - y.conj().T).ravel()]))
        cols_im.append(np.concatenate([(1j * (x + x.conj().T)).ravel(), (1j * (y + y.conj().T)).ravel()]))
    a = np.array(cols_re + cols_im).T
    a = np.vstack([a.real, a.imag])
    scale = max(np.linalg.norm(np.concatenate([x.ravel() for x in xs] + [y.ravel() for y in ys])), 1.0)
    spec = svd(a)
    if spec.singular_values[-1] > HERMITIAN_TOL * scale:
        return None
    w = spec.right_vectors[:, -1].real
    m = len(xs)
    c = w[:m] + 1j * w[m:]
    return c / np.linalg.norm(c)


def extract_optimizers(rho: BipartiteState, spectrum: SchmidtSpectrum | None = None) -> OptimizerPair:
    """Observables ``X`` on A and ``Y`` on B attaining the maximal correlation.

    Built from the second Schmidt pair as ``X = rho_A^{-1/2} M^dagger`` and
    ``Y^dagger = N^dagger rho_B^{-1/2}``. When a hermitian representative
    exists among the optimizers for the second coefficient (searched over
    phases and, for exact ties, the tied subspace) it is returned with
    ``hermitian=True`` and ``tr(rho X (x) Y)`` made nonnegative.
    """
    spec = schmidt_spectrum(rho) if spectrum is None else spectrum
    c = spec.coefficients
    if len(c) < 2 or c[1] <= TIE_TOL:
        raise OutOfRange("maximal correlation is zero; optimizers are not defined")
    rho_a, rho_b = marginals(rho)
    ia, ib = psd_inverse_sqrt(rho_a), psd_inverse_sqrt(rho_b)

    tied = [s for s in range(1, len(c)) if abs(c[s] - c[1]) <= TIE_TOL]
    degenerate = len(tied) > 1
    if degenerate:
        warnings.warn(
            f"second Schmidt coefficient has multiplicity {len(tied)}; optimizer is not unique",
            DegenerateOptimizer,
            stacklevel=2,
        )
    xs = [ia @ spec.a_vectors[s].conj().T for s in tied]
    ys = [(spec.b_vectors[s].conj().T @ ib).conj().T for s in tied]

    coef = _hermitian_combination(xs, ys)
    hermitian = coef is not None
    if not hermitian:
        coef = np.zeros(len(tied), dtype=complex)
        coef[0] = 1.0
    x = sum(ct * xt for ct, xt in zip(coef, xs))
    y = sum(ct * yt for ct, yt in zip(coef, ys))
    if hermitian:
        x = (x + x.conj().T) / 2
        y = (y + y.conj().T) / 2
        if np.trace(rho.matrix @ np.kron(x, y)).real < 0:
            y = -y
    value = abs(np.trace(rho.matrix @ np.kron(x, y.conj().T)))
    return OptimizerPair(x, y, float(value), hermitian, degenerate)


def optimizer_residuals(rho: BipartiteState, pair: OptimizerPair) -> dict:
    """Constraint residuals of an optimizer pair (all should be ~0)."""
    rho_a, rho_b = marginals(rho)
    x, y = pair.x_a, pair.y_b
    return {
        "mean_a": abs(np.trace(rho_a @ x)),
        "mean_b": abs(np.trace(rho_b @ y)),
        "second_moment_a": abs(np.trace(rho_a @ x @ x.conj().T) - 1),
        "second_moment_b": abs(np.trace(rho_b @ y @ y.conj().T) - 1),
        "value": abs(abs(np.trace(rho.matrix @ np.kron(x, y.conj().T))) - pair.value),
    }


def omega_superoperator(z, dim_a: int, dim_b: int) -> np.ndarray:
    """Matrix of the map ``Omega_Z: L(H_A) -> L(H_B)`` defined by
    ``Z = sum_ij |i><j| (x) Omega_Z(|j><i|)``.

    Columns are indexed by the input basis ``|j><i|`` (row-major, index
    ``j * dim_a + i``), rows by row-major entries of the output operator.
    The matrix is assembled block by block from the definition, not from
    :func:`realign`.
    """
    z = _dims_of(z, dim_a, dim_b)
    w = np.zeros((dim_b * dim_b, dim_a * dim_a), dtype=complex)
    for i in range(dim_a):
        for j in range(dim_a):
            # <i| Z |j> on the A factor is Omega_Z(|j><i|)
            block = z[i * dim_b:(i + 1) * dim_b, j * dim_b:(j + 1) * dim_b]
            w[:, j * dim_a + i] = block.ravel()
    return w


def left_multiplication(a) -> np.ndarray:
    """Superoperator matrix of ``X -> A X`` in row-major vectorization."""
    a = np.asarray(a, dtype=complex)
    return np.kron(a, np.eye(a.shape[1]))


def omega_tilde_from_rho(rho: BipartiteState) -> np.ndarray:
    """``Omega_{rho~}`` assembled as ``X -> rho_B^{-1/2} Omega_rho(rho_A^{-1/2} X)``."""
    rho_a, rho_b = marginals(rho)
    w = omega_superoperator(rho.matrix, rho.dim_a, rho.dim_b)
    return left_multiplication(psd_inverse_sqrt(rho_b)) @ w @ left_multiplication(psd_inverse_sqrt(rho_a))


def _eigen_clusters(w: np.ndarray, gap: float) -> list[list[int]]:
    """Group indices of descending eigenvalues ``w`` separated by a relative gap."""
    scale = max(1.0, float(np.max(np.abs(w))))
    clusters = [[0]]
    for idx in range(1, len(w)):
        if w[idx - 1] - w[idx] > gap * scale:
            clusters.append([idx])
        else:
            clusters[-1].append(idx)
    return clusters


def _lagrange_indicator(values: np.ndarray, target: int):
    """Real polynomial equal to 1 at ``values[target]`` and 0 at the other nodes."""
    others = np.delete(values, target)
    node = values[target]

    def q(op: np.ndarray) -> np.ndarray:
        out = np.eye(op.shape[0], dtype=complex)
        for r in others:
            out = out @ (op - r * np.eye(op.shape[0])) / (node - r)
        return out

    return q


def common_data_witness(rho: BipartiteState, tol: float = WITNESS_TOL) -> CommonDataWitness | None:
    """Local binary measurements with perfectly correlated, nontrivial outcomes.

    Returns ``None`` when ``mu(rho) < 1 - tol``. Otherwise hermitian
    optimizers ``X, Y`` satisfy ``rho (X (x) I) = rho (I (x) Y)``, hence the
    same for every polynomial in X and Y. ``M`` is a spectral projector of X
    written as a Lagrange polynomial ``q(X)``, and ``N = q(Y) q(Y)^dagger``
    restricted to the support of ``rho_B`` and clipped into ``[0, I]``.
    """
    spec = schmidt_spectrum(rho)
    mu = float(spec.coefficients[1]) if len(spec.coefficients) > 1 else 0.0
    if mu < 1 - tol:
        return None

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateOptimizer)
        pair = extract_optimizers(rho, spec)
    if not pair.hermitian:
        raise WitnessConstructionFailed("no hermitian optimizer found for mu = 1")
    da, db = rho.dims
    x, y = pair.x_a, pair.y_b
    lhs = rho.matrix @ np.kron(x, np.eye(db))
    mismatch = frobenius_norm(lhs - rho.matrix @ np.kron(np.eye(da), y))
    if mismatch > 10 * tol * max(1.0, frobenius_norm(lhs)):
        raise WitnessConstructionFailed(f"rho(X(x)I) and rho(I(x)Y) differ by {mismatch:.3e}")

    rho_a, rho_b = marginals(rho)
    proj_b = support_projector(rho_b)
    xs = hermitian_eig(x)
    clusters = _eigen_clusters(xs.eigenvalues, CLUSTER_GAP)
    if len(clusters) < 2:
        raise WitnessConstructionFailed("optimizer X has a single eigenvalue cluster")
    reps = np.array([xs.eigenvalues[cl].mean() for cl in clusters])

    best = None
    for target, cl in enumerate(clusters):
        vecs = xs.eigenvectors[:, cl]
        m = vecs @ vecs.conj().T
        weight = np.trace(rho_a @ m).real
        if best is None or min(weight, 1 - weight) > best[0]:
            best = (min(weight, 1 - weight), target, m)
    _, target, m = best

    q = _lagrange_indicator(reps, target)
    qy = q(y)
    n = proj_b @ qy @ qy.conj().T @ proj_b
    n = (n + n.conj().T) / 2
    nspec = hermitian_eig(n)
    w = nspec.eigenvalues
    if w[-1] < -EFFECT_CLIP or w[0] > 1 + EFFECT_CLIP:
        raise WitnessConstructionFailed(f"N has eigenvalues outside [0, 1]: [{w[-1]:.3e}, {w[0]:.3e}]")
    v = nspec.eigenvectors
    n = (v * np.clip(w, 0.0, 1.0)) @ v.conj().T

    mm, nn = BinaryMeasurement(m), BinaryMeasurement(n)
    dist = measure_binary(rho, mm, nn)
    p = dist.p
    cross = max(p[0, 1], p[1, 0])
    if cross > 10 * tol:
        raise WitnessConstructionFailed(f"cross probability {cross:.3e} exceeds {10 * tol:.1e}")
    if min(p[0, 0], p[1, 1]) <= tol:
        raise WitnessConstructionFailed(f"witness outcomes are trivial: {p.tolist()}")
    return CommonDataWitness(mm, nn, dist)


def pure_state_mu(psi, dim_a: int, dim_b: int, tol: float = 1e-10) -> float:
    """Maximal correlation of ``|psi><psi|``: 0 for product vectors, 1 otherwise."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != dim_a * dim_b:
        raise DimensionMismatch(f"vector of length {psi.size} does not fit {dim_a}x{dim_b}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f"state vector has norm {norm!r}")
    s = svd(psi.reshape(dim_a, dim_b)).singular_values
    return 1.0 if np.count_nonzero(s > PURE_RANK_TOL) > 1 else 0.0


def pure_state_optimizers(psi, dim_a: int, dim_b: int) -> tuple[np.ndarray, np.ndarray]:
    """Explicit hermitian optimizers for an entangled pure state.

    With Schmidt form ``psi = sum_i a_i |v_i>|w_i>``,
    ``X = c a_2^2 |v_1><v_1| - c a_1^2 |v_2><v_2|`` and likewise Y on the
    ``w`` vectors, where ``1/c = a_1 a_2 sqrt(a_1^2 + a_2^2)``.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    spec = svd(psi.reshape(dim_a, dim_b))
    a1, a2 = spec.singular_values[:2]
    if a2 <= PURE_RANK_TOL:
        raise OutOfRange("product vector: maximal correlation is zero")
    c = 1.0 / (a1 * a2 * np.sqrt(a1**2 + a2**2))
    v1, v2 = spec.left_vectors[:, 0], spec.left_vectors[:, 1]
    # psi[a, b] = sum_i s_i U[a, i] Vh[i, b], so |w_i> has components Vh[i, :]
    vh = spec.right_vectors.conj().T
    w1, w2 = vh[0], vh[1]
    x = c * a2**2 * np.outer(v1, v1.conj()) - c * a1**2 * np.outer(v2, v2.conj())
    y = c * a2**2 * np.outer(w1, w1.conj()) - c * a1**2 * np.outer(w2, w2.conj())
    return x, y
