"""
Bipartite density matrices.

Basis convention, used by every reshape in this package: the composite basis
vector ``|i>_A |k>_B`` has index ``i * dim_b + k``. Reshaping a matrix of a
bipartite operator to ``(dim_a, dim_b, dim_a, dim_b)`` therefore gives the
tensor ``Z[i, k, j, l] = <i k| Z |j l>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import JointDistribution
from .errors import DimensionMismatch, NotHermitian, NotNormalized, NotPSD, OutOfRange, TraceNotOne
from .linalg import frobenius_norm, hermitian_eig

STATE_TOL = 1e-10
ENTROPY_FLOOR = 1e-12
# trace drift below this is rounding noise; leaving it alone keeps validation idempotent
RENORM_FLOOR = 1e-13


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class DensityMatrix:
    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))


@dataclass(frozen=True)
class BipartiteState:
    """Density matrix on ``H_A (x) H_B``; build through :func:`validate_density`."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def dims(self) -> tuple[int, int]:
        return self.dim_a, self.dim_b

    def tensor(self) -> np.ndarray:
        """View as ``T[i, k, j, l] = <i k| rho |j l>``."""
        return self.matrix.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)


def validate_density(matrix, dims, tol: float = STATE_TOL) -> BipartiteState:
    """Check hermiticity, positivity and unit trace, then return a state.

    Drift within ``tol`` is repaired: the matrix is symmetrized and its trace
    renormalized to exactly one.
    """
    dim_a, dim_b = (int(d) for d in dims)
    if dim_a < 1 or dim_b < 1:
        raise DimensionMismatch(f"dimensions must be positive, got {dims}")
    m = np.asarray(matrix, dtype=complex)
    n = dim_a * dim_b
    if m.shape != (n, n):
        raise DimensionMismatch(f"expected a {n}x{n} matrix for dims {dims}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("state matrix has non-finite entries")
    skew = frobenius_norm(m - m.conj().T)
    if skew > tol * max(1.0, frobenius_norm(m)):
        raise NotHermitian(f"state is not hermitian (||M - M^H||_F = {skew:.3e})")
    m = (m + m.conj().T) / 2
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(f"state has trace {tr!r}")
    lam_min = hermitian_eig(m).eigenvalues[-1]
    if lam_min < -tol:
        raise NotPSD(f"state has negative eigenvalue {lam_min:.3e}")
    if abs(tr - 1.0) > RENORM_FLOOR:
        m = m / tr
    return BipartiteState(dim_a, dim_b, m)


def partial_trace(rho: BipartiteState, side: str) -> DensityMatrix:
    """Reduced state on ``side`` ("A" keeps A and traces out B, "B" the reverse)."""
    t = rho.tensor()
    if side == "A":
        return DensityMatrix(rho.dim_a, np.einsum("ikjk->ij", t))
    if side == "B":
        return DensityMatrix(rho.dim_b, np.einsum("ikil->kl", t))
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def marginals(rho: BipartiteState) -> tuple[np.ndarray, np.ndarray]:
    return partial_trace(rho, "A").matrix, partial_trace(rho, "B").matrix


def tensor_states(rho: BipartiteState, sigma: BipartiteState) -> BipartiteState:
    """``rho_AB (x) sigma_A'B'`` regrouped as a state on ``(A A') : (B B')``."""
    da, db = rho.dims
    dc, dd = sigma.dims
    t = np.kron(rho.matrix, sigma.matrix).reshape(da, db, dc, dd, da, db, dc, dd)
    t = t.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    n = da * db * dc * dd
    return BipartiteState(da * dc, db * dd, t.reshape(n, n))


def tensor_power(rho: BipartiteState, n: int) -> BipartiteState:
    if n < 1:
        raise OutOfRange("tensor power must be at least 1")
    out = rho
    for _ in range(n - 1):
        out = tensor_states(out, rho)
    return out


def product_state(rho_a, rho_b) -> BipartiteState:
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    return validate_density(np.kron(rho_a, rho_b), (rho_a.shape[0], rho_b.shape[0]))


def pure_state(psi, dims, tol: float = STATE_TOL) -> BipartiteState:
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f"state vector has norm {norm!r}")
    return validate_density(np.outer(psi, psi.conj()), dims)


def maximally_entangled_vector(d: int) -> np.ndarray:
    """``sum_i |i>|i> / sqrt(d)``."""
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    return psi


def maximally_entangled(d: int) -> BipartiteState:
    return pure_state(maximally_entangled_vector(d), (d, d))


def bell_state() -> BipartiteState:
    return maximally_entangled(2)


def isotropic_state(p: float) -> BipartiteState:
    """``(1 - p) I/4 + p |psi><psi|`` on two qubits, ``psi = (|00> + |11>)/sqrt 2``."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"mixing weight must lie in [0, 1], got {p}")
    psi = maximally_entangled_vector(2)
    m = (1 - p) * np.eye(4) / 4 + p * np.outer(psi, psi.conj())
    return BipartiteState(2, 2, m)


def embed_classical(dist: JointDistribution) -> BipartiteState:
    """Diagonal state with ``<i k| rho |i k> = p_ik``."""
    da, db = dist.shape
    return BipartiteState(da, db, np.diag(dist.p.ravel()).astype(complex))


def von_neumann_entropy(m) -> float:
    """Entropy in bits; eigenvalues below 1e-12 contribute nothing."""
    w = hermitian_eig(m).eigenvalues
    w = w[w > ENTROPY_FLOOR]
    return float(-np.sum(w * np.log2(w)))


def mutual_information(rho: BipartiteState) -> float:
    rho_a, rho_b = marginals(rho)
    return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(rho.matrix)


def random_bipartite(dim_a: int, dim_b: int, rank: int | None = None, seed=None) -> BipartiteState:
    """Random state ``G G^dagger / tr(G G^dagger)`` with complex Gaussian ``G``.

    ``G`` is ``(dim_a * dim_b) x rank``; full rank gives the Hilbert-Schmidt
    ensemble. ``seed`` is anything ``numpy.random.default_rng`` accepts,
    including ``(seed, trial)`` tuples.
    """
    n = dim_a * dim_b
    rank = n if rank is None else int(rank)
    if dim_a < 1 or dim_b < 1 or not 1 <= rank <= n:
        raise OutOfRange(f"need 1 <= rank <= {n}, got rank={rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = g @ g.conj().T
    return validate_density(m / np.trace(m).real, (dim_a, dim_b))


def random_density(dim: int, seed=None) -> np.ndarray:
    """Hilbert-Schmidt random density matrix on a single register."""
    return random_bipartite(dim, 1, seed=seed).matrix


def random_pure_vector(dim: int, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def local_unitary(rho: BipartiteState, u, v) -> BipartiteState:
    w = np.kron(np.asarray(u), np.asarray(v))
    return validate_density(w @ rho.matrix @ w.conj().T, rho.dims)
