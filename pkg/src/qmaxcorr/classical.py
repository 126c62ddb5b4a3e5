"""
Maximal correlation of classical joint distributions.

For a joint distribution ``P`` on ``{0..d_A-1} x {0..d_B-1}`` the maximal
correlation equals the second singular value of the normalized matrix
``P~[i, k] = p_ik / sqrt(p_i p_k)``; the first singular value is always 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DimensionMismatch, OutOfRange, ZeroDiagonal, ZeroMarginal
from .linalg import svd

PROB_TOL = 1e-12
SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class JointDistribution:
    """Joint probability matrix ``p[i, k] = Pr(A=i, B=k)``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def shape(self) -> tuple[int, int]:
        return self.p.shape

    @property
    def marginal_a(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def marginal_b(self) -> np.ndarray:
        return self.p.sum(axis=0)


def joint_distribution(p, tol: float = PROB_TOL) -> JointDistribution:
    """Validate a probability matrix.

    Entries in ``[-tol, 0)`` are clipped to zero and the total is renormalized
    when it is within ``tol`` of one. Anything worse raises ``OutOfRange``.
    """
    a = np.asarray(p, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise DimensionMismatch(f"distribution must be a non-empty 2-d array, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise OutOfRange("distribution has non-finite entries")
    if a.min() < -tol:
        raise OutOfRange(f"negative probability {a.min():.3e}")
    a = np.clip(a, 0.0, None)
    total = a.sum()
    if abs(total - 1.0) > tol:
        raise OutOfRange(f"probabilities sum to {total!r}, not 1")
    return JointDistribution(a / total)


def tilde_matrix(dist: JointDistribution) -> np.ndarray:
    """``p_ik / sqrt(p_i p_k)``, with zero rows/columns where a marginal vanishes."""
    p = dist.p
    pa, pb = dist.marginal_a, dist.marginal_b
    ia = np.where(pa > 0, 1.0 / np.sqrt(np.where(pa > 0, pa, 1.0)), 0.0)
    ib = np.where(pb > 0, 1.0 / np.sqrt(np.where(pb > 0, pb, 1.0)), 0.0)
    return ia[:, None] * p * ib[None, :]


def classical_maximal_correlation(dist: JointDistribution) -> float:
    s = svd(tilde_matrix(dist)).singular_values
    if len(s) < 2:
        return 0.0
    return float(min(max(s[1], 0.0), 1.0))


def binary_mu_exact(dist: JointDistribution) -> float:
    """Closed form for binary variables: ``|det P~|``."""
    if dist.shape != (2, 2):
        raise DimensionMismatch(f"binary_mu_exact needs a 2x2 distribution, got {dist.shape}")
    (p00, p01), (p10, p11) = dist.p
    denom = (p00 + p01) * (p00 + p10) * (p10 + p11) * (p01 + p11)
    if denom <= 0.0:
        raise ZeroMarginal("binary_mu_exact needs all four marginal probabilities positive")
    return abs(p00 * p11 - p01 * p10) / np.sqrt(denom)


def lemma_lower_bound(dist: JointDistribution) -> float:
    """Lower bound ``1 - eps/(p00 p11) - 2 eps^2/(p00 p11)`` with ``eps = max(p01, p10)``.

    Valid for any binary distribution with a positive diagonal; it is only
    informative when the off-diagonal mass is small.
    """
    if dist.shape != (2, 2):
        raise DimensionMismatch(f"lemma_lower_bound needs a 2x2 distribution, got {dist.shape}")
    (p00, p01), (p10, p11) = dist.p
    if p00 <= 0.0 or p11 <= 0.0:
        raise ZeroDiagonal("lemma_lower_bound needs p00 > 0 and p11 > 0")
    eps = max(p01, p10)
    d = p00 * p11
    return 1.0 - eps / d - 2.0 * eps**2 / d


def is_decomposable(dist: JointDistribution, tol: float = SUPPORT_TOL):
    """Detect whether the support of ``dist`` splits into disjoint blocks.

    Returns ``(decomposable, partition)`` where ``partition`` is
    ``(U0, U1, V0, V1)`` (sorted index tuples) or ``None``. ``U0 x V0`` is one
    connected component of the support graph and ``U1 x V1`` collects the
    rest; symbols with zero marginal probability are put in ``U1`` / ``V1``.
    """
    p = dist.p
    da, db = p.shape
    live_a = np.flatnonzero(dist.marginal_a > tol)
    live_b = np.flatnonzero(dist.marginal_b > tol)
    # graph nodes: live A symbols first, then live B symbols
    sub = p[np.ix_(live_a, live_b)] > tol
    na, nb = len(live_a), len(live_b)
    adj = np.zeros((na + nb, na + nb), dtype=bool)
    adj[:na, na:] = sub
    n_comp, labels = connected_components(csr_matrix(adj), directed=False)
    if n_comp < 2:
        return False, None
    first = labels[0]
    u0 = tuple(int(i) for i in live_a[labels[:na] == first])
    v0 = tuple(int(k) for k in live_b[labels[na:] == first])
    u1 = tuple(i for i in range(da) if i not in u0)
    v1 = tuple(k for k in range(db) if k not in v0)
    return True, (u0, u1, v0, v1)


def random_distribution(dim_a: int, dim_b: int, seed=None, alpha: float = 1.0) -> JointDistribution:
    """Dirichlet(alpha) distribution over the ``dim_a * dim_b`` cells."""
    if dim_a < 1 or dim_b < 1:
        raise OutOfRange("dimensions must be positive")
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.full(dim_a * dim_b, alpha)).reshape(dim_a, dim_b)
    return JointDistribution(p)


def block_distribution(blocks_a, blocks_b, seed=None) -> JointDistribution:
    """Random distribution supported on ``blocks_a[j] x blocks_b[j]`` for each ``j``.

    Every cell inside a block gets positive mass; all cross-block cells are
    exactly zero, so the result is decomposable whenever there are at least
    two blocks.
    """
    if len(blocks_a) != len(blocks_b):
        raise DimensionMismatch("need one B block per A block")
    da = max(max(b) for b in blocks_a) + 1
    db = max(max(b) for b in blocks_b) + 1
    rng = np.random.default_rng(seed)
    p = np.zeros((da, db))
    weights = rng.dirichlet(np.ones(len(blocks_a)))
    for w, ua, vb in zip(weights, blocks_a, blocks_b):
        cell = rng.dirichlet(np.ones(len(ua) * len(vb))).reshape(len(ua), len(vb))
        p[np.ix_(list(ua), list(vb))] = w * cell
    return JointDistribution(p / p.sum())
