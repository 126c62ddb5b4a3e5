"""
Quantum channels in Kraus form and local binary measurements.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classical import JointDistribution
from .errors import (
    DimensionMismatch,
    NotPSD,
    NotTracePreserving,
    OutOfRange,
    ShapeMismatch,
)
from .linalg import frobenius_norm, hermitian_eig
from .states import BipartiteState, validate_density

CHANNEL_TOL = 1e-9
EFFECT_TOL = 1e-10
PROB_CLIP = 1e-10


@dataclass(frozen=True)
class QuantumChannel:
    """CPTP map ``rho -> sum_j K_j rho K_j^dagger``.

    Each Kraus operator is ``dim_out x dim_in``.
    """

    dim_in: int
    dim_out: int
    kraus: tuple

    def __call__(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=complex)
        return sum(k @ m @ k.conj().T for k in self.kraus)

    def adjoint(self) -> "AdjointMap":
        return adjoint_channel(self)


@dataclass(frozen=True)
class AdjointMap:
    """Unital CP map ``N -> sum_j K_j^dagger N K_j`` (Heisenberg picture)."""

    dim_in: int
    dim_out: int
    kraus: tuple

    def __call__(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=complex)
        return sum(k.conj().T @ n @ k for k in self.kraus)


def validate_channel(kraus: Sequence, tol: float = CHANNEL_TOL) -> QuantumChannel:
    ops = [np.array(k, dtype=complex) for k in kraus]
    if not ops:
        raise ShapeMismatch("a channel needs at least one Kraus operator")
    shape = ops[0].shape
    if len(shape) != 2 or any(k.shape != shape for k in ops):
        raise ShapeMismatch(f"Kraus operators must share one 2-d shape, got {[k.shape for k in ops]}")
    if not all(np.all(np.isfinite(k)) for k in ops):
        raise ShapeMismatch("Kraus operators have non-finite entries")
    dim_out, dim_in = shape
    dev = frobenius_norm(sum(k.conj().T @ k for k in ops) - np.eye(dim_in))
    if dev > tol:
        raise NotTracePreserving(f"sum K^dagger K deviates from identity by {dev:.3e}")
    for k in ops:
        k.setflags(write=False)
    return QuantumChannel(dim_in, dim_out, tuple(ops))


def adjoint_channel(channel: QuantumChannel) -> AdjointMap:
    return AdjointMap(channel.dim_out, channel.dim_in, channel.kraus)


def compose(second: QuantumChannel, first: QuantumChannel) -> QuantumChannel:
    """Channel applying ``first`` then ``second``."""
    if second.dim_in != first.dim_out:
        raise DimensionMismatch("output of the first channel must feed the second")
    return validate_channel([k2 @ k1 for k2 in second.kraus for k1 in first.kraus])


def apply_local(channel: QuantumChannel, rho: BipartiteState, side: str = "B") -> BipartiteState:
    """Apply ``channel`` to one register of ``rho``, identity on the other."""
    da, db = rho.dims
    if side == "B":
        if channel.dim_in != db:
            raise DimensionMismatch(f"channel input {channel.dim_in} != dim_b {db}")
        ops = [np.kron(np.eye(da), k) for k in channel.kraus]
        dims = (da, channel.dim_out)
    elif side == "A":
        if channel.dim_in != da:
            raise DimensionMismatch(f"channel input {channel.dim_in} != dim_a {da}")
        ops = [np.kron(k, np.eye(db)) for k in channel.kraus]
        dims = (channel.dim_out, db)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    out = sum(k @ rho.matrix @ k.conj().T for k in ops)
    return validate_density(out, dims)


def identity_channel(d: int) -> QuantumChannel:
    return validate_channel([np.eye(d)])


def unitary_channel(u) -> QuantumChannel:
    return validate_channel([u])


def completely_depolarizing(dim_in: int, dim_out: int | None = None) -> QuantumChannel:
    """``rho -> tr(rho) I / dim_out`` with Kraus ops ``|i><j| / sqrt(dim_out)``."""
    dim_out = dim_in if dim_out is None else dim_out
    ops = []
    for i in range(dim_out):
        for j in range(dim_in):
            k = np.zeros((dim_out, dim_in), dtype=complex)
            k[i, j] = 1.0 / np.sqrt(dim_out)
            ops.append(k)
    return validate_channel(ops)


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def depolarizing(p: float) -> QuantumChannel:
    """Qubit depolarizing channel with Pauli Kraus operators."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"depolarizing probability must lie in [0, 1], got {p}")
    ops = [np.sqrt(1 - 3 * p / 4) * PAULI["I"]]
    ops += [np.sqrt(p / 4) * PAULI[s] for s in "XYZ"]
    return validate_channel(ops)


def random_unitary(d: int, seed=None) -> np.ndarray:
    return random_isometry(d, d, seed)


def random_isometry(dim_in: int, dim_out: int, seed=None) -> np.ndarray:
    """Haar-random ``dim_out x dim_in`` isometry via QR with phase-fixed ``R``."""
    if dim_out < dim_in:
        raise OutOfRange(f"an isometry needs dim_out >= dim_in, got {dim_out} < {dim_in}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim_out, dim_in)) + 1j * rng.standard_normal((dim_out, dim_in))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_channel(dim_in: int, dim_out: int, env_dim: int, seed=None) -> QuantumChannel:
    """Random channel from a Stinespring isometry ``dim_in -> dim_out * env_dim``."""
    if min(dim_in, dim_out, env_dim) < 1:
        raise OutOfRange("all dimensions must be positive")
    if dim_out * env_dim < dim_in:
        raise OutOfRange(f"dim_out * env_dim must be >= dim_in ({dim_out}*{env_dim} < {dim_in})")
    v = random_isometry(dim_in, dim_out * env_dim, seed)
    blocks = v.reshape(env_dim, dim_out, dim_in)
    return validate_channel(list(blocks))


@dataclass(frozen=True)
class BinaryMeasurement:
    """Two-outcome measurement ``{effect, I - effect}``."""

    effect: np.ndarray

    def __post_init__(self):
        e = np.array(self.effect, dtype=complex)
        w = hermitian_eig(e).eigenvalues
        if w[-1] < -EFFECT_TOL or w[0] > 1 + EFFECT_TOL:
            raise OutOfRange(f"effect eigenvalues must lie in [0, 1], got [{w[-1]:.3e}, {w[0]:.3e}]")
        e = (e + e.conj().T) / 2
        e.setflags(write=False)
        object.__setattr__(self, "effect", e)

    @property
    def dim(self) -> int:
        return self.effect.shape[0]


def measure_binary(rho: BipartiteState, m: BinaryMeasurement, n: BinaryMeasurement) -> JointDistribution:
    """Outcome distribution ``p[u, v] = tr(rho E_u (x) F_v)``.

    ``E_0 = M, E_1 = I - M`` on A and ``F_0 = N, F_1 = I - N`` on B.
    """
    da, db = rho.dims
    if m.dim != da or n.dim != db:
        raise DimensionMismatch(f"effects of size ({m.dim}, {n.dim}) do not fit dims {rho.dims}")
    es = (m.effect, np.eye(da) - m.effect)
    fs = (n.effect, np.eye(db) - n.effect)
    p = np.array([[np.trace(rho.matrix @ np.kron(e, f)).real for f in fs] for e in es])
    if p.min() < -PROB_CLIP:
        raise NotPSD(f"measurement produced probability {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    return JointDistribution(p / p.sum())
