"""
Variational oracle and randomized property suites.

The oracle computes the maximal correlation straight from its variational
form, by alternating maximization over the two local arguments. It never
calls :func:`qmaxcorr.linalg.svd`, so agreement with
:func:`qmaxcorr.maxcorr.maximal_correlation` is an independent check.

Every suite derives the randomness of trial ``t`` from
``numpy.random.default_rng((seed, t))``, so results do not depend on the
order in which trials run.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import channels, classical, maxcorr, states
from .errors import WitnessConstructionFailed
from .linalg import frobenius_norm, psd_sqrt, trace_norm

SUITE_TOL = 1e-7
ORACLE_TOL = 1e-6


@dataclass
class Failure:
    trial: int
    description: str
    violation: float


@dataclass
class SuiteReport:
    suite: str
    trials: int
    seed: int
    tolerance: float
    failures: list = field(default_factory=list)
    max_violation: float = 0.0
    config: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, trial: int, description: str, violation: float, tol: float | None = None):
        tol = self.tolerance if tol is None else tol
        self.max_violation = max(self.max_violation, float(violation))
        if violation > tol:
            self.failures.append(Failure(trial, description, float(violation)))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng((seed, trial))


def _map_trials(fn, trials: int, workers: int):
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


# --------------------------------------------------------------------------- #
# oracle                                                                      #
# --------------------------------------------------------------------------- #

def _project_out(v: np.ndarray, unit: np.ndarray) -> np.ndarray:
    return v - np.vdot(unit, v) * unit


def oracle_mu(rho: states.BipartiteState, restarts: int = 3, max_iters: int = 20000, seed=0) -> float:
    """Maximal correlation by alternating maximization of ``|tr(rho~ R (x) S)|``.

    ``R`` ranges over unit-norm operators orthogonal to ``rho_A^{1/2}`` and
    ``S`` over unit-norm operators orthogonal to ``rho_B^{1/2}``. For fixed S
    the best R is the normalized projection of ``G^dagger`` with
    ``G[i, j] = sum_kl rho~[ik, jl] S[l, k]``, and symmetrically for S. Each
    sweep can only increase the objective; iteration stops once the relative
    change drops below 1e-12.
    """
    da, db = rho.dims
    t = maxcorr.tilde_operator(rho).matrix.reshape(da, db, da, db)
    rho_a, rho_b = states.marginals(rho)
    a = psd_sqrt(rho_a)
    b = psd_sqrt(rho_b)
    rng = np.random.default_rng(seed)

    def best_r(s):
        g = np.einsum("ikjl,lk->ij", t, s)
        return _project_out(g.conj().T, a)

    def best_s(r):
        h = np.einsum("ikjl,ji->kl", t, r)
        return _project_out(h.conj().T, b)

    best = 0.0
    for _ in range(restarts):
        r = _project_out(rng.standard_normal((da, da)) + 1j * rng.standard_normal((da, da)), a)
        nr = np.linalg.norm(r)
        if nr == 0.0:
            continue
        r /= nr
        value = 0.0
        for _ in range(max_iters):
            s = best_s(r)
            ns = np.linalg.norm(s)
            if ns < 1e-300:
                value = 0.0
                break
            s /= ns
            r = best_r(s)
            new = float(np.linalg.norm(r))
            if new < 1e-300:
                value = 0.0
                break
            r /= new
            done = abs(new - value) <= 1e-12 * new
            value = new
            if done:
                break
        best = max(best, value)
    return best


# --------------------------------------------------------------------------- #
# suites                                                                      #
# --------------------------------------------------------------------------- #

def _padded(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = max(len(a), len(b))
    return np.pad(a, (0, n - len(a))), np.pad(b, (0, n - len(b)))


def _random_dims(rng, dims) -> tuple[int, int]:
    return int(rng.integers(min(2, dims[0]), dims[0] + 1)), int(rng.integers(min(2, dims[1]), dims[1] + 1))


def _random_state(rng, dims) -> states.BipartiteState:
    da, db = _random_dims(rng, dims)
    # low-rank states very often have mu = 1, so keep half the draws full rank
    rank = da * db if rng.random() < 0.5 else int(rng.integers(1, da * db + 1))
    return states.random_bipartite(da, db, rank, seed=rng)


def _random_channel_for(rng, dim_in: int, max_out: int = 3) -> channels.QuantumChannel:
    dim_out = int(rng.integers(2, max_out + 1))
    env_min = -(-dim_in // dim_out)
    env = int(rng.integers(env_min, max(env_min, 3) + 1))
    return channels.random_channel(dim_in, dim_out, env, seed=rng)


def run_dpi_suite(trials: int = 200, dims=(3, 3), seed: int = 42, workers: int = 1) -> SuiteReport:
    """Local channels never increase any Schmidt coefficient of rho~.

    Every tenth trial also checks the two-copy form: a channel acting on the
    whole ``B B'`` register of ``rho (x) rho`` yields mu at most ``mu(rho)``.
    """
    report = SuiteReport("dpi", trials, seed, SUITE_TOL, config={"dims": list(dims)})

    def trial(t):
        rng = _trial_rng(seed, t)
        rho = _random_state(rng, dims)
        side = "A" if rng.integers(2) == 0 else "B"
        dim_in = rho.dim_a if side == "A" else rho.dim_b
        ch = _random_channel_for(rng, dim_in)
        sigma = channels.apply_local(ch, rho, side)
        c_in, c_out = _padded(maxcorr.schmidt_spectrum(rho).coefficients,
                              maxcorr.schmidt_spectrum(sigma).coefficients)
        out = [(f"mu_i increased on side {side}, dims {rho.dims} -> {sigma.dims}",
                float(np.max(c_out - c_in)))]
        if t % 10 == 9:
            two = states.tensor_states(rho, rho)
            ch2 = _random_channel_for(rng, two.dim_b)
            sigma2 = channels.apply_local(ch2, two, "B")
            out.append((f"two-copy mu increased, dims {rho.dims}",
                        maxcorr.maximal_correlation(sigma2) - maxcorr.maximal_correlation(rho)))
        return out

    n_two = 0
    for t, results in enumerate(_map_trials(trial, trials, workers)):
        n_two += len(results) - 1
        for desc, v in results:
            report.record(t, desc, v)
    report.notes["two_copy_trials"] = n_two
    return report


def run_tensorization_suite(trials: int = 100, dims=(2, 2), seed: int = 42, workers: int = 1) -> SuiteReport:
    """``mu(rho (x) sigma) = max(mu(rho), mu(sigma))``; every fifth pair is ``rho (x) rho``.

    Self-products also record the mutual information, which doubles.
    """
    report = SuiteReport("tensorization", trials, seed, SUITE_TOL, config={"dims": list(dims)})

    def trial(t):
        rng = _trial_rng(seed, t)
        rho = _random_state(rng, dims)
        sigma = rho if t % 5 == 0 else _random_state(rng, dims)
        joint = states.tensor_states(rho, sigma)
        lhs = maxcorr.maximal_correlation(joint)
        rhs = max(maxcorr.maximal_correlation(rho), maxcorr.maximal_correlation(sigma))
        mi = None
        if sigma is rho:
            mi = (states.mutual_information(rho), states.mutual_information(joint), lhs, rhs)
        return abs(lhs - rhs), mi

    mi_rows = []
    for t, (v, mi) in enumerate(_map_trials(trial, trials, workers)):
        report.record(t, "mu(rho (x) sigma) != max(mu(rho), mu(sigma))", v)
        if mi is not None:
            mi_rows.append(mi)
    if mi_rows:
        arr = np.array(mi_rows)
        report.notes["self_products"] = len(mi_rows)
        report.notes["mi_additivity_max_error"] = float(np.max(np.abs(arr[:, 1] - 2 * arr[:, 0])))
        report.notes["mu_self_product_max_error"] = float(np.max(np.abs(arr[:, 2] - arr[:, 3])))
        report.notes["example"] = {
            "mi_single": float(arr[0, 0]), "mi_two_copies": float(arr[0, 1]),
            "mu_single": float(arr[0, 3]), "mu_two_copies": float(arr[0, 2]),
        }
    return report


EPS_GRID = (0.01, 0.05, 0.1)


def perturbed_maximally_entangled(d: int, eps: float, junk: states.BipartiteState) -> states.BipartiteState:
    """Mixture ``(1 - w) tau + w junk`` with ``w`` chosen so ``||rho - tau||_1 = eps``."""
    tau = states.maximally_entangled(d)
    w = eps / trace_norm(junk.matrix - tau.matrix)
    return states.validate_density((1 - w) * tau.matrix + w * junk.matrix, (d, d))


def _random_block_distribution(rng) -> classical.JointDistribution:
    da, db = int(rng.integers(2, 5)), int(rng.integers(2, 5))
    ka, kb = int(rng.integers(1, da)), int(rng.integers(1, db))
    pa, pb = rng.permutation(da), rng.permutation(db)
    blocks_a = [tuple(pa[:ka]), tuple(pa[ka:])]
    blocks_b = [tuple(pb[:kb]), tuple(pb[kb:])]
    return classical.block_distribution(blocks_a, blocks_b, seed=rng)


def run_extreme_suite(trials: int = 30, seed: int = 42) -> SuiteReport:
    """Extreme-value checks; each violation is the excess over its own tolerance.

    Per trial: range of mu on a random state, mu of a product state, the
    pure-state 0/1 dichotomy, the ``1 - 9 eps`` bound near a maximally
    entangled state, a common-data witness on a decomposable classical
    embedding, absence of a witness on an isotropic state with ``p <= 0.95``,
    the binary lower bound, and the zero-correlation characterization.
    """
    report = SuiteReport("extreme", trials, seed, 0.0, config={"eps_grid": list(EPS_GRID)})
    checks = dict.fromkeys(
        ["range", "product", "pure", "near_max_entangled", "witness", "no_witness", "binary_bound", "zero"], 0)
    for t in range(trials):
        rng = _trial_rng(seed, t)

        rho = _random_state(rng, (3, 3))
        mu = maxcorr.maximal_correlation(rho)
        report.record(t, "mu outside [0, 1]", max(-mu, mu - 1.0) - 1e-8)
        checks["range"] += 1

        ra = states.random_density(int(rng.integers(2, 4)), seed=rng)
        rb = states.random_density(int(rng.integers(2, 4)), seed=rng)
        prod = states.product_state(ra, rb)
        report.record(t, "product state has mu > 0", maxcorr.maximal_correlation(prod) - 1e-8)
        checks["product"] += 1

        da, db = _random_dims(rng, (3, 3))
        if rng.random() < 1 / 3:
            psi = np.kron(states.random_pure_vector(da, seed=rng), states.random_pure_vector(db, seed=rng))
        else:
            psi = states.random_pure_vector(da * db, seed=rng)
        pure_rho = states.pure_state(psi, (da, db))
        gap = abs(maxcorr.pure_state_mu(psi, da, db) - maxcorr.maximal_correlation(pure_rho))
        report.record(t, "pure-state dichotomy disagrees with the spectrum", gap - 1e-6)
        checks["pure"] += 1

        d = int(rng.integers(2, 4))
        eps = EPS_GRID[t % len(EPS_GRID)]
        near = perturbed_maximally_entangled(d, eps, states.random_bipartite(d, d, seed=rng))
        report.record(t, f"mu below 1 - 9 eps (d={d}, eps={eps})",
                      (1 - 9 * eps) - maxcorr.maximal_correlation(near))
        checks["near_max_entangled"] += 1

        dist = _random_block_distribution(rng)
        try:
            wit = maxcorr.common_data_witness(states.embed_classical(dist))
        except WitnessConstructionFailed as exc:
            report.record(t, f"witness construction failed: {exc}", np.inf)
        else:
            if wit is None:
                report.record(t, "no witness for a decomposable distribution", np.inf)
            else:
                p = wit.distribution.p
                report.record(t, "witness cross terms too large", max(p[0, 1], p[1, 0]) - 1e-8)
                report.record(t, "witness outcomes trivial", 1e-12 - min(p[0, 0], p[1, 1]))
        checks["witness"] += 1

        p_iso = float(rng.uniform(0.0, 0.95))
        report.record(t, f"witness reported for isotropic p={p_iso:.3f}",
                      1.0 if maxcorr.common_data_witness(states.isotropic_state(p_iso)) is not None else -1.0)
        checks["no_witness"] += 1

        p2 = classical.random_distribution(2, 2, seed=rng)
        if p2.p[0, 0] > 0 and p2.p[1, 1] > 0:
            report.record(t, "binary lower bound exceeds exact mu",
                          classical.lemma_lower_bound(p2) - classical.binary_mu_exact(p2) - 1e-12)
            checks["binary_bound"] += 1

        base = states.product_state(ra, rb)
        other = states.random_bipartite(*base.dims, seed=rng)
        for mix in (0.0, 1e-12, 1e-9, 1e-6, 1e-3):
            z = states.validate_density((1 - mix) * base.matrix + mix * other.matrix, base.dims)
            if maxcorr.maximal_correlation(z) <= 1e-7:
                za, zb = states.marginals(z)
                report.record(t, f"mu <= 1e-7 but state is not a product (mix={mix})",
                              frobenius_norm(z.matrix - np.kron(za, zb)) - 1e-5)
                checks["zero"] += 1
    report.notes["checks"] = checks
    return report


def run_oracle_suite(trials: int = 50, dims=(3, 3), seed: int = 42, workers: int = 1) -> SuiteReport:
    """``|oracle_mu - maximal_correlation| <= 1e-6`` on random states."""
    report = SuiteReport("oracle", trials, seed, ORACLE_TOL, config={"dims": list(dims)})

    def trial(t):
        rng = _trial_rng(seed, t)
        rho = _random_state(rng, dims)
        return rho.dims, abs(oracle_mu(rho, seed=(seed, t)) - maxcorr.maximal_correlation(rho))

    for t, (d, v) in enumerate(_map_trials(trial, trials, workers)):
        report.record(t, f"oracle disagrees with the spectrum, dims {d}", v)
    return report
