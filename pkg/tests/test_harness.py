import json

import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from qmaxcorr import harness, linalg, maxcorr, states
from qmaxcorr.linalg import trace_norm


def forbid_svd(monkeypatch):
    def boom(*args, **kwargs):
        raise AssertionError("oracle called an SVD routine")

    monkeypatch.setattr(linalg, "svd", boom)
    monkeypatch.setattr(maxcorr, "svd", boom)
    monkeypatch.setattr(np.linalg, "svd", boom)
    monkeypatch.setattr(scipy.linalg, "svd", boom)


@pytest.mark.parametrize("seed", range(6))
def test_oracle_never_calls_svd(monkeypatch, seed):
    rho = states.random_bipartite(2 + seed % 2, 3, seed=seed)
    expected = maxcorr.maximal_correlation(rho)
    forbid_svd(monkeypatch)
    assert harness.oracle_mu(rho, seed=seed) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("p", [0.0, 0.35, 1.0])
def test_oracle_on_isotropic(p):
    assert harness.oracle_mu(states.isotropic_state(p)) == pytest.approx(p, abs=1e-8)


def test_perturbed_state_is_at_exact_distance():
    junk = states.random_bipartite(3, 3, seed=1)
    near = harness.perturbed_maximally_entangled(3, 0.05, junk)
    assert trace_norm(near.matrix - states.maximally_entangled(3).matrix) == pytest.approx(0.05, rel=1e-9)


@pytest.mark.parametrize("suite, kwargs", [
    (harness.run_dpi_suite, {"trials": 20}),
    (harness.run_tensorization_suite, {"trials": 15}),
    (harness.run_extreme_suite, {"trials": 6}),
    (harness.run_oracle_suite, {"trials": 8}),
])
def test_suites_pass_and_are_reproducible(suite, kwargs):
    a = suite(seed=7, **kwargs)
    b = suite(seed=7, **kwargs)
    assert a.passed, a.failures
    assert a.to_dict() == b.to_dict()
    assert json.loads(a.to_json())["passed"] is True


def test_parallel_trials_match_serial():
    serial = harness.run_dpi_suite(trials=10, seed=3)
    parallel = harness.run_dpi_suite(trials=10, seed=3, workers=4)
    assert serial.to_dict() == parallel.to_dict()


def test_report_records_failures():
    rep = harness.SuiteReport("demo", 2, 0, 1e-7)
    rep.record(0, "fine", 1e-9)
    rep.record(1, "bad", 1e-3)
    rep.record(1, "loose", 1e-3, tol=1e-2)
    assert not rep.passed
    assert [f.description for f in rep.failures] == ["bad"]
    assert rep.max_violation == pytest.approx(1e-3)


def test_tensorization_notes_show_mi_doubling():
    rep = harness.run_tensorization_suite(trials=10, seed=1)
    assert rep.notes["self_products"] == 2
    assert rep.notes["mi_additivity_max_error"] < 1e-9
    ex = rep.notes["example"]
    assert_allclose(ex["mi_two_copies"], 2 * ex["mi_single"], atol=1e-9)
    assert_allclose(ex["mu_two_copies"], ex["mu_single"], atol=1e-7)
