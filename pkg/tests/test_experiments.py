import json

import numpy as np
import pytest
from scipy.stats import poisson

from mjpstein.cli import main
from mjpstein.config import ExperimentConfig, config_from_dict, load_config, spec_from_dict
from mjpstein.engine import build_chain, stationary_distribution
from mjpstein.exceptions import ConfigError, TailMassError
from mjpstein.experiments import (
    ResultTable,
    bivariate_correlation,
    bivariate_means,
    default_delta,
    drift_check,
    exact_bivariate_equilibrium,
    fit_decay_rate,
    fit_loglog,
    report_constants,
    restrict,
    run_bounds_suite,
    run_simulator_check,
)
from mjpstein.process import build_elementary, geometry_of


def test_fit_loglog_exact_power():
    n = np.array([10, 20, 40, 80])
    f = fit_loglog(n, 3.0 * n**-0.5)
    assert f.slope == pytest.approx(-0.5) and f.r2 == pytest.approx(1.0) and f.reliable


def test_fit_loglog_flags_noise():
    rng = np.random.default_rng(0)
    f = fit_loglog(np.arange(1, 9), np.exp(rng.normal(size=8)))
    assert not f.reliable
    t = ResultTable("x")
    assert not t.add_slope("noise", f, -10, 10)
    assert t.add_slope("noise", f, -10, 10, require_r2=False) == (-10 <= f.slope <= 10)


def test_fit_decay_rate():
    t = np.linspace(0, 5, 30)
    assert fit_decay_rate(t, 2 * np.exp(-1.7 * t)) == pytest.approx(1.7)


def test_exact_bivariate_independent_case():
    dist = exact_bivariate_equilibrium(1.0, 2.0, 0.0, 1.0, 1.0, 5)
    P = dist.probs.reshape(dist.states[:, 0].max() + 1, -1)
    ref = np.outer(poisson.pmf(np.arange(P.shape[0]), 5.0), poisson.pmf(np.arange(P.shape[1]), 10.0))
    np.testing.assert_allclose(P, ref, atol=1e-15)
    assert bivariate_correlation(1.0, 2.0, 0.0, 1.0, 1.0) == 0.0


def test_exact_bivariate_moments():
    m = bivariate_means(1.0, 1.0, 2.0, 1.0, 1.0, 10)
    assert m == pytest.approx((20.0, 20.0, 10.0))
    dist = exact_bivariate_equilibrium(1.0, 1.0, 2.0, 1.0, 2.0, 10)
    m1, m2, m3 = bivariate_means(1.0, 1.0, 2.0, 1.0, 2.0, 10)
    np.testing.assert_allclose(dist.mean(), [m1 + m3, m2 + m3], rtol=1e-10)
    cov = dist.covariance()
    rho = cov[0, 1] / np.sqrt(cov[0, 0] * cov[1, 1])
    assert rho == pytest.approx(bivariate_correlation(1.0, 1.0, 2.0, 1.0, 2.0), rel=1e-8)
    assert 0.0 <= rho <= 0.5


def test_exact_bivariate_errors():
    with pytest.raises(TailMassError):
        exact_bivariate_equilibrium(1.0, 1.0, 2.0, 1.0, 2.0, 10, box=(5, 5))
    with pytest.raises(ValueError):
        exact_bivariate_equilibrium(1.0, 1.0, -1.0, 1.0, 2.0, 10)


def test_restrict_renormalizes():
    dist = exact_bivariate_equilibrium(1.0, 1.0, 2.0, 1.0, 2.0, 4)
    states = np.array([[0, 0], [1, 0], [500, 0]])
    q = restrict(dist, states)
    assert q.sum() == pytest.approx(1.0) and q[2] == 0.0


def test_bivariate_spec_center():
    spec = spec_from_dict({"type": "bivariate"}, 25)
    geom = geometry_of(spec)
    chain = build_chain(spec, geom, default_delta(spec, geom))
    pi = stationary_distribution(chain)
    assert np.abs(pi.mean() - chain.center).max() / np.sqrt(25) < 1.0


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="nope")
    with pytest.raises(ConfigError):
        ExperimentConfig(n_grid=[10, 10])
    with pytest.raises(ConfigError):
        ExperimentConfig(seed=2**64)
    with pytest.raises(ConfigError):
        ExperimentConfig(schema_version=99)
    with pytest.raises(ConfigError):
        config_from_dict({"kind": "stein", "colour": 1})
    with pytest.raises(ConfigError):
        spec_from_dict({"type": "elementary", "c": [0.0]}, 10)
    with pytest.raises(ConfigError):
        spec_from_dict({"type": "unknown"}, 10)
    bad = tmp_path / "bad.yaml"
    bad.write_text("- just\n- a list\n")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig(kind="stein", seed=3)
    assert cfg.n_grid == [40, 63, 100, 160, 250, 400]
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg.to_dict()))
    again = load_config(p)
    assert again == cfg and again.digest() == cfg.digest()
    assert ExperimentConfig(kind="stein", seed=4).digest() != cfg.digest()


def test_general_process_block():
    block = {
        "type": "general",
        "c": [1.0],
        "delta0": 0.5,
        "jumps": [
            {"jump": [1], "rate": {"kind": "constant", "value": 1.0}},
            {"jump": [-1], "rate": {"kind": "affine", "value": 0.0, "gradient": [1.0]}},
        ],
    }
    spec = spec_from_dict(block, 20)
    assert geometry_of(spec).A[0, 0] == pytest.approx(-1.0)


def test_result_table_io_and_reproducibility(tmp_path):
    e = build_elementary([3.0, 1.5], np.diag([-1.0, -2.0]), [[6.0, 2.0], [2.0, 6.0]], n=8)
    t1 = run_simulator_check(e.spec, 0.5, np.round(8 * e.spec.c).astype(int), 0.3, 500, seed=9)
    t2 = run_simulator_check(e.spec, 0.5, np.round(8 * e.spec.c).astype(int), 0.3, 500, seed=9)
    t1.write_json(tmp_path / "a.json")
    t2.write_json(tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    t1.write_csv(tmp_path / "a.csv")
    assert (tmp_path / "a.csv").read_text().splitlines()[0] == "n,metric,value,band,passed"


def test_constants_report_self_checks():
    spec = spec_from_dict({"type": "bivariate-elementary"}, 10)
    table = report_constants(spec)
    assert table.passed
    names = [r["metric"] for r in table.rows]
    assert "check_theta1_min_of_three" in names and "check_psi" in names


def test_bounds_suite_small():
    e = build_elementary([0.0, 0.0], -np.eye(2), 20 * np.eye(2), n=40)
    table = run_bounds_suite(e.spec, e.geom, n_sets=3)
    assert table.value("drift_violations") == 0
    assert table.value("drift_qualifying_states") > 0
    assert table.passed


def test_drift_check_rejects_large_delta():
    from mjpstein.exceptions import AssumptionError

    e = build_elementary([0.0, 0.0], -np.eye(2), 20 * np.eye(2), n=10)
    with pytest.raises(AssumptionError):
        drift_check(e.spec, e.geom, 5.0)


def test_cli_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("process: {type: immigration-death, mu: 1.0, delta0: 0.5}\nn_grid: [10, 20]\ndelta: 0.4\n")
    assert main(["equilibrium", "--config", str(cfg), "--out", str(tmp_path / "o"), "--format", "json"]) == 0
    data = json.loads((tmp_path / "o" / "equilibrium.json").read_text())
    assert data["provenance"]["seed"] == 20240101 and len(data["rows"]) == 4
    assert (tmp_path / "o" / "equilibrium_n10.csv").exists()
    assert main(["equilibrium", "--config", str(tmp_path / "missing.yaml")]) == 1
    bad = tmp_path / "bad.yaml"
    bad.write_text("n_grid: [20, 10]\n")
    assert main(["equilibrium", "--config", str(bad), "--out", str(tmp_path / "o")]) == 1
    out = capsys.readouterr()
    assert "PASS stationary_residual" in out.out and "error:" in out.err


def test_cli_failing_verdict_returns_two(tmp_path):
    # the shift slope band cannot be met on a two-point grid of tiny n
    cfg = tmp_path / "c.yaml"
    cfg.write_text("n_grid: [3, 4]\n")
    assert main(["bivariate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
