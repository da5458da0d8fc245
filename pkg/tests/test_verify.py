"""Tests for the Monte-Carlo moment checks and the regret-bound harness."""

import csv
import json
import math

import numpy as np
import pytest
from scipy import signal

from tadam.optim import OptimizerConfig
from tadam.rng import stream
from tadam.verify import (
    BoundInapplicableError,
    QuadraticStream,
    REGRET_CSV_COLUMNS,
    Z99_ONE_SIDED,
    batch_means_stderr,
    bound_terms,
    clean_round_regret,
    doubling_ratios,
    eval_bound_rhs,
    iid_stderr,
    mc_moment_check,
    regret_claims,
    run_regret_experiment,
    write_moment_reports_json,
    write_regret_csv,
    write_regret_report_json,
)


class TestBatchMeansStderr:
    def test_constant_series_has_zero_stderr(self):
        assert batch_means_stderr(np.full(5000, 3.5)) == 0.0

    def test_short_series_degenerates_to_zero(self):
        assert batch_means_stderr([1.0]) == 0.0
        assert iid_stderr([1.0]) == 0.0

    def test_agrees_with_iid_formula_on_independent_draws(self):
        x = stream(7, "bm-test").standard_normal(100_000)
        se_bm = batch_means_stderr(x)
        se_iid = iid_stderr(x)
        # Both estimate sigma/sqrt(n) here; batch means is noisier but close.
        assert se_bm == pytest.approx(se_iid, rel=0.35)
        assert se_iid == pytest.approx(1.0 / math.sqrt(100_000), rel=0.05)


class TestMomentCheck:
    @pytest.mark.parametrize("kwargs", [
        dict(d=0, nu=5.0, beta1=0.9),
        dict(d=5, nu=0.0, beta1=0.9),
        dict(d=5, nu=-1.0, beta1=0.9),
        dict(d=5, nu=5.0, beta1=0.4),
        dict(d=5, nu=5.0, beta1=1.0),
        dict(d=5, nu=5.0, beta1=0.9, n_steps=9_999),
    ])
    def test_rejects_bad_arguments(self, kwargs):
        with pytest.raises(ValueError):
            mc_moment_check(**{"n_steps": 10_000, "seed": 0, **kwargs})

    def test_distance_mean_matches_dimension(self):
        # Sum of d squared standard normals averages d.
        report = mc_moment_check(10, 10.0, 0.9, n_steps=100_000, seed=0)
        assert 9.8 <= report.mean_D <= 10.2
        assert report.pass_mean_d

    def test_weight_mean_inside_predicted_interval(self):
        report = mc_moment_check(10, 10.0, 0.9, n_steps=100_000, seed=0)
        assert report.w_interval == (1.0, 2.5)
        assert 1.0 <= report.mean_w <= 2.5
        assert report.pass_w_interval

    @pytest.mark.parametrize("d", [1, 2])
    def test_low_dimension_skips_weight_interval(self, d):
        report = mc_moment_check(d, 5.0, 0.9, n_steps=10_000, seed=0)
        assert report.w_interval is None
        assert report.pass_w_interval is None
        assert any("skipped" in note for note in report.notices)
        claims = {c["claim"]: c for c in report.claims()}
        weight_claim = claims["mean robustness weight lies inside the "
                              "predicted interval"]
        assert weight_claim["verdict"] == "skipped"

    def test_decay_series_matches_filter_based_recomputation(self):
        # Recompute mean_beta_w through a linear-filter evaluation of the
        # weight-mass recursion instead of the step loop.
        d, nu, beta1, n, seed = 5, 5.0, 0.7, 10_000, 3
        report = mc_moment_check(d, nu, beta1, n_steps=n, seed=seed)
        rng = stream(seed, f"moment-check d={d} nu={nu} beta1={beta1}")
        g = rng.standard_normal((n, d))
        w = (nu + d) / (nu + np.sum(g * g, axis=1) / (1.0 + 1e-8))
        decay = (2.0 * beta1 - 1.0) / beta1
        w0 = beta1 / (1.0 - beta1)
        masses, _ = signal.lfilter([1.0], [1.0, -decay], w, zi=[decay * w0])
        prev_mass = np.concatenate([[w0], masses[:-1]])
        beta_w = prev_mass / (prev_mass + w)
        assert report.mean_beta_w == pytest.approx(float(beta_w.mean()),
                                                   rel=1e-12)

    def test_report_is_deterministic_per_seed(self):
        a = mc_moment_check(5, 5.0, 0.9, n_steps=10_000, seed=11)
        b = mc_moment_check(5, 5.0, 0.9, n_steps=10_000, seed=11)
        c = mc_moment_check(5, 5.0, 0.9, n_steps=10_000, seed=12)
        assert a == b
        assert a.mean_D != c.mean_D

    def test_pass_flags_recomputable_from_reported_numbers(self):
        report = mc_moment_check(5, 5.0, 0.7, n_steps=10_000, seed=0)
        assert report.pass_mean_d == (abs(report.mean_D - 5) <= 0.1)
        threshold = report.beta1 + Z99_ONE_SIDED * report.stderr_beta_w
        assert report.pass_beta_w == (report.mean_beta_w <= threshold)
        lo, hi = report.w_interval
        assert report.pass_w_interval == (lo <= report.mean_w <= hi)

    def test_claims_layout(self):
        report = mc_moment_check(5, 5.0, 0.9, n_steps=10_000, seed=0)
        claims = report.claims()
        assert len(claims) == 3
        for record in claims:
            assert set(record) == {"claim", "statistic", "interval", "verdict"}
            assert record["verdict"] in ("pass", "fail", "skipped")

    def test_json_emission_is_sorted_and_loadable(self, tmp_path):
        reports = [mc_moment_check(10, 10.0, 0.9, n_steps=10_000, seed=0),
                   mc_moment_check(5, 5.0, 0.9, n_steps=10_000, seed=0)]
        path = tmp_path / "moments.json"
        write_moment_reports_json(reports, path)
        payload = json.loads(path.read_text())
        dims = [entry["params"]["d"] for entry in payload["moment_checks"]]
        assert dims == [5, 10]
        for entry in payload["moment_checks"]:
            assert len(entry["claims"]) == 3


class TestBoundEvaluation:
    def test_zero_gradients_give_zero_bound(self):
        rhs = eval_bound_rhs(
            v_hat_T=np.zeros(3), v_hat_series=np.zeros((4, 3)),
            beta_1t=np.full(4, 0.9), grad_col_norms=np.zeros(3),
            D_inf=4.0, alpha=0.1, beta2=0.999, beta_w_bar=0.9, T=4)
        assert rhs == 0.0

    def test_single_round_hand_computed_value(self):
        # One round, one coordinate, round numbers:
        #   sqrt(v_hat) = 2, decay 0.5, alpha_1 = 0.5, diameter 2,
        #   1 - beta_w_bar = 0.6, gamma = 0.4/0.8 = 0.5, sqrt(1-beta2) = 0.6.
        # Terms: 4*2/0.6 = 40/3; (4/0.36)*(0.5*2/0.5) = 200/9;
        #        0.5*1*3/(0.36*0.5*0.6) = 125/9.  Total 445/9.
        terms = bound_terms(
            v_hat_T=[4.0], v_hat_series=[[4.0]], beta_1t=[0.5],
            grad_col_norms=[3.0], D_inf=2.0, alpha=0.5, beta2=0.64,
            beta_w_bar=0.4, T=1)
        assert terms[0] == pytest.approx(40.0 / 3.0, rel=1e-12)
        assert terms[1] == pytest.approx(200.0 / 9.0, rel=1e-12)
        assert terms[2] == pytest.approx(125.0 / 9.0, rel=1e-12)
        assert sum(terms) == pytest.approx(445.0 / 9.0, rel=1e-12)

    def test_doubling_diameter_quadruples_first_two_terms_only(self):
        rng = stream(0, "bound-scale")
        v_series = rng.random((6, 2)) + 0.1
        kwargs = dict(v_hat_T=v_series[-1], v_hat_series=v_series,
                      beta_1t=rng.random(6) * 0.5 + 0.4,
                      grad_col_norms=rng.random(2) + 1.0,
                      alpha=0.2, beta2=0.999, beta_w_bar=0.9, T=6)
        base = bound_terms(D_inf=1.5, **kwargs)
        scaled = bound_terms(D_inf=3.0, **kwargs)
        assert scaled[0] == pytest.approx(4.0 * base[0], rel=1e-12)
        assert scaled[1] == pytest.approx(4.0 * base[1], rel=1e-12)
        assert scaled[2] == pytest.approx(base[2], rel=1e-12)

    def test_inapplicable_when_gamma_reaches_one(self):
        with pytest.raises(BoundInapplicableError, match="gamma"):
            eval_bound_rhs([1.0], [[1.0]], [0.9], [1.0], D_inf=1.0,
                           alpha=0.1, beta2=0.81, beta_w_bar=0.95, T=1)

    @pytest.mark.parametrize("override", [
        dict(beta_w_bar=1.0),
        dict(beta_w_bar=-0.1),
        dict(alpha=0.0),
        dict(D_inf=-1.0),
        dict(beta2=1.0),
        dict(T=0),
        dict(grad_col_norms=[np.nan]),
        dict(v_hat_T=[-1.0]),
    ])
    def test_rejects_malformed_inputs(self, override):
        kwargs = dict(v_hat_T=[1.0], v_hat_series=[[1.0]], beta_1t=[0.9],
                      grad_col_norms=[1.0], D_inf=1.0, alpha=0.1,
                      beta2=0.999, beta_w_bar=0.9, T=1)
        kwargs.update(override)
        with pytest.raises(ValueError):
            eval_bound_rhs(**kwargs)

    def test_rejects_series_with_wrong_horizon(self):
        with pytest.raises(ValueError, match="T rows"):
            eval_bound_rhs([1.0], [[1.0], [1.0]], [0.9], [1.0], D_inf=1.0,
                           alpha=0.1, beta2=0.999, beta_w_bar=0.9, T=3)


class TestQuadraticStream:
    @pytest.mark.parametrize("kwargs", [
        dict(dim=0),
        dict(box_low=2.0, box_high=-2.0),
        dict(target_low=1.0, target_high=-1.0),
        dict(outlier_prob=1.5),
        dict(outlier_prob=-0.1),
        dict(curvature=np.inf),
        dict(outlier_value=np.nan),
    ])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ValueError):
            QuadraticStream(**kwargs)

    def test_geometry(self):
        problem = QuadraticStream()
        assert problem.diameter == 4.0
        assert problem.is_convex
        np.testing.assert_array_equal(problem.start_point(), [2.0])
        assert not QuadraticStream(curvature=-1.0).is_convex

    def test_draw_is_deterministic_and_in_range(self):
        problem = QuadraticStream(dim=2)
        t1, m1 = problem.draw(500, seed=4)
        t2, m2 = problem.draw(500, seed=4)
        np.testing.assert_array_equal(t1, t2)
        np.testing.assert_array_equal(m1, m2)
        assert t1.shape == (500, 2)
        assert not m1.any()
        assert np.all((t1 >= -1.0) & (t1 < 1.0))

    def test_outlier_rounds_share_clean_targets(self):
        # Same seed, outliers on vs off: the non-outlier rounds coincide.
        clean, _ = QuadraticStream().draw(2_000, seed=9)
        spiked, mask = QuadraticStream(outlier_prob=0.05).draw(2_000, seed=9)
        assert 0 < mask.sum() < 2_000
        np.testing.assert_array_equal(spiked[~mask], clean[~mask])
        assert np.all(spiked[mask] == 100.0)

    def test_gradient_matches_finite_difference(self):
        problem = QuadraticStream(dim=3, curvature=1.7)
        theta = np.array([0.3, -1.2, 0.8])
        target = np.array([0.1, 0.4, -0.9])
        grad = problem.grad(theta, target)
        h = 1e-6
        for j in range(3):
            bump = np.zeros(3)
            bump[j] = h
            numeric = (problem.loss(theta + bump, target)
                       - problem.loss(theta - bump, target)) / (2 * h)
            assert grad[j] == pytest.approx(numeric, rel=1e-7)

    def test_offline_optimum_is_clamped_mean(self):
        problem = QuadraticStream()
        targets = np.array([[0.5], [1.0], [-0.3]])
        assert problem.offline_optimum(targets) == pytest.approx([0.4])
        far = np.array([[100.0], [100.0], [1.0]])
        np.testing.assert_array_equal(problem.offline_optimum(far), [2.0])


def _tadam_config(**overrides):
    kwargs = dict(alpha=0.1, beta1=0.9, beta2=0.999, algorithm="tadam",
                  amsgrad=True, nu="auto")
    kwargs.update(overrides)
    return OptimizerConfig(**kwargs)


def _adam_config(**overrides):
    kwargs = dict(alpha=0.1, beta1=0.9, beta2=0.999, algorithm="adam",
                  amsgrad=True)
    kwargs.update(overrides)
    return OptimizerConfig(**kwargs)


@pytest.fixture(scope="module")
def clean_traces():
    problem = QuadraticStream()
    return {
        "tadam": run_regret_experiment(problem, _tadam_config(), 10_000, 0),
        "adam": run_regret_experiment(problem, _adam_config(), 10_000, 0),
    }


@pytest.fixture(scope="module")
def adversarial_traces():
    problem = QuadraticStream(outlier_prob=0.05)
    runs = {}
    for seed in (0, 1, 2):
        runs[seed] = {
            "tadam": run_regret_experiment(problem, _tadam_config(),
                                           10_000, seed),
            "adam": run_regret_experiment(problem, _adam_config(),
                                          10_000, seed),
        }
    return problem, runs


class TestRegretExperiment:
    def test_rejects_nonconforming_setups(self):
        problem = QuadraticStream()
        with pytest.raises(ValueError, match="convex"):
            run_regret_experiment(QuadraticStream(curvature=-1.0),
                                  _tadam_config(), 10, 0)
        with pytest.raises(ValueError, match="amsgrad"):
            run_regret_experiment(problem, _tadam_config(amsgrad=False), 10, 0)
        with pytest.raises(ValueError, match="adaptive"):
            run_regret_experiment(
                problem, OptimizerConfig(algorithm="sgd", amsgrad=False), 10, 0)
        with pytest.raises(ValueError, match="positive"):
            run_regret_experiment(problem, _tadam_config(), 0, 0)
        with pytest.raises(ValueError, match="alpha"):
            run_regret_experiment(problem, _tadam_config(alpha=0.0), 10, 0)

    def test_runs_are_deterministic(self):
        problem = QuadraticStream()
        a = run_regret_experiment(problem, _tadam_config(), 200, 5)
        b = run_regret_experiment(problem, _tadam_config(), 200, 5)
        np.testing.assert_array_equal(a.cumulative_regret,
                                      b.cumulative_regret)
        np.testing.assert_array_equal(a.thetas, b.thetas)
        assert a.bound_rhs == b.bound_rhs

    def test_iterates_stay_in_box(self, adversarial_traces):
        problem, runs = adversarial_traces
        for per_seed in runs.values():
            for trace in per_seed.values():
                assert np.all(trace.thetas >= problem.box_low)
                assert np.all(trace.thetas <= problem.box_high)

    def test_final_regret_nonnegative_and_below_bound(self, clean_traces):
        for trace in clean_traces.values():
            final = trace.cumulative_regret[-1]
            assert final >= 0.0
            assert trace.gamma < 1.0
            assert final <= trace.bound_rhs

    def test_regret_grows_sublinearly(self, clean_traces):
        for trace in clean_traces.values():
            ratios = doubling_ratios(trace.cumulative_regret)
            assert float(ratios.max()) < 2.0

    def test_normalized_regret_decreases_over_last_decade(self, clean_traces):
        trace = clean_traces["tadam"]
        r = trace.cumulative_regret
        assert r[-1] / math.sqrt(10_000) < r[999] / math.sqrt(1_000)

    def test_running_max_second_moment_is_monotone(self, clean_traces):
        v = clean_traces["tadam"].v_hat_series
        assert np.all(np.diff(v, axis=0) >= 0.0)

    def test_adam_decay_series_is_constant(self, clean_traces):
        trace = clean_traces["adam"]
        np.testing.assert_array_equal(trace.beta_1t, np.full(10_000, 0.9))
        assert trace.beta_w_bar == pytest.approx(0.9)

    def test_tadam_decay_series_varies_and_stays_in_unit_interval(
            self, clean_traces):
        decay = clean_traces["tadam"].beta_1t
        assert np.all((decay > 0.0) & (decay < 1.0))
        assert decay.std() > 0.0

    def test_bound_matches_direct_reevaluation(self, clean_traces):
        trace = clean_traces["tadam"]
        grad_col_norms = np.sqrt(np.sum(trace.grads ** 2, axis=0))
        rhs = eval_bound_rhs(trace.v_hat_series[-1], trace.v_hat_series,
                             trace.beta_1t, grad_col_norms, trace.D_inf,
                             trace.config.alpha, trace.config.beta2,
                             trace.beta_w_bar, trace.T)
        assert trace.bound_rhs == pytest.approx(rhs, rel=1e-12)
        assert trace.bound_rhs == pytest.approx(sum(trace.bound_term_values),
                                                rel=1e-12)

    def test_regret_matches_loss_ledger(self, clean_traces):
        trace = clean_traces["tadam"]
        diff = trace.theta_star[None, :] - trace.targets
        optimum = trace.problem.curvature * np.sum(diff * diff, axis=1)
        recomputed = np.cumsum(trace.losses - optimum)
        np.testing.assert_allclose(trace.cumulative_regret, recomputed,
                                   rtol=1e-12)

    def test_observed_gradient_bound_is_tight_enough(self, clean_traces):
        trace = clean_traces["tadam"]
        # |grad| = 2|theta - c| <= 2 * (2 + 1) on the clean stream.
        assert 0.0 < trace.G_inf <= 6.0
        assert trace.G_inf == np.max(np.abs(trace.grads))

    def test_outlier_rounds_poison_adam_more(self, adversarial_traces):
        problem, runs = adversarial_traces
        for seed, per_seed in runs.items():
            robust = clean_round_regret(per_seed["tadam"], problem)
            fragile = clean_round_regret(per_seed["adam"], problem)
            assert robust < fragile, f"seed {seed}: {robust} !< {fragile}"

    def test_outliers_are_downweighted_in_the_decay(self, adversarial_traces):
        problem, runs = adversarial_traces
        trace = runs[0]["tadam"]
        spiked = trace.beta_1t[trace.outlier_mask]
        calm = trace.beta_1t[~trace.outlier_mask]
        # Outlier rounds should push the decay toward keeping the old
        # momentum, i.e. larger beta_w than typical clean rounds.
        assert np.median(spiked) > np.median(calm)

    def test_clean_round_regret_needs_clean_rounds(self):
        problem = QuadraticStream(outlier_prob=1.0)
        trace = run_regret_experiment(problem, _tadam_config(), 10_000, 0)
        with pytest.raises(ValueError, match="clean rounds"):
            clean_round_regret(trace, problem)

    def test_claims_layout(self, clean_traces):
        claims = regret_claims(clean_traces["tadam"])
        assert [c["verdict"] for c in claims] == ["pass", "pass", "pass"]
        short = regret_claims(clean_traces["tadam"], t_min=6_000)
        assert len(short) == 2  # horizon too short for a doubling check

    def test_doubling_ratios_need_room(self):
        with pytest.raises(ValueError, match="horizons"):
            doubling_ratios(np.ones(100), t_min=1000)


class TestRegretEmission:
    def test_csv_time_series_round_trip(self, tmp_path, clean_traces):
        trace = clean_traces["tadam"]
        path = tmp_path / "regret.csv"
        write_regret_csv(trace, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == REGRET_CSV_COLUMNS
        assert len(rows) == trace.T + 1
        first, last = rows[1], rows[-1]
        assert first[0] == "1" and last[0] == "10000"
        assert float(last[1]) == trace.cumulative_regret[-1]
        assert float(last[5]) == pytest.approx(trace.bound_rhs, rel=1e-12)
        terms = tuple(float(v) for v in last[2:5])
        assert terms == pytest.approx(trace.bound_term_values, rel=1e-12)

    def test_json_report_structure(self, tmp_path, clean_traces):
        path = tmp_path / "regret.json"
        write_regret_report_json(
            [("tadam clean", clean_traces["tadam"]),
             ("adam clean", clean_traces["adam"])], path)
        payload = json.loads(path.read_text())
        labels = [run["label"] for run in payload["regret_runs"]]
        assert labels == ["adam clean", "tadam clean"]
        for run in payload["regret_runs"]:
            assert run["final_regret"] <= run["bound_rhs"]
            verdicts = {c["verdict"] for c in run["claims"]}
            assert verdicts == {"pass"}
