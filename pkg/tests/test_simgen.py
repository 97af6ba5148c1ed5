"""Synthetic data generation: response surfaces, correlation matrices, datasets."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from colearner.errors import NumericError, ParameterError
from colearner.simgen import (
    GenConfig,
    Scenario,
    control_response,
    control_response_batch,
    draw_scenario,
    dump_dataset_csv,
    generate_dataset,
    random_correlation_matrix,
    sample_features,
    scaled_logistic,
    treatment_response,
    treatment_response_batch,
    true_cate,
    true_cate_batch,
)


class TestScaledLogistic:
    def test_midpoint_is_one(self):
        # 2 / (1 + exp(0)) == 1 exactly
        assert scaled_logistic(0.5) == 1.0

    def test_range(self):
        # mathematically the open interval (0, 2); far in the tails the
        # float result saturates at exactly 2.0
        v = np.linspace(-10, 10, 201)
        out = scaled_logistic(v)
        assert np.all(out > 0.0) and np.all(out <= 2.0)
        moderate = scaled_logistic(np.linspace(-3, 3, 101))
        assert np.all(moderate < 2.0)

    def test_monotone_increasing(self):
        v = np.linspace(-3, 3, 101)
        out = scaled_logistic(v)
        assert np.all(np.diff(out) > 0)

    @given(st.floats(-5.0, 5.0))
    def test_symmetric_around_midpoint(self, d):
        assert scaled_logistic(0.5 + d) + scaled_logistic(0.5 - d) == pytest.approx(2.0, abs=1e-12)

    def test_steepness(self):
        # twelve-fold slope: value at 0.75 is 2/(1+exp(-3))
        assert scaled_logistic(0.75) == pytest.approx(2.0 / (1.0 + math.exp(-3.0)), rel=1e-15)


class TestDrawScenario:
    def test_linear_jump_scenario_fields(self):
        s = draw_scenario("sim1", 10, 3, np.random.default_rng(0))
        assert s.kind == "sim1"
        assert s.beta.shape == (10,)
        assert np.all(np.abs(s.beta) <= 5.0)
        assert s.jump_indices.shape == (3,)
        assert len(set(s.jump_indices.tolist())) == 3
        assert list(s.jump_indices) == sorted(s.jump_indices.tolist())
        assert all(0 <= k < 10 for k in s.jump_indices)

    def test_curved_jump_scenario_has_no_beta(self):
        s = draw_scenario("sim2", 6, 2, np.random.default_rng(1))
        assert s.beta is None
        assert s.jump_indices.shape == (2,)

    def test_smooth_scenario_ignores_jumps(self):
        s = draw_scenario("sim3", 6, 4, np.random.default_rng(2))
        assert s.jump_indices is None
        assert s.beta is None

    def test_rejects_unknown_kind(self):
        with pytest.raises(ParameterError):
            draw_scenario("sim9", 5, 1, np.random.default_rng(0))

    def test_product_scenarios_need_two_features(self):
        with pytest.raises(ParameterError):
            draw_scenario("sim2", 1, 1, np.random.default_rng(0))
        with pytest.raises(ParameterError):
            draw_scenario("sim3", 1, 0, np.random.default_rng(0))

    def test_rejects_more_jumps_than_features(self):
        with pytest.raises(ParameterError):
            draw_scenario("sim1", 3, 4, np.random.default_rng(0))


class TestResponses:
    def test_linear_jump_surfaces_by_hand(self):
        # beta = 0 isolates the indicator terms
        s = Scenario(kind="sim1", jump_indices=np.array([0]), beta=np.zeros(3))
        above = np.array([0.6, 0.0, 0.0])
        below = np.array([0.4, 0.0, 0.0])
        assert control_response(s, above) == 5.0
        assert control_response(s, below) == 0.0
        # treatment adds 8 per jump feature exceeding 0.1
        assert treatment_response(s, above) == 5.0 + 8.0
        assert treatment_response(s, np.array([0.15, 0.0, 0.0])) == 8.0
        assert treatment_response(s, np.array([0.05, 0.0, 0.0])) == 0.0

    def test_linear_term_uses_dot_product(self):
        s = Scenario(kind="sim1", jump_indices=np.array([1]), beta=np.array([2.0, -1.0]))
        x = np.array([0.3, 0.05])
        assert control_response(s, x) == pytest.approx(2.0 * 0.3 - 1.0 * 0.05, rel=1e-15)

    def test_curved_control_surface(self):
        s = Scenario(kind="sim2", jump_indices=np.array([2]))
        x = np.array([0.5, 0.5, 0.0])
        # product of unit logistic values over two halves: 1 * 1 / 2
        assert control_response(s, x) == pytest.approx(0.5, rel=1e-15)

    def test_smooth_sign_flip_surfaces(self):
        s = Scenario(kind="sim3")
        x = np.array([0.5, 0.5, 9.9])
        assert control_response(s, x) == pytest.approx(0.5, rel=1e-15)
        assert treatment_response(s, x) == -control_response(s, x)
        assert true_cate(s, x) == pytest.approx(-1.0, rel=1e-15)

    def test_smooth_effect_is_twice_negated_control(self):
        s = Scenario(kind="sim3")
        xs = np.random.default_rng(3).normal(size=(50, 4))
        np.testing.assert_array_equal(
            true_cate_batch(s, xs), -2.0 * control_response_batch(s, xs)
        )
        np.testing.assert_array_equal(
            treatment_response_batch(s, xs), -control_response_batch(s, xs)
        )

    @pytest.mark.parametrize("kind,jumps", [("sim1", 2), ("sim2", 3)])
    def test_effect_equals_response_difference(self, kind, jumps):
        s = draw_scenario(kind, 8, jumps, np.random.default_rng(4))
        xs = np.random.default_rng(5).normal(size=(100, 8))
        diff = treatment_response_batch(s, xs) - control_response_batch(s, xs)
        np.testing.assert_allclose(true_cate_batch(s, xs), diff, rtol=1e-12, atol=1e-12)

    def test_smooth_effect_equals_response_difference_exactly(self):
        s = Scenario(kind="sim3")
        xs = np.random.default_rng(6).normal(size=(100, 5))
        diff = treatment_response_batch(s, xs) - control_response_batch(s, xs)
        np.testing.assert_array_equal(true_cate_batch(s, xs), diff)

    @pytest.mark.parametrize("kind", ["sim1", "sim2", "sim3"])
    def test_batch_matches_scalar(self, kind):
        # the dot product in the linear term may accumulate in a different
        # order for 1-row and n-row matrices, so agreement is up to ulps
        s = draw_scenario(kind, 4, 2, np.random.default_rng(7))
        xs = np.random.default_rng(8).normal(size=(20, 4))
        np.testing.assert_allclose(
            control_response_batch(s, xs),
            [control_response(s, x) for x in xs],
            rtol=1e-12, atol=1e-12,
        )
        np.testing.assert_allclose(
            treatment_response_batch(s, xs),
            [treatment_response(s, x) for x in xs],
            rtol=1e-12, atol=1e-12,
        )
        np.testing.assert_allclose(
            true_cate_batch(s, xs),
            [true_cate(s, x) for x in xs],
            rtol=1e-12, atol=1e-12,
        )


class TestRandomCorrelationMatrix:
    @pytest.mark.parametrize("m", [2, 5, 10])
    def test_is_a_valid_correlation_matrix(self, m):
        for seed in range(20):
            c = random_correlation_matrix(m, np.random.default_rng(seed))
            assert c.shape == (m, m)
            np.testing.assert_array_equal(np.diag(c), np.ones(m))
            np.testing.assert_array_equal(c, c.T)
            assert np.all(np.abs(c) <= 1.0 + 1e-12)
            assert np.linalg.eigvalsh(c).min() >= -1e-10

    def test_deterministic_per_stream(self):
        a = random_correlation_matrix(6, np.random.default_rng(11))
        b = random_correlation_matrix(6, np.random.default_rng(11))
        np.testing.assert_array_equal(a, b)

    def test_off_diagonals_vary(self):
        c = random_correlation_matrix(8, np.random.default_rng(12))
        off = c[np.triu_indices(8, 1)]
        assert off.std() > 0.05

    def test_rejects_tiny_dimension(self):
        with pytest.raises(ParameterError):
            random_correlation_matrix(0, np.random.default_rng(0))


class TestSampleFeatures:
    def test_shape_and_moments(self):
        m = 4
        corr = np.eye(m)
        xs = sample_features(20_000, m, corr, np.random.default_rng(13))
        assert xs.shape == (20_000, m)
        np.testing.assert_allclose(xs.mean(axis=0), np.zeros(m), atol=0.05)
        np.testing.assert_allclose(xs.std(axis=0), np.ones(m), atol=0.05)

    def test_imposes_requested_correlation(self):
        corr = np.array([[1.0, 0.9], [0.9, 1.0]])
        xs = sample_features(20_000, 2, corr, np.random.default_rng(14))
        observed = np.corrcoef(xs.T)[0, 1]
        assert observed == pytest.approx(0.9, abs=0.02)

    def test_rejects_indefinite_matrix(self):
        # pairwise correlations (0.9, 0.9, -0.9) are jointly impossible
        bad = np.array([[1.0, 0.9, 0.9], [0.9, 1.0, -0.9], [0.9, -0.9, 1.0]])
        with pytest.raises(NumericError):
            sample_features(10, 3, bad, np.random.default_rng(15))

    def test_near_singular_matrix_still_samples(self):
        # a perfectly correlated pair is only positive semi-definite; the
        # jitter ladder must cope
        corr = np.array([[1.0, 1.0], [1.0, 1.0]])
        xs = sample_features(100, 2, corr, np.random.default_rng(16))
        np.testing.assert_allclose(xs[:, 0], xs[:, 1], atol=1e-3)


class TestGenerateDataset:
    def _cfg(self, **kw):
        base = dict(m=4, n0=12, n1=4, noise_sigma=1.0, seed=3, n_test=50)
        base.update(kw)
        return GenConfig(**base)

    def test_group_layout(self):
        s = draw_scenario("sim1", 4, 1, np.random.default_rng(17))
        d, test_xs, test_tau = generate_dataset(s, self._cfg())
        flags = d.treatments()
        assert d.n0 == 12 and d.n1 == 4
        np.testing.assert_array_equal(flags[:12], np.zeros(12))
        np.testing.assert_array_equal(flags[12:], np.ones(4))
        assert test_xs.shape == (50, 4)
        assert test_tau.shape == (50,)

    def test_zero_noise_outcomes_are_pure_responses(self):
        s = draw_scenario("sim2", 4, 1, np.random.default_rng(18))
        d, _, _ = generate_dataset(s, self._cfg(noise_sigma=0.0))
        xs = d.features_matrix()
        expected = np.concatenate(
            [control_response_batch(s, xs[:12]), treatment_response_batch(s, xs[12:])]
        )
        np.testing.assert_allclose(d.outcomes(), expected, rtol=0, atol=0)

    def test_noise_only_perturbs_outcomes(self):
        s = draw_scenario("sim1", 4, 2, np.random.default_rng(19))
        d1, t1_xs, t1_tau = generate_dataset(s, self._cfg(noise_sigma=0.5))
        d2, t2_xs, t2_tau = generate_dataset(s, self._cfg(noise_sigma=2.0))
        np.testing.assert_array_equal(d1.features_matrix(), d2.features_matrix())
        np.testing.assert_array_equal(t1_xs, t2_xs)
        np.testing.assert_array_equal(t1_tau, t2_tau)
        assert not np.array_equal(d1.outcomes(), d2.outcomes())

    def test_test_size_does_not_move_training_data(self):
        s = draw_scenario("sim1", 4, 2, np.random.default_rng(20))
        d1, t1_xs, _ = generate_dataset(s, self._cfg(n_test=10))
        d2, t2_xs, _ = generate_dataset(s, self._cfg(n_test=80))
        np.testing.assert_array_equal(d1.features_matrix(), d2.features_matrix())
        np.testing.assert_array_equal(d1.outcomes(), d2.outcomes())
        np.testing.assert_array_equal(t1_xs, t2_xs[:10])

    def test_test_truths_match_surface(self):
        s = draw_scenario("sim3", 4, 0, np.random.default_rng(21))
        _, test_xs, test_tau = generate_dataset(s, self._cfg())
        np.testing.assert_array_equal(test_tau, true_cate_batch(s, test_xs))

    def test_deterministic_per_seed(self):
        s = draw_scenario("sim1", 4, 1, np.random.default_rng(22))
        d1, x1, t1 = generate_dataset(s, self._cfg(seed=9))
        d2, x2, t2 = generate_dataset(s, self._cfg(seed=9))
        np.testing.assert_array_equal(d1.outcomes(), d2.outcomes())
        np.testing.assert_array_equal(x1, x2)
        np.testing.assert_array_equal(t1, t2)
        d3, _, _ = generate_dataset(s, self._cfg(seed=10))
        assert not np.array_equal(d1.features_matrix(), d3.features_matrix())

    @pytest.mark.parametrize(
        "kw",
        [
            {"m": 0},
            {"n0": 0},
            {"n1": 0},
            {"noise_sigma": -1.0},
            {"n_test": 0},
        ],
    )
    def test_config_validation(self, kw):
        with pytest.raises(ParameterError):
            self._cfg(**kw)


class TestDumpDatasetCsv:
    def test_exact_bytes(self, tmp_path):
        from colearner.data import Dataset

        d = Dataset.from_arrays(
            np.array([[0.5, 1.5], [2.5, 3.5]]),
            np.array([0, 1]),
            np.array([1.25, -2.0]),
        )
        path = tmp_path / "data.csv"
        dump_dataset_csv(d, path)
        content = path.read_bytes()
        assert content == (
            b"x1,x2,treatment,outcome\n"
            b"0.5,1.5,0,1.25\n"
            b"2.5,3.5,1,-2.0\n"
        )

    def test_full_precision_roundtrip(self, tmp_path):
        from colearner.data import Dataset

        rng = np.random.default_rng(23)
        xs = rng.normal(size=(5, 3))
        ys = rng.normal(size=5)
        d = Dataset.from_arrays(xs, np.array([0, 0, 0, 1, 1]), ys)
        path = tmp_path / "data.csv"
        dump_dataset_csv(d, path)
        rows = path.read_text().strip().split("\n")[1:]
        parsed = np.array([[float(v) for v in r.split(",")] for r in rows])
        np.testing.assert_array_equal(parsed[:, :3], xs)
        np.testing.assert_array_equal(parsed[:, 4], ys)
