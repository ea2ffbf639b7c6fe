"""Blocked normal equations: recovery, merging, degeneracy, persistence."""
import numpy as np
import pytest

from amcengine import (
    BasisSpec,
    CoefficientSet,
    ConfigError,
    DegenerateRegressionError,
    NormalEquations,
    basis_eval,
    load_warm_start,
    merge,
    save_warm_start,
)
from amcengine.regression import solve_spd_system


class TestBasisSpec:
    def test_blocked_layout(self):
        spec = BasisSpec.blocked(50, 10)
        assert spec.n_blocks == 5
        assert spec.n_functions == 6
        assert spec.include_time
        assert spec.block_of(0) == 0
        assert spec.block_of(9) == 0
        assert spec.block_of(10) == 1
        assert spec.block_of(49) == 4

    def test_blocked_rounds_up(self):
        assert BasisSpec.blocked(50, 7).n_blocks == 8

    def test_unpooled_drops_time(self):
        spec = BasisSpec.blocked(5, 1)
        assert not spec.include_time
        assert spec.n_functions == 3
        assert spec.n_blocks == 5

    def test_time_column_needs_pooling(self):
        # Within a one-date block t is constant, collinear with the intercept.
        with pytest.raises(ConfigError):
            BasisSpec(5, 1, include_time=True)
        with pytest.raises(ConfigError):
            BasisSpec(10, 2, include_time=False)

    def test_group_size_bounds(self):
        with pytest.raises(ConfigError):
            BasisSpec.blocked(5, 6)
        with pytest.raises(ConfigError):
            BasisSpec.blocked(5, 0)

    def test_block_of_range_check(self):
        spec = BasisSpec.blocked(5, 1)
        with pytest.raises(ConfigError):
            spec.block_of(5)

    def test_fingerprint_distinguishes_layouts(self):
        a = BasisSpec.blocked(50, 10)
        b = BasisSpec.blocked(50, 5)
        c = BasisSpec.blocked(40, 10)
        assert len({a.fingerprint, b.fingerprint, c.fingerprint}) == 3

    def test_block_of_dates_matches_block_of(self):
        spec = BasisSpec.blocked(23, 4)
        np.testing.assert_array_equal(
            spec.block_of_dates(), [spec.block_of(k) for k in range(23)]
        )


class TestBasisEval:
    def test_six_function_values(self):
        spec = BasisSpec.blocked(10, 5)
        f = basis_eval(spec, 3.0, 0.5)
        np.testing.assert_allclose(f, [1.0, 3.0, 9.0, 0.5, 1.5, 4.5], rtol=1e-15)

    def test_three_function_values(self):
        spec = BasisSpec.blocked(10, 1)
        f = basis_eval(spec, 3.0, 0.5)
        np.testing.assert_allclose(f, [1.0, 3.0, 9.0], rtol=1e-15)


def _accumulate_samples(spec, samples):
    ne = NormalEquations(spec)
    for block, w, x, t, y in samples:
        ne.accumulate(block, w, basis_eval(spec, x, t), y)
    return ne


class TestNormalEquations:
    def test_exact_recovery(self):
        # Targets generated exactly from a coefficient vector are recovered.
        spec = BasisSpec.blocked(4, 2)
        alpha_true = np.array([0.3, -1.2, 0.05, 2.0, -0.4, 0.01])
        rng = np.random.default_rng(0)
        ne = NormalEquations(spec)
        for _ in range(200):
            x = rng.uniform(20.0, 60.0)
            t = rng.uniform(0.0, 1.0)
            f = basis_eval(spec, x, t)
            ne.accumulate(0, rng.uniform(0.1, 2.0), f, float(f @ alpha_true))
        coeffs = ne.solve(ridge=0.0)
        np.testing.assert_allclose(coeffs.alphas[0], alpha_true, rtol=1e-7, atol=1e-9)
        assert coeffs.alphas[1] is None

    def test_merge_matches_single_accumulation(self):
        spec = BasisSpec.blocked(6, 3)
        rng = np.random.default_rng(1)
        samples = [
            (int(rng.integers(0, 2)), float(rng.uniform(0.0, 1.5)),
             float(rng.uniform(10, 70)), float(rng.uniform(0, 1)), float(rng.normal()))
            for _ in range(300)
        ]
        whole = _accumulate_samples(spec, samples)
        parts = [_accumulate_samples(spec, samples[i::3]) for i in range(3)]
        merged = merge(merge(parts[0], parts[1]), parts[2])
        np.testing.assert_allclose(merged.u, whole.u, rtol=1e-12)
        np.testing.assert_allclose(merged.v, whole.v, rtol=1e-12)
        np.testing.assert_allclose(merged.mass, whole.mass, rtol=1e-12)

    def test_merge_is_associative(self):
        spec = BasisSpec.blocked(3, 3)
        rng = np.random.default_rng(2)
        chunks = []
        for _ in range(3):
            samples = [
                (0, float(rng.uniform(0.0, 1.0)), float(rng.uniform(10, 70)),
                 float(rng.uniform(0, 1)), float(rng.normal()))
                for _ in range(50)
            ]
            chunks.append(_accumulate_samples(spec, samples))
        a, b, c = chunks
        left = merge(merge(a, b), c)
        right = merge(a, merge(b, c))
        np.testing.assert_allclose(left.u, right.u, rtol=1e-13)
        np.testing.assert_allclose(left.v, right.v, rtol=1e-13)

    def test_merge_rejects_mismatched_specs(self):
        with pytest.raises(ConfigError):
            merge(NormalEquations(BasisSpec.blocked(4, 2)), NormalEquations(BasisSpec.blocked(4, 1)))

    def test_common_rescaling_leaves_coefficients_unchanged(self):
        # Down-weighting past data multiplies U and V by one factor, which
        # cancels in the solve.
        spec = BasisSpec.blocked(2, 1)
        rng = np.random.default_rng(3)
        samples = [
            (int(rng.integers(0, 2)), 1.0, float(rng.uniform(10, 70)), 0.0, float(rng.normal()))
            for _ in range(100)
        ]
        ne = _accumulate_samples(spec, samples)
        before = ne.solve(ridge=0.0)
        ne.scale(0.37)
        after = ne.solve(ridge=0.0)
        for a, b in zip(before.alphas, after.alphas):
            np.testing.assert_allclose(a, b, rtol=1e-9)

    def test_scale_rejects_negative_factor(self):
        ne = NormalEquations(BasisSpec.blocked(1, 1))
        with pytest.raises(ConfigError):
            ne.scale(-0.5)

    def test_zero_weight_sample_is_dropped(self):
        spec = BasisSpec.blocked(1, 1)
        ne = NormalEquations(spec)
        ne.accumulate(0, 0.0, basis_eval(spec, 30.0, 0.0), 5.0)
        assert ne.mass[0] == 0.0
        assert np.all(ne.u == 0.0)

    def test_negative_weight_rejected(self):
        spec = BasisSpec.blocked(1, 1)
        ne = NormalEquations(spec)
        with pytest.raises(ConfigError):
            ne.accumulate(0, -1.0, basis_eval(spec, 30.0, 0.0), 5.0)

    def test_rank_deficiency_raises_and_names_block(self):
        # All samples at one spot: U has rank 1 and the solve must fail
        # without regularisation, identifying the offending block.
        spec = BasisSpec.blocked(2, 1)
        ne = NormalEquations(spec)
        for _ in range(10):
            ne.accumulate(1, 1.0, basis_eval(spec, 35.0, 0.0), 2.0)
        ne.accumulate(0, 1.0, basis_eval(spec, 30.0, 0.0), 1.0)
        ne.accumulate(0, 1.0, basis_eval(spec, 35.0, 0.0), 2.0)
        ne.accumulate(0, 1.0, basis_eval(spec, 40.0, 0.0), 1.5)
        with pytest.raises(DegenerateRegressionError) as err:
            ne.solve(ridge=0.0)
        assert err.value.block == 1
        assert "block 1" in str(err.value)

    def test_ridge_rescues_rank_deficiency(self):
        spec = BasisSpec.blocked(1, 1)
        ne = NormalEquations(spec)
        for _ in range(10):
            ne.accumulate(0, 1.0, basis_eval(spec, 35.0, 0.0), 2.0)
        coeffs = ne.solve(ridge=1e-8)
        fitted = coeffs.continuation_value(35.0, 0.0, 0)
        assert fitted == pytest.approx(2.0, rel=1e-4)

    def test_empty_blocks_stay_unset(self):
        spec = BasisSpec.blocked(4, 2)
        ne = NormalEquations(spec)
        rng = np.random.default_rng(4)
        for _ in range(30):
            x = float(rng.uniform(10, 70))
            f = basis_eval(spec, x, 0.3)
            ne.accumulate(0, 1.0, f, x * 0.1)
        coeffs = ne.solve()
        assert coeffs.alphas[0] is not None
        assert coeffs.alphas[1] is None
        assert not coeffs.bootstrap

    def test_solve_spd_rejects_indefinite(self):
        u = np.array([[1.0, 0.0], [0.0, -1.0]])
        with pytest.raises(DegenerateRegressionError, match="date 3"):
            solve_spd_system(u, np.ones(2), 0.0, "date 3")


class TestNoisyTargetEquivalence:
    """Fitting noisy realisations equals fitting their conditional means.

    When the response is C(X) + noise with zero conditional mean, the
    weighted least-squares coefficients over the noisy samples coincide
    with those over the per-state conditional means, because V only sees
    Sum w f E[P|X].  This is what lets the engine regress on simulated
    payoffs instead of unknown continuation values.
    """

    @staticmethod
    def _minimizers(states, probs, weights, cond_means, half_spreads):
        spec = BasisSpec.blocked(1, 1)
        noisy = NormalEquations(spec)
        exact = NormalEquations(spec)
        for x, p, w, c, d in zip(states, probs, weights, cond_means, half_spreads):
            f = basis_eval(spec, x, 0.0)
            # Two equally likely realisations c - d and c + d per state.
            noisy.accumulate(0, 0.5 * p * w, f, c - d)
            noisy.accumulate(0, 0.5 * p * w, f, c + d)
            exact.accumulate(0, p * w, f, c)
        return noisy.solve(ridge=0.0).alphas[0], exact.solve(ridge=0.0).alphas[0]

    def test_three_state_model(self):
        a_noisy, a_exact = self._minimizers(
            states=(1.0, 2.0, 3.0),
            probs=(0.2, 0.5, 0.3),
            weights=(1.0, 0.7, 0.4),
            cond_means=(3.0, 1.0, 2.5),
            half_spreads=(0.5, 1.5, 2.0),
        )
        np.testing.assert_allclose(a_noisy, a_exact, rtol=1e-12, atol=1e-12)

    def test_overdetermined_model(self):
        # Five states under a quadratic basis: the fit cannot interpolate,
        # yet the two minimizers still coincide.
        a_noisy, a_exact = self._minimizers(
            states=(1.0, 2.0, 3.0, 4.0, 5.0),
            probs=(0.1, 0.2, 0.4, 0.2, 0.1),
            weights=(0.3, 1.0, 1.0, 0.8, 0.1),
            cond_means=(2.0, -1.0, 0.5, 3.0, 1.0),
            half_spreads=(1.0, 0.2, 2.0, 0.0, 3.0),
        )
        np.testing.assert_allclose(a_noisy, a_exact, rtol=1e-10, atol=1e-12)


class TestCoefficientPersistence:
    def test_json_round_trip(self, tmp_path):
        spec = BasisSpec.blocked(6, 3)
        ne = NormalEquations(spec)
        rng = np.random.default_rng(5)
        for _ in range(100):
            x, t = float(rng.uniform(10, 70)), float(rng.uniform(0, 1))
            for b in range(2):
                ne.accumulate(b, 1.0, basis_eval(spec, x, t), float(rng.normal()))
        coeffs = ne.solve()
        path = str(tmp_path / "coeffs.json")
        save_warm_start(coeffs, path)
        loaded = load_warm_start(path, spec)
        for a, b in zip(coeffs.alphas, loaded.alphas):
            np.testing.assert_allclose(a, b, rtol=0, atol=0)

    def test_none_blocks_survive_round_trip(self, tmp_path):
        spec = BasisSpec.blocked(4, 2)
        coeffs = CoefficientSet(spec, (np.arange(6, dtype=float), None))
        path = str(tmp_path / "partial.json")
        save_warm_start(coeffs, path)
        loaded = load_warm_start(path, spec)
        assert loaded.alphas[1] is None
        np.testing.assert_array_equal(loaded.alphas[0], coeffs.alphas[0])

    def test_fingerprint_mismatch_rejected(self, tmp_path):
        spec = BasisSpec.blocked(6, 3)
        coeffs = CoefficientSet.empty(spec)
        path = str(tmp_path / "coeffs.json")
        save_warm_start(coeffs, path)
        with pytest.raises(ConfigError, match="fingerprint"):
            load_warm_start(path, BasisSpec.blocked(6, 2))

    def test_corrupt_file_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_warm_start(str(path), BasisSpec.blocked(2, 1))

    def test_wrong_block_count_rejected(self):
        spec = BasisSpec.blocked(4, 2)
        data = {"basis_fingerprint": spec.fingerprint, "blocks": [None]}
        with pytest.raises(ConfigError, match="blocks"):
            CoefficientSet.from_json_dict(data, spec)

    def test_wrong_function_count_rejected(self):
        spec = BasisSpec.blocked(4, 2)
        data = {"basis_fingerprint": spec.fingerprint, "blocks": [[1.0, 2.0], None]}
        with pytest.raises(ConfigError):
            CoefficientSet.from_json_dict(data, spec)

    def test_empty_set_is_bootstrap(self):
        spec = BasisSpec.blocked(4, 2)
        empty = CoefficientSet.empty(spec)
        assert empty.bootstrap
        with pytest.raises(DegenerateRegressionError):
            empty.continuation_value(36.0, 0.5, 0)

    def test_packed_arrays(self):
        spec = BasisSpec.blocked(4, 2)
        alpha = np.arange(6, dtype=float)
        coeffs = CoefficientSet(spec, (alpha, None))
        coef, ok = coeffs.packed()
        assert coef.shape == (2, 6)
        np.testing.assert_array_equal(ok, [1, 0])
        np.testing.assert_array_equal(coef[0], alpha)
        np.testing.assert_array_equal(coef[1], 0.0)
