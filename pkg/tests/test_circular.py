"""Wrapping, circular discrepancy, and its frequency ensemble."""

import math

import numpy as np
import pytest
from conftest import random_instance, rel_diff

import fastmmd as fm
from fastmmd.circular import CircularSample, wrap_angles
from fastmmd.errors import ValidationError

TWO_PI = 2.0 * math.pi


def _signed_objective(c1, c2, y):
    """Mean sine margin at candidate angle(s) y, evaluated term by term."""
    angles = np.concatenate([c1.angles, c2.angles])
    signed = np.concatenate([c1.weights, -c2.weights])
    return np.sin(np.atleast_1d(y)[:, None] - angles[None, :]) @ signed


class TestWrap:
    def test_modular_reduction(self):
        assert wrap_angles(np.array([TWO_PI + 0.5]))[0] == pytest.approx(0.5)
        assert wrap_angles(np.array([-0.5]))[0] == pytest.approx(TWO_PI - 0.5)
        assert wrap_angles(np.array([-1e-20]))[0] < TWO_PI

    def test_zero_frequency_degenerates(self):
        rng = np.random.default_rng(0)
        s = fm.two_sample(rng.normal(size=(4, 2)), rng.normal(size=(3, 2)))
        c1, c2 = fm.wrap(np.zeros(2), s)
        assert np.array_equal(c1.angles, np.zeros(4))
        assert np.array_equal(c2.angles, np.zeros(3))

    def test_weights_are_group_uniform(self):
        rng = np.random.default_rng(1)
        s = fm.two_sample(rng.normal(size=(5, 2)), rng.normal(size=(8, 2)))
        c1, c2 = fm.wrap(rng.normal(size=2), s)
        assert np.allclose(c1.weights, 1 / 5)
        assert np.allclose(c2.weights, 1 / 8)
        assert ((c1.angles >= 0) & (c1.angles < TWO_PI)).all()

    def test_dimension_mismatch(self):
        s = fm.two_sample(np.zeros((2, 2)), np.ones((2, 2)))
        with pytest.raises(ValidationError, match="dimension"):
            fm.wrap(np.zeros(3), s)

    def test_angle_range_validated(self):
        with pytest.raises(ValidationError, match="2\\*pi"):
            CircularSample(np.array([7.0]), np.array([1.0]))


class TestCircularDiscrepancy:
    def test_identical_masses_cancel(self):
        angles = np.array([0.3, 1.1, 4.0])
        weights = np.full(3, 1 / 3)
        result = fm.circular_discrepancy(
            CircularSample(angles, weights), CircularSample(angles, weights)
        )
        assert result.eta == 0.0
        assert result.decision_angle == 0.0
        assert result.degenerate

    def test_antipodal_unit_masses(self):
        c1 = CircularSample(np.array([0.0]), np.array([1.0]))
        c2 = CircularSample(np.array([math.pi]), np.array([1.0]))
        result = fm.circular_discrepancy(c1, c2)
        assert result.eta == pytest.approx(2.0, rel=1e-12)

    def test_closed_form_matches_double_sum_and_grid_search(self):
        rng = np.random.default_rng(2)
        angles = rng.uniform(0, TWO_PI, size=12)
        c1 = CircularSample(angles[:7], np.full(7, 1 / 7))
        c2 = CircularSample(angles[7:], np.full(5, 1 / 5))
        result = fm.circular_discrepancy(c1, c2)

        signed = np.concatenate([c1.weights, -c2.weights])
        double = sum(
            signed[i] * signed[j] * math.cos(angles[i] - angles[j])
            for i in range(12)
            for j in range(12)
        )
        assert abs(result.eta**2 - double) < 1e-10

        grid = np.linspace(0.0, TWO_PI, 100_000, endpoint=False)
        objective = _signed_objective(c1, c2, grid)
        assert abs(objective.max() - result.eta) < 1e-5
        # The sine margin is A sin(y - theta): its maximizer sits a quarter
        # turn past the reported diameter orientation.
        best = grid[int(np.argmax(objective))]
        expected = result.decision_angle + math.pi / 2
        delta = math.atan2(math.sin(best - expected), math.cos(best - expected))
        assert abs(delta) < 1e-3

    def test_antipodal_candidate_flips_sign(self):
        rng = np.random.default_rng(3)
        angles = rng.uniform(0, TWO_PI, size=9)
        c1 = CircularSample(angles[:4], np.full(4, 1 / 4))
        c2 = CircularSample(angles[4:], np.full(5, 1 / 5))
        result = fm.circular_discrepancy(c1, c2)
        optimum = result.decision_angle + math.pi / 2
        at_opt = _signed_objective(c1, c2, optimum)[0]
        at_antipode = _signed_objective(c1, c2, optimum + math.pi)[0]
        assert at_opt == pytest.approx(result.eta, rel=1e-10)
        assert at_antipode == pytest.approx(-result.eta, rel=1e-10)

    def test_wrapping_invariance(self):
        rng = np.random.default_rng(4)
        s = fm.two_sample(rng.normal(size=(6, 2)), rng.normal(size=(5, 2)))
        omega = rng.normal(size=2)
        c1, c2 = fm.wrap(omega, s)
        base = fm.circular_discrepancy(c1, c2).eta
        shift = wrap_angles(c1.angles + 4 * TWO_PI)  # add whole turns
        shifted = fm.circular_discrepancy(CircularSample(shift, c1.weights), c2).eta
        assert abs(shifted - base) < 1e-12


class TestEnsemble:
    def test_matches_fourier_biased(self):
        rng = np.random.default_rng(5)
        for trial in range(10):
            s, k = random_instance(rng, max_n=15, max_d=3)
            bank = fm.sample_spectral(k, int(rng.integers(1, 40)), s.d, seed=trial)
            ens = fm.ensemble_discrepancy(s, k, bank)
            ref, _ = fm.fastmmd_fourier(s, k, bank)
            assert rel_diff(ens.value_sq, ref.value_sq) < 1e-10
            assert ens.method == "circular"

    def test_identical_multisets_vanish(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(8, 2))
        s = fm.two_sample(x, x)
        k = fm.gaussian(1.0)
        bank = fm.sample_spectral(k, 12, 2, seed=0)
        assert fm.ensemble_discrepancy(s, k, bank).value_sq == 0.0

    def test_mean_over_single_frequency_banks_matches_exact(self):
        rng = np.random.default_rng(7)
        s = fm.two_sample(rng.normal(size=(15, 2)), rng.normal(0.8, 1, (12, 2)))
        k = fm.gaussian(1.0)
        exact = fm.mmd_biased_exact(s, k).value_sq
        values = np.array(
            [
                fm.ensemble_discrepancy(
                    s, k, fm.sample_spectral(k, 1, 2, seed=i)
                ).value_sq
                for i in range(1000)
            ]
        )
        se = values.std(ddof=1) / math.sqrt(values.size)
        assert abs(values.mean() - exact) < 3 * se
