import math
from fractions import Fraction

import numpy as np
import pytest

from fedqa.evaluation import (
    QualityLogistic,
    evaluate_scores,
    krocc,
    logistic,
    logistic_fit,
    plcc,
    rmse,
    srocc,
)


def brute_force_tau(x, y):
    """O(n^2) concordance count, tie-corrected; final formula shared with krocc."""
    n = len(x)
    P = Q = T = U = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = int(x[i] > x[j]) - int(x[i] < x[j])
            dy = int(y[i] > y[j]) - int(y[i] < y[j])
            if dx == 0:
                T += 1
            if dy == 0:
                U += 1
            if dx * dy > 0:
                P += 1
            elif dx * dy < 0:
                Q += 1
    n0 = n * (n - 1) // 2
    return (P - Q) / math.sqrt((n0 - T) * (n0 - U))


def rank_average(values):
    """Average ranks computed with exact Fraction arithmetic."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [Fraction(0)] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = Fraction(i + j + 2, 2)
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def exhaustive_srocc(x, y):
    """Pearson over exact average ranks; same final float expression shape."""
    rx, ry = rank_average(list(x)), rank_average(list(y))
    n = len(rx)
    mx, my = sum(rx) / n, sum(ry) / n
    sxy = float(sum((a - mx) * (b - my) for a, b in zip(rx, ry)))
    sxx = float(sum((a - mx) ** 2 for a in rx))
    syy = float(sum((b - my) ** 2 for b in ry))
    return sxy / math.sqrt(sxx * syy)


def test_logistic_recovery_exact_model():
    rng = np.random.default_rng(7)
    x = np.sort(rng.uniform(0, 100, 30))
    beta_true = (100.0, 0.0, 50.0, 10.0)
    y = logistic(x, beta_true)
    fit = logistic_fit(x, y)
    assert fit.converged
    assert fit.sse < 1e-12
    for got, want in zip(fit.beta, beta_true):
        if want != 0:
            assert abs(got - want) / abs(want) < 1e-4
        else:
            assert abs(got) < 1e-4


def test_logistic_slope_sign_invariance():
    # |b4| in the exponent makes the curve blind to b4's sign, so fits from
    # either sign of the slope parameter describe the same model
    x = np.linspace(-5, 5, 50)
    a = logistic(x, (10.0, -3.0, 1.0, 2.0))
    b = logistic(x, (10.0, -3.0, 1.0, -2.0))
    assert np.array_equal(a, b)
    # swapping the asymptotes reflects the curve about its midline
    c = logistic(x, (-3.0, 10.0, 1.0, 2.0))
    assert np.allclose(a + c, 10.0 - 3.0, rtol=1e-12)


def test_logistic_constant_targets():
    x = np.linspace(0, 10, 8)
    fit = logistic_fit(x, np.full(8, 5.0))
    assert fit.beta[0] == fit.beta[1] == 5.0
    assert fit.sse == 0.0
    assert fit.converged


def test_logistic_degenerate_inputs():
    with pytest.raises(ValueError):
        logistic_fit([1.0, 1.0, 1.0, 1.0], [1, 2, 3, 4])
    with pytest.raises(ValueError):
        logistic_fit([1, 2, 3], [1, 2, 3])
    with pytest.raises(ValueError):
        logistic_fit([1, 2, 3, np.nan], [1, 2, 3, 4])


def test_logistic_noisy_fit_beats_baseline():
    rng = np.random.default_rng(11)
    x = np.sort(rng.uniform(0, 100, 60))
    y = logistic(x, (80.0, 10.0, 40.0, 8.0)) + rng.normal(0, 2.0, 60)
    fit = logistic_fit(x, y)
    flat_sse = float(np.sum((y - y.mean()) ** 2))
    assert fit.sse < 0.2 * flat_sse


def test_quality_logistic_estimator():
    rng = np.random.default_rng(3)
    x = np.sort(rng.uniform(0, 50, 40))
    y = logistic(x, (90.0, 5.0, 25.0, 6.0))
    est = QualityLogistic().fit(x, y)
    assert est.converged_
    assert np.allclose(est.predict(x), y, atol=1e-5)
    assert est.get_params()["max_iter"] == 500


def test_plcc_perfect_and_affine():
    y = np.array([1.0, 2.0, 3.0])
    assert plcc(y, y) == pytest.approx(1.0)
    assert plcc(np.array([2.0, 4.0, 6.0]), y) == pytest.approx(1.0)
    assert plcc(-y, y) == pytest.approx(-1.0)


def test_rank_correlations_monotone_cases():
    x = np.arange(10.0)
    y = x**3 + 5
    assert srocc(x, y) == pytest.approx(1.0)
    assert krocc(x, y) == pytest.approx(1.0)
    assert srocc(x, -y) == pytest.approx(-1.0)
    assert krocc(x, -y) == pytest.approx(-1.0)


def test_krocc_matches_brute_force_exactly():
    rng = np.random.default_rng(1)
    for _ in range(100):
        x = rng.integers(0, 10, 20).astype(float)
        y = rng.integers(0, 10, 20).astype(float)
        assert krocc(x, y) == brute_force_tau(list(x), list(y))


def test_srocc_matches_exhaustive_oracle():
    rng = np.random.default_rng(2)
    for _ in range(60):
        n = int(rng.integers(4, 11))
        x = rng.integers(0, 6, n).astype(float)
        y = rng.integers(0, 6, n).astype(float)
        if np.ptp(x) == 0 or np.ptp(y) == 0:
            continue
        assert srocc(x, y) == exhaustive_srocc(x, y)


def test_rank_correlations_invariant_to_monotone_transform():
    rng = np.random.default_rng(4)
    x = rng.normal(0, 2, 40)
    y = rng.normal(0, 2, 40)
    assert srocc(np.exp(x), y) == pytest.approx(srocc(x, y), abs=1e-15)
    assert krocc(np.exp(x), y) == pytest.approx(krocc(x, y), abs=1e-15)


def test_plcc_after_logistic_invariant_to_affine_scores():
    rng = np.random.default_rng(5)
    x = np.sort(rng.uniform(0, 10, 40))
    y = logistic(x, (60.0, 10.0, 5.0, 1.5)) + rng.normal(0, 1.0, 40)
    base = evaluate_scores(x, y)
    shifted = evaluate_scores(3.5 * x - 12.0, y)
    assert shifted.plcc == pytest.approx(base.plcc, abs=1e-9)
    assert shifted.rmse == pytest.approx(base.rmse, abs=1e-9)
    assert shifted.srocc == base.srocc


def test_rmse():
    assert rmse([1.0, 2.0], [1.0, 4.0]) == pytest.approx(math.sqrt(2.0))


def test_evaluate_scores_report():
    rng = np.random.default_rng(6)
    x = np.sort(rng.uniform(0, 100, 30))
    y = logistic(x, (100.0, 0.0, 50.0, 10.0)) + rng.normal(0, 1.0, 30)
    perf = evaluate_scores(x, y)
    assert perf.plcc > 0.99
    assert perf.srocc > 0.98
    assert perf.krocc > 0.9
    assert perf.rmse < 2.0
    payload = perf.to_dict()
    assert set(payload) >= {"plcc", "srocc", "krocc", "rmse", "logistic_beta"}
