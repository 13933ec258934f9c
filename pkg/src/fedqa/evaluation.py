"""Correlating metric predictions with subjective scores.

Raw metric scores are passed through a four-parameter logistic before Pearson
correlation and RMSE (rank correlations are computed on the raw scores). The
logistic is fitted by damped Gauss-Newton with an analytic Jacobian and a few
perturbed restarts to dodge local minima.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

__all__ = [
    "LogisticFit",
    "logistic",
    "logistic_fit",
    "QualityLogistic",
    "plcc",
    "srocc",
    "krocc",
    "rmse",
    "MetricPerformance",
    "evaluate_scores",
]


def logistic(x, beta) -> np.ndarray:
    """Four-parameter logistic ``b2 + (b1 - b2) / (1 + exp(-(x - b3)/|b4|))``."""
    b1, b2, b3, b4 = beta
    t = (np.asarray(x, dtype=float) - b3) / abs(b4)
    return b2 + (b1 - b2) / (1.0 + np.exp(-t))


@dataclass(frozen=True)
class LogisticFit:
    """Fitted logistic parameters with the residual sum of squares."""

    beta: tuple[float, float, float, float]
    sse: float
    converged: bool
    n_iter: int

    def __call__(self, x) -> np.ndarray:
        return logistic(x, self.beta)


def _jacobian(x: np.ndarray, beta: np.ndarray) -> np.ndarray:
    b1, b2, b3, b4 = beta
    a4 = abs(b4)
    t = (x - b3) / a4
    s = 1.0 / (1.0 + np.exp(-t))
    ds = s * (1.0 - s)
    J = np.empty((x.size, 4))
    J[:, 0] = s
    J[:, 1] = 1.0 - s
    J[:, 2] = (b1 - b2) * ds * (-1.0 / a4)
    J[:, 3] = (b1 - b2) * ds * (-(x - b3) / (b4 * b4)) * math.copysign(1.0, b4)
    return J


def _gauss_newton(x, y, beta0, max_iter, tol):
    beta = np.asarray(beta0, dtype=float)
    damping = 1e-3
    sse = float(np.sum((y - logistic(x, beta)) ** 2))
    n_iter = 0
    converged = False
    for n_iter in range(1, max_iter + 1):
        J = _jacobian(x, beta)
        r = y - logistic(x, beta)
        g = J.T @ r
        H = J.T @ J
        accepted = False
        for _ in range(16):
            try:
                step = np.linalg.solve(H + damping * np.eye(4), g)
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            cand = beta + step
            if abs(cand[3]) < 1e-12:
                cand[3] = math.copysign(1e-12, cand[3] if cand[3] != 0 else 1.0)
            cand_sse = float(np.sum((y - logistic(x, cand)) ** 2))
            if cand_sse <= sse:
                accepted = True
                break
            damping *= 10.0
        if not accepted:
            break
        damping = max(damping / 10.0, 1e-12)
        improvement = sse - cand_sse
        beta, sse = cand, cand_sse
        if improvement <= tol * max(sse, np.finfo(float).tiny):
            converged = True
            break
    return beta, sse, converged, n_iter


def logistic_fit(
    scores,
    dmos,
    max_iter: int = 500,
    tol: float = 1e-10,
    n_restarts: int = 3,
    random_state: int = 0,
) -> LogisticFit:
    """Least-squares four-parameter logistic fit of ``dmos`` on ``scores``.

    Initialized from the data range (``b1 = max y``, ``b2 = min y``,
    ``b3 = median x``, ``b4 = std x / 4``) plus ``n_restarts`` perturbed
    restarts; the best SSE wins. Raises on fewer than 4 points or degenerate
    scores; non-convergence returns the best parameters found with
    ``converged=False``.
    """
    x = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(dmos, dtype=float).ravel()
    if x.size != y.size:
        raise ValueError(f"got {x.size} scores against {y.size} subjective values")
    if x.size < 4:
        raise ValueError(f"need at least 4 points for a 4-parameter fit, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("scores and subjective values must be finite")
    if np.ptp(x) == 0.0:
        raise ValueError("scores are all identical; logistic fit is degenerate")

    if np.ptp(y) == 0.0:
        # flat subjective data: the flat curve fits exactly
        beta = (float(y[0]), float(y[0]), float(np.median(x)), max(float(np.std(x)) / 4.0, 1e-12))
        return LogisticFit(beta, 0.0, True, 0)

    base = np.array(
        [float(np.max(y)), float(np.min(y)), float(np.median(x)), max(float(np.std(x)) / 4.0, 1e-12)]
    )
    rng = np.random.default_rng(random_state)
    starts = [base]
    for _ in range(n_restarts):
        jitter = 1.0 + 0.25 * rng.standard_normal(4)
        starts.append(base * jitter)

    best = None
    for beta0 in starts:
        beta, sse, converged, n_iter = _gauss_newton(x, y, beta0, max_iter, tol)
        if best is None or sse < best[1]:
            best = (beta, sse, converged, n_iter)
    beta, sse, converged, n_iter = best
    return LogisticFit(tuple(float(b) for b in beta), sse, converged, n_iter)


class QualityLogistic(RegressorMixin, BaseEstimator):
    """Four-parameter logistic mapping from raw scores to subjective scale."""

    def __init__(
        self,
        max_iter: int = 500,
        tol: float = 1e-10,
        n_restarts: int = 3,
        random_state: int = 0,
    ):
        self.max_iter = max_iter
        self.tol = tol
        self.n_restarts = n_restarts
        self.random_state = random_state

    def fit(self, X, y):
        X = np.asarray(X, dtype=float).ravel()
        fit = logistic_fit(
            X, y, self.max_iter, self.tol, self.n_restarts, self.random_state
        )
        self.beta_ = fit.beta
        self.sse_ = fit.sse
        self.converged_ = fit.converged
        self.n_iter_ = fit.n_iter
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "beta_")
        return logistic(np.asarray(X, dtype=float).ravel(), self.beta_)


def plcc(predicted, y) -> float:
    """Pearson correlation between logistic-mapped scores and targets."""
    return float(stats.pearsonr(np.asarray(predicted, float), np.asarray(y, float))[0])


def srocc(x, y) -> float:
    """Spearman rank correlation: Pearson over average-rank ties."""
    rx = stats.rankdata(x, method="average")
    ry = stats.rankdata(y, method="average")
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    denom = float(np.dot(rx, rx)) * float(np.dot(ry, ry))
    if denom == 0.0:
        return math.nan
    return float(np.dot(rx, ry)) / math.sqrt(denom)


def krocc(x, y) -> float:
    """Kendall rank correlation, tie-corrected (tau-b).

    ``(P - Q) / sqrt((n0 - T) * (n0 - U))`` with concordant/discordant counts
    over all pairs and tie counts T, U per variable.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    n = x.size
    if n < 2:
        return math.nan
    sx = np.sign(x[:, None] - x[None, :])
    sy = np.sign(y[:, None] - y[None, :])
    iu = np.triu_indices(n, k=1)
    prod = sx[iu] * sy[iu]
    concordant = int(np.count_nonzero(prod > 0))
    discordant = int(np.count_nonzero(prod < 0))
    ties_x = int(np.count_nonzero(sx[iu] == 0))
    ties_y = int(np.count_nonzero(sy[iu] == 0))
    n0 = n * (n - 1) // 2
    denom = (n0 - ties_x) * (n0 - ties_y)
    if denom == 0:
        return math.nan
    return (concordant - discordant) / math.sqrt(denom)


def rmse(predicted, y) -> float:
    """Root mean square error between mapped scores and targets."""
    predicted = np.asarray(predicted, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.sqrt(np.mean((predicted - y) ** 2)))


@dataclass(frozen=True)
class MetricPerformance:
    """Correlation summary of a metric against subjective scores."""

    plcc: float
    srocc: float
    krocc: float
    rmse: float
    fit: LogisticFit

    def to_dict(self) -> dict:
        return {
            "plcc": self.plcc,
            "srocc": self.srocc,
            "krocc": self.krocc,
            "rmse": self.rmse,
            "logistic_beta": list(self.fit.beta),
            "logistic_sse": self.fit.sse,
            "logistic_converged": self.fit.converged,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def evaluate_scores(scores, dmos, **fit_kwargs) -> MetricPerformance:
    """Fit the logistic and compute PLCC/SROCC/KROCC/RMSE in one step."""
    scores = np.asarray(scores, dtype=float).ravel()
    dmos = np.asarray(dmos, dtype=float).ravel()
    fit = logistic_fit(scores, dmos, **fit_kwargs)
    mapped = fit(scores)
    return MetricPerformance(
        plcc=plcc(mapped, dmos),
        srocc=srocc(scores, dmos),
        krocc=krocc(scores, dmos),
        rmse=rmse(mapped, dmos),
        fit=fit,
    )
