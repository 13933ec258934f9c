"""Foveated entropic differencing: the full scoring pipeline.

A reference/distorted frame pair is decomposed into radial subbands, each
subband's blocks get conditional local entropies under a scale-mixture model,
and per-block entropy differences are weighted by a normalized foveation
sensitivity map evaluated at the subband's mean frequency and each block's
eccentricity. The score is the sum of absolute weighted differences over all
subbands and blocks; identical frames score exactly 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .csf import CsfParams, error_sensitivity
from .filterbank import build_bank, decompose, subband_mean_frequency
from .geometry import BlockGrid, GazePoint, ViewGeometry, eccentricity_map
from .gsm import blockify, entropy_field, entropy_field_from_model, fit_gsm
from .validation import check_frame_pair, check_frame_stack, resolve_gaze

__all__ = [
    "SubbandResult",
    "FedReport",
    "sensitivity_weight_map",
    "fed_subband_map",
    "FoveatedEntropicDifference",
    "fed_score",
    "fed_video_score",
]


@dataclass(frozen=True)
class SubbandResult:
    """Per-subband contribution to the score. ``k`` is the 1-based band number."""

    k: int
    center_cpd: float
    partial: float
    active: bool


@dataclass
class FedReport:
    """Score report for one frame pair (or per-frame average over a sequence).

    ``score`` equals the sum of the subband partials. ``maps`` optionally
    holds the per-subband weighted difference maps of the last scored frame.
    """

    score: float
    subbands: list[SubbandResult]
    config: dict
    n_frames: int = 1
    maps: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "n_frames": self.n_frames,
            "subbands": [
                {
                    "k": s.k,
                    "f_k_cpd": s.center_cpd,
                    "partial": s.partial,
                    "active": s.active,
                }
                for s in self.subbands
            ],
            "config": self.config,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def sensitivity_weight_map(
    ecc_map: np.ndarray,
    band_freq_cpd: float,
    nyquist_freq: float,
    params: CsfParams = CsfParams(),
) -> tuple[np.ndarray, bool]:
    """Normalized sensitivity weights for one subband over the block grid.

    Weights sum to 1 for an active band. If the whole map lies beyond the
    band's cutoff the band is inactive and the all-zero map is returned.
    """
    ecc_map = np.asarray(ecc_map, dtype=float)
    if not np.all(np.isfinite(ecc_map)):
        raise ValueError("eccentricity map contains non-finite values")
    s = error_sensitivity(band_freq_cpd, ecc_map, nyquist_freq, params)
    total = float(s.sum())
    if total <= 0.0:
        return np.zeros_like(s), False
    return s / total, True


def fed_subband_map(h_ref: np.ndarray, h_dist: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted entropy-difference map ``w * (h_ref - h_dist)`` for one band."""
    h_ref = np.asarray(h_ref, dtype=float)
    h_dist = np.asarray(h_dist, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if not h_ref.shape == h_dist.shape == weights.shape:
        raise ValueError(
            f"entropy/weight grids disagree: {h_ref.shape}, {h_dist.shape}, {weights.shape}"
        )
    return weights * (h_ref - h_dist)


class FoveatedEntropicDifference(BaseEstimator):
    """Full-reference foveated quality metric with a fit/predict interface.

    ``fit`` ingests the reference frame(s) and precomputes their subband
    entropy fields together with the gaze-dependent sensitivity weights;
    ``predict`` scores distorted frame(s) against them, returning one score
    per frame (lower is better, 0 means identical). ``score_pair`` is the
    one-shot convenience for a single pair and returns a detailed report.

    Parameters
    ----------
    n_subbands : int
        Number of radial subbands.
    block_size : int
        Side of the square blocks modeled as scale-mixture vectors.
    noise_sigma : float
        Standard deviation of the additive observation-noise model.
    bank : {"rectangular", "triangular", "dog"}
        Radial cross-section of the filterbank.
    fov_deg : float
        Full horizontal field of view of the display.
    gaze : "center" or (i, j)
        Default gaze point; may be overridden per call.
    block_anchor : {"corner", "center"}
        Block reference pixel used for eccentricity.
    share_reference_model : bool
        Reuse each reference subband's covariance for the distorted frame
        instead of fitting a separate model.
    corner_bins : {"top-band", "discard"}
        Assignment of DFT corner bins in the rectangular bank.
    ct0, alpha, e2, rounded_decay :
        Contrast sensitivity constants, see :class:`~fedqa.csf.CsfParams`.
    """

    def __init__(
        self,
        n_subbands: int = 12,
        block_size: int = 4,
        noise_sigma: float = 0.1,
        bank: str = "rectangular",
        fov_deg: float = 90.0,
        gaze="center",
        block_anchor: str = "corner",
        share_reference_model: bool = False,
        corner_bins: str = "top-band",
        dog_sigma_scale: float = 0.5,
        ct0: float = 1.0 / 64.0,
        alpha: float = 0.106,
        e2: float = 2.3,
        rounded_decay: bool = False,
    ):
        self.n_subbands = n_subbands
        self.block_size = block_size
        self.noise_sigma = noise_sigma
        self.bank = bank
        self.fov_deg = fov_deg
        self.gaze = gaze
        self.block_anchor = block_anchor
        self.share_reference_model = share_reference_model
        self.corner_bins = corner_bins
        self.dog_sigma_scale = dog_sigma_scale
        self.ct0 = ct0
        self.alpha = alpha
        self.e2 = e2
        self.rounded_decay = rounded_decay

    def _csf_params(self) -> CsfParams:
        return CsfParams(self.ct0, self.alpha, self.e2, self.rounded_decay)

    def config_dict(self) -> dict:
        """Effective configuration, echoed into reports."""
        cfg = dict(self.get_params())
        cfg["gaze"] = list(cfg["gaze"]) if not isinstance(cfg["gaze"], str) else cfg["gaze"]
        return cfg

    def fit(self, X, y=None, gaze=None):
        """Precompute reference entropy fields and sensitivity weights.

        ``X`` is one ``(H, W)`` frame or a ``(T, H, W)`` stack. ``gaze``
        overrides the constructor default; a list of per-frame gaze points is
        accepted for stacks.
        """
        frames = check_frame_stack(X, "reference frames", min_size=self.block_size)
        T, H, W = frames.shape
        self.frame_shape_ = (H, W)
        self.n_frames_ = T
        self.geometry_ = ViewGeometry(W, self.fov_deg)
        self.grid_ = BlockGrid.from_shape((H, W), self.block_size)
        self.spec_ = build_bank(self.bank, self.n_subbands, self.dog_sigma_scale)
        self.band_freqs_ = np.array(
            [
                subband_mean_frequency(self.spec_, b, self.geometry_)
                for b in range(self.n_subbands)
            ]
        )
        self.gazes_ = self._resolve_gazes(gaze, T)

        csf = self._csf_params()
        f_d = self.geometry_.nyquist_freq
        # weights depend only on gaze, so distinct gaze points are computed once
        weight_cache: dict[GazePoint, tuple[np.ndarray, np.ndarray]] = {}
        self.weights_ = []
        self.active_ = []
        for g in self.gazes_:
            if g not in weight_cache:
                ecc = eccentricity_map(self.geometry_, g, self.grid_, self.block_anchor)
                per_band = [
                    sensitivity_weight_map(ecc, f_k, f_d, csf) for f_k in self.band_freqs_
                ]
                weight_cache[g] = (
                    np.stack([w for w, _ in per_band]),
                    np.array([a for _, a in per_band]),
                )
            w, a = weight_cache[g]
            self.weights_.append(w)
            self.active_.append(a)

        self.ref_entropies_ = []
        self.ref_models_ = []
        for t in range(T):
            stack = decompose(frames[t], self.spec_, self.corner_bins)
            models = [
                fit_gsm(blockify(stack[b], self.block_size), self.noise_sigma)
                for b in range(self.n_subbands)
            ]
            self.ref_entropies_.append(
                np.stack([entropy_field_from_model(m) for m in models])
            )
            self.ref_models_.append(models if self.share_reference_model else None)
        return self

    def _resolve_gazes(self, gaze, n_frames: int) -> list[GazePoint]:
        spec = self.gaze if gaze is None else gaze
        if (
            isinstance(spec, (list, tuple))
            and len(spec) > 0
            and isinstance(spec[0], (list, tuple, GazePoint))
        ):
            if len(spec) != n_frames:
                raise ValueError(f"got {len(spec)} gaze points for {n_frames} frames")
            return [resolve_gaze(g, self.frame_shape_) for g in spec]
        return [resolve_gaze(spec, self.frame_shape_)] * n_frames

    def _dist_entropies(self, stack: np.ndarray, t: int) -> np.ndarray:
        fields = []
        for b in range(self.n_subbands):
            if self.share_reference_model:
                fields.append(
                    entropy_field(
                        stack[b],
                        self.block_size,
                        self.noise_sigma,
                        shared_model=self.ref_models_[t][b],
                    )
                )
            else:
                model = fit_gsm(blockify(stack[b], self.block_size), self.noise_sigma)
                fields.append(entropy_field_from_model(model))
        return np.stack(fields)

    def _score_frame(self, dist_frame: np.ndarray, t: int, keep_maps: bool = False):
        stack = decompose(dist_frame, self.spec_, self.corner_bins)
        h_dist = self._dist_entropies(stack, t)
        maps = self.weights_[t] * (self.ref_entropies_[t] - h_dist)
        partials = np.abs(maps).sum(axis=(1, 2))
        return partials, (maps if keep_maps else None)

    def predict(self, X) -> np.ndarray:
        """Score distorted frame(s) against the fitted reference frames.

        A 2-D frame scores against the single fitted frame; a ``(T, H, W)``
        stack must match the fitted frame count. Returns shape ``(T,)``.
        """
        check_is_fitted(self, "ref_entropies_")
        frames = check_frame_stack(X, "distorted frames", min_size=self.block_size)
        if frames.shape[1:] != self.frame_shape_:
            raise ValueError(
                f"distorted frames {frames.shape[1:]} do not match fitted shape {self.frame_shape_}"
            )
        if frames.shape[0] != self.n_frames_:
            raise ValueError(
                f"got {frames.shape[0]} distorted frames for {self.n_frames_} fitted references"
            )
        scores = np.empty(frames.shape[0])
        for t in range(frames.shape[0]):
            partials, _ = self._score_frame(frames[t], t)
            scores[t] = partials.sum()
        return scores

    def score_pair(self, ref, dist, gaze=None, keep_maps: bool = False) -> FedReport:
        """Score a single reference/distorted pair and return a full report."""
        ref, dist = check_frame_pair(ref, dist, min_size=self.block_size)
        self.fit(ref, gaze=gaze)
        partials, maps = self._score_frame(dist, 0, keep_maps=keep_maps)
        return self._report(partials[None], maps)

    def score_video(self, ref_frames, dist_frames, gaze=None) -> FedReport:
        """Average per-frame score over aligned reference/distorted sequences."""
        self.fit(ref_frames, gaze=gaze)
        frames = check_frame_stack(dist_frames, "distorted frames", self.block_size)
        if frames.shape[0] != self.n_frames_:
            raise ValueError(
                f"got {frames.shape[0]} distorted frames for {self.n_frames_} references"
            )
        all_partials = np.stack(
            [self._score_frame(frames[t], t)[0] for t in range(frames.shape[0])]
        )
        return self._report(all_partials, None)

    def _report(self, partials: np.ndarray, maps) -> FedReport:
        mean_partials = partials.mean(axis=0)
        active = np.logical_and.reduce(self.active_) if self.active_ else None
        subbands = [
            SubbandResult(
                k=b + 1,
                center_cpd=float(self.band_freqs_[b]),
                partial=float(mean_partials[b]),
                active=bool(active[b]),
            )
            for b in range(self.n_subbands)
        ]
        return FedReport(
            score=float(mean_partials.sum()),
            subbands=subbands,
            config=self.config_dict(),
            n_frames=partials.shape[0],
            maps=maps,
        )


def fed_score(ref, dist, gaze=None, **config) -> FedReport:
    """Score one frame pair with the given configuration overrides."""
    return FoveatedEntropicDifference(**config).score_pair(ref, dist, gaze=gaze)


def fed_video_score(ref_frames, dist_frames, gaze=None, **config) -> FedReport:
    """Mean per-frame score over an aligned pair of frame sequences."""
    return FoveatedEntropicDifference(**config).score_video(
        ref_frames, dist_frames, gaze=gaze
    )
