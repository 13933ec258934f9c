"""Radial zero-DC frequency-domain filterbanks and subband decomposition.

The digital radial frequency axis ``(0, 0.5]`` cycles/pixel (equivalently
``(0, f_d]`` cycles/degree) is split uniformly into ``n`` bands of half-width
``r_b = 0.5 / (2n)`` centered at ``r_k = (k + 0.5) * 0.5 / n`` for band index
``k = 0..n-1``. Three radial cross-sections are supported:

* ``rectangular`` -- flat annulus, half-open ``[r_k - r_b, r_k + r_b)`` so
  adjacent bands tile the spectrum exactly;
* ``triangular`` -- linear taper to zero at ``r_k +/- r_b``;
* ``dog`` -- difference of two radial Gaussians, peak-normalized. Its spread
  is much wider than the nominal band, which is the point of offering it as
  a contrast case.

Decomposition multiplies the frame's 2-D DFT by each band's gain sampled on
the DFT's radial grid and inverts; the DC bin is always zeroed, so every
subband is zero-mean.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .geometry import ViewGeometry
from .validation import check_frame

__all__ = [
    "FilterBankSpec",
    "build_bank",
    "evaluate_response",
    "bank_masks",
    "decompose",
    "subband_mean_frequency",
    "out_of_band_energy_fraction",
    "RadialFilterBank",
]

KINDS = ("rectangular", "triangular", "dog")

# Largest radial frequency representable on a 2-D DFT grid (corner bins).
_MAX_RADIUS = np.sqrt(0.5)

# Radial quadrature grid density for mean-frequency / energy integrals.
_QUAD_POINTS = 1 << 14


@dataclass(frozen=True)
class FilterBankSpec:
    """Band layout of a radial filterbank.

    Centers, half-width and (for DoG) sigma pairs are derived from
    ``n_subbands``, so the spec is hashable and cheap to pass around.
    """

    kind: str
    n_subbands: int
    dog_sigma_scale: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown filterbank kind {self.kind!r}, expected one of {KINDS}")
        if self.n_subbands < 1:
            raise ValueError(f"n_subbands must be >= 1, got {self.n_subbands}")
        if self.kind == "dog" and not 0.0 < self.dog_sigma_scale < 1.0:
            raise ValueError(
                f"dog_sigma_scale must be in (0, 1), got {self.dog_sigma_scale}"
            )

    @property
    def half_width(self) -> float:
        """Band half-width ``r_b`` in cycles/pixel."""
        return 0.25 / self.n_subbands

    @property
    def centers(self) -> np.ndarray:
        """Band centers ``r_k`` in cycles/pixel, ascending."""
        return (np.arange(self.n_subbands) + 0.5) * (0.5 / self.n_subbands)

    @property
    def edges(self) -> np.ndarray:
        """Band edges, ``n_subbands + 1`` values from 0 to 0.5."""
        return np.linspace(0.0, 0.5, self.n_subbands + 1)

    @property
    def sigma_pairs(self) -> np.ndarray | None:
        """Per-band ``(sigma1, sigma2)`` for the DoG kind, else None.

        ``sigma1,2 = r_k -/+ c * r_b`` with ``c = dog_sigma_scale``; ``c < 1``
        keeps the lowest band non-degenerate (its inner radius is 0).
        """
        if self.kind != "dog":
            return None
        c = self.dog_sigma_scale * self.half_width
        return np.stack([self.centers - c, self.centers + c], axis=1)


def build_bank(kind: str, n_subbands: int, dog_sigma_scale: float = 0.5) -> FilterBankSpec:
    """Uniform radial partition of ``(0, 0.5]`` cycles/pixel into ``n`` bands."""
    return FilterBankSpec(kind, n_subbands, dog_sigma_scale)


def _dog_profile(r: np.ndarray, sigma1: float, sigma2: float) -> np.ndarray:
    a1 = np.exp(-(r * r) / (2.0 * sigma1 * sigma1)) / (sigma1 * np.sqrt(2.0 * np.pi))
    a2 = np.exp(-(r * r) / (2.0 * sigma2 * sigma2)) / (sigma2 * np.sqrt(2.0 * np.pi))
    return a1 - a2


@functools.lru_cache(maxsize=32)
def _dog_peak(sigma1: float, sigma2: float) -> float:
    r = np.linspace(0.0, _MAX_RADIUS, _QUAD_POINTS)
    return float(np.abs(_dog_profile(r, sigma1, sigma2)).max())


def evaluate_response(spec: FilterBankSpec, band: int, radius) -> np.ndarray:
    """Radial gain of band ``band`` (0-based) at ``radius`` cycles/pixel.

    Rectangular gains are 0/1 on the half-open nominal band, triangular gains
    taper linearly to the band edges, and DoG gains follow the normalized
    difference-of-Gaussians (which takes small negative values in its
    surround).
    """
    if not 0 <= band < spec.n_subbands:
        raise IndexError(f"band {band} out of range for {spec.n_subbands} subbands")
    r = np.asarray(radius, dtype=float)
    lo, hi = spec.edges[band], spec.edges[band + 1]
    if spec.kind == "rectangular":
        return ((r >= lo) & (r < hi)).astype(float)
    if spec.kind == "triangular":
        return np.maximum(0.0, 1.0 - np.abs(r - spec.centers[band]) / spec.half_width)
    sigma1, sigma2 = spec.sigma_pairs[band]
    if sigma1 == sigma2:
        return np.zeros_like(r)
    return _dog_profile(r, sigma1, sigma2) / _dog_peak(sigma1, sigma2)


def radial_frequency_grid(shape: tuple[int, int]) -> np.ndarray:
    """Radial digital frequency ``sqrt(fy^2 + fx^2)`` on the 2-D DFT grid."""
    fy = np.fft.fftfreq(shape[0])[:, None]
    fx = np.fft.fftfreq(shape[1])[None, :]
    return np.hypot(fy, fx)


@functools.lru_cache(maxsize=4)
def _cached_masks(spec: FilterBankSpec, shape: tuple[int, int], corner_bins: str) -> np.ndarray:
    r = radial_frequency_grid(shape)
    masks = np.empty((spec.n_subbands,) + shape)
    for band in range(spec.n_subbands):
        masks[band] = evaluate_response(spec, band, r)
    top = spec.n_subbands - 1
    if spec.kind == "rectangular":
        if corner_bins == "top-band":
            # claim Nyquist and corner bins (r >= 0.5) so the bank tiles the
            # whole spectrum and reconstruction is exact
            masks[top][r >= spec.edges[top]] = 1.0
        elif corner_bins == "discard":
            masks[top][(r >= spec.edges[top]) & (r <= 0.5)] = 1.0
        else:
            raise ValueError(
                f"unknown corner_bins mode {corner_bins!r}, expected 'top-band' or 'discard'"
            )
    masks[:, 0, 0] = 0.0
    masks.setflags(write=False)
    return masks


def bank_masks(
    spec: FilterBankSpec, shape: tuple[int, int], corner_bins: str = "top-band"
) -> np.ndarray:
    """Per-band gain masks ``(n, H, W)`` on the DFT grid, DC bin zeroed."""
    return _cached_masks(spec, (int(shape[0]), int(shape[1])), corner_bins)


def decompose(
    frame,
    spec: FilterBankSpec,
    corner_bins: str = "top-band",
    pad: str | None = None,
) -> np.ndarray:
    """Bandpass responses of ``frame`` as an ``(n, H, W)`` real array.

    Frequency-domain multiplication implies circular boundary handling;
    ``pad="mirror"`` symmetrically pads before transforming and crops after,
    for small frames where wraparound would matter.
    """
    frame = check_frame(frame, min_size=2)
    if pad == "mirror":
        ph, pw = frame.shape[0] // 2, frame.shape[1] // 2
        padded = np.pad(frame, ((ph, ph), (pw, pw)), mode="symmetric")
        sub = decompose(padded, spec, corner_bins, pad=None)
        return np.ascontiguousarray(sub[:, ph : ph + frame.shape[0], pw : pw + frame.shape[1]])
    if pad is not None:
        raise ValueError(f"unknown pad mode {pad!r}, expected None or 'mirror'")

    spectrum = np.fft.fft2(frame)
    masks = bank_masks(spec, frame.shape, corner_bins)
    out = np.empty((spec.n_subbands,) + frame.shape)
    rms = float(np.sqrt(np.mean(frame * frame)))
    imag_tol = 1e-10 * max(rms, np.finfo(float).tiny)
    for band in range(spec.n_subbands):
        response = np.fft.ifft2(masks[band] * spectrum)
        residue = float(np.abs(response.imag).max())
        if residue > imag_tol:
            raise ArithmeticError(
                f"non-real subband response (imag residue {residue:.3e} > {imag_tol:.3e})"
            )
        out[band] = response.real
    return out


def _quad_grid() -> np.ndarray:
    return np.linspace(0.0, _MAX_RADIUS, _QUAD_POINTS)


def subband_mean_frequency(spec: FilterBankSpec, band: int, geom: ViewGeometry) -> float:
    """Gain-weighted mean radial frequency of a band in cycles/degree.

    Rectangular and triangular cross-sections are symmetric about the band
    center, so their mean is ``r_k`` exactly; the DoG mean is integrated
    numerically over the representable radii with ``|gain|`` weighting.
    """
    if spec.kind in ("rectangular", "triangular"):
        mean_cpp = float(spec.centers[band])
    else:
        r = _quad_grid()
        w = np.abs(evaluate_response(spec, band, r))
        mean_cpp = float(np.trapezoid(w * r, r) / np.trapezoid(w, r))
    return mean_cpp * geom.pixels_per_degree


def out_of_band_energy_fraction(
    spec: FilterBankSpec, band: int, extent: str = "nominal"
) -> float:
    """Fraction of a band's squared gain that falls outside its band interval.

    ``extent="nominal"`` counts energy outside ``|r - r_k| < r_b`` (0 for the
    rectangular and triangular kinds by construction). ``extent="half-power"``
    counts energy outside the band's effective passband, the part of the
    nominal interval where the squared gain reaches at least half its peak;
    this separates the cross-sections strictly: rectangular stays 0,
    triangular leaks its tapered skirts, DoG barely touches its nominal band
    at half power and leaks almost everything.
    """
    r = _quad_grid()
    g2 = np.square(evaluate_response(spec, band, r))
    total = float(np.trapezoid(g2, r))
    if total == 0.0:
        return 0.0
    lo = spec.centers[band] - spec.half_width
    hi = spec.centers[band] + spec.half_width
    inside = (r >= lo) & (r < hi)
    if extent == "half-power":
        inside &= g2 >= 0.5 * g2.max()
    elif extent != "nominal":
        raise ValueError(f"unknown extent {extent!r}, expected 'nominal' or 'half-power'")
    out = float(np.trapezoid(np.where(inside, 0.0, g2), r))
    return out / total


class RadialFilterBank(TransformerMixin, BaseEstimator):
    """Subband decomposition as a scikit-learn transformer.

    ``fit`` freezes the band layout for the frame shape seen; ``transform``
    maps a ``(H, W)`` frame to its ``(n_subbands, H, W)`` bandpass responses.

    Parameters
    ----------
    kind : {"rectangular", "triangular", "dog"}
    n_subbands : int
    corner_bins : {"top-band", "discard"}
        Whether DFT corner bins (radius > 0.5) are folded into the top band
        (exact reconstruction) or dropped.
    dog_sigma_scale : float
        Sigma offset of the DoG pair as a fraction of the band half-width.
    pad : None or "mirror"
        Optional symmetric padding around small frames before transforming.
    """

    def __init__(
        self,
        kind: str = "rectangular",
        n_subbands: int = 12,
        corner_bins: str = "top-band",
        dog_sigma_scale: float = 0.5,
        pad: str | None = None,
    ):
        self.kind = kind
        self.n_subbands = n_subbands
        self.corner_bins = corner_bins
        self.dog_sigma_scale = dog_sigma_scale
        self.pad = pad

    def fit(self, X, y=None):
        X = check_frame(X, min_size=2)
        self.spec_ = build_bank(self.kind, self.n_subbands, self.dog_sigma_scale)
        self.frame_shape_ = X.shape
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "spec_")
        return decompose(X, self.spec_, self.corner_bins, self.pad)

    def mean_frequencies(self, geom: ViewGeometry) -> np.ndarray:
        """Per-band mean frequency in cycles/degree for a display geometry."""
        check_is_fitted(self, "spec_")
        return np.array(
            [subband_mean_frequency(self.spec_, b, geom) for b in range(self.n_subbands)]
        )
