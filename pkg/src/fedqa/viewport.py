"""Gnomonic (rectilinear) viewport extraction from equirectangular frames.

Each output pixel casts a ray through a pinhole camera oriented by yaw and
pitch; the ray's longitude/latitude indexes the 2:1 equirectangular source,
sampled bilinearly with horizontal wraparound and vertical clamping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .validation import check_frame, check_frame_stack

__all__ = [
    "ViewportSpec",
    "default_grid",
    "parse_grid",
    "pixel_rays",
    "extract_viewport",
    "sample_all",
    "ViewportSampler",
]


@dataclass(frozen=True)
class ViewportSpec:
    """Camera orientation and output raster of one viewport."""

    yaw_deg: float
    pitch_deg: float
    fov_deg: float = 90.0
    width: int = 1024
    height: int = 1024

    def __post_init__(self):
        if abs(self.pitch_deg) > 90.0:
            raise ValueError(f"pitch must be within +-90 degrees, got {self.pitch_deg}")
        if not 0.0 < self.fov_deg < 180.0:
            raise ValueError(f"fov_deg must be in (0, 180), got {self.fov_deg}")
        if self.width < 2 or self.height < 2:
            raise ValueError(f"output raster {self.width}x{self.height} too small")


def default_grid(
    n_lon: int = 6,
    n_lat: int = 3,
    fov_deg: float = 90.0,
    size: int = 1024,
) -> list[ViewportSpec]:
    """Viewports spread uniformly in longitude and latitude, lat-major order.

    Longitudes start at 0 with spacing ``360 / n_lon``; latitudes are placed
    symmetrically about the equator with spacing ``90 / ... `` chosen to avoid
    the poles, where the gnomonic projection degenerates (for ``n_lat=3``:
    -45, 0, +45).
    """
    if n_lon < 1 or n_lat < 1:
        raise ValueError("grid must have at least one viewport")
    lons = [360.0 * i / n_lon for i in range(n_lon)]
    lats = [90.0 * (2 * j - (n_lat - 1)) / (n_lat + 1) for j in range(n_lat)]
    return [
        ViewportSpec(lon, lat, fov_deg, size, size) for lat in lats for lon in lons
    ]


def parse_grid(text: str, fov_deg: float = 90.0, size: int = 1024) -> list[ViewportSpec]:
    """Parse a ``"<n_lon>x<n_lat>"`` grid description, e.g. ``"6x3"``."""
    try:
        n_lon, n_lat = (int(part) for part in text.lower().split("x"))
    except ValueError as exc:
        raise ValueError(f"grid must look like '6x3', got {text!r}") from exc
    return default_grid(n_lon, n_lat, fov_deg, size)


def pixel_rays(spec: ViewportSpec) -> np.ndarray:
    """Unit ray directions ``(H, W, 3)`` in world coordinates for each pixel.

    World frame: y up, z through (lon=0, lat=0), x through lon=+90. Pixel
    (0, 0) is the top-left; rows run downward. The focal length puts the
    raster's outer edge at ``fov/2`` from the axis.
    """
    w, h = spec.width, spec.height
    focal = (w / 2.0) / math.tan(math.radians(spec.fov_deg) / 2.0)
    dx = np.arange(w) - (w - 1) / 2.0
    dy = np.arange(h) - (h - 1) / 2.0
    x, y = np.meshgrid(dx, -dy)
    cam = np.stack([x, y, np.full_like(x, focal)], axis=-1)
    cam /= np.linalg.norm(cam, axis=-1, keepdims=True)

    pitch = math.radians(spec.pitch_deg)
    yaw = math.radians(spec.yaw_deg)
    rot_pitch = np.array(
        [
            [1.0, 0.0, 0.0],
            [0.0, math.cos(pitch), math.sin(pitch)],
            [0.0, -math.sin(pitch), math.cos(pitch)],
        ]
    )
    rot_yaw = np.array(
        [
            [math.cos(yaw), 0.0, math.sin(yaw)],
            [0.0, 1.0, 0.0],
            [-math.sin(yaw), 0.0, math.cos(yaw)],
        ]
    )
    return cam @ rot_pitch.T @ rot_yaw.T


def ray_angles(spec: ViewportSpec) -> tuple[np.ndarray, np.ndarray]:
    """Longitude and latitude in degrees of each pixel's ray."""
    rays = pixel_rays(spec)
    lon = np.degrees(np.arctan2(rays[..., 0], rays[..., 2]))
    lat = np.degrees(np.arcsin(np.clip(rays[..., 1], -1.0, 1.0)))
    return lon, lat


def _source_coords(spec: ViewportSpec, eq_shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Fractional equirectangular pixel coordinates sampled by each ray."""
    h, w = eq_shape
    lon, lat = ray_angles(spec)
    col = (lon / 360.0 + 0.5) * w - 0.5
    row = (0.5 - lat / 180.0) * h - 0.5
    return row, col


def _sample_bilinear(frame: np.ndarray, row: np.ndarray, col: np.ndarray) -> np.ndarray:
    h, w = frame.shape
    r0 = np.floor(row).astype(int)
    c0 = np.floor(col).astype(int)
    fr = row - r0
    fc = col - c0
    r1 = np.clip(r0 + 1, 0, h - 1)
    r0 = np.clip(r0, 0, h - 1)
    c1 = (c0 + 1) % w
    c0 = c0 % w
    top = frame[r0, c0] * (1.0 - fc) + frame[r0, c1] * fc
    bot = frame[r1, c0] * (1.0 - fc) + frame[r1, c1] * fc
    return top * (1.0 - fr) + bot * fr


def _sample_bicubic(frame: np.ndarray, row: np.ndarray, col: np.ndarray) -> np.ndarray:
    # pad cyclically in longitude and by edge in latitude, then spline-sample
    pad = 3
    padded = np.pad(frame, ((pad, pad), (0, 0)), mode="edge")
    padded = np.pad(padded, ((0, 0), (pad, pad)), mode="wrap")
    return ndimage.map_coordinates(
        padded, [row + pad, np.mod(col, frame.shape[1]) + pad], order=3, mode="nearest"
    )


def extract_viewport(
    equirect,
    spec: ViewportSpec,
    interpolation: str = "bilinear",
    force: bool = False,
) -> np.ndarray:
    """Render one viewport from a 2:1 equirectangular frame.

    Non-2:1 input is rejected unless ``force`` is set (the mapping still
    treats the full width as 360 degrees and the full height as 180).
    """
    equirect = check_frame(equirect, "equirectangular frame", min_size=2)
    h, w = equirect.shape
    if w != 2 * h and not force:
        raise ValueError(
            f"expected a 2:1 equirectangular frame, got {h}x{w} (use force to override)"
        )
    row, col = _source_coords(spec, equirect.shape)
    if interpolation == "bilinear":
        return _sample_bilinear(equirect, row, col)
    if interpolation == "bicubic":
        return _sample_bicubic(equirect, row, col)
    raise ValueError(
        f"unknown interpolation {interpolation!r}, expected 'bilinear' or 'bicubic'"
    )


def sample_all(
    frames,
    grid: list[ViewportSpec],
    interpolation: str = "bilinear",
    force: bool = False,
) -> np.ndarray:
    """Extract every viewport of every frame; returns ``(T, V, h, w)``."""
    frames = check_frame_stack(frames, "equirectangular frames", min_size=2)
    out = [
        [extract_viewport(f, spec, interpolation, force) for spec in grid]
        for f in frames
    ]
    return np.asarray(out)


class ViewportSampler(TransformerMixin, BaseEstimator):
    """Viewport extraction as a scikit-learn transformer.

    ``transform`` maps an equirectangular frame to a ``(V, size, size)``
    stack of viewports (or ``(T, V, size, size)`` for a frame stack). The
    sampling maps are resolved at fit time for the input shape.
    """

    def __init__(
        self,
        grid: str = "6x3",
        fov_deg: float = 90.0,
        size: int = 1024,
        interpolation: str = "bilinear",
        force: bool = False,
    ):
        self.grid = grid
        self.fov_deg = fov_deg
        self.size = size
        self.interpolation = interpolation
        self.force = force

    def _specs(self) -> list[ViewportSpec]:
        if isinstance(self.grid, str):
            return parse_grid(self.grid, self.fov_deg, self.size)
        return list(self.grid)

    def fit(self, X, y=None):
        frames = check_frame_stack(X, "equirectangular frames", min_size=2)
        h, w = frames.shape[1:]
        if w != 2 * h and not self.force:
            raise ValueError(
                f"expected 2:1 equirectangular frames, got {h}x{w} (set force=True to override)"
            )
        self.specs_ = self._specs()
        self.coords_ = [_source_coords(spec, (h, w)) for spec in self.specs_]
        self.input_shape_ = (h, w)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "specs_")
        single = np.asarray(X).ndim == 2
        frames = check_frame_stack(X, "equirectangular frames", min_size=2)
        if frames.shape[1:] != self.input_shape_:
            raise ValueError(
                f"frames {frames.shape[1:]} do not match fitted shape {self.input_shape_}"
            )
        sampler = _sample_bilinear if self.interpolation == "bilinear" else _sample_bicubic
        out = np.stack(
            [
                np.stack([sampler(f, row, col) for row, col in self.coords_])
                for f in frames
            ]
        )
        return out[0] if single else out
