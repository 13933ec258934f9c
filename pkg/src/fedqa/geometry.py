"""Viewing geometry: pixel space, visual degrees, and per-block eccentricity.

All angular quantities are in degrees of visual angle. The viewing distance
``v`` is unitless (measured in image widths), so the only physical inputs are
the frame width in pixels and the horizontal field of view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ViewGeometry",
    "GazePoint",
    "BlockGrid",
    "pixels_per_degree",
    "eccentricity",
    "eccentricity_map",
]


@dataclass(frozen=True)
class ViewGeometry:
    """Display geometry of a viewed frame.

    Parameters
    ----------
    image_width_px : int
        Frame width ``M`` in pixels.
    fov_deg : float
        Full horizontal field of view in degrees, in ``(0, 180)``.

    Attributes
    ----------
    viewing_distance : float
        Distance ``v = cot(fov/2) / 2`` from the eye to the image plane,
        measured in image widths.
    pixels_per_degree : float
        Display resolution ``d = pi * M * v / 180`` in pixels per degree.
    nyquist_freq : float
        Display Nyquist frequency ``f_d = d / 2`` in cycles per degree.
    """

    image_width_px: int
    fov_deg: float = 90.0

    def __post_init__(self):
        if self.image_width_px < 1:
            raise ValueError(f"image_width_px must be >= 1, got {self.image_width_px}")
        if not 0.0 < self.fov_deg < 180.0:
            raise ValueError(f"fov_deg must be in (0, 180), got {self.fov_deg}")

    @property
    def viewing_distance(self) -> float:
        return 0.5 / math.tan(math.radians(self.fov_deg) / 2.0)

    @property
    def pixels_per_degree(self) -> float:
        return math.pi * self.image_width_px * self.viewing_distance / 180.0

    @property
    def nyquist_freq(self) -> float:
        return self.pixels_per_degree / 2.0


@dataclass(frozen=True)
class GazePoint:
    """Continuous pixel coordinates ``(row, col)`` of the gaze center."""

    row: float
    col: float

    @classmethod
    def center(cls, shape: tuple[int, int]) -> "GazePoint":
        """Gaze at the midpoint of the pixel grid of a ``(H, W)`` frame."""
        h, w = shape[0], shape[1]
        return cls((h - 1) / 2.0, (w - 1) / 2.0)

    def validate(self, shape: tuple[int, int]) -> "GazePoint":
        h, w = shape[0], shape[1]
        if not (0 <= self.row < h and 0 <= self.col < w):
            raise ValueError(
                f"gaze ({self.row}, {self.col}) outside frame of shape {h}x{w}"
            )
        return self


@dataclass(frozen=True)
class BlockGrid:
    """Grid of non-overlapping ``block_size`` x ``block_size`` tiles.

    Trailing rows/columns that do not fill a whole block are dropped.
    """

    block_size: int
    rows: int
    cols: int

    def __post_init__(self):
        if self.block_size < 2:
            raise ValueError(f"block_size must be >= 2, got {self.block_size}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"empty block grid {self.rows}x{self.cols}")

    @classmethod
    def from_shape(cls, shape: tuple[int, int], block_size: int) -> "BlockGrid":
        return cls(block_size, shape[0] // block_size, shape[1] // block_size)


def pixels_per_degree(geom: ViewGeometry) -> float:
    """Display resolution in pixels per degree of visual angle."""
    return geom.pixels_per_degree


def _block_anchor_offset(block_size: int, anchor: str) -> float:
    if anchor == "corner":
        return 0.0
    if anchor == "center":
        return block_size / 2.0
    raise ValueError(f"unknown block anchor {anchor!r}, expected 'corner' or 'center'")


def eccentricity(
    geom: ViewGeometry,
    gaze: GazePoint,
    p: int,
    q: int,
    block_size: int,
    anchor: str = "corner",
) -> float:
    """Eccentricity in degrees of block ``(p, q)`` relative to the gaze point.

    The block's reference pixel is its top-left corner ``(b*p, b*q)`` by
    default, or its center when ``anchor="center"``. The angle is
    ``atan(pixel_distance / (v * M))``.
    """
    off = _block_anchor_offset(block_size, anchor)
    di = block_size * p + off - gaze.row
    dj = block_size * q + off - gaze.col
    dist = math.hypot(di, dj)
    return math.degrees(math.atan(dist / (geom.viewing_distance * geom.image_width_px)))


def eccentricity_map(
    geom: ViewGeometry,
    gaze: GazePoint,
    grid: BlockGrid,
    anchor: str = "corner",
) -> np.ndarray:
    """Per-block eccentricity in degrees as a ``(rows, cols)`` array."""
    off = _block_anchor_offset(grid.block_size, anchor)
    di = grid.block_size * np.arange(grid.rows)[:, None] + off - gaze.row
    dj = grid.block_size * np.arange(grid.cols)[None, :] + off - gaze.col
    dist = np.hypot(di, dj)
    return np.degrees(
        np.arctan(dist / (geom.viewing_distance * geom.image_width_px))
    )
