"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .geometry import GazePoint

__all__ = ["check_frame", "check_frame_stack", "check_frame_pair", "resolve_gaze"]


def check_frame(X, name: str = "frame", min_size: int = 1) -> np.ndarray:
    """Validate a single 2-D luminance frame and return it as float64."""
    X = check_array(X, dtype=np.float64, ensure_2d=True, ensure_all_finite=True)
    if X.shape[0] < min_size or X.shape[1] < min_size:
        raise ValueError(
            f"{name} of shape {X.shape} is smaller than the minimum {min_size}x{min_size}"
        )
    return X


def check_frame_stack(X, name: str = "frames", min_size: int = 1) -> np.ndarray:
    """Validate a frame or a stack of frames; returns a ``(T, H, W)`` array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3:
        raise ValueError(f"{name} must be 2-D or 3-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    if X.shape[1] < min_size or X.shape[2] < min_size:
        raise ValueError(
            f"{name} of shape {X.shape[1:]} is smaller than the minimum {min_size}x{min_size}"
        )
    return X


def check_frame_pair(ref, dist, min_size: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Validate a reference/distorted pair with identical dimensions."""
    ref = check_frame(ref, "reference frame", min_size)
    dist = check_frame(dist, "distorted frame", min_size)
    if ref.shape != dist.shape:
        raise ValueError(
            f"reference {ref.shape} and distorted {dist.shape} dimensions differ"
        )
    return ref, dist


def resolve_gaze(gaze, shape: tuple[int, int]) -> GazePoint:
    """Turn ``"center"``, an ``(i, j)`` pair, or a GazePoint into a GazePoint."""
    if gaze is None or (isinstance(gaze, str) and gaze == "center"):
        return GazePoint.center(shape)
    if isinstance(gaze, GazePoint):
        return gaze.validate(shape)
    if isinstance(gaze, str):
        raise ValueError(f"unknown gaze spec {gaze!r}; expected 'center' or i,j")
    i, j = gaze
    return GazePoint(float(i), float(j)).validate(shape)
