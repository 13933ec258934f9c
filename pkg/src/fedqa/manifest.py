"""Database evaluation: score manifest entries and correlate against DMOS.

The manifest is JSON-lines, one object per distorted video:

    {"ref_path": ..., "dist_path": ..., "dmos": 42.0,
     "gaze": "center" | [[i, j], ...], "frames": [start, stop], "id": ...}

2:1 inputs are re-projected into viewports before scoring (the gaze is then
the viewport center); other inputs are scored directly.
"""

from __future__ import annotations

import itertools
import json
import os

import numpy as np
from joblib import Parallel, delayed

from .evaluation import MetricPerformance, evaluate_scores
from .fed import FoveatedEntropicDifference
from .frameio import iter_frames
from .viewport import extract_viewport, parse_grid

__all__ = ["read_manifest", "score_entry", "evaluate_manifest"]


def read_manifest(path) -> list[dict]:
    entries = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({exc})")
            for key in ("ref_path", "dist_path", "dmos"):
                if key not in entry:
                    raise ValueError(f"{path}:{lineno}: missing required key {key!r}")
            entry.setdefault("id", os.path.basename(str(entry["dist_path"])))
            entries.append(entry)
    if not entries:
        raise ValueError(f"{path}: empty manifest")
    return entries


def _frame_range(entry: dict) -> tuple[int, int | None]:
    frames = entry.get("frames")
    if frames is None:
        return 0, None
    start, stop = frames
    return int(start), (None if stop is None else int(stop))


def score_entry(
    entry: dict,
    metric_params: dict | None = None,
    grid: str = "6x3",
    fov_deg: float = 90.0,
    size: int = 1024,
    use_viewports: bool | None = None,
    io_kwargs: dict | None = None,
) -> float:
    """Mean per-frame (and per-viewport, for 2:1 input) score of one entry."""
    metric = FoveatedEntropicDifference(**(metric_params or {}))
    io_kwargs = io_kwargs or {}
    start, stop = _frame_range(entry)
    gaze = entry.get("gaze", "center")

    ref_iter = itertools.islice(iter_frames(entry["ref_path"], **io_kwargs), start, stop)
    dist_iter = itertools.islice(iter_frames(entry["dist_path"], **io_kwargs), start, stop)

    specs = parse_grid(grid, fov_deg, size)
    scores = []
    per_frame_gaze = isinstance(gaze, (list, tuple)) and gaze and not isinstance(gaze[0], (int, float))
    for t, (ref, dist) in enumerate(zip(ref_iter, dist_iter, strict=True)):
        if ref.shape != dist.shape:
            raise ValueError(
                f"{entry['id']}: frame {t} dims differ ({ref.shape} vs {dist.shape})"
            )
        equirect = ref.shape[1] == 2 * ref.shape[0]
        if use_viewports if use_viewports is not None else equirect:
            for spec in specs:
                ref_v = extract_viewport(ref, spec, force=True)
                dist_v = extract_viewport(dist, spec, force=True)
                scores.append(metric.score_pair(ref_v, dist_v).score)
        else:
            frame_gaze = gaze[t] if per_frame_gaze else gaze
            scores.append(metric.score_pair(ref, dist, gaze=frame_gaze).score)
    if not scores:
        raise ValueError(f"{entry['id']}: no frames scored")
    return float(np.mean(scores))


def evaluate_manifest(
    path,
    metric_params: dict | None = None,
    grid: str = "6x3",
    fov_deg: float = 90.0,
    size: int = 1024,
    use_viewports: bool | None = None,
    jobs: int = 1,
    io_kwargs: dict | None = None,
) -> tuple[list[dict], MetricPerformance | None]:
    """Score every manifest entry and correlate the scores with DMOS.

    Returns the per-entry rows (id, score, dmos) in manifest order plus the
    correlation summary (None when there are fewer than 4 entries).
    """
    entries = read_manifest(path)
    worker = delayed(score_entry)
    scores = Parallel(n_jobs=jobs)(
        worker(e, metric_params, grid, fov_deg, size, use_viewports, io_kwargs)
        for e in entries
    )
    rows = [
        {"id": e["id"], "ref_path": e["ref_path"], "dist_path": e["dist_path"],
         "dmos": float(e["dmos"]), "score": s}
        for e, s in zip(entries, scores)
    ]
    performance = None
    if len(rows) >= 4 and len({r["score"] for r in rows}) > 1:
        performance = evaluate_scores(
            [r["score"] for r in rows], [r["dmos"] for r in rows]
        )
    return rows, performance
