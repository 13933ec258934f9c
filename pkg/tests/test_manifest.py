import json

import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from fedqa.frameio import store_frame
from fedqa.manifest import evaluate_manifest, read_manifest, score_entry


def write_manifest(tmp_path, entries):
    path = tmp_path / "manifest.jsonl"
    path.write_text("\n".join(json.dumps(e) for e in entries) + "\n")
    return path


def test_read_manifest_validation(tmp_path):
    path = write_manifest(
        tmp_path, [{"ref_path": "a", "dist_path": "b", "dmos": 1.0}]
    )
    entries = read_manifest(path)
    assert entries[0]["id"] == "b"
    missing = tmp_path / "missing.jsonl"
    missing.write_text(json.dumps({"ref_path": "a"}) + "\n")
    with pytest.raises(ValueError):
        read_manifest(missing)
    empty = tmp_path / "empty.jsonl"
    empty.write_text("\n")
    with pytest.raises(ValueError):
        read_manifest(empty)


def test_score_entry_direct_frames(tmp_path, scene):
    ref = scene[:96, :96]
    dist = gaussian_filter(ref, 2.0)
    ref_path, dist_path = tmp_path / "r.pgm", tmp_path / "d.pgm"
    store_frame(ref, ref_path)
    store_frame(dist, dist_path)
    entry = {"ref_path": str(ref_path), "dist_path": str(dist_path), "dmos": 1.0,
             "id": "x"}
    score = score_entry(entry, metric_params={"n_subbands": 6})
    assert score > 0.0


def test_score_entry_equirect_uses_viewports(tmp_path):
    rng = np.random.default_rng(0)
    ref = rng.uniform(0, 255, (128, 256))
    dist = np.clip(ref + rng.normal(0, 8, ref.shape), 0, 255)
    ref_path, dist_path = tmp_path / "r.pgm", tmp_path / "d.pgm"
    store_frame(ref, ref_path)
    store_frame(dist, dist_path)
    entry = {"ref_path": str(ref_path), "dist_path": str(dist_path), "dmos": 2.0,
             "id": "pano"}
    score = score_entry(entry, metric_params={"n_subbands": 4}, grid="2x1", size=48)
    assert score > 0.0
    direct = score_entry(
        entry, metric_params={"n_subbands": 4}, grid="2x1", size=48,
        use_viewports=False,
    )
    assert direct != score


def test_score_entry_frame_range_and_mismatch(tmp_path):
    rng = np.random.default_rng(1)
    w, h = 32, 16
    frames = rng.integers(0, 256, (4, h, w)).astype(np.uint8)
    ref_path = tmp_path / "ref.yuv"
    dist_path = tmp_path / "dist.yuv"
    chroma = bytes(w * h // 2)
    ref_path.write_bytes(b"".join(f.tobytes() + chroma for f in frames))
    dist_path.write_bytes(b"".join(f.tobytes() + chroma for f in frames[:3]))
    for p in (ref_path, dist_path):
        (tmp_path / (p.name + ".json")).write_text(
            json.dumps({"width": w, "height": h, "format": "yuv420"})
        )
    entry = {"ref_path": str(ref_path), "dist_path": str(dist_path), "dmos": 0.0,
             "id": "clip", "frames": [0, 3]}
    score = score_entry(entry, metric_params={"n_subbands": 2, "block_size": 2},
                        use_viewports=False)
    assert score == 0.0
    entry_all = dict(entry)
    entry_all.pop("frames")
    with pytest.raises(ValueError):
        score_entry(entry_all, metric_params={"n_subbands": 2, "block_size": 2},
                    use_viewports=False)


def test_evaluate_manifest_end_to_end(tmp_path, scene):
    ref = scene[:96, :96]
    entries = []
    for i, sigma in enumerate((0.8, 1.6, 3.0, 5.0, 7.0, 9.0)):
        ref_path = tmp_path / f"ref{i}.pgm"
        dist_path = tmp_path / f"dist{i}.pgm"
        store_frame(ref, ref_path)
        store_frame(gaussian_filter(ref, sigma), dist_path)
        entries.append({"ref_path": str(ref_path), "dist_path": str(dist_path),
                        "dmos": 12.0 * sigma, "id": f"v{i}"})
    path = write_manifest(tmp_path, entries)
    rows, perf = evaluate_manifest(path, metric_params={"n_subbands": 6})
    assert [r["id"] for r in rows] == [f"v{i}" for i in range(6)]
    assert perf is not None
    assert perf.srocc == pytest.approx(1.0)
    # parallel run gives identical rows in identical order
    rows2, _ = evaluate_manifest(path, metric_params={"n_subbands": 6}, jobs=2)
    assert rows == rows2


def test_evaluate_manifest_too_few_entries(tmp_path, scene):
    ref = scene[:64, :64]
    ref_path = tmp_path / "r.pgm"
    dist_path = tmp_path / "d.pgm"
    store_frame(ref, ref_path)
    store_frame(gaussian_filter(ref, 2.0), dist_path)
    path = write_manifest(
        tmp_path,
        [{"ref_path": str(ref_path), "dist_path": str(dist_path), "dmos": 1.0}],
    )
    rows, perf = evaluate_manifest(path, metric_params={"n_subbands": 4})
    assert len(rows) == 1
    assert perf is None
