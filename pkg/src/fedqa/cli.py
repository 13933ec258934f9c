"""Command-line interface: scoring, viewport extraction, bank inspection, eval.

Exit codes: 0 success, 2 usage or input error, 3 numeric failure.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys

import click
import numpy as np
from joblib import Parallel, delayed

from .evaluation import logistic
from .fed import FoveatedEntropicDifference
from .filterbank import (
    build_bank,
    evaluate_response,
    out_of_band_energy_fraction,
    subband_mean_frequency,
)
from .frameio import iter_frames, store_frame
from .geometry import ViewGeometry
from .manifest import evaluate_manifest
from .viewport import extract_viewport, parse_grid

_EXIT_INPUT = 2
_EXIT_NUMERIC = 3


def _fail(message: str, code: int = _EXIT_INPUT):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_gaze(text: str):
    if text == "center":
        return "center"
    try:
        i, j = (float(p) for p in text.split(","))
    except ValueError:
        raise click.UsageError(f"--gaze must be 'center' or 'i,j', got {text!r}")
    return (i, j)


def _jobs_option(value: int | None) -> int:
    if value is not None:
        return value
    return int(os.environ.get("FED_JOBS", "1"))


_IO_OPTIONS = [
    click.option("--width", type=int, default=None, help="Raw input width."),
    click.option("--height", type=int, default=None, help="Raw input height."),
    click.option(
        "--pixel-format",
        type=str,
        default=None,
        help="Raw input pixel format (yuv420, yuv444, gray).",
    ),
]


def _with_options(options):
    def wrap(func):
        for option in reversed(options):
            func = option(func)
        return func

    return wrap


@click.group()
@click.version_option(package_name="fedqa")
def main():
    """Foveated entropic differencing quality metric."""


@main.command()
@click.argument("ref", type=click.Path(exists=True))
@click.argument("dist", type=click.Path(exists=True))
@click.option("--gaze", default="center", show_default=True, help="'center' or 'i,j' pixels.")
@click.option("--fov", default=90.0, show_default=True, help="Horizontal field of view, degrees.")
@click.option(
    "--subbands",
    default="12",
    show_default=True,
    help="Subband count; a comma-separated list runs an ablation sweep.",
)
@click.option("--block", default=4, show_default=True, help="Block size in pixels.")
@click.option("--sigma-w", default=0.1, show_default=True, help="Neural noise sigma.")
@click.option(
    "--bank",
    type=click.Choice(["rectangular", "triangular", "dog"]),
    default="rectangular",
    show_default=True,
)
@click.option("--report", "report_format", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write the report here instead of stdout.")
@click.option("--jobs", type=int, default=None, help="Worker count (default: FED_JOBS or 1).")
@_with_options(_IO_OPTIONS)
def score(ref, dist, gaze, fov, subbands, block, sigma_w, bank, report_format, out, jobs, width, height, pixel_format):
    """Score a distorted image/video against its reference."""
    try:
        counts = [int(part) for part in str(subbands).split(",")]
    except ValueError:
        raise click.UsageError(f"--subbands must be an integer list, got {subbands!r}")
    gaze_spec = _parse_gaze(gaze)
    io_kwargs = dict(width=width, height=height, pixel_format=pixel_format)
    jobs = _jobs_option(jobs)

    try:
        ref_frames = np.stack(list(iter_frames(ref, **io_kwargs)))
        dist_frames = np.stack(list(iter_frames(dist, **io_kwargs)))
        if ref_frames.shape != dist_frames.shape:
            raise ValueError(
                f"reference {ref_frames.shape} and distorted {dist_frames.shape} differ"
            )

        def one(n):
            metric = FoveatedEntropicDifference(
                n_subbands=n, block_size=block, noise_sigma=sigma_w, bank=bank, fov_deg=fov
            )
            return metric.score_video(ref_frames, dist_frames, gaze=gaze_spec)

        if jobs > 1 and len(counts) > 1:
            reports = Parallel(n_jobs=jobs)(delayed(one)(n) for n in counts)
        else:
            reports = [one(n) for n in counts]
    except (ValueError, OSError, ArithmeticError) as exc:
        _fail(str(exc))

    if report_format == "json":
        payload = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
        text = json.dumps(payload, indent=2, sort_keys=True)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n_subbands", "k", "f_k_cpd", "partial", "active", "score"])
        for n, rep in zip(counts, reports):
            for s in rep.subbands:
                writer.writerow([n, s.k, repr(s.center_cpd), repr(s.partial), int(s.active), repr(rep.score)])
        text = buf.getvalue()
    if out:
        with open(out, "w") as fh:
            fh.write(text + ("\n" if not text.endswith("\n") else ""))
    else:
        click.echo(text)


@main.command()
@click.argument("input_path", type=click.Path(exists=True))
@click.argument("outdir", type=click.Path())
@click.option("--grid", default="6x3", show_default=True, help="Longitude x latitude viewport grid.")
@click.option("--fov", default=90.0, show_default=True)
@click.option("--size", default=1024, show_default=True, help="Viewport width and height.")
@click.option("--frames", default=None, help="Frame range 'start:stop'.")
@click.option("--force", is_flag=True, help="Accept non-2:1 input.")
@click.option("--bicubic", is_flag=True, help="Use bicubic instead of bilinear sampling.")
@click.option("--jobs", type=int, default=None)
@_with_options(_IO_OPTIONS)
def viewports(input_path, outdir, grid, fov, size, frames, force, bicubic, jobs, width, height, pixel_format):
    """Extract gnomonic viewports from an equirectangular video or image."""
    jobs = _jobs_option(jobs)
    interpolation = "bicubic" if bicubic else "bilinear"
    try:
        specs = parse_grid(grid, fov, size)
        start, stop = 0, None
        if frames:
            parts = frames.split(":")
            start = int(parts[0]) if parts[0] else 0
            stop = int(parts[1]) if len(parts) > 1 and parts[1] else None
        os.makedirs(outdir, exist_ok=True)
        for v in range(len(specs)):
            os.makedirs(os.path.join(outdir, f"view_{v:02d}"), exist_ok=True)

        io_kwargs = dict(width=width, height=height, pixel_format=pixel_format)
        n_frames = 0
        for t, frame in enumerate(iter_frames(input_path, **io_kwargs)):
            if t < start:
                continue
            if stop is not None and t >= stop:
                break

            def render(v, spec, frame=frame, t=t):
                view = extract_viewport(frame, spec, interpolation, force)
                store_frame(view, os.path.join(outdir, f"view_{v:02d}", f"frame_{t:06d}.pgm"))

            if jobs > 1:
                Parallel(n_jobs=jobs)(delayed(render)(v, s) for v, s in enumerate(specs))
            else:
                for v, s in enumerate(specs):
                    render(v, s)
            n_frames += 1
        if n_frames == 0:
            raise ValueError(f"{input_path}: no frames in range")
        manifest = {
            "grid": grid,
            "fov_deg": fov,
            "size": size,
            "n_frames": n_frames,
            "interpolation": interpolation,
            "viewports": [
                {"index": v, "yaw_deg": s.yaw_deg, "pitch_deg": s.pitch_deg}
                for v, s in enumerate(specs)
            ],
        }
        with open(os.path.join(outdir, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except (ValueError, OSError, ArithmeticError) as exc:
        _fail(str(exc))
    click.echo(f"wrote {n_frames} frames x {len(specs)} viewports to {outdir}")


@main.command("eval")
@click.argument("manifest_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Per-entry CSV report.")
@click.option("--summary", "summary_path", type=click.Path(), default=None, help="JSON correlation summary.")
@click.option("--grid", default="6x3", show_default=True)
@click.option("--fov", default=90.0, show_default=True)
@click.option("--size", default=1024, show_default=True)
@click.option("--subbands", default=12, show_default=True)
@click.option("--block", default=4, show_default=True)
@click.option("--sigma-w", default=0.1, show_default=True)
@click.option("--bank", type=click.Choice(["rectangular", "triangular", "dog"]), default="rectangular", show_default=True)
@click.option("--no-viewports", is_flag=True, help="Score frames directly even if 2:1.")
@click.option("--jobs", type=int, default=None)
def eval_cmd(manifest_path, out, summary_path, grid, fov, size, subbands, block, sigma_w, bank, no_viewports, jobs):
    """Score a JSONL manifest and correlate with DMOS."""
    jobs = _jobs_option(jobs)
    params = dict(n_subbands=subbands, block_size=block, noise_sigma=sigma_w, bank=bank, fov_deg=fov)
    try:
        rows, performance = evaluate_manifest(
            manifest_path,
            metric_params=params,
            grid=grid,
            fov_deg=fov,
            size=size,
            use_viewports=False if no_viewports else None,
            jobs=jobs,
        )
    except (ValueError, OSError, ArithmeticError) as exc:
        _fail(str(exc))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "ref_path", "dist_path", "dmos", "score"])
    for r in rows:
        writer.writerow([r["id"], r["ref_path"], r["dist_path"], repr(r["dmos"]), repr(r["score"])])
    if out:
        with open(out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        click.echo(buf.getvalue(), nl=False)

    if performance is not None:
        summary = performance.to_dict()
        summary["config"] = dict(params, grid=grid, size=size)
        text = json.dumps(summary, indent=2, sort_keys=True)
        if summary_path:
            with open(summary_path, "w") as fh:
                fh.write(text + "\n")
        else:
            click.echo(text)
        if not performance.fit.converged:
            _fail("logistic fit did not converge", _EXIT_NUMERIC)
    else:
        click.echo("note: fewer than 4 usable entries; correlations skipped", err=True)


@main.command("bank-inspect")
@click.option("--bank", type=click.Choice(["rectangular", "triangular", "dog"]), default="rectangular", show_default=True)
@click.option("--subbands", default=12, show_default=True)
@click.option("--fov", default=90.0, show_default=True)
@click.option("--frame-width", default=1024, show_default=True, help="Frame width for cycles/degree conversion.")
@click.option("--out", type=click.Path(), default=None, help="Band summary CSV (default stdout).")
@click.option("--profiles", type=click.Path(), default=None, help="Also write radial gain profiles here.")
@click.option("--samples", default=512, show_default=True, help="Radial samples per profile.")
def bank_inspect(bank, subbands, fov, frame_width, out, profiles, samples):
    """Emit per-band center/width/mean-frequency and gain profiles as CSV."""
    try:
        spec = build_bank(bank, subbands)
        geom = ViewGeometry(frame_width, fov)
    except ValueError as exc:
        _fail(str(exc))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["k", "center_cpp", "half_width_cpp", "mean_freq_cpd", "oob_nominal", "oob_half_power"]
    )
    for band in range(subbands):
        writer.writerow(
            [
                band + 1,
                repr(float(spec.centers[band])),
                repr(spec.half_width),
                repr(subband_mean_frequency(spec, band, geom)),
                repr(out_of_band_energy_fraction(spec, band, "nominal")),
                repr(out_of_band_energy_fraction(spec, band, "half-power")),
            ]
        )
    if out:
        with open(out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        click.echo(buf.getvalue(), nl=False)

    if profiles:
        radii = np.linspace(0.0, 0.5, samples)
        with open(profiles, "w") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["k", "r_cpp", "gain"])
            for band in range(subbands):
                gains = evaluate_response(spec, band, radii)
                for r, g in zip(radii, gains):
                    writer.writerow([band + 1, repr(float(r)), repr(float(g))])


if __name__ == "__main__":
    main()
