"""Command-line pipeline: interpolate -> factorize -> collide -> design/sample/serve.

Exit codes: 0 success (collision-free for `collide`), 1 collisions found,
2 method failure (no interpolant, unfactorable curve, ...), 3 input error.
RATLINK_TOL overrides the default numeric tolerance.
"""
from __future__ import annotations

import json
import math
import os
import sys

import click

from . import collision as collision_mod
from . import design as design_mod
from . import mechanism as mech_mod
from .errors import (
    DegenerateConfiguration,
    FewerThanTwoFactorizations,
    NoCubicInterpolant,
    NonGenericRemainder,
    NotAMotionPolynomial,
    NotFactorableOverRationals,
    ParseError,
    RatlinkError,
    RealRootPresent,
    RootFindingFailure,
)
from .interp import interpolate_poses, verify_interpolation
from .mechanism import _decode_number, _encode_number
from .motionpoly import MotionPolynomial, all_factorizations
from .quatcore import DualQuaternion, study_condition

_METHOD_ERRORS = (
    NoCubicInterpolant,
    DegenerateConfiguration,
    RealRootPresent,
    NotFactorableOverRationals,
    NonGenericRemainder,
    FewerThanTwoFactorizations,
    NotAMotionPolynomial,
    RootFindingFailure,
)


def _tol() -> float:
    return float(os.environ.get("RATLINK_TOL", "1e-9"))


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(3, f"cannot read {path}: {exc}")


def _write_text(path, text):
    if path == "-":
        click.echo(text, nl=False)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _round_floats(obj, digits):
    """Round all floats in a JSON-like structure to N significant digits."""
    if isinstance(obj, float):
        return float(f"%.{digits}g" % obj)
    if isinstance(obj, list):
        return [_round_floats(v, digits) for v in obj]
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    return obj


def _curve_to_json(curve: MotionPolynomial) -> list:
    rows = curve.coeff_rows()
    return [[_encode_number(row[k]) for row in rows] for k in range(8)]


def _curve_from_json(cols) -> MotionPolynomial:
    if len(cols) != 8:
        raise ParseError("curve must hold 8 coordinate arrays")
    n = max(len(c) for c in cols)
    rows = [
        [_decode_number(cols[k][p]) if p < len(cols[k]) else 0 for k in range(8)]
        for p in range(n)
    ]
    return MotionPolynomial.from_coeff_rows(rows)


@click.group()
def main():
    """Rational single-loop linkage synthesis and prototyping."""


@main.command("interpolate")
@click.argument("poses_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default="-", help="curve file (default stdout)")
def cmd_interpolate(poses_file, output):
    """Interpolate 2..4 poses from POSES_FILE with a rational motion."""
    doc = _read_json(poses_file)
    poses_raw = doc.get("poses") if isinstance(doc, dict) else doc
    if not isinstance(poses_raw, list) or not 2 <= len(poses_raw) <= 4:
        _fail(3, "poses file must list 2 to 4 poses")
    poses = []
    for idx, row in enumerate(poses_raw):
        if not isinstance(row, list) or len(row) != 8:
            _fail(3, f"pose {idx} must have 8 coordinates")
        coords = [_decode_number(c) for c in row]
        p = DualQuaternion.from_coords(coords)
        cond = float(study_condition(p))
        scale = max(p.max_abs(), 1.0) ** 2
        if abs(cond) > _tol() * scale:
            bad = max(range(8), key=lambda k: abs(float(coords[k])))
            _fail(3, f"pose {idx} violates the Study condition "
                     f"(dot = {cond:.3e}, largest coordinate index {bad})")
        poses.append(p)
    try:
        result = interpolate_poses(poses, tol=_tol())
    except _METHOD_ERRORS as exc:
        _fail(2, f"{type(exc).__name__}: {exc}")
    except RatlinkError as exc:
        _fail(3, f"{type(exc).__name__}: {exc}")
    report = verify_interpolation(result, poses)
    out = {
        "curve": _curve_to_json(result.curve),
        "nodes": [None if t == math.inf else _encode_number(t) for t in result.node_params],
        "max_pose_residual": report.max_pose_residual,
        "study_residual": report.study_residual,
    }
    _write_text(output, json.dumps(out, indent=1, sort_keys=True) + "\n")


@main.command("factorize")
@click.argument("curve_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default="-", help="mechanism file (default stdout)")
@click.option("--scale", default=1.0, show_default=True, help="model-to-export scale")
@click.option("--joint-length", default=41.0, show_default=True, help="joint segment length (mm)")
def cmd_factorize(curve_file, output, scale, joint_length):
    """Factorize a motion curve and close it into a 4R/6R mechanism."""
    doc = _read_json(curve_file)
    cols = doc.get("curve") if isinstance(doc, dict) else doc
    try:
        curve = _curve_from_json(cols)
        curve.norm_polynomial(max(_tol(), 1e-9))
    except (ParseError, NotAMotionPolynomial) as exc:
        _fail(3, f"{type(exc).__name__}: {exc}")
    try:
        facts = all_factorizations(curve)
        mech = mech_mod.assemble(
            facts, curve=curve, scale=scale, joint_segment_length=joint_length
        )
    except _METHOD_ERRORS as exc:
        _fail(2, f"{type(exc).__name__}: {exc}")
    except RatlinkError as exc:
        _fail(2, f"{type(exc).__name__}: {exc}")
    _write_text(output, json.dumps(mech.to_dict(), indent=1, sort_keys=True) + "\n")


@main.command("collide")
@click.argument("mechanism_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default="-", help="report file (default stdout)")
@click.option("--tol", default=1e-6, show_default=True, help="contact tolerance")
@click.option("--workers", default=0, show_default=True, help="parallel workers (0 = serial)")
@click.option("--precision", default=17, show_default=True, help="significant digits in output")
def cmd_collide(mechanism_file, output, tol, workers, precision):
    """Full-cycle self-collision check; exit 0 if collision-free, 1 otherwise."""
    try:
        mech = mech_mod.load(mechanism_file)
    except RatlinkError as exc:
        _fail(3, f"{type(exc).__name__}: {exc}")
    events = collision_mod.collision_check(mech, tol=tol, workers=workers or None)
    report = {
        "collision_free": not events,
        "tol": tol,
        "events": _round_floats([e.to_dict() for e in events], precision),
    }
    _write_text(output, json.dumps(report, indent=1, sort_keys=True) + "\n")
    sys.exit(1 if events else 0)


@main.command("design")
@click.argument("mechanism_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default="-", help="output file (default stdout)")
@click.option("--scale", default=None, type=float, help="export scale (default: stored)")
@click.option("--joint-length", default=None, type=float, help="joint segment length (mm)")
@click.option("--base-offset", default=None, type=float, help="base frame offset (model units)")
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"]), show_default=True)
def cmd_design(mechanism_file, output, scale, joint_length, base_offset, fmt):
    """Export DH rows and connection points."""
    try:
        mech = mech_mod.load(mechanism_file)
        table = design_mod.get_design(
            mech, scale=scale, joint_segment_length=joint_length, base_offset=base_offset
        )
    except RatlinkError as exc:
        _fail(3, f"{type(exc).__name__}: {exc}")
    _write_text(output, design_mod.export_design(table, fmt))


@main.command("sample")
@click.argument("mechanism_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--steps", default=36, show_default=True, help="number of drive angles")
@click.option("-o", "--output", default="-", help="trajectory file (default stdout)")
@click.option("--precision", default=17, show_default=True, help="significant digits in output")
def cmd_sample(mechanism_file, output, steps, precision):
    """Sample tool poses and joint frames over the full drive cycle."""
    if steps < 1:
        _fail(3, "--steps must be at least 1")
    try:
        mech = mech_mod.load(mechanism_file)
    except RatlinkError as exc:
        _fail(3, f"{type(exc).__name__}: {exc}")
    records = []
    for k in range(steps):
        angle = 2.0 * math.pi * (k + 0.5) / steps
        t = mech.drive_angle_to_param(angle)
        pose = mech.pose_at(t)
        frames = mech.joint_frames_at(t)
        records.append(
            {
                "angle": angle,
                "t": t,
                "tool": [float(c) for c in pose.coords()],
                "joints": [
                    {
                        "axis": {"direction": list(ax.direction), "moment": list(ax.moment)},
                        "segment": [list(p0.coords()), list(p1.coords())],
                    }
                    for ax, (p0, p1) in frames
                ],
                "closure_residual": mech.loop_closure_residual(t),
            }
        )
    _write_text(
        output,
        json.dumps({"samples": _round_floats(records, precision)}, indent=1, sort_keys=True) + "\n",
    )


@main.command("serve")
@click.argument("mechanism_file", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--port", default=8639, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def cmd_serve(mechanism_file, port, host):
    """Run the design-studio HTTP service (optionally preloading a mechanism)."""
    import uvicorn

    from .service import create_app

    mech = None
    if mechanism_file:
        try:
            mech = mech_mod.load(mechanism_file)
        except RatlinkError as exc:
            _fail(3, f"{type(exc).__name__}: {exc}")
    uvicorn.run(create_app(preload=mech), host=host, port=port)


if __name__ == "__main__":
    main()
