"""Design-parameter extraction: DH rows and connection points for CAD export.

The frame walk follows the joint loop: frame i sits on axis i with origin at
the foot of the common perpendicular from axis i-1 (for the base frame: from
the last axis, optionally shifted by `base_offset` along axis 0).  Row i
relates axis i to axis i+1:

    a_i     distance between the axes,
    alpha_i signed angle from direction i to direction i+1 about the
            perpendicular oriented from the foot on axis i to the foot on
            axis i+1,
    d_i     signed offset along axis i from the frame origin to the foot of
            the outgoing perpendicular.

Joint angles are not emitted; every joint is full-cycle.  Lengths scale by
`scale` (export millimetres), angles are degrees in (-180, 180].
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CoincidentAxes, DegenerateSegment
from .mechanism import RationalMechanism, common_perpendicular
from .quatcore import PluckerLine

_PARALLEL_TOL = 1e-12


@dataclass(frozen=True)
class DHRow:
    i: int
    d: float
    a: float
    alpha: float          # degrees
    cp0: float            # attachment of link i on axis i
    cp1: float            # attachment of link i on axis i+1


@dataclass(frozen=True)
class DHFrame:
    origin: np.ndarray
    z: np.ndarray
    x: np.ndarray


@dataclass(frozen=True)
class DesignTable:
    rows: tuple[DHRow, ...]
    scale: float
    joint_segment_length: float
    frames: tuple[DHFrame, ...]
    mapped: bool = False  # joint spans differ from joint_segment_length


def dh_between_axes(
    l0: PluckerLine,
    l1: PluckerLine,
    prev_origin: np.ndarray | None = None,
) -> tuple[float, float, float, DHFrame]:
    """(d, a, alpha, next_frame) between two joint axes.

    `prev_origin` is the current frame origin on l0 (defaults to the foot of
    the perpendicular, making d = 0).  Parallel axes route the perpendicular
    through `prev_origin`; intersecting axes take the direction cross product
    as the perpendicular direction.
    """
    g0 = np.asarray(l0.to_float().direction)
    g1 = np.asarray(l1.to_float().direction)
    cr = np.cross(g0, g1)
    n2 = float(cr @ cr)
    if n2 < _PARALLEL_TOL:
        # parallel or identical
        p1 = np.asarray(l1.to_float().anchor().coords())
        if prev_origin is None:
            prev_origin = np.asarray(l0.to_float().anchor().coords())
        w = p1 - prev_origin
        perp = w - (w @ g0) * g0
        dist = float(np.linalg.norm(perp))
        if dist < 1e-12:
            raise CoincidentAxes("axes coincide; no unique common perpendicular")
        x = perp / dist
        f0, f1 = prev_origin, prev_origin + perp
        d = 0.0
    else:
        f0, f1, dist = common_perpendicular(l0, l1)
        if prev_origin is None:
            prev_origin = f0
        if dist > 1e-12:
            x = (f1 - f0) / dist
        else:
            x = cr / math.sqrt(n2)
        d = float((f0 - prev_origin) @ g0)
    # twist about the perpendicular oriented from axis i to axis i+1
    alpha = math.degrees(math.atan2(float(np.cross(g0, g1) @ x), float(g0 @ g1)))
    if alpha <= -180.0:
        alpha += 360.0
    return d, dist, alpha, DHFrame(origin=f1, z=g1, x=x)


def get_design(
    m: RationalMechanism,
    scale: float | None = None,
    joint_segment_length: float | None = None,
    base_offset: float | None = None,
) -> DesignTable:
    """DH rows plus connection-point parameters for the whole loop.

    `base_offset` places the base frame origin along axis 0 relative to the
    foot of the closing perpendicular (it contributes to d_0); it defaults to
    the offset stored on the mechanism.
    """
    if base_offset is None:
        base_offset = m.base_offset
    scale = float(m.scale if scale is None else scale)
    if scale <= 0:
        raise ValueError("scale must be positive")
    jsl = float(m.joint_segment_length if joint_segment_length is None else joint_segment_length)
    n = m.n_joints
    axes = [g.axis for g in m.joints]
    dirs = [np.asarray(g.axis.direction) for g in m.joints]

    # frame origins: foot of the incoming perpendicular on each axis
    origins = []
    for i, geo in enumerate(m.joints):
        origins.append(np.asarray(geo.foot_prev))
    origins[0] = origins[0] - base_offset * dirs[0]

    rows = []
    frames = []
    mapped = False
    for i in range(n):
        j = (i + 1) % n
        d, a, alpha, frame = dh_between_axes(axes[i], axes[j], origins[i])
        if a < 1e-12 and abs(alpha) < 1e-9:
            raise CoincidentAxes(f"axes {i} and {j} coincide")
        frames.append(frame)
        # attachments in frame coordinates (signed along each axis)
        geo_i, geo_j = m.joints[i], m.joints[j]
        attach_out = geo_i.point_at(m.segments.cp_out[i])
        attach_in = geo_j.point_at(m.segments.cp_in[j])
        cp0 = float((attach_out - origins[i]) @ dirs[i]) * scale
        # the wrap row measures against the arrival frame (no base offset)
        dest_origin = np.asarray(m.joints[j].foot_prev)
        cp1 = float((attach_in - dest_origin) @ dirs[j]) * scale
        span = abs(m.segments.cp_out[i] - m.segments.cp_in[i]) * scale
        if abs(span - jsl) > 1e-9:
            mapped = True
        rows.append(DHRow(i=i, d=d * scale, a=a * scale, alpha=alpha, cp0=cp0, cp1=cp1))
        if m.segments.cp_in[i] == m.segments.cp_out[i]:
            raise DegenerateSegment(f"joint {i} has a zero-length segment")
    return DesignTable(
        rows=tuple(rows), scale=scale, joint_segment_length=jsl,
        frames=tuple(frames), mapped=mapped,
    )


def model_attachments_from_table(
    m: RationalMechanism, table_rows: Sequence[Sequence[float]], scale: float, d0_mm: float = 0.0
) -> list[tuple[float, float]]:
    """Invert the export mapping: per-joint (cp_in, cp_out) in model units.

    `table_rows` lists per-link (cp0_i, cp1_i) in millimetres at `scale`;
    `d0_mm` is the base-frame offset the table was generated with (its wrap
    entry is measured from the unshifted arrival frame).  Internal values are
    measured from each axis ref point (the midpoint of the perpendicular
    feet), so the frame-origin offsets are removed here.
    """
    n = m.n_joints
    if len(table_rows) != n:
        raise ValueError("one table row per link required")
    out = []
    for i in range(n):
        geo = m.joints[i]
        d_in = float((np.asarray(geo.foot_prev) - geo.ref_point) @ geo.direction)
        cp_in_mm = table_rows[(i - 1) % n][1]
        cp_out_mm = table_rows[i][0]
        cp_in = cp_in_mm / scale + d_in
        cp_out = cp_out_mm / scale + d_in
        if i == 0:
            cp_out -= d0_mm / scale  # table cp0 row 0 is measured from the shifted base
        out.append((cp_in, cp_out))
    return out


def export_design(table: DesignTable, format: str = "csv") -> str:
    """Serialize a design table; CSV columns i, d, a, alpha, cp0, cp1."""
    if format == "csv":
        lines = ["i,d,a,alpha,cp0,cp1"]
        for r in table.rows:
            lines.append(
                f"{r.i},{r.d:.6f},{r.a:.6f},{r.alpha:.6f},{r.cp0:.6f},{r.cp1:.6f}"
            )
        return "\n".join(lines) + "\n"
    if format == "json":
        return json.dumps(
            {
                "scale": table.scale,
                "joint_segment_length": table.joint_segment_length,
                "mapped": table.mapped,
                "rows": [
                    {
                        "i": r.i,
                        "d": round(r.d, 6),
                        "a": round(r.a, 6),
                        "alpha": round(r.alpha, 6),
                        "cp0": round(r.cp0, 6),
                        "cp1": round(r.cp1, 6),
                    }
                    for r in table.rows
                ],
            },
            indent=1,
        )
    raise ValueError(f"unknown format {format!r}")
