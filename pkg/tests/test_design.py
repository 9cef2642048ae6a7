import json
import math

import numpy as np
import pytest

from ratlink import errors
from ratlink.data import (
    BENNETT_CURVE_COEFFS,
    BENNETT_DESIGN_CP_MM,
    BENNETT_DESIGN_D0_MM,
    SIX_R_POSES,
)
from ratlink.design import (
    dh_between_axes,
    export_design,
    get_design,
    model_attachments_from_table,
)
from ratlink.interp import interpolate_poses
from ratlink.mechanism import assemble
from ratlink.motionpoly import MotionPolynomial, all_factorizations
from ratlink.quatcore import PluckerLine


@pytest.fixture(scope="module")
def bennett():
    curve = MotionPolynomial.from_coeff_rows(BENNETT_CURVE_COEFFS)
    return assemble(all_factorizations(curve), curve=curve, scale=200.0)


@pytest.fixture(scope="module")
def bennett_designed(bennett):
    m = bennett.with_base_offset(BENNETT_DESIGN_D0_MM / 200.0)
    for i, (ci, co) in enumerate(
        model_attachments_from_table(m, BENNETT_DESIGN_CP_MM, 200.0, d0_mm=BENNETT_DESIGN_D0_MM)
    ):
        m = m.set_connection_points(i, ci, co)
    return m


def test_dh_parallel_axes():
    z = PluckerLine((0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    z_shift = PluckerLine((0.0, 0.0, 1.0), tuple(np.cross((1.0, 0, 0), (0.0, 0, 1.0))))
    d, a, alpha, frame = dh_between_axes(z, z_shift)
    assert a == pytest.approx(1.0)
    assert alpha == pytest.approx(0.0)


def test_dh_intersecting_axes():
    z = PluckerLine((0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    x = PluckerLine((1.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    d, a, alpha, frame = dh_between_axes(z, x)
    assert a == pytest.approx(0.0, abs=1e-12)
    assert abs(alpha) == pytest.approx(90.0)


def test_dh_coincident_axes_rejected():
    z = PluckerLine((0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    with pytest.raises(errors.CoincidentAxes):
        dh_between_axes(z, z)


def test_bennett_dh_values(bennett):
    table = get_design(bennett, scale=200.0)
    a_vals = sorted({round(r.a, 6) for r in table.rows})
    alpha_vals = sorted({round(r.alpha, 6) for r in table.rows})
    assert a_vals == pytest.approx([48.517961, 83.708761], abs=1e-3)
    assert alpha_vals == pytest.approx([-144.679172, -94.053746], abs=1e-3)
    for r in table.rows[1:]:
        assert abs(r.d) < 1e-6


def test_bennett_opposite_rows_agree(bennett):
    table = get_design(bennett, scale=200.0)
    r = table.rows
    assert r[0].a == pytest.approx(r[2].a, rel=1e-6)
    assert r[1].a == pytest.approx(r[3].a, rel=1e-6)
    assert r[0].alpha == pytest.approx(r[2].alpha, rel=1e-6)
    assert r[1].alpha == pytest.approx(r[3].alpha, rel=1e-6)


def test_designed_bennett_reproduces_reference_table(bennett_designed):
    table = get_design(bennett_designed, scale=200.0)
    expected = [
        (64.580219, 48.517961, -144.679172, 2.085621, 17.491631),
        (0.0, 83.708761, -94.053746, -3.508369, -0.650840),
        (0.0, 48.517961, -144.679172, -21.650840, 39.381058),
        (0.0, 83.708761, -94.053746, 60.381058, -83.494598),
    ]
    for row, (d, a, alpha, cp0, cp1) in zip(table.rows, expected):
        assert row.d == pytest.approx(d, abs=1e-3)
        assert row.a == pytest.approx(a, abs=1e-3)
        assert row.alpha == pytest.approx(alpha, abs=1e-3)
        assert row.cp0 == pytest.approx(cp0, abs=1e-3)
        assert row.cp1 == pytest.approx(cp1, abs=1e-3)


def test_scale_equivariance(bennett_designed):
    t200 = get_design(bennett_designed, scale=200.0)
    t1 = get_design(bennett_designed, scale=1.0)
    for r200, r1 in zip(t200.rows, t1.rows):
        assert r200.d == pytest.approx(200.0 * r1.d, abs=1e-9)
        assert r200.a == pytest.approx(200.0 * r1.a, abs=1e-9)
        assert r200.cp0 == pytest.approx(200.0 * r1.cp0, abs=1e-9)
        assert r200.alpha == r1.alpha


def test_frame_chain_closes(bennett):
    table = get_design(bennett, scale=1.0)
    frames = table.frames
    # walking the loop ends back on axis 0's frame
    assert np.asarray(frames[-1].z) == pytest.approx(
        np.asarray(bennett.joints[0].axis.direction), abs=1e-8
    )
    start = np.asarray(bennett.joints[0].foot_prev)
    assert np.asarray(frames[-1].origin) == pytest.approx(start, abs=1e-8)


def test_six_r_design_has_six_rows():
    curve = interpolate_poses(SIX_R_POSES).curve
    m = assemble(all_factorizations(curve), curve=curve)
    table = get_design(m, scale=10.0)
    assert len(table.rows) == 6
    assert all(np.isfinite([r.d, r.a, r.alpha, r.cp0, r.cp1]).all() for r in table.rows)


def test_csv_export_layout(bennett_designed):
    text = export_design(get_design(bennett_designed, scale=200.0), "csv")
    lines = text.strip().splitlines()
    assert lines[0] == "i,d,a,alpha,cp0,cp1"
    assert len(lines) == 5
    first = lines[1].split(",")
    assert first[0] == "0"
    assert first[1] == "64.580219"


def test_json_export_roundtrip(bennett_designed):
    text = export_design(get_design(bennett_designed, scale=200.0), "json")
    doc = json.loads(text)
    assert doc["scale"] == 200.0
    assert doc["rows"][0]["d"] == pytest.approx(64.580219, abs=1e-6)
    assert len(doc["rows"]) == 4


def test_angles_never_emitted(bennett):
    text = export_design(get_design(bennett, scale=200.0), "csv")
    assert "theta" not in text
