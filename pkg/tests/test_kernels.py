import numpy as np
import pytest

from ratlink._kernels import IMPLEMENTATION, fallback, polyvec_eval, segment_min_distances

try:
    from ratlink._kernels import _native
except ImportError:
    _native = None


def test_backend_selected():
    assert IMPLEMENTATION in ("native", "fallback")


def test_polyvec_eval_matches_polyval(rng):
    coeffs = rng.standard_normal((5, 8))
    ts = rng.uniform(-3, 3, 64)
    got = polyvec_eval(coeffs, ts)
    for j in range(8):
        want = np.polyval(coeffs[::-1, j], ts)
        assert got[:, j] == pytest.approx(want, rel=1e-12)


def test_segment_distance_known_cases():
    p0 = np.array([[0.0, 0, 0], [0.0, 0, 0], [0.0, 0, 0]])
    p1 = np.array([[1.0, 0, 0], [1.0, 0, 0], [1.0, 0, 0]])
    q0 = np.array([[0.0, 1, 0], [2.0, 1, 0], [0.5, -1, 1]])
    q1 = np.array([[1.0, 1, 0], [2.0, -1, 0], [0.5, 1, 1]])
    d = segment_min_distances(p0, p1, q0, q1)
    assert d == pytest.approx([1.0, 1.0, 1.0])


def test_segment_distance_intersecting():
    d = segment_min_distances(
        np.array([[-1.0, 0, 0]]), np.array([[1.0, 0, 0]]),
        np.array([[0.0, -1, 0]]), np.array([[0.0, 1, 0]]),
    )
    assert d[0] == pytest.approx(0.0, abs=1e-15)


def test_segment_distance_degenerate_point():
    d = segment_min_distances(
        np.array([[0.0, 0, 0]]), np.array([[0.0, 0, 0]]),
        np.array([[1.0, 1, 0]]), np.array([[1.0, -1, 0]]),
    )
    assert d[0] == pytest.approx(1.0)


@pytest.mark.skipif(_native is None, reason="native extension not built")
def test_native_and_fallback_agree(rng):
    p0 = rng.uniform(-2, 2, (500, 3))
    p1 = rng.uniform(-2, 2, (500, 3))
    q0 = rng.uniform(-2, 2, (500, 3))
    q1 = rng.uniform(-2, 2, (500, 3))
    dn = _native.segment_min_distances(p0, p1, q0, q1)
    df = fallback.segment_min_distances(p0, p1, q0, q1)
    assert dn == pytest.approx(df, abs=1e-14)
    coeffs = rng.standard_normal((7, 8))
    ts = rng.uniform(-5, 5, 300)
    assert _native.polyvec_eval(coeffs, ts) == pytest.approx(
        fallback.polyvec_eval(coeffs, ts), rel=1e-13, abs=1e-13
    )


def test_env_override_selects_fallback(tmp_path):
    import subprocess
    import sys

    code = "import ratlink._kernels as k; print(k.IMPLEMENTATION)"
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"RATLINK_NO_NATIVE": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True, text=True,
    )
    assert out.stdout.strip() == "fallback"
