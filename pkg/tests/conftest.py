import numpy as np
import pytest

from ratlink.quatcore import DualQuaternion, PluckerLine, Point3, Quaternion


def study_matrix(coords):
    """Independent oracle: homogeneous 4x4 matrix of a displacement 8-tuple.

    Rotation: the standard rotation matrix of the primal quaternion.
    Translation: 2*(b0*a_vec - a0*b_vec - cross(a_vec, b_vec)) / |a|^2,
    hand-derived once from the point action and frozen here.
    """
    p = np.asarray([float(c) for c in coords])
    a0, av = p[0], p[1:4]
    b0, bv = p[4], p[5:8]
    n = a0 * a0 + av @ av
    w, x, y, z = a0, av[0], av[1], av[2]
    R = (
        np.array(
            [
                [w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z],
            ]
        )
        / n
    )
    t = 2.0 * (b0 * av - a0 * bv - np.cross(av, bv)) / n
    M = np.eye(4)
    M[:3, :3] = R
    M[:3, 3] = t
    return M


def random_pose(rng):
    """Random rigid displacement built from axis-angle + translation."""
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.1, 3.0)
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    a = Quaternion(c, *(s * axis))
    tr = rng.uniform(-2, 2, 3)
    # translation(t) * rotation: dual = (0,-t/2) * a
    half = Quaternion(0.0, -tr[0] / 2, -tr[1] / 2, -tr[2] / 2)
    return DualQuaternion(a, half * a)


def random_line(rng):
    p1 = Point3(*rng.uniform(-2, 2, 3))
    d = rng.standard_normal(3)
    d /= np.linalg.norm(d)
    g = tuple(d)
    m = tuple(np.cross(p1.coords(), d))
    return PluckerLine(g, m)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
