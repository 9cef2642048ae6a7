"""NumPy implementations of the hot kernels.

Same contracts as the compiled extension; used when the extension is not
built or RATLINK_NO_NATIVE is set.
"""
import numpy as np

IMPLEMENTATION = "fallback"


def polyvec_eval(coeffs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Evaluate a vector-valued polynomial at many parameters (Horner).

    coeffs: (deg+1, m) array, row k = coefficient of t**k.
    ts: (n,) parameters.
    returns: (n, m).
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    ts = np.asarray(ts, dtype=np.float64)
    out = np.broadcast_to(coeffs[-1], (ts.shape[0], coeffs.shape[1])).copy()
    for k in range(coeffs.shape[0] - 2, -1, -1):
        out *= ts[:, None]
        out += coeffs[k]
    return out


def segment_min_distances(p0, p1, q0, q1) -> np.ndarray:
    """Minimum distances between segment batches [p0,p1] and [q0,q1].

    All inputs (n, 3); returns (n,) of Euclidean distances.  Clamped
    closest-point computation, robust for degenerate (point-like) segments.
    """
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    q0 = np.asarray(q0, dtype=np.float64)
    q1 = np.asarray(q1, dtype=np.float64)
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)
    denom = a * e - b * b

    tiny = 1e-30
    s = np.where(denom > tiny, (b * f - c * e) / np.where(denom > tiny, denom, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    t = np.where(e > tiny, (b * s + f) / np.where(e > tiny, e, 1.0), 0.0)

    # re-clamp: if t clamped, recompute s
    t_clamped = np.clip(t, 0.0, 1.0)
    need = t_clamped != t
    s = np.where(need, np.clip((t_clamped * b - c) / np.where(a > tiny, a, 1.0), 0.0, 1.0), s)
    t = t_clamped
    # degenerate first segment
    s = np.where(a > tiny, s, 0.0)

    closest1 = p0 + s[:, None] * d1
    closest2 = q0 + t[:, None] * d2
    return np.linalg.norm(closest1 - closest2, axis=1)
