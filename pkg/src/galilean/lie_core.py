"""SO(3) primitives the SGal(3) maps are assembled from.

All functions accept a single 3-vector (shape ``(3,)``) or a stack of them
(shape ``(..., 3)``) and return matching stacks of 3x3 matrices, so the
Monte Carlo code can push 10^5 samples through without a Python loop.

With ``K = hat3(phi)`` and ``theta = |phi|`` the closed forms are::

    exp_so3(phi)   = I + a K + b K^2          a = sin(t)/t
    D(phi)         = I + b K + c K^2          b = (1 - cos t)/t^2
    E(phi)         = I/2 + c K + e K^2        c = (t - sin t)/t^3
                                              e = (cos t - 1 + t^2/2)/t^4
    D(phi)^-1      = I - K/2 + g K^2          g = (1 - (t/2) cot(t/2))/t^2

which are the series ``sum K^n/n!``, ``sum K^n/(n+1)!`` and
``sum K^n/(n+2)!`` collapsed with ``K^3 = -theta^2 K``.
"""

from __future__ import annotations

import numpy as np

from .errors import AngleNearPi, JacobianSingular, NotSkewSymmetric

SMALL_ANGLE = 1e-4
SMALL_ANGLE_E = 1e-3
PI_MARGIN = 1e-6
TWO_PI_MARGIN = 1e-6
SKEW_TOL = 1e-9


def hat3(phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    x, y, z = phi[..., 0], phi[..., 1], phi[..., 2]
    o = np.zeros_like(x)
    return np.stack(
        [
            np.stack([o, -z, y], axis=-1),
            np.stack([z, o, -x], axis=-1),
            np.stack([-y, x, o], axis=-1),
        ],
        axis=-2,
    )


def vee3(m: np.ndarray, tol: float = SKEW_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    asym = np.abs(m + np.swapaxes(m, -1, -2)).max() if m.size else 0.0
    if asym > tol:
        raise NotSkewSymmetric(f"matrix is not skew-symmetric (|M + M^T| = {asym:.3g})")
    return np.stack([m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)


def _angle(phi: np.ndarray) -> np.ndarray:
    return np.linalg.norm(phi, axis=-1)


def _split(theta: np.ndarray, threshold: float):
    """Mask of entries taking the closed form, plus a division-safe angle."""
    big = theta >= threshold
    return big, np.where(big, theta, 1.0)


def _rodrigues_coeffs(theta):
    big, t = _split(theta, SMALL_ANGLE)
    t2 = theta * theta
    a = np.where(big, np.sin(t) / t, 1.0 - t2 / 6.0 + t2 * t2 / 120.0)
    # 1 - cos t written as 2 sin^2(t/2) to avoid cancellation
    s = np.sin(0.5 * t)
    b = np.where(big, 2.0 * s * s / (t * t), 0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    return a, b


def _d_coeffs(theta):
    big, t = _split(theta, SMALL_ANGLE)
    t2 = theta * theta
    s = np.sin(0.5 * t)
    b = np.where(big, 2.0 * s * s / (t * t), 0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    c = np.where(big, (t - np.sin(t)) / t**3, 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0)
    return b, c


def _e_coeffs(theta):
    big, t = _split(theta, SMALL_ANGLE_E)
    t2 = theta * theta
    c = np.where(big, (t - np.sin(t)) / t**3, 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0)
    # cos t - 1 + t^2/2 == 2 (t/2 - sin(t/2)) (t/2 + sin(t/2))
    h = 0.5 * t
    sh = np.sin(h)
    e = np.where(
        big,
        2.0 * (h - sh) * (h + sh) / t**4,
        1.0 / 24.0 - t2 / 720.0 + t2 * t2 / 40320.0,
    )
    return c, e


def _inv_d_coeff(theta):
    big, t = _split(theta, SMALL_ANGLE)
    t2 = theta * theta
    h = 0.5 * t
    return np.where(
        big,
        (1.0 - h * np.cos(h) / np.sin(h)) / (t * t),
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0,
    )


def _combine(c0, c1, c2, K):
    """c0 I + c1 K + c2 K^2 with per-sample scalar coefficients."""
    eye = np.broadcast_to(np.eye(3), K.shape)
    c0 = np.asarray(c0)[..., None, None]
    c1 = np.asarray(c1)[..., None, None]
    c2 = np.asarray(c2)[..., None, None]
    return c0 * eye + c1 * K + c2 * (K @ K)


def exp_so3(phi: np.ndarray) -> np.ndarray:
    """Rodrigues exponential; Taylor coefficients below ``SMALL_ANGLE``."""
    phi = np.asarray(phi, dtype=float)
    a, b = _rodrigues_coeffs(_angle(phi))
    return _combine(1.0, a, b, hat3(phi))


def log_so3(R: np.ndarray) -> np.ndarray:
    """Principal logarithm of a rotation matrix.

    The angle comes from ``atan2`` of the antisymmetric and trace parts,
    which stays accurate at small angles where ``arccos`` does not.

    Raises
    ------
    AngleNearPi
        If any rotation angle is within ``PI_MARGIN`` of pi.
    """
    R = np.asarray(R, dtype=float)
    w = np.stack(
        [R[..., 2, 1] - R[..., 1, 2], R[..., 0, 2] - R[..., 2, 0], R[..., 1, 0] - R[..., 0, 1]],
        axis=-1,
    )
    s = 0.5 * np.linalg.norm(w, axis=-1)
    c = 0.5 * (np.trace(R, axis1=-2, axis2=-1) - 1.0)
    theta = np.arctan2(s, c)
    if np.any(np.pi - theta < PI_MARGIN):
        raise AngleNearPi(
            f"rotation angle {float(np.max(theta)):.12g} is within {PI_MARGIN:g} of pi"
        )
    big, t = _split(theta, SMALL_ANGLE)
    t2 = theta * theta
    f = np.where(big, t / (2.0 * np.sin(t)), 0.5 + t2 / 12.0 + 7.0 * t2 * t2 / 720.0)
    return f[..., None] * w


def left_jacobian_so3(phi: np.ndarray) -> np.ndarray:
    """The D matrix, ``sum_n hat3(phi)^n / (n+1)!``."""
    phi = np.asarray(phi, dtype=float)
    b, c = _d_coeffs(_angle(phi))
    return _combine(1.0, b, c, hat3(phi))


def inv_left_jacobian_so3(phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    theta = _angle(phi)
    if np.any(theta >= 2.0 * np.pi - TWO_PI_MARGIN):
        raise JacobianSingular(
            f"|phi| = {float(np.max(theta)):.12g} is too close to 2 pi"
        )
    g = _inv_d_coeff(theta)
    return _combine(1.0, -0.5, g, hat3(phi))


def e_matrix(phi: np.ndarray) -> np.ndarray:
    """The E matrix, ``sum_n hat3(phi)^n / (n+2)!``."""
    phi = np.asarray(phi, dtype=float)
    c, e = _e_coeffs(_angle(phi))
    return _combine(0.5, c, e, hat3(phi))


def is_rotation(R: np.ndarray, tol: float = 1e-12) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape[-2:] != (3, 3) or not np.all(np.isfinite(R)):
        return False
    ortho = np.linalg.norm(np.swapaxes(R, -1, -2) @ R - np.eye(3), axis=(-2, -1))
    det = np.linalg.det(R)
    return bool(np.all(ortho <= tol) and np.all(np.abs(det - 1.0) <= tol))


def orthonormalize(R: np.ndarray) -> np.ndarray:
    """Nearest rotation matrix in the Frobenius sense (polar factor)."""
    u, _, vt = np.linalg.svd(np.asarray(R, dtype=float))
    d = np.sign(np.linalg.det(u @ vt))
    u = u.copy()
    u[..., :, -1] *= np.asarray(d)[..., None]
    return u @ vt
