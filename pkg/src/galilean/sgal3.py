"""The special Galilean group SGal(3).

An element is stored by components ``(C, v, r, tau)`` and embeds into GL(5)
as::

    [[C, v, r  ],
     [0, 1, tau],
     [0, 0, 1  ]]

Tangent vectors are plain ``(10,)`` arrays ordered ``(rho, nu, phi, iota)``;
the slices below are the single source of truth for that layout and every
10x10 matrix in the package (adjoints, Jacobians, covariances) uses it.

The ``*_components`` helpers work on stacks of elements and are what the
sampling code uses; the object-level functions wrap them for one element.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lie_core
from .errors import ConvergenceFailure, MalformedAlgebraElement

DIM = 10
RHO = slice(0, 3)
NU = slice(3, 6)
PHI = slice(6, 9)
IOTA = 9

ALGEBRA_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GalileanTransform:
    """Group element: orientation ``C``, velocity ``v``, position ``r``, time ``tau``."""

    C: np.ndarray
    v: np.ndarray
    r: np.ndarray
    tau: float

    def __post_init__(self):
        C = np.array(self.C, dtype=float).reshape(3, 3)
        v = np.array(self.v, dtype=float).reshape(3)
        r = np.array(self.r, dtype=float).reshape(3)
        tau = float(self.tau)
        if not (np.all(np.isfinite(C)) and np.all(np.isfinite(v)) and np.all(np.isfinite(r))
                and np.isfinite(tau)):
            raise ValueError("GalileanTransform components must be finite")
        for arr in (C, v, r):
            arr.flags.writeable = False
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "tau", tau)

    @classmethod
    def identity(cls) -> "GalileanTransform":
        return cls(np.eye(3), np.zeros(3), np.zeros(3), 0.0)

    @classmethod
    def from_matrix(cls, m: np.ndarray, tol: float = 1e-12) -> "GalileanTransform":
        m = np.asarray(m, dtype=float)
        if m.shape != (5, 5):
            raise ValueError(f"expected a 5x5 matrix, got shape {m.shape}")
        expected = np.array([[0, 0, 0, 1, m[3, 4]], [0, 0, 0, 0, 1]], dtype=float)
        if np.abs(m[3:] - expected).max() > tol:
            raise ValueError("bottom two rows do not match the SGal(3) pattern")
        return cls(m[:3, :3], m[:3, 3], m[:3, 4], m[3, 4])

    def as_matrix(self) -> np.ndarray:
        m = np.eye(5)
        m[:3, :3] = self.C
        m[:3, 3] = self.v
        m[:3, 4] = self.r
        m[3, 4] = self.tau
        return m

    def is_valid(self, tol: float = 1e-12) -> bool:
        return lie_core.is_rotation(self.C, tol)

    def renormalized(self) -> "GalileanTransform":
        """Copy with ``C`` projected back onto SO(3)."""
        return GalileanTransform(lie_core.orthonormalize(self.C), self.v, self.r, self.tau)

    def allclose(self, other: "GalileanTransform", atol: float = 1e-12) -> bool:
        return bool(np.abs(self.as_matrix() - other.as_matrix()).max() <= atol)

    def __matmul__(self, other):
        if isinstance(other, GalileanTransform):
            return compose(self, other)
        if isinstance(other, Event):
            return act(self, other)
        return NotImplemented

    def __repr__(self):
        return (
            f"GalileanTransform(C={self.C.tolist()}, v={self.v.tolist()}, "
            f"r={self.r.tolist()}, tau={self.tau!r})"
        )


@dataclass(frozen=True, eq=False)
class Event:
    """A point in space and time, ``(x, t)``."""

    x: np.ndarray
    t: float

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(3)
        if not (np.all(np.isfinite(x)) and np.isfinite(self.t)):
            raise ValueError("Event coordinates must be finite")
        x.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))

    def homogeneous(self) -> np.ndarray:
        return np.concatenate([self.x, [self.t, 1.0]])

    def __repr__(self):
        return f"Event(x={self.x.tolist()}, t={self.t!r})"


def tangent(rho=(0, 0, 0), nu=(0, 0, 0), phi=(0, 0, 0), iota=0.0) -> np.ndarray:
    xi = np.zeros(DIM)
    xi[RHO] = rho
    xi[NU] = nu
    xi[PHI] = phi
    xi[IOTA] = iota
    return xi


def wedge(xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    m = np.zeros(xi.shape[:-1] + (5, 5))
    m[..., :3, :3] = lie_core.hat3(xi[..., PHI])
    m[..., :3, 3] = xi[..., NU]
    m[..., :3, 4] = xi[..., RHO]
    m[..., 3, 4] = xi[..., IOTA]
    return m


def vee(m: np.ndarray, tol: float = ALGEBRA_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (5, 5):
        raise MalformedAlgebraElement(f"expected 5x5 matrices, got shape {m.shape}")
    # everything outside the algebra block pattern must vanish: rows 4-5 except (4,5)
    rest = m[..., 3:, :].copy()
    rest[..., 0, 4] = 0.0
    top = m[..., :3, :3]
    if np.abs(rest).max() > tol:
        raise MalformedAlgebraElement("bottom rows must be zero apart from the time entry")
    if np.abs(top + np.swapaxes(top, -1, -2)).max() > tol:
        raise MalformedAlgebraElement("rotation block is not skew-symmetric")
    xi = np.empty(m.shape[:-2] + (DIM,))
    xi[..., RHO] = m[..., :3, 4]
    xi[..., NU] = m[..., :3, 3]
    xi[..., PHI] = np.stack([m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)
    xi[..., IOTA] = m[..., 3, 4]
    return xi


# -- batched component kernels ------------------------------------------------


def exp_components(xi: np.ndarray):
    """Exponential of a stack of tangent vectors, returned as ``(C, v, r, tau)``."""
    xi = np.asarray(xi, dtype=float)
    phi = xi[..., PHI]
    nu = xi[..., NU]
    iota = xi[..., IOTA]
    C = lie_core.exp_so3(phi)
    D = lie_core.left_jacobian_so3(phi)
    E = lie_core.e_matrix(phi)
    v = np.einsum("...ij,...j->...i", D, nu)
    r = np.einsum("...ij,...j->...i", D, xi[..., RHO]) + np.einsum(
        "...ij,...j->...i", E, nu * iota[..., None]
    )
    return C, v, r, iota.copy()


def log_components(C, v, r, tau) -> np.ndarray:
    C = np.asarray(C, dtype=float)
    v = np.asarray(v, dtype=float)
    r = np.asarray(r, dtype=float)
    tau = np.asarray(tau, dtype=float)
    phi = lie_core.log_so3(C)
    Dinv = lie_core.inv_left_jacobian_so3(phi)
    E = lie_core.e_matrix(phi)
    nu = np.einsum("...ij,...j->...i", Dinv, v)
    rho = np.einsum(
        "...ij,...j->...i",
        Dinv,
        r - np.einsum("...ij,...j->...i", E, nu * tau[..., None]),
    )
    xi = np.empty(phi.shape[:-1] + (DIM,))
    xi[..., RHO] = rho
    xi[..., NU] = nu
    xi[..., PHI] = phi
    xi[..., IOTA] = tau
    return xi


def compose_components(a, b):
    """Product of two (possibly stacked, broadcastable) component tuples."""
    C1, v1, r1, t1 = a
    C2, v2, r2, t2 = b
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    C = C1 @ C2
    v = np.einsum("...ij,...j->...i", C1, v2) + v1
    r = np.einsum("...ij,...j->...i", C1, r2) + v1 * t2[..., None] + r1
    return C, v, r, t1 + t2


def inverse_components(a):
    C, v, r, tau = a
    tau = np.asarray(tau, dtype=float)
    Ct = np.swapaxes(C, -1, -2)
    return (
        Ct,
        -np.einsum("...ij,...j->...i", Ct, v),
        -np.einsum("...ij,...j->...i", Ct, r - v * tau[..., None]),
        -tau,
    )


def act_components(a, x, t):
    C, v, r, tau = a
    t = np.asarray(t, dtype=float)
    x_out = np.einsum("...ij,...j->...i", C, x) + v * t[..., None] + r
    return x_out, t + tau


def _parts(F: GalileanTransform):
    return F.C, F.v, F.r, F.tau


def _from_parts(parts) -> GalileanTransform:
    return GalileanTransform(*parts)


# -- group operations ---------------------------------------------------------


def identity() -> GalileanTransform:
    return GalileanTransform.identity()


def exp(xi: np.ndarray) -> GalileanTransform:
    """Closed-form exponential: ``C = exp_so3(phi)``, ``v = D nu``, ``r = D rho + E nu iota``."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (DIM,):
        raise ValueError(f"expected a 10-vector, got shape {xi.shape}")
    return _from_parts(exp_components(xi))


def log(F: GalileanTransform) -> np.ndarray:
    """Inverse of :func:`exp` on rotation angles below pi.

    Raises
    ------
    AngleNearPi
        If the rotation of ``F`` is within ``lie_core.PI_MARGIN`` of pi.
    """
    return log_components(*_parts(F))


def compose(F1: GalileanTransform, F2: GalileanTransform) -> GalileanTransform:
    return _from_parts(compose_components(_parts(F1), _parts(F2)))


def inverse(F: GalileanTransform) -> GalileanTransform:
    return _from_parts(inverse_components(_parts(F)))


def act(F: GalileanTransform, p: Event) -> Event:
    """Left action on an event: ``x' = C x + v t + r``, ``t' = t + tau``."""
    x, t = act_components(_parts(F), p.x, p.t)
    return Event(x, float(t))


def adjoint(F: GalileanTransform) -> np.ndarray:
    """10x10 matrix with ``wedge(Ad(F) xi) = F wedge(xi) F^-1``."""
    C, v, r, tau = _parts(F)
    A = np.zeros((DIM, DIM))
    A[RHO, RHO] = C
    A[RHO, NU] = -tau * C
    A[RHO, PHI] = lie_core.hat3(r - v * tau) @ C
    A[RHO, IOTA] = v
    A[NU, NU] = C
    A[NU, PHI] = lie_core.hat3(v) @ C
    A[PHI, PHI] = C
    A[IOTA, IOTA] = 1.0
    return A


def ad_small(xi: np.ndarray) -> np.ndarray:
    """10x10 matrix of the bracket: ``ad(xi) eta = vee([wedge(xi), wedge(eta)])``."""
    xi = np.asarray(xi, dtype=float)
    rho, nu, phi, iota = xi[RHO], xi[NU], xi[PHI], xi[IOTA]
    A = np.zeros((DIM, DIM))
    P = lie_core.hat3(phi)
    A[RHO, RHO] = P
    A[RHO, NU] = -iota * np.eye(3)
    A[RHO, PHI] = lie_core.hat3(rho)
    A[RHO, IOTA] = nu
    A[NU, NU] = P
    A[NU, PHI] = lie_core.hat3(nu)
    A[PHI, PHI] = P
    return A


def left_jacobian_group(xi: np.ndarray, max_terms: int = 60, tol: float = 1e-14) -> np.ndarray:
    """Left Jacobian ``sum_n ad(xi)^n / (n+1)!``.

    First-order meaning: ``log(exp(xi + d) exp(xi)^-1) = J d + O(|d|^2)``.
    Intended for ``|phi| < pi``; the series converges everywhere but is
    summed naively, so large arguments run out of terms.
    """
    ad = ad_small(xi)
    J = np.eye(DIM)
    term = np.eye(DIM)
    for n in range(1, max_terms + 1):
        term = term @ ad / (n + 1)
        J = J + term
        if np.abs(term).max() < tol:
            return J
    raise ConvergenceFailure(
        f"Jacobian series did not fall below {tol:g} within {max_terms} terms"
    )


def right_jacobian_group(xi: np.ndarray, **kwargs) -> np.ndarray:
    return left_jacobian_group(-np.asarray(xi, dtype=float), **kwargs)
