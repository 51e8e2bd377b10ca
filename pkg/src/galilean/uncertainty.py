"""Tangent-space Gaussian uncertainty on SGal(3).

A :class:`GroupGaussian` describes ``F = F_mean exp(xi^)`` (right / local
side) or ``F = exp(xi^) F_mean`` (left / global side) with
``xi ~ N(0, covariance)``.

Randomness comes from ``numpy.random.Generator(PCG64(seed))`` and
``standard_normal`` (ziggurat).  Draws are taken as one ``(n, 10)`` block so
sample ``i`` always uses the ``i``-th row of normals for a given seed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import sgal3
from .errors import (
    DegenerateCovariance,
    InsufficientSamples,
    NotPositiveSemidefinite,
)
from .sgal3 import DIM, Event, GalileanTransform

PSD_TOL = 1e-10
SYMMETRY_TOL = 1e-10
JACOBIAN_STEP = 1e-6
ELLIPSE_POINTS = 128

RNG_ALGORITHM = "numpy PCG64 + standard_normal (ziggurat)"


class Side(str, enum.Enum):
    RIGHT = "right"
    LEFT = "left"

    def flipped(self) -> "Side":
        return Side.LEFT if self is Side.RIGHT else Side.RIGHT


@dataclass(frozen=True, eq=False)
class GroupGaussian:
    mean: GalileanTransform
    covariance: np.ndarray
    side: Side = Side.RIGHT

    def __post_init__(self):
        cov = np.array(self.covariance, dtype=float)
        if cov.shape != (DIM, DIM):
            raise ValueError(f"covariance must be 10x10, got {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise ValueError("covariance must be finite")
        if np.abs(cov - cov.T).max() > SYMMETRY_TOL:
            raise NotPositiveSemidefinite("covariance is not symmetric")
        cov.flags.writeable = False
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "side", Side(self.side))


@dataclass(eq=False)
class SampleCloud:
    """Events produced by acting with perturbed transforms on one input event.

    Row ``i`` of ``x``/``t`` is the transformed event for the perturbation
    ``xi[i]``.
    """

    x: np.ndarray
    t: np.ndarray
    xi: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True, eq=False)
class EllipseProjection:
    center: np.ndarray
    polyline: np.ndarray


def sqrt_factor(cov: np.ndarray) -> np.ndarray:
    """``L`` with ``L L^T = cov``, via a symmetric eigendecomposition.

    Tolerates semidefinite input; eigenvalues down to ``-PSD_TOL`` are
    clipped to zero.
    """
    cov = np.asarray(cov, dtype=float)
    w, V = np.linalg.eigh(0.5 * (cov + cov.T))
    if w.min() < -PSD_TOL:
        raise NotPositiveSemidefinite(f"covariance has eigenvalue {w.min():.3g}")
    return V * np.sqrt(np.clip(w, 0.0, None))


def draw_tangents(cov: np.ndarray, n: int, seed: int) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one sample")
    L = sqrt_factor(cov)
    rng = np.random.Generator(np.random.PCG64(seed))
    z = rng.standard_normal((n, DIM))
    return z @ L.T


def _perturb(g: GroupGaussian, xi: np.ndarray):
    delta = sgal3.exp_components(xi)
    mean = (g.mean.C, g.mean.v, g.mean.r, g.mean.tau)
    if g.side is Side.RIGHT:
        return sgal3.compose_components(mean, delta)
    return sgal3.compose_components(delta, mean)


def _sample_components(g: GroupGaussian, n: int, seed: int):
    xi = draw_tangents(g.covariance, n, seed)
    return xi, _perturb(g, xi)


def sample_perturbed(g: GroupGaussian, n: int, seed: int) -> list[GalileanTransform]:
    _, (C, v, r, tau) = _sample_components(g, n, seed)
    return [GalileanTransform(C[i], v[i], r[i], tau[i]) for i in range(n)]


def _stack(samples):
    """Accept a list of transforms or an already stacked ``(C, v, r, tau)`` tuple."""
    if isinstance(samples, tuple) and len(samples) == 4 and np.ndim(samples[0]) == 3:
        return samples
    samples = list(samples)
    if not samples:
        return (np.zeros((0, 3, 3)), np.zeros((0, 3)), np.zeros((0, 3)), np.zeros(0))
    return (
        np.stack([F.C for F in samples]),
        np.stack([F.v for F in samples]),
        np.stack([F.r for F in samples]),
        np.array([F.tau for F in samples]),
    )


def tangent_residuals(samples, mean: GalileanTransform, side: Side | str) -> np.ndarray:
    """``vee(log(mean^-1 F))`` (right) or ``vee(log(F mean^-1))`` (left) per sample."""
    side = Side(side)
    parts = _stack(samples)
    inv = sgal3.inverse_components((mean.C, mean.v, mean.r, mean.tau))
    if side is Side.RIGHT:
        rel = sgal3.compose_components(inv, parts)
    else:
        rel = sgal3.compose_components(parts, inv)
    return sgal3.log_components(*rel)


def estimate_covariance(samples, mean: GalileanTransform, side: Side | str) -> np.ndarray:
    """Empirical ``E[xi xi^T]`` about a known mean (no mean subtraction).

    ``samples`` is a list of transforms or a stacked ``(C, v, r, tau)`` tuple.
    """
    parts = _stack(samples)
    n = parts[3].shape[0]
    if n < 2:
        raise InsufficientSamples(f"need at least 2 samples, got {n}")
    xi = tangent_residuals(parts, mean, side)
    return xi.T @ xi / n


def convert_side(g: GroupGaussian) -> GroupGaussian:
    """Same distribution described on the other side of the mean.

    Uses ``exp(xi^) F = F exp((Ad(F^-1) xi)^)``.
    """
    if g.side is Side.RIGHT:
        A = sgal3.adjoint(g.mean)
    else:
        A = sgal3.adjoint(sgal3.inverse(g.mean))
    cov = A @ g.covariance @ A.T
    return GroupGaussian(g.mean, 0.5 * (cov + cov.T), g.side.flipped())


def transform_event_cloud(g: GroupGaussian, p: Event, n: int, seed: int) -> SampleCloud:
    xi, parts = _sample_components(g, n, seed)
    x, t = sgal3.act_components(parts, p.x, np.full(n, p.t))
    metadata = {
        "seed": int(seed),
        "n": int(n),
        "event": {"x": p.x.tolist(), "t": p.t},
        "side": g.side.value,
        "mean": {
            "C": g.mean.C.ravel().tolist(),
            "v": g.mean.v.tolist(),
            "r": g.mean.r.tolist(),
            "tau": g.mean.tau,
        },
        "covariance": g.covariance.tolist(),
        "rng": RNG_ALGORITHM,
    }
    return SampleCloud(x=x, t=t, xi=xi, metadata=metadata)


def event_jacobian_xy(g: GroupGaussian, p: Event, step: float = JACOBIAN_STEP) -> np.ndarray:
    """2x10 central-difference Jacobian of the x-y projection of the perturbed action."""
    H = np.zeros((2, DIM))
    for k in range(DIM):
        d = np.zeros((2, DIM))
        d[0, k] = step
        d[1, k] = -step
        x, _ = sgal3.act_components(_perturb(g, d), p.x, np.full(2, p.t))
        H[:, k] = (x[0, :2] - x[1, :2]) / (2.0 * step)
    return H


def sigma_ellipse_xy(g: GroupGaussian, p: Event, k: float = 3.0,
                     points: int = ELLIPSE_POINTS) -> EllipseProjection:
    """k-sigma contour of the linearised x-y distribution of the transformed event.

    A zero covariance gives a zero-radius polyline sitting at the centre.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    points = max(int(points), 64)
    H = event_jacobian_xy(g, p)
    P = H @ g.covariance @ H.T
    P = 0.5 * (P + P.T)
    w, V = np.linalg.eigh(P)
    if w.min() < -PSD_TOL:
        raise DegenerateCovariance(f"projected covariance has eigenvalue {w.min():.3g}")
    w = np.clip(w, 0.0, None)
    center = sgal3.act(g.mean, p).x[:2].copy()
    s = np.linspace(0.0, 2.0 * np.pi, points)
    circle = np.stack([np.cos(s), np.sin(s)], axis=-1)
    poly = center + k * (circle * np.sqrt(w)) @ V.T
    poly[-1] = poly[0]
    return EllipseProjection(center=center, polyline=poly)


def mahalanobis_xy(g: GroupGaussian, p: Event, xy: np.ndarray) -> np.ndarray:
    """Squared Mahalanobis distance of points under the linearised x-y Gaussian."""
    H = event_jacobian_xy(g, p)
    P = H @ g.covariance @ H.T
    d = np.asarray(xy) - sgal3.act(g.mean, p).x[:2]
    return np.einsum("ni,ij,nj->n", d, np.linalg.inv(P), d)


# -- figure presets -----------------------------------------------------------

PANEL_MEAN_VELOCITY = (2.0, 0.0, 0.0)
PANEL_EVENT = Event(x=(8.0, 0.0, 0.0), t=1.0)
PANEL_SIGMA_RHO_X = 0.4
PANEL_SIGMA_PHI_Z = 0.15
PANEL_SIGMA_IOTA = {"left": 0.0, "middle": 0.15, "right": 0.5}
PANEL_N = 1000
PANEL_SEED = 42


def diagonal_covariance(sigmas: dict[int, float]) -> np.ndarray:
    cov = np.zeros((DIM, DIM))
    for idx, s in sigmas.items():
        cov[int(idx), int(idx)] = float(s) ** 2
    return cov


def panel_gaussian(panel: str) -> GroupGaussian:
    """Right-perturbed Gaussian for one of the ``left``/``middle``/``right`` presets.

    The mean moves along +x; noise is on x translation and z rotation, plus
    time for the middle and right panels.
    """
    if panel not in PANEL_SIGMA_IOTA:
        raise ValueError(f"unknown panel {panel!r}")
    sigmas = {0: PANEL_SIGMA_RHO_X, 8: PANEL_SIGMA_PHI_Z}
    if PANEL_SIGMA_IOTA[panel] > 0:
        sigmas[sgal3.IOTA] = PANEL_SIGMA_IOTA[panel]
    mean = GalileanTransform(np.eye(3), PANEL_MEAN_VELOCITY, np.zeros(3), 0.0)
    return GroupGaussian(mean, diagonal_covariance(sigmas), Side.RIGHT)
