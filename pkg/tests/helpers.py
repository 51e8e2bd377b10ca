import numpy as np

from galilean import lie_core, sgal3


def random_unit(rng, dim):
    d = rng.standard_normal(dim)
    return d / np.linalg.norm(d)


def random_phi(rng, norm):
    return random_unit(rng, 3) * norm


def random_tangent(rng, max_norm=10.0, max_angle=None):
    xi = random_unit(rng, sgal3.DIM) * rng.uniform(0.0, max_norm)
    if max_angle is not None:
        xi[sgal3.PHI] = random_phi(rng, rng.uniform(0.0, max_angle))
    return xi


def random_transform(rng, bound=10.0):
    C = lie_core.exp_so3(random_phi(rng, rng.uniform(0.0, np.pi - 1e-3)))
    return sgal3.GalileanTransform(
        C, rng.uniform(-bound, bound, 3), rng.uniform(-bound, bound, 3), rng.uniform(-bound, bound)
    )


def max_abs(a, b):
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())
