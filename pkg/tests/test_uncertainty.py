import numpy as np
import pytest

from galilean import sgal3, uncertainty as unc
from galilean.errors import InsufficientSamples, NotPositiveSemidefinite
from galilean.sgal3 import IOTA, Event, GalileanTransform
from galilean.uncertainty import GroupGaussian, Side

from .helpers import max_abs, random_transform

N_BIG = 100_000


def rel_frobenius(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def moderate_covariance(rng, scale=0.15):
    A = scale * rng.standard_normal((10, 10))
    return A @ A.T / 10 + 1e-4 * np.eye(10)


def moving_mean(vx=2.0):
    return GalileanTransform(np.eye(3), [vx, 0, 0], np.zeros(3), 0.0)


def test_zero_covariance_gives_mean(rng):
    F = random_transform(rng)
    for side in Side:
        g = GroupGaussian(F, np.zeros((10, 10)), side)
        for sample in unc.sample_perturbed(g, 5, seed=1):
            assert sample.allclose(F, atol=0.0)


def test_sampling_is_deterministic(rng):
    g = GroupGaussian(random_transform(rng), moderate_covariance(rng))
    a = unc.sample_perturbed(g, 10, seed=7)
    b = unc.sample_perturbed(g, 10, seed=7)
    c = unc.sample_perturbed(g, 10, seed=8)
    assert all(np.array_equal(x.as_matrix(), y.as_matrix()) for x, y in zip(a, b))
    assert not np.array_equal(a[0].as_matrix(), c[0].as_matrix())


def test_sample_perturbed_rejects_indefinite():
    cov = np.zeros((10, 10))
    cov[0, 0] = -1.0
    with pytest.raises(NotPositiveSemidefinite):
        unc.sample_perturbed(GroupGaussian(sgal3.identity(), cov), 3, seed=0)


def test_sample_perturbed_applies_declared_side(rng):
    F = random_transform(rng)
    cov = moderate_covariance(rng)
    xi = unc.draw_tangents(cov, 3, seed=5)
    right = unc.sample_perturbed(GroupGaussian(F, cov, Side.RIGHT), 3, seed=5)
    left = unc.sample_perturbed(GroupGaussian(F, cov, Side.LEFT), 3, seed=5)
    for i in range(3):
        assert right[i].allclose(F @ sgal3.exp(xi[i]), atol=1e-12)
        assert left[i].allclose(sgal3.exp(xi[i]) @ F, atol=1e-12)


def test_pure_time_noise_spreads_along_velocity():
    # right iota perturbation shifts the event time by iota, so x' = x'_mean + v iota
    sigma, vx = 0.3, 2.0
    g = GroupGaussian(moving_mean(vx), unc.diagonal_covariance({IOTA: sigma}))
    cloud = unc.transform_event_cloud(g, Event([0, 0, 0], 0.0), N_BIG, seed=3)
    assert np.std(cloud.x[:, 0]) == pytest.approx(vx * sigma, rel=0.02)
    assert max_abs(cloud.x[:, 1:], 0.0) == 0.0
    assert max_abs(cloud.x[:, 0] - vx * cloud.xi[:, IOTA], 0.0) < 1e-12


def test_zero_velocity_kills_time_spread():
    g = GroupGaussian(moving_mean(0.0), unc.diagonal_covariance({IOTA: 0.5}))
    cloud = unc.transform_event_cloud(g, Event([0, 0, 0], 0.0), 10_000, seed=3)
    assert np.ptp(cloud.x[:, 0]) < 1e-12 and np.ptp(cloud.x[:, 1]) < 1e-12
    assert np.std(cloud.t) > 0.4


def test_estimate_covariance_examples(rng):
    F = random_transform(rng)
    assert max_abs(unc.estimate_covariance([F, F, F], F, Side.RIGHT), 0.0) < 1e-24
    with pytest.raises(InsufficientSamples):
        unc.estimate_covariance([F], F, Side.RIGHT)


def test_estimate_covariance_recovers_truth_exactly_for_drawn_xi(rng):
    F = random_transform(rng)
    cov = moderate_covariance(rng)
    for side in Side:
        g = GroupGaussian(F, cov, side)
        samples = unc.sample_perturbed(g, 500, seed=11)
        xi = unc.draw_tangents(cov, 500, seed=11)
        est = unc.estimate_covariance(samples, F, side)
        assert max_abs(est, xi.T @ xi / 500) < 1e-10


@pytest.mark.slow
@pytest.mark.parametrize("side", list(Side))
def test_estimate_covariance_monte_carlo(rng, side):
    F = random_transform(rng)
    cov = moderate_covariance(rng)
    g = GroupGaussian(F, cov, side)
    est = unc.estimate_covariance(unc.sample_perturbed(g, N_BIG, seed=2), F, side)
    assert rel_frobenius(est, cov) < 0.05


def test_convert_side_examples(rng):
    cov = moderate_covariance(rng)
    g = GroupGaussian(sgal3.identity(), cov, Side.LEFT)
    flipped = unc.convert_side(g)
    assert flipped.side is Side.RIGHT
    assert max_abs(flipped.covariance, cov) < 1e-15
    g = GroupGaussian(random_transform(rng), cov, Side.LEFT)
    back = unc.convert_side(unc.convert_side(g))
    assert back.side is Side.LEFT
    assert max_abs(back.covariance, cov) < 1e-10


def test_convert_side_describes_same_distribution(rng):
    # sample the left description, re-express each draw on the right
    F = random_transform(rng, bound=2.0)
    cov = moderate_covariance(rng)
    left = GroupGaussian(F, cov, Side.LEFT)
    right = unc.convert_side(left)
    samples = unc.sample_perturbed(left, N_BIG, seed=4)
    est = unc.estimate_covariance(samples, F, Side.RIGHT)
    assert rel_frobenius(est, right.covariance) < 0.05
    direct = unc.estimate_covariance(unc.sample_perturbed(right, N_BIG, seed=5), F, Side.RIGHT)
    assert rel_frobenius(direct, est) < 0.05


def test_convert_side_event_moments_agree(rng):
    F = random_transform(rng, bound=2.0)
    left = GroupGaussian(F, moderate_covariance(rng, scale=0.1), Side.LEFT)
    right = unc.convert_side(left)
    p = Event([1.0, -2.0, 0.5], 0.3)
    a = unc.transform_event_cloud(left, p, N_BIG, seed=1)
    b = unc.transform_event_cloud(right, p, N_BIG, seed=2)
    ya = np.column_stack([a.x, a.t])
    yb = np.column_stack([b.x, b.t])
    scale = np.sqrt(np.diag(np.cov(ya.T)))
    assert np.all(np.abs(ya.mean(0) - yb.mean(0)) < 0.05 * scale)
    assert rel_frobenius(np.cov(yb.T), np.cov(ya.T)) < 0.05


def test_transform_event_cloud_zero_covariance(rng):
    F = random_transform(rng)
    p = Event([1, 2, 3], 4.0)
    cloud = unc.transform_event_cloud(GroupGaussian(F, np.zeros((10, 10))), p, 20, seed=0)
    q = sgal3.act(F, p)
    assert np.array_equal(cloud.x, np.tile(q.x, (20, 1)))
    assert np.array_equal(cloud.t, np.full(20, q.t))
    assert len(cloud) == cloud.metadata["n"] == 20


def test_transform_event_cloud_matches_sample_perturbed(rng):
    g = GroupGaussian(random_transform(rng), moderate_covariance(rng))
    p = Event([0.5, 0, -1], 2.0)
    cloud = unc.transform_event_cloud(g, p, 25, seed=9)
    for i, F in enumerate(unc.sample_perturbed(g, 25, seed=9)):
        q = sgal3.act(F, p)
        assert max_abs(cloud.x[i], q.x) < 1e-12 and cloud.t[i] == q.t


def test_left_panel_is_banana():
    g = unc.panel_gaussian("left")
    cloud = unc.transform_event_cloud(g, unc.PANEL_EVENT, N_BIG, seed=unc.PANEL_SEED)
    assert np.ptp(cloud.t) == 0.0
    x, y = cloud.x[:, 0], cloud.x[:, 1]
    # points bend back toward the rotation centre: x drops quadratically in y
    coeffs = np.polyfit(y, x, 2)
    assert coeffs[0] < -0.03
    assert x.mean() < sgal3.act(g.mean, unc.PANEL_EVENT).x[0]


def test_time_noise_adds_velocity_squared_variance():
    vx = unc.PANEL_MEAN_VELOCITY[0]
    base = unc.transform_event_cloud(unc.panel_gaussian("left"), unc.PANEL_EVENT, N_BIG, seed=1)
    for panel in ("middle", "right"):
        cloud = unc.transform_event_cloud(unc.panel_gaussian(panel), unc.PANEL_EVENT, N_BIG, seed=2)
        added = np.var(cloud.x[:, 0]) - np.var(base.x[:, 0])
        expected = vx**2 * unc.PANEL_SIGMA_IOTA[panel] ** 2
        assert added == pytest.approx(expected, rel=0.10)


def test_linearised_coupling_law():
    sigma = 0.4
    g = GroupGaussian(moving_mean(3.0), unc.diagonal_covariance({IOTA: sigma}))
    H = unc.event_jacobian_xy(g, Event([1.0, 2.0, 0.0], 0.5))
    P = H @ g.covariance @ H.T
    v = np.array([3.0, 0.0])
    assert max_abs(P, sigma**2 * np.outer(v, v)) < 1e-8


def test_ellipse_zero_covariance():
    g = GroupGaussian(moving_mean(), np.zeros((10, 10)))
    e = unc.sigma_ellipse_xy(g, Event([1, 0, 0], 1.0), 3.0)
    assert np.array_equal(e.center, [3.0, 0.0])
    assert max_abs(e.polyline, e.center) == 0.0


def test_ellipse_isotropic_circle():
    sigma = 0.2
    g = GroupGaussian(sgal3.identity(), unc.diagonal_covariance({0: sigma, 1: sigma}))
    e = unc.sigma_ellipse_xy(g, Event([0, 0, 0], 0.0), 3.0)
    assert len(e.polyline) >= 64
    assert np.array_equal(e.polyline[0], e.polyline[-1])
    radii = np.linalg.norm(e.polyline - e.center, axis=1)
    assert max_abs(radii, 3 * sigma) < 1e-8


def test_ellipse_rejects_bad_k():
    g = GroupGaussian(sgal3.identity(), np.eye(10))
    with pytest.raises(ValueError):
        unc.sigma_ellipse_xy(g, Event([0, 0, 0], 0.0), 0.0)


def test_ellipse_contains_middle_panel_cloud():
    g = unc.panel_gaussian("middle")
    cloud = unc.transform_event_cloud(g, unc.PANEL_EVENT, N_BIG, seed=unc.PANEL_SEED)
    inside = unc.mahalanobis_xy(g, unc.PANEL_EVENT, cloud.x[:, :2]) <= 9.0
    assert 0.97 <= inside.mean() <= 1.0


def test_group_gaussian_rejects_asymmetric():
    cov = np.eye(10)
    cov[0, 1] = 0.1
    with pytest.raises(NotPositiveSemidefinite):
        GroupGaussian(sgal3.identity(), cov)
