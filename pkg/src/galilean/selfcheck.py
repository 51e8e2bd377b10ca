"""Fixed-seed oracle suite behind ``galilean selfcheck``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import lie_core, oracles, sgal3

SEED = 20230401


@dataclass
class CheckResult:
    name: str
    error: float
    tol: float
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tol)


def random_tangent(rng: np.random.Generator, max_norm: float) -> np.ndarray:
    d = rng.standard_normal(sgal3.DIM)
    return d / np.linalg.norm(d) * rng.uniform(0.0, max_norm)


def random_transform(rng: np.random.Generator, bound: float = 10.0) -> sgal3.GalileanTransform:
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    C = lie_core.exp_so3(axis * rng.uniform(0.0, np.pi - 1e-3))
    return sgal3.GalileanTransform(
        C,
        rng.uniform(-bound, bound, 3),
        rng.uniform(-bound, bound, 3),
        rng.uniform(-bound, bound),
    )


def check_so3_series(rng, count=200):
    err = 0.0
    for _ in range(count):
        phi = rng.standard_normal(3)
        phi *= rng.uniform(0.0, 3.0) / np.linalg.norm(phi)
        K = oracles.skew(phi)
        err = max(
            err,
            np.abs(lie_core.exp_so3(phi) - oracles.series_expm(K)).max(),
            np.abs(lie_core.left_jacobian_so3(phi) - oracles.series_sum(K, 1)).max(),
            np.abs(lie_core.e_matrix(phi) - oracles.series_sum(K, 2)).max(),
        )
    return err


def check_exp_series(rng, count=200):
    err = 0.0
    for _ in range(count):
        xi = random_tangent(rng, 10.0)
        ref = oracles.series_expm(oracles.algebra_matrix(xi))
        err = max(err, np.abs(sgal3.exp(xi).as_matrix() - ref).max())
    return err


def check_log_exp(rng, count=200):
    err = 0.0
    for _ in range(count):
        xi = random_tangent(rng, 10.0)
        phi = rng.standard_normal(3)
        xi[sgal3.PHI] = phi / np.linalg.norm(phi) * rng.uniform(0.0, np.pi - 1e-3)
        err = max(err, np.abs(sgal3.log(sgal3.exp(xi)) - xi).max())
    return err


def check_exp_log(rng, count=200):
    err = 0.0
    for _ in range(count):
        F = random_transform(rng)
        err = max(err, np.abs(sgal3.exp(sgal3.log(F)).as_matrix() - F.as_matrix()).max())
    return err


def check_group_axioms(rng, count=200):
    err = 0.0
    I = sgal3.identity()
    for _ in range(count):
        a, b, c = (random_transform(rng) for _ in range(3))
        lhs = sgal3.compose(sgal3.compose(a, b), c).as_matrix()
        rhs = sgal3.compose(a, sgal3.compose(b, c)).as_matrix()
        err = max(
            err,
            np.abs(lhs - rhs).max(),
            np.abs(sgal3.compose(a, I).as_matrix() - a.as_matrix()).max(),
            np.abs(sgal3.compose(a, sgal3.inverse(a)).as_matrix() - np.eye(5)).max(),
            np.abs(sgal3.compose(sgal3.inverse(a), a).as_matrix() - np.eye(5)).max(),
        )
    return err


def check_adjoint_conjugation(rng, count=200):
    err = 0.0
    for _ in range(count):
        F = random_transform(rng)
        err = max(
            err, np.abs(sgal3.adjoint(F) - oracles.conjugation_adjoint(F.as_matrix())).max()
        )
    return err


def check_ad_commutator(rng, count=200):
    err = 0.0
    for _ in range(count):
        xi = random_tangent(rng, 10.0)
        err = max(err, np.abs(sgal3.ad_small(xi) - oracles.commutator_ad(xi)).max())
    return err


def check_adjoint_exp(rng, count=100):
    err = 0.0
    for _ in range(count):
        xi = random_tangent(rng, 3.0)
        ref = oracles.series_expm(sgal3.ad_small(xi))
        err = max(err, np.abs(sgal3.adjoint(sgal3.exp(xi)) - ref).max())
    return err


def jacobian_fd_slope(xi: np.ndarray, direction: np.ndarray,
                      steps=(1e-2, 1e-3, 1e-4)) -> tuple[float, list[float]]:
    """Log-log slope of the first-order residual of the left Jacobian."""
    J = sgal3.left_jacobian_group(xi)
    base_inv = sgal3.inverse(sgal3.exp(xi))
    errors = []
    for h in steps:
        d = h * direction
        lhs = sgal3.log(sgal3.compose(sgal3.exp(xi + d), base_inv))
        errors.append(float(np.linalg.norm(lhs - J @ d)))
    slope = np.polyfit(np.log10(steps), np.log10(errors), 1)[0]
    return float(slope), errors


def check_jacobian_slope(rng, count=20):
    # reported as a shortfall below slope 1.8, so passing means error 0
    worst = 0.0
    for _ in range(count):
        xi = random_tangent(rng, 0.5)
        u = rng.standard_normal(sgal3.DIM)
        slope, _ = jacobian_fd_slope(xi, u / np.linalg.norm(u))
        worst = max(worst, 1.8 - slope)
    return max(worst, 0.0)


CHECKS: list[tuple[str, Callable, float]] = [
    ("so3 closed forms vs series", check_so3_series, 1e-10),
    ("exp vs scaled series", check_exp_series, 1e-10),
    ("log(exp(xi)) == xi", check_log_exp, 1e-9),
    ("exp(log(F)) == F", check_exp_log, 1e-9),
    ("group axioms", check_group_axioms, 1e-12),
    ("adjoint vs conjugation", check_adjoint_conjugation, 1e-10),
    ("ad vs commutator", check_ad_commutator, 1e-12),
    ("Ad(exp xi) vs expm(ad xi)", check_adjoint_exp, 1e-9),
    ("left Jacobian slope >= 1.8", check_jacobian_slope, 0.0),
]


def run_selfcheck(seed: int = SEED) -> list[CheckResult]:
    results = []
    for i, (name, fn, tol) in enumerate(CHECKS):
        rng = np.random.default_rng([seed, i])
        start = time.perf_counter()
        try:
            err = float(fn(rng))
        except Exception:  # a crash is a failed check, not a crashed report
            err = float("inf")
        results.append(CheckResult(name, err, tol, time.perf_counter() - start))
    return results


def format_report(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name:<{width}}  err={r.error:.3e}  tol={r.tol:.0e}  "
                     f"({r.seconds:.2f}s)")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines)
