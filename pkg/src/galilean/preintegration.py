"""IMU preintegration on SGal(3).

Each sample with angular rate ``omega``, specific force ``a`` held constant
over ``dt`` gives the increment::

    F_dt = exp(((0, a, omega, 1) * dt)^)

and a stream is the left-to-right product of its increments.  Gravity and
biases are the caller's business; ``a`` is consumed as given.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import lie_core, sgal3
from .errors import EmptyStream, NonMonotoneTimestamps, NonPositiveDt
from .sgal3 import GalileanTransform

IMU_CSV_HEADER = ("t", "wx", "wy", "wz", "ax", "ay", "az")


@dataclass(frozen=True, eq=False)
class ImuSample:
    omega: np.ndarray
    a: np.ndarray
    dt: float

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float).reshape(3)
        a = np.array(self.a, dtype=float).reshape(3)
        dt = float(self.dt)
        if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(a)) and np.isfinite(dt)):
            raise ValueError("IMU sample must be finite")
        if dt <= 0.0:
            raise NonPositiveDt(f"dt must be positive, got {dt!r}")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "dt", dt)

    def tangent(self) -> np.ndarray:
        return sgal3.tangent(nu=self.a * self.dt, phi=self.omega * self.dt, iota=self.dt)


@dataclass(frozen=True, eq=False)
class PreintegratedDelta:
    delta: GalileanTransform
    total_time: float
    sample_count: int

    def then(self, other: "PreintegratedDelta") -> "PreintegratedDelta":
        """Delta over this interval followed by ``other``."""
        return PreintegratedDelta(
            sgal3.compose(self.delta, other.delta),
            self.total_time + other.total_time,
            self.sample_count + other.sample_count,
        )


def preintegrate_step(s: ImuSample) -> PreintegratedDelta:
    return PreintegratedDelta(sgal3.exp(s.tangent()), s.dt, 1)


def preintegrate_sequence(stream: Iterable[ImuSample]) -> PreintegratedDelta:
    samples = list(stream)
    if not samples:
        raise EmptyStream("cannot preintegrate an empty stream")
    xi = np.stack([s.tangent() for s in samples])
    C, v, r, tau = sgal3.exp_components(xi)
    acc = (C[0], v[0], r[0], tau[0])
    # per-sample exp is batched; the product itself stays sequential
    for i in range(1, len(samples)):
        acc = sgal3.compose_components(acc, (C[i], v[i], r[i], tau[i]))
    total = 0.0
    for s in samples:
        total += s.dt
    return PreintegratedDelta(GalileanTransform(*acc), total, len(samples))


def se23_pattern_step(s: ImuSample) -> GalileanTransform:
    """Single-step increment with the ``E nu iota`` position term dropped.

    This is what an extended-pose (SE_2(3)) style exponential produces from
    the same tangent; the time entry is kept so the two are comparable.
    """
    xi = s.tangent()
    phi = xi[sgal3.PHI]
    D = lie_core.left_jacobian_so3(phi)
    return GalileanTransform(
        lie_core.exp_so3(phi), D @ xi[sgal3.NU], D @ xi[sgal3.RHO], xi[sgal3.IOTA]
    )


def samples_from_table(times: Sequence[float], omegas, accels) -> list[ImuSample]:
    """Zero-order hold: interval ``[t_i, t_{i+1})`` uses the readings at ``t_i``.

    The last row only closes the final interval.
    """
    times = np.asarray(times, dtype=float)
    omegas = np.asarray(omegas, dtype=float).reshape(-1, 3)
    accels = np.asarray(accels, dtype=float).reshape(-1, 3)
    if len(times) < 2:
        raise EmptyStream("need at least two timestamps to form an interval")
    dts = np.diff(times)
    bad = np.flatnonzero(dts <= 0.0)
    if bad.size:
        i = int(bad[0])
        raise NonMonotoneTimestamps(
            f"timestamps must increase strictly: row {i + 2} (t={times[i + 1]!r}) "
            f"follows t={times[i]!r}"
        )
    return [ImuSample(omegas[i], accels[i], dts[i]) for i in range(len(dts))]


class ImuCsvError(ValueError):
    pass


def read_imu_csv(path: str | Path) -> list[ImuSample]:
    """Read ``t,wx,wy,wz,ax,ay,az`` rows into samples.

    ``#`` lines are comments; a ``# format_version: N`` line must say 1.
    """
    rows = []
    header = None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                _check_version_comment(stripped, lineno)
                continue
            fields = next(csv.reader([stripped]))
            fields = [f.strip() for f in fields]
            if header is None:
                if tuple(fields) != IMU_CSV_HEADER:
                    raise ImuCsvError(
                        f"line {lineno}: expected header {','.join(IMU_CSV_HEADER)!r}, "
                        f"got {stripped!r}"
                    )
                header = fields
                continue
            if len(fields) != len(IMU_CSV_HEADER):
                raise ImuCsvError(
                    f"line {lineno}: expected {len(IMU_CSV_HEADER)} fields, got {len(fields)}"
                )
            try:
                values = [float(f) for f in fields]
            except ValueError:
                raise ImuCsvError(f"line {lineno}: non-numeric field in {stripped!r}") from None
            if not np.all(np.isfinite(values)):
                raise ImuCsvError(f"line {lineno}: non-finite value")
            rows.append(values)
    if header is None:
        raise ImuCsvError("missing header line")
    if not rows:
        raise ImuCsvError("no data rows")
    table = np.array(rows)
    return samples_from_table(table[:, 0], table[:, 1:4], table[:, 4:7])


def _check_version_comment(line: str, lineno: int) -> None:
    body = line.lstrip("#").strip()
    if body.startswith("format_version"):
        _, _, value = body.partition(":")
        if value.strip() != "1":
            raise ImuCsvError(f"line {lineno}: unsupported format_version {value.strip()!r}")
