"""Command-line front end.

Exit codes: 0 ok, 1 selfcheck failure, 2 parse error, 3 domain error (log
branch), 4 I/O error, 5 out-of-order timestamps.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import errors, lie_core, preintegration, selfcheck, sgal3, uncertainty
from .sgal3 import DIM, Event, GalileanTransform
from .uncertainty import GroupGaussian, Side

FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_SELFCHECK = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4
EXIT_ORDER = 5


class ParseError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class CliExit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# -- serialisation ------------------------------------------------------------


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return json.dumps(obj if not isinstance(obj, np.bool_) else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return fmt(obj)


def transform_record(F: GalileanTransform) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "C": F.C.ravel().tolist(),
        "v": F.v.tolist(),
        "r": F.r.tolist(),
        "tau": F.tau,
    }


def tangent_record(xi: np.ndarray) -> dict:
    return {"format_version": FORMAT_VERSION, "xi": np.asarray(xi).tolist()}


def _numbers(obj, field: str, count: int) -> np.ndarray:
    if not isinstance(obj, list):
        raise ParseError(field, f"expected a list of {count} numbers")
    if len(obj) != count:
        raise ParseError(field, f"expected {count} numbers, got {len(obj)}")
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj):
        raise ParseError(field, "entries must be numbers")
    arr = np.array(obj, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParseError(field, "entries must be finite")
    return arr


def _scalar(obj, field: str) -> float:
    if not isinstance(obj, (int, float)) or isinstance(obj, bool) or not np.isfinite(obj):
        raise ParseError(field, "expected a finite number")
    return float(obj)


def check_version(obj: dict, where: str = "format_version") -> None:
    if "format_version" in obj and obj["format_version"] != FORMAT_VERSION:
        raise ParseError(where, f"unsupported version {obj['format_version']!r}")


def parse_record(obj):
    """Parse a transform record or an ``xi`` record.

    Returns a :class:`GalileanTransform` or a 10-vector.
    """
    if not isinstance(obj, dict):
        raise ParseError("record", "expected a JSON object")
    check_version(obj)
    has_xi = "xi" in obj
    transform_keys = [k for k in ("C", "v", "r", "tau") if k in obj]
    if has_xi and transform_keys:
        raise ParseError("record", "give either xi or C/v/r/tau, not both")
    if has_xi:
        return _numbers(obj["xi"], "xi", DIM)
    missing = [k for k in ("C", "v", "r", "tau") if k not in obj]
    if missing:
        raise ParseError(missing[0], "missing field (expected xi or C, v, r, tau)")
    C = _numbers(obj["C"], "C", 9).reshape(3, 3)
    if not lie_core.is_rotation(C):
        raise ParseError("C", "not a rotation matrix (orthonormal, det 1, within 1e-12)")
    return GalileanTransform(C, _numbers(obj["v"], "v", 3), _numbers(obj["r"], "r", 3),
                             _scalar(obj["tau"], "tau"))


def parse_transform(obj, field: str) -> GalileanTransform:
    try:
        rec = parse_record(obj)
    except ParseError as exc:
        raise ParseError(f"{field}.{exc.field}", str(exc).split(": ", 1)[1]) from None
    if isinstance(rec, GalileanTransform):
        return rec
    return sgal3.exp(rec)


def parse_covariance(obj) -> np.ndarray:
    if isinstance(obj, dict):
        sigmas = {}
        for key, value in obj.items():
            try:
                idx = int(key)
            except ValueError:
                raise ParseError(f"covariance.{key}", "diagonal index must be an integer") from None
            if not 0 <= idx < DIM:
                raise ParseError(f"covariance.{key}", "index out of range 0..9")
            sigma = _scalar(value, f"covariance.{key}")
            if sigma < 0:
                raise ParseError(f"covariance.{key}", "sigma must be non-negative")
            sigmas[idx] = sigma
        return uncertainty.diagonal_covariance(sigmas)
    if isinstance(obj, list) and obj and all(isinstance(row, list) for row in obj):
        if len(obj) != DIM:
            raise ParseError("covariance", f"expected {DIM} rows, got {len(obj)}")
        return np.stack([_numbers(row, f"covariance[{i}]", DIM) for i, row in enumerate(obj)])
    return _numbers(obj, "covariance", DIM * DIM).reshape(DIM, DIM)


def parse_event(obj) -> Event:
    if not isinstance(obj, dict):
        raise ParseError("event", "expected an object {x: [3], t: number}")
    if "x" not in obj or "t" not in obj:
        raise ParseError("event", "needs both x and t")
    return Event(_numbers(obj["x"], "event.x", 3), _scalar(obj["t"], "event.t"))


def _positive_int(obj, field: str) -> int:
    if not isinstance(obj, int) or isinstance(obj, bool) or obj < 1:
        raise ParseError(field, "expected a positive integer")
    return obj


@dataclass
class ExperimentConfig:
    gaussian: GroupGaussian
    event: Event
    n: int = uncertainty.PANEL_N
    seed: int = uncertainty.PANEL_SEED
    k: float = 3.0

    @classmethod
    def from_panel(cls, panel: str) -> "ExperimentConfig":
        return cls(uncertainty.panel_gaussian(panel), uncertainty.PANEL_EVENT)

    @classmethod
    def from_json(cls, obj) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ParseError("config", "expected a JSON object")
        check_version(obj)
        if "covariance" not in obj:
            raise ParseError("covariance", "missing field")
        default = uncertainty.panel_gaussian("left")
        mean = parse_transform(obj["mean"], "mean") if "mean" in obj else default.mean
        side = obj.get("side", "right")
        if side not in ("right", "left"):
            raise ParseError("side", "expected 'right' or 'left'")
        cov = parse_covariance(obj["covariance"])
        try:
            gaussian = GroupGaussian(mean, cov, Side(side))
            uncertainty.sqrt_factor(gaussian.covariance)
        except errors.NotPositiveSemidefinite as exc:
            raise ParseError("covariance", str(exc)) from None
        event = parse_event(obj["event"]) if "event" in obj else uncertainty.PANEL_EVENT
        n = _positive_int(obj.get("n", uncertainty.PANEL_N), "n")
        seed = obj.get("seed", uncertainty.PANEL_SEED)
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
            raise ParseError("seed", "expected an integer in [0, 2^64)")
        k = _scalar(obj.get("k", 3.0), "k")
        if k <= 0:
            raise ParseError("k", "must be positive")
        return cls(gaussian, event, n, seed, k)


# -- file writers -------------------------------------------------------------


CLOUD_COLUMNS = ["x", "y", "z", "t_out"] + [f"xi_{i}" for i in range(DIM)]


def gaussian_record(g: GroupGaussian) -> dict:
    mean = transform_record(g.mean)
    del mean["format_version"]
    return {"mean": mean, "covariance": g.covariance.tolist(), "side": g.side.value}


def write_cloud_csv(path: Path, cloud: uncertainty.SampleCloud, g: GroupGaussian) -> None:
    meta = cloud.metadata
    lines = [
        f"# format_version: {FORMAT_VERSION}",
        f"# seed: {meta['seed']}",
        f"# n: {meta['n']}",
        f"# rng: {meta['rng']}",
        f"# event: {dumps(meta['event'])}",
        f"# gaussian: {dumps(gaussian_record(g))}",
        ",".join(CLOUD_COLUMNS),
    ]
    table = np.column_stack([cloud.x, cloud.t, cloud.xi])
    lines.extend(",".join(fmt(v) for v in row) for row in table)
    path.write_text("\n".join(lines) + "\n")


def write_ellipse_csv(path: Path, ellipse: uncertainty.EllipseProjection, k: float) -> None:
    lines = [
        f"# format_version: {FORMAT_VERSION}",
        f"# k: {fmt(k)}",
        f"# center: {fmt(ellipse.center[0])},{fmt(ellipse.center[1])}",
        "x,y",
    ]
    lines.extend(f"{fmt(x)},{fmt(y)}" for x, y in ellipse.polyline)
    path.write_text("\n".join(lines) + "\n")


def read_cloud_csv(path: str | Path) -> tuple[dict, np.ndarray]:
    """Inverse of :func:`write_cloud_csv`: ``#`` metadata and the numeric table."""
    meta = {}
    rows = []
    header = None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
        elif header is None:
            header = line.split(",")
            if header != CLOUD_COLUMNS:
                raise ParseError("header", f"unexpected columns {line!r}")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    if meta.get("format_version") != str(FORMAT_VERSION):
        raise ParseError("format_version", f"unsupported version {meta.get('format_version')!r}")
    return meta, np.array(rows).reshape(-1, len(CLOUD_COLUMNS))


# -- commands -----------------------------------------------------------------


def _load_json(source: str):
    """``source`` is literal JSON, ``-`` for stdin, or a path."""
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip().startswith("{"):
        text = source
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise CliExit(EXIT_IO, f"cannot read {source}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliExit(EXIT_PARSE, f"input: invalid JSON ({exc})") from None


def cmd_exp(args) -> int:
    rec = parse_record(_load_json(args.input))
    if isinstance(rec, GalileanTransform):
        raise ParseError("xi", "exp expects an xi record")
    print(dumps(transform_record(sgal3.exp(rec))))
    return EXIT_OK


def cmd_log(args) -> int:
    rec = parse_record(_load_json(args.input))
    if not isinstance(rec, GalileanTransform):
        raise ParseError("C", "log expects a transform record with C, v, r, tau")
    print(dumps(tangent_record(sgal3.log(rec))))
    return EXIT_OK


def run_banana(config: ExperimentConfig, out: Path) -> dict:
    cloud = uncertainty.transform_event_cloud(config.gaussian, config.event, config.n, config.seed)
    ellipse = uncertainty.sigma_ellipse_xy(config.gaussian, config.event, config.k)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_cloud_csv(out / "cloud.csv", cloud, config.gaussian)
        write_ellipse_csv(out / "ellipse3sigma.csv", ellipse, config.k)
    except OSError as exc:
        raise CliExit(EXIT_IO, f"cannot write to {out}: {exc.strerror or exc}") from None
    return {
        "cloud": str(out / "cloud.csv"),
        "ellipse": str(out / "ellipse3sigma.csv"),
        "n": config.n,
        "seed": config.seed,
        "var_x": float(np.var(cloud.x[:, 0])),
        "var_y": float(np.var(cloud.x[:, 1])),
        "var_t": float(np.var(cloud.t)),
    }


def cmd_banana(args) -> int:
    if args.config:
        config = ExperimentConfig.from_json(_load_json(args.config))
    else:
        config = ExperimentConfig.from_panel(args.panel)
    if args.n is not None:
        config.n = _positive_int(args.n, "--n")
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ParseError("--seed", "expected an integer in [0, 2^64)")
        config.seed = args.seed
    print(dumps(run_banana(config, Path(args.out))))
    return EXIT_OK


def cmd_preintegrate(args) -> int:
    try:
        samples = preintegration.read_imu_csv(args.csv)
    except OSError as exc:
        raise CliExit(EXIT_IO, f"cannot read {args.csv}: {exc.strerror or exc}") from None
    except preintegration.ImuCsvError as exc:
        raise CliExit(EXIT_PARSE, f"imu csv: {exc}") from None
    result = preintegration.preintegrate_sequence(samples)
    rec = transform_record(result.delta)
    rec["total_time"] = result.total_time
    rec["sample_count"] = result.sample_count
    print(dumps(rec))
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    results = selfcheck.run_selfcheck()
    print(selfcheck.format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_SELFCHECK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="galilean", description="SGal(3) maps, uncertainty and preintegration")
    sub = p.add_subparsers(dest="command", required=True)

    src_help = "JSON literal, file path, or - for stdin (default)"
    s = sub.add_parser("exp", help="exponential map of an xi record")
    s.add_argument("input", nargs="?", default="-", help=src_help)
    s.set_defaults(func=cmd_exp)

    s = sub.add_parser("log", help="logarithm of a transform record")
    s.add_argument("input", nargs="?", default="-", help=src_help)
    s.set_defaults(func=cmd_log)

    s = sub.add_parser("banana", help="sample a perturbed event cloud and its 3-sigma ellipse")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--panel", choices=sorted(uncertainty.PANEL_SIGMA_IOTA))
    g.add_argument("--config", help="experiment config JSON (path or literal)")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--n", type=int, help="override sample count")
    s.add_argument("--seed", type=int, help="override seed")
    s.set_defaults(func=cmd_banana)

    s = sub.add_parser("preintegrate", help="compose IMU increments from a CSV log")
    s.add_argument("csv")
    s.set_defaults(func=cmd_preintegrate)

    s = sub.add_parser("selfcheck", help="run the oracle suite")
    s.set_defaults(func=cmd_selfcheck)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except errors.AngleNearPi as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except errors.NonMonotoneTimestamps as exc:
        print(f"ordering error: {exc}", file=sys.stderr)
        return EXIT_ORDER
    except (errors.EmptyStream, errors.NonPositiveDt) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
