"""Command-line front end.

Exit codes: 0 all checks pass, 1 a violation (or failed calibration),
2 usage or validation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .operators import (OperatorError, OperatorSpec, SpacePair, apply, opnorm_lower)
from .quadrature import QuadratureError, Resolution, depth_for
from .series import DEFAULT_N, PowerSeries, SeriesError, build
from .spaces import NormReport, SpaceError, SpaceSpec, bmoa_norm, hardy_norm, morrey_norm
from . import verify as V

CONFIG_ENV = "MORREYKIT_CONFIG"
GRID_FLOOR = 16


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    N: int = DEFAULT_N
    q: int = 8
    j_quad: int = 24
    m: int = 1024
    depth: int | None = None
    format: str = "json"
    output: str | None = None
    corpus: str = "standard"
    calibration: str | None = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.N < GRID_FLOOR:
            raise UsageError(f"N: truncation must be >= {GRID_FLOOR}, got {self.N}")
        if self.depth is None:
            object.__setattr__(self, "depth", depth_for(self.N, GRID_FLOOR))
        if self.depth < 0 or self.N * 2.0 ** -self.depth < GRID_FLOOR:
            raise UsageError(f"depth: grid coupling N*2^-J >= {GRID_FLOOR} violated "
                             f"(N={self.N}, J={self.depth})")
        if self.q < 1:
            raise UsageError(f"q: must be >= 1, got {self.q}")
        if self.j_quad < 2:
            raise UsageError(f"j_quad: must be >= 2, got {self.j_quad}")
        if self.m < 8:
            raise UsageError(f"m: must be >= 8, got {self.m}")
        if self.format not in ("json", "csv"):
            raise UsageError(f"format: expected json or csv, got {self.format!r}")
        if self.corpus != "standard":
            raise UsageError(f"corpus: only 'standard' is available, got {self.corpus!r}")
        if self.threads < 1:
            raise UsageError(f"threads: must be >= 1, got {self.threads}")

    @property
    def resolution(self) -> Resolution:
        return Resolution(q=self.q, j_quad=self.j_quad, m=self.m, depth=self.depth)


_CONFIG_TYPES = {f.name: f.type for f in fields(RunConfig)}


def read_config(path: str | os.PathLike) -> dict:
    """``key=value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().replace("-", "_"), value.strip()
        if not sep or key not in _CONFIG_TYPES:
            raise UsageError(f"config {path}:{lineno}: unknown or malformed entry {line!r}")
        out[key] = _coerce(key, value)
    return out


def _coerce(key: str, value: str):
    if key in ("N", "q", "j_quad", "m", "depth", "seed", "threads"):
        try:
            return int(value)
        except ValueError:
            raise UsageError(f"{key}: expected an integer, got {value!r}") from None
    return value


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        values.update(read_config(path))
    for name in _CONFIG_TYPES:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    return RunConfig(**values)


# ---------------------------------------------------------------------------

def load_series(source: str, N: int) -> PowerSeries:
    """A named builder, a JSON file path, or ``-`` for stdin."""
    if source == "-":
        return PowerSeries.from_json(json.load(sys.stdin))
    p = Path(source)
    if source.endswith(".json") or p.is_file():
        try:
            return PowerSeries.from_json(json.loads(p.read_text()))
        except OSError as exc:
            raise UsageError(f"series: cannot read {source}: {exc.strerror}") from None
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"series: malformed series file {source}: {exc}") from None
    return build(source, N)


def _emit(text: str, cfg: RunConfig):
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_norm(args, cfg: RunConfig) -> int:
    try:
        space = SpaceSpec.parse(args.space)
    except SpaceError as exc:
        raise UsageError(f"--space: {exc}") from None
    f = load_series(args.series, cfg.N)
    res = cfg.resolution
    if space.kind == "hardy":
        if args.form not in (None, "circle-sup"):
            raise UsageError(f"--form: Hardy norms use circle-sup, got {args.form!r}")
        rep = hardy_norm(f, space.param, res)
    elif space.kind == "bmoa":
        rep = bmoa_norm(f, args.form or "mobius", res)
    else:
        rep = morrey_norm(f, space.param, args.form or "box", res)
    if cfg.format == "json":
        _emit(rep.to_json() + "\n", cfg)
    else:
        _emit(_csv(NormReport.CSV_HEADER, [rep.csv_row()]), cfg)
    return 0


def cmd_apply(args, cfg: RunConfig) -> int:
    op = OperatorSpec(args.op, load_series(args.g, cfg.N))
    out = apply(op, load_series(args.f, cfg.N))
    if cfg.format == "json":
        _emit(json.dumps(out.to_json()) + "\n", cfg)
    else:
        rows = [[n, repr(float(c.real)), repr(float(c.imag))] for n, c in enumerate(out.coeffs)]
        _emit(_csv(("n", "re", "im"), rows), cfg)
    return 0


def cmd_opnorm(args, cfg: RunConfig) -> int:
    pair = SpacePair.parse(args.pair)
    op = OperatorSpec(args.op, load_series(args.g, cfg.N))
    est = opnorm_lower(op, pair, args.family, cfg.resolution, cfg.N)
    doc = est.as_dict()
    if est.lower == 0.0 and est.comparator == 0.0:
        doc["verdict"] = "degenerate-pass"
    elif est.comparator == 0.0:
        doc["verdict"] = "violation"
    else:
        doc["verdict"] = "measured"
    if cfg.format == "json":
        _emit(json.dumps(doc, sort_keys=True, default=_jsonable) + "\n", cfg)
    else:
        keys = ("lower", "comparator", "ratio", "family", "unit_bound", "flag",
                "refinement_delta", "verdict")
        _emit(_csv(keys, [[_cell(doc[k]) for k in keys]]), cfg)
    return 1 if doc["verdict"] == "violation" else 0


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    return float(x)


def _cell(x):
    return repr(float(x)) if isinstance(x, float) else x


def _context(cfg: RunConfig) -> V.Context:
    return V.Context(cfg.resolution, cfg.N, cfg.seed, cfg.threads)


def _names(items) -> list:
    items = items or ["all"]
    if "all" in items:
        return V.check_names()
    for n in items:
        if n not in V.CHECKS:
            raise UsageError(f"check: unknown {n!r}; expected one of {V.check_names()} or all")
    return list(items)


def cmd_verify(args, cfg: RunConfig) -> int:
    names = _names(args.checks)
    ctx = _context(cfg)
    windows, raws = None, None
    if args.calibrate:
        doc, raws = V.calibrate(ctx, names, args.lam, args.p)
        Path(args.calibrate).write_text(V.dump_windows(doc))
        windows = V.load_windows(V.dump_windows(doc))
    elif cfg.calibration:
        try:
            text = Path(cfg.calibration).read_text()
        except OSError as exc:
            raise UsageError(f"calibration: cannot read {cfg.calibration}: {exc.strerror}") from None
        windows = V.load_windows(text, ctx)
    missing = [n for n in names if V.is_windowed(n)] if windows is None else []
    if missing:
        raise UsageError(f"calibration required for {', '.join(missing)} "
                         "(pass --calibration FILE or --calibrate FILE)")
    tables = V.run(names, ctx, windows, args.lam, args.p, raws)
    if cfg.format == "json":
        _emit(json.dumps([t.as_dict() for t in tables], sort_keys=True) + "\n", cfg)
    else:
        body = "".join(t.to_csv(header=(i == 0)) for i, t in enumerate(tables))
        _emit(body, cfg)
    for t in tables:
        s = t.summary()
        print(f"{t.check}: {'PASS' if t.passed else 'FAIL'} rows={s['rows']} "
              f"verdicts={s['verdicts']}", file=sys.stderr)
    return 0 if all(t.passed for t in tables) else 1


def cmd_calibrate(args, cfg: RunConfig) -> int:
    names = _names(args.checks)
    target = cfg.output or cfg.calibration
    if not target:
        raise UsageError("calibrate: --output (or calibration=...) is required")
    doc, _ = V.calibrate(_context(cfg), names, args.lam, args.p)
    Path(target).write_text(V.dump_windows(doc))
    print(f"wrote {target}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------

def _float(text: str) -> float:
    if text.lower() in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--config", help=f"key=value config file (default: ${CONFIG_ENV})")
    g.add_argument("--N", "-N", dest="N", type=int, help="truncation degree (default 256)")
    g.add_argument("--q", type=int, help="Gauss-Legendre order per radial panel")
    g.add_argument("--j-quad", dest="j_quad", type=int, help="dyadic radial panels")
    g.add_argument("--m", type=int, help="angular trapezoid nodes")
    g.add_argument("--depth", "-J", dest="depth", type=int, help="sup-grid depth J")
    g.add_argument("--format", choices=("json", "csv"))
    g.add_argument("--output", "-o", help="write to this file instead of stdout")
    g.add_argument("--seed", type=int, help="seed for random corpus rows (default 0)")
    g.add_argument("--threads", type=int, help="worker threads for row evaluation")
    g.add_argument("--calibration", help="equivalence-window file")
    g.add_argument("--corpus", help="corpus name (standard)")

    p = argparse.ArgumentParser(prog="morreykit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    n = sub.add_parser("norm", parents=[common], help="norm of a series")
    n.add_argument("--space", required=True, help="hardy:<p>, bmoa, morrey:<lambda>")
    n.add_argument("--form", choices=("box", "mobius", "log", "boundary", "garsia", "circle-sup"))
    n.add_argument("--series", required=True, help="named builder or series JSON file")
    n.set_defaults(func=cmd_norm)

    a = sub.add_parser("apply", parents=[common], help="apply Tg, Ig or Mg")
    a.add_argument("--op", required=True, choices=("Tg", "Ig", "Mg"))
    a.add_argument("--g", required=True)
    a.add_argument("--f", required=True)
    a.set_defaults(func=cmd_apply)

    o = sub.add_parser("opnorm", parents=[common], help="operator norm lower estimate")
    o.add_argument("--op", required=True, choices=("Tg", "Ig", "Mg"))
    o.add_argument("--g", required=True)
    o.add_argument("--pair", required=True, help="morrey:<lambda> or hardy:<p>")
    o.add_argument("--family", choices=("fb", "Fb", "hb", "kernel"))
    o.set_defaults(func=cmd_opnorm)

    for name, func, helptext in (("verify", cmd_verify, "run verification checks"),
                                 ("calibrate", cmd_calibrate, "write equivalence windows")):
        v = sub.add_parser(name, parents=[common], help=helptext)
        v.add_argument("checks", nargs="*", help=f"check names or 'all' ({', '.join(V.CHECKS)})")
        v.add_argument("--lambda", dest="lam", type=_float, help="Morrey index for λ checks")
        v.add_argument("--p", dest="p", type=_float, help="Hardy exponent for p checks")
        if name == "verify":
            v.add_argument("--calibrate", metavar="FILE",
                           help="calibrate first, write FILE and check against it")
        v.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = build_config(args)
        return args.func(args, cfg)
    except (UsageError, SeriesError, SpaceError, OperatorError, QuadratureError,
            V.VerifyError) as exc:
        msg = str(exc)
        if isinstance(exc, V.CalibrationError):
            print(f"morreykit: calibration failed: {msg}", file=sys.stderr)
            return 1
        print(f"morreykit: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
