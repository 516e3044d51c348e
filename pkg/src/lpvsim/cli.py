"""Command-line front end.

Seven subcommands wire model files into the library: ``check`` (sampled
well-posedness sweep), ``discretize`` (per-step matrices at a frozen point),
``simulate`` and ``loop-simulate`` (the two discrete engines), ``freqresp``
(frozen-p responses plus the warping residual), ``compare`` (cross-engine
error metrics with a threshold), and ``converge`` (Ts sweep report).

Models are JSON files; ``--model`` also accepts a bundled example name.
Signals use a small inline grammar, e.g. ``--u "sine:amp=1,f=0.5"`` (see
``--help`` of the simulate command).  Every failure prints one line
``E_CODE: detail`` to stderr; exit status is 1 for usage, parse, and I/O
problems, 2 for a well-posedness failure during an operation, and 3 when a
check or threshold fails.
"""

import argparse
import csv
import io
import json
import math
import pathlib
import sys

import numpy as np

from .analyze import (
    compare_traj,
    convergence_order,
    freqresp_ct,
    freqresp_dt,
    frequency_response_csv,
    log_frequency_grid,
    render_convergence_report,
    warping_residual,
)
from .discretize import (
    DiscretizationConfig,
    dt_step_matrices,
    tustin_frozen,
    wellposedness_check,
)
from .errors import (
    ConfigError,
    DataError,
    DimensionError,
    LpvError,
    WellposednessError,
)
from .fixtures import FIXTURE_NAMES, fixture_path
from .model import parse_model
from .simulate import (
    Scenario,
    SignalSpec,
    read_trajectory_csv,
    sample_scenario,
    simulate_dt,
    simulate_dt_loop_oracle,
    write_trajectory_csv,
)

SCHEMA_VERSION = 1

_SIGNAL_HELP = (
    "signal grammar: const:VALUE | step:amp=,t0=,offset= | "
    "sine:amp=,f=,phase=,offset= | chirp:amp=,f0=,f1=,t1=,offset= | "
    "csv:path=,col=,offset=,amp= (time in column 0, value in column col, "
    "linear interpolation, ends held); a bare number is a constant"
)

_SIGNAL_GRAMMAR = {
    "const": ("value",),
    "step": ("amp", "t0", "offset"),
    "sine": ("amp", "f", "phase", "offset"),
    "chirp": ("amp", "f0", "f1", "t1", "offset"),
    "csv": ("path", "col", "offset", "amp"),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse normally exits(2) on bad usage; route through the E_PARSE path
    def error(self, message):
        raise _UsageError(message)


def _jsonable(obj):
    """JSON-safe copy: numpy to native, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isfinite(f):
            return f
        if math.isnan(f):
            return "nan"
        return "inf" if f > 0 else "-inf"
    return obj


def _json_text(payload) -> str:
    return json.dumps(_jsonable(payload), indent=1) + "\n"


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_file(path, what):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {what} {str(path)!r}: {exc}") from None


def _load_model(spec):
    path = pathlib.Path(spec)
    if not path.exists() and spec in FIXTURE_NAMES:
        path = fixture_path(spec)
    return parse_model(_read_file(path, "model file"))


def _floats(text, what):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(
            f"{what} must be comma-separated numbers, got {text!r}"
        ) from None
    if not vals:
        raise ConfigError(f"{what} is empty")
    return vals


def _parse_x0(text, n_x):
    if text is None:
        return np.zeros(n_x)
    vals = _floats(text, "--x0")
    if len(vals) != n_x:
        raise DimensionError(f"--x0 has {len(vals)} entries, model needs {n_x}")
    return np.array(vals)


def _frozen_p(text, model):
    if text is None:
        if not model.is_constant:
            raise ConfigError(
                "--p is required when the model depends on the scheduling vector"
            )
        return model.domain.midpoint()
    vals = _floats(text, "--p")
    if len(vals) != model.n_p:
        raise DimensionError(f"--p has {len(vals)} entries, model needs {model.n_p}")
    return np.array(vals)


def _load_signal_table(path, col):
    rows = [
        r
        for r in csv.reader(io.StringIO(_read_file(path, "signal table")))
        if r and any(c.strip() for c in r)
    ]
    if rows:
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]  # header row
    if not rows:
        raise DataError(f"signal table {path!r} has no data rows")
    try:
        data = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise DataError(f"signal table {path!r}: {exc}") from None
    if data.ndim != 2 or col < 1 or col >= data.shape[1]:
        raise DataError(
            f"signal table {path!r} has no value column {col} "
            f"(column 0 is time, values in 1..{data.shape[1] - 1})"
        )
    order = np.argsort(data[:, 0], kind="stable")
    return np.column_stack([data[order, 0], data[order, col]])


def parse_signal_text(text) -> SignalSpec:
    """Parse one inline signal description (see _SIGNAL_HELP)."""
    text = text.strip()
    if ":" not in text:
        try:
            return SignalSpec.constant(float(text))
        except ValueError:
            raise ConfigError(
                f"signal {text!r} has no kind prefix; {_SIGNAL_HELP}"
            ) from None
    kind, body = text.split(":", 1)
    kind = kind.strip()
    if kind not in _SIGNAL_GRAMMAR:
        raise ConfigError(
            f"unknown signal kind {kind!r}; expected one of "
            + ", ".join(_SIGNAL_GRAMMAR)
        )
    allowed = _SIGNAL_GRAMMAR[kind]
    body = body.strip()
    kv = {}
    if kind == "const" and body and "=" not in body:
        kv["value"] = body
    elif body:
        for part in body.split(","):
            key, eq, value = part.partition("=")
            key = key.strip()
            if not eq or not key:
                raise ConfigError(f"signal option {part!r} is not key=value")
            if key not in allowed:
                raise ConfigError(
                    f"signal kind {kind!r} does not take {key!r} "
                    f"(takes {', '.join(allowed)})"
                )
            if key in kv:
                raise ConfigError(f"duplicate signal option {key!r}")
            kv[key] = value.strip()

    def num(key, default=0.0):
        if key not in kv:
            return default
        try:
            return float(kv[key])
        except ValueError:
            raise ConfigError(
                f"signal option {key}={kv[key]!r} is not a number"
            ) from None

    if kind == "const":
        return SignalSpec.constant(num("value", 0.0))
    if kind == "step":
        return SignalSpec.step(
            amplitude=num("amp", 1.0), t0=num("t0", 0.0), offset=num("offset", 0.0)
        )
    if kind == "sine":
        return SignalSpec.sine(
            amplitude=num("amp", 1.0), f=num("f", 1.0),
            phase=num("phase", 0.0), offset=num("offset", 0.0),
        )
    if kind == "chirp":
        return SignalSpec.chirp(
            amplitude=num("amp", 1.0), f0=num("f0", 0.0),
            f1=num("f1", 1.0), t1=num("t1", 1.0), offset=num("offset", 0.0),
        )
    if "path" not in kv:
        raise ConfigError("csv signal needs path=FILE")
    col = int(num("col", 1.0))
    table = _load_signal_table(kv["path"], col)
    return SignalSpec.csv_column(
        kv["path"], col, offset=num("offset", 0.0), amplitude=num("amp", 1.0),
        table=table,
    )


def _scenario_from_args(model, args, ts):
    if args.p:
        specs_p = tuple(parse_signal_text(s) for s in args.p)
        if len(specs_p) != model.n_p:
            raise DimensionError(
                f"{len(specs_p)} --p signals given, model needs {model.n_p}"
            )
    else:
        if not model.is_constant:
            raise ConfigError(
                "--p is required when the model depends on the scheduling vector"
            )
        specs_p = tuple(SignalSpec.constant(float(v)) for v in model.domain.midpoint())
    if not args.u:
        raise ConfigError("give --u signals (or --traj with a trajectory table)")
    specs_u = tuple(parse_signal_text(s) for s in args.u)
    if len(specs_u) != model.n_u:
        raise DimensionError(
            f"{len(specs_u)} --u signals given, model needs {model.n_u}"
        )
    if getattr(args, "steps", None) is not None:
        if args.t_end is not None:
            raise ConfigError("give --steps or --t-end, not both")
        if args.steps < 2:
            raise ConfigError(f"--steps must be >= 2, got {args.steps}")
        t_end = (args.steps - 1) * ts
    elif args.t_end is not None:
        t_end = args.t_end
    else:
        raise ConfigError("give --t-end (or --steps) with signal specs")
    return Scenario(
        p=specs_p, u=specs_u, x0=_parse_x0(args.x0, model.n_x), t_end=t_end
    )


def _input_trajectory(model, args, cfg):
    """Trajectory plus x0 from either --traj or inline signal specs."""
    x0 = _parse_x0(args.x0, model.n_x)
    if args.traj:
        if args.p or args.u:
            raise ConfigError("--traj replaces --p/--u signals; give one or the other")
        traj = read_trajectory_csv(_read_file(args.traj, "trajectory table"), cfg.ts)
        return traj, x0
    scen = _scenario_from_args(model, args, cfg.ts)
    return sample_scenario(scen, cfg), scen.x0


def _step_blocks(m):
    return {
        "Axi": m.Axi, "Bxi": m.Bxi, "Cxi": m.Cxi,
        "Dxi": m.Dxi, "Xxi": m.Xxi, "Xu": m.Xu,
    }


def cmd_check(args):
    model = _load_model(args.model)
    cfg = DiscretizationConfig(args.ts)
    report = wellposedness_check(
        model, cfg, grid_per_dim=args.grid, random_samples=args.samples,
        seed=args.seed,
    )
    payload = {"schema_version": SCHEMA_VERSION, "command": "check"}
    payload.update(report.to_json_dict())
    _emit(_json_text(payload), args.out)
    if not report.passed:
        first = list(report.singular_points[0])
        print(
            f"E_WELLPOSED: {len(report.singular_points)} singular point(s) "
            f"in the sweep, first at p={first}",
            file=sys.stderr,
        )
        return 3
    return 0


def cmd_discretize(args):
    model = _load_model(args.model)
    cfg = DiscretizationConfig(args.ts)
    p = _frozen_p(args.p, model)
    a = dt_step_matrices(model, p, cfg)
    b = tustin_frozen(model, p, cfg)
    gaps = (
        np.max(np.abs(a.Axi - b.Axi)),
        np.max(np.abs(a.Bxi - (2.0 / cfg.ts) * b.Bxi)),
        np.max(np.abs(a.Cxi - (cfg.ts / 2.0) * b.Cxi)),
        np.max(np.abs(a.Dxi - b.Dxi)),
    )
    scale = max(
        1.0, *(float(np.max(np.abs(x))) for x in (a.Axi, a.Bxi, a.Cxi, a.Dxi))
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "discretize",
        "ts": cfg.ts,
        "p": list(p),
        "wprime": _step_blocks(a),
        "tustin": _step_blocks(b),
        "similarity_residual": float(max(gaps)) / scale,
    }
    _emit(_json_text(payload), args.out)
    return 0


def _cmd_simulate(args, engine):
    model = _load_model(args.model)
    cfg = DiscretizationConfig(args.ts)
    traj, x0 = _input_trajectory(model, args, cfg)
    out = engine(model, cfg, traj, x0)
    _emit(write_trajectory_csv(out, include_state=args.emit_state), args.out)
    return 0


def cmd_simulate(args):
    return _cmd_simulate(args, simulate_dt)


def cmd_loop_simulate(args):
    return _cmd_simulate(args, simulate_dt_loop_oracle)


def cmd_freqresp(args):
    model = _load_model(args.model)
    cfg = DiscretizationConfig(args.ts)
    p = _frozen_p(args.p, model)
    grid = log_frequency_grid(
        cfg, decades=args.decades, points_per_decade=args.points_per_decade
    )
    ct = freqresp_ct(model, p, grid)
    dt = freqresp_dt(dt_step_matrices(model, p, cfg), cfg, grid)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "freqresp",
        "ts": cfg.ts,
        "p": list(p),
        "omega_min": float(grid[0]),
        "omega_max": float(grid[-1]),
        "n_points": int(grid.size),
        "warping_residual": warping_residual(model, p, cfg, grid),
    }
    if args.out:
        ct_path = f"{args.out}_ct.csv"
        dt_path = f"{args.out}_dt.csv"
        # basenames keep the JSON byte-identical across output directories
        payload["ct_csv"] = pathlib.PurePath(ct_path).name
        payload["dt_csv"] = pathlib.PurePath(dt_path).name
        _emit(frequency_response_csv(ct), ct_path)
        _emit(frequency_response_csv(dt), dt_path)
        _emit(_json_text(payload), f"{args.out}.json")
    else:
        _emit(_json_text(payload), None)
    return 0


def cmd_compare(args):
    model = _load_model(args.model)
    cfg = DiscretizationConfig(args.ts)
    traj, x0 = _input_trajectory(model, args, cfg)
    a = simulate_dt(model, cfg, traj, x0)
    b = simulate_dt_loop_oracle(model, cfg, traj, x0)
    metrics = compare_traj(a, b, "y")
    passed = metrics.max_abs_error <= args.tol * metrics.relative_to
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "compare",
        "tol": args.tol,
    }
    payload.update(metrics.to_json_dict())
    payload["passed"] = passed
    _emit(_json_text(payload), args.out)
    if not passed:
        print(
            f"E_THRESHOLD: max_abs_error {metrics.max_abs_error!r} exceeds "
            f"tol * relative_to = {args.tol * metrics.relative_to!r}",
            file=sys.stderr,
        )
        return 3
    return 0


def cmd_converge(args):
    model = _load_model(args.model)
    ts_list = _floats(args.ts_list, "--ts-list")
    args.steps = None
    scen = _scenario_from_args(model, args, ts_list[-1])
    study = convergence_order(model, scen, ts_list, oversample=args.oversample)
    _emit(render_convergence_report(study), args.out)
    return 0


def _add_model_ts(sp, ts=True):
    sp.add_argument(
        "--model", required=True,
        help="model JSON file, or a bundled name: " + ", ".join(FIXTURE_NAMES),
    )
    if ts:
        sp.add_argument("--ts", type=float, required=True,
                        help="sampling time in seconds")


def _add_scenario(sp, traj=True):
    sp.add_argument("--p", action="append", metavar="SPEC",
                    help="scheduling signal, one per dimension; " + _SIGNAL_HELP)
    sp.add_argument("--u", action="append", metavar="SPEC",
                    help="input signal, one per channel")
    sp.add_argument("--x0", help="initial state, comma-separated (default zeros)")
    sp.add_argument("--t-end", type=float, help="final time in seconds")
    if traj:
        sp.add_argument("--steps", type=int,
                        help="number of samples instead of --t-end")
        sp.add_argument("--traj", help="input trajectory CSV (k,t,p...,u...)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lpvsim",
        description="Discretize and simulate LPV state-space models with the "
        "bilinear method that keeps the continuous-time matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="sampled well-posedness sweep over the box")
    _add_model_ts(sp)
    sp.add_argument("--grid", type=int, default=11, help="grid points per dimension")
    sp.add_argument("--samples", type=int, default=100, help="extra random draws")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--out", help="write the JSON report here (default stdout)")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("discretize", help="per-step matrices at a frozen point")
    _add_model_ts(sp)
    sp.add_argument("--p", help="frozen scheduling point, comma-separated "
                    "(optional for constant models)")
    sp.add_argument("--out", help="write the JSON blocks here (default stdout)")
    sp.set_defaults(func=cmd_discretize)

    for name, fn in (("simulate", cmd_simulate), ("loop-simulate", cmd_loop_simulate)):
        sp = sub.add_parser(
            name,
            help="run the %s engine over a scenario or trajectory table"
            % ("loop-free" if name == "simulate" else "loop-solving"),
        )
        _add_model_ts(sp)
        _add_scenario(sp)
        sp.add_argument("--emit-state", action="store_true",
                        help="append x and xi columns to the output CSV")
        sp.add_argument("--out", help="write the output CSV here (default stdout)")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("freqresp", help="frozen-p responses and warping residual")
    _add_model_ts(sp)
    sp.add_argument("--p", help="frozen scheduling point, comma-separated")
    sp.add_argument("--decades", type=float, default=4.0)
    sp.add_argument("--points-per-decade", type=int, default=50)
    sp.add_argument("--out", help="output prefix: writes PREFIX.json, "
                    "PREFIX_ct.csv, PREFIX_dt.csv (default: JSON to stdout)")
    sp.set_defaults(func=cmd_freqresp)

    sp = sub.add_parser("compare", help="run both engines and compare outputs")
    _add_model_ts(sp)
    _add_scenario(sp)
    sp.add_argument("--tol", type=float, default=1e-9,
                    help="relative threshold on max |y_a - y_b|")
    sp.add_argument("--out", help="write the metrics JSON here (default stdout)")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("converge", help="discretization-order sweep report")
    sp.add_argument(
        "--model", required=True,
        help="model JSON file, or a bundled name: " + ", ".join(FIXTURE_NAMES),
    )
    _add_scenario(sp, traj=False)
    sp.add_argument("--ts-list", required=True,
                    help="comma-separated halving sampling times, e.g. 0.2,0.1,0.05")
    sp.add_argument("--oversample", type=int, default=100,
                    help="RK4 substeps per smallest Ts")
    sp.add_argument("--out", help="write the text report here (default stdout)")
    sp.set_defaults(func=cmd_converge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"E_PARSE: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except WellposednessError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 2
    except LpvError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"E_IO: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
