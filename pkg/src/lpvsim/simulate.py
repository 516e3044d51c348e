"""Signal generation and the three simulation engines.

Two discrete-time engines advance the same internal state xi over a sampled
scheduling trajectory: one applies the precomputed per-step matrices, the
other re-solves the implicit feedback loop around the trapezoidal integrator
block at every step.  Both realize the identical map, so their outputs agree
to machine precision; keeping both is the point, since each checks the other.
A fixed-step RK4 integrator provides the continuous-time reference.

The internal state relates to the physical one by

    xi(k) = (2/Ts) x(k) - r x(k),    r x = A(p) x + B(p) u,

so a simulation started from a physical x(0) seeds
xi(0) = (2/Ts) x(0) - A(p(0)) x(0) - B(p(0)) u(0), which makes the
reconstructed state hit x(0) exactly at k = 0.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .discretize import SINGULAR_RTOL, DiscretizationConfig, det_scale, dt_step_matrices
from .errors import (
    ConfigError,
    DataError,
    DimensionError,
    DomainError,
    WellposednessError,
)
from .model import LpvStateSpace, eval_pmatrix, eval_pmatrix_many

__all__ = [
    "SignalSpec",
    "generate_signal",
    "Scenario",
    "sample_scenario",
    "Trajectory",
    "sigma_initial_state",
    "simulate_dt",
    "simulate_dt_loop_oracle",
    "simulate_ct_reference",
    "read_trajectory_csv",
    "write_trajectory_csv",
]

_SIGNAL_KINDS = ("constant", "step", "sine", "chirp", "csv_column")


@dataclass(frozen=True, eq=False)
class SignalSpec:
    """One scalar channel as a named waveform.

    kind : one of constant, step, sine, chirp, csv_column
    offset : additive baseline, used by every kind
    amplitude : waveform gain (constant uses offset + amplitude)
    f, phase : sine frequency [Hz] and phase [rad]
    t0 : step onset time; the step is 0 before t0 and on from t0 inclusive
    f0, f1, t1 : chirp sweeps linearly from f0 at t=0 to f1 at t=t1
    path, column : CSV source and 0-based value column, linearly
        interpolated between samples and held constant beyond the ends
    """

    kind: str
    offset: float = 0.0
    amplitude: float = 1.0
    f: float = 1.0
    phase: float = 0.0
    t0: float = 0.0
    f0: float = 0.0
    f1: float = 1.0
    t1: float = 1.0
    path: str = ""
    column: int = 0
    table: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in _SIGNAL_KINDS:
            raise ConfigError(f"unknown signal kind {self.kind!r}")
        if self.kind == "sine" and not (self.f >= 0.0):
            raise ConfigError(f"sine frequency must be >= 0, got {self.f}")
        if self.kind == "chirp":
            if not (self.t1 > 0.0):
                raise ConfigError(f"chirp needs t1 > 0, got {self.t1}")
            if self.f1 < self.f0 or self.f0 < 0.0:
                raise ConfigError(
                    f"chirp needs 0 <= f0 <= f1, got f0={self.f0}, f1={self.f1}"
                )

    @classmethod
    def constant(cls, value):
        return cls(kind="constant", offset=float(value), amplitude=0.0)

    @classmethod
    def step(cls, amplitude=1.0, t0=0.0, offset=0.0):
        return cls(kind="step", amplitude=amplitude, t0=t0, offset=offset)

    @classmethod
    def sine(cls, amplitude=1.0, f=1.0, phase=0.0, offset=0.0):
        return cls(kind="sine", amplitude=amplitude, f=f, phase=phase, offset=offset)

    @classmethod
    def chirp(cls, amplitude=1.0, f0=0.0, f1=1.0, t1=1.0, offset=0.0):
        return cls(kind="chirp", amplitude=amplitude, f0=f0, f1=f1, t1=t1, offset=offset)

    @classmethod
    def csv_column(cls, path, column, offset=0.0, amplitude=1.0, table=None):
        return cls(kind="csv_column", path=str(path), column=int(column),
                   offset=offset, amplitude=amplitude, table=table)


def generate_signal(spec: SignalSpec, t) -> np.ndarray:
    """Evaluate one signal on an array of times (vectorized)."""
    t = np.asarray(t, dtype=float)
    if spec.kind == "constant":
        return np.full(t.shape, spec.offset + spec.amplitude)
    if spec.kind == "step":
        return spec.offset + spec.amplitude * (t >= spec.t0).astype(float)
    if spec.kind == "sine":
        return spec.offset + spec.amplitude * np.sin(2.0 * np.pi * spec.f * t + spec.phase)
    if spec.kind == "chirp":
        # instantaneous frequency f0 + (f1-f0) t/t1, hence quadratic phase
        rate = (spec.f1 - spec.f0) / spec.t1
        phase = 2.0 * np.pi * (spec.f0 * t + 0.5 * rate * t * t)
        return spec.offset + spec.amplitude * np.sin(phase)
    if spec.kind == "csv_column":
        if spec.table is None:
            raise DataError(
                f"csv_column signal has no loaded table (path {spec.path!r})"
            )
        tab = np.asarray(spec.table, dtype=float)
        return spec.offset + spec.amplitude * np.interp(t, tab[:, 0], tab[:, 1])
    raise ConfigError(f"unknown signal kind {spec.kind!r}")


@dataclass(frozen=True, eq=False)
class Scenario:
    """Sampled-experiment description: waveforms, start state, duration.

    p : tuple of SignalSpec, one per scheduling dimension
    u : tuple of SignalSpec, one per input channel
    x0 : initial physical state, shape (n_x,)
    t_end : final time; sampling yields k = 0 .. floor(t_end/Ts)
    """

    p: tuple
    u: tuple
    x0: np.ndarray
    t_end: float

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(self.p))
        object.__setattr__(self, "u", tuple(self.u))
        x0 = np.asarray(self.x0, dtype=float).reshape(-1).copy()
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        if not (float(self.t_end) > 0.0):
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        object.__setattr__(self, "t_end", float(self.t_end))

    def p_at(self, t) -> np.ndarray:
        """Scheduling trajectory sampled at times t, shape (len(t), n_p)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.column_stack([generate_signal(s, t) for s in self.p])

    def u_at(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.column_stack([generate_signal(s, t) for s in self.u])


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled signals of one run; every channel is (N, width).

    ``x`` and ``xi`` may be None when state logging was not requested or the
    data came from an input file without state columns.
    """

    ts: float
    p: np.ndarray
    u: np.ndarray
    y: np.ndarray = None
    x: np.ndarray = None
    xi: np.ndarray = None

    def __post_init__(self):
        for name in ("p", "u", "y", "x", "xi"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.ndim != 2:
                    raise DataError(f"channel {name} must be 2-D (N, width)")
                object.__setattr__(self, name, arr)
        n = self.p.shape[0]
        for name in ("u", "y", "x", "xi"):
            arr = getattr(self, name)
            if arr is not None and arr.shape[0] != n:
                raise DataError(
                    f"channel {name} has {arr.shape[0]} samples, expected {n}"
                )

    @property
    def n_steps(self) -> int:
        return self.p.shape[0]

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps) * self.ts

    def channel(self, name: str) -> np.ndarray:
        got = getattr(self, name, None)
        if got is None:
            raise DataError(f"trajectory has no {name!r} channel")
        return got


def sample_scenario(scenario: Scenario, cfg: DiscretizationConfig) -> Trajectory:
    """Sample scenario waveforms on the uniform grid k*Ts up to t_end."""
    n_steps = int(np.floor(scenario.t_end / cfg.ts + 1e-9)) + 1
    t = np.arange(n_steps) * cfg.ts
    return Trajectory(ts=cfg.ts, p=scenario.p_at(t), u=scenario.u_at(t))


def sigma_initial_state(model, cfg, p0, u0, x0) -> np.ndarray:
    """Internal start state that reproduces x0 exactly at the first sample.

    xi(0) = (2/Ts) x0 - A(p(0)) x0 - B(p(0)) u(0).
    """
    x0 = np.asarray(x0, dtype=float).reshape(model.n_x)
    u0 = np.asarray(u0, dtype=float).reshape(model.n_u)
    A0 = eval_pmatrix(model.A, p0)
    B0 = eval_pmatrix(model.B, p0)
    return (2.0 / cfg.ts) * x0 - A0 @ x0 - B0 @ u0


def _first_point_outside(domain, points):
    """Index of the first row leaving the closed box, or None."""
    bad = np.any(points < domain.lower, axis=1) | np.any(
        points > domain.upper, axis=1
    )
    return int(np.argmax(bad)) if bad.any() else None


def _check_run_inputs(model, traj):
    if traj.p.shape[1] != model.n_p:
        raise DimensionError(
            f"scheduling width {traj.p.shape[1]} != n_p {model.n_p}"
        )
    if traj.u.shape[1] != model.n_u:
        raise DimensionError(f"input width {traj.u.shape[1]} != n_u {model.n_u}")
    k = _first_point_outside(model.domain, traj.p)
    if k is not None:
        raise DomainError(
            f"scheduling point {list(map(float, traj.p[k]))} at step {k} "
            "outside the box"
        )


def simulate_dt(model, cfg, traj, x0, record_state=True) -> Trajectory:
    """Run the loop-free per-step matrices over a sampled trajectory.

    Per-step matrices are memoized on the scheduling point's byte pattern,
    so frozen or piecewise-constant trajectories cost one factorization per
    distinct point.

    Raises
    ------
    DomainError
        If any sampled p(k) leaves the scheduling box (checked up front,
        reporting the first offending step).
    WellposednessError
        If I - A(p(k)) Ts/2 is numerically singular; carries the step index.
    """
    _check_run_inputs(model, traj)
    n = traj.n_steps
    y = np.empty((n, model.n_y))
    x = np.empty((n, model.n_x)) if record_state else None
    xis = np.empty((n, model.n_x)) if record_state else None

    xi = sigma_initial_state(model, cfg, traj.p[0], traj.u[0], x0)
    cache = {}
    for k in range(n):
        p_k = traj.p[k]
        key = p_k.tobytes()
        mats = cache.get(key)
        if mats is None:
            try:
                mats = dt_step_matrices(model, p_k, cfg)
            except WellposednessError as exc:
                raise exc.at_step(k, p_k) from None
            cache[key] = mats
        u_k = traj.u[k]
        y[k] = mats.Cxi @ xi + mats.Dxi @ u_k
        if record_state:
            x[k] = mats.Xxi @ xi + mats.Xu @ u_k
            xis[k] = xi
        xi = mats.Axi @ xi + mats.Bxi @ u_k
    return Trajectory(ts=cfg.ts, p=traj.p, u=traj.u, y=y, x=x, xi=xis)


def simulate_dt_loop_oracle(model, cfg, traj, x0, record_state=True) -> Trajectory:
    """Independent engine: re-solve the integrator feedback loop each step.

    The trapezoidal integrator block maps (xi, r x) to (xi+, x); closing
    x -> r x = A x + B u around it gives, at every step, the linear system

        [ I        -(Ts/2) I ] [ x  ]   [ (Ts/2) xi ]
        [ -A(p)     I        ] [ rx ] = [ B(p) u    ]

    followed by xi+ = xi + 2 rx.  No per-point matrices are reused, so this
    path shares no code with :func:`simulate_dt` beyond the model itself.
    """
    _check_run_inputs(model, traj)
    n = traj.n_steps
    n_x = model.n_x
    y = np.empty((n, model.n_y))
    x_log = np.empty((n, n_x)) if record_state else None
    xi_log = np.empty((n, n_x)) if record_state else None

    xi = sigma_initial_state(model, cfg, traj.p[0], traj.u[0], x0)
    eye = np.eye(n_x)
    half = (cfg.ts / 2.0) * eye
    for k in range(n):
        p_k = traj.p[k]
        A_p = eval_pmatrix(model.A, p_k)
        B_p = eval_pmatrix(model.B, p_k)
        loop = np.block([[eye, -half], [-A_p, eye]])
        # same singularity as det(I - A Ts/2), by block elimination
        if abs(np.linalg.det(loop)) < SINGULAR_RTOL * det_scale(A_p, cfg.ts):
            raise WellposednessError(
                f"integrator feedback loop is singular at step {k}",
                A_p=A_p, ts=cfg.ts, step_index=k, p=p_k,
            )
        u_k = traj.u[k]
        rhs = np.concatenate([(cfg.ts / 2.0) * xi, B_p @ u_k])
        sol = np.linalg.solve(loop, rhs)
        x_k, rx_k = sol[:n_x], sol[n_x:]
        C_p = eval_pmatrix(model.C, p_k)
        D_p = eval_pmatrix(model.D, p_k)
        y[k] = C_p @ x_k + D_p @ u_k
        if record_state:
            x_log[k] = x_k
            xi_log[k] = xi
        xi = xi + 2.0 * rx_k
    return Trajectory(ts=cfg.ts, p=traj.p, u=traj.u, y=y, x=x_log, xi=xi_log)


def simulate_ct_reference(model, cfg, scenario, oversample=50) -> Trajectory:
    """Fixed-step RK4 integration of the continuous-time model.

    Integrates with step h = Ts/oversample, evaluating the scenario's p(t)
    and u(t) at the exact stage times, and logs every Ts-multiple.  The
    returned trajectory carries y and x on the sampling grid (xi is None).
    """
    if int(oversample) < 1:
        raise ConfigError(f"oversample must be >= 1, got {oversample}")
    if len(scenario.p) != model.n_p or len(scenario.u) != model.n_u:
        raise DimensionError(
            f"scenario has {len(scenario.p)} p and {len(scenario.u)} u "
            f"channels, model needs {model.n_p} and {model.n_u}"
        )
    oversample = int(oversample)
    samp = sample_scenario(scenario, cfg)
    n_keep = samp.n_steps
    h = cfg.ts / oversample
    n_fine = (n_keep - 1) * oversample

    # stage times: t, t + h/2, t + h for every fine step
    t_fine = np.arange(n_fine) * h
    t_half = t_fine + 0.5 * h
    t_full = t_fine + h
    all_t = np.concatenate([t_fine, t_half, t_full])
    p_all = scenario.p_at(all_t)
    u_all = scenario.u_at(all_t)
    for points, where in ((p_all, all_t), (samp.p, samp.times())):
        k = _first_point_outside(model.domain, points)
        if k is not None:
            raise DomainError(
                f"scheduling point {list(map(float, points[k]))} at t = "
                f"{float(where[k])} outside the box"
            )

    def stacks(points):
        A = eval_pmatrix_many(model.A, points)
        B = eval_pmatrix_many(model.B, points)
        return A, B

    A0, B0 = stacks(p_all[:n_fine])
    Ah, Bh = stacks(p_all[n_fine:2 * n_fine])
    A1, B1 = stacks(p_all[2 * n_fine:3 * n_fine])
    u0 = u_all[:n_fine]
    uh = u_all[n_fine:2 * n_fine]
    u1 = u_all[2 * n_fine:3 * n_fine]

    x = np.asarray(scenario.x0, dtype=float).reshape(model.n_x).copy()
    x_log = np.empty((n_keep, model.n_x))
    x_log[0] = x
    for i in range(n_fine):
        k1 = A0[i] @ x + B0[i] @ u0[i]
        k2 = Ah[i] @ (x + 0.5 * h * k1) + Bh[i] @ uh[i]
        k3 = Ah[i] @ (x + 0.5 * h * k2) + Bh[i] @ uh[i]
        k4 = A1[i] @ (x + h * k3) + B1[i] @ u1[i]
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (i + 1) % oversample == 0:
            x_log[(i + 1) // oversample] = x

    C_all = eval_pmatrix_many(model.C, samp.p)
    D_all = eval_pmatrix_many(model.D, samp.p)
    y = np.einsum("kij,kj->ki", C_all, x_log) + np.einsum(
        "kij,kj->ki", D_all, samp.u
    )
    return Trajectory(ts=cfg.ts, p=samp.p, u=samp.u, y=y, x=x_log, xi=None)


def _fmt(v) -> str:
    # shortest round-trip decimal for a python float
    return repr(float(v))


def write_trajectory_csv(traj: Trajectory, include_state=False) -> str:
    """Render a result trajectory as CSV text.

    Columns are ``k,t`` then y channels, and with ``include_state`` also the
    x and xi channels when the trajectory recorded them.
    """
    if traj.y is None:
        raise DataError("trajectory has no outputs to write")
    header = ["k", "t"]
    blocks = [traj.y]
    header += [f"y{i + 1}" for i in range(traj.y.shape[1])]
    if include_state:
        if traj.x is None or traj.xi is None:
            raise DataError("state logging was not enabled for this run")
        header += [f"x{i + 1}" for i in range(traj.x.shape[1])]
        header += [f"xi{i + 1}" for i in range(traj.xi.shape[1])]
        blocks += [traj.x, traj.xi]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    t = traj.times()
    for k in range(traj.n_steps):
        row = [str(k), _fmt(t[k])]
        for b in blocks:
            row.extend(_fmt(v) for v in b[k])
        w.writerow(row)
    return out.getvalue()


def read_trajectory_csv(text: str, ts: float) -> Trajectory:
    """Parse an input trajectory table ``k,t,p1..pN,u1..uM``.

    The k column must count 0,1,2,... and every t must equal k*ts within
    1e-9; both guard against feeding a table sampled at a different rate.
    """
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise DataError("empty trajectory table")
    header = [h.strip() for h in rows[0]]
    n_pc = sum(1 for h in header if h.startswith("p") and h[1:].isdigit())
    n_uc = sum(1 for h in header if h.startswith("u") and h[1:].isdigit())
    expected = (
        ["k", "t"]
        + [f"p{i + 1}" for i in range(n_pc)]
        + [f"u{i + 1}" for i in range(n_uc)]
    )
    if n_pc == 0 or n_uc == 0 or header != expected:
        raise DataError(
            "trajectory header must be k,t,p1..pN,u1..uM in order, got "
            + ",".join(header)
        )
    p_cols = list(range(2, 2 + n_pc))
    u_cols = list(range(2 + n_pc, 2 + n_pc + n_uc))
    n = len(rows) - 1
    if n < 1:
        raise DataError("trajectory table has a header but no rows")
    p = np.empty((n, len(p_cols)))
    u = np.empty((n, len(u_cols)))
    for j, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise DataError(f"row {j} has {len(row)} cells, expected {len(header)}")
        try:
            k = int(row[0])
            t = float(row[1])
            p[j] = [float(row[i]) for i in p_cols]
            u[j] = [float(row[i]) for i in u_cols]
        except ValueError as exc:
            raise DataError(f"row {j}: {exc}") from None
        if k != j:
            raise DataError(f"row {j} has k = {k}, expected {j}")
        if abs(t - j * ts) > 1e-9:
            raise DataError(
                f"row {j} has t = {t}, expected k*ts = {j * ts} (ts = {ts})"
            )
    return Trajectory(ts=float(ts), p=p, u=u)
