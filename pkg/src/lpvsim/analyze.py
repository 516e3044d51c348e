"""Frozen-scheduling frequency-domain checks, trajectory comparison metrics,
and empirical convergence-order estimation.

Transfer functions only exist for frozen scheduling, so every frequency-domain
statement here is made at one fixed point p.  The central identity is the
frequency warping of the bilinear map: the discretized system evaluated on the
unit circle equals the continuous-time response at the tan-warped frequency,

    G_d(e^{j w Ts}) = G_ct(j * (2/Ts) * tan(w Ts / 2)),

exactly, for every frequency below Nyquist.  ``warping_residual`` measures the
failure of that identity with both sides computed by independent code paths.
"""

from dataclasses import dataclass

import numpy as np

from .discretize import DiscretizationConfig, StepMatrices, dt_step_matrices
from .errors import ConfigError, DimensionError, DomainError
from .model import LpvStateSpace
from .simulate import (
    Scenario,
    sample_scenario,
    simulate_ct_reference,
    simulate_dt,
)

__all__ = [
    "FrequencyResponse",
    "ComparisonMetrics",
    "ConvergenceStudy",
    "log_frequency_grid",
    "freqresp_ct",
    "freqresp_dt",
    "warping_residual",
    "frequency_response_csv",
    "compare_traj",
    "convergence_order",
    "render_convergence_report",
]


@dataclass(frozen=True, eq=False)
class FrequencyResponse:
    """Complex response matrices on a positive, strictly increasing grid.

    omegas : (m,) rad/s
    values : (m, n_y, n_u) complex
    """

    omegas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        omegas = np.asarray(self.omegas, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if omegas.ndim != 1 or values.ndim != 3:
            raise DimensionError("omegas must be 1-D and values (m, n_y, n_u)")
        if values.shape[0] != omegas.size:
            raise DimensionError(
                f"{values.shape[0]} response matrices for {omegas.size} frequencies"
            )
        if omegas.size and not (omegas[0] > 0.0 and np.all(np.diff(omegas) > 0.0)):
            raise ConfigError("frequency grid must be positive and strictly increasing")
        omegas.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "values", values)

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


def log_frequency_grid(cfg: DiscretizationConfig, decades=4, points_per_decade=50):
    """Logarithmic grid ending at 0.9 of the Nyquist angle.

    The top frequency is 0.9 * pi / Ts, safely below the w_max * Ts < pi
    requirement of :func:`freqresp_dt`.
    """
    if decades <= 0 or points_per_decade < 1:
        raise ConfigError("grid needs decades > 0 and points_per_decade >= 1")
    top = 0.9 * np.pi / cfg.ts
    n = int(round(decades * points_per_decade))
    return np.logspace(np.log10(top) - decades, np.log10(top), n)


def _resolve(E, rhs, omega):
    # solve E X = rhs, reporting the frequency at which E lost rank
    try:
        return np.linalg.solve(E, rhs)
    except np.linalg.LinAlgError:
        raise DomainError(
            f"resolvent is singular at omega = {float(omega)!r} rad/s"
        ) from None


def freqresp_ct(model: LpvStateSpace, p, omegas) -> FrequencyResponse:
    """Frozen-p continuous-time response C (jwI - A)^-1 B + D."""
    omegas = np.asarray(omegas, dtype=float)
    A_p, B_p, C_p, D_p = model.matrices_at(p)
    n = model.n_x
    values = np.empty((omegas.size, model.n_y, model.n_u), dtype=complex)
    eye = np.eye(n)
    for i, w in enumerate(omegas):
        X = _resolve(1j * w * eye - A_p, B_p.astype(complex), w)
        values[i] = C_p @ X + D_p
    return FrequencyResponse(omegas=omegas, values=values)


def freqresp_dt(step: StepMatrices, cfg: DiscretizationConfig, omegas) -> FrequencyResponse:
    """Response of one-step update matrices on the unit circle.

    values[i] = Cxi (e^{j w_i Ts} I - Axi)^-1 Bxi + Dxi; frequencies are
    continuous-time rad/s and must satisfy w Ts < pi (below Nyquist).
    """
    omegas = np.asarray(omegas, dtype=float)
    if omegas.size and float(omegas[-1]) * cfg.ts >= np.pi:
        raise ConfigError(
            f"omega * Ts must stay below pi, got {float(omegas[-1]) * cfg.ts!r}"
        )
    n = step.Axi.shape[0]
    n_y, n_u = step.Dxi.shape
    values = np.empty((omegas.size, n_y, n_u), dtype=complex)
    eye = np.eye(n)
    for i, w in enumerate(omegas):
        z = np.exp(1j * w * cfg.ts)
        X = _resolve(z * eye - step.Axi, step.Bxi.astype(complex), w)
        values[i] = step.Cxi @ X + step.Dxi
    return FrequencyResponse(omegas=omegas, values=values)


def warping_residual(model: LpvStateSpace, p, cfg: DiscretizationConfig, omegas) -> float:
    """Max entrywise gap between the DT response and the warped CT response.

    Evaluates G_d at each w and G_ct at (2/Ts) tan(w Ts/2); the bilinear
    map makes the two equal in exact arithmetic, so the return value is a
    pure roundoff measure for this discretization (and a large number for
    any other one).
    """
    omegas = np.asarray(omegas, dtype=float)
    step = dt_step_matrices(model, p, cfg)
    dt = freqresp_dt(step, cfg, omegas)
    warped = (2.0 / cfg.ts) * np.tan(omegas * cfg.ts / 2.0)
    A_p, B_p, C_p, D_p = model.matrices_at(p)
    eye = np.eye(model.n_x)
    gap = 0.0
    for i, w in enumerate(warped):
        X = _resolve(1j * w * eye - A_p, B_p.astype(complex), omegas[i])
        gap = max(gap, float(np.max(np.abs(dt.values[i] - (C_p @ X + D_p)))))
    return gap


def frequency_response_csv(fr: FrequencyResponse) -> str:
    """Render a response as CSV: omega_rads then re/im pairs, channel pairs
    in row-major (output-major) order."""
    m, n_y, n_u = fr.values.shape
    header = ["omega_rads"]
    for i in range(n_y):
        for j in range(n_u):
            header.append(f"reOut{i + 1}In{j + 1}")
            header.append(f"imOut{i + 1}In{j + 1}")
    lines = [",".join(header)]
    for k in range(m):
        row = [repr(float(fr.omegas[k]))]
        for i in range(n_y):
            for j in range(n_u):
                v = fr.values[k, i, j]
                row.append(repr(float(v.real)))
                row.append(repr(float(v.imag)))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ComparisonMetrics:
    """Error summary between two sampled channels.

    relative_to is max(1, peak |a|) so thresholds stay meaningful for both
    tiny and large signals; per_channel holds the max abs error per column.
    """

    max_abs_error: float
    rms_error: float
    relative_to: float
    per_channel: tuple

    def to_json_dict(self) -> dict:
        return {
            "max_abs_error": self.max_abs_error,
            "rms_error": self.rms_error,
            "relative_to": self.relative_to,
            "per_channel": list(self.per_channel),
        }


def compare_traj(a, b, channel="y") -> ComparisonMetrics:
    """Max and RMS entrywise difference of one channel of two trajectories."""
    if abs(a.ts - b.ts) > 1e-12:
        raise ConfigError(f"sampling times differ: {a.ts} vs {b.ts}")
    xa = a.channel(channel)
    xb = b.channel(channel)
    if xa.shape != xb.shape:
        raise DimensionError(
            f"channel {channel!r} shapes differ: {xa.shape} vs {xb.shape}"
        )
    diff = np.abs(xa - xb)
    return ComparisonMetrics(
        max_abs_error=float(np.max(diff)),
        rms_error=float(np.sqrt(np.mean(diff**2))),
        relative_to=float(max(1.0, np.max(np.abs(xa)))),
        per_channel=tuple(float(v) for v in diff.max(axis=0)),
    )


@dataclass(frozen=True)
class ConvergenceStudy:
    """Ts sweep results: per-Ts max error, pairwise orders, fitted slope.

    degenerate is set when the discretization is exact on the scenario (all
    errors at roundoff level), in which case fitted_order is NaN.
    """

    ts_list: tuple
    max_errors: tuple
    pairwise_orders: tuple
    fitted_order: float
    degenerate: bool

    def to_json_dict(self) -> dict:
        return {
            "ts_list": list(self.ts_list),
            "max_errors": list(self.max_errors),
            "pairwise_orders": list(self.pairwise_orders),
            "fitted_order": self.fitted_order,
            "degenerate": self.degenerate,
        }


def convergence_order(
    model: LpvStateSpace,
    scenario: Scenario,
    ts_list,
    oversample=100,
) -> ConvergenceStudy:
    """Empirical order of the discretization against the RK4 reference.

    For each Ts the scenario is simulated discretely and integrated in
    continuous time with a substep tied to the smallest Ts (so every entry
    of the sweep is compared against the same-resolution oracle), recording
    max |y_dt - y_ct| over the sampling grid.

    Parameters
    ----------
    ts_list : decreasing sequence, >= 3 entries, each exactly halving the
        previous one (checked to 1e-9 relative) and dividing t_end
    oversample : RK4 substeps per smallest Ts

    Returns
    -------
    ConvergenceStudy
        fitted_order is the least-squares slope of log error vs log Ts; a
        scenario the rule integrates exactly yields NaN and degenerate=True.
    """
    ts_list = [float(v) for v in ts_list]
    if len(ts_list) < 3:
        raise ConfigError(f"need at least 3 sampling times, got {len(ts_list)}")
    for a, b in zip(ts_list, ts_list[1:]):
        if abs(a / b - 2.0) > 1e-9:
            raise ConfigError(
                f"sampling times must halve exactly, got {a} then {b}"
            )
    for ts in ts_list:
        ratio = scenario.t_end / ts
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ConfigError(
                f"Ts = {ts} does not divide t_end = {scenario.t_end}"
            )
    if int(oversample) < 1:
        raise ConfigError(f"oversample must be >= 1, got {oversample}")

    ts_min = ts_list[-1]
    errors = []
    scale = 1.0
    for ts in ts_list:
        cfg = DiscretizationConfig(ts)
        over = int(round(int(oversample) * ts / ts_min))
        ct = simulate_ct_reference(model, cfg, scenario, oversample=over)
        dt = simulate_dt(
            model, cfg, sample_scenario(scenario, cfg), scenario.x0,
            record_state=False,
        )
        errors.append(float(np.max(np.abs(dt.y - ct.y))))
        scale = max(scale, float(np.max(np.abs(ct.y))))

    degenerate = any(e <= 1e-12 * scale for e in errors)
    with np.errstate(divide="ignore", invalid="ignore"):
        pairwise = tuple(
            float(np.log2(ea / eb)) if eb > 0.0 else float("nan")
            for ea, eb in zip(errors, errors[1:])
        )
    if degenerate:
        fitted = float("nan")
    else:
        slope = np.polyfit(np.log(ts_list), np.log(errors), 1)[0]
        fitted = float(slope)
    return ConvergenceStudy(
        ts_list=tuple(ts_list),
        max_errors=tuple(errors),
        pairwise_orders=pairwise,
        fitted_order=fitted,
        degenerate=degenerate,
    )


def render_convergence_report(study: ConvergenceStudy) -> str:
    """Plain-text sweep table with a trailing machine-readable order line."""
    lines = ["Ts,max_error,pairwise_order"]
    for i, (ts, err) in enumerate(zip(study.ts_list, study.max_errors)):
        order = "nan" if i == 0 else repr(float(study.pairwise_orders[i - 1]))
        lines.append(f"{repr(float(ts))},{repr(float(err))},{order}")
    if study.degenerate:
        lines.append("degenerate=true")
    lines.append(f"fitted_order={repr(float(study.fitted_order))}")
    return "\n".join(lines) + "\n"
