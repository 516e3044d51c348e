"""Per-step discretization matrices for CT LPV models.

The bilinear (trapezoidal/Tustin-class) discretization used here keeps the
continuous-time matrices A(p), B(p), C(p), D(p) and pushes all sampling-time
dependence into a fixed integrator block plus one frozen resolvent

    Phi(p) = (I - A(p) * Ts/2)^-1,

which exists iff det(I - A(p) Ts/2) != 0.  Everything in this module is a
pure function of its arguments:

* :func:`phi` -- the resolvent itself, via an LU solve.
* :func:`rinv_matrices` -- the parameter-independent trapezoidal integrator
  block [[I, 2I], [Ts/2 I, Ts/2 I]] acting on (xi, r x).
* :func:`sigma_step` -- the loop-free update blocks obtained by solving the
  instantaneous feedback through the integrator block in closed form:

      xi(k+1) = (I + Phi A Ts) xi(k) + 2 Phi ubar(k)
      x(k)    = Phi Ts/2 xi(k) + Phi Ts/2 ubar(k),     ubar = B(p) u

* :func:`dt_step_matrices` -- the blocks above composed with B, C, D into a
  single-state-update form.
* :func:`tustin_frozen` -- the classical Tustin state-space blocks at frozen
  p; related to the former by the constant similarity xi = (2/Ts) x.
* :func:`wellposedness_check` -- a deterministic sampled sweep of the
  determinant condition over the scheduling box (vertices + grid + seeded
  random draws).  Sampling cannot certify the condition for all p; the
  report says exactly what was checked.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, WellposednessError
from .model import LpvStateSpace, eval_pmatrix, validate_point

__all__ = [
    "DiscretizationConfig",
    "SigmaRealization",
    "StepMatrices",
    "WellposednessReport",
    "phi",
    "sigma_step",
    "dt_step_matrices",
    "tustin_frozen",
    "rinv_matrices",
    "wellposedness_check",
]

#: |det(I - A Ts/2)| below SINGULAR_RTOL * max(1, max|A| * Ts/2) is singular.
SINGULAR_RTOL = 1e-12


def _read_only(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DiscretizationConfig:
    """Sampling configuration; ``ts`` is the sampling time in seconds."""

    ts: float

    def __post_init__(self):
        if not (float(self.ts) > 0.0):
            raise ConfigError(f"sampling time must be positive, got {self.ts}")
        object.__setattr__(self, "ts", float(self.ts))


@dataclass(frozen=True, eq=False)
class SigmaRealization:
    """Loop-free update blocks at one frozen scheduling point.

    [xi(k+1); x(k)] = [[M11, M12], [M21, M22]] [xi(k); ubar(k)] with
    ubar(k) = B(p(k)) u(k).  M21 and M22 are the same array (both equal
    Phi * Ts/2, computed once).
    """

    M11: np.ndarray  # I + Phi A Ts
    M12: np.ndarray  # 2 Phi
    M21: np.ndarray  # Phi Ts/2
    M22: np.ndarray  # Phi Ts/2 (same array as M21)


@dataclass(frozen=True, eq=False)
class StepMatrices:
    """One-step update, output, and state-reconstruction matrices.

    xi(k+1) = Axi xi(k) + Bxi u(k)
    y(k)    = Cxi xi(k) + Dxi u(k)
    x(k)    = Xxi xi(k) + Xu  u(k)

    For the Tustin form the stored state is x itself (Xxi = I, Xu = 0), so
    one stepping code path serves both discretizations.
    """

    Axi: np.ndarray
    Bxi: np.ndarray
    Cxi: np.ndarray
    Dxi: np.ndarray
    Xxi: np.ndarray
    Xu: np.ndarray


def det_scale(A_p: np.ndarray, ts: float) -> float:
    """Magnitude reference for the singularity threshold of I - A*Ts/2."""
    return max(1.0, float(np.max(np.abs(A_p))) * ts / 2.0)


def phi(A_p: np.ndarray, cfg: DiscretizationConfig) -> np.ndarray:
    """Resolvent ``Phi = (I - A_p * Ts/2)^-1`` via a factorization solve.

    Parameters
    ----------
    A_p : ndarray, shape (n_x, n_x)
        Frozen state matrix A(p).
    cfg : DiscretizationConfig

    Returns
    -------
    ndarray
        Phi with residual ``max|(I - A_p Ts/2) Phi - I| <= 1e-10``.

    Raises
    ------
    WellposednessError
        If ``|det(I - A_p Ts/2)|`` falls below ``1e-12 * max(1, |A_p| Ts/2)``.
    """
    A_p = np.asarray(A_p, dtype=float)
    n = A_p.shape[0]
    M = np.eye(n) - A_p * (cfg.ts / 2.0)
    d = float(np.linalg.det(M))
    if abs(d) < SINGULAR_RTOL * det_scale(A_p, cfg.ts):
        raise WellposednessError(
            f"|det(I - A(p)*Ts/2)| = {abs(d):.3e} is numerically zero "
            f"(Ts = {cfg.ts})",
            A_p=A_p,
            ts=cfg.ts,
        )
    return np.linalg.solve(M, np.eye(n))


def sigma_step(model: LpvStateSpace, p, cfg: DiscretizationConfig) -> SigmaRealization:
    """Loop-free update blocks of the discretization at scheduling point p.

    Raises
    ------
    DomainError
        If p lies outside the model's scheduling box.
    WellposednessError
        Propagated from :func:`phi`.
    """
    if not validate_point(model.domain, p):
        raise DomainError(
            f"scheduling point {[float(v) for v in np.asarray(p, float)]} "
            "outside the box"
        )
    A_p = eval_pmatrix(model.A, p)
    Phi = phi(A_p, cfg)
    half = _read_only(Phi * (cfg.ts / 2.0))
    return SigmaRealization(
        M11=_read_only(np.eye(model.n_x) + (Phi @ A_p) * cfg.ts),
        M12=_read_only(2.0 * Phi),
        M21=half,
        M22=half,
    )


def dt_step_matrices(model: LpvStateSpace, p, cfg: DiscretizationConfig) -> StepMatrices:
    """Full per-step matrices: the loop-free blocks composed with B, C, D.

    The induced update is xi(k+1) = Axi xi + Bxi u, y = Cxi xi + Dxi u, and
    the physical state is reconstructed as x = Xxi xi + Xu u.
    """
    sig = sigma_step(model, p, cfg)
    B_p = eval_pmatrix(model.B, p)
    C_p = eval_pmatrix(model.C, p)
    D_p = eval_pmatrix(model.D, p)
    Xu = sig.M22 @ B_p
    return StepMatrices(
        Axi=sig.M11,
        Bxi=_read_only(sig.M12 @ B_p),
        Cxi=_read_only(C_p @ sig.M21),
        Dxi=_read_only(C_p @ Xu + D_p),
        Xxi=sig.M21,
        Xu=_read_only(Xu),
    )


def tustin_frozen(model: LpvStateSpace, p, cfg: DiscretizationConfig) -> StepMatrices:
    """Classical Tustin blocks at frozen p, packed as :class:`StepMatrices`.

    Ad = Phi (I + A Ts/2), Bd = Phi B Ts, Cd = C Phi,
    Dd = D + C Phi B Ts/2; the stored state is x itself (Xxi = I, Xu = 0).
    """
    if not validate_point(model.domain, p):
        raise DomainError(
            f"scheduling point {[float(v) for v in np.asarray(p, float)]} "
            "outside the box"
        )
    A_p, B_p, C_p, D_p = model.matrices_at(p)
    Phi = phi(A_p, cfg)
    n = model.n_x
    PhiB = Phi @ B_p
    return StepMatrices(
        Axi=_read_only(Phi @ (np.eye(n) + A_p * (cfg.ts / 2.0))),
        Bxi=_read_only(PhiB * cfg.ts),
        Cxi=_read_only(C_p @ Phi),
        Dxi=_read_only(D_p + (C_p @ PhiB) * (cfg.ts / 2.0)),
        Xxi=_read_only(np.eye(n)),
        Xu=_read_only(np.zeros((n, model.n_u))),
    )


def rinv_matrices(n_x: int, cfg: DiscretizationConfig) -> np.ndarray:
    """Trapezoidal integrator block ``[[I, 2I], [Ts/2 I, Ts/2 I]]``.

    Acts on the stacked vector (xi(k), r x(k)) and returns
    (xi(k+1), x(k)); identity blocks have size ``n_x``.
    """
    if n_x < 1:
        raise ConfigError(f"n_x must be >= 1, got {n_x}")
    eye = np.eye(n_x)
    half = (cfg.ts / 2.0) * eye
    return np.block([[eye, 2.0 * eye], [half, half]])


@dataclass(frozen=True)
class WellposednessReport:
    """Sampled evidence for the determinant condition over the box.

    ``passed`` is true iff no sampled point fell below the singularity
    threshold.  Sampling order is vertices, then the row-major grid, then
    seeded random draws, so identical inputs reproduce the report
    bit-for-bit.
    """

    ts: float
    samples_checked: int
    min_abs_det: float
    argmin_p: tuple
    max_condition_number: float
    singular_points: tuple
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "ts": self.ts,
            "samples_checked": self.samples_checked,
            "min_abs_det": self.min_abs_det,
            "argmin_p": list(self.argmin_p),
            "max_condition_number": self.max_condition_number,
            "singular_points": [list(q) for q in self.singular_points],
            "passed": self.passed,
        }


def wellposedness_check(
    model: LpvStateSpace,
    cfg: DiscretizationConfig,
    grid_per_dim: int,
    random_samples: int,
    seed: int,
) -> WellposednessReport:
    """Sweep det(I - A(p) Ts/2) over box vertices, a uniform grid, and
    seeded uniform random draws.

    Records the minimum |det| and where it occurred, the largest 2-norm
    condition number of I - A(p) Ts/2, and every sampled point whose |det|
    fell below ``1e-12 * max(1, max|A(p)| * Ts/2)``.  A failing condition
    yields ``passed=False``, never an exception.

    Parameters
    ----------
    grid_per_dim : int
        Endpoint-inclusive uniform grid points per scheduling dimension
        (>= 2).
    random_samples : int
        Extra uniform draws inside the box (>= 0).
    seed : int
        RNG seed; fixed seed means a bit-identical report.
    """
    if grid_per_dim < 2:
        raise ConfigError(f"grid_per_dim must be >= 2, got {grid_per_dim}")
    if random_samples < 0:
        raise ConfigError(f"random_samples must be >= 0, got {random_samples}")
    dom = model.domain
    blocks = [dom.vertices(), dom.grid(grid_per_dim)]
    if random_samples > 0:
        rng = np.random.default_rng(seed)
        blocks.append(rng.uniform(dom.lower, dom.upper, size=(random_samples, dom.n_p)))
    points = np.vstack(blocks)

    eye = np.eye(model.n_x)
    min_abs_det = np.inf
    argmin_p = tuple(float(v) for v in points[0])
    max_cond = 0.0
    singular = []
    for row in points:
        A_p = eval_pmatrix(model.A, row)
        M = eye - A_p * (cfg.ts / 2.0)
        absdet = abs(float(np.linalg.det(M)))
        s = np.linalg.svd(M, compute_uv=False)
        cond = np.inf if s[-1] == 0.0 else float(s[0] / s[-1])
        if absdet < min_abs_det:
            min_abs_det = absdet
            argmin_p = tuple(float(v) for v in row)
        if cond > max_cond:
            max_cond = cond
        if absdet < SINGULAR_RTOL * det_scale(A_p, cfg.ts):
            singular.append(tuple(float(v) for v in row))
    return WellposednessReport(
        ts=cfg.ts,
        samples_checked=points.shape[0],
        min_abs_det=float(min_abs_det),
        argmin_p=argmin_p,
        max_condition_number=max_cond,
        singular_points=tuple(singular),
        passed=not singular,
    )
