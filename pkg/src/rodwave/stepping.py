"""Time integrators for the semi-discrete Lagrangian system.

The workhorse schemes compose implicit-midpoint solves of the two sub-flows:

    lie_trotter    Phi2_dt o Phi1_dt                 (order 1)
    strang         Phi1_{dt/2} o Phi2_dt o Phi1_{dt/2}   (order 2, symmetric)

The midpoint rule satisfies b_i a_ij + b_j a_ji = b_i b_j, so each substep
conserves the per-cell quadratic invariants exactly; the source terms are
recomputed at every midpoint iterate (no lagging), which the conservation
argument requires.  An explicit Euler step and an embedded Dormand-Prince
4(5) pair are provided as non-conservative comparators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    Tangent,
    apply_tangent,
    state_midpoint,
    vector_field_full,
    vector_field_g1,
    vector_field_g2,
)
from .errors import FixedPointDiverged, StepSizeUnderflow
from .source_terms import evaluate_source_terms
from .state import LagrangianState, distance_f

SCHEMES = ("lie_trotter", "strang", "explicit_euler", "adaptive_rk")


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    scheme: str = "strang"
    fp_tol: float = 1e-12          # fixed-point residual tolerance (distance_f)
    fp_max_iter: int = 50
    rk_rel_tol: float = 1e-6
    rk_abs_tol: float = 1e-9

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.fp_tol > 0:
            raise ValueError("fp_tol must be positive")
        if self.fp_max_iter < 1:
            raise ValueError("fp_max_iter must be >= 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")


@dataclass
class StepReport:
    """Bookkeeping for one step (or one adaptive segment)."""

    fp_iterations: tuple[int, ...] = ()
    final_residual: float = 0.0
    monotonicity_fallback: bool = False
    accepted: int = 0
    rejected: int = 0

    def merge(self, other: "StepReport") -> "StepReport":
        return StepReport(
            fp_iterations=self.fp_iterations + other.fp_iterations,
            final_residual=max(self.final_residual, other.final_residual),
            monotonicity_fallback=self.monotonicity_fallback or other.monotonicity_fallback,
            accepted=self.accepted + other.accepted,
            rejected=self.rejected + other.rejected,
        )


_FIELDS = {"g1": vector_field_g1, "g2": vector_field_g2}


def midpoint_substep(
    state: LagrangianState, dt: float, which: str, cfg: StepperConfig
) -> tuple[LagrangianState, StepReport]:
    """Solve Z = Y + dt*G_k((Z+Y)/2) by fixed-point iteration from Z=Y.

    The residual is distance_f between successive iterates.  Raises
    FixedPointDiverged when |dt| is too large for the contraction to hold.
    """
    field_fn = _FIELDS[which]
    z = state
    fallback = False
    residual = math.inf
    for m in range(1, cfg.fp_max_iter + 1):
        mid = state_midpoint(state, z)
        terms, fb = evaluate_source_terms(mid)
        fallback = fallback or fb
        z_next = apply_tangent(state, field_fn(mid, terms), dt)
        residual = distance_f(z_next, z)
        z = z_next
        if residual <= cfg.fp_tol:
            return z, StepReport(
                fp_iterations=(m,),
                final_residual=residual,
                monotonicity_fallback=fallback,
            )
        if not math.isfinite(residual):
            raise FixedPointDiverged(m, residual)
    raise FixedPointDiverged(cfg.fp_max_iter, residual)


def step_lie_trotter(
    state: LagrangianState, cfg: StepperConfig, dt: float | None = None
) -> tuple[LagrangianState, StepReport]:
    dt = cfg.dt if dt is None else dt
    s1, r1 = midpoint_substep(state, dt, "g1", cfg)
    s2, r2 = midpoint_substep(s1, dt, "g2", cfg)
    return s2, r1.merge(r2)


def step_strang(
    state: LagrangianState, cfg: StepperConfig, dt: float | None = None
) -> tuple[LagrangianState, StepReport]:
    dt = cfg.dt if dt is None else dt
    s1, r1 = midpoint_substep(state, 0.5 * dt, "g1", cfg)
    s2, r2 = midpoint_substep(s1, dt, "g2", cfg)
    s3, r3 = midpoint_substep(s2, 0.5 * dt, "g1", cfg)
    return s3, r1.merge(r2).merge(r3)


def _euler_step(
    state: LagrangianState, dt: float
) -> tuple[LagrangianState, bool]:
    terms, fb = evaluate_source_terms(state)
    return apply_tangent(state, vector_field_full(state, terms), dt), fb


def step_explicit_euler(
    state: LagrangianState, cfg: StepperConfig, dt: float | None = None
) -> LagrangianState:
    """Forward Euler; does not conserve the invariants (contrast scheme)."""
    new, _ = _euler_step(state, cfg.dt if dt is None else dt)
    return new


# ---------------------------------------------------------------------------
# Embedded Dormand-Prince 4(5) comparator
# ---------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_DP_E = _DP_B5 - _DP_B4


def _pack(state: LagrangianState) -> np.ndarray:
    return np.concatenate(state.field_arrays())


def _unpack(vec: np.ndarray, template: LagrangianState) -> LagrangianState:
    n = template.n_cells
    parts = vec.reshape(6, n)
    return template.replace(
        zeta=parts[0], U=parts[1], H=parts[2], v=parts[3], w=parts[4], h=parts[5]
    )


def step_adaptive_rk(
    state: LagrangianState,
    t_target: float,
    cfg: StepperConfig,
    on_accept=None,
) -> tuple[LagrangianState, StepReport]:
    """Integrate the full field to ``t_target`` with an embedded 4(5) pair.

    Standard PI step-size control on a scaled RMS error norm.  ``on_accept``
    (if given) is called as on_accept(t, state) after every accepted step.
    Raises StepSizeUnderflow when the controller cannot satisfy the
    tolerances.
    """
    if t_target <= 0:
        return state, StepReport()
    template = state
    fallback = False

    def rhs(vec: np.ndarray) -> np.ndarray:
        nonlocal fallback
        s = _unpack(vec, template)
        terms, fb = evaluate_source_terms(s)
        fallback = fallback or fb
        tan = vector_field_full(s, terms)
        return np.concatenate((tan.zeta, tan.U, tan.H, tan.v, tan.w, tan.h))

    y = _pack(state)
    t = 0.0
    h = min(cfg.dt, t_target)
    h_floor = 1e-14 * max(1.0, t_target)
    err_prev = 1.0
    accepted = 0
    rejected = 0
    k = np.empty((7, y.size))

    while t < t_target:
        h = min(h, t_target - t)
        if h < h_floor:
            raise StepSizeUnderflow(
                f"step size {h:.3e} below floor {h_floor:.3e} at t={t:.6g}"
            )
        k[0] = rhs(y)
        for s in range(1, 7):
            k[s] = rhs(y + h * (_DP_A[s] @ k[:s]))
        y_new = y + h * (_DP_B5 @ k)
        err_vec = h * (_DP_E @ k)
        scale = cfg.rk_abs_tol + cfg.rk_rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        with np.errstate(over="ignore", invalid="ignore"):
            err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if err <= 1.0:
            t += h
            y = y_new
            accepted += 1
            if on_accept is not None:
                on_accept(t, _unpack(y, template))
            # PI controller (order 5): safety * err^-0.14 * err_prev^0.08
            fac = 0.9 * err ** -0.14 * err_prev ** 0.08 if err > 0 else 5.0
            err_prev = max(err, 1e-10)
        else:
            # non-finite estimates shrink hard and retry; a persistent
            # failure ends at the step-size floor above
            rejected += 1
            fac = 0.2 if not np.isfinite(err) else max(0.2, 0.9 * err ** -0.2)
        h *= min(5.0, max(0.2, fac))

    return _unpack(y, template), StepReport(
        monotonicity_fallback=fallback, accepted=accepted, rejected=rejected
    )


# ---------------------------------------------------------------------------
# Time loop
# ---------------------------------------------------------------------------

_FIXED_STEPPERS = {
    "lie_trotter": step_lie_trotter,
    "strang": step_strang,
}


def plan_steps(t_final: float, dt: float) -> list[float]:
    """Uniform steps of size dt, with one shortened final step if needed."""
    if t_final <= 0:
        return []
    n_full = int(math.floor(t_final / dt + 1e-9))
    steps = [dt] * n_full
    rem = t_final - n_full * dt
    if rem > 1e-9 * max(1.0, t_final):
        steps.append(rem)
    return steps


def evolve(
    state: LagrangianState,
    t_final: float,
    cfg: StepperConfig,
    observers=(),
    observe_stride: int = 1,
):
    """Drive the time loop, invoking observers along the way.

    Observers are callables obs(step_index, t, state, report) invoked at
    t=0 (report None), after every ``observe_stride``-th step, and at the
    final step.  Returns (final state, list of per-step StepReports).
    Fully deterministic for a given configuration.
    """
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    if callable(observers):
        observers = (observers,)
    for obs in observers:
        obs(0, 0.0, state, None)
    reports: list[StepReport] = []
    steps = plan_steps(t_final, cfg.dt)
    t = 0.0

    if cfg.scheme == "adaptive_rk":
        # Land exactly on the fixed-scheme observation times.
        for j, dt_j in enumerate(steps, start=1):
            t += dt_j
            state, report = step_adaptive_rk(state, dt_j, cfg)
            reports.append(report)
            if j % observe_stride == 0 or j == len(steps):
                for obs in observers:
                    obs(j, t, state, report)
        return state, reports

    for j, dt_j in enumerate(steps, start=1):
        t += dt_j
        if cfg.scheme == "explicit_euler":
            state, fb = _euler_step(state, dt_j)
            report = StepReport(monotonicity_fallback=fb)
        else:
            state, report = _FIXED_STEPPERS[cfg.scheme](state, cfg, dt_j)
        reports.append(report)
        if j % observe_stride == 0 or j == len(steps):
            for obs in observers:
                obs(j, t, state, report)
    return state, reports
