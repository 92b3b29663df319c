"""Eulerian views of Lagrangian states, error metrics and diagnostics.

The solution graph is the point set (y_i, U_i) — no interpolation, since
convergence makes statements about exactly these points.  Cells where q
collapses map to (near-)repeated x values: vertical segments marking energy
concentration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFit, GridMismatch
from .state import LagrangianState, invariants
from .stepping import StepReport

DEFAULT_Q_FLOOR = 1e-8


@dataclass
class EulerianGraph:
    """Point set (x, u) with a concentration flag per point."""

    x: np.ndarray
    u: np.ndarray
    concentrated: np.ndarray  # bool mask: q below threshold


@dataclass
class DensityPoints:
    """Pointwise density ratios; flagged (value = nan) where q < q_floor."""

    x: np.ndarray
    value: np.ndarray
    concentrated: np.ndarray


def to_graph(state: LagrangianState, q_floor: float = DEFAULT_Q_FLOOR) -> EulerianGraph:
    return EulerianGraph(
        x=state.y.copy(),
        u=state.U.copy(),
        concentrated=state.q < q_floor,
    )


def _density(state, numerator, q_floor):
    if not q_floor > 0:
        raise ValueError("q_floor must be positive")
    q = state.q
    mask = q < q_floor
    value = np.divide(numerator, q, out=np.full_like(q, np.nan), where=~mask)
    return DensityPoints(x=state.y.copy(), value=value, concentrated=mask)


def energy_density_points(
    state: LagrangianState, q_floor: float = DEFAULT_Q_FLOOR
) -> DensityPoints:
    """(u^2 + u_x^2) pulled back to the graph: the ratio h/q."""
    return _density(state, state.h, q_floor)


def particle_density_points(
    state: LagrangianState, q_floor: float = DEFAULT_Q_FLOOR
) -> DensityPoints:
    """Particle density 1/q (reciprocal Jacobian of the flow map)."""
    return _density(state, np.ones(state.n_cells), q_floor)


def sup_graph_error(a: LagrangianState, b: LagrangianState) -> float:
    """max_i of the Euclidean distance between matched graph points."""
    if a.grid != b.grid:
        raise GridMismatch(f"grids differ: {a.grid} vs {b.grid}")
    return float(np.max(np.hypot(a.y - b.y, a.U - b.U)))


def exact_peakon_error(
    state: LagrangianState, t: float, c: float, x0: float = 0.0
) -> float:
    """sup_i |U_i - c exp(-|y_i - x0 - c t|)| (graph-aligned, gamma = 1)."""
    exact = c * np.exp(-np.abs(state.y - x0 - c * t))
    return float(np.max(np.abs(state.U - exact)))


def convergence_order(points) -> float:
    """Least-squares slope of log(error) against log(resolution)."""
    pts = [(float(r), float(e)) for r, e in points]
    if len(pts) < 3:
        raise DegenerateFit(f"need >= 3 points, got {len(pts)}")
    res = np.array([p[0] for p in pts])
    err = np.array([p[1] for p in pts])
    if np.any(res <= 0) or np.any(err <= 0):
        raise DegenerateFit("resolutions and errors must be positive")
    if np.ptp(np.log(res)) == 0.0:
        raise DegenerateFit("all resolutions identical")
    slope, _ = np.polyfit(np.log(res), np.log(err), 1)
    return float(slope)


@dataclass
class DiagnosticsRow:
    t: float
    total_energy: float
    min_q: float
    min_h: float
    max_inv_drift: float
    fp_iters_max: int


@dataclass
class DiagnosticsRecorder:
    """evolve() observer accumulating one row per observation time."""

    rows: list[DiagnosticsRow] = field(default_factory=list)
    _I0: np.ndarray | None = None

    def __call__(self, step: int, t: float, state: LagrangianState, report: StepReport | None):
        I = invariants(state)
        if self._I0 is None:
            self._I0 = I
        self.rows.append(
            DiagnosticsRow(
                t=t,
                total_energy=float(state.grid.dxi * np.sum(state.h)),
                min_q=float(np.min(state.q)),
                min_h=float(np.min(state.h)),
                max_inv_drift=float(np.max(np.abs(I - self._I0))),
                fp_iters_max=max(report.fp_iterations) if report and report.fp_iterations else 0,
            )
        )

    @property
    def max_invariant_drift(self) -> float:
        return max(r.max_inv_drift for r in self.rows)

    @property
    def min_q_overall(self) -> float:
        return min(r.min_q for r in self.rows)

    @property
    def min_h_overall(self) -> float:
        return min(r.min_h for r in self.rows)
