"""Nonlocal source terms P and Q of the Lagrangian rod-wave system.

Both are exponential-kernel integrals of the cell integrand

    a_j = (3 - 2*gamma)/2 * U_j^2 q_j + gamma/2 * h_j,

evaluated at the cell left endpoints.  For piecewise-constant data the
integrals collapse to exact sums over cells (weight dxi, kernel evaluated
with the particle position y at left endpoints):

    P_i =  dxi/2 * sum_j exp(-|y_i - y_j|) a_j
    Q_i = -dxi/2 * ( sum_{j<i} exp(-(y_i - y_j)) a_j
                   - sum_{j>i} exp(-(y_j - y_i)) a_j )

The evaluation cell itself carries kernel sign 0 and drops out of Q (the
signed kernel is odd about the node), while it contributes its full weight
to P.  This node-symmetric rule is what makes Q exactly antisymmetric for
mirror-symmetric states; assigning the cell to either one-sided sum instead
injects an O(dxi) drift that visibly damps traveling waves.  When y is
nondecreasing the two kernel forms agree and the sums admit an O(N)
evaluation through forward/backward prefix recursions whose multipliers are
the incremental factors exp(-(y_k - y_{k-1})); the positions never enter an
exponential on their own, so large |y| cannot overflow.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from .errors import NonMonotoneY
from .state import LagrangianState

logger = logging.getLogger(__name__)

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a normal dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


class SourceTerms(NamedTuple):
    P: np.ndarray
    Q: np.ndarray


def integrand_a(state: LagrangianState) -> np.ndarray:
    """Cell integrand a_j = (3-2*gamma)/2 U_j^2 q_j + gamma/2 h_j."""
    g = state.params.gamma
    U = state.U
    return 0.5 * (3.0 - 2.0 * g) * U * U * state.q + 0.5 * g * state.h


def source_terms_direct(state: LagrangianState) -> SourceTerms:
    """O(N^2) summation; the reference implementation.

    Uses |y_i - y_j| in the kernel so it stays well defined (and bounded)
    even when y is not monotone; for monotone y it coincides with the signed
    kernel form.
    """
    y = state.y
    a = integrand_a(state)
    half = 0.5 * state.grid.dxi
    kernel = np.exp(-np.abs(y[:, None] - y[None, :]))
    P = half * (kernel @ a)
    n = y.size
    # signs[i, j] = +1 for j < i, -1 for j > i, 0 for j = i
    signs = np.tri(n, n, -1) - np.tri(n, n, -1).T
    Q = -half * ((signs * kernel) @ a)
    return SourceTerms(P=P, Q=Q)


@njit(cache=True)
def _prefix_sums(y, a):  # pragma: no cover - compiled
    n = y.shape[0]
    fwd = np.zeros(n)
    bwd = np.zeros(n)
    for k in range(1, n):
        fwd[k] = np.exp(-(y[k] - y[k - 1])) * (fwd[k - 1] + a[k - 1])
    bwd[n - 1] = a[n - 1]
    for k in range(n - 2, -1, -1):
        bwd[k] = a[k] + np.exp(-(y[k + 1] - y[k])) * bwd[k + 1]
    return fwd, bwd


def source_terms_fast(state: LagrangianState) -> SourceTerms:
    """O(N) evaluation via prefix recursions; requires nondecreasing y."""
    y = state.y
    bad = np.nonzero(np.diff(y) < 0.0)[0]
    if bad.size:
        raise NonMonotoneY(state.grid.cell_index(int(bad[0]) + 1))
    a = integrand_a(state)
    fwd, bwd = _prefix_sums(y, a)
    half = 0.5 * state.grid.dxi
    # bwd includes the evaluation cell, which Q must not see
    return SourceTerms(P=half * (fwd + bwd), Q=half * (bwd - a - fwd))


def evaluate_source_terms(
    state: LagrangianState, allow_fallback: bool = True
) -> tuple[SourceTerms, bool]:
    """Fast path with direct-summation fallback on non-monotone positions.

    Returns the terms and whether the fallback was taken.  The fallback keeps
    the solver alive outside the positivity regime, where the particle map
    may fold over.
    """
    try:
        return source_terms_fast(state), False
    except NonMonotoneY as err:
        if not allow_fallback:
            raise
        logger.debug(
            "non-monotone particle positions (first at cell %d); "
            "falling back to direct summation",
            err.index,
        )
        return source_terms_direct(state), True
