"""Sequential collocation iteration and solution evaluation.

The approximate homogenized solution is the partial series

    v_n(z, t) = sum_i B_i Psi_i(z, t),
    B_i = sum_{k <= i} xi_ik M(z_k, t_k, v_{k-1}(z_k, t_k), d_z v_{k-1}),

built in one sequential pass: M at step k is evaluated on the partial sum
available at that moment and cached.  Because Psi_i = sum_k xi_ik psi_k,
the whole series collapses to v_n = sum_k beta_k psi_k with
beta = xi^T B, which is how evaluation is implemented.

Orthonormality of the Psi_i makes ||v_n||^2 = sum B_i^2 with exact
telescoping ||v_{n+1}||^2 = ||v_n||^2 + B_{n+1}^2; the same norm is also
computable directly from the Gram matrix, and the solver exposes both as
a consistency diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import OrthoBasis
from .errors import DivergenceError, DomainError
from .problem import HomogenizedProblem, eval_M


@dataclass(frozen=True)
class Solution:
    """Finished approximate solution in the homogenized variable, plus the
    homogenizer needed to map back to the original unknown."""

    basis: OrthoBasis
    b_coeffs: np.ndarray          # B_i over active basis indices
    problem: HomogenizedProblem
    n: int

    @property
    def beta(self) -> np.ndarray:
        """Coefficients of v_n in the raw psi functions: beta = xi^T B."""
        return self.basis.xi.T @ self.b_coeffs

    def v(self, z: float, t: float) -> float:
        """Homogenized solution at a reference point."""
        return float(self.beta @ self.basis.psi_values(z, t))

    def v_dzeta(self, z: float, t: float) -> float:
        return float(self.beta @ self.basis.psi_dzeta(z, t))

    def norm_sq_by_coeffs(self) -> float:
        return float(self.b_coeffs @ self.b_coeffs)

    def norm_sq_by_gram(self) -> float:
        b = self.beta
        return float(b @ self.basis.gram @ b)


@dataclass(frozen=True)
class SolveReport:
    b_magnitudes: np.ndarray      # |B_i| per iteration
    cumulative_norms: np.ndarray  # ||v_i|| after each iteration, nondecreasing
    residuals: np.ndarray         # (L v_n - M_cached) at the collocation points


def solve(hp: HomogenizedProblem, basis: OrthoBasis,
          passes: int = 1) -> tuple[Solution, SolveReport]:
    """Sequential pass(es) of the collocation iteration.

    Per step i: evaluate the current partial sum and its zeta-derivative at
    collocation point i, evaluate the nonlinear right-hand side M there,
    and extend the series.  The scheme is a single pass by default;
    passes > 1 repeats it with M re-evaluated on the previous pass's
    result (an experimental extension, not part of the plain scheme).
    Raises DivergenceError if M overflows.
    """
    if passes < 1:
        raise DomainError("passes must be >= 1")
    n = basis.n
    xi = basis.xi
    pts = basis.points

    # P[k, i] = psi_k(point_i), Pz likewise for the zeta-derivative; these
    # let partial sums at collocation points be plain dot products.
    P = np.empty((n, n))
    Pz = np.empty((n, n))
    for i, (z, t) in enumerate(pts):
        P[:, i] = basis.psi_values(z, t)
        Pz[:, i] = basis.psi_dzeta(z, t)

    beta_prev = np.zeros(n)       # previous pass's coefficients (pass 1: zero)
    for p in range(passes):
        m_vals = np.zeros(n)
        b = np.zeros(n)
        beta = np.zeros(n)        # running xi^T b over completed steps
        norms = np.empty(n)
        acc = 0.0
        for i in range(n):
            # first pass: lag against the partial sum built so far;
            # later passes: against the previous pass's full result
            src = beta if p == 0 else beta_prev
            v_here = float(src @ P[:, i])
            vz_here = float(src @ Pz[:, i])
            try:
                m = eval_M(hp, pts[i], v_here, vz_here)
            except OverflowError:
                m = math.inf
            if not math.isfinite(m):
                raise DivergenceError(
                    i, f"nonlinear term non-finite at iteration {i}, point {pts[i]}"
                )
            m_vals[i] = m
            b[i] = xi[i, : i + 1] @ m_vals[: i + 1]
            if abs(b[i]) > 1e150:
                raise DivergenceError(
                    i, f"coefficient magnitude {b[i]:.3e} diverged at iteration {i}"
                )
            beta += b[i] * xi[i, :]
            acc += b[i] * b[i]
            norms[i] = math.sqrt(acc)
        beta_prev = beta

    sol = Solution(basis=basis, b_coeffs=b, problem=hp, n=n)
    # residual of the linear collocation system actually solved:
    # (L v_n)(point_k) = (G beta)_k should match the cached M values
    residuals = basis.gram @ sol.beta - m_vals
    report = SolveReport(
        b_magnitudes=np.abs(b),
        cumulative_norms=norms,
        residuals=residuals,
    )
    return sol, report


def evaluate(sol: Solution, point: tuple[float, float]) -> float:
    """Approximate solution in the ORIGINAL variable and coordinates."""
    zeta, tau = point
    a, bdom, T = sol.problem.spec.domain
    if not (a - 1e-12 <= zeta <= bdom + 1e-12 and -1e-12 <= tau <= T + 1e-12):
        raise DomainError(f"point {point} outside domain")
    z, t = sol.problem.to_reference(zeta, tau)
    z = min(max(z, 0.0), 1.0)
    t = min(max(t, 0.0), 1.0)
    return sol.v(z, t) + sol.problem.homogenizer.value(z, t)


def error_norms(sol: Solution, exact, tau: float, zeta_grid):
    """Unweighted discrete L2 / Linf over a zeta grid at fixed tau, plus the
    signed pointwise errors (exact minus approximate)."""
    grid = list(zeta_grid)
    if not grid:
        raise DomainError("empty evaluation grid")
    errs = [exact(z, tau) - evaluate(sol, (z, tau)) for z in grid]
    arr = np.asarray(errs)
    return float(np.sqrt(arr @ arr)), float(np.max(np.abs(arr))), errs


def norm_telescoping_check(sol: Solution) -> float:
    """Max deviation in ||v_{i}||^2 = ||v_{i-1}||^2 + B_i^2 over all
    prefixes, with each prefix norm recomputed from the Gram matrix."""
    b = sol.b_coeffs
    xi = sol.basis.xi
    G = sol.basis.gram
    worst = 0.0
    prev = 0.0
    for i in range(sol.n):
        beta = xi[: i + 1, :].T @ b[: i + 1]
        direct = float(beta @ G @ beta)
        worst = max(worst, abs(direct - (prev + b[i] * b[i])))
        prev = direct
    return worst


def error_tail(sol: Solution, n_small: int) -> float:
    """Tail sum  sum_{i > n_small} B_i^2, the computable proxy for the
    squared error norm of the n_small-term truncation."""
    if not 0 <= n_small <= sol.n:
        raise DomainError(f"n_small must lie in [0, {sol.n}], got {n_small}")
    tail = sol.b_coeffs[n_small:]
    return float(tail @ tail)
