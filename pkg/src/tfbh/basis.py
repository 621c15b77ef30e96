"""Collocation points, operator-image basis functions, orthonormalization.

For the linear part L v = D^alpha_t v - kappa v_zz + gamma beta v acting on
the zero-trace tensor space, the Riesz representer of the functional
v |-> (L v)(z_i, t_i) is

    psi_i(z, t) = [L applied to the tensor kernel in its anchor variables
                   at the point (z_i, t_i)](z, t)
                = R3(z_i, z) * [Caputo_w^a R2(w, t)]|_{w=t_i}
                  - kappa [d^2_s R3(s, z)]|_{s=z_i} * R2(t_i, t)
                  + gamma beta R3(z_i, z) * R2(t_i, t),

    so <v, psi_i> = (L v)(z_i, t_i) for every v in the space.

Pushing L through both anchors gives the Gram matrix in closed form,

    G_ik = <psi_i, psi_k> = (L psi_k)(z_i, t_i),

expanded below into nine products of univariate kernel values, kernel
derivatives, and single/double Caputo traces -- no quadrature anywhere.

Collocation points with t_i = 0 (or z_i on the boundary) have psi_i
identically zero: the zero-trace space already pins those values, so the
corresponding functional is the zero functional.  Such points are kept in
the CollocationSet (the sequence conventionally starts at the origin) but
excluded from the basis; the conditions they express hold automatically.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DegeneracyError, DomainError
from .fractional import CaputoRK2Slice
from .kernels import (
    KernelSpaceId,
    SeparableFn2D,
    rk2,
    rk3,
    rk3_arg_poly,
    rk3_mixed,
    rk_as_poly,
)
from .problem import HomogenizedProblem

_EPS_PD = 1e-12  # relative near-dependence threshold for the Gram factor


class PointOrdering(Enum):
    TAU_MAJOR = "tau-major"
    ZETA_MAJOR = "zeta-major"


@dataclass(frozen=True)
class CollocationSet:
    """Ordered point sequence in [0, 1]^2, starting at the origin."""

    points: tuple[tuple[float, float], ...]
    ordering_scheme: PointOrdering = PointOrdering.TAU_MAJOR

    def __post_init__(self):
        if not self.points or self.points[0] != (0.0, 0.0):
            raise DomainError("collocation sequence must start at (0, 0)")
        if len(set(self.points)) != len(self.points):
            raise DomainError("collocation points must be pairwise distinct")

    def __len__(self):
        return len(self.points)

    def active_indices(self) -> list[int]:
        """Indices whose evaluation functional is nonzero on the zero-trace
        space (interior in zeta, positive in tau)."""
        return [
            i for i, (z, t) in enumerate(self.points)
            if 0.0 < z < 1.0 and t > 0.0
        ]


def generate_collocation(n_zeta: int, n_tau: int,
                         ordering: PointOrdering = PointOrdering.TAU_MAJOR,
                         ) -> CollocationSet:
    """Uniform interior tensor grid {(i/(n_zeta+1), j/(n_tau+1))} prefixed
    with the origin.  Refining both counts makes the family dense in the
    square.  Deterministic for fixed inputs."""
    if n_zeta < 1 or n_tau < 1:
        raise DomainError("point counts must be >= 1")
    zs = [i / (n_zeta + 1.0) for i in range(1, n_zeta + 1)]
    ts = [j / (n_tau + 1.0) for j in range(1, n_tau + 1)]
    pts: list[tuple[float, float]] = [(0.0, 0.0)]
    if ordering is PointOrdering.TAU_MAJOR:
        pts.extend((z, t) for t in ts for z in zs)
    else:
        pts.extend((z, t) for z in zs for t in ts)
    return CollocationSet(tuple(pts), ordering)


def _van_der_corput(i: int, base: int) -> float:
    f, r = 1.0, 0.0
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def generate_dense_sequence(count: int, zeta_base: int = 2, tau_base: int = 3,
                            tau_grading: float = 3.0) -> CollocationSet:
    """Deterministic low-discrepancy point sequence, dense in the square.

    Points are (vdc_2(i), vdc_3(i)^r) with van der Corput radix sequences
    and a grading exponent r pushing the tau coordinates toward 0, where
    the Caputo kernel concentrates its initial layer (the customary graded
    mesh for time-fractional problems uses r about 3).  The origin is the
    first point; count includes it.  Indices landing on fixed traces are
    skipped since their evaluation functionals vanish.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    pts: list[tuple[float, float]] = [(0.0, 0.0)]
    i = 1
    while len(pts) < count:
        z = _van_der_corput(i, zeta_base)
        t = _van_der_corput(i, tau_base) ** tau_grading
        i += 1
        if 0.0 < z < 1.0 and t > 0.0:
            pts.append((z, t))
    return CollocationSet(tuple(pts))


def build_psi(hp: HomogenizedProblem, point: tuple[float, float]) -> SeparableFn2D:
    """Representer of v |-> (L v)(point) as a two-term separable function.

    The Caputo and reaction terms of L share the R3 zeta-factor and the
    diffusion/reaction terms share the R2 tau-factor, so the three-term
    operator collapses to two separable terms.
    """
    z_i, t_i = point
    lam = hp.linear_zero_order
    zf_a = rk3_arg_poly(z_i, anchor_deriv=0)
    tf_a = CaputoRK2Slice(t_i, hp.alpha)
    zf_b = rk3_arg_poly(z_i, anchor_deriv=2).scale(-hp.kappa) + zf_a.scale(lam)
    tf_b = rk_as_poly(KernelSpaceId.W2, t_i)
    return SeparableFn2D(((zf_a, tf_a), (zf_b, tf_b)))


def gram_entry(hp: HomogenizedProblem, p_i, p_k) -> float:
    """<psi_i, psi_k> = (L applied in both anchors to the tensor kernel).

    Nine closed-form products: a* are values/second-derivatives of the
    quintic kernel, b* are values and single/double Caputo traces of the
    cubic kernel.
    """
    (z_i, t_i), (z_k, t_k) = p_i, p_k
    kap, lam = hp.kappa, hp.linear_zero_order
    a0 = rk3(z_i, z_k)
    a1 = rk3_mixed(z_i, z_k, dy=2)
    a2 = rk3_mixed(z_i, z_k, ds=2)
    a3 = rk3_mixed(z_i, z_k, dy=2, ds=2)
    slice_i = CaputoRK2Slice(t_i, hp.alpha)
    b0 = rk2(t_i, t_k)
    b1 = slice_i(t_k)
    b2 = CaputoRK2Slice(t_k, hp.alpha)(t_i)
    b3 = slice_i.caputo(t_k)
    return (a0 * b3
            - kap * (a1 * b2 + a2 * b1)
            + lam * a0 * (b1 + b2)
            + kap * kap * a3 * b0
            - kap * lam * (a1 + a2) * b0
            + lam * lam * a0 * b0)


def build_gram(hp: HomogenizedProblem, points) -> np.ndarray:
    """Symmetric Gram matrix over the given (active) points."""
    n = len(points)
    G = np.empty((n, n))
    for i in range(n):
        for k in range(i + 1):
            G[i, k] = G[k, i] = gram_entry(hp, points[i], points[k])
    return G


def _cholesky_with_report(G: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, raising DegeneracyError (with the pivot index)
    when a pivot falls below eps_pd relative to the largest diagonal."""
    n = G.shape[0]
    floor = _EPS_PD * float(np.max(np.diag(G))) if n else 0.0
    L = np.zeros_like(G)
    for i in range(n):
        # off-diagonal row first (Crout order), then the pivot
        d2 = G[i, i]
        if i:
            L[i, :i] = solve_triangular(L[:i, :i], G[:i, i], lower=True)
            d2 -= float(L[i, :i] @ L[i, :i])
        if d2 <= floor:
            raise DegeneracyError(
                i, f"Gram matrix numerically rank deficient at index {i} "
                   f"(pivot {d2:.3e}, floor {floor:.3e})"
            )
        L[i, i] = np.sqrt(d2)
    return L


def gram_schmidt(gram: np.ndarray) -> np.ndarray:
    """Lower-triangular xi with xi G xi^T = I and positive diagonal: the
    inverse of the lower Cholesky factor of G.  Equivalent to the classical
    sequential orthonormalization recursion, but in one stable factorization."""
    G = np.asarray(gram, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise DomainError(f"gram matrix must be square, got shape {G.shape}")
    L = _cholesky_with_report(G)
    n = G.shape[0]
    return solve_triangular(L, np.eye(n), lower=True)


@dataclass(frozen=True)
class OrthoBasis:
    """Immutable assembled basis: points, psi functions, Gram matrix, and
    orthonormalization coefficients (all over the active points)."""

    collocation: CollocationSet
    points: tuple[tuple[float, float], ...]  # active subset, in order
    psi: tuple[SeparableFn2D, ...]
    gram: np.ndarray
    xi: np.ndarray

    @property
    def n(self) -> int:
        return len(self.points)

    def psi_values(self, zeta: float, tau: float) -> np.ndarray:
        return np.array([p.value(zeta, tau) for p in self.psi])

    def psi_dzeta(self, zeta: float, tau: float) -> np.ndarray:
        return np.array([p.d_zeta(zeta, tau) for p in self.psi])

    def orthonormality_defect(self) -> float:
        n = self.n
        return float(np.max(np.abs(self.xi @ self.gram @ self.xi.T - np.eye(n))))


def build_basis(hp: HomogenizedProblem, colloc: CollocationSet) -> OrthoBasis:
    """Assemble psi functions, Gram matrix, and xi for the active points."""
    active = colloc.active_indices()
    if not active:
        raise DomainError("no active collocation points (all lie on fixed traces)")
    pts = tuple(colloc.points[i] for i in active)
    psi = tuple(build_psi(hp, p) for p in pts)
    G = build_gram(hp, pts)
    xi = gram_schmidt(G)
    return OrthoBasis(collocation=colloc, points=pts, psi=psi, gram=G, xi=xi)
