"""Reproducing kernels on [0, 1] and the inner products they reproduce.

Three univariate kernels are provided:

  rk1 -- kernel of W1 = {h : h AC, h' in L2}, ip = f(0)g(0) + int f'g'
  rk2 -- kernel of the W2 subspace {h : h(0) = 0} of the space with
         ip = f(0)g(0) + f'(0)g'(0) + int f''g''
  rk3 -- kernel of the W3 subspace {h : h(0) = h(1) = 0} of the space with
         ip = sum_{i<3} f^i(0)g^i(0) + int f'''g'''

The quintic rk3 is stored as a bivariate coefficient matrix C with
rk3(y, s) = sum_ij C[i, j] y^i s^j on the branch s <= y and the transposed
matrix on s > y (the kernel is symmetric; the transposition identity is
asserted at import time).  That makes anchor-side derivatives -- needed to
push differential operators through the kernel -- exact index shifts.

Product kernels on the unit square are plain tensor products:
kernel32 = rk3 (x) rk2 and kernel11 = rk1 (x) rk1.

The inner-product implementations here are *oracles*: straightforward
boundary terms plus composite Gauss-Legendre quadrature, graded toward any
declared singular breakpoints.  They exist so that kernel identities and
adjoint constructions can be tested against first principles; nothing in
the solver's hot path integrates anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import fractional
from .errors import ContractError, DomainError
from .piecewise import PiecewiseFracPoly


class KernelSpaceId(Enum):
    W1 = "W1"
    W2 = "W2"
    W3 = "W3"
    W32 = "W32"
    W11 = "W11"


def _check_unit(*vals):
    for v in vals:
        if not -1e-12 <= v <= 1.0 + 1e-12:
            raise DomainError(f"argument outside [0, 1]: {v}")


# --- quintic kernel coefficient matrix -------------------------------------

def _build_rk3_matrix() -> np.ndarray:
    """Coefficients of 18720 * rk3(y, s) on the branch s <= y, as C[i, j]
    for y^i s^j.  Built by exact integer polynomial arithmetic from the
    factored form of the kernel."""
    P = np.array([120, 30, 10, -5, 1], dtype=object)      # in s
    Q1 = np.array([360, -300, -100, -15, 3], dtype=object)  # in s

    inner = np.zeros((5, 6), dtype=object)  # [y-power, s-power]
    inner[0, 4] = 156
    for iy, cy in ((2, 6), (3, -4), (4, 1)):
        for j, pj in enumerate(P):
            inner[iy, j] += cy * pj
    for j, qj in enumerate(Q1):
        inner[1, j] += 12 * qj

    # multiply by s
    shifted = np.zeros((5, 7), dtype=object)
    shifted[:, 1:] = inner
    # multiply by (y - 1) and negate:  -(y-1) X = X - y X
    out = np.zeros((6, 7), dtype=object)
    out[:5, :] += shifted
    out[1:, :] -= shifted
    return out


def _build_rk3_matrix_branch2() -> np.ndarray:
    """Same, from the independently printed s > y branch, for cross-checking."""
    Q2 = np.array([-120, 6, -4, 1], dtype=object)
    Q3 = np.array([36, 6, -4, 1], dtype=object)
    Q4 = np.array([156, 36, 6, -4, 1], dtype=object)

    inner = np.zeros((5, 6), dtype=object)
    for j, q in enumerate(Q2):
        inner[1, j + 1] += 30 * q
        inner[2, j + 1] += 10 * q
    for j, q in enumerate(Q3):
        inner[0, j + 1] += 120 * q
        inner[3, j + 1] -= 5 * q
    for j, q in enumerate(Q4):
        inner[4, j] += q
    # multiply by y
    shifted = np.zeros((6, 6), dtype=object)
    shifted[1:, :] = inner
    # multiply by (s - 1) and negate: -(s-1) X = X - s X
    out = np.zeros((6, 7), dtype=object)
    out[:, :6] += shifted
    out[:, 1:] -= shifted
    return out


_RK3_NUM = _build_rk3_matrix()          # 6 x 7, y^i s^j, over denominator 18720
_RK3_NUM_B2 = _build_rk3_matrix_branch2()

# kernel symmetry <=> branch2 coefficients are the transpose of branch1
_pad1 = np.zeros((7, 7), dtype=object)
_pad1[:6, :] = _RK3_NUM
_pad2 = np.zeros((7, 7), dtype=object)
_pad2[: _RK3_NUM_B2.shape[0], : _RK3_NUM_B2.shape[1]] = _RK3_NUM_B2
assert (_pad1 == _pad2.T).all(), "quintic kernel branches are not transposes"

_RK3_C = _pad1.astype(float) / 18720.0  # 7 x 7, branch s <= y
_RK3_DENOM = 18720


# --- pointwise kernels -----------------------------------------------------

def rk1(eta: float, s: float) -> float:
    """Kernel of W1: 1 + min(eta, s)."""
    _check_unit(eta, s)
    return 1.0 + min(eta, s)


def rk2(v: float, zeta: float) -> float:
    """Kernel of the zero-at-0 quadratic space, piecewise cubic."""
    _check_unit(v, zeta)
    if zeta <= v:
        return v * zeta + v * zeta**2 / 2.0 - zeta**3 / 6.0
    return -(v**3) / 6.0 + zeta * v**2 / 2.0 + zeta * v


def _y_deriv_weights(powers: np.ndarray, k: int) -> np.ndarray:
    w = np.ones_like(powers, dtype=float)
    for j in range(k):
        w *= powers - j
    return w


def rk3_mixed(y: float, s: float, dy: int = 0, ds: int = 0) -> float:
    """Mixed partial d^dy/dy^dy d^ds/ds^ds of rk3 at (y, s)."""
    _check_unit(y, s)
    C = _RK3_C if s <= y else _RK3_C.T
    i = np.arange(7, dtype=float)
    ypow = np.where(i >= dy, y ** np.maximum(i - dy, 0.0), 0.0) * _y_deriv_weights(i, dy)
    spow = np.where(i >= ds, s ** np.maximum(i - ds, 0.0), 0.0) * _y_deriv_weights(i, ds)
    return float(ypow @ C @ spow)


def rk3(y: float, s: float) -> float:
    """Kernel of the zero-trace cubic space, piecewise quintic."""
    return rk3_mixed(y, s)


def kernel32(anchor, query) -> float:
    """Tensor kernel rk3 (x) rk2 of the mixed space on the unit square."""
    (z, w), (zeta, t) = anchor, query
    return rk3(z, zeta) * rk2(w, t)


def kernel11(anchor, query) -> float:
    """Tensor kernel rk1 (x) rk1."""
    (z, w), (zeta, t) = anchor, query
    return rk1(z, zeta) * rk1(w, t)


# --- symbolic (piecewise polynomial) forms ---------------------------------

def _breaks(anchor: float):
    pts = sorted({0.0, float(anchor), 1.0})
    return tuple(pts)


def rk_as_poly(space: KernelSpaceId, anchor: float) -> PiecewiseFracPoly:
    """Piecewise polynomial form of a univariate kernel section."""
    _check_unit(anchor)
    v = float(anchor)
    if space is KernelSpaceId.W1:
        left = ((1.0, 0.0), (1.0, 1.0))
        right = ((1.0 + v, 0.0),)
        lo, hi = left, right
    elif space is KernelSpaceId.W2:
        lo = ((v, 1.0), (v / 2.0, 2.0), (-1.0 / 6.0, 3.0))
        hi = ((-(v**3) / 6.0, 0.0), (v**2 / 2.0 + v, 1.0))
    elif space is KernelSpaceId.W3:
        return rk3_arg_poly(v, anchor_deriv=0)
    else:
        raise DomainError(f"no univariate polynomial form for {space}")
    bps = _breaks(v)
    if len(bps) == 2:  # anchor at 0 or 1: single active piece
        piece = lo if v == 1.0 else hi
        return PiecewiseFracPoly.from_pieces(bps, (piece,))
    return PiecewiseFracPoly.from_pieces(bps, (lo, hi))


def rk3_arg_poly(anchor: float, anchor_deriv: int = 0) -> PiecewiseFracPoly:
    """rk3 (or an anchor-side derivative of it) as a piecewise polynomial in
    the argument, for a fixed numeric anchor."""
    _check_unit(anchor)
    y = float(anchor)
    i = np.arange(7, dtype=float)
    yw = _y_deriv_weights(i, anchor_deriv)
    ypow = np.where(i >= anchor_deriv, y ** np.maximum(i - anchor_deriv, 0.0), 0.0) * yw
    # piece s <= y uses branch matrix as-is; s > y uses the transpose
    coeffs_lo = ypow @ _RK3_C        # coefficients in s, on [0, y]
    coeffs_hi = ypow @ _RK3_C.T      # on [y, 1]
    lo = tuple((c, float(j)) for j, c in enumerate(coeffs_lo) if c != 0.0)
    hi = tuple((c, float(j)) for j, c in enumerate(coeffs_hi) if c != 0.0)
    bps = _breaks(y)
    if len(bps) == 2:
        return PiecewiseFracPoly.from_pieces(bps, (hi if y == 0.0 else lo,))
    return PiecewiseFracPoly.from_pieces(bps, (lo, hi))


def poly_derivative(p: PiecewiseFracPoly, order: int) -> PiecewiseFracPoly:
    """Piecewise power-rule derivative (thin wrapper kept as the public op)."""
    return p.derivative(order)


# --- separable bivariate functions -----------------------------------------

@dataclass(frozen=True)
class SeparableFn2D:
    """Finite sum of products zf(zeta) * tf(tau).

    Factors are PiecewiseFracPoly or any object exposing __call__ and
    deriv(k); tau factors may additionally expose caputo(t) for a closed
    form Caputo derivative (otherwise the quadrature path is used).
    """

    terms: tuple

    def __post_init__(self):
        if not self.terms:
            raise ValueError("term list must be non-empty")

    def value(self, zeta: float, tau: float) -> float:
        return float(sum(zf(zeta) * tf(tau) for zf, tf in self.terms))

    __call__ = value

    def d_zeta(self, zeta: float, tau: float, order: int = 1) -> float:
        try:
            return float(
                sum(zf.deriv(order)(zeta) * tf(tau) for zf, tf in self.terms)
            )
        except AttributeError as exc:
            raise ContractError("zeta factor lacks deriv()") from exc

    def caputo_tau(self, alpha, zeta: float, tau: float) -> float:
        total = 0.0
        for zf, tf in self.terms:
            zv = zf(zeta)
            if zv == 0.0:
                continue
            if hasattr(tf, "caputo"):
                total += zv * tf.caputo(tau)
            elif isinstance(tf, PiecewiseFracPoly):
                total += zv * fractional.caputo_poly(tf, alpha, tau)
            else:
                raise ContractError(
                    "tau factor supports neither caputo() nor quadrature"
                )
        return total

    def scale(self, factor: float) -> "SeparableFn2D":
        scaled = []
        for zf, tf in self.terms:
            if hasattr(zf, "scale"):
                scaled.append((zf.scale(factor), tf))
            else:
                raise ContractError("zeta factor lacks scale()")
        return SeparableFn2D(tuple(scaled))


# --- quadrature oracle machinery -------------------------------------------

@lru_cache(maxsize=64)
def _gl_rule(n: int):
    return np.polynomial.legendre.leggauss(n)


def quad_1d(f, breakpoints=(0.0, 1.0), singular=(), n_nodes: int = 32,
            grade_levels: int = 14, grade_ratio: float = 0.3) -> float:
    """Composite Gauss-Legendre on [0, 1] split at breakpoints, with
    geometric grading toward any singular breakpoint."""
    pts = sorted({0.0, 1.0, *(float(b) for b in breakpoints)})
    x, w = _gl_rule(n_nodes)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        segs = [(lo, hi)]
        sing_lo = any(abs(lo - s) < 1e-14 for s in singular)
        sing_hi = any(abs(hi - s) < 1e-14 for s in singular)
        if sing_lo or sing_hi:
            segs = []
            a, b = lo, hi
            for _ in range(grade_levels):
                if sing_hi:
                    cut = b - (b - a) * grade_ratio
                    segs.append((a, cut))
                    a = cut
                else:
                    cut = a + (b - a) * grade_ratio
                    segs.append((cut, b))
                    b = cut
            segs.append((a, b))
        for a, b in segs:
            half = 0.5 * (b - a)
            s = 0.5 * (a + b) + half * x
            total += half * float(np.dot(w, f(s)))
    return total


def _fn_meta(f):
    bps = getattr(f, "breakpoints", (0.0, 1.0))
    sing = getattr(f, "singular_points", ())
    return bps, sing


def _ip_univariate(r: int, f, g) -> float:
    """Inner product sum_{i<r} f^i(0) g^i(0) + int_0^1 f^(r) g^(r)."""
    try:
        fd = [f.deriv(i) if i else f for i in range(r + 1)]
        gd = [g.deriv(i) if i else g for i in range(r + 1)]
    except AttributeError as exc:
        raise ContractError(
            f"operands must expose deriv(k) up to order {r}"
        ) from exc
    total = sum(float(fd[i](0.0)) * float(gd[i](0.0)) for i in range(r))
    fb, fs = _fn_meta(f)
    gb, gs = _fn_meta(g)
    total += quad_1d(
        lambda s: np.asarray(fd[r](s), dtype=float) * np.asarray(gd[r](s), dtype=float),
        breakpoints=(*fb, *gb),
        singular=(*fs, *gs),
    )
    return total


def _ip_tensor(f: SeparableFn2D, g: SeparableFn2D, r_zeta: int, r_tau: int) -> float:
    if not isinstance(f, SeparableFn2D) or not isinstance(g, SeparableFn2D):
        raise ContractError("tensor-space oracle requires SeparableFn2D operands")
    total = 0.0
    for zf, tf in f.terms:
        for zg, tg in g.terms:
            zz = _ip_univariate(r_zeta, zf, zg)
            if zz == 0.0:
                continue
            total += zz * _ip_univariate(r_tau, tf, tg)
    return total


_UNIVARIATE_ORDER = {KernelSpaceId.W1: 1, KernelSpaceId.W2: 2, KernelSpaceId.W3: 3}


def inner_product_oracle(space: KernelSpaceId, f, g) -> float:
    """Quadrature-backed inner product for any of the five kernel spaces."""
    if space in _UNIVARIATE_ORDER:
        return _ip_univariate(_UNIVARIATE_ORDER[space], f, g)
    if space is KernelSpaceId.W32:
        return _ip_tensor(f, g, 3, 2)
    if space is KernelSpaceId.W11:
        return _ip_tensor(f, g, 1, 1)
    raise DomainError(f"unknown space {space}")


class SmoothFn:
    """Adapter giving a plain callable the deriv(k) protocol, from an
    explicit list [f, f', f'', ...]."""

    def __init__(self, derivs, breakpoints=(0.0, 1.0), singular=()):
        self._derivs = list(derivs)
        self.breakpoints = tuple(breakpoints)
        self.singular_points = tuple(singular)

    def __call__(self, x):
        return self._derivs[0](x)

    def deriv(self, order: int = 1) -> "SmoothFn":
        if order >= len(self._derivs):
            raise ContractError(
                f"derivative of order {order} was not declared"
            )
        return SmoothFn(self._derivs[order:], self.breakpoints, self.singular_points)
