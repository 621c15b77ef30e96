"""Caputo fractional derivatives of order alpha in (0, 1].

The Caputo derivative used throughout is

    D^a f(t) = (1 / Gamma(1 - a)) * int_0^t f'(s) (t - s)^(-a) ds,

which is zero on constants and reduces to the classical derivative as
a -> 1 (the a == 1 case delegates to the classical derivative outright).
Piecewise-power inputs are integrated term by term with Gauss-Jacobi
rules whose weights absorb the endpoint singularities, so the quadrature
is exact up to rounding for polynomial pieces.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn
from scipy.special import roots_jacobi

from .errors import DomainError
from .piecewise import PiecewiseFracPoly, _is_int


@dataclass(frozen=True)
class CaputoOrder:
    """Fractional order alpha in (0, 1]; alpha == 1 is the classical case."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")

    @property
    def is_classical(self) -> bool:
        return self.alpha == 1.0


def _as_order(alpha) -> CaputoOrder:
    return alpha if isinstance(alpha, CaputoOrder) else CaputoOrder(float(alpha))


def caputo_monomial(e: float, alpha, t: float) -> float:
    """Caputo derivative of t**e, analytic Gamma-function form."""
    a = _as_order(alpha).alpha
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    if e < 0:
        raise DomainError(f"exponent must be non-negative, got {e}")
    if e == 0:
        return 0.0
    return gamma_fn(e + 1.0) / gamma_fn(e + 1.0 - a) * t ** (e - a)


@lru_cache(maxsize=256)
def _jacobi_rule(n: int, a: float, b: float):
    # weight (1-x)^a (1+x)^b on [-1, 1]; a == b == 0 is Gauss-Legendre
    return roots_jacobi(n, a, b)


def _weighted_power_integral(q: float, alpha: float, lo: float, hi: float,
                             t: float, n_nodes: int) -> float:
    """int_lo^hi s**q (t - s)**(-alpha) ds with 0 <= lo < hi <= t.

    Gauss-Jacobi with the (t - s)^(-alpha) factor as weight whenever the
    interval ends at t, and with the s**q factor as weight whenever the
    interval starts at 0 and q is fractional or negative.  The remaining
    factor is then polynomial (or smooth), so the rule is essentially exact.
    """
    right_exp = -alpha if hi == t else 0.0
    left_exp = q if (lo == 0.0 and not (_is_int(q) and q >= 0)) else 0.0
    x, w = _jacobi_rule(n_nodes, right_exp, left_exp)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    s = mid + half * x
    vals = np.ones_like(s)
    if left_exp != q:
        vals = vals * s**q
    if right_exp == 0.0:
        vals = vals * (t - s) ** (-alpha)
    # scale factors pulled out of the Jacobi weight
    scale = half ** (1.0 + right_exp + left_exp)
    if left_exp != 0.0:
        # (1+x) = (s - lo)/half and lo == 0, so s**q = half**q (1+x)**q
        pass
    if right_exp != 0.0:
        # (1-x) = (t - s)/half when hi == t
        pass
    return float(scale * np.dot(w, vals))


def caputo_poly(p: PiecewiseFracPoly, alpha, t: float, n_nodes: int = 24) -> float:
    """Caputo derivative of a PiecewiseFracPoly at time t, quadrature path."""
    order = _as_order(alpha)
    if t < 0 or t > 1:
        raise DomainError(f"t must lie in [0, 1], got {t}")
    if t == 0:
        return 0.0
    if order.is_classical:
        return p.derivative(1)(t)
    a = order.alpha
    bp = list(p.breakpoints)
    total = 0.0
    for j, terms in enumerate(p.pieces):
        lo = bp[j]
        hi = min(bp[j + 1], t)
        if hi <= lo:
            break
        for c, e in terms:
            if e == 0.0:
                continue
            total += c * e * _weighted_power_integral(e - 1.0, a, lo, hi, t, n_nodes)
    return total / gamma_fn(1.0 - a)


class CaputoOfPoly:
    """Caputo derivative of a PiecewiseFracPoly as an evaluable function.

    Single-piece inputs with integer exponents reduce to the term-wise
    monomial rule; everything else evaluates through the quadrature path.
    Either way the object agrees with caputo_poly at every t in (0, 1].
    """

    def __init__(self, p: PiecewiseFracPoly, alpha):
        self.order = _as_order(alpha)
        self.p = p
        self.closed_form: PiecewiseFracPoly | None = None
        if self.order.is_classical:
            self.closed_form = p.derivative(1)
        elif len(p.pieces) == 1 and p.has_integer_exponents():
            a = self.order.alpha
            terms = []
            for c, e in p.pieces[0]:
                if e == 0.0:
                    continue
                terms.append((c * gamma_fn(e + 1.0) / gamma_fn(e + 1.0 - a), e - a))
            self.closed_form = PiecewiseFracPoly.from_pieces((0.0, 1.0), (terms,))

    def __call__(self, t):
        if self.closed_form is not None:
            return self.closed_form(t)
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            return caputo_poly(self.p, self.order, float(t_arr))
        return np.array([caputo_poly(self.p, self.order, ti) for ti in t_arr])


def caputo_poly_as_fn(p: PiecewiseFracPoly, alpha) -> CaputoOfPoly:
    return CaputoOfPoly(p, alpha)


class CaputoRK2Slice:
    """t |-> Caputo_w^a R2(w, t) evaluated at w = T, in closed form.

    R2 is the reproducing kernel of the quadratic-space on [0, 1] (the one
    vanishing at 0).  Writing m_k = Gamma(k+1)/Gamma(k+1-a) T^(k-a),

        c(t) = -m_3/6 + (m_1 + m_2/2) t + [t < T] (T - t)^(3-a) / Gamma(4-a),

    which is C^1 on [0, 1], vanishes at t = 0, and is linear for t >= T.
    Valid for a in (0, 1]; at a = 1 it coincides with d/dw R2(w, t)|_{w=T}.
    """

    def __init__(self, T: float, alpha, deriv_order: int = 0):
        if not 0.0 <= T <= 1.0:
            raise DomainError(f"T must lie in [0, 1], got {T}")
        self.T = float(T)
        self.order = _as_order(alpha)
        self.deriv_order = deriv_order
        a = self.order.alpha
        if self.T > 0.0:
            self._const = -gamma_fn(4.0) / gamma_fn(4.0 - a) * self.T ** (3.0 - a) / 6.0
            self._lin = (gamma_fn(2.0) / gamma_fn(2.0 - a) * self.T ** (1.0 - a)
                         + gamma_fn(3.0) / gamma_fn(3.0 - a) * self.T ** (2.0 - a) / 2.0)
            self._frac_exp = 3.0 - a
            self._frac_coef = 1.0 / gamma_fn(4.0 - a)
        else:
            self._const = self._lin = self._frac_coef = 0.0
            self._frac_exp = 3.0 - a
        self.breakpoints = tuple(sorted({0.0, self.T, 1.0}))
        self.singular_points = (self.T,) if 0.0 < self.T < 1.0 else ()

    def _eval(self, t: np.ndarray, k: int) -> np.ndarray:
        out = np.zeros_like(t)
        if self.T == 0.0:
            return out
        if k == 0:
            out += self._const + self._lin * t
        elif k == 1:
            out += self._lin
        q = self._frac_exp - k
        coef = self._frac_coef * (-1.0) ** k
        for j in range(k):
            coef *= self._frac_exp - j
        mask = t < self.T
        if mask.any() and self._frac_coef != 0.0:
            out[mask] += coef * (self.T - t[mask]) ** q
        return out

    def __call__(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = self._eval(t_arr, self.deriv_order)
        return float(out[0]) if np.asarray(t).ndim == 0 else out

    def deriv(self, order: int = 1) -> "CaputoRK2Slice":
        if self.deriv_order + order > 2:
            raise DomainError("slice derivatives available only up to order 2")
        clone = CaputoRK2Slice(self.T, self.order)
        clone.deriv_order = self.deriv_order + order
        return clone

    def caputo(self, t: float) -> float:
        """Caputo derivative (same order) of this slice: the double-Caputo
        value of the R2 kernel at (T, t)."""
        if self.deriv_order != 0:
            raise DomainError("caputo of a differentiated slice is not supported")
        return double_caputo_rk2(self.T, t, self.order)


def double_caputo_rk2(T1: float, T2: float, alpha) -> float:
    """Caputo_w^a Caputo_t^a R2(w, t) evaluated at (w, t) = (T1, T2).

    Equals (1/Gamma(1-a)^2) * iint (1 + min(s, u)) (T1-s)^-a (T2-u)^-a,
    reduced to one adaptive 1-D integral with algebraic endpoint weight.
    Symmetric in (T1, T2); zero when either time is zero.
    """
    order = _as_order(alpha)
    a = order.alpha
    if T1 == 0.0 or T2 == 0.0:
        return 0.0
    if order.is_classical:
        return 1.0 + min(T1, T2)
    m1 = gamma_fn(2.0) / gamma_fn(2.0 - a) * T1 ** (1.0 - a)
    m2 = gamma_fn(3.0) / gamma_fn(3.0 - a) * T1 ** (2.0 - a)
    lead = (m1 + m2 / 2.0) * T2 ** (1.0 - a) / gamma_fn(2.0 - a)
    mn = min(T1, T2)
    if T1 == T2:
        tail_int = T1 ** (3.0 - 2.0 * a) / (3.0 - 2.0 * a)
    elif T2 < T1:
        # singular factor (T2 - s)^(-a) at the right endpoint
        tail_int, _ = integrate.quad(
            lambda s: (T1 - s) ** (2.0 - a), 0.0, mn,
            weight="alg", wvar=(0.0, -a), limit=200,
        )
    else:
        # endpoint zero (T1 - s)^(2-a) taken as the weight
        tail_int, _ = integrate.quad(
            lambda s: (T2 - s) ** (-a), 0.0, mn,
            weight="alg", wvar=(0.0, 2.0 - a), limit=200,
        )
    tail = (3.0 - a) / (gamma_fn(1.0 - a) * gamma_fn(4.0 - a)) * tail_int
    return lead - tail


def caputo_of_callable(fprime, alpha, t: float, n_nodes: int = 48) -> float:
    """Caputo derivative at t of a function given by its smooth classical
    derivative fprime; Gauss-Jacobi in the (t - s)^(-a) weight."""
    order = _as_order(alpha)
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    if t == 0:
        return 0.0
    if order.is_classical:
        return float(fprime(t))
    a = order.alpha
    x, w = _jacobi_rule(n_nodes, -a, 0.0)
    half = 0.5 * t
    s = half * (1.0 + x)
    vals = np.asarray([fprime(si) for si in s], dtype=float)
    return float(half ** (1.0 - a) * np.dot(w, vals) / gamma_fn(1.0 - a))
