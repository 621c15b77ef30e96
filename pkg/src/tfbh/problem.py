"""Generalized time-fractional Burgers-Huxley problems.

The governing equation on [a, b] x [0, T] is

    D^alpha_tau w = kappa w_zz - nu w^delta w_z
                    + beta (1 - w^delta) w (eta w^delta - gamma) + g,

with initial data w(z, 0) = h(z) and boundary data w(a, t) = p1(t),
w(b, t) = p2(t).  (g is an optional source term; the two built-in
benchmark problems have g = 0.)

The solver works on the reference square [0, 1]^2 with homogenized
conditions: rescale_to_reference absorbs the domain geometry into the
coefficients (the time scaling picks up T^alpha through the Caputo chain
rule), and build_homogenizer constructs the bilinear data interpolant f
so that v = w - f has zero initial and boundary traces.

The operator splitting is

    L v = D^alpha v - kappa v_zz + gamma beta v,
    M(z, t, v, v_z) = -nu w^delta w_z
                      + beta eta (w^(delta+1) - w^(2 delta+1))
                      + beta gamma w^(delta+1)
                      - (D^alpha f - kappa f_zz + gamma beta f) + g,

with w = v + f, so that L v = M holds exactly iff w solves the original
equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, ContractError, DomainError, ProblemConstructionError
from .fractional import CaputoOrder, caputo_of_callable

_CORNER_TOL = 1e-10


@dataclass(frozen=True)
class BoundaryFn:
    """A scalar function of one variable together with its first two
    derivatives (closed form; the Caputo path integrates the first)."""

    f: Callable[[float], float]
    d1: Callable[[float], float]
    d2: Optional[Callable[[float], float]] = None

    def __call__(self, x):
        return self.f(x)


@dataclass(frozen=True)
class ProblemSpec:
    alpha: CaputoOrder
    kappa: float
    nu: float
    beta: float
    eta: float
    gamma: float
    delta: int
    domain: tuple[float, float, float]  # (a, b, T)
    h: BoundaryFn
    p1: BoundaryFn
    p2: BoundaryFn
    exact: Optional[Callable[[float, float], float]] = None
    forcing: Optional[Callable[[float, float], float]] = None
    name: str = "custom"

    def __post_init__(self):
        a, b, T = self.domain
        if not (a < b and T > 0):
            raise ProblemConstructionError(f"degenerate domain {self.domain}")
        if self.delta < 1 or self.delta != int(self.delta):
            raise ProblemConstructionError(f"delta must be a positive integer, got {self.delta}")


class Homogenizer:
    """Bilinear-in-data interpolant of the initial/boundary conditions on
    the reference square:

        f(z, t) = h(z) + [p1(t) - h(0)] + z [p2(t) - h(1) - p1(t) + h(0)]

    so f(z, 0) = h(z), f(0, t) = p1(t), f(1, t) = p2(t).  All functions
    here live in reference coordinates.
    """

    def __init__(self, h: BoundaryFn, p1: BoundaryFn, p2: BoundaryFn,
                 alpha: CaputoOrder):
        self.h, self.p1, self.p2 = h, p1, p2
        self.alpha = alpha
        self._h0 = float(h(0.0))
        self._h1 = float(h(1.0))
        m1 = abs(self._h0 - p1(0.0))
        m2 = abs(self._h1 - p2(0.0))
        if max(m1, m2) > _CORNER_TOL:
            raise ProblemConstructionError(
                f"initial/boundary corner mismatch: |h(a)-p1(0)| = {m1:.3e}, "
                f"|h(b)-p2(0)| = {m2:.3e}"
            )

    def value(self, z: float, t: float) -> float:
        return (self.h(z) + (self.p1(t) - self._h0)
                + z * (self.p2(t) - self._h1 - self.p1(t) + self._h0))

    __call__ = value

    def d_zeta(self, z: float, t: float) -> float:
        return float(self.h.d1(z)) + (self.p2(t) - self._h1 - self.p1(t) + self._h0)

    def d_zeta2(self, z: float, t: float) -> float:
        if self.h.d2 is None:
            raise ContractError("initial data lacks a second derivative")
        return float(self.h.d2(z))

    def caputo_tau(self, z: float, t: float) -> float:
        # time dependence is (1 - z) p1(t) + z p2(t) plus a t-constant
        def dfdt(s):
            return (1.0 - z) * self.p1.d1(s) + z * self.p2.d1(s)

        return caputo_of_callable(dfdt, self.alpha, t)


@dataclass(frozen=True)
class HomogenizedProblem:
    """Problem restated on [0, 1]^2 in the homogenized variable v = w - f."""

    spec: ProblemSpec
    homogenizer: Homogenizer
    kappa: float      # kappa T^alpha / (b-a)^2
    nu: float         # nu T^alpha / (b-a)
    beta: float       # beta T^alpha
    eta: float
    gamma: float
    delta: int
    alpha: CaputoOrder
    forcing: Optional[Callable[[float, float], float]] = None

    @property
    def linear_zero_order(self) -> float:
        """Coefficient gamma*beta of the zero-order term kept on the L side."""
        return self.gamma * self.beta

    def to_reference(self, zeta: float, tau: float) -> tuple[float, float]:
        a, b, T = self.spec.domain
        return (zeta - a) / (b - a), tau / T

    def from_reference(self, z: float, t: float) -> tuple[float, float]:
        a, b, T = self.spec.domain
        return a + (b - a) * z, T * t

    def nonlinear_rhs(self, w: float, w_z: float) -> float:
        """M-part depending on the original unknown only (no homogenizer
        forcing), in reference coordinates."""
        wd = w ** self.delta
        return (-self.nu * wd * w_z
                + self.beta * self.eta * (wd * w - wd * wd * w)
                + self.beta * self.gamma * wd * w)


def _rescaled_boundary(fn: BoundaryFn, scale_arg: float, shift: float = 0.0) -> BoundaryFn:
    """fn(shift + scale_arg * x) with chain-ruled derivatives."""
    d2 = None
    if fn.d2 is not None:
        d2 = lambda x: scale_arg**2 * fn.d2(shift + scale_arg * x)
    return BoundaryFn(
        f=lambda x: fn.f(shift + scale_arg * x),
        d1=lambda x: scale_arg * fn.d1(shift + scale_arg * x),
        d2=d2,
    )


def build_homogenizer(spec: ProblemSpec) -> Homogenizer:
    """Homogenizer for spec, expressed in reference coordinates."""
    a, b, T = spec.domain
    h_ref = _rescaled_boundary(spec.h, b - a, a)
    p1_ref = _rescaled_boundary(spec.p1, T)
    p2_ref = _rescaled_boundary(spec.p2, T)
    return Homogenizer(h_ref, p1_ref, p2_ref, spec.alpha)


def rescale_to_reference(spec: ProblemSpec) -> HomogenizedProblem:
    """Affine change of variables onto [0, 1]^2.

    zeta = a + (b-a) z, tau = T t.  The Caputo derivative of order alpha
    under tau = T t scales by T^(-alpha), so multiplying the equation by
    T^alpha gives reference coefficients kappa T^alpha/(b-a)^2,
    nu T^alpha/(b-a), beta T^alpha; eta, gamma, delta are untouched.
    """
    a, b, T = spec.domain
    alpha = spec.alpha
    ta = T ** alpha.alpha
    hom = build_homogenizer(spec)
    forcing = None
    if spec.forcing is not None:
        forcing = lambda z, t: ta * spec.forcing(a + (b - a) * z, T * t)
    return HomogenizedProblem(
        spec=spec,
        homogenizer=hom,
        kappa=spec.kappa * ta / (b - a) ** 2,
        nu=spec.nu * ta / (b - a),
        beta=spec.beta * ta,
        eta=spec.eta,
        gamma=spec.gamma,
        delta=spec.delta,
        alpha=alpha,
        forcing=forcing,
    )


def apply_linear_operator(hp: HomogenizedProblem, v, point) -> float:
    """(L v)(z, t) = D^alpha_t v - kappa v_zz + gamma beta v, reference
    coordinates; v must expose caputo_tau, d_zeta and value."""
    z, t = point
    try:
        cap = v.caputo_tau(hp.alpha, z, t)
        vzz = v.d_zeta(z, t, 2)
        val = v.value(z, t)
    except AttributeError as exc:
        raise ContractError(
            "operand must expose value/d_zeta/caputo_tau"
        ) from exc
    return cap - hp.kappa * vzz + hp.linear_zero_order * val


def eval_M(hp: HomogenizedProblem, point, v_val: float, v_zeta: float) -> float:
    """Right-hand side of the homogenized operator equation L v = M at a
    reference point, given the value and slope of the current iterate."""
    z, t = point
    f = hp.homogenizer
    w = v_val + f.value(z, t)
    w_z = v_zeta + f.d_zeta(z, t)
    out = hp.nonlinear_rhs(w, w_z)
    out -= f.caputo_tau(z, t)
    out += hp.kappa * f.d_zeta2(z, t)
    out -= hp.linear_zero_order * f.value(z, t)
    if hp.forcing is not None:
        out += hp.forcing(z, t)
    return out


# --- built-in benchmark problems -------------------------------------------

def _sech2(x: float) -> float:
    c = math.cosh(x)
    return 1.0 / (c * c)


def _tanh_wave_ex1(alpha: float) -> ProblemSpec:
    # exact solution w = 1/2 - 1/2 tanh(z/4 + 3 t/8) solves the classical
    # (alpha = 1) equation; its traces supply the data for all alpha
    def w(z, t):
        return 0.5 - 0.5 * math.tanh(0.25 * z + 0.375 * t)

    h = BoundaryFn(
        f=lambda z: 0.5 - 0.5 * math.tanh(0.25 * z),
        d1=lambda z: -0.125 * _sech2(0.25 * z),
        d2=lambda z: 0.0625 * _sech2(0.25 * z) * math.tanh(0.25 * z),
    )

    def edge(z0: float) -> BoundaryFn:
        return BoundaryFn(
            f=lambda t: 0.5 - 0.5 * math.tanh(0.25 * z0 + 0.375 * t),
            d1=lambda t: -0.1875 * _sech2(0.25 * z0 + 0.375 * t),
            d2=lambda t: 0.140625 * _sech2(0.25 * z0 + 0.375 * t)
            * math.tanh(0.25 * z0 + 0.375 * t),
        )

    return ProblemSpec(
        alpha=CaputoOrder(alpha), kappa=1.0, nu=-1.0, beta=1.0, eta=1.0,
        gamma=1.0, delta=1, domain=(0.0, 1.0, 1.0),
        h=h, p1=edge(0.0), p2=edge(1.0), exact=w, name="ex1",
    )


def _tanh_wave_ex2(alpha: float) -> ProblemSpec:
    # exact solution w = sqrt(1/2 - 1/2 tanh(z/3 - 10 t/9))
    def sigma(u):
        return 0.5 - 0.5 * math.tanh(u)

    def w(z, t):
        return math.sqrt(sigma(z / 3.0 - 10.0 * t / 9.0))

    def section(coef: float, off: Callable[[float], float],
                doff: float) -> BoundaryFn:
        # w along a line u = off(x), du/dx = doff
        def f(x):
            return math.sqrt(sigma(off(x)))

        def d1(x):
            u = off(x)
            s = sigma(u)
            ds = -0.5 * _sech2(u) * doff
            return ds / (2.0 * math.sqrt(s))

        def d2(x):
            u = off(x)
            s = sigma(u)
            ds = -0.5 * _sech2(u) * doff
            dss = _sech2(u) * math.tanh(u) * doff * doff
            return dss / (2.0 * math.sqrt(s)) - ds * ds / (4.0 * s**1.5)

        return BoundaryFn(f=f, d1=d1, d2=d2)

    h = section(1.0, lambda z: z / 3.0, 1.0 / 3.0)
    p1 = section(1.0, lambda t: -10.0 * t / 9.0, -10.0 / 9.0)
    p2 = section(1.0, lambda t: 1.0 / 3.0 - 10.0 * t / 9.0, -10.0 / 9.0)
    return ProblemSpec(
        alpha=CaputoOrder(alpha), kappa=1.0, nu=-1.0, beta=-1.0, eta=0.0,
        gamma=1.0, delta=2, domain=(0.0, 1.0, 1.0),
        h=h, p1=p1, p2=p2, exact=w, name="ex2",
    )


_ZERO_FN = BoundaryFn(f=lambda x: 0.0, d1=lambda x: 0.0, d2=lambda x: 0.0)


def example_problem(which: int, alpha: float) -> ProblemSpec:
    """The two built-in traveling-wave benchmark problems."""
    if which == 1:
        return _tanh_wave_ex1(alpha)
    if which == 2:
        return _tanh_wave_ex2(alpha)
    raise ConfigError(f"unknown example {which}")


_CONFIG_KEYS = {"alpha", "kappa", "nu", "beta", "eta", "gamma", "delta",
                "a", "b", "T", "data"}


def load_problem_config(path) -> ProblemSpec:
    """Plain-text `key = value` problem description.

    Numeric keys: alpha, kappa, nu, beta, eta, gamma, delta, a, b, T.
    `data = ex1 | ex2 | zero` selects the initial/boundary data (and exact
    solution, if any); parameters always come from the file.
    """
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val.strip()

    def num(key, default):
        if key not in values:
            return default
        try:
            return float(values[key])
        except ValueError as exc:
            raise ConfigError(f"bad numeric value for {key}: {values[key]!r}") from exc

    alpha = num("alpha", 1.0)
    data = values.get("data", "zero")
    if data in ("ex1", "ex2"):
        base = example_problem(int(data[-1]), alpha)
        h, p1, p2, exact = base.h, base.p1, base.p2, base.exact
    elif data == "zero":
        h = p1 = p2 = _ZERO_FN
        exact = None
    else:
        raise ConfigError(f"unknown data source {data!r}")
    try:
        return ProblemSpec(
            alpha=CaputoOrder(alpha),
            kappa=num("kappa", 1.0), nu=num("nu", 0.0), beta=num("beta", 0.0),
            eta=num("eta", 0.0), gamma=num("gamma", 1.0),
            delta=int(num("delta", 1)),
            domain=(num("a", 0.0), num("b", 1.0), num("T", 1.0)),
            h=h, p1=p1, p2=p2, exact=exact, name=f"custom({data})",
        )
    except (ProblemConstructionError, DomainError) as exc:
        raise ConfigError(str(exc)) from exc
