import math

import numpy as np
import pytest

from tfbh.errors import ConfigError, ContractError, ProblemConstructionError
from tfbh.fractional import CaputoOrder, caputo_monomial
from tfbh.problem import (
    BoundaryFn,
    ProblemSpec,
    apply_linear_operator,
    build_homogenizer,
    eval_M,
    example_problem,
    load_problem_config,
    rescale_to_reference,
)

# independently derived: Example 1 homogenizer at (0.5, 0.5), 40-digit
# evaluation of the trace-blend formula (frozen)
F_STAR = 0.34982735081958868605


def test_homogenizer_traces_both_examples():
    for which in (1, 2):
        spec = example_problem(which, 0.9)
        f = build_homogenizer(spec)
        grid = np.linspace(0.0, 1.0, 50)
        for x in grid:
            assert f.value(x, 0.0) == pytest.approx(spec.h(x), abs=1e-10)
            assert f.value(0.0, x) == pytest.approx(spec.p1(x), abs=1e-10)
            assert f.value(1.0, x) == pytest.approx(spec.p2(x), abs=1e-10)


def test_homogenizer_frozen_value():
    f = build_homogenizer(example_problem(1, 0.9))
    assert f.value(0.5, 0.5) == pytest.approx(F_STAR, abs=1e-12)


def test_homogenizer_derivatives():
    f = build_homogenizer(example_problem(1, 0.9))
    h = 1e-6
    for z, t in ((0.3, 0.4), (0.7, 0.9)):
        fd_z = (f.value(z + h, t) - f.value(z - h, t)) / (2 * h)
        assert f.d_zeta(z, t) == pytest.approx(fd_z, abs=1e-8)
        fd_z2 = (f.value(z + h, t) - 2 * f.value(z, t) + f.value(z - h, t)) / h**2
        assert f.d_zeta2(z, t) == pytest.approx(fd_z2, abs=1e-3)
    # classical alpha: Caputo of f is the plain time derivative
    g = build_homogenizer(example_problem(1, 1.0))
    for z, t in ((0.3, 0.4), (0.7, 0.9)):
        fd_t = (g.value(z, t + h) - g.value(z, t - h)) / (2 * h)
        assert g.caputo_tau(z, t) == pytest.approx(fd_t, abs=1e-8)


def test_corner_mismatch_rejected():
    bad = BoundaryFn(f=lambda t: 1.0, d1=lambda t: 0.0, d2=lambda t: 0.0)
    spec = example_problem(1, 0.9)
    mismatched = ProblemSpec(
        alpha=spec.alpha, kappa=1.0, nu=-1.0, beta=1.0, eta=1.0,
        gamma=1.0, delta=1, domain=(0.0, 1.0, 1.0),
        h=spec.h, p1=bad, p2=spec.p2,
    )
    with pytest.raises(ProblemConstructionError):
        build_homogenizer(mismatched)
    with pytest.raises(ProblemConstructionError):
        ProblemSpec(alpha=spec.alpha, kappa=1.0, nu=0.0, beta=0.0, eta=0.0,
                    gamma=1.0, delta=1, domain=(1.0, 0.0, 1.0),
                    h=spec.h, p1=spec.p1, p2=spec.p2)
    with pytest.raises(ProblemConstructionError):
        ProblemSpec(alpha=spec.alpha, kappa=1.0, nu=0.0, beta=0.0, eta=0.0,
                    gamma=1.0, delta=0, domain=(0.0, 1.0, 1.0),
                    h=spec.h, p1=spec.p1, p2=spec.p2)


def test_nonlinear_rhs_example1_structure():
    # kappa=1, nu=-1, beta=eta=gamma=1, delta=1:
    # M-part in the original unknown is w w_z + 2 w^2 - w^3
    hp = rescale_to_reference(example_problem(1, 0.9))
    rng = np.random.default_rng(21)
    for w, wz in rng.uniform(-1, 1, size=(20, 2)):
        want = w * wz + 2.0 * w * w - w**3
        assert hp.nonlinear_rhs(w, wz) == pytest.approx(want, abs=1e-12)
    assert hp.linear_zero_order == pytest.approx(1.0)


def test_nonlinear_rhs_example2_structure():
    # kappa=1, nu=-1, beta=-1, eta=0, gamma=1, delta=2:
    # M-part is w^2 w_z - w^3, zero-order coefficient gamma beta = -1
    hp = rescale_to_reference(example_problem(2, 0.9))
    rng = np.random.default_rng(22)
    for w, wz in rng.uniform(-1, 1, size=(20, 2)):
        want = w * w * wz - w**3
        assert hp.nonlinear_rhs(w, wz) == pytest.approx(want, abs=1e-12)
    assert hp.linear_zero_order == pytest.approx(-1.0)


class _ExactHomogenized:
    """v = w - f for Example 1 at alpha = 1, with closed-form derivatives."""

    def __init__(self, hp):
        self.hp = hp

    @staticmethod
    def _w(z, t):
        return 0.5 - 0.5 * math.tanh(0.25 * z + 0.375 * t)

    def value(self, z, t):
        return self._w(z, t) - self.hp.homogenizer.value(z, t)

    def d_zeta(self, z, t, order=1):
        u = 0.25 * z + 0.375 * t
        sech2 = 1.0 / math.cosh(u) ** 2
        if order == 1:
            return -0.125 * sech2 - self.hp.homogenizer.d_zeta(z, t)
        return (0.0625 * sech2 * math.tanh(u)
                - self.hp.homogenizer.d_zeta2(z, t))

    def caputo_tau(self, alpha, z, t):
        u = 0.25 * z + 0.375 * t
        return (-0.1875 / math.cosh(u) ** 2
                - self.hp.homogenizer.caputo_tau(z, t))


def test_splitting_consistency_classical_case():
    # at alpha = 1 the tanh wave solves the equation exactly, so
    # L v - M(., ., v) must vanish identically
    hp = rescale_to_reference(example_problem(1, 1.0))
    v = _ExactHomogenized(hp)
    rng = np.random.default_rng(23)
    for z, t in rng.uniform(0.05, 0.95, size=(20, 2)):
        lv = apply_linear_operator(hp, v, (z, t))
        m = eval_M(hp, (z, t), v.value(z, t), v.d_zeta(z, t))
        assert lv == pytest.approx(m, abs=1e-9), (z, t)


def test_apply_linear_operator_contract():
    hp = rescale_to_reference(example_problem(1, 0.9))
    with pytest.raises(ContractError):
        apply_linear_operator(hp, object(), (0.3, 0.4))


def test_rescaling_identity_and_time_scale():
    spec = example_problem(1, 0.9)
    hp = rescale_to_reference(spec)
    assert hp.kappa == pytest.approx(1.0)
    assert hp.nu == pytest.approx(-1.0)
    assert hp.beta == pytest.approx(1.0)

    # T = 2: coefficients pick up T^alpha; verified against the monomial rule
    alpha = 0.5
    z = BoundaryFn(lambda x: 0.0, lambda x: 0.0, lambda x: 0.0)
    spec2 = ProblemSpec(alpha=CaputoOrder(alpha), kappa=3.0, nu=2.0, beta=1.5,
                        eta=0.0, gamma=1.0, delta=1, domain=(0.0, 1.0, 2.0),
                        h=z, p1=z, p2=z)
    hp2 = rescale_to_reference(spec2)
    ta = 2.0 ** alpha
    assert hp2.kappa == pytest.approx(3.0 * ta)
    assert hp2.nu == pytest.approx(2.0 * ta)
    assert hp2.beta == pytest.approx(1.5 * ta)
    # chain-rule factor T^alpha checked independently: for f(tau) = tau,
    # D^a_tau f at tau = T t equals T^(1-a) * D^a_t (t) / T^(1-a) ... the
    # ratio of monomial derivatives reproduces exactly T^alpha
    t = 0.6
    ratio = caputo_monomial(1.0, alpha, 2.0 * t) / caputo_monomial(1.0, alpha, t)
    assert 2.0 / ratio == pytest.approx(ta)
    # reference-coordinate round trip
    z0, t0 = hp2.to_reference(0.3, 1.0)
    assert hp2.from_reference(z0, t0) == pytest.approx((0.3, 1.0))


def test_forcing_enters_eval_M():
    zfn = BoundaryFn(lambda x: 0.0, lambda x: 0.0, lambda x: 0.0)
    spec = ProblemSpec(alpha=CaputoOrder(0.5), kappa=1.0, nu=0.0, beta=0.0,
                       eta=0.0, gamma=1.0, delta=1, domain=(0.0, 1.0, 1.0),
                       h=zfn, p1=zfn, p2=zfn,
                       forcing=lambda z, t: 2.0 + z)
    hp = rescale_to_reference(spec)
    assert eval_M(hp, (0.25, 0.5), 0.0, 0.0) == pytest.approx(2.25)


def test_load_problem_config(tmp_path):
    cfg = tmp_path / "prob.txt"
    cfg.write_text(
        "# comment line\n"
        "alpha = 0.75\n"
        "kappa = 2.0\n"
        "nu = -1.0\n"
        "delta = 2\n"
        "data = ex2\n"
    )
    spec = load_problem_config(cfg)
    assert spec.alpha.alpha == 0.75
    assert spec.kappa == 2.0
    assert spec.delta == 2
    assert spec.exact is not None

    bad = tmp_path / "bad.txt"
    bad.write_text("unknown_key = 3\n")
    with pytest.raises(ConfigError):
        load_problem_config(bad)
    bad.write_text("alpha = not-a-number\n")
    with pytest.raises(ConfigError):
        load_problem_config(bad)
    bad.write_text("just some words\n")
    with pytest.raises(ConfigError):
        load_problem_config(bad)
    with pytest.raises(ConfigError):
        load_problem_config(tmp_path / "missing.txt")


def test_example_problem_exact_traces():
    for which in (1, 2):
        spec = example_problem(which, 0.9)
        for x in (0.0, 0.3, 1.0):
            assert spec.h(x) == pytest.approx(spec.exact(x, 0.0), abs=1e-14)
            assert spec.p1(x) == pytest.approx(spec.exact(0.0, x), abs=1e-14)
            assert spec.p2(x) == pytest.approx(spec.exact(1.0, x), abs=1e-14)
    with pytest.raises(ConfigError):
        example_problem(3, 0.9)
