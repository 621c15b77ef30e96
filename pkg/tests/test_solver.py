import numpy as np
import pytest

from tfbh.basis import build_basis, generate_dense_sequence
from tfbh.errors import DivergenceError, DomainError
from tfbh.fractional import CaputoOrder
from tfbh.problem import (
    BoundaryFn,
    ProblemSpec,
    example_problem,
    rescale_to_reference,
)
from tfbh.solver import (
    error_norms,
    error_tail,
    evaluate,
    norm_telescoping_check,
    solve,
)

_ZERO = BoundaryFn(lambda x: 0.0, lambda x: 0.0, lambda x: 0.0)


def _solve_example(which, alpha, n):
    spec = example_problem(which, alpha)
    hp = rescale_to_reference(spec)
    basis = build_basis(hp, generate_dense_sequence(n))
    sol, report = solve(hp, basis)
    return spec, sol, report


@pytest.fixture(scope="module")
def ex1_n8():
    return _solve_example(1, 0.9, 8)


def test_zero_problem_fixed_point():
    spec = ProblemSpec(alpha=CaputoOrder(0.7), kappa=1.0, nu=0.0, beta=0.0,
                       eta=0.0, gamma=1.0, delta=1, domain=(0.0, 1.0, 1.0),
                       h=_ZERO, p1=_ZERO, p2=_ZERO)
    hp = rescale_to_reference(spec)
    basis = build_basis(hp, generate_dense_sequence(6))
    sol, report = solve(hp, basis)
    np.testing.assert_allclose(sol.b_coeffs, 0.0)
    assert evaluate(sol, (0.3, 0.8)) == 0.0
    assert norm_telescoping_check(sol) == 0.0
    np.testing.assert_allclose(report.residuals, 0.0)


def test_telescoping_and_coefficient_report(ex1_n8):
    _, sol, report = ex1_n8
    assert norm_telescoping_check(sol) < 1e-8
    assert sol.norm_sq_by_coeffs() == pytest.approx(sol.norm_sq_by_gram(),
                                                    abs=1e-8)
    assert np.all(np.diff(report.cumulative_norms) >= -1e-15)
    assert report.cumulative_norms[-1] == pytest.approx(
        np.sqrt(sol.norm_sq_by_coeffs()))
    # the linear system residual at the collocation points is tiny: the
    # cached M values are interpolated exactly by construction
    assert np.max(np.abs(report.residuals)) < 1e-8


def test_boundary_trace_exactness(ex1_n8):
    spec, sol, _ = ex1_n8
    for x in np.linspace(0.0, 1.0, 25):
        assert evaluate(sol, (x, 0.0)) == pytest.approx(spec.h(x), abs=1e-9)
        assert evaluate(sol, (0.0, x)) == pytest.approx(spec.p1(x), abs=1e-9)
        assert evaluate(sol, (1.0, x)) == pytest.approx(spec.p2(x), abs=1e-9)


def test_evaluate_domain_check(ex1_n8):
    _, sol, _ = ex1_n8
    with pytest.raises(DomainError):
        evaluate(sol, (1.5, 0.5))
    with pytest.raises(DomainError):
        evaluate(sol, (0.5, -0.1))


def test_error_norms_basics(ex1_n8):
    spec, sol, _ = ex1_n8
    # exact == approximate: all norms vanish
    approx_as_exact = lambda z, t: evaluate(sol, (z, t))
    l2, linf, pw = error_norms(sol, approx_as_exact, 0.5, [0.25, 0.75])
    assert l2 == 0.0 and linf == 0.0 and pw == [0.0, 0.0]
    # single point: L2 == Linf == |error|
    shifted = lambda z, t: evaluate(sol, (z, t)) + 3e-3
    l2, linf, _ = error_norms(sol, shifted, 0.5, [0.4])
    assert l2 == pytest.approx(3e-3) and linf == pytest.approx(3e-3)
    with pytest.raises(DomainError):
        error_norms(sol, spec.exact, 0.5, [])


def test_error_tail_monotone(ex1_n8):
    _, sol, _ = ex1_n8
    assert error_tail(sol, sol.n) == 0.0
    assert error_tail(sol, 0) == pytest.approx(sol.norm_sq_by_coeffs())
    tails = [error_tail(sol, k) for k in range(sol.n + 1)]
    assert all(a >= b - 1e-15 for a, b in zip(tails[:-1], tails[1:]))
    with pytest.raises(DomainError):
        error_tail(sol, sol.n + 1)


def test_solution_accuracy_example1(ex1_n8):
    spec, sol, _ = ex1_n8
    _, linf, _ = error_norms(sol, spec.exact, 0.5, [i / 6 for i in range(1, 6)])
    assert linf < 2e-2


def test_divergence_error():
    # an absurd reaction coefficient overflows the polynomial nonlinearity
    spec = example_problem(1, 0.9)
    blown = ProblemSpec(alpha=spec.alpha, kappa=1.0, nu=-1.0, beta=1.0,
                        eta=1e160, gamma=1.0, delta=2, domain=spec.domain,
                        h=spec.h, p1=spec.p1, p2=spec.p2)
    hp = rescale_to_reference(blown)
    basis = build_basis(hp, generate_dense_sequence(6))
    with pytest.raises(DivergenceError) as exc:
        solve(hp, basis)
    assert 0 <= exc.value.iteration < basis.n


def test_repass_option(ex1_n8):
    spec = example_problem(1, 0.9)
    hp = rescale_to_reference(spec)
    basis = build_basis(hp, generate_dense_sequence(8))
    sol2, _ = solve(hp, basis, passes=2)
    _, sol1, _ = ex1_n8
    # the repass stays in the same accuracy regime as the single pass
    a = error_norms(sol1, spec.exact, 0.5, [0.25, 0.5, 0.75])[1]
    b = error_norms(sol2, spec.exact, 0.5, [0.25, 0.5, 0.75])[1]
    assert b < 10 * a + 1e-3
    with pytest.raises(DomainError):
        solve(hp, basis, passes=0)
