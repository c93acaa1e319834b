import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlsdtn.asymptotics import g11_sine
from nlsdtn.glm import (ZETA_M12, BoundaryData, KernelField, SolverError, TriangularGrid,
                        alternative_system_residual, characteristic_minus, characteristic_plus,
                        global_relation_residual, row_inverse_abel, solve_dtn, solve_goursat,
                        sqrt_trapezoid_error)
from nlsdtn.special import SampledFunction


def zero_data(lam=1):
    return BoundaryData("zero", lambda t: 0 * np.asarray(t, dtype=float) + 0j, lam)


# -- grid ----------------------------------------------------------------------


@given(st.floats(0.1, 50.0), st.integers(1, 40))
def test_grid_nodes_inside_triangle_and_on_characteristics(T, N):
    g = TriangularGrid(T, N)
    dt = g.dt
    for i, j, t, s in g.nodes():
        assert -t - 1e-12 <= s <= t + 1e-12
        # t + s and t - s are integer multiples of 2 dt
        assert abs((t + s) / (2 * dt) - j) < 1e-9
        assert abs((t - s) / (2 * dt) - (i - j)) < 1e-9


def test_grid_validation():
    with pytest.raises(ValueError):
        TriangularGrid(0.0, 10)
    with pytest.raises(ValueError):
        TriangularGrid(1.0, 0)


def test_boundary_data_compatibility():
    with pytest.raises(ValueError):
        BoundaryData.sine(phase=0.5)
    with pytest.raises(ValueError):
        BoundaryData.sine(lam=2)
    g = BoundaryData.series([np.sin, lambda t: np.sin(2 * t)], epsilon=0.1)
    assert abs(g(1.0) - (0.1 * np.sin(1.0) + 0.01 * np.sin(2.0))) < 1e-15


def test_table_data_derivative_is_fourth_order():
    t = np.linspace(0, 5, 201)
    g = BoundaryData.table(SampledFunction(t, np.sin(t)))
    x = np.linspace(0.5, 4.5, 9)
    assert np.max(np.abs(g.derivative(x) - np.cos(x))) < 1e-6


# -- characteristics -----------------------------------------------------------


def test_characteristic_minus_examples():
    t, s = 2.0, 0.5
    assert characteristic_minus(np.sin, lambda a, b: 0 * a, t, s) == pytest.approx(np.sin(1.25))
    assert characteristic_minus(lambda x: 0.0, lambda a, b: 1 + 0 * a, t, s) == pytest.approx(0.75)
    x = (t + s) / 2
    exact = np.sin(x) + (t * t - x * x) / 2
    got = characteristic_minus(np.sin, lambda a, b: a, t, s, steps=8)
    # trapezoid is exact for a linear integrand
    assert abs(got - exact) < 1e-14


def test_characteristic_plus_examples():
    t, s = 3.0, -1.0
    assert characteristic_plus(np.cos, lambda a, b: 0 * a, t, s) == pytest.approx(np.cos(2.0))
    assert characteristic_plus(lambda y: 0.0, lambda a, b: 1 + 0 * a, t, s) == pytest.approx(1.0)
    exact = 1 + np.sin(t) - np.sin((t - s) / 2)
    got = characteristic_plus(lambda y: 1.0, lambda a, b: np.cos(a), t, s, steps=4000)
    assert abs(got - exact) < 1e-7


def test_characteristic_rejects_outside_points():
    with pytest.raises(ValueError):
        characteristic_minus(np.sin, lambda a, b: a, 1.0, 1.5)
    with pytest.raises(ValueError):
        characteristic_plus(np.sin, lambda a, b: a, 1.0, -1.5)


@settings(max_examples=30)
@given(st.floats(0.1, 10.0), st.floats(-1.0, 1.0), st.floats(-3, 3), st.floats(-3, 3))
def test_characteristics_integrate_affine_rhs_exactly(t, frac, a, b):
    s = frac * t
    rhs = lambda tau, sig: a + b * tau
    x = (t + s) / 2
    got = characteristic_minus(lambda z: 0.0, rhs, t, s, steps=3)
    assert abs(got - (a * (t - x) + b * (t * t - x * x) / 2)) < 1e-10 * (1 + t * t)
    y = (t - s) / 2
    got = characteristic_plus(lambda z: 0.0, rhs, t, s, steps=3)
    assert abs(got - (a * (t - y) + b * (t * t - y * y) / 2)) < 1e-10 * (1 + t * t)


# -- discrete inverse Abel and the start correction ---------------------------


def test_sqrt_trapezoid_error_tends_to_zeta():
    e = sqrt_trapezoid_error(4096)
    assert e[0] == 0
    for n in (256, 1024, 4096):
        assert abs(e[n] - (ZETA_M12 + 1 / (24 * np.sqrt(n)))) < 2 * n**-2.5
    assert abs(ZETA_M12 - float(mpmath.zeta(-0.5))) < 1e-15


def test_row_inverse_abel_second_order_with_x32_start():
    # F(x) = x^{3/2} + x^2 has inverse Abel (3/4) x + (8/(3 pi)) x^{3/2}
    errs = []
    for n in (32, 64, 128):
        h = 1.0 / n
        x = h * np.arange(n + 1)
        F = x**1.5 + x**2
        exact = 0.75 * x + 8 / (3 * np.pi) * x**1.5
        errs.append(np.max(np.abs(row_inverse_abel(F + 0j, h) - exact)))
    assert errs[0] / errs[1] > 3.5 and errs[1] / errs[2] > 3.5


# -- Goursat problem and the global relation ------------------------------------


def test_goursat_zero_data():
    grid = TriangularGrid(4.0, 40)
    f = solve_goursat(zero_data(), lambda t: 0 * t, grid)
    for X in (f.M1, f.M2, f.L1, f.L2):
        assert np.max(np.abs(X)) == 0
    assert global_relation_residual(f, zero_data()) == (0.0, 0.0, 0.0)


def test_goursat_boundary_values_imposed():
    grid = TriangularGrid(5.0, 50)
    g0 = BoundaryData.sine(0.3)
    g1 = lambda t: 0.3 * g11_sine(t)
    f = solve_goursat(g0, g1, grid)
    assert np.array_equal(f.diagonal("M1"), g0(grid.t))
    assert np.allclose(f.diagonal("L1"), 0.5j * g1(grid.t), rtol=0, atol=0)
    assert np.max(np.abs(f.antidiagonal("M2"))) == 0
    assert np.max(np.abs(f.antidiagonal("L2"))) == 0


def test_global_relation_with_first_order_neumann_data():
    grid = TriangularGrid(8.0, 400)
    g0 = BoundaryData.sine(1e-3)
    f = solve_goursat(g0, lambda t: 1e-3 * g11_sine(t), grid)
    assert max(global_relation_residual(f, g0)) < 1e-7


def test_global_relation_needs_L_kernels():
    grid = TriangularGrid(1.0, 4)
    z = np.zeros((5, 5), dtype=complex)
    with pytest.raises(ValueError):
        global_relation_residual(KernelField(grid, z, z), zero_data())


def test_global_relation_residual_of_solver_output_is_second_order():
    g0 = BoundaryData.sine(0.1)
    res = []
    for N in (50, 100, 200):
        grid = TriangularGrid(6.0, N)
        r = solve_dtn(g0, grid)
        res.append(max(global_relation_residual(solve_goursat(g0, r.g1, grid), g0)))
    assert res[2] < res[1] < res[0]
    assert res[0] / res[2] > 10


def test_wrong_neumann_data_is_detected():
    g0 = BoundaryData.sine(0.1)
    r1 = []
    for N in (50, 100, 200):
        f = solve_goursat(g0, lambda t: 0 * t, TriangularGrid(6.0, N))
        r1.append(global_relation_residual(f, g0)[0])
    assert min(r1) > 0.04


def test_goursat_picard_failure_is_reported():
    g0 = BoundaryData.sine(30.0)
    with pytest.raises(SolverError):
        solve_goursat(g0, lambda t: 30 * g11_sine(t), TriangularGrid(8.0, 8), max_iter=3)


# -- nonlinear DtN solver --------------------------------------------------------


def test_zero_data_gives_zero():
    r = solve_dtn(zero_data(), TriangularGrid(3.0, 30))
    assert np.max(np.abs(r.g1_values)) == 0
    assert np.max(np.abs(r.field.M1)) == 0 and np.max(np.abs(r.field.M2)) == 0


def test_diagonal_and_antidiagonal_data():
    grid = TriangularGrid(6.0, 120)
    g0 = BoundaryData.sine(0.2)
    r = solve_dtn(g0, grid)
    assert np.array_equal(r.field.diagonal("M1"), g0(grid.t))
    assert np.max(np.abs(r.field.antidiagonal("M2"))) == 0
    assert r.antidiagonal_drift <= 10 * grid.dt**2
    field_, g1 = r
    assert field_ is r.field and g1 is r.g1


def test_volterra_causality_is_bit_exact():
    grid = TriangularGrid(6.0, 120)
    a = BoundaryData.sine(0.2)
    b = BoundaryData("bent", lambda t: 0.2 * np.sin(t) + np.where(t > 3.0, 0.01 * (t - 3.0) ** 3, 0.0) + 0j)
    ra, rb = solve_dtn(a, grid), solve_dtn(b, grid)
    k = 60  # t = 3.0
    assert np.array_equal(ra.g1_values[: k + 1], rb.g1_values[: k + 1])
    assert np.array_equal(ra.field.M1[: k + 1], rb.field.M1[: k + 1])
    assert np.array_equal(ra.field.M2[: k + 1], rb.field.M2[: k + 1])
    assert not np.array_equal(ra.g1_values, rb.g1_values)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 2 * np.pi))
def test_gauge_covariance(theta):
    grid = TriangularGrid(4.0, 60)
    g0 = BoundaryData.sine(0.3)
    phase = np.exp(1j * theta)
    r = solve_dtn(g0, grid)
    rp = solve_dtn(g0.scaled(phase), grid)
    assert np.max(np.abs(rp.g1_values - phase * r.g1_values)) <= 1e-13


def test_small_data_matches_first_order():
    grid = TriangularGrid(8.0, 200)
    g0 = BoundaryData.sine(1e-3)
    r = solve_dtn(g0, grid)
    err = np.max(np.abs(r.g1_values - 1e-3 * g11_sine(grid.t)))
    # grid error of the first-order term plus an O(eps^3) correction
    assert err < 1e-3 * 5e-3


def test_grid_convergence_second_order():
    g0 = BoundaryData.sine(0.1)
    sols = [solve_dtn(g0, TriangularGrid(6.0, N)).g1_values for N in (40, 80, 160, 320)]
    diffs = [np.max(np.abs(a - b[::2])) for a, b in zip(sols[:-1], sols[1:])]
    assert diffs[0] / diffs[1] >= 3.5 and diffs[1] / diffs[2] >= 3.5


def test_focusing_sign_supported():
    grid = TriangularGrid(6.0, 120)
    rp = solve_dtn(BoundaryData.sine(0.1, lam=1), grid)
    rm = solve_dtn(BoundaryData.sine(0.1, lam=-1), grid)
    # lam only enters from third order on
    d = np.max(np.abs(rp.g1_values - rm.g1_values))
    assert 1e-5 < d < 1e-2


def test_picard_failure_raises_solver_error():
    with pytest.raises(SolverError) as exc:
        solve_dtn(BoundaryData.sine(5.0), TriangularGrid(8.0, 8), max_iter=5)
    assert exc.value.step is not None


def test_alternative_system_residual_vanishes_under_refinement():
    g0 = BoundaryData.sine(0.1)
    r = [max(alternative_system_residual(solve_dtn(g0, TriangularGrid(6.0, N)).field, g0))
         for N in (50, 100)]
    assert r[1] < 0.6 * r[0]
