import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from sirrd.grid import Field, Grid, norm
from sirrd.integrator import SimConfig, initial_state, simulate
from sirrd.kinetics import Params, PAPER_PARAMS
from sirrd.spectral import (
    build_infection_free,
    cosine_coefficients,
    eval_infection_free,
    eval_on_grid,
    eval_point,
    parseval_l2,
)

P0 = PAPER_PARAMS.with_beta(0.0)


def test_constant_field_coefficients():
    g = Grid(5.0, 12)
    c = cosine_coefficients(g.constant(2.5)).table
    assert c[0, 0] == pytest.approx(2.5, rel=1e-15)
    c[0, 0] = 0
    assert np.abs(c).max() <= 1e-14 * 2.5


def test_single_mode_coefficients():
    g = Grid(5.0, 16)
    X, Y = g.mesh()
    c = cosine_coefficients(Field(g, np.cos(np.pi * X / g.L))).table
    assert c[1, 0] == pytest.approx(1.0, abs=1e-13)
    c[1, 0] = 0
    assert np.abs(c).max() <= 1e-13
    # y-dependence goes to the second index
    c = cosine_coefficients(Field(g, np.cos(3 * np.pi * Y / g.L))).table
    assert c[0, 3] == pytest.approx(1.0, abs=1e-13)


def test_nmax_bounds():
    g = Grid(5.0, 8)
    with pytest.raises(ValueError):
        cosine_coefficients(g.constant(1.0), 8)
    assert cosine_coefficients(g.constant(1.0), 3).nmax == 3


def test_round_trip_random():
    g = Grid(5.0, 32)
    rng = np.random.default_rng(8)
    fields = [Field(g, rng.random((32, 32))) for _ in range(3)]
    sol = build_infection_free(*fields, P0)
    out = eval_on_grid(sol, g, 0.0)
    for a, b in zip(out, fields):
        assert np.abs(a.values - b.values).max() <= 1e-10
    # pointwise evaluation agrees with the matrix path
    X, Y = g.mesh()
    s, i, r = eval_infection_free(sol, X[::7, ::5], Y[::7, ::5], 0.0)
    assert np.abs(i - fields[1].values[::7, ::5]).max() <= 1e-10


def test_parseval():
    g = Grid(5.0, 24)
    f = Field(g, np.random.default_rng(2).normal(size=(24, 24)))
    assert parseval_l2(cosine_coefficients(f)) == pytest.approx(norm(f, "l2"), rel=1e-9)


def test_forced_coefficient_equal_diffusivities():
    p = Params(0.3, 0.4, 0.4, b=0.5, beta=0.0, nu=0.5, gamma=0.5)
    g = Grid(5.0, 12)
    st = initial_state(g, {"type": "paper_gaussian"})
    sol = build_infection_free(st.s, st.i, st.r, p)
    np.testing.assert_allclose(sol.e.table, -sol.d.table, atol=1e-16)
    paper = build_infection_free(st.s, st.i, st.r, p, mode="paper")
    np.testing.assert_allclose(paper.e.table, paper.d.table, atol=1e-16)


def test_forced_coefficient_ratio_paper_params():
    g = Grid(5.0, 16)
    X, _ = g.mesh()
    i0 = Field(g, 0.1 * np.cos(np.pi * X / g.L) + 0.2)
    z = g.constant(0.0)
    ratio = 12.5 / (12.5 + math.pi**2 * (-0.1))
    assert ratio == pytest.approx(1.08573, abs=1e-5)
    sol = build_infection_free(z, i0, z, P0)
    assert sol.e.table[1, 0] / sol.d.table[1, 0] == pytest.approx(-ratio, rel=1e-12)
    paper = build_infection_free(z, i0, z, P0, mode="paper")
    assert paper.e.table[1, 0] / paper.d.table[1, 0] == pytest.approx(ratio, rel=1e-12)
    # f absorbs e so that R(0) = R0
    assert sol.f.table[1, 0] == pytest.approx(-sol.e.table[1, 0], rel=1e-12)


def test_susceptible_fixed_point():
    g = Grid(5.0, 8)
    s0 = g.constant(P0.b / P0.nu)
    sol = build_infection_free(s0, g.constant(0.0), g.constant(0.0), P0)
    assert np.abs(sol.c.table).max() == 0.0
    for t in (0.0, 1.0, 7.0):
        assert np.all(eval_on_grid(sol, g, t)[0].values == 1.0)


def test_uniform_infected_decays_exactly():
    g = Grid(5.0, 8)
    sol = build_infection_free(g.constant(0.3), g.constant(0.7), g.constant(0.1), P0)
    for t in (0.5, 2.0, 5.0):
        pt = eval_point(sol, 1.3, 4.1, t)
        assert pt.i == pytest.approx(0.7 * math.exp(-(P0.gamma + P0.nu) * t), rel=1e-13)


def test_long_time_limit():
    g = Grid(5.0, 16)
    st = initial_state(g, {"type": "paper_gaussian"})
    sol = build_infection_free(st.s, st.i, st.r, P0)
    pt = eval_point(sol, 1.0, 2.0, 80.0)
    assert (pt.s, pt.i, pt.r) == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)


def test_grid_mismatch_rejected():
    a, b = Grid(5.0, 8), Grid(5.0, 10)
    with pytest.raises(ValueError):
        build_infection_free(a.constant(1), b.constant(0), a.constant(0), P0)


def _mode_ode_check(sol, n, m, t_end=3.0):
    """Integrate the forced R-mode ODE independently and compare amplitudes."""
    p = sol.params
    k2 = math.pi**2 * (n * n + m * m) / sol.L**2
    d = sol.d.table[n, m]
    r0 = sol.e.table[n, m] + sol.f.table[n, m]

    def rhs(t, y):
        return [-p.chi_r * k2 * y[0] + p.gamma * math.exp(-p.gamma * t) * d * math.exp(-p.chi_i * k2 * t)]

    ts = np.linspace(0, t_end, 7)
    ref = solve_ivp(rhs, (0, t_end), [r0], t_eval=ts, rtol=1e-13, atol=1e-15, method="DOP853").y[0]
    got = [sol.mode_amplitudes(t)[2][n, m] * math.exp(p.nu * t) for t in ts]
    return np.abs(np.array(got) - ref).max()


def test_r_modes_solve_forced_ode():
    g = Grid(5.0, 16)
    st = initial_state(g, {"type": "paper_gaussian"})
    sol = build_infection_free(st.s, st.i, st.r, P0)
    for n, m in [(0, 0), (2, 0), (2, 2), (4, 6)]:
        assert _mode_ode_check(sol, n, m) <= 1e-9
    paper = build_infection_free(st.s, st.i, st.r, P0, mode="paper")
    assert _mode_ode_check(paper, 0, 0) > 1e-3


def test_resonant_mode_secular_branch():
    # L = pi makes k^2(1,0) = 1; gamma + (chi_I - chi_R) * 1 = 0
    p = Params(0.3, 0.4, 0.9, b=0.5, beta=0.0, nu=0.5, gamma=0.5)
    g = Grid(math.pi, 16)
    X, Y = g.mesh()
    i0 = Field(g, 0.2 + 0.1 * np.cos(X) + 0.05 * np.cos(Y))
    r0 = Field(g, 0.3 + 0.02 * np.cos(X))
    sol = build_infection_free(g.constant(1.0), i0, r0, p)
    assert sol.resonance_flags == {(1, 0), (0, 1)}
    assert sol.e.table[1, 0] == 0.0
    assert sol.f.table[1, 0] == pytest.approx(0.02, abs=1e-13)
    assert _mode_ode_check(sol, 1, 0) <= 1e-9
    assert _mode_ode_check(sol, 0, 0) <= 1e-9
    out = eval_on_grid(sol, g, 0.0)
    assert np.abs(out[2].values - r0.values).max() <= 1e-12


def test_l2_decay_rate_of_infected():
    g = Grid(5.0, 16)
    st = initial_state(g, {"type": "paper_gaussian"})
    sol = build_infection_free(st.s, st.i, st.r, P0)
    ts = np.linspace(0, 6, 25)
    logs = [math.log(norm(eval_on_grid(sol, g, t)[1], "l2")) for t in ts]
    slopes = np.diff(logs) / np.diff(ts)
    assert np.all(slopes <= -(P0.gamma + P0.nu) + 1e-12)
    # uniform data: equality
    solu = build_infection_free(g.constant(1), g.constant(0.4), g.constant(0), P0)
    a, b = (math.log(norm(eval_on_grid(solu, g, t)[1], "l2")) for t in (1.0, 2.0))
    assert b - a == pytest.approx(-(P0.gamma + P0.nu), rel=1e-12)


def test_agrees_with_integrator_small_grid():
    g = Grid(5.0, 32)
    cfg = SimConfig(P0, g, 0.5, snapshot_stride=10**6)
    st = initial_state(g, cfg.init)
    num = simulate(cfg).final
    sol = build_infection_free(st.s, st.i, st.r, P0)
    ana = eval_on_grid(sol, g, 0.5)
    gap = max(np.abs(a.values - b).max() for a, b in zip(ana, num.arrays()))
    assert gap <= 5e-3
