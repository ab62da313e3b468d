import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sirrd.kinetics import (
    Params,
    SirPoint,
    equilibria,
    invariant_region,
    jacobian,
    reaction_rates,
)

pos = st.floats(min_value=1e-3, max_value=10.0)
dens = st.floats(min_value=-10.0, max_value=10.0)


def params_strategy():
    return st.builds(
        Params, chi_s=pos, chi_i=pos, chi_r=pos, b=pos,
        beta=st.floats(min_value=0.0, max_value=10.0), nu=pos, gamma=pos,
    )


def test_params_validation():
    with pytest.raises(ValueError):
        Params(0.3, 0.4, 0.5, b=-1, beta=0.1, nu=0.5, gamma=0.5)
    with pytest.raises(ValueError):
        Params(0.3, 0.4, 0.5, b=1, beta=-0.1, nu=0.5, gamma=0.5)
    Params(0.3, 0.4, 0.5, b=1, beta=0.0, nu=0.5, gamma=0.5)


def test_reaction_rates_examples(paper, endemic):
    a1 = equilibria(paper).a1
    assert reaction_rates(paper, a1) == SirPoint(0.0, 0.0, 0.0)
    assert reaction_rates(paper, SirPoint(0, 0, 0)) == SirPoint(paper.b, 0.0, 0.0)
    r = reaction_rates(endemic, SirPoint(1.0, 1.5, 1.5))
    assert max(abs(r.s), abs(r.i), abs(r.r)) == 0.0


@given(params_strategy(), dens, dens, dens)
def test_mass_balance_identity(p, s, i, r):
    f = reaction_rates(p, SirPoint(s, i, r))
    expected = p.b - p.nu * (s + i + r)
    assert f.s + f.i + f.r == pytest.approx(expected, abs=1e-12 * (1 + abs(p.b) + p.nu * 30 + p.beta * 100))


def test_jacobian_examples(paper, endemic):
    J = jacobian(paper, SirPoint(1.0, 0.0, 0.0))
    np.testing.assert_allclose(J, [[-0.5, -0.01, 0], [0, -0.99, 0], [0, 0.5, -0.5]], atol=1e-15)
    J2 = jacobian(endemic, SirPoint(1.0, 1.5, 1.5))
    np.testing.assert_allclose(J2, [[-2, -1, 0], [1.5, 0, 0], [0, 0.5, -0.5]], atol=1e-15)


def test_jacobian_matches_central_differences():
    rng = np.random.default_rng(11)
    h = 1e-5
    for _ in range(100):
        p = Params(*rng.uniform(0.05, 2.0, size=4), beta=rng.uniform(0, 2), nu=rng.uniform(0.05, 2), gamma=rng.uniform(0.05, 2))
        u = rng.uniform(0, 10, size=3)
        J = jacobian(p, SirPoint.from_array(u))
        fd = np.empty((3, 3))
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            fp = reaction_rates(p, SirPoint.from_array(u + e)).as_array()
            fm = reaction_rates(p, SirPoint.from_array(u - e)).as_array()
            fd[:, k] = (fp - fm) / (2 * h)
        scale = max(1.0, np.abs(J).max())
        assert np.abs(fd - J).max() / scale <= 1e-6


def test_equilibria_paper(paper):
    eq = equilibria(paper)
    assert eq.a1 == SirPoint(1.0, 0.0, 0.0)
    assert eq.margin == pytest.approx(-0.495, abs=1e-15)
    assert eq.a2 is None


def test_equilibria_endemic(endemic):
    eq = equilibria(endemic)
    assert eq.margin == 1.5
    assert eq.a2.as_array() == pytest.approx([1.0, 1.5, 1.5], abs=1e-15)
    res = reaction_rates(endemic, eq.a2).as_array()
    assert np.abs(res).max() <= 1e-12


def test_equilibria_threshold_coincides():
    p = Params(0.3, 0.4, 0.5, b=0.5, beta=1.0, nu=0.5, gamma=0.5)
    eq = equilibria(p)
    assert eq.margin == 0.0
    assert eq.a2 == eq.a1 == SirPoint(1.0, 0.0, 0.0)
    assert eq.coincident


def test_equilibria_beta_zero():
    p = Params(0.3, 0.4, 0.5, b=0.5, beta=0.0, nu=0.5, gamma=0.5)
    eq = equilibria(p)
    assert eq.a2 is None
    assert eq.margin == pytest.approx(-0.25 - 0.25)


@settings(max_examples=300)
@given(params_strategy())
def test_equilibria_residuals_and_existence(p):
    eq = equilibria(p)
    tol = 1e-12 * p.scale() * max(1.0, eq.a1.s) ** 2
    assert np.abs(reaction_rates(p, eq.a1).as_array()).max() <= tol
    if eq.margin < 0:
        assert eq.a2 is None
    elif p.beta > 0:
        a2 = eq.a2.as_array()
        assert (a2 >= 0).all()
        scale = p.scale() * max(1.0, np.abs(a2).max()) ** 2
        assert np.abs(reaction_rates(p, eq.a2).as_array()).max() <= 1e-12 * scale * 10


def test_invariant_region_examples():
    box = invariant_region(Params(0.3, 0.4, 0.5, b=0.5, beta=0.001, nu=0.5, gamma=0.5))
    assert (box.c1, box.c2, box.c3) == pytest.approx((10.0, 5.0, 6.0), rel=1e-12)
    box = invariant_region(Params(0.3, 0.4, 0.5, b=1.0, beta=0.125, nu=0.5, gamma=0.5))
    assert (box.c1, box.c2, box.c3) == pytest.approx((2.0, 2.0, 3.0), rel=1e-12)


@pytest.mark.parametrize("beta", [1.0, 1.5, 0.0])
def test_invariant_region_rejects(beta):
    with pytest.raises(ValueError):
        invariant_region(Params(0.3, 0.4, 0.5, b=1.0, beta=beta, nu=0.5, gamma=0.5))


@given(params_strategy().filter(lambda p: 1e-9 < p.beta < 1))
def test_invariant_region_requirements(p):
    box = invariant_region(p)
    assert box.c1 * p.beta < p.gamma + p.nu
    assert box.c3 > p.gamma * box.c2 / p.nu


def test_invariant_region_product_vanishes():
    vals = []
    for beta in (1e-3, 1e-6, 1e-9):
        p = Params(0.3, 0.4, 0.5, b=0.5, beta=beta, nu=0.5, gamma=0.5)
        box = invariant_region(p)
        prod = beta * box.c1 * box.c2
        assert prod == pytest.approx(p.b * beta ** (1 / 3), rel=1e-12)
        vals.append(prod)
    assert vals[0] > vals[1] > vals[2]
