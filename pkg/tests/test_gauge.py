"""Group algebra, the pointwise state action, and the parameter action.

Tests verify:
- composition/inverse against hand-computed elements and the group axioms
- apply() preserves density and is projective (a left action on states)
- act_on_params against a hand-computed image and the left-action law
- current transformation rule and the symplectic scaling factor
"""

import numpy as np
import pytest

from dg_gauge import (
    DegenerateFamily,
    FamilyParams,
    GaugeElement,
    IDENTITY,
    NodalState,
    ZeroPoint,
    act_on_params,
    apply,
    compose,
    current,
    density,
    gradient,
    inverse,
    linear_se,
    symplectic_factor,
    transform_current,
)
from dg_gauge import Grid, invariants
from dg_gauge.verification import random_gauge, random_nodeless_state


def test_compose_and_inverse_hand_values():
    g = compose(GaugeElement(2.0, 1.0), GaugeElement(3.0, 4.0))
    assert (g.lam, g.gamma) == (6.0, 9.0)
    h = inverse(GaugeElement(2.0, 1.0))
    assert (h.lam, h.gamma) == (0.5, -0.5)


def test_group_axioms(rng):
    for _ in range(200):
        g1, g2, g3 = (random_gauge(rng, lam_range=(-3.0, 3.0)) for _ in range(3))
        left = compose(g1, compose(g2, g3))
        right = compose(compose(g1, g2), g3)
        assert abs(left.lam - right.lam) < 1e-12
        assert abs(left.gamma - right.gamma) < 1e-12
        e = compose(g1, inverse(g1))
        assert abs(e.lam - 1.0) < 1e-12 and abs(e.gamma) < 1e-12


def test_gauge_element_must_be_invertible():
    with pytest.raises(ValueError):
        GaugeElement(0.0, 1.0)
    with pytest.raises(ValueError):
        GaugeElement(np.nan, 0.0)


def test_apply_preserves_density(rng):
    grid = Grid(64, 2.0 * np.pi)
    psi = random_nodeless_state(rng, grid)
    rho = density(psi).values
    for g in (GaugeElement(1.7, -0.4), GaugeElement(-2.0, 0.9)):
        rho_t = density(apply(g, psi)).values
        assert np.max(np.abs(rho_t - rho)) < 1e-13 * np.max(rho)


def test_apply_identity_and_projectivity(rng):
    grid = Grid(64, 2.0 * np.pi)
    psi = random_nodeless_state(rng, grid)
    np.testing.assert_allclose(apply(IDENTITY, psi).values, psi.values, atol=1e-13)
    for _ in range(20):
        g1, g2 = random_gauge(rng), random_gauge(rng)
        a = apply(compose(g1, g2), psi).values
        b = apply(g1, apply(g2, psi)).values
        assert np.max(np.abs(a - b)) < 1e-10, "state action is not projective"


def test_apply_round_trip(rng):
    grid = Grid(64, 2.0 * np.pi)
    psi = random_nodeless_state(rng, grid)
    g = GaugeElement(1.3, 0.8)
    back = apply(inverse(g), apply(g, psi)).values
    np.testing.assert_allclose(back, psi.values, atol=1e-12)


def test_act_on_params_hand_computed_image():
    # (lam, gamma) = (2, 1) applied to the hbar = m = 1 linear member.
    p = act_on_params(GaugeElement(2.0, 1.0), linear_se(1.0, 1.0))
    expected = (-0.25, 0.125, 0.25, -0.625, 0.25, -0.25, 0.3125, 2.0)
    np.testing.assert_allclose(p.as_array(), expected, rtol=0.0, atol=0.0)


def test_act_on_params_is_left_action(rng):
    from dg_gauge.verification import random_family_params

    for _ in range(100):
        g1, g2 = random_gauge(rng), random_gauge(rng)
        p = random_family_params(rng)
        a = act_on_params(g1, act_on_params(g2, p)).as_array()
        b = act_on_params(compose(g1, g2), p).as_array()
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_invariants_survive_negative_lam(rng):
    # The orbit functions are blind to the sign of lam as well.
    from dg_gauge.verification import random_family_params

    p = random_family_params(rng)
    g = GaugeElement(-1.6, 0.7)
    a = invariants(p).as_array()
    b = invariants(act_on_params(g, p)).as_array()
    np.testing.assert_allclose(b, a, rtol=1e-10, atol=1e-12)


def test_act_on_params_needs_nondegenerate_family():
    p = FamilyParams(nu1=0.0, nu2=0.1, mu1=0.0, mu2=0.0, mu3=0.0,
                     mu4=0.0, mu5=0.0, mu0=1.0)
    with pytest.raises(DegenerateFamily):
        act_on_params(GaugeElement(2.0, 0.0), p)


def test_transform_current_rule(rng):
    grid = Grid(128, 2.0 * np.pi)
    psi = random_nodeless_state(rng, grid)
    g = GaugeElement(1.4, -0.6)
    rho = density(psi)
    expected = g.lam * current(psi).values + 0.5 * g.gamma * gradient(rho).values
    got = transform_current(g, rho, current(psi)).values
    np.testing.assert_allclose(got, expected, atol=1e-12)
    direct = current(apply(g, psi)).values
    assert np.max(np.abs(got - direct)) < 1e-9


def test_transform_current_rejects_nodal_density():
    grid = Grid(64, 2.0 * np.pi)
    x = grid.axis()
    from dg_gauge import ScalarField, VectorField

    rho = ScalarField(grid, np.maximum(np.sin(x), 0.0))
    J = VectorField(grid, np.zeros((1, 64)))
    with pytest.raises(NodalState):
        transform_current(GaugeElement(2.0, 1.0), rho, J)


def test_symplectic_factor_scales_by_lam(rng):
    for _ in range(50):
        g = random_gauge(rng, lam_range=(0.3, 3.0))
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if abs(z) < 0.1:
            continue
        probe = symplectic_factor(g, z)
        assert abs(probe.jacobian_det - g.lam) < 1e-5 * max(1.0, abs(g.lam))


def test_symplectic_factor_rejects_origin():
    with pytest.raises(ZeroPoint):
        symplectic_factor(GaugeElement(2.0, 0.0), 0.0)
