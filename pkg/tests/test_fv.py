import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kfgbox.core import Grid, PhysicalParams, Potential, ScalarState, TwoComponentState
from kfgbox.fv import (
    apply_d,
    apply_h,
    apply_h_adj,
    apply_h_via_d,
    from_fv,
    h_from_d_identity,
    second_difference,
    to_fv,
)

seeds = st.integers(0, 2**32 - 1)


def _random_scalar(r, n, p):
    return ScalarState(r.standard_normal(n) + 1j * r.standard_normal(n),
                       r.standard_normal(n) + 1j * r.standard_normal(n), p)


@given(seeds, st.floats(-3, 3))
def test_roundtrip(seed, V0):
    r = np.random.default_rng(seed)
    p = PhysicalParams(1.3, 2.0, 0.7)
    s = _random_scalar(r, 12, p)
    back = from_fv(to_fv(s, V0), V0, p)
    assert np.allclose(back.psi, s.psi, atol=1e-12)
    assert np.allclose(back.psi_t, s.psi_t, atol=1e-12)


def test_stationary_components(unit):
    # psi_t = -i E psi / hbar gives psi1,2 = psi (1 +/- (E - V)/mc^2) / 2
    psi = np.array([1.0 + 0.5j, -2.0, 0.3j])
    E, V = 2.0, 0.5
    Psi = to_fv(ScalarState(psi, -1j * E * psi, unit), V)
    assert np.allclose(Psi.comp1, 0.5 * psi * (1 + (E - V)))
    assert np.allclose(Psi.comp2, 0.5 * psi * (1 - (E - V)))


def test_zero_maps_to_zero(unit):
    Psi = to_fv(ScalarState(np.zeros(5), np.zeros(5), unit))
    assert not np.any(Psi.stacked())


def test_step_potential_needs_grid(unit):
    s = ScalarState(np.ones(5), np.ones(5), unit)
    with pytest.raises(ValueError):
        to_fv(s, Potential.step(1.0, 0.5))
    g = Grid(0, 1, 5)
    Psi = to_fv(s, Potential.step(1.0, 0.5), g)
    assert Psi.comp1[0] != Psi.comp1[-1]


def test_second_difference_exact_on_quadratics():
    g = Grid(0.0, 2.0, 9)
    f = 3 * g.x**2 - g.x + 1
    assert np.allclose(second_difference(f, g.spacing), 6.0, atol=1e-10)


def _discrete_plane_wave(g, k, p, V=0.0):
    # exact eigenfunction of the central difference: D2 e^{ikx} = -(4/h^2) sin^2(kh/2) e^{ikx}
    kh2 = (4 / g.spacing**2) * np.sin(k * g.spacing / 2) ** 2
    E = V + np.sqrt((p.hbar * p.light_speed) ** 2 * kh2 + p.rest_energy**2)
    psi = np.exp(1j * k * g.x)
    return to_fv(ScalarState(psi, -1j * E / p.hbar * psi, p), V), E, kh2


@pytest.mark.parametrize("V", [0.0, 0.4])
def test_apply_h_on_discrete_plane_wave(V):
    g = Grid(0.0, 1.0, 41)
    p = PhysicalParams(1.0, 1.5, 1.0)
    Psi, E, _ = _discrete_plane_wave(g, 7.0, p, V)
    hPsi = apply_h(Psi, V, g, p).interior()
    assert np.allclose(hPsi, E * Psi.stacked()[:, 1:-1], atol=1e-9)


def test_apply_d_on_discrete_plane_wave():
    g = Grid(0.0, 1.0, 41)
    p = PhysicalParams(1.0, 2.0, 1.0)
    psi = np.exp(3j * g.x)
    kh2 = (4 / g.spacing**2) * np.sin(3 * g.spacing / 2) ** 2
    out = apply_d(psi, g, p).interior()
    assert np.allclose(out, (p.light_speed**2 * kh2 + 1 / p.tau**2) * psi[1:-1], atol=1e-9)


@given(seeds)
def test_h_from_d_identity(seed):
    r = np.random.default_rng(seed)
    g = Grid(0.0, 1.0, 17)
    p = PhysicalParams(0.8, 1.7, 1.1)
    Psi = TwoComponentState(r.standard_normal(17) + 1j * r.standard_normal(17), r.standard_normal(17))
    V = r.standard_normal(17)
    assert h_from_d_identity(Psi, V, g, p) <= 1e-10 * max(1.0, np.max(np.abs(apply_h(Psi, V, g, p).interior())))


def test_formal_adjoint_has_same_action(rng):
    g = Grid(0.0, 1.0, 11)
    Psi = TwoComponentState(rng.standard_normal(11), 1j * rng.standard_normal(11))
    a = apply_h(Psi, 0.2, g).result.stacked()
    b = apply_h_adj(Psi, 0.2, g).result.stacked()
    assert np.array_equal(a, b)


def test_apply_h_via_d_matches_direct_including_ends(rng):
    g = Grid(0.0, 1.0, 11)
    Psi = TwoComponentState(rng.standard_normal(11), rng.standard_normal(11))
    a = apply_h(Psi, None, g).result.stacked()
    b = apply_h_via_d(Psi, None, g).result.stacked()
    assert np.allclose(a, b, atol=1e-10)


def test_grid_mismatch(unit):
    with pytest.raises(ValueError):
        apply_h(TwoComponentState(np.ones(5), np.ones(5)), None, Grid(0, 1, 6), unit)
