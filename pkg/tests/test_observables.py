import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kfgbox.algebra import random_unitary
from kfgbox.bc import BCSpec, boundary_data_from_bc, fv_boundary_data, preset
from kfgbox.core import BoundaryData1, Grid, PhysicalParams, ScalarState, TwoComponentState
from kfgbox.fv import to_fv
from kfgbox.observables import (
    boundary_current,
    boundary_term_f,
    boundary_term_forms,
    boundary_term_scalar,
    current_fv,
    current_scalar,
    density,
    dirac_inner,
    kfg_inner,
    pseudo_inner,
    pseudo_norm,
    rate_identity_check,
)

seeds = st.integers(0, 2**32 - 1)


def _rand(r, n):
    return r.standard_normal(n) + 1j * r.standard_normal(n)


@settings(max_examples=100)
@given(seeds, st.floats(-2, 2))
def test_pseudo_inner_equals_kfg_inner(seed, V0):
    r = np.random.default_rng(seed)
    g = Grid(0.0, 1.0, 33)
    p = PhysicalParams(1.2, 0.9, 1.1)
    s1, s2 = ScalarState(_rand(r, 33), _rand(r, 33), p), ScalarState(_rand(r, 33), _rand(r, 33), p)
    a = pseudo_inner(to_fv(s1, V0), to_fv(s2, V0), g)
    b = kfg_inner(s1, s2, V0, g)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_pseudo_norm_is_indefinite(grid101):
    up = TwoComponentState(np.ones(101), np.zeros(101))
    down = TwoComponentState(np.zeros(101), np.ones(101))
    assert pseudo_norm(up, grid101) == pytest.approx(1.0)
    assert pseudo_norm(down, grid101) == pytest.approx(-1.0)
    assert dirac_inner(down, down, grid101).real == pytest.approx(1.0)
    assert np.allclose(density(down), -1.0)


def test_pseudo_inner_hermitian_symmetry(rng, grid101):
    A = TwoComponentState(_rand(rng, 101), _rand(rng, 101))
    B = TwoComponentState(_rand(rng, 101), _rand(rng, 101))
    assert pseudo_inner(A, B, grid101) == pytest.approx(np.conj(pseudo_inner(B, A, grid101)))


def test_grid_mismatch(grid101):
    A = TwoComponentState(np.ones(5), np.ones(5))
    with pytest.raises(ValueError, match="grid mismatch"):
        pseudo_inner(A, A, grid101)


def test_plane_wave_current(unit):
    g = Grid(0.0, 1.0, 401)
    k = 3.0
    j = current_scalar(np.exp(1j * k * g.x), g, unit)
    assert np.allclose(j[1:-1], np.sin(k * g.spacing) / g.spacing)  # central difference
    assert np.allclose(j, k, rtol=1e-4)


def test_standing_wave_has_no_current(unit, grid101):
    assert np.max(np.abs(current_scalar(np.sin(np.pi * grid101.x), grid101, unit))) < 1e-14


@settings(max_examples=100)
@given(seeds)
def test_current_forms_agree(seed):
    r = np.random.default_rng(seed)
    g = Grid(0.0, 1.0, 25)
    p = PhysicalParams(1.0, 1.3, 0.8)
    s = ScalarState(_rand(r, 25), _rand(r, 25), p)
    assert np.max(np.abs(current_fv(to_fv(s, 0.3), g, p) - current_scalar(s, g, p))) <= 1e-12


@settings(max_examples=100)
@given(seeds)
def test_boundary_term_forms_agree(seed):
    r = np.random.default_rng(seed)
    g = Grid(0.0, 1.0, 9)
    X = TwoComponentState(_rand(r, 9), _rand(r, 9))
    F = TwoComponentState(_rand(r, 9), _rand(r, 9))
    a, b, scale = boundary_term_forms(X, F, g)
    assert abs(a - b) <= 1e-12 * scale
    assert boundary_term_f(X, F, g) == b


def test_boundary_term_depends_on_psi_only(rng):
    # only psi1 + psi2 enters; compare with the scalar form
    p = PhysicalParams(1.0, 1.0, 2.0)
    x, y = BoundaryData1(*_rand(rng, 4)), BoundaryData1(*_rand(rng, 4))
    chi = BoundaryData1(*_rand(rng, 4))
    f = boundary_term_f(fv_boundary_data(x, chi), fv_boundary_data(y), params=p)
    assert f == pytest.approx(boundary_term_scalar(x, y, p), abs=1e-12)


@given(seeds)
def test_boundary_term_vanishes_on_family(seed):
    r = np.random.default_rng(seed)
    s = BCSpec(random_unitary(r), 1.0)
    x, y = boundary_data_from_bc(s, _rand(r, 2)), boundary_data_from_bc(s, _rand(r, 2))
    chi = BoundaryData1(*_rand(r, 4))
    assert abs(boundary_term_f(fv_boundary_data(x, chi), fv_boundary_data(y, chi))) <= 1e-12


@given(seeds)
def test_boundary_currents_equal_on_family(seed):
    r = np.random.default_rng(seed)
    s = BCSpec(random_unitary(r), float(r.uniform(0.2, 2)))
    ja, jb = boundary_current(boundary_data_from_bc(s, _rand(r, 2)))
    assert abs(ja - jb) <= 1e-12 * max(1.0, abs(ja))


def test_confining_walls_carry_no_current(rng):
    for name in ("dirichlet", "neumann", "mixed_ab", "robin_mit"):
        ja, jb = boundary_current(boundary_data_from_bc(preset(name), _rand(rng, 2)))
        assert abs(ja) < 1e-14 and abs(jb) < 1e-14


def _modes(g, n, kind, p, times, coef=1.0, negative=False):
    k = n * np.pi / g.length
    E = np.hypot(p.hbar * p.light_speed * k, p.rest_energy) * (-1 if negative else 1)
    shape = np.sin(k * g.x) if kind == "sin" else np.cos(k * g.x)
    out = []
    for t in times:
        psi = coef * shape * np.exp(-1j * E * t / p.hbar)
        out.append(ScalarState(psi, -1j * E / p.hbar * psi, p))
    return out


def _add(a, b):
    return [ScalarState(x.psi + y.psi, x.psi_t + y.psi_t, x.params) for x, y in zip(a, b)]


def test_rate_identity_dirichlet_modes(unit):
    g = Grid(0.0, 1.0, 201)
    t = [0.0, 1e-3, 2e-3, 3e-3]
    psi = _add(_modes(g, 1, "sin", unit, t), _modes(g, 2, "sin", unit, t, 0.5j, negative=True))
    phi = _add(_modes(g, 3, "sin", unit, t), _modes(g, 1, "sin", unit, t, -0.3))
    res = rate_identity_check(psi, phi, t, g, 0.0, unit)
    assert res["residual"] < 1e-8
    assert np.max(np.abs(res["boundary"])) < 1e-12
    assert np.max(np.abs(res["rate"])) < 1e-8


def test_rate_identity_two_component_series(unit):
    g = Grid(0.0, 1.0, 201)
    t = [0.0, 1e-3, 2e-3]
    psi = [to_fv(s) for s in _modes(g, 2, "sin", unit, t)]
    res = rate_identity_check(psi, psi, t, g, 0.0, unit)
    assert res["residual"] < 1e-8


def test_rate_identity_with_mismatched_domains(unit):
    # a Dirichlet mode against a Neumann mode: the boundary term is the rate
    g = Grid(0.0, 1.0, 801)
    dt = 1e-3
    t = [0.0, dt, 2 * dt]
    psi = _modes(g, 1, "sin", unit, t)
    phi = _modes(g, 2, "cos", unit, t)
    res = rate_identity_check(psi, phi, t, g, 0.0, unit)
    assert np.max(np.abs(res["boundary"])) > 0.1
    assert res["residual"] < 1e-4 * np.max(np.abs(res["boundary"]))


def test_rate_identity_needs_three_samples(unit, grid101):
    s = _modes(grid101, 1, "sin", unit, [0.0, 1.0])
    with pytest.raises(ValueError):
        rate_identity_check(s, s, [0.0, 1.0], grid101)
