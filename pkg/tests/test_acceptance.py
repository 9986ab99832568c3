"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import time

import numpy as np
import pytest

from kfgbox.algebra import (
    ID2,
    SX,
    SZ,
    metric,
    random_unitary,
    s_matrix,
    s_matrix_pauli_sum,
    sesquilinear_identity_check,
    singular_projector,
    unitarity_defect,
)
from kfgbox.bc import (
    LIFTED_PRESETS,
    PRESETS,
    BCSpec,
    boundary_data_from_bc,
    boundary_data_from_relation,
    is_confining,
    lift_to_u4,
    mixed_boundary_form,
    preset,
)
from kfgbox.core import Grid, PhysicalParams, Potential, ScalarState, TwoComponentState
from kfgbox.evolution import evolve, gaussian_packet
from kfgbox.fv import to_fv
from kfgbox.observables import boundary_term_forms, current_fv, current_scalar, kfg_inner, pseudo_inner
from kfgbox.scattering import step_scatter
from kfgbox.spectral import (
    assemble_discrete_h,
    discrete_spectrum,
    nonrel_limit_check,
    positive_levels,
    solve_spectrum,
)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, elapsed=None, budget=None):
        timing = "" if elapsed is None else f" [{elapsed:.2f} s of {budget:g} s]"
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}{timing}")
    return emit


def _cplx(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_criterion_1_algebra(report):
    t0 = time.perf_counter()
    P, eta, S = singular_projector(), metric(), s_matrix()
    exact = {
        "P^2 = 0": np.array_equal(P @ P, np.zeros((2, 2))),
        "P^dag P = 2 tau3 P": np.array_equal(P.conj().T @ P, 2 * SZ @ P),
        "tau3 P = 1 + sx": np.array_equal(SZ @ P, ID2 + SX),
        "eta^3 = eta": np.array_equal(eta @ eta @ eta, eta),
        "S unitary": unitarity_defect(S) == 0.0,
        "S entries": np.array_equal(S, [[1, 0, 0, 0], [0, 0, 1, 0], [0, -1, 0, 0], [0, 0, 0, -1]]),
        # the Pauli sum with all four terms added, as printed
        "S Pauli sum": np.array_equal(s_matrix_pauli_sum(+1), S),
    }
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        z = _cplx(rng, 4)
        Z = _cplx(rng, 2, 2, 2)
        worst = max(worst, sesquilinear_identity_check(*z, Z1=Z[0], Z2=Z[1]))
    elapsed = time.perf_counter() - t0
    ok = all(exact.values()) and worst <= 1e-14 and elapsed < 1.0
    bad = [k for k, v in exact.items() if not v]
    corrected = np.array_equal(s_matrix_pauli_sum(-1), S)
    detail = (f"identity residual {worst:.1e}; failing exact checks: {bad or 'none'}; "
              f"sum with the sx(x)sy term subtracted matches: {corrected}")
    report(1, ok, detail, elapsed, 1)
    assert ok, detail


def test_criterion_2_family(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        spec = BCSpec(random_unitary(rng), float(rng.uniform(0.1, 3.0)))
        x = boundary_data_from_bc(spec, _cplx(rng, 2))
        y = boundary_data_from_bc(spec, _cplx(rng, 2))
        worst = max(worst, abs(mixed_boundary_form(x, y, spec.lam)))
    control = 0.0
    for M in ([[2.0, 0.0], [0.0, 1.0]], [[1.0, 1.0], [0.0, 1.0]], 0.5 * np.eye(2)):
        x = boundary_data_from_relation(np.array(M, complex), _cplx(rng, 2), 1.0)
        y = boundary_data_from_relation(np.array(M, complex), _cplx(rng, 2), 1.0)
        control = max(control, abs(mixed_boundary_form(x, y, 1.0)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and control > 1e-3 and elapsed < 5
    detail = f"max |f| over 100 unitary specs {worst:.1e}; non-unitary control |f| {control:.2e}"
    report(2, ok, detail, elapsed, 5)
    assert ok, detail


def test_criterion_3_lift_table(report):
    expected = {
        "dirichlet": -np.eye(4), "neumann": np.eye(4),
        "periodic": np.kron(SX, ID2), "antiperiodic": -np.kron(SX, ID2),
        "mixed_ab": np.kron(SZ, ID2), "mixed_ba": -np.kron(SZ, ID2),
        "robin_mit": 1j * np.eye(4),
    }
    bad = [n for n in PRESETS if not np.array_equal(lift_to_u4(preset(n)), expected[n])]
    bad += [n for n in PRESETS if not np.array_equal(LIFTED_PRESETS[n], expected[n])]
    ok = not bad and len(PRESETS) == 7
    report(3, ok, f"{len(PRESETS)} presets, mismatches: {bad or 'none'}")
    assert ok


def test_criterion_4_dirichlet_spectrum(report):
    t0 = time.perf_counter()
    spec = preset("dirichlet")
    exact = np.hypot(np.pi * np.arange(1, 4), 1.0)
    quoted = np.array([3.29690, 6.36227, 9.47760])
    res = solve_spectrum(spec, 0.0, (-12, 12))
    lv = positive_levels(res, 3)
    resid = max(e.residual for e in res.branch(+1)[:3])
    ana_ok = np.allclose(lv, exact, rtol=1e-12) and np.allclose(lv, quoted, atol=5e-6) and resid <= 1e-10
    errs, rel400 = [], None
    for N in (200, 400, 800):
        d = discrete_spectrum(spec, Grid(0.0, 1.0, N + 1))
        pos = np.sort([e.E for e in d.branch(+1)])[:3]
        errs.append(abs(pos[0] - exact[0]))
        if N == 400:
            rel400 = float(np.max(np.abs(pos - exact) / exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    elapsed = time.perf_counter() - t0
    ok = ana_ok and rel400 <= 5e-4 and np.all(np.abs(orders - 2.0) <= 0.2) and elapsed < 30
    detail = (f"levels {np.array2string(lv, precision=6)}, max residual {resid:.1e}, "
              f"N=400 rel diff {rel400:.1e}, orders {np.array2string(orders, precision=3)}")
    report(4, ok, detail, elapsed, 30)
    assert ok, detail


def test_criterion_5_nonrelativistic_limit(report):
    t0 = time.perf_counter()
    out = nonrel_limit_check(preset("dirichlet", lam=1.0), [10, 20, 40])
    ratios = [float(r[0]) for r in out["ratios"]]
    errs = [float(r["rel_error"][0]) for r in out["rows"]]
    elapsed = time.perf_counter() - t0
    ref_ok = abs(out["reference"][0] - np.pi**2 / 2) <= 1e-9
    ok = ref_ok and all(abs(q - 4.0) <= 0.2 for q in ratios) and elapsed < 30
    detail = f"rel errors {['%.2e' % e for e in errs]}, ratios per doubling {['%.3f' % q for q in ratios]}"
    report(5, ok, detail, elapsed, 30)
    assert ok, detail


def test_criterion_6_conservation(report):
    t0 = time.perf_counter()
    g = Grid(0.0, 1.0, 201)
    packet = gaussian_packet(g, 0.4, 0.08, 10.0)
    rng = np.random.default_rng(1)
    specs = [(n, preset(n)) for n in sorted(PRESETS)]
    specs += [(f"random{i}", BCSpec(random_unitary(rng), 1.0)) for i in range(20)]
    failures = []
    worst = {"drift": 0.0, "mismatch": 0.0, "wall": 0.0}
    for name, spec in specs:
        for vname, V in (("V=0", None), ("step", Potential.step(0.5, 0.5))):
            try:
                tr, _, _ = evolve(packet, spec, V, g, n_steps=1000, real_modes_only=True)
            except FloatingPointError as exc:
                failures.append(f"{name}/{vname}: {exc}")
                continue
            drift, mism = tr.norm_drift(), tr.current_mismatch()
            wall = tr.max_wall_current() if is_confining(spec) else 0.0
            if not (drift <= 1e-10 and mism <= 1e-10 and wall <= 1e-10):
                failures.append(f"{name}/{vname}: drift {drift:.1e} mismatch {mism:.1e} wall {wall:.1e}")
                continue
            worst = {k: max(worst[k], v) for k, v in zip(worst, (drift, mism, wall))}
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120
    detail = (f"{2 * len(specs) - len(failures)}/{2 * len(specs)} runs within bounds "
              f"(worst passing drift {worst['drift']:.1e}, mismatch {worst['mismatch']:.1e}, "
              f"wall {worst['wall']:.1e}); out of bounds: {failures or 'none'}")
    report(6, ok, detail, elapsed, 120)
    assert ok, detail


def test_criterion_7_cross_forms(report):
    rng = np.random.default_rng(7)
    g = Grid(0.0, 1.0, 41)
    p = PhysicalParams(1.0, 1.0, 1.0)
    V = Potential.step(0.5, 0.5)
    w_ip = w_j = w_f = 0.0
    for _ in range(100):
        s1 = ScalarState(_cplx(rng, 41), _cplx(rng, 41), p)
        s2 = ScalarState(_cplx(rng, 41), _cplx(rng, 41), p)
        a1, a2 = to_fv(s1, V, g), to_fv(s2, V, g)
        w_ip = max(w_ip, abs(pseudo_inner(a1, a2, g) - kfg_inner(s1, s2, V, g)))
        w_j = max(w_j, float(np.max(np.abs(current_fv(a1, g, p) - current_scalar(s1, g, p)))))
        plain, projected, _ = boundary_term_forms(a1, a2, g, p)
        w_f = max(w_f, abs(plain - projected))
    ok = max(w_ip, w_j, w_f) <= 1e-12
    report(7, ok, f"inner {w_ip:.1e}, current {w_j:.1e}, boundary term {w_f:.1e}")
    assert ok


def test_criterion_8_step_scattering(report):
    t0 = time.perf_counter()
    res = step_scatter(2.0, 0.5)
    r_ref = (np.sqrt(3) - np.sqrt(1.25)) / (np.sqrt(3) + np.sqrt(1.25))
    r_err = abs(res.r - r_ref)
    cons = max(res.flux_residual, res.current_mismatch)
    jp = float(np.max(np.abs(np.concatenate([res.jump_PPsi, res.jump_PdPsi]))))
    jpsi = float(np.linalg.norm(res.jump_Psi))
    elapsed = time.perf_counter() - t0
    ok = r_err <= 1e-14 and cons <= 1e-14 and jp <= 1e-12 and jpsi > 0.01 and elapsed < 1
    detail = (f"r = {res.r.real:.15f} (error {r_err:.1e}), conservation {cons:.1e}, "
              f"|P jump| {jp:.1e}, |Psi jump| {jpsi:.3f}")
    report(8, ok, detail, elapsed, 1)
    assert ok, detail


def _smooth_state(rng, ch, n_modes=6):
    x = (ch.grid.x - ch.grid.a) / ch.grid.length
    comps = []
    for _ in range(2):
        f = sum(_cplx(rng, 1)[0] * np.exp(1j * np.pi * k * x) / (1 + abs(k)) for k in range(-n_modes, n_modes + 1))
        comps.append(f)
    return ch.reduce(TwoComponentState(*comps))


def test_criterion_9_mean_value_reality(report):
    rng = np.random.default_rng(9)
    g = Grid(0.0, 1.0, 201)
    worst, per = 0.0, {}
    for name in sorted(PRESETS):
        ch = assemble_discrete_h(preset(name), g, Potential.step(0.5, 0.5))
        G = ch.metric
        w = 0.0
        for _ in range(50):
            z = _smooth_state(rng, ch)
            z = z / np.linalg.norm(z)
            val = np.vdot(z, G * (ch.matrix @ z))
            w = max(w, abs(val.imag) / max(1.0, abs(val)))
        per[name] = w
        worst = max(worst, w)
    ok = worst <= 1e-10
    report(9, ok, f"max |Im <<Psi, h Psi>>| / max(1, |.|) = {worst:.1e} over {len(per)} presets x 50 states")
    assert ok
