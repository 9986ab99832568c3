"""``kfgbox`` command-line driver.

Exit codes: 0 success, 1 numerical failure, 2 usage or validation error.
Nothing is written to ``--out`` unless the whole command succeeds.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .algebra import (
    ID2,
    SX,
    SZ,
    metric,
    s_matrix,
    s_matrix_pauli_sum,
    sesquilinear_identity_check,
    singular_projector,
    u2_from_params,
    unitarity_defect,
)
from .bc import (
    LIFTED_PRESETS,
    PRESET_PARAMS,
    PRESETS,
    BCSpec,
    boundary_data_from_bc,
    fv_boundary_data,
    lift_to_u4,
    mixed_boundary_form,
    mixed_boundary_form_cayley,
    preset,
    residual2,
    residual4,
)
from .core import Grid, PhysicalParams, Potential, ScalarState, natural_units
from .evolution import eigenmode, evolve, gaussian_packet
from .fv import to_fv
from .observables import boundary_term_f, current_fv, current_scalar, kfg_inner, pseudo_inner
from .scattering import scatter_sweep, sweep_to_csv
from .spectral import assemble_discrete_h, discrete_spectrum, solve_spectrum

DEFAULTS = {
    "units": "natural",
    "mass": None,
    "c": None,
    "hbar": None,
    "a": 0.0,
    "b": None,
    "length": None,
    "grid_n": 401,
    "lam": None,
    "preset": None,
    "u2": None,
    "potential": "zero",
    "out": None,
    "format": "csv",
    "tolerance": 1e-12,
    "seed": 0,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    params: PhysicalParams
    grid: Grid
    potential: Potential
    bc: BCSpec
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "grid": self.grid.to_dict(),
            "potential": self.potential.to_dict(),
            "bc": self.bc.to_dict(),
            "options": self.options,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def header(self) -> list[str]:
        p = self.params
        return [
            f"kfgbox {__version__}",
            f"units: mass={p.mass!r} c={p.light_speed!r} hbar={p.hbar!r} (energies in m c^2 units when natural)",
            f"config_sha256: {self.digest()}",
        ]


def _parse_u2(text: str) -> np.ndarray:
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--u2 is not valid JSON: {exc}") from None

    def entry(v):
        if isinstance(v, (int, float)):
            return complex(v)
        if isinstance(v, list) and len(v) == 2:
            return complex(v[0], v[1])
        if isinstance(v, str):
            return complex(v.replace("i", "j"))
        raise UsageError("--u2 entries must be numbers, [re, im] pairs or strings like '0+1i'")

    if not (isinstance(rows, list) and len(rows) == 2 and all(isinstance(r, list) and len(r) == 2 for r in rows)):
        raise UsageError("--u2 must be a 2x2 nested list")
    return np.array([[entry(v) for v in r] for r in rows])


def _parse_potential(text: str) -> Potential:
    text = str(text).strip()
    if text in ("", "zero", "0"):
        return Potential.constant(0.0)
    kind, _, rest = text.partition(":")
    try:
        if kind == "const":
            return Potential.constant(float(rest))
        if kind == "step":
            height, _, at = rest.partition("@")
            return Potential.step(float(height), float(at) if at else 0.0)
    except ValueError:
        pass
    raise UsageError("--potential must be 'zero', 'const:V0' or 'step:V0@x'")


def _merged(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = _merged(args)
    if cfg["units"] != "natural":
        raise UsageError("only --units natural is supported; set --mass/--c/--hbar to rescale")
    base = natural_units()
    try:
        params = PhysicalParams(
            float(cfg["mass"] if cfg["mass"] is not None else base.mass),
            float(cfg["c"] if cfg["c"] is not None else base.light_speed),
            float(cfg["hbar"] if cfg["hbar"] is not None else base.hbar),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    a = float(cfg["a"])
    if cfg["b"] is not None:
        b = float(cfg["b"])
    else:
        b = a + float(cfg["length"] if cfg["length"] is not None else 1.0)
    try:
        grid = Grid(a, b, int(cfg["grid_n"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lam = cfg["lam"]
    if lam is not None:
        lam = float(lam)
        if not np.isfinite(lam) or lam <= 0:
            raise UsageError("lambda must be positive")
    if cfg["preset"] and cfg["u2"]:
        raise UsageError("give either --preset or --u2, not both")
    try:
        if cfg["u2"]:
            u2 = _parse_u2(cfg["u2"]) if isinstance(cfg["u2"], str) else np.asarray(cfg["u2"], complex)
            bc = BCSpec(u2, lam if lam is not None else params.compton, (a, b))
        else:
            bc = preset(cfg["preset"] or "dirichlet", params, lam, (a, b))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    pot = _parse_potential(cfg["potential"])
    return RunConfig(params, grid, pot, bc, {"format": cfg["format"], "tolerance": float(cfg["tolerance"]),
                                            "seed": int(cfg["seed"])})


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return "%.12e" % x


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def run_checks(cfg: RunConfig, n_random: int = 100) -> dict:
    """All algebraic and property checks; returns ``{name: residual}`` plus metadata."""
    rng = np.random.default_rng(cfg.options.get("seed", 0))
    P = singular_projector()
    eta = metric()
    S = s_matrix()
    checks = {
        "P_squared": float(np.max(np.abs(P @ P))),
        "PdagP_minus_2tau3P": float(np.max(np.abs(P.conj().T @ P - 2 * SZ @ P))),
        "tau3P_minus_1_plus_sx": float(np.max(np.abs(SZ @ P - (ID2 + SX)))),
        "eta_cubed_minus_eta": float(np.max(np.abs(eta @ eta @ eta - eta))),
        "S_unitarity": unitarity_defect(S),
        "S_pauli_sum": float(np.max(np.abs(s_matrix_pauli_sum(-1) - S))),
    }
    worst = 0.0
    for _ in range(n_random):
        z = rng.standard_normal(8)
        Z = rng.standard_normal((4, 2, 2)) + 1j * rng.standard_normal((4, 2, 2))
        worst = max(worst, sesquilinear_identity_check(
            complex(z[0], z[1]), complex(z[2], z[3]), complex(z[4], z[5]), complex(z[6], z[7]), Z[0], Z[1]))
    checks["sesquilinear_identities"] = worst

    spec = cfg.bc
    lift_err = max(float(np.max(np.abs(lift_to_u4(PRESETS[n]) - LIFTED_PRESETS[n]))) for n in PRESETS)
    checks["preset_lifts"] = lift_err
    checks["preset_params"] = max(float(np.max(np.abs(u2_from_params(*PRESET_PARAMS[n]) - PRESETS[n])))
                                  for n in PRESETS)
    checks["lift_unitarity"] = unitarity_defect(lift_to_u4(spec))

    form = cay = r2 = r4 = 0.0
    for _ in range(n_random):
        x = boundary_data_from_bc(spec, rng.standard_normal(2) + 1j * rng.standard_normal(2))
        y = boundary_data_from_bc(spec, rng.standard_normal(2) + 1j * rng.standard_normal(2))
        f = mixed_boundary_form(x, y, spec.lam)
        form = max(form, abs(f))
        cay = max(cay, abs(f - mixed_boundary_form_cayley(x, y, spec.lam)))
        r2 = max(r2, float(np.max(np.abs(residual2(x, spec)))))
        chi = boundary_data_from_bc(spec, rng.standard_normal(2))  # arbitrary psi1 - psi2 part
        r4 = max(r4, float(np.max(np.abs(residual4(fv_boundary_data(x, chi), spec)))))
    checks.update({"mixed_boundary_form": form, "cayley_form_agreement": cay,
                   "residual2": r2, "residual4": r4})

    g = Grid(cfg.grid.a, cfg.grid.b, 61)
    p = cfg.params
    cross_ip = cross_j = bterm = 0.0
    for _ in range(20):
        s1, s2 = (ScalarState(*(rng.standard_normal((2, g.n_points)) + 1j * rng.standard_normal((2, g.n_points))), p)
                  for _ in range(2))
        v = cfg.potential
        a1, a2 = to_fv(s1, v, g), to_fv(s2, v, g)
        cross_ip = max(cross_ip, abs(pseudo_inner(a1, a2, g) - kfg_inner(s1, s2, v, g)))
        scale = max(1.0, float(np.max(np.abs(current_scalar(s1, g)))))
        cross_j = max(cross_j, float(np.max(np.abs(current_fv(a1, g, p) - current_scalar(s1, g, p)))) / scale)
        try:
            boundary_term_f(a1, a2, g, p)
        except ArithmeticError:
            bterm = np.inf
    checks.update({"pseudo_vs_kfg_inner": cross_ip, "current_fv_vs_scalar": cross_j,
                   "boundary_term_forms": bterm})

    gh = Grid(cfg.grid.a, cfg.grid.b, min(cfg.grid.n_points, 201))
    ch = assemble_discrete_h(spec, gh, cfg.potential, p)
    checks["pseudo_hermiticity_certificate"] = ch.certificate
    G = ch.metric
    mv = 0.0
    for _ in range(20):
        z = rng.standard_normal(2 * ch.size) + 1j * rng.standard_normal(2 * ch.size)
        val = np.vdot(z, G * (ch.matrix @ z))
        mv = max(mv, abs(val.imag) / max(1.0, abs(val)))
    checks["mean_value_imag"] = mv
    return checks


def cmd_verify(cfg: RunConfig, out: Optional[str]) -> int:
    tol = cfg.options["tolerance"]
    checks = run_checks(cfg)
    # relative scale: residuals of quantities built from O(1) random numbers
    failures = sorted(k for k, v in checks.items() if not (v <= max(tol, 1e-12)))
    p_sum_printed = float(np.max(np.abs(s_matrix_pauli_sum(+1) - s_matrix())))
    report = {
        "config": cfg.to_dict(),
        "config_sha256": cfg.digest(),
        "tolerance": tol,
        "residuals": checks,
        "informational": {"S_pauli_sum_with_plus_sign_on_sx_sy_term": p_sum_printed},
        "failures": failures,
        "ok": not failures,
    }
    _emit(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n", out)
    return 0 if not failures else 1


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def _levels_range(cfg: RunConfig, levels: int):
    p = cfg.params
    hc = p.hbar * p.light_speed
    L = cfg.grid.length
    v = [val for _, _, val in cfg.potential.segments(cfg.grid.a, cfg.grid.b)]
    reach = np.hypot(hc * (levels + 2) * np.pi / L, p.rest_energy) + max(abs(x) for x in v)
    return reach


def cmd_spectrum(cfg: RunConfig, args, out: Optional[str]) -> int:
    levels = args.levels
    branch = args.branch
    if levels is not None and levels <= 0:
        raise UsageError("--levels must be positive")
    if args.e_min is not None or args.e_max is not None:
        if args.e_min is None or args.e_max is None:
            raise UsageError("give both --e-min and --e-max")
        E_range = (args.e_min, args.e_max)
        res = solve_spectrum(cfg.bc, cfg.potential, E_range, cfg.params)
    else:
        want = levels or 5
        reach = _levels_range(cfg, want)
        for _ in range(8):
            res = solve_spectrum(cfg.bc, cfg.potential, (-reach, reach), cfg.params)
            n_pos = sum(e.multiplicity for e in res.branch(+1))
            n_neg = sum(e.multiplicity for e in res.branch(-1))
            if min(n_pos, n_neg) >= want:
                break
            reach *= 2
    rows = []
    signs = {"positive": [+1], "negative": [-1], "both": [+1, -1]}[branch]
    for sgn in signs:
        sel = res.branch(sgn)
        if levels is not None:
            sel = sel[:levels]
        rows += sel
    oracle = None
    if args.oracle == "discrete":
        d = discrete_spectrum(cfg.bc, cfg.grid, cfg.potential, cfg.params)
        oracle = {s: np.array(sorted((e.E for e in d.branch(s)), key=lambda x: s * x)) for s in (1, -1)}
    flagged = res.flagged
    if cfg.options["format"] == "json":
        payload = {
            "config": cfg.to_dict(),
            "config_sha256": cfg.digest(),
            "method": res.method,
            "eigenvalues": [],
            "flagged": [{"E": e.E, "residual": e.residual} for e in flagged],
        }
        idx = {1: 0, -1: 0}
        for i, e in enumerate(rows):
            item = {"index": i, "E": e.E, "branch": "+" if e.branch > 0 else "-",
                    "residual": e.residual, "multiplicity": e.multiplicity}
            if oracle is not None:
                ref = oracle[e.branch]
                j = idx[e.branch]
                if j < ref.size:
                    item["discrete_E"] = float(ref[j])
                    item["rel_diff"] = float(abs(ref[j] - e.E) / max(abs(e.E), 1e-300))
                idx[e.branch] += e.multiplicity
            payload["eigenvalues"].append(item)
        text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    else:
        lines = [f"# {h}" for h in cfg.header()]
        head = ["index", "E", "branch", "residual", "multiplicity"]
        if oracle is not None:
            head += ["discrete_E", "rel_diff"]
        lines.append(",".join(head))
        idx = {1: 0, -1: 0}
        for i, e in enumerate(rows):
            cells = [str(i), _fmt(e.E), "+" if e.branch > 0 else "-", _fmt(e.residual), str(e.multiplicity)]
            if oracle is not None:
                ref = oracle[e.branch]
                j = idx[e.branch]
                if j < ref.size:
                    cells += [_fmt(ref[j]), _fmt(abs(ref[j] - e.E) / max(abs(e.E), 1e-300))]
                else:
                    cells += ["nan", "nan"]
                idx[e.branch] += e.multiplicity
            lines.append(",".join(cells))
        for e in flagged:
            lines.append(f"# flagged: E={_fmt(e.E)} residual={_fmt(e.residual)}")
        text = "\n".join(lines) + "\n"
    _emit(text, out)
    if flagged:
        print(f"{len(flagged)} unconverged root(s) flagged", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------

def cmd_evolve(cfg: RunConfig, args, out: Optional[str]) -> int:
    p = cfg.params
    if args.steps < 0:
        raise UsageError("--steps must be non-negative")
    if args.dt is not None and not args.dt > 0:
        raise UsageError("--dt must be positive")
    ch = assemble_discrete_h(cfg.bc, cfg.grid, cfg.potential, p)
    E0 = None
    if args.initial == "gaussian":
        if not args.width > 0:
            raise UsageError("--width must be positive")
        center = args.center if args.center is not None else 0.5 * (cfg.grid.a + cfg.grid.b)
        psi0 = gaussian_packet(cfg.grid, center, args.width, args.momentum, p)
    elif args.initial == "eigenmode":
        E0, psi0 = eigenmode(ch, args.mode_index, +1)
    else:
        psi0 = np.zeros(2 * ch.size, dtype=complex)
    trace, z, _ = evolve(psi0, cfg.bc, cfg.potential, cfg.grid, args.dt, args.steps, p,
                         closed=ch, e_cut=args.e_cut, real_modes_only=args.real_modes_only)
    summary = {"max_pseudo_norm_drift": trace.norm_drift(),
               "max_current_mismatch": trace.current_mismatch(),
               "certificate": ch.certificate}
    if E0 is not None:
        T = trace.times[-1]
        z0 = np.asarray(psi0)
        ref = np.exp(-1j * E0 * T / p.hbar) * z0
        summary["eigenmode_energy"] = E0
        summary["phase_error"] = float(np.linalg.norm(z - ref) / np.linalg.norm(z0))
    if cfg.options["format"] == "json":
        text = json.dumps({"config": cfg.to_dict(), "config_sha256": cfg.digest(), "summary": summary,
                           "trace": {"t": trace.times.tolist(), "pseudo_norm": trace.pseudo_norm.tolist(),
                                     "j_a": trace.j_a.tolist(), "j_b": trace.j_b.tolist(),
                                     "boundary_term": trace.boundary_term.tolist()}},
                          indent=2, sort_keys=True, default=str) + "\n"
    else:
        text = trace.to_csv(header=cfg.header())
    final = ch.expand(z)
    snap = [f"# {h}" for h in cfg.header()] + ["x,re_psi1,im_psi1,re_psi2,im_psi2"]
    for x, u, w in zip(cfg.grid.x, final.comp1, final.comp2):
        snap.append(",".join(_fmt(v) for v in (x, u.real, u.imag, w.real, w.imag)))
    _emit(text, out)
    if out:
        with open(out + ".final.csv", "w") as fh:
            fh.write("\n".join(snap) + "\n")
    for key, val in summary.items():
        print(f"{key}: {_fmt(val)}", file=sys.stderr if not out else sys.stdout)
    return 0


# ---------------------------------------------------------------------------
# scatter
# ---------------------------------------------------------------------------

def cmd_scatter(cfg: RunConfig, args, out: Optional[str]) -> int:
    p = cfg.params
    if args.energies:
        try:
            energies = [float(e) for e in args.energies.split(",")]
        except ValueError:
            raise UsageError("--energies must be a comma-separated list of numbers") from None
    else:
        lo = args.e_min if args.e_min is not None else 1.1 * p.rest_energy
        hi = args.e_max if args.e_max is not None else 3.0 * p.rest_energy
        if args.e_steps < 1 or hi < lo:
            raise UsageError("need --e-min <= --e-max and --e-steps >= 1")
        energies = list(np.linspace(lo, hi, args.e_steps))
    if any(E <= p.rest_energy for E in energies):
        raise UsageError("scattering energies must exceed m c^2")
    V0 = args.V0
    if V0 is None:
        V0 = cfg.potential.V0
    results = scatter_sweep(energies, float(V0), p)
    if cfg.options["format"] == "json":
        text = json.dumps({"config": cfg.to_dict(), "config_sha256": cfg.digest(), "V0": V0, "rows": [
            {"E": r.E, "r": [r.r.real, r.r.imag], "t": [r.t.real, r.t.imag],
             "abs_jump_Psi": float(np.linalg.norm(r.jump_Psi)), "current_mismatch": r.current_mismatch,
             "flag": "degenerate" if r.degenerate else r.regime} for r in results]},
            indent=2, sort_keys=True) + "\n"
    else:
        text = sweep_to_csv(results, header=cfg.header() + [f"V0: {float(V0)!r}"])
    _emit(text, out)
    return 0


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def cmd_presets(cfg: RunConfig, out: Optional[str]) -> int:
    def cplx(M):
        return [[[float(z.real), float(z.imag)] for z in row] for row in M]

    data = {name: {"u2": cplx(U), "u2_params": list(PRESET_PARAMS[name]), "u4": cplx(lift_to_u4(U)),
                   "confining": bool(abs(U[0, 1]) == 0 and abs(U[1, 0]) == 0)}
            for name, U in PRESETS.items()}
    if cfg.options["format"] == "json":
        text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    else:
        lines = ["name,mu,n0,n1,n2,n3,confining,u11,u12,u21,u22"]
        for name, U in PRESETS.items():
            mu, *n = PRESET_PARAMS[name]
            ent = [f"{z.real + 0.0:g}{z.imag + 0.0:+g}i" for z in U.ravel()]
            lines.append(",".join([name, _fmt(mu), *(str(v) for v in n),
                                   str(data[name]["confining"]).lower(), *ent]))
        text = "\n".join(lines) + "\n"
    _emit(text, out)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _common(parser: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("global options")
    g.add_argument("--units", choices=["natural"], default=d)
    g.add_argument("--mass", type=float, default=d)
    g.add_argument("--c", type=float, default=d)
    g.add_argument("--hbar", type=float, default=d)
    g.add_argument("--a", type=float, default=d)
    g.add_argument("--b", type=float, default=d)
    g.add_argument("--length", type=float, default=d, help="sets b = a + length when --b is absent")
    g.add_argument("--grid-n", dest="grid_n", type=int, default=d)
    g.add_argument("--lambda", dest="lam", type=float, default=d)
    bc = g.add_mutually_exclusive_group()
    bc.add_argument("--preset", choices=sorted(PRESETS), default=d)
    bc.add_argument("--u2", default=d, help='2x2 JSON, e.g. "[[0,1],[1,0]]" or [[[re,im],..],..]')
    g.add_argument("--potential", default=d, help="zero | const:V0 | step:V0@x")
    g.add_argument("--out", default=d)
    g.add_argument("--format", choices=["csv", "json"], default=d)
    g.add_argument("--tolerance", type=float, default=d)
    g.add_argument("--seed", type=int, default=d)
    g.add_argument("--config", default=d, help="JSON file of defaults; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kfgbox", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"kfgbox {__version__}")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    sub_parsers = {}
    for name, help_text in [("verify", "run the identity and property suite"),
                            ("spectrum", "eigenvalues of the boxed particle"),
                            ("evolve", "Crank-Nicolson evolution with conservation trace"),
                            ("scatter", "step-potential scattering sweep"),
                            ("presets", "list the named boundary conditions")]:
        sp = sub.add_parser(name, help=help_text)
        _common(sp, suppress=True)
        sub_parsers[name] = sp

    sp = sub_parsers["spectrum"]
    sp.add_argument("--levels", type=int)
    sp.add_argument("--e-min", dest="e_min", type=float)
    sp.add_argument("--e-max", dest="e_max", type=float)
    sp.add_argument("--branch", choices=["positive", "negative", "both"], default="positive")
    sp.add_argument("--oracle", choices=["none", "discrete"], default="none")

    sp = sub_parsers["evolve"]
    sp.add_argument("--initial", choices=["gaussian", "eigenmode", "zero"], default="gaussian")
    sp.add_argument("--center", type=float)
    sp.add_argument("--width", type=float, default=0.08)
    sp.add_argument("--momentum", type=float, default=0.0)
    sp.add_argument("--mode-index", dest="mode_index", type=int, default=0)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--e-cut", dest="e_cut", type=float)
    sp.add_argument("--real-modes-only", dest="real_modes_only", action="store_true")

    sp = sub_parsers["scatter"]
    sp.add_argument("--V0", type=float)
    sp.add_argument("--energies")
    sp.add_argument("--e-min", dest="e_min", type=float)
    sp.add_argument("--e-max", dest="e_max", type=float)
    sp.add_argument("--e-steps", dest="e_steps", type=int, default=20)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(args)
        out = _merged(args)["out"]
        extra = {k: v for k, v in sorted(vars(args).items()) if k not in DEFAULTS and k != "config"}
        cfg.options.update(extra)
        if args.command == "verify":
            return cmd_verify(cfg, out)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, args, out)
        if args.command == "evolve":
            return cmd_evolve(cfg, args, out)
        if args.command == "scatter":
            return cmd_scatter(cfg, args, out)
        return cmd_presets(cfg, out)
    except UsageError as exc:
        print(f"kfgbox: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, FloatingPointError, np.linalg.LinAlgError, RuntimeError, IndexError) as exc:
        print(f"kfgbox: numerical failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"kfgbox: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
