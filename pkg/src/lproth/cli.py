"""Seeded experiment driver with JSON reports and CSV curve sidecars.

Every report record names the claim it checks through a stable anchor
slug; a report without an anchored record fails the built-in linter and
is never written.  All numerics are fully determined by (config, seed);
wall-clock data is isolated in a single ``timing`` subtree so reports can
be byte-compared with that subtree masked.

Exit codes: 0 all checks passed, 1 usage/validation error, 2 at least one
check failed, 3 internal failure (budget or quadrature).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import forms, gowers, lpgeom, mollifier, oscillatory, sets
from .util import spawn_rng

SUITES = ("kernels", "gowers", "forms", "oscillatory", "counterexamples", "search", "verify-all")

REPORT_SCHEMA = {
    "type": "object",
    "required": ["format", "config", "records", "summary", "timing"],
    "properties": {
        "format": {"type": "integer", "const": 1},
        "config": {"type": "object"},
        "timing": {
            "type": "object",
            "required": ["timestamp", "runtimes_s"],
            "properties": {
                "timestamp": {"type": "string"},
                "runtimes_s": {"type": "object"},
            },
        },
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "anchor", "values", "bound", "passed"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "anchor": {"type": "string", "minLength": 1},
                    "values": {"type": "object"},
                    "bound": {},
                    "passed": {"type": "boolean"},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["n_records", "n_pass", "n_fail", "worst_margin"],
        },
    },
}


@dataclass
class ExperimentConfig:
    suite: str
    p: float = 1.5
    d: int = 1
    N: float = 32.0
    epsilon: float = 0.05
    seed: int = 7
    out_dir: str = "lproth-out"
    fmt: str = "json"
    quad_nodes: int = 2048
    kl_nodes: int = 24
    spectrum_hits: int = 2000
    search_budget: int = 200000
    trials: int = 8
    grid_m: int = 512

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if not (math.isfinite(self.p) and self.p >= 1.0):
            raise ConfigError(f"p out of range: {self.p}")
        if self.p in (1.0, 2.0) and self.suite in ("search", "verify-all"):
            raise ConfigError(
                f"p={self.p} is degenerate and rejected by suite {self.suite!r}")
        if not (1 <= self.d <= 8):
            raise ConfigError(f"d out of range: {self.d}")
        if self.N <= 0:
            raise ConfigError(f"N out of range: {self.N}")
        if not (0.0 < self.epsilon <= 1.0):
            raise ConfigError(f"epsilon out of range: {self.epsilon}")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.fmt!r}")


class ConfigError(ValueError):
    pass


_NUMERIC_FIELDS = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _coerce(key: str, raw: str):
    if key in ("suite", "out_dir", "fmt"):
        return raw
    if key in ("d", "seed", "quad_nodes", "kl_nodes", "spectrum_hits", "search_budget",
               "trials", "grid_m"):
        return int(raw)
    return float(raw)


def read_config_file(path: str) -> dict:
    """Flat key = value lines, # comments, unknown keys rejected."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, raw = (s.strip() for s in line.split("=", 1))
            if key not in _NUMERIC_FIELDS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _coerce(key, raw)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: cannot parse value for {key!r}") from None
    return out


def parse_config(argv) -> tuple[str, ExperimentConfig | None]:
    """(command, config); flags override file values override defaults."""
    ap = argparse.ArgumentParser(prog="lproth", add_help=True)
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run")
    run.add_argument("--suite", choices=SUITES)
    run.add_argument("--config")
    run.add_argument("--p", type=float)
    run.add_argument("--d", type=int)
    run.add_argument("--N", type=float)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--format", dest="fmt", choices=("json", "csv"))
    for knob in ("quad-nodes", "kl-nodes", "spectrum-hits", "search-budget", "trials", "grid-m"):
        run.add_argument(f"--{knob}", dest=knob.replace("-", "_"), type=int)
    sub.add_parser("list")
    sub.add_parser("schema")
    ns = ap.parse_args(argv)
    if ns.command != "run":
        return ns.command, None
    values: dict = {}
    if ns.config:
        values.update(read_config_file(ns.config))
    flag_dest = {key: key for key in _NUMERIC_FIELDS}
    flag_dest["out_dir"] = "out"
    for key, dest in flag_dest.items():
        flag = getattr(ns, dest, None)
        if flag is not None:
            values[key] = flag
    if not values.get("suite"):
        raise ConfigError("missing required --suite")
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return "run", cfg


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    anchor: str
    values: dict
    bound: object
    passed: bool
    margin: float = float("nan")


class SuiteContext:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.m = mollifier.build_mollifier()
        self.curves: list[tuple[str, list[str], list[list]]] = []

    def curve(self, filename, header, rows):
        self.curves.append(
            (filename, header,
             [[v if isinstance(v, str) else float(v) for v in r] for r in rows]))


def _kernels_checks(ctx: SuiteContext) -> list[Check]:
    cfg, m = ctx.cfg, ctx.m
    p, d, eps = cfg.p, min(cfg.d, 2), cfg.epsilon
    out = []
    psi0 = float(m.psi(np.array([0.0]))[0])
    out.append(Check("window value at zero", "window-normalization",
                     {"psi0": psi0}, 1.0, abs(psi0 - 1.0) < 1e-12, abs(psi0 - 1.0)))
    edge = float(m.psi_hat(np.array([2.5]))[0])
    out.append(Check("transform support edge", "window-band-support",
                     {"psi_hat_2p5": edge}, 0.0, edge == 0.0))
    direct = mollifier.omega_eps_direct_oscillatory(np.zeros(1) + 1.0, mollifier.KernelParams(p, 1, 1.0, 1.0), m)
    closed = mollifier.omega_eps_eval(np.array([1.0]), mollifier.KernelParams(p, 1, 1.0, 1.0), m)
    dev = abs(direct - closed)
    out.append(Check("closed form vs oscillatory form", "kernel-closed-vs-oscillatory",
                     {"direct": direct, "closed": closed}, 1e-4, dev < 1e-4, dev))
    masses = []
    for e in (0.04, 0.02, 0.01, 0.005):
        masses.append(mollifier.kernel_total_mass(mollifier.KernelParams(p, d, 1.0, e), m))
    ratio = max(masses) / min(masses)
    out.append(Check("kernel mass band", "kernel-mass-band",
                     {"masses": masses, "ratio": ratio}, 1.5, ratio < 1.5, 1.5 - ratio))
    c11 = mollifier.c1_eps(1.0, p, d, m)
    out.append(Check("unit mass ratio", "mass-ratio-unit", {"c1_at_1": c11}, 1.0, c11 == 1.0))
    c1e = mollifier.c1_eps(eps, p, d, m)
    out.append(Check("mass ratio band", "mass-ratio-band", {"c1": c1e}, [0.1, 10.0],
                     0.1 < c1e < 10.0, min(c1e - 0.1, 10.0 - c1e)))
    kern = mollifier.build_cancelled_kernel(mollifier.KernelParams(p, d, 1.0, eps), m)
    resid = abs(kern.total_integral())
    ref = mollifier.kernel_total_mass(mollifier.KernelParams(p, d, 1.0, eps), m)
    out.append(Check("cancelled kernel integral", "cancellation-integral",
                     {"residual": resid, "reference": ref}, 1e-6 * ref,
                     resid <= 1e-6 * ref, 1e-6 * ref - resid))
    k0 = mollifier.kernel_fourier(np.zeros(1), mollifier.KernelParams(p, 1, 1.0, eps), m)
    out.append(Check("transform vanishes at origin", "transform-zero-at-origin",
                     {"k_hat_0": abs(k0)}, 1e-8, abs(k0) < 1e-8, 1e-8 - abs(k0)))
    lam_j = 2.0
    etas = np.array([1e-3, 3e-3, 1e-2, 3e-2, 1e-1])
    kv = [abs(mollifier.kernel_fourier(np.array([e]), mollifier.KernelParams(p, 1, lam_j, eps), m))
          for e in etas]
    cslope = max(v / (lam_j * e) for v, e in zip(kv, etas))
    out.append(Check("small frequency slope", "transform-small-frequency-slope",
                     {"C_fit": cslope, "samples": kv}, None, np.isfinite(cslope)))
    rng = spawn_rng(cfg.seed, 23)
    pts = rng.uniform(-1.3, 1.3, size=(32, d))
    v1 = mollifier.omega_eps_eval(pts, mollifier.KernelParams(p, d, 1.0, eps), m)
    flip = pts.copy(); flip[:, 0] *= -1.0
    v2 = mollifier.omega_eps_eval(flip, mollifier.KernelParams(p, d, 1.0, eps), m)
    refl = float(np.max(np.abs(v1 - v2)))
    out.append(Check("reflection invariance", "kernel-reflection-invariance",
                     {"max_dev": refl}, 0.0, refl == 0.0, -refl))
    # weak limit vs sphere rule carries the explicit 2 pi of the line-integral normalization
    rule = lpgeom.sphere_quadrature(p, d, 1.0, n=cfg.quad_nodes)
    target = 2.0 * math.pi * rule.total_mass
    mass_small = mollifier.kernel_total_mass(mollifier.KernelParams(p, d, 1.0, 0.005), m)
    wdev = abs(mass_small - target) / target
    out.append(Check("weak limit of shell kernels", "kernel-weak-limit",
                     {"kernel_mass": mass_small, "sphere_mass_2pi": target}, 0.01,
                     wdev < 0.01, 0.01 - wdev))
    inv = lpgeom.sigma_mass_invariance(p, d, [1.0, 2.0, 4.0], n=cfg.quad_nodes)
    out.append(Check("sphere mass invariance", "sphere-mass-invariance",
                     {"masses": inv.masses, "max_rel_dev": inv.max_relative_deviation},
                     1e-4, inv.max_relative_deviation < 1e-4, 1e-4 - inv.max_relative_deviation))
    ctx.curve("window_profile.csv", ["u", "psi_hat"],
              mollifier.window_profile_rows(m).tolist())
    ctx.curve("kernel_profile.csv", ["r", "omega_eps"],
              mollifier.kernel_profile_rows(mollifier.KernelParams(p, d, 1.0, eps), m).tolist())
    return out


def _gowers_checks(ctx: SuiteContext) -> list[Check]:
    cfg, m = ctx.cfg, ctx.m
    rng = spawn_rng(cfg.seed, 29)
    out = []
    worst = 0.0
    for _ in range(10):
        F = gowers.CyclicGridFunction.from_array(
            rng.normal(size=16) + 1j * rng.normal(size=16))
        b = gowers.u3_eighth_brute(F).real
        r = gowers.u3_eighth_recursive(F)
        worst = max(worst, abs(b - r) / abs(r))
    out.append(Check("difference-cube oracle equivalence", "u3-oracle-equivalence",
                     {"worst_rel": worst}, 1e-10, worst < 1e-10, 1e-10 - worst))
    worst2 = 0.0
    for _ in range(10):
        F = gowers.CyclicGridFunction.from_array(
            rng.normal(size=64) + 1j * rng.normal(size=64))
        b = gowers.u2_fourth_brute(F).real
        s = gowers.u2_norm(F) ** 4
        worst2 = max(worst2, abs(b - s) / abs(s))
    out.append(Check("spectral fourth-moment identity", "u2-spectral-identity",
                     {"worst_rel": worst2}, 1e-10, worst2 < 1e-10, 1e-10 - worst2))
    F = gowers.CyclicGridFunction.from_array(rng.normal(size=16) + 1j * rng.normal(size=16))
    base = gowers.u3_norm(F)
    xi = 3
    mod = gowers.CyclicGridFunction.from_array(
        F.values * np.exp(2j * np.pi * xi * np.arange(16) / 16))
    dev = abs(gowers.u3_norm(mod) - base) / base
    out.append(Check("modulation invariance", "u3-modulation-invariance",
                     {"rel_dev": dev}, 1e-10, dev < 1e-10, 1e-10 - dev))
    tr = gowers.CyclicGridFunction.from_array(np.roll(F.values, 5))
    devt = abs(gowers.u3_norm(tr) - base) / base
    out.append(Check("translation invariance", "u3-translation-invariance",
                     {"rel_dev": devt}, 1e-10, devt < 1e-10, 1e-10 - devt))
    for (pp, tt) in ((cfg.p, 2.0), (3.0, 5.0)):
        tc = gowers.u3_tensor_check(pp, tt, M=64)
        out.append(Check(f"tensor factorization p={pp} t={tt}", "u3-tensor-product",
                         {"lhs": tc.lhs, "rhs": tc.rhs, "gap": tc.relative_gap},
                         1e-2, tc.relative_gap < 1e-2, 1e-2 - tc.relative_gap))
    eps = 0.1
    dists = []
    for eta in (0.05, 0.025):
        u3d = gowers.u3_kernel_distance(eta, eps, cfg.p, ctx.cfg.grid_m * 8, m)
        dists.append(u3d.value)
    mono = dists[1] >= dists[0] > 0
    out.append(Check("shell-difference distance growth", "u3-cauchy-monotone",
                     {"distances": dists}, None, bool(mono)))
    ctx.curve("u3_cauchy.csv", ["eta", "u3_distance"],
              [[e, v] for e, v in zip((0.05, 0.025), dists)])
    ctx.curve("delta_u2_profile.csv", ["h", "u2_of_delta_h"],
              gowers.delta_u2_profile(F))
    return out


def _forms_checks(ctx: SuiteContext) -> list[Check]:
    cfg, m = ctx.cfg, ctx.m
    p = cfg.p
    out = []
    N = 32.0
    lam = 2.0
    eps = 0.25
    h = eps * lam / (8.0 * p)
    n = int(np.ceil(N / h)); h = N / n
    f = forms.full_box(N, h, 1)
    resid = abs(forms.decomposition_residual(f, lam, eps, m, p))
    out.append(Check("form decomposition identity", "form-decomposition-identity",
                     {"residual": resid}, 1e-10, resid < 1e-10, 1e-10 - resid))
    a = forms.m_eps_lambda(f, lam, 1.0, m, p).value
    b = forms.m_lambda(f, lam, m, p).value
    out.append(Check("unit width consistency", "form-kernel-consistency",
                     {"m_eps_1": a, "m_base": b}, 0.0, a == b))
    cw = mollifier.kernel_total_mass(mollifier.KernelParams(p, 1, 1.0, 1.0), m)
    dev = abs(b - cw * N) / (cw * N)
    out.append(Check("full box main term", "full-box-main-term",
                     {"value": b, "target": cw * N, "rel_dev": dev}, 3 * lam / N,
                     dev < 3 * lam / N, 3 * lam / N - dev))
    rule = lpgeom.sphere_quadrature(p, 1, lam, n=64)
    nv = forms.n_lambda(f, rule, lam).value
    target = forms.full_box_sharp_oracle(rule, N)
    ndev = abs(nv - target) / target
    out.append(Check("sharp form sphere mass", "sharp-form-sphere-mass",
                     {"value": nv, "target": target}, 0.05, ndev < 0.05, 0.05 - ndev))
    ok = True
    for trial in range(cfg.trials):
        g = forms.random_indicator(16.0, 1.0, 2, 0.25, seed=cfg.seed * 31 + trial)
        rep = forms.box_partition_pigeonhole(g, 2.0)
        ok = ok and rep.threshold_ok
    out.append(Check("half-density pigeonhole", "pigeonhole-half-density",
                     {"trials": cfg.trials}, None, ok))
    lams = [N / 16.0, N / 8.0, N / 4.0]
    en = forms.energy_sum(f, lams, eps, m, p)
    out.append(Check("energy certificate ratio", "energy-ratio-bound",
                     {"ratio": en.ratio, "energies": en.energies}, 1.0,
                     en.ratio < 1.0, 1.0 - en.ratio))
    mt = forms.roth_main_term_experiment(0.5, 1, N, lam, cfg.trials, m, p, seed=cfg.seed)
    out.append(Check("density main term positive", "main-term-positive",
                     {"min_normalized": mt.min_normalized}, 0.0,
                     mt.min_normalized > 1e-3 * cw, mt.min_normalized))
    f2 = forms.random_indicator(8.0, h, 1, 0.5, seed=cfg.seed)
    v0 = forms.m_lambda(forms.translate_box(f2, 0), lam, m, p).value
    v1 = forms.m_lambda(forms.translate_box(f2, 3), lam, m, p).value
    tdev = abs(v0 - v1) / max(abs(v0), 1e-15)
    out.append(Check("translation invariance of forms", "form-translation-invariance",
                     {"rel_dev": tdev}, 1e-10, tdev < 1e-10, 1e-10 - tdev))
    rows = []
    for fv in (forms.m_eps_lambda(f, lam, eps, m, p), forms.m_lambda(f, lam, m, p),
               forms.e_lambda(f, lam, eps, m, p)):
        rows.append([fv.kind, fv.lam, fv.eps if fv.eps is not None else float("nan"),
                     fv.value, fv.quadrature_error])
    ctx.curve("form_values.csv", ["kind", "lambda", "epsilon", "value", "error"], rows)
    return out


def _oscillatory_checks(ctx: SuiteContext) -> list[Check]:
    cfg = ctx.cfg
    out = []
    fam = oscillatory.PhaseFamily(p=2.0, k=0.3, l=-0.2)
    vals = [oscillatory.phase_eval(fam, y)[0] for y in np.linspace(0.8, 1.8, 50)]
    spread = max(vals) - min(vals)
    out.append(Check("quadratic phase degeneracy", "phase-quadratic-degeneracy",
                     {"spread": spread, "expected": 2 * fam.k * fam.l}, 1e-12,
                     spread < 1e-12, 1e-12 - spread))
    fam3 = oscillatory.PhaseFamily(p=3.0, k=0.5, l=0.5)
    dv, dd = oscillatory.phase_eval(fam3, 1.0)
    rv, rd = oscillatory.phase_eval_remainder(fam3, 1.0)
    dev = max(abs(dv - rv), abs(dd - rd))
    out.append(Check("remainder form agreement", "phase-remainder-agreement",
                     {"direct": [dv, dd], "remainder": [rv, rd]}, 1e-8,
                     dev < 1e-8, 1e-8 - dev))
    ts = list(np.logspace(1, 4, 7))
    fit = oscillatory.decay_fit(cfg.p, ts, n_kl=cfg.kl_nodes)
    thresh = -1.0 / fit.r_theory + 0.05
    passed = fit.slope <= thresh if not fit.degenerate else fit.slope >= -0.02
    out.append(Check(f"decay envelope p={cfg.p}", "decay-envelope",
                     {"slope": fit.slope, "r": fit.r_theory, "values": fit.values},
                     thresh, bool(passed), thresh - fit.slope))
    ctx.curve(f"decay_p{cfg.p}.csv", ["t", "abs_I", "envelope"],
              [[t, v, fit.c_fit * t ** (-1.0 / fit.r_theory)]
               for t, v in zip(fit.t_samples, fit.values)])
    for pdeg in (1.0, 2.0):
        fitd = oscillatory.decay_fit(pdeg, ts, n_kl=12)
        out.append(Check(f"no-decay at p={pdeg}", "no-decay-degenerate",
                         {"slope": fitd.slope}, -0.02, fitd.slope >= -0.02,
                         fitd.slope + 0.02))
    v1 = oscillatory.inner_integral(oscillatory.PhaseFamily(cfg.p, 0.3, 0.1), 50.0)
    v2 = oscillatory.inner_integral(oscillatory.PhaseFamily(cfg.p, 0.1, 0.3), 50.0)
    sym = abs(v1 - v2)
    out.append(Check("shift symmetry", "aggregate-symmetry",
                     {"dev": sym}, 1e-12, sym < 1e-12, 1e-12 - sym))
    sb = oscillatory.stationary_lower_bound_check(cfg.p, 0.1)
    out.append(Check("stationary derivative floor", "stationary-lower-bound",
                     {"min_abs_dpsi": sb.min_abs_dpsi}, 0.0,
                     sb.degenerate or sb.min_abs_dpsi > 0.0, sb.min_abs_dpsi))
    rng = spawn_rng(cfg.seed, 37)
    ok = True
    for _ in range(20):
        v = float(rng.uniform(0.001, 0.5))
        mus = [v]
        for _ in range(11):
            v *= 2.0 * float(rng.uniform(1.0, 1.5))
            mus.append(v)
        s1, s2, cap = oscillatory.lacunary_sum_bound(mus, k=2)
        ok = ok and s1 <= cap and s2 <= cap
    out.append(Check("lacunary sum cap", "lacunary-sum-cap", {"trials": 20}, 4.0, ok))
    # scales start past the transform decay onset for order-one frequencies,
    # so count extension only adds tail terms
    table = oscillatory.build_transform_table(cfg.p, cfg.epsilon, ctx.m)
    lam6 = [16.0 * 2.0**j for j in range(6)]
    lam12 = [16.0 * 2.0**j for j in range(12)]
    xi = np.array([0.7, -0.4, 0.9])
    a6 = oscillatory.multiplier_check(*xi, lam6, table)
    a12 = oscillatory.multiplier_check(*xi, lam12, table)
    rat = a12.abs_m / max(a6.abs_m, 1e-300)
    out.append(Check("multiplier scale uniformity", "multiplier-scale-uniformity",
                     {"abs_m_6": a6.abs_m, "abs_m_12": a12.abs_m}, 2.0,
                     0.5 <= rat <= 2.0, 2.0 - rat))
    prods = []
    audit_rows = []
    base = np.array([-2.0, -1.0, 1.0]) / np.linalg.norm([-2.0, -1.0, 1.0])
    off = np.array([1.0, 0.0, 0.0])  # moves both defining functionals off zero
    for dist in (0.1, 0.01):
        x = 1.3 * base + dist * off
        aud = oscillatory.multiplier_check(*x, lam12, table)
        prods.append(aud.grad_magnitude * aud.dist)
        audit_rows.append([aud.dist, aud.abs_m, aud.grad_magnitude])
    gratio = max(prods) / max(min(prods), 1e-300)
    out.append(Check("gradient-distance product stability", "multiplier-gradient-distance",
                     {"products": prods}, 4.0, gratio < 4.0, 4.0 - gratio))
    ctx.curve("multiplier_audit.csv", ["dist", "abs_m", "grad_magnitude"], audit_rows)
    return out


def _counterexample_checks(ctx: SuiteContext) -> list[Check]:
    cfg = ctx.cfg
    out = []
    A = sets.bourgain_set(2)
    dens = A.estimate_density(10.0, n=10**5, seed=cfg.seed)
    out.append(Check("square-shell density", "square-shell-density",
                     {"density": dens}, [0.15, 0.35], 0.15 <= dens <= 0.35,
                     min(dens - 0.15, 0.35 - dens)))
    rng = spawn_rng(cfg.seed, 41)
    gap2 = max(abs(sets.parallelogram_check(rng.normal(size=2), rng.normal(size=2), 2.0)[2])
               for _ in range(50))
    out.append(Check("quadratic parallelogram identity", "parallelogram-identity",
                     {"max_gap": gap2}, 1e-10, gap2 < 1e-10, 1e-10 - gap2))
    _, _, gp = sets.parallelogram_check(np.array([1.0, 1.0]), np.array([1.0, 0.0]), cfg.p)
    out.append(Check("non-quadratic parallelogram failure", "parallelogram-failure",
                     {"gap": gp}, 1e-3, abs(gp) > 1e-3, abs(gp) - 1e-3))
    spec2 = sets.gap_spectrum_sample(A, 2.0, 10.0, cfg.spectrum_hits,
                                     max_proposals=10**7, seed=cfg.seed)
    out.append(Check("half-integer gap restriction", "half-integer-gap-restriction",
                     {"hits": int(spec2.gaps.size),
                      "max_dev": spec2.max_half_integer_deviation},
                     sets.HALF_INTEGER_CAP + 1e-9,
                     spec2.gaps.size > 0 and
                     spec2.max_half_integer_deviation <= sets.HALF_INTEGER_CAP + 1e-9,
                     sets.HALF_INTEGER_CAP + 1e-9 - spec2.max_half_integer_deviation))
    specp = sets.gap_spectrum_sample(A, cfg.p, 10.0, cfg.spectrum_hits,
                                     max_proposals=10**7, seed=cfg.seed + 1)
    out.append(Check("gap escape at non-quadratic exponent", "gap-escape-nonquadratic",
                     {"hits": int(specp.gaps.size),
                      "max_dev": specp.max_half_integer_deviation}, 0.45,
                     specp.max_half_integer_deviation > 0.45,
                     specp.max_half_integer_deviation - 0.45))
    counts, edges = specp.histogram(bins=32)
    ctx.curve("gap_spectrum.csv", ["gap", "count"],
              [[0.5 * (edges[i] + edges[i + 1]), float(c)] for i, c in enumerate(counts)])
    lat = sets.lattice_cube_set(2, 0.1)
    rngl = spawn_rng(cfg.seed, 43)
    base = rngl.integers(-5, 5, size=(2000, 2)) + rngl.uniform(-0.1, 0.1, size=(2000, 2))
    other = rngl.integers(-5, 5, size=(2000, 2)) + rngl.uniform(-0.1, 0.1, size=(2000, 2))
    members_ok = bool(np.all(lat.contains_batch(base)) and np.all(lat.contains_batch(other)))
    ygaps = other - base
    dev_inf = np.max(np.abs(np.max(np.abs(ygaps), axis=1)
                            - np.round(np.max(np.abs(ygaps), axis=1))))
    out.append(Check("lattice gap restriction", "lattice-gap-restriction",
                     {"max_dev_inf": float(dev_inf)}, 0.2,
                     members_ok and dev_inf <= 0.2 + 1e-12, 0.2 - float(dev_inf)))
    return out


def _search_checks(ctx: SuiteContext) -> list[Check]:
    cfg = ctx.cfg
    out = []
    Afull = sets.full_box_set(2, 16.0)
    res = sets.progression_search(Afull, cfg.p, 2.0, tol=1e-6, budget=10**5,
                                  box_hi=16.0, seed=cfg.seed)
    out.append(Check("full box witness", "full-box-witness",
                     {"found": res.witness is not None,
                      "proposals": res.proposals_used}, None, res.witness is not None))
    sound = res.witness is not None and res.witness.verify(Afull, 2.0, 1e-6)
    out.append(Check("witness soundness", "witness-soundness", {}, None, bool(sound)))
    B = sets.bourgain_set(2)
    forb = sets.progression_search(B, 2.0, math.sqrt(0.75), tol=1e-3,
                                   budget=min(cfg.search_budget, 10**6),
                                   box_hi=10.0, seed=cfg.seed)
    out.append(Check("forbidden gap exhaustion", "forbidden-gap-exhaustion",
                     {"proposals": forb.proposals_used}, None,
                     forb.witness is None and forb.exhausted))
    seq = sets.lacunary_generate(4.0, 2.0, 3)
    rep = sets.theorem_experiment(0.4, cfg.p, 2, 64.0, seq,
                                  seeds=range(cfg.seed, cfg.seed + 5),
                                  budget_per_scale=cfg.search_budget)
    out.append(Check("positive progression control", "positive-control",
                     {"realized": rep.realized}, None, rep.all_seeds_realized))
    r1 = sets.progression_search(Afull, cfg.p, 2.0, tol=1e-6, budget=10**4,
                                 box_hi=16.0, seed=123)
    r2 = sets.progression_search(Afull, cfg.p, 2.0, tol=1e-6, budget=10**4,
                                 box_hi=16.0, seed=123)
    same = (r1.witness is not None and r2.witness is not None
            and np.array_equal(r1.witness.x, r2.witness.x)
            and np.array_equal(r1.witness.y, r2.witness.y))
    out.append(Check("seeded determinism", "search-determinism", {}, None, bool(same)))
    if rep.witnesses:
        rows = [[float(s), float(j), *w.x, *w.y, w.gap] for s, j, w in rep.witnesses[:64]]
        ctx.curve("witnesses.csv", ["seed", "scale_index", "x1", "x2", "y1", "y2", "gap"], rows)
    return out


_SUITE_FNS = {
    "kernels": _kernels_checks,
    "gowers": _gowers_checks,
    "forms": _forms_checks,
    "oscillatory": _oscillatory_checks,
    "counterexamples": _counterexample_checks,
    "search": _search_checks,
}


def lint_report(report: dict) -> None:
    """Reject reports with anchorless or malformed records before writing."""
    import jsonschema

    jsonschema.validate(report, REPORT_SCHEMA)
    for rec in report["records"]:
        if not rec["anchor"].strip():
            raise ValueError(f"record {rec['name']!r} lacks a claim anchor")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o)}")


def run_suite(cfg: ExperimentConfig) -> tuple[dict, list, int]:
    """Execute the configured suite; returns (report, curves, exit_code)."""
    names = list(_SUITE_FNS) if cfg.suite == "verify-all" else [cfg.suite]
    ctx = SuiteContext(cfg)
    records = []
    runtimes = {}
    for suite in names:
        t0 = time.perf_counter()
        for chk in _SUITE_FNS[suite](ctx):
            records.append(chk)
        runtimes[suite] = round(time.perf_counter() - t0, 3)
    n_fail = sum(1 for c in records if not c.passed)
    margins = [c.margin for c in records if np.isfinite(c.margin)]
    from .util import worker_count

    report = {
        "format": 1,
        "config": {**dataclasses.asdict(cfg), "workers": worker_count()},
        "timing": {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"), "runtimes_s": runtimes},
        "records": [
            {"name": c.name, "anchor": c.anchor, "values": c.values,
             "bound": c.bound, "passed": bool(c.passed)}
            for c in records
        ],
        "summary": {
            "n_records": len(records),
            "n_pass": len(records) - n_fail,
            "n_fail": n_fail,
            "worst_margin": min(margins) if margins else None,
        },
    }
    lint_report(json.loads(json.dumps(report, default=_json_default)))
    return report, ctx.curves, (0 if n_fail == 0 else 2)


def write_report_atomic(report: dict, out_dir: str, fmt: str = "json") -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"report.{fmt}")
    fd, tmp = tempfile.mkstemp(dir=out_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            if fmt == "csv":
                fh.write("name,anchor,passed,bound,values\n")
                for rec in report["records"]:
                    vals = json.dumps(rec["values"], default=_json_default, sort_keys=True)
                    fh.write('%s,%s,%s,%s,"%s"\n' % (
                        rec["name"], rec["anchor"], rec["passed"],
                        json.dumps(rec["bound"], default=_json_default),
                        vals.replace('"', "'")))
            else:
                json.dump(report, fh, indent=2, default=_json_default, sort_keys=True)
                fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _csv_cell(v) -> str:
    if isinstance(v, str):
        return v
    return format(float(v), ".17e")


def emit_csv(curves: list, out_dir: str) -> list:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for filename, header, rows in curves:
        path = os.path.join(out_dir, filename)
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_csv_cell(v) for v in row) + "\n")
        written.append(path)
    return written


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        command, cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"lproth: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    if command == "list":
        for s in SUITES:
            print(s)
        return 0
    if command == "schema":
        print(json.dumps(REPORT_SCHEMA, indent=2, sort_keys=True))
        return 0
    try:
        report, curves, code = run_suite(cfg)
        path = write_report_atomic(report, cfg.out_dir, fmt=cfg.fmt)
        written = emit_csv(curves, cfg.out_dir)
    except (RuntimeError, ValueError, OSError) as exc:
        print(f"lproth: internal failure: {exc}", file=sys.stderr)
        return 3
    print(f"report: {path}")
    for w in written:
        print(f"curve: {w}")
    print(f"records: {report['summary']['n_records']} "
          f"pass: {report['summary']['n_pass']} fail: {report['summary']['n_fail']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
