"""Verification suites run by ``mnbesov verify``.

Every suite returns a :class:`SuiteResult`; suites are independent and may run
concurrently, and the report orders them by name.
"""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import besov as bv
from .calibration import bernstein_sweep
from .corpus import FieldSpec, generate_corpus, product_safe_radius, random_field, taylor_green
from .errors import ConfigError, MNBesovError, PreconditionError
from .grid import Grid, RealField, dft, gradient, idft
from .lebesgue import (
    hausdorff_young_check,
    holder_product_check,
    parse_exponent,
    young_convolution_check,
)
from .littlewood_paley import almost_orthogonality_check, block, build_filter_bank
from .mnf import read_mnf, write_mnf
from .paraproduct import bony_reconstruct_check
from .report import Check, SuiteResult, VerificationReport
from .solver import SolverConfig, heat_trajectory, linf_l2_distance, picard_solve, rk4_oracle
from .stokes import (
    SemigroupParams,
    estimate_bilinear_constant,
    heat_block_decay_check,
    leray,
    pressure_from_velocity,
    relative_divergence,
    riesz,
)


@dataclass
class VerifyConfig:
    seed: int = 42
    n2d: str = "64"
    n3d: str = "16"
    samples: int = 20
    p: str = "2,4"
    solver_p: str = "2,4,2"
    solver_flavor: str = "physical"
    q: float = 2.0
    nu: float = 1.0
    nt: int = 128
    solver_runs: int = 2
    corpus_pairs: int = 3
    theta: float = 0.5
    bilinear_sigma_offset: float = 0.0
    suites: str = ""

    @classmethod
    def from_mapping(cls, values: dict) -> "VerifyConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown verify option {key!r}")
            typ = known[key].type
            try:
                if typ in ("int", int):
                    kwargs[key] = int(raw)
                elif typ in ("float", float):
                    kwargs[key] = float(raw)
                else:
                    kwargs[key] = str(raw).strip()
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def validate(self):
        for name in ("n2d", "n3d"):
            if not getattr(self, name).strip():
                raise ConfigError(f"grid size {name} is empty")
            try:
                int(getattr(self, name))
            except ValueError as exc:
                raise ConfigError(f"grid size {name} must be an integer") from exc
        if self.samples < 1 or self.solver_runs < 1 or self.corpus_pairs < 1 or self.nt < 4:
            raise ConfigError("sample counts must be positive and nt >= 4")
        try:
            parse_exponent(self.p, 2)
            parse_exponent(self.solver_p, 3)
        except MNBesovError as exc:
            raise ConfigError(str(exc)) from exc
        if self.solver_flavor not in bv.FLAVORS:
            raise ConfigError(f"solver_flavor must be one of {bv.FLAVORS}")
        try:
            self.grid2()
            self.grid3()
        except MNBesovError as exc:
            raise ConfigError(str(exc)) from exc

    def grid2(self) -> Grid:
        return Grid.cube(2, int(self.n2d))

    def grid3(self) -> Grid:
        return Grid.cube(3, int(self.n3d))


def suite_field_grid(cfg: VerifyConfig) -> SuiteResult:
    g = cfg.grid2()
    fs = generate_corpus(cfg.seed, FieldSpec(g, 0.0, 0.75 * math.pi * g.n[0] / g.L[0]), cfg.samples)
    res = SuiteResult("field_grid")
    worst_rt, worst_parseval = 0.0, 0.0
    for f in fs:
        back = idft(dft(f))
        worst_rt = max(worst_rt, float(np.max(np.abs(back.data - f.data))) / float(np.max(np.abs(f.data))))
        worst_parseval = max(worst_parseval, abs(dft(f).l2() - f.l2()) / f.l2())
    res.checks.append(Check("dft_round_trip", worst_rt, 1e-12, 0.0))
    res.checks.append(Check("parseval", worst_parseval, 1e-12, 0.0))
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "f.mnf")
        write_mnf(path, fs[0])
        again = read_mnf(path)
        res.checks.append(Check("mnf_round_trip", float(np.max(np.abs(again.data - fs[0].data))), 0.0, 0.0))
    return res


def suite_mixed_lebesgue(cfg: VerifyConfig) -> SuiteResult:
    g = Grid.cube(2, 16)
    rng = np.random.default_rng(cfg.seed)
    res = SuiteResult("mixed_lebesgue")
    families = [((1.0, 1.0), (math.inf, math.inf)), ((2.0, 2.0), (2.0, 2.0)),
                ((4.0, 4.0), (4.0 / 3.0, 4.0 / 3.0)), ((math.inf, math.inf), (1.0, 1.0))]
    for p1, p2 in families:
        worst_h, worst_y = 0.0, 0.0
        for _ in range(cfg.samples):
            f = RealField(g, rng.standard_normal(g.n))
            h = RealField(g, rng.standard_normal(g.n))
            c = holder_product_check(f, h, p1, p2)
            worst_h = max(worst_h, c.ratio)
            y = young_convolution_check(f, h, p1)
            worst_y = max(worst_y, y.ratio)
        res.checks.append(Check(f"holder_{p1[0]:g}", worst_h, 1.0, 1e-12))
        res.checks.append(Check(f"young_{p1[0]:g}", worst_y, 1.0, 1e-12))
    worst = 0.0
    for _ in range(cfg.samples):
        f = RealField(g, rng.standard_normal(g.n))
        worst = max(worst, hausdorff_young_check(f, (2.0, 1.5)).ratio)
    res.checks.append(Check("hausdorff_young", worst, 1.0, 1e-9))
    return res


def suite_littlewood_paley(cfg: VerifyConfig) -> SuiteResult:
    res = SuiteResult("littlewood_paley")
    for g in (cfg.grid2(), cfg.grid3()):
        bank = build_filter_bank(g)
        res.checks.append(Check(f"partition_of_unity_{g.d}d", bank.partition_defect(), 1e-12, 0.0))
    g = cfg.grid2()
    bank = build_filter_bank(g)
    spec = FieldSpec(g, 0.0, float(g.eta_abs[g.resolved].max()))
    fs = generate_corpus(cfg.seed + 1, spec, min(cfg.samples, 10))
    worst = 0.0
    for f in fs:
        worst = max(worst, almost_orthogonality_check(bank, f)[0].ratio)
    res.checks.append(Check("almost_orthogonality", worst, 1.0, 0.0))
    return res


def suite_besov_norms(cfg: VerifyConfig) -> SuiteResult:
    res = SuiteResult("besov_norms")
    g = Grid.cube(2, 256, 32 * math.pi)
    sweep = bernstein_sweep(g, seed=cfg.seed, profiles=1)
    res.checks.append(Check("bernstein_lambda_spread", max(sweep.spread().values()), 2.0, 0.0))
    res.checks.append(Check("bernstein_constant", sweep.measured_constant(), bv.FROZEN_BERNSTEIN_C, 0.0))
    g2 = cfg.grid2()
    bank = build_filter_bank(g2)
    p = parse_exponent(cfg.p, 2)
    f = random_field(FieldSpec(g2, 1.0, 20.0), np.random.default_rng(cfg.seed))
    q = tuple(max(v, 4.0) for v in p)
    idx1 = bv.BesovIndex(0.5, p, 1.0)
    r1, r2 = sum(1 / v for v in p), sum(1 / v for v in q)
    idx2 = bv.BesovIndex(0.5 - (r1 - r2), q, math.inf)
    res.checks.extend(bv.embedding_check(f, idx1, idx2, bank))
    n_inf = bv.besov_norm(f, bv.BesovIndex(0.5, p, math.inf), bank)
    n_one = bv.besov_norm(f, bv.BesovIndex(0.5, p, 1.0), bank)
    res.checks.append(Check("lq_monotonicity", n_inf, n_one, 1e-12))
    return res


def suite_paraproduct(cfg: VerifyConfig) -> SuiteResult:
    res = SuiteResult("paraproduct")
    g = cfg.grid2()
    bank = build_filter_bank(g)
    lo = bank.covered_band()[0]
    spec = FieldSpec(g, lo, product_safe_radius(g))
    fs = generate_corpus(cfg.seed + 2, spec, 2 * min(cfg.samples, 20))
    worst = 0.0
    for v, w in zip(fs[::2], fs[1::2]):
        worst = max(worst, bony_reconstruct_check(bank, v, w).ratio)
    res.checks.append(Check("bony_reconstruction", worst, 1.0, 0.0))
    return res


def suite_stokes_ops(cfg: VerifyConfig) -> dict:
    res = SuiteResult("stokes_ops")
    constants = {}
    g = cfg.grid2()
    bank = build_filter_bank(g)
    params = SemigroupParams(cfg.nu)
    p = parse_exponent(cfg.p, 2)
    spec = FieldSpec(g, 0.0, float(g.eta_abs[g.resolved].max()))
    fs = generate_corpus(cfg.seed + 3, spec, min(cfg.samples, 5))
    worst = 0.0
    for f in fs:
        for l in bank.levels:
            ts = np.linspace(0.0, 2.0, 9) / (cfg.nu * 4.0**l)
            for c in heat_block_decay_check(params, bank, f, l, ts, p):
                worst = max(worst, c.ratio)
    res.checks.append(Check("heat_block_decay", worst, 1.0, 1e-10))

    vs = generate_corpus(cfg.seed + 4, FieldSpec(g, 0.0, 20.0, components=2), min(cfg.samples, 10))
    w_idem, w_div, w_grad, riesz_c = 0.0, 0.0, 0.0, 0.0
    for u in vs:
        pu = leray(u)
        w_idem = max(w_idem, (leray(pu) - pu).l2() / u.l2())
        w_div = max(w_div, relative_divergence(pu))
        phi = u.component(0)
        w_grad = max(w_grad, leray(gradient(phi)).l2() / gradient(phi).l2())
        for j in range(2):
            for l in bank.levels:
                b = block(bank, phi, l)
                nb = bv.block_norms(bank, b.data[None], p, bv.PHYSICAL).max()
                if nb > 0:
                    nr = bv.block_norms(bank, riesz(b, j).data[None], p, bv.PHYSICAL).max()
                    riesz_c = max(riesz_c, nr / nb)
    res.checks.append(Check("leray_idempotent", w_idem, 1e-13, 0.0))
    res.checks.append(Check("leray_divergence", w_div, 1e-12, 0.0))
    res.checks.append(Check("leray_gradient", w_grad, 1e-12, 0.0))
    constants["riesz_C"] = riesz_c

    tg = taylor_green(g)
    P = pressure_from_velocity(tg, params)
    x, y = g.coords
    exact = (np.cos(2 * x) + np.cos(2 * y)) / 4.0
    res.checks.append(Check("taylor_green_pressure", float(np.max(np.abs(P.data[0] - exact))), 1e-12, 0.0))
    return {"suite": res, "constants": constants}


def _solver_index(cfg: VerifyConfig, offset: float = 0.0) -> bv.BesovIndex:
    p = parse_exponent(cfg.solver_p, 3)
    return bv.BesovIndex(bv.critical_sigma(p, cfg.solver_flavor) + offset, p, cfg.q, cfg.solver_flavor)


def suite_mild_solver(cfg: VerifyConfig) -> dict:
    res = SuiteResult("mild_solver")
    constants = {}
    # Taylor-Green: B(u, u) vanishes, the solution is pure heat decay
    g2 = Grid.cube(2, 32)
    tg = taylor_green(g2)
    tcfg = SolverConfig(nu=cfg.nu, T=1.0, n_t=64)
    out = picard_solve(tg, tcfg)
    exact = np.stack([math.exp(-2 * cfg.nu * t) * tg.data for t in tcfg.times])
    err = linf_l2_distance(out.solution, out.solution.with_states(exact)) / tg.l2()
    res.checks.append(Check("taylor_green_exact", err, 1e-8, 0.0, {"iterations": out.iterations}))
    res.checks.append(Check("taylor_green_iterations", float(out.iterations), 2.0, 0.0))

    g = cfg.grid3()
    bank = build_filter_bank(g)
    T = math.log(1e8) / cfg.nu
    try:
        idx = _solver_index(cfg, cfg.bilinear_sigma_offset)
        base = SolverConfig(nu=cfg.nu, T=T, n_t=cfg.nt, idx=idx)
        spec = FieldSpec(g, 1.0, 1.5, solenoidal=True)
        pool = generate_corpus(cfg.seed + 5, spec, 2 * cfg.corpus_pairs)
        trajs = [heat_trajectory(f, base) for f in pool]
        est = estimate_bilinear_constant(base.params, list(zip(trajs[::2], trajs[1::2])), idx, bank,
                                         {"field": spec.describe(), "seed": cfg.seed + 5})
    except PreconditionError as exc:
        res.skipped.append({"check": "contraction", "reason": str(exc)})
        return {"suite": res, "constants": constants}
    K = est.K_hat
    constants.update(K_hat=K, epsilon=cfg.theta / (4 * K))
    scfg = SolverConfig(nu=cfg.nu, T=T, n_t=cfg.nt, idx=idx, K_hat=K, theta=cfg.theta, tol_residual=1e-8)
    eps = scfg.eps
    for i, f in enumerate(generate_corpus(cfg.seed + 6, spec, cfg.solver_runs)):
        z = bv.z_norm(heat_trajectory(f, scfg), idx, bank).total
        u0 = f * (eps / z)
        sol = picard_solve(u0, scfg, bank)
        ratios = sol.state.contraction_ratios(1e-9 * sol.z0_norm.total)
        res.checks.append(Check(f"contraction_{i}", max(ratios) if ratios else 0.0,
                                4 * K * sol.z0_norm.total + 0.05, 0.0))
        res.checks.append(sol.norm_bound_check())
        res.checks.append(Check(f"converged_{i}", 0.0 if sol.converged else 1.0, 0.0, 0.0))
    return {"suite": res, "constants": constants}


SUITES = {
    "field_grid": suite_field_grid,
    "mixed_lebesgue": suite_mixed_lebesgue,
    "littlewood_paley": suite_littlewood_paley,
    "besov_norms": suite_besov_norms,
    "paraproduct": suite_paraproduct,
    "stokes_ops": suite_stokes_ops,
    "mild_solver": suite_mild_solver,
}


def _run_one(name: str, cfg: VerifyConfig) -> tuple[SuiteResult, dict]:
    try:
        out = SUITES[name](cfg)
    except MNBesovError as exc:
        return SuiteResult(name, error=f"{type(exc).__name__}: {exc}"), {}
    if isinstance(out, dict):
        return out["suite"], out["constants"]
    return out, {}


def run_verify(cfg: VerifyConfig, parallel: bool = False) -> VerificationReport:
    names = [s.strip() for s in cfg.suites.split(",") if s.strip()] or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suites: {unknown}")
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda n: _run_one(n, cfg), names))
    else:
        results = [_run_one(n, cfg) for n in names]
    report = VerificationReport(config=asdict(cfg))
    report.constants["C_B"] = bv.FROZEN_BERNSTEIN_C
    for suite, consts in results:
        report.suites.append(suite)
        report.constants.update(consts)
    return report
