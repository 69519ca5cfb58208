"""Acceptance criteria 1-12.

Each test prints ``PASS criterion N: ...`` or ``FAIL criterion N: ...`` and the
lines are repeated in the terminal summary.  The solver criteria run in 3D at
16^3 and take several minutes on one core.
"""

import math
import time

import numpy as np
import pytest

from mnbesov import besov as bv
from mnbesov.calibration import bernstein_sweep
from mnbesov.corpus import FieldSpec, generate_corpus, product_safe_radius, taylor_green
from mnbesov.grid import Grid, RealField, gradient
from mnbesov.lebesgue import holder_product_check, young_convolution_check
from mnbesov.littlewood_paley import almost_orthogonality_check, build_filter_bank
from mnbesov.paraproduct import bony_reconstruct_check
from mnbesov.solver import (
    SolverConfig,
    continuity_check,
    heat_trajectory,
    linf_l2_distance,
    picard_solve,
    rk4_oracle,
)
from mnbesov.stokes import (
    SemigroupParams,
    estimate_bilinear_constant,
    heat_block_decay_check,
    leray,
    relative_divergence,
)

G3 = Grid.cube(3, 16)
BANK3 = build_filter_bank(G3)
SHELL3 = FieldSpec(G3, 1.0, 1.5, solenoidal=True)
# long enough that the heat flow has decayed the shell by eight orders
T_LONG = math.log(1e8)
PHYSICAL_IDX = bv.BesovIndex(bv.critical_sigma((2.0, 4.0, 2.0)), (2.0, 4.0, 2.0), 2.0)
FREQUENCY_IDX = bv.BesovIndex(bv.critical_sigma((2.0, 1.0, 2.0), bv.FREQUENCY), (2.0, 1.0, 2.0), 2.0,
                              bv.FREQUENCY)
STEPS = {bv.PHYSICAL: 768, bv.FREQUENCY: 256}
RUNS, PAIRS = 20, 10


def verdict(log, n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    print(line)
    log.append(line)
    return ok


class Regime:
    """Calibrated constant, configuration and the base Picard runs for one index."""

    def __init__(self, idx):
        nt = STEPS[idx.flavor]
        probe = SolverConfig(T=T_LONG, n_t=nt, idx=idx)
        pool = [heat_trajectory(f, probe) for f in generate_corpus(7, SHELL3, 8)]
        est = estimate_bilinear_constant(probe.params, list(zip(pool[::2], pool[1::2])), idx, BANK3,
                                         {"field": SHELL3.describe(), "seed": 7})
        self.K = est.K_hat
        self.cfg = SolverConfig(T=T_LONG, n_t=nt, idx=idx, K_hat=self.K, theta=0.5, tol_residual=1e-7)
        self.data = [self.scaled(f) for f in generate_corpus(8, SHELL3, RUNS)]
        self._runs = {}

    def scaled(self, f):
        z = bv.z_norm(heat_trajectory(f, self.cfg), self.cfg.idx, BANK3).total
        return f * (self.cfg.eps / z)

    def run(self, i):
        if i not in self._runs:
            self._runs[i] = picard_solve(self.data[i], self.cfg, BANK3)
        return self._runs[i]


@pytest.fixture(scope="module")
def physical():
    return Regime(PHYSICAL_IDX)


@pytest.fixture(scope="module")
def frequency():
    return Regime(FREQUENCY_IDX)


def test_1_partition_of_unity(acceptance_log):
    start = time.perf_counter()
    defects = {g.d: build_filter_bank(g).partition_defect() for g in (Grid.cube(2, 64), Grid.cube(3, 32))}
    elapsed = time.perf_counter() - start
    ok = max(defects.values()) <= 1e-12 and elapsed < 2.0
    verdict(acceptance_log, 1, ok, f"defect 2D {defects[2]:.2e}, 3D {defects[3]:.2e}, {elapsed:.2f}s")
    assert ok


def test_2_almost_orthogonality(acceptance_log):
    g = Grid.cube(2, 64)
    bank = build_filter_bank(g)
    spec = FieldSpec(g, 0.0, float(g.eta_abs[g.resolved].max()))
    worst = max(almost_orthogonality_check(bank, f)[0].ratio for f in generate_corpus(21, spec, 100))
    # ratio is against 1e-12 ||g||_2
    ok = worst <= 1.0
    verdict(acceptance_log, 2, ok, f"max ||D_l D_l' g|| / ||g|| = {worst * 1e-12:.2e} over 100 fields")
    assert ok


def _random_scalar(rng, g, kind):
    if kind == 0:
        return rng.standard_normal(g.n)
    if kind == 1:
        return rng.lognormal(0.0, 2.0, g.n) * rng.choice([-1.0, 1.0], g.n)
    return rng.standard_normal(g.n) * (rng.random(g.n) < 0.1)


@pytest.mark.parametrize("family", [(1.0, math.inf), (2.0, 2.0), (4.0, 4.0 / 3.0), (math.inf, 1.0)],
                         ids=["1-inf", "2-2", "4-4/3", "inf-1"])
def test_3_holder_and_young(acceptance_log, family):
    g = Grid.cube(2, 16, 3.0)
    rng = np.random.default_rng(31)
    a, b = family
    violations, worst = 0, 0.0
    for i in range(1000):
        f = RealField(g, _random_scalar(rng, g, i % 3))
        h = RealField(g, _random_scalar(rng, g, (i + 1) % 3))
        # alternate isotropic and axis-swapped exponent vectors
        p1, p2 = ((a, a), (b, b)) if i % 2 == 0 else ((a, b), (b, a))
        for c in (holder_product_check(f, h, p1, p2), young_convolution_check(h, f, p1)):
            violations += not c.holds
            worst = max(worst, c.ratio)
    ok = violations == 0
    verdict(acceptance_log, 3, ok, f"family ({a:g},{b:g}): {violations} violations in 2000 checks, "
                                   f"max ratio {worst:.6f}")
    assert ok


def test_4_bernstein_sweep(acceptance_log):
    sweep = bernstein_sweep(Grid.cube(2, 512, 32 * math.pi))
    spread = max(sweep.spread().values())
    C = sweep.measured_constant()
    ok = spread < 2.0 and C <= bv.FROZEN_BERNSTEIN_C
    verdict(acceptance_log, 4, ok, f"worst spread over lambda {spread:.4f}, measured C_B {C:.4f}, "
                                   f"frozen {bv.FROZEN_BERNSTEIN_C}")
    assert ok


def test_5_bony_reconstruction(acceptance_log):
    g = Grid.cube(2, 64)
    bank = build_filter_bank(g)
    spec = FieldSpec(g, bank.covered_band()[0], product_safe_radius(g))
    fs = generate_corpus(51, spec, 400)
    worst = 0.0
    for v, w in zip(fs[::2], fs[1::2]):
        c = bony_reconstruct_check(bank, v, w)
        worst = max(worst, c.lhs / (v.l2() * w.l2()))
    ok = worst <= 1e-8
    verdict(acceptance_log, 5, ok, f"max relative error {worst:.2e} over 200 pairs")
    assert ok


def _heat_decay(log, n, grid, p, flavor):
    bank = build_filter_bank(grid)
    params = SemigroupParams(1.0)
    spec = FieldSpec(grid, 0.0, float(grid.eta_abs[grid.resolved].max()))
    worst, count = 0.0, 0
    for f in generate_corpus(61, spec, 5):
        for l in bank.levels:
            times = np.linspace(0.0, 4.0, 17) / 4.0**l
            for c in heat_block_decay_check(params, bank, f, l, times, p, flavor):
                worst = max(worst, c.ratio)
                count += 1
    ok = worst <= 1 + 1e-10
    verdict(log, n, ok, f"{flavor} p={p}: max measured/bound {worst:.12f} over {count} (l, t) samples")
    return ok


def test_6_heat_block_decay(acceptance_log):
    assert _heat_decay(acceptance_log, 6, Grid.cube(2, 64), (2.0, 4.0), bv.PHYSICAL)


def test_7_leray(acceptance_log):
    worst = {"idempotence": 0.0, "gradient": 0.0, "divergence": 0.0}
    for g, count, seed in ((Grid.cube(2, 64), 400, 71), (Grid.cube(3, 16), 100, 72)):
        spec = FieldSpec(g, 0.0, float(g.eta_abs[g.resolved].max()), components=g.d)
        for u in generate_corpus(seed, spec, count):
            pu = leray(u)
            worst["idempotence"] = max(worst["idempotence"], (leray(pu) - pu).l2() / u.l2())
            grad = gradient(u.component(0))
            worst["gradient"] = max(worst["gradient"], leray(grad).l2() / grad.l2())
            worst["divergence"] = max(worst["divergence"], relative_divergence(pu))
    ok = max(worst.values()) <= 1e-12
    verdict(acceptance_log, 7, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " over 500 fields")
    assert ok


def test_8_taylor_green(acceptance_log):
    tg = taylor_green(Grid.cube(2, 64))
    cfg = SolverConfig(nu=1.0, T=1.0, n_t=256)
    start = time.perf_counter()
    out = picard_solve(tg, cfg)
    elapsed = time.perf_counter() - start
    exact = out.solution.with_states(np.exp(-2 * cfg.times)[:, None, None, None] * tg.data[None])
    err = linf_l2_distance(out.solution, exact) / tg.l2()
    ok = err <= 1e-8 and out.iterations <= 2 and elapsed < 10.0
    verdict(acceptance_log, 8, ok, f"relative error {err:.2e}, {out.iterations} iteration(s), {elapsed:.1f}s")
    assert ok


def _contraction(log, n, regime):
    worst_ratio, worst_growth, failures = 0.0, 0.0, []
    for i in range(RUNS):
        out = regime.run(i)
        eps = out.z0_norm.total
        ratios = out.state.contraction_ratios(1e-9 * eps)
        ratio = max(ratios) if ratios else 0.0
        growth = out.u_norm.total / eps
        worst_ratio, worst_growth = max(worst_ratio, ratio), max(worst_growth, growth)
        if not (out.converged and ratio <= 4 * regime.K * eps + 0.05 and growth <= 2 * (1 + 1e-6)):
            failures.append(i)
    bound = 4 * regime.K * regime.cfg.eps + 0.05
    ok = not failures
    verdict(log, n, ok, f"{regime.cfg.idx.flavor}: K_hat {regime.K:.4g}, max residual ratio {worst_ratio:.3f} "
                        f"(bound {bound:.3f}), max ||u||_Z/||z0||_Z {worst_growth:.4f}, failing runs {failures}")
    return ok


def _lipschitz(log, n, regime):
    rng_fields = generate_corpus(9, SHELL3, PAIRS)
    worst, failures = 0.0, []
    for i, noise in enumerate(rng_fields):
        u0 = regime.data[i]
        tilde = u0 + noise * (0.01 * u0.l2() / noise.l2())
        c = continuity_check(u0, tilde, regime.cfg, BANK3, solved=regime.run(i))
        worst = max(worst, c.ratio)
        if not c.holds:
            failures.append(i)
    ok = not failures
    verdict(log, n, ok, f"{regime.cfg.idx.flavor}: max ratio / (1-4 K eps)^-1 = {worst:.4f} "
                        f"over {PAIRS} pairs, failing {failures}")
    return ok


def test_9_contraction_regime(acceptance_log, physical):
    assert _contraction(acceptance_log, 9, physical)


def test_10_oracle_agreement(acceptance_log, physical):
    worst = 0.0
    for i in range(RUNS):
        u0 = physical.data[i]
        ref = rk4_oracle(u0, physical.cfg)
        worst = max(worst, linf_l2_distance(physical.run(i).solution, ref) / u0.l2())
    ok = worst <= 1e-4
    verdict(acceptance_log, 10, ok, f"max relative Linf(L2) Picard - RK4 {worst:.2e} over {RUNS} runs")
    assert ok


def test_11_lipschitz(acceptance_log, physical):
    assert _lipschitz(acceptance_log, 11, physical)


def test_12_fourier_besov_twin(acceptance_log, frequency):
    results = [
        _heat_decay(acceptance_log, 12, G3, FREQUENCY_IDX.p, bv.FREQUENCY),
        _contraction(acceptance_log, 12, frequency),
        _lipschitz(acceptance_log, 12, frequency),
    ]
    assert all(results)
