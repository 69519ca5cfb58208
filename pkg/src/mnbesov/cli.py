"""Command-line interface: ``mnbesov {verify,norm,decompose,solve,estimate-constant}``.

Exit codes: 0 success, 1 failed check, 2 configuration or input error,
3 numerical failure (divergence, step-size violation, non-finite values).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import besov as bv
from .corpus import FieldSpec, generate_corpus
from .errors import BoundViolation, DivergenceError, MNBesovError, StepSizeError
from .grid import Grid
from .lebesgue import format_exponent, mixed_norm, parse_exponent
from .littlewood_paley import build_filter_bank, decompose
from .mnf import read_mnf, write_mnf
from .report import _plain
from .solver import (
    SolverConfig,
    heat_trajectory,
    linf_l2_distance,
    picard_solve,
    rk4_oracle,
    trajectory_divergence,
)
from .stokes import SemigroupParams, estimate_bilinear_constant, relative_divergence
from .verify import VerifyConfig, run_verify

log = logging.getLogger("mnbesov")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
CONSTANTS_FILE = "constants.json"


class UsageError(Exception):
    pass


def load_config(path: str | None, section: str) -> dict:
    """Read ``key = value`` lines; an optional ``[section]`` block overrides the top level."""
    if not path:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string("[__top__]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config {path}: {exc}") from exc
    out = dict(parser["__top__"])
    if parser.has_section(section):
        out.update(parser[section])
    return out


def _common(default=None) -> argparse.ArgumentParser:
    """Global flags.  Subcommands get ``SUPPRESS`` defaults so a flag given
    before the subcommand is not overwritten by the subparser."""
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=default, help="key = value config file")
    p.add_argument("--seed", type=int, default=default, help="base seed for generated corpora")
    p.add_argument("--out-dir", default=default, help="directory for reports and fields (default .)")
    p.add_argument("--json", action="store_true", default=default or False,
                   help="print machine-readable JSON")
    p.add_argument("-v", "--verbose", action="store_true", default=default or False)
    return p


def _index_args(p: argparse.ArgumentParser):
    p.add_argument("--flavor", choices=["besov", "fourier-besov"], default=None)
    p.add_argument("--sigma", type=float, default=None, help="regularity; default is the critical index")
    p.add_argument("--p", default=None, help="mixed exponent, e.g. 2,inf,2")
    p.add_argument("--q", default=None, help="summability exponent (inf allowed)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mnbesov", parents=[_common()],
                                     description="Mixed-norm Besov tools and mild Navier-Stokes solver")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(argparse.SUPPRESS)

    v = sub.add_parser("verify", parents=[common], help="run the verification suites")
    v.add_argument("--suites", default=None, help="comma-separated suite names")
    v.add_argument("--parallel", action="store_true")

    n = sub.add_parser("norm", parents=[common], help="Besov or Fourier-Besov norm of a field")
    n.add_argument("--input", required=False)
    _index_args(n)

    d = sub.add_parser("decompose", parents=[common], help="write Littlewood-Paley blocks")
    d.add_argument("--input", required=False)
    d.add_argument("--p", default=None, help="mixed exponent for the norm_mixed column")

    s = sub.add_parser("solve", parents=[common], help="Picard solution of the mild equation")
    s.add_argument("--input", required=False)
    s.add_argument("--nu", type=float)
    s.add_argument("--T", type=float)
    s.add_argument("--nt", type=int)
    _index_args(s)
    s.add_argument("--theta", type=float)
    s.add_argument("--max-iters", type=int)
    s.add_argument("--tol", type=float)
    s.add_argument("--K-hat", dest="K_hat", type=float, help="bilinear constant (else cached or estimated)")
    s.add_argument("--corpus-size", type=int)
    s.add_argument("--project", action="store_true", help="apply Leray to non-solenoidal data")
    s.add_argument("--oracle", choices=["none", "rk4"], default=None)
    s.add_argument("--stride", type=int, help="write every stride-th sample as MNF1")

    e = sub.add_parser("estimate-constant", parents=[common], help="measure the bilinear constant")
    e.add_argument("--nu", type=float)
    e.add_argument("--corpus-size", type=int)
    e.add_argument("--n", type=int, help="points per axis")
    e.add_argument("--d", type=int, help="dimension")
    e.add_argument("--T", type=float)
    e.add_argument("--nt", type=int)
    _index_args(e)
    return parser


def _merged(args: argparse.Namespace, section: str, defaults: dict) -> dict:
    """CLI value if given, else config file value, else default."""
    conf = load_config(args.config, section)
    out = dict(defaults)
    for k, v in conf.items():
        out[k.replace("-", "_")] = v
    for k, v in vars(args).items():
        if v is not None and v is not False:
            out[k] = v
    return out


def _index_from(opts: dict, d: int) -> bv.BesovIndex:
    flavor = bv.FREQUENCY if opts.get("flavor") in ("fourier-besov", bv.FREQUENCY) else bv.PHYSICAL
    p = parse_exponent(str(opts.get("p") or ",".join(["2"] * d)), d)
    q_raw = str(opts.get("q") or "2")
    q = math.inf if q_raw.lower() == "inf" else float(q_raw)
    sigma = opts.get("sigma")
    sigma = bv.critical_sigma(p, flavor) if sigma is None else float(sigma)
    return bv.BesovIndex(sigma, p, q, flavor)


def _out_dir(opts: dict) -> Path:
    path = Path(opts.get("out_dir") or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(obj: dict, as_json: bool, lines: list[str] | None = None):
    if as_json or not lines:
        print(json.dumps(_plain(obj), indent=2))
    else:
        print("\n".join(lines))


def _require_input(opts: dict):
    if not opts.get("input"):
        raise UsageError("--input is required")
    return read_mnf(opts["input"])


def cmd_verify(args) -> int:
    opts = _merged(args, "verify", {})
    keep = {k: v for k, v in opts.items()
            if k in VerifyConfig.__dataclass_fields__ and v is not None}
    cfg = VerifyConfig.from_mapping(keep)
    report = run_verify(cfg, parallel=bool(opts.get("parallel")))
    out = _out_dir(opts)
    (out / "verify_report.json").write_text(report.to_json())
    lines = [f"{'PASS' if s.passed else 'FAIL'}  {s.name}" for s in sorted(report.suites, key=lambda s: s.name)]
    lines += [f"failing: {name}" for name in report.failing()]
    lines.append(f"constants: {json.dumps(_plain(report.constants))}")
    _emit(report.as_dict(), args.json, lines)
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_norm(args) -> int:
    opts = _merged(args, "norm", {})
    f = _require_input(opts)
    idx = _index_from(opts, f.grid.d)
    bank = build_filter_bank(f.grid)
    blocks = bv.weighted_blocks(bank, f, idx)
    value = bv.norm(f, idx, bank)
    out = {"norm": value, "index": idx.describe(), "blocks": {str(k): v for k, v in blocks.items()},
           "band": [bank.l_min, bank.l_max]}
    print(json.dumps(_plain(out), indent=2))
    return EXIT_OK


def cmd_decompose(args) -> int:
    opts = _merged(args, "decompose", {})
    f = _require_input(opts)
    bank = build_filter_bank(f.grid)
    out = _out_dir(opts)
    parts = decompose(bank, f)
    total = sum(b.data for b in parts.values())
    summary = {"levels": [bank.l_min, bank.l_max], "partition_defect": bank.partition_defect(),
               "reconstruction_error": float(np.sqrt(np.sum((total - f.data) ** 2) * f.grid.cell_volume)),
               "blocks": {}}
    p = parse_exponent(str(opts.get("p") or ",".join(["2"] * f.grid.d)), f.grid.d)
    summary["p"] = format_exponent(p)
    with open(out / "blocks.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["l", "norm_l2", "norm_mixed"])
        for l, b in parts.items():
            path = out / f"block_{l:+d}.mnf"
            write_mnf(path, b)
            l2, mixed = b.l2(), mixed_norm(b, p)
            w.writerow([l, f"{l2:.12g}", f"{mixed:.12g}"])
            summary["blocks"][str(l)] = {"file": str(path), "l2": l2, "mixed": mixed}
    _emit(summary, args.json, [f"l={l}: {v['file']} (L2 {v['l2']:.6g})" for l, v in summary["blocks"].items()])
    return EXIT_OK


def _constants_key(grid: Grid, seed: int, idx: bv.BesovIndex, nu: float, nt: int, T: float) -> str:
    return (f"n={','.join(map(str, grid.n))};L={','.join(f'{v:.12g}' for v in grid.L)};seed={seed};"
            f"sigma={idx.sigma:.12g};p={format_exponent(idx.p)};q={idx.q:g};flavor={idx.flavor};"
            f"nu={nu:g};nt={nt};T={T:.12g}")


def _estimate(grid: Grid, seed: int, idx: bv.BesovIndex, nu: float, T: float, nt: int, size: int,
              out: Path) -> dict:
    cache = out / CONSTANTS_FILE
    key = _constants_key(grid, seed, idx, nu, nt, T)
    table = json.loads(cache.read_text()) if cache.exists() else {}
    if key in table and table[key]["corpus"]["size"] >= size:
        return table[key]
    cfg = SolverConfig(nu=nu, T=T, n_t=nt, idx=idx)
    k_min = min(2 * math.pi / L for L in grid.L)
    spec = FieldSpec(grid, k_min, 1.5 * k_min, solenoidal=True)
    trajs = [heat_trajectory(f, cfg) for f in generate_corpus(seed, spec, 2 * size)]
    est = estimate_bilinear_constant(SemigroupParams(nu), list(zip(trajs[::2], trajs[1::2])), idx,
                                     build_filter_bank(grid), {"seed": seed, "field": spec.describe()})
    entry = {"K_hat": est.K_hat, "epsilon_threshold": est.epsilon_threshold,
             "ratios": est.ratios, "corpus": est.descriptor}
    table[key] = _plain(entry)
    cache.write_text(json.dumps(table, indent=2))
    return table[key]


def cmd_estimate(args) -> int:
    opts = _merged(args, "estimate-constant", {"nu": 1.0, "corpus_size": 3, "n": 16, "d": 3,
                                              "nt": 128, "seed": 0})
    d, n, nu = int(opts["d"]), int(opts["n"]), float(opts["nu"])
    grid = Grid.cube(d, n)
    idx = _index_from(opts, d)
    T = float(opts.get("T") or math.log(1e8) / nu)
    entry = _estimate(grid, int(opts["seed"]), idx, nu, T, int(opts["nt"]), int(opts["corpus_size"]),
                      _out_dir(opts))
    print(json.dumps(_plain(entry), indent=2))
    return EXIT_OK


def cmd_solve(args) -> int:
    opts = _merged(args, "solve", {"nu": 1.0, "nt": 128, "theta": 0.5, "max_iters": 50, "tol": 1e-8,
                                  "oracle": "none", "corpus_size": 3, "seed": 0, "stride": 1})
    u0 = _require_input(opts)
    grid = u0.grid
    nu = float(opts["nu"])
    idx = _index_from(opts, grid.d)
    T = float(opts.get("T") or math.log(1e8) / nu)
    nt = int(opts["nt"])
    out = _out_dir(opts)
    if opts.get("K_hat") is not None:
        K = float(opts["K_hat"])
        K_source = "given"
    else:
        K = _estimate(grid, int(opts["seed"]), idx, nu, T, nt, int(opts["corpus_size"]), out)["K_hat"]
        K_source = "measured"
    cfg = SolverConfig(nu=nu, T=T, n_t=nt, idx=idx, K_hat=K, theta=float(opts["theta"]),
                       max_iters=int(opts["max_iters"]), tol_residual=float(opts["tol"]))
    bank = build_filter_bank(grid)
    result = picard_solve(u0, cfg, bank, project=bool(opts.get("project")))
    sol = result.solution

    sol_dir = out / "solution"
    sol_dir.mkdir(exist_ok=True)
    stride = max(1, int(opts["stride"]))
    for i in range(0, len(sol), stride):
        write_mnf(sol_dir / f"u_{i:05d}.mnf", sol.state(i))

    M = bv.block_time_matrix(sol, bank, idx.p, idx.flavor)
    levels = np.arange(bank.l_min, bank.l_max + 1)
    weights = 2.0 ** (levels[:, None] * idx.sigma) * M
    with open(out / "timeseries.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"block_{l}" for l in levels] + ["z_linf_part", "z_l1_part", "div_residual"])
        for i, t in enumerate(sol.times):
            part = bv.z_norm_from_matrix(M[:, : i + 1], sol.times[: i + 1], bank, idx)
            u = sol.state(i)
            w.writerow([f"{t:.10g}"] + [f"{v:.10g}" for v in weights[:, i]]
                       + [f"{part.linf_part:.10g}", f"{part.l1_part:.10g}", f"{relative_divergence(u):.3e}"])

    bound = result.norm_bound_check()
    report = {
        "K_hat": K, "K_hat_source": K_source, "epsilon": cfg.eps, "index": idx.describe(),
        "iterations": result.iterations, "converged": result.converged,
        "residuals": result.state.residual_history,
        "z0_norm": {"linf_part": result.z0_norm.linf_part, "l1_part": result.z0_norm.l1_part,
                    "total": result.z0_norm.total},
        "u_norm": {"linf_part": result.u_norm.linf_part, "l1_part": result.u_norm.l1_part,
                   "total": result.u_norm.total},
        "within_budget": result.within_budget,
        "norm_bound": bound.as_dict(),
        "max_divergence": trajectory_divergence(sol),
        "seconds": result.seconds,
    }
    if opts.get("oracle") == "rk4":
        ref = rk4_oracle(u0, cfg, project=bool(opts.get("project")))
        report["oracle_linf_l2_relative"] = linf_l2_distance(sol, ref) / max(u0.l2(), 1e-300)
    (out / "solve_report.json").write_text(json.dumps(_plain(report), indent=2))
    _emit(report, args.json, [f"iterations {result.iterations}, converged {result.converged}",
                              f"||u||_Z = {result.u_norm.total:.6g}, ||z0||_Z = {result.z0_norm.total:.6g}",
                              f"outputs in {out}"])
    if not result.converged or (result.within_budget and not bound.holds):
        return EXIT_CHECK
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "norm": cmd_norm, "decompose": cmd_decompose,
            "solve": cmd_solve, "estimate-constant": cmd_estimate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (DivergenceError, StepSizeError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BoundViolation as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (UsageError, MNBesovError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
