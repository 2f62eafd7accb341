"""Command-line front end: ranks, decompose, summaries, cv, simulate.

Every command writes its outputs atomically (temp file + rename) into the
--out directory together with a ``run_manifest.json`` that echoes all
resolved parameters.  Re-running a command with ``--config
run_manifest.json`` reproduces the outputs byte-identically: the manifest
stores the resolved bandwidths, so even a CV-selected run replays without
re-selection.

Exit codes: 0 success, 2 usage errors, 1 data or validation errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import svgplot
from .bandwidth import BandwidthGrid, CvReport, select_bandwidths
from .dynamics import contributions, decompose
from .errors import DataError, DomainError
from .kernels import get_kernel
from .ranks import Bandwidths, default_bandwidths, empirical_ranks, smooth_ranks
from .sample import (
    default_presmooth_bandwidth,
    load_long_csv,
    load_wide_csv,
    presmooth,
)
from .simulation import SimModel, run_monte_carlo
from .summaries import population_summaries, subject_summaries

__all__ = ["main"]


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    return repr(float(x))


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


@dataclass
class RunConfig:
    """Fully resolved parameters of one CLI run; serialized as the manifest."""

    command: str
    input: str | None = None
    out: str = "."
    wide: bool = False
    kernel: str = "epanechnikov"
    h_y: float | None = None
    h_t: float | None = None
    h_d: float | None = None
    cv_grid: str | None = None
    eval_points: int = 101
    trim: str = "auto"
    method: str = "both"
    seed: int = 0
    runs: int = 100
    n: str = "20,50,200"
    m: int = 31
    svg: bool = False
    threads: int = 1


_DEFAULTS = RunConfig(command="")


def _merge_config(args: argparse.Namespace) -> RunConfig:
    config_values = {}
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            config_values = json.load(fh)
        if not isinstance(config_values, dict):
            raise DataError(f"config file {args.config!r} must hold a JSON object")
    cfg = RunConfig(command=args.command)
    for name in vars(cfg):
        if name == "command":
            continue
        cli_val = getattr(args, name, None)
        if cli_val is not None:
            setattr(cfg, name, cli_val)
        elif name in config_values and config_values[name] is not None:
            setattr(cfg, name, config_values[name])
        else:
            setattr(cfg, name, getattr(_DEFAULTS, name))
    return cfg


def _load_sample(cfg: RunConfig):
    if cfg.input is None:
        raise UsageError("--input is required for this command")
    if not Path(cfg.input).exists():
        raise DataError(f"input file not found: {cfg.input}")
    loader = load_wide_csv if cfg.wide else load_long_csv
    return loader(cfg.input)


def _parse_grid(spec: str, sample) -> BandwidthGrid:
    spec = spec.strip()
    if spec == "default":
        return BandwidthGrid.scaled_default(sample)
    if "x" in spec and ":" not in spec:
        a, _, b = spec.partition("x")
        if a == b and a.isdigit():
            return BandwidthGrid.scaled_default(sample, steps=int(a))
        raise UsageError(f"--cv-grid {spec!r}: only square grids 'KxK' are supported")
    pairs = []
    for item in spec.split(","):
        hy, sep, ht = item.partition(":")
        if not sep:
            raise UsageError(
                f"--cv-grid {spec!r}: expected 'default', 'KxK' or 'hY:hT,hY:hT,...'"
            )
        pairs.append(Bandwidths(float(hy), float(ht)))
    return BandwidthGrid(pairs)


def _resolve_bandwidths(cfg: RunConfig, sample) -> tuple[Bandwidths, CvReport | None]:
    has_pair = cfg.h_y is not None or cfg.h_t is not None
    if has_pair and cfg.cv_grid is not None:
        raise UsageError("--h-y/--h-t and --cv-grid are mutually exclusive")
    if has_pair:
        if cfg.h_y is None or cfg.h_t is None:
            raise UsageError("--h-y and --h-t must be given together")
        return Bandwidths(float(cfg.h_y), float(cfg.h_t)), None
    if cfg.cv_grid is not None:
        report = select_bandwidths(sample, _parse_grid(cfg.cv_grid, sample), kernel=get_kernel(cfg.kernel))
        return report.chosen, report
    return default_bandwidths(sample), None


def _resolve_trim(cfg: RunConfig, bw: Bandwidths) -> float:
    if str(cfg.trim).strip().lower() == "auto":
        return bw.h_t
    trim = float(cfg.trim)
    if not 0 < trim < 0.5:
        raise DomainError(f"--trim must lie in (0, 0.5), got {trim!r}")
    return trim


def _pipeline(cfg: RunConfig, need_bandwidths: bool = True):
    """Shared front half: load, presmooth, resolve bandwidths."""
    sample = _load_sample(cfg)
    kern = get_kernel(cfg.kernel)
    h_d = cfg.h_d if cfg.h_d is not None else default_presmooth_bandwidth(sample)
    smoothed = presmooth(sample, h_d=h_d, eval_grid_size=int(cfg.eval_points), kernel=kern)
    cfg.h_d = float(h_d)
    if not need_bandwidths:
        return sample, smoothed, kern, None, None
    bw, report = _resolve_bandwidths(cfg, sample)
    cfg.h_y, cfg.h_t = bw.h_y, bw.h_t
    return sample, smoothed, kern, bw, report


def _manifest(cfg: RunConfig, outdir: Path) -> None:
    _write_json(outdir / "run_manifest.json", asdict(cfg))


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _rank_rows(rk):
    for i, sid in enumerate(rk.ids):
        for g, t in enumerate(rk.eval_grid):
            yield [sid, _fmt(t), _fmt(min(1.0, max(0.0, rk.ranks[i, g]))), rk.method]


def _cmd_ranks(cfg: RunConfig) -> int:
    if cfg.method not in ("both", "empirical", "smooth"):
        raise UsageError(f"--method must be 'empirical', 'smooth' or 'both', got {cfg.method!r}")
    sample, smoothed, kern, bw, _ = _pipeline(cfg, need_bandwidths=cfg.method != "empirical")
    out = _outdir(cfg)
    sets = []
    if cfg.method in ("both", "empirical"):
        sets.append(empirical_ranks(smoothed))
    if cfg.method in ("both", "smooth"):
        sets.append(smooth_ranks(smoothed, bw, kernel=kern))
    rows = [row for rk in sets for row in _rank_rows(rk)]
    _write_csv(out / "ranks.csv", ["id", "t", "rank", "method"], rows)
    if cfg.svg:
        rk = sets[-1]
        svgplot.line_chart(
            out / "rank_trajectories.svg",
            rk.eval_grid,
            list(rk.ranks),
            title=f"{rk.method} rank trajectories",
            y_label="rank",
        )
    _manifest(cfg, out)
    return 0


def _cmd_decompose(cfg: RunConfig) -> int:
    sample, smoothed, kern, bw, _ = _pipeline(cfg)
    trim = _resolve_trim(cfg, bw)
    cfg.trim = repr(trim)
    dec = decompose(sample, smoothed, bw, trim=trim, kernel=kern)
    out = _outdir(cfg)
    rows = []
    for i, sid in enumerate(dec.ids):
        for g, t in enumerate(dec.trimmed_grid):
            rows.append(
                [sid, _fmt(t), _fmt(dec.c1[i, g]), _fmt(dec.c2[i, g]), _fmt(dec.rprime[i, g])]
            )
    _write_csv(out / "decomposition.csv", ["id", "t", "c1", "c2", "rprime"], rows)
    lam = contributions(dec)
    _write_json(out / "contributions.json", {"lambda1": lam.lambda1, "lambda2": lam.lambda2})
    if cfg.svg:
        svgplot.line_chart(
            out / "components.svg",
            dec.trimmed_grid,
            [dec.c1.mean(axis=0), dec.c2.mean(axis=0)],
            labels=["population C1 (mean)", "individual C2 (mean)"],
            title="rank derivative components",
        )
    _manifest(cfg, out)
    return 0


def _cmd_summaries(cfg: RunConfig) -> int:
    sample, smoothed, kern, bw, _ = _pipeline(cfg)
    trim = _resolve_trim(cfg, bw)
    cfg.trim = repr(trim)
    dec = decompose(sample, smoothed, bw, trim=trim, kernel=kern)
    rks = smooth_ranks(smoothed, bw, kernel=kern)
    subs = subject_summaries(rks, dec)
    pop = population_summaries(dec)
    out = _outdir(cfg)
    rows = [[s.id, _fmt(s.rho), _fmt(s.nu), _fmt(s.zeta), _fmt(s.eta)] for s in subs]
    _write_csv(out / "subject_summaries.csv", ["id", "rho", "nu", "zeta", "eta"], rows)
    _write_json(out / "population.json", pop.to_json_dict())
    if cfg.svg:
        svgplot.line_chart(
            out / "gamma.svg",
            dec.trimmed_grid,
            [pop.gamma],
            labels=["gamma(t)"],
            title="rank instability",
            y_label="gamma",
        )
    _manifest(cfg, out)
    return 0


def _cmd_cv(cfg: RunConfig) -> int:
    sample = _load_sample(cfg)
    kern = get_kernel(cfg.kernel)
    grid = _parse_grid(cfg.cv_grid if cfg.cv_grid is not None else "default", sample)
    report = select_bandwidths(sample, grid, kernel=kern)
    out = _outdir(cfg)
    rows = [[_fmt(e.bw.h_y), _fmt(e.bw.h_t), _fmt(e.value)] for e in report.entries]
    _write_csv(out / "cv_report.csv", ["h_y", "h_t", "cv_value"], rows)
    _write_json(out / "chosen.json", {"h_y": report.chosen.h_y, "h_t": report.chosen.h_t})
    cfg.h_y, cfg.h_t = report.chosen.h_y, report.chosen.h_t
    _manifest(cfg, out)
    return 0


def _cmd_simulate(cfg: RunConfig) -> int:
    try:
        n_list = [int(v) for v in str(cfg.n).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--n must be a comma list of integers, got {cfg.n!r}")
    if not n_list:
        raise UsageError("--n must name at least one sample size")
    model = SimModel(m=int(cfg.m))
    spec = (cfg.cv_grid or "default").strip()
    if spec == "default":
        grid = BandwidthGrid.geometric()
    elif "x" in spec and ":" not in spec:
        a, _, b = spec.partition("x")
        if a != b or not a.isdigit():
            raise UsageError(f"--cv-grid {spec!r}: only square grids 'KxK' are supported")
        grid = BandwidthGrid.geometric(steps=int(a))  # literal, model-scale values
    else:
        grid = _parse_grid(spec, None)  # explicit pairs need no sample scale
    report = run_monte_carlo(
        model,
        n_list,
        runs=int(cfg.runs),
        grid=grid,
        base_seed=int(cfg.seed),
        kernel=get_kernel(cfg.kernel),
        eval_points=int(cfg.eval_points),
        h_d=cfg.h_d,
        workers=int(cfg.threads),
    )
    out = _outdir(cfg)
    rows = [
        [
            str(r.run), str(r.n),
            _fmt(r.h_y_cv), _fmt(r.h_t_cv), _fmt(r.h_y_opt), _fmt(r.h_t_opt),
            _fmt(r.mise_c1_cv), _fmt(r.mise_c2_cv), _fmt(r.mise_c1_opt), _fmt(r.mise_c2_opt),
        ]
        for r in report.rows
    ]
    _write_csv(
        out / "report.csv",
        ["run", "n", "h_y_cv", "h_t_cv", "h_y_opt", "h_t_opt",
         "mise_c1_cv", "mise_c2_cv", "mise_c1_opt", "mise_c2_opt"],
        rows,
    )
    err_rows = [
        [str(r.run), str(r.n), _fmt(r.err_rho), _fmt(r.err_nu), _fmt(r.err_zeta)]
        for r in report.rows
    ]
    _write_csv(out / "summary_errors.csv", ["run", "n", "err_rho", "err_nu", "err_zeta"], err_rows)
    if cfg.svg:
        for label, key in [("cv", lambda r: r.mise_c1_cv + r.mise_c2_cv),
                           ("opt", lambda r: r.mise_c1_opt + r.mise_c2_opt)]:
            series = [sorted(key(r) for r in report.rows if r.n == n) for n in n_list]
            svgplot.line_chart(
                out / f"mise_{label}.svg",
                np.arange(1, 1 + max(len(s) for s in series)),
                [np.array(s) for s in series],
                labels=[f"n={n}" for n in n_list],
                title=f"sorted total MISE at the {label} pick",
                x_label="run (sorted)",
                y_label="MISE",
            )
    _manifest(cfg, out)
    return 0


_COMMANDS = {
    "ranks": _cmd_ranks,
    "decompose": _cmd_decompose,
    "summaries": _cmd_summaries,
    "cv": _cmd_cv,
    "simulate": _cmd_simulate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankdyn",
        description="Rank trajectories and rank-derivative decomposition for functional data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "ranks": "estimate empirical and smooth rank trajectories",
        "decompose": "estimate the C1/C2 decomposition of rank derivatives",
        "summaries": "subject and population rank summary statistics",
        "cv": "bandwidth selection by leave-one-out cross-validation",
        "simulate": "Monte Carlo benchmark against the closed-form model",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", help="input CSV (long format id,time,value)")
        p.add_argument("--wide", action="store_true", default=None,
                       help="input is wide format: time,id1,id2,...")
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--kernel", choices=["epanechnikov", "biweight"],
                       help="smoothing kernel (default epanechnikov)")
        p.add_argument("--h-y", dest="h_y", type=float, help="value-direction bandwidth")
        p.add_argument("--h-t", dest="h_t", type=float, help="time-direction bandwidth")
        p.add_argument("--h-d", dest="h_d", type=float, help="presmoothing bandwidth")
        p.add_argument("--cv-grid", dest="cv_grid",
                       help="bandwidth grid: 'default', 'KxK', or 'hY:hT,hY:hT,...'")
        p.add_argument("--eval-points", dest="eval_points", type=int,
                       help="size of the uniform evaluation grid (default 101)")
        p.add_argument("--trim", help="boundary trim: 'auto' (= h_t) or a number")
        p.add_argument("--method", choices=["both", "empirical", "smooth"],
                       help="rank method(s) for the ranks command")
        p.add_argument("--seed", type=int, help="base seed (simulate)")
        p.add_argument("--runs", type=int, help="Monte Carlo runs (simulate)")
        p.add_argument("--n", help="comma list of sample sizes (simulate)")
        p.add_argument("--m", type=int, help="observation grid parameter (simulate)")
        p.add_argument("--svg", action="store_true", default=None, help="emit SVG figures")
        p.add_argument("--threads", type=int, help="worker cap for parallel sections")
        p.add_argument("--config", help="JSON config file (flags override it)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _merge_config(args)
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
