"""Command-line entry point ``rgg-spectra``.

Exit status: 0 on success, 1 when a verification check or a requested
assertion fails, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from . import closed_forms as cf
from .errors import RggSpectraError
from .matrix_core import Factorization
from .model import CRITICAL_HIGH, CRITICAL_LOW, SUBCRITICAL, SUPERCRITICAL, ModelParams, RegimeSpec
from .rgg_sim import (
    ExperimentConfig,
    check_difference_convergence,
    check_noise_decomposition,
    compare_band,
    limit_matrix,
    run_experiment,
    torus_covariance,
)
from .serialize import csv_text, dumps, fmt, matrices_csv, write_text
from .spectral_report import BASE_REL, build_dossier, list_checks

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad flags or configuration; mapped to exit status 2."""


# parameter flags ------------------------------------------------------------------


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model parameters")
    g.add_argument("--d", type=int, help="dimension")
    g.add_argument("--taus", help="comma-separated strictly increasing powers")
    g.add_argument("--natural", type=int, metavar="N", help="shorthand for --d 2 --taus 0,1,...,N-1")
    g.add_argument("--volume", type=float, default=1.0, help="window volume V(W) (default 1)")
    g.add_argument(
        "--regime",
        choices=["subcritical", "critical", "critical_low", "critical_high", "supercritical"],
        help="intensity regime",
    )
    g.add_argument("--c", type=float, help="critical constant c > 0 (critical regime)")


def _parse_taus(text: str) -> tuple[float, ...]:
    try:
        taus = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"--taus: cannot parse {text!r} as comma-separated numbers") from None
    if not taus:
        raise UsageError("--taus: no values given")
    return taus


def _regime(args) -> RegimeSpec:
    if args.regime is None:
        raise UsageError("--regime is required")
    if args.regime in ("critical", CRITICAL_LOW, CRITICAL_HIGH):
        if args.c is None:
            raise UsageError("--c is required for the critical regime")
        if not (args.c > 0 and math.isfinite(args.c)):
            raise UsageError(f"--c must be positive, got {args.c}")
        if args.regime == "critical":
            return RegimeSpec.critical(args.c)
        try:
            return RegimeSpec(args.regime, args.c)
        except RggSpectraError as exc:
            raise UsageError(f"--c: {exc}") from None
    if args.c is not None:
        raise UsageError(f"--c only applies to the critical regime, not {args.regime}")
    return RegimeSpec.subcritical() if args.regime == SUBCRITICAL else RegimeSpec.supercritical()


def params_from_args(args) -> ModelParams:
    regime = _regime(args)
    if args.natural is not None:
        if args.taus is not None:
            raise UsageError("--natural and --taus are mutually exclusive")
        if args.d not in (None, 2):
            raise UsageError("--natural fixes --d 2")
        if args.natural < 1:
            raise UsageError("--natural must be >= 1")
        try:
            return ModelParams.natural(args.natural, regime, volume=args.volume)
        except RggSpectraError as exc:
            raise UsageError(f"--volume: {exc}") from None
    if args.taus is None:
        raise UsageError("--taus is required (or --natural N)")
    if args.d is None:
        raise UsageError("--d is required")
    taus = _parse_taus(args.taus)
    try:
        return ModelParams(d=args.d, taus=taus, volume=args.volume, regime=regime)
    except RggSpectraError as exc:
        flag = "--d" if "d must" in str(exc) else "--volume" if "volume" in str(exc) else "--taus"
        raise UsageError(f"{flag}: {exc}") from None


# matrix ------------------------------------------------------------------------------

CRIT = (CRITICAL_LOW, CRITICAL_HIGH)

# operation -> {regime kind: closed-form function}
OPERATIONS: dict[str, dict[str, Callable[[ModelParams], Any]]] = {
    "lu": {SUBCRITICAL: cf.sb_lu, SUPERCRITICAL: cf.sp_lu, **dict.fromkeys(CRIT, cf.cr_lu_natural)},
    "cholesky": {
        SUBCRITICAL: cf.sb_cholesky,
        SUPERCRITICAL: cf.sp_cholesky,
        **dict.fromkeys(CRIT, cf.cr_cholesky_natural),
    },
    "schur": {SUPERCRITICAL: cf.sp_schur},
    "root": {SUPERCRITICAL: cf.sp_root},
    "spectrum": {SUPERCRITICAL: cf.sp_spectrum},
    "inverse": {SUBCRITICAL: cf.sb_inverse, **dict.fromkeys(CRIT, cf.cr_inverse)},
    "det": {SUBCRITICAL: cf.sb_det, **dict.fromkeys(CRIT, cf.cr_det)},
    "det_natural": dict.fromkeys(CRIT, cf.cr_det_natural),
    "charpoly": {SUBCRITICAL: cf.sb_charpoly, **dict.fromkeys(CRIT, cf.cr_charpoly)},
    "bounds": {SUBCRITICAL: cf.sb_eigen_bounds, **dict.fromkeys(CRIT, cf.cr_eigen_bounds)},
    "eigenvalues": {SUBCRITICAL: cf.sb_eigenvalues_2},
    "cross_lu": dict.fromkeys(CRIT, cf.cross_lu_relation),
    "cross_cholesky": dict.fromkeys(CRIT, cf.cross_cholesky_relation),
}


def _absorb(name: str, result, matrices: dict, scalars: dict, residuals: dict) -> None:
    if isinstance(result, Factorization):
        for k, v in result.factors.items():
            if k == "P":
                continue
            matrices[f"{name}.{k}"] = v
        residuals[name] = result.residual
    elif isinstance(result, np.ndarray) and result.ndim == 2:
        matrices[name] = result
    elif isinstance(result, np.ndarray):
        scalars[name] = result.tolist()
    elif isinstance(result, cf.SupercriticalSpectrum):
        scalars["lambda1"] = result.lambda1
        scalars["lambda2"] = result.lambda2
        matrices[f"{name}.basis"] = result.basis
    elif isinstance(result, cf.CriticalBounds):
        scalars["bounds"] = [result.lower, result.upper]
        if result.per_index is not None:
            scalars["per_index_bounds"] = [list(iv) for iv in result.per_index]
            scalars["bounds_oracle_assisted"] = result.oracle_assisted
    elif isinstance(result, cf.RelationReport):
        for k, v in result.residuals.items():
            residuals[f"{name}.{k}"] = v
        scalars.update({f"{name}.{k}": v for k, v in result.scalars.items()})
        scalars[f"{name}.holds"] = result.holds
    elif isinstance(result, tuple):
        scalars[name] = list(result)
    else:
        scalars[name] = result


def cmd_matrix(args) -> int:
    params = params_from_args(args)
    names = [x.strip() for x in (args.factor or "").split(",") if x.strip()]
    for name in names:
        if name not in OPERATIONS:
            raise UsageError(f"--factor: unknown operation {name!r}; choose from {', '.join(OPERATIONS)}")
        if params.regime.kind not in OPERATIONS[name]:
            raise UsageError(f"--factor: {name} is not available in regime {params.regime.kind}")
    bundle = cf.build_sigma(params)
    matrices: dict[str, np.ndarray] = {"sigma": bundle.sigma}
    if args.components:
        matrices["sigma_sb"] = bundle.sigma_sb
        matrices["sigma_sp"] = bundle.sigma_sp
    scalars: dict[str, Any] = {}
    residuals: dict[str, float] = {}
    for name in names:
        try:
            result = OPERATIONS[name][params.regime.kind](params)
        except RggSpectraError as exc:
            raise UsageError(f"--factor {name}: {exc}") from None
        _absorb(name, result, matrices, scalars, residuals)
    if args.format == "json":
        text = dumps(
            {
                "operation": ["build_sigma", *names],
                "params": params.to_dict(),
                "matrices": matrices,
                "scalars": scalars,
                "residuals": residuals,
            }
        )
    else:
        text = matrices_csv(matrices, {**scalars, **{f"residual.{k}": v for k, v in residuals.items()}})
    write_text(text, args.out)
    return EXIT_OK


# verify -----------------------------------------------------------------------------


def _load_json(path: str, flag: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"{flag}: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{flag}: invalid JSON in {path}: {exc}") from None


def _grid(path: str) -> list[ModelParams]:
    data = _load_json(path, "--grid")
    if isinstance(data, dict):
        data = data.get("params", data.get("grid"))
    if not isinstance(data, list) or not data:
        raise UsageError("--grid: expected a non-empty JSON list of parameter objects")
    out = []
    for k, item in enumerate(data):
        try:
            out.append(ModelParams.from_dict(item))
        except (RggSpectraError, KeyError, TypeError) as exc:
            raise UsageError(f"--grid: entry {k}: {exc}") from None
    return out


def cmd_verify(args) -> int:
    if args.list_checks:
        lines = [f"{name:<40} {','.join(regimes):<50} {desc}" for name, regimes, desc in list_checks()]
        write_text("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    if args.rel_tol is not None and not (args.rel_tol > 0 and math.isfinite(args.rel_tol)):
        raise UsageError(f"--rel-tol must be a positive number, got {args.rel_tol}")
    base = BASE_REL if args.rel_tol is None else args.rel_tol
    plist = _grid(args.grid) if args.grid else [params_from_args(args)]
    dossiers = [build_dossier(p, base_rel=base) for p in plist]
    if args.format == "json":
        text = dumps(
            {
                "ok": all(d.ok for d in dossiers),
                "dossiers": [d.to_dict(include_matrices=not args.no_matrices) for d in dossiers],
            }
        )
    else:
        blocks = [d.to_text() for d in dossiers]
        n_bad = sum(not d.ok for d in dossiers)
        blocks.append(f"{len(dossiers)} parameter set(s), {n_bad} with failures")
        text = "\n\n".join(blocks) + "\n"
    write_text(text, args.out)
    return EXIT_OK if all(d.ok for d in dossiers) else EXIT_FAIL


# simulate / convergence --------------------------------------------------------------


def load_config(path: str, seed: int | None) -> ExperimentConfig:
    data = _load_json(path, "--config")
    if not isinstance(data, dict):
        raise UsageError("--config: expected a JSON object")
    try:
        cfg = ExperimentConfig.from_dict(data)
        if seed is not None:
            cfg = cfg.with_seed(seed)
    except (RggSpectraError, TypeError, ValueError) as exc:
        raise UsageError(f"--config: {exc}") from None
    return cfg


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def _simulation_rows(cfg: ExperimentConfig, ests, band: float | None):
    ref = limit_matrix(cfg.params)
    n = cfg.params.n
    header = ["t", "delta"]
    for i, j in _pairs(n):
        header += [f"cov_{i}{j}", f"se_{i}{j}", f"limit_{i}{j}", f"relerr_{i}{j}"]
        if cfg.window.torus:
            header.append(f"finite_t_{i}{j}")
    rows, summary = [], []
    violated = False
    for est in ests:
        cmp = compare_band(est, ref, rel=band if band is not None else 0.15)
        fin = torus_covariance(cfg.params, est.t, est.delta) if cfg.window.torus else None
        row: list[Any] = [est.t, est.delta]
        for i, j in _pairs(n):
            row += [est.cov[i, j], est.se[i, j], ref[i, j], cmp.rel_error[i, j]]
            if fin is not None:
                row.append(fin[i, j])
        rows.append(row)
        entry = {
            "t": est.t,
            "delta": est.delta,
            "R": est.R,
            "cov": est.cov,
            "se": est.se,
            "limit": ref,
            "rel_error": cmp.rel_error,
        }
        if fin is not None:
            entry["finite_t"] = fin
        if band is not None:
            entry["band"] = {"rel": band, "k_se": 3.0, "inside": cmp.inside, "all_inside": cmp.all_inside}
            violated |= not cmp.all_inside
        summary.append(entry)
    return header, rows, summary, violated


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, args.seed)
    if args.check_91 and cfg.params.regime.kind != SUPERCRITICAL:
        raise UsageError(f"--check-91 needs a supercritical config (WrongRegime: {cfg.params.regime.kind})")
    if args.check_91 and cfg.params.n < 2:
        raise UsageError("--check-91 needs at least two powers")
    if args.check_92 and cfg.params.regime.kind == SUPERCRITICAL:
        raise UsageError("--check-92 is undefined for a supercritical config (WrongRegime)")
    if args.check_92 and cfg.params.taus[0] != 0.0:
        raise UsageError("--check-92 needs the power vector to start with 0 (TauVectorShape)")
    if args.band is not None and not (args.band > 0):
        raise UsageError(f"--band must be positive, got {args.band}")
    try:
        ests = run_experiment(cfg, workers=args.workers)
    except RggSpectraError as exc:
        raise UsageError(str(exc)) from None
    header, rows, summary, violated = _simulation_rows(cfg, ests, args.band)
    out: dict[str, Any] = {"config": cfg.to_dict(), "points": summary}
    if args.check_91:
        series = check_difference_convergence(cfg, cfg.params.taus[:2], estimates=ests)
        out["difference_convergence"] = series
        if args.band is not None and not series.strictly_decreasing:
            violated = True
    if args.check_92:
        diags = []
        for tau in cfg.params.taus[1:]:
            for dg in check_noise_decomposition(cfg, tau, estimates=ests):
                item = {**vars(dg), "relative_error": dg.relative_error}
                if args.band is not None:
                    ok = dg.variance_within(args.noise_band) and abs(dg.correlation) < args.corr_max
                    item["inside"] = ok
                    violated |= not ok
                diags.append(item)
        out["noise_decomposition"] = diags
    out["assertions_passed"] = None if args.band is None else not violated
    prefix = args.out
    csv_out = csv_text(header, rows)
    if prefix is None:
        write_text(csv_out if args.format == "csv" else dumps(out), None)
    else:
        write_text(csv_out, f"{prefix}.csv")
        write_text(dumps(out), f"{prefix}.json")
    return EXIT_FAIL if violated else EXIT_OK


def cmd_convergence(args) -> int:
    """Plot-ready long series: one row per schedule point and covariance entry."""
    cfg = load_config(args.config, args.seed)
    if args.difference is not None and cfg.params.regime.kind != SUPERCRITICAL:
        raise UsageError("--difference needs a supercritical config (WrongRegime)")
    try:
        ests = run_experiment(cfg, workers=args.workers)
    except RggSpectraError as exc:
        raise UsageError(str(exc)) from None
    ref = limit_matrix(cfg.params)
    rows = []
    for est in ests:
        fin = torus_covariance(cfg.params, est.t, est.delta) if cfg.window.torus else None
        for i, j in _pairs(cfg.params.n):
            rows.append(
                [
                    est.t,
                    est.delta,
                    i,
                    j,
                    float(est.cov[i, j]),
                    float(est.se[i, j]),
                    float(ref[i, j]),
                    float(abs(est.cov[i, j] - ref[i, j])),
                    float("nan") if fin is None else float(fin[i, j]),
                ]
            )
    text = csv_text(["t", "delta", "i", "j", "empirical", "se", "limit", "abs_error", "finite_t"], rows)
    if args.difference is not None:
        pair = _parse_taus(args.difference)
        if len(pair) != 2:
            raise UsageError("--difference expects two powers, e.g. 0,1")
        try:
            series = check_difference_convergence(cfg, pair, estimates=ests)
        except RggSpectraError as exc:
            raise UsageError(f"--difference: {exc}") from None
        drows = [
            [t, v, s, th if k < len(series.theory) else float("nan")]
            for k, (t, v, s, th) in enumerate(
                zip(series.ts, series.variance, series.se, series.theory or [float("nan")] * len(series.ts))
            )
        ]
        text += "\n" + csv_text(["t", "var_D", "se", "finite_t_var_D"], drows)
        text += f"# slope,{fmt(series.slope)}\n"
    write_text(text, args.out)
    return EXIT_OK


def cmd_version(args) -> int:
    write_text(f"rgg-spectra {__version__}\n", None)
    return EXIT_OK


# parser --------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 2 with the offending flag named by argparse
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rgg-spectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("matrix", help="covariance matrix and closed-form decompositions")
    _add_param_flags(p)
    p.add_argument("--factor", help=f"comma-separated operations: {', '.join(OPERATIONS)}")
    p.add_argument("--components", action="store_true", help="also emit sigma_sb and sigma_sp")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("verify", help="closed forms against the numeric oracles")
    _add_param_flags(p)
    p.add_argument("--grid", help="JSON file with a list of parameter objects")
    p.add_argument("--rel-tol", type=float, help=f"base relative tolerance (default {BASE_REL:g})")
    p.add_argument("--list-checks", action="store_true", help="list registered checks and exit")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--no-matrices", action="store_true", help="omit matrices from JSON output")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_verify)

    for name, func, helptext in (
        ("simulate", cmd_simulate, "Monte Carlo covariance estimates"),
        ("convergence", cmd_convergence, "plot-ready convergence series"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="experiment configuration (JSON)")
        p.add_argument("--seed", type=int, help="override base_seed")
        p.add_argument("--workers", type=int, help="replication threads (default RGG_SPECTRA_THREADS or CPU count)")
        p.add_argument("--out", help="output file (convergence) or prefix for .csv/.json (simulate)")
        p.set_defaults(func=func)
        if name == "simulate":
            p.add_argument("--format", choices=["csv", "json"], default="json", help="stdout format without --out")
            p.add_argument("--band", type=float, help="assert |emp - limit| <= max(band |limit|, 3 SE); exit 1 if not")
            p.add_argument("--noise-band", type=float, default=0.20, help="relative band for --check-92 variance")
            p.add_argument("--corr-max", type=float, default=0.10, help="correlation bound for --check-92")
            p.add_argument("--check-91", action="store_true", help="variance of the weighted difference")
            p.add_argument("--check-92", action="store_true", help="noise decomposition residual")
        else:
            p.add_argument("--difference", help="two powers for the difference series, e.g. 0,1")

    p = sub.add_parser("version", help="print the version")
    p.set_defaults(func=cmd_version)
    return parser


def _glue_values(argv: list[str]) -> list[str]:
    """Turn ``--taus -1,0`` into ``--taus=-1,0``; argparse would read the value as a flag."""
    out: list[str] = []
    k = 0
    while k < len(argv):
        if argv[k] in ("--taus", "--difference") and k + 1 < len(argv) and argv[k + 1].startswith("-"):
            out.append(f"{argv[k]}={argv[k + 1]}")
            k += 2
            continue
        out.append(argv[k])
        k += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_values(argv))
        if getattr(args, "workers", None) is not None and args.workers < 1:
            parser.error("--workers must be >= 1")
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"rgg-spectra {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except RggSpectraError as exc:
        sys.stderr.write(f"rgg-spectra {args.command}: error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
