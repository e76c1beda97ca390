"""Command-line entry point.

    service-economy run      --config PATH --seed U64 --out DIR [--svg] [--mode fixed|market]
    service-economy ensemble --config PATH --seeds N --base-seed U64 --out DIR [--workers K]
    service-economy sweep    --config PATH --param NAME --values V1,V2,... --seeds N
                             --base-seed U64 --out DIR [--workers K]

Exit status: 0 on success, 1 for configuration errors, 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import ConfigError, _eval_value, canonical_key, coerce, load_config
from .engine import run_simulation
from .harness import derive_seeds, run_ensemble, sweep
from .model import SimParams, ValidationError
from .report import (
    write_accounts_csv,
    write_runs_csv,
    write_summary_csv,
    write_sweep_csv,
    write_weeks_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="service-economy",
        description="Random-transaction service economy simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, help="parameter file (JSON or key = value lines)")
        p.add_argument("--out", type=Path, required=True, help="output directory")

    run = sub.add_parser("run", help="one simulation run")
    common(run)
    run.add_argument("--seed", type=_u64, required=True)
    run.add_argument("--svg", action="store_true", help="also write the five SVG figures")
    run.add_argument("--mode", choices=["fixed", "market"], help="override price_mode")

    ens = sub.add_parser("ensemble", help="Monte Carlo ensemble over seeds")
    common(ens)
    ens.add_argument("--seeds", type=_positive, required=True, help="number of runs")
    ens.add_argument("--base-seed", type=_u64, default=0)
    ens.add_argument("--workers", type=int, default=None)

    sw = sub.add_parser("sweep", help="ensemble at each value of one parameter")
    common(sw)
    sw.add_argument("--param", required=True)
    sw.add_argument("--values", required=True, help="comma-separated values")
    sw.add_argument("--seeds", type=_positive, required=True, help="runs per value")
    sw.add_argument("--base-seed", type=_u64, default=0)
    sw.add_argument("--workers", type=int, default=None)
    return parser


def _load(path: Optional[Path]) -> SimParams:
    if path is None:
        return SimParams()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return load_config(text)


def _write(out: Path, name: str, text: str) -> None:
    (out / name).write_text(text, encoding="utf-8", newline="")


def _metadata(params: SimParams, **extra) -> str:
    meta = {"version": __version__, "params": dataclasses.asdict(params), **extra}
    return json.dumps(meta, indent=2) + "\n"


def _parse_grid(param: str, values: str) -> tuple[str, list]:
    key = canonical_key(param)
    parsed = []
    for raw in values.split(","):
        raw = raw.strip()
        if not raw:
            raise ConfigError(f"empty value in --values {values!r}")
        parsed.append(coerce(key, _eval_value(raw)))
    return key, parsed


def cmd_run(args: argparse.Namespace) -> None:
    params = _load(args.config)
    if args.mode:
        params = params.replace(price_mode=args.mode)
    result = run_simulation(params, args.seed)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    _write(out, "weeks.csv", write_weeks_csv(result))
    _write(out, "accounts.csv", write_accounts_csv(result))
    files = ["weeks.csv", "accounts.csv"]
    if args.svg:
        from .plotting import write_figures

        files += [p.name for p in write_figures(result, out)]
    summary = {
        "average_weekly_sales": result.average_weekly_sales,
        "average_bank_account": result.average_bank_account,
        "defaults": len(result.defaults),
    }
    _write(out, "metadata.json", _metadata(params, seed=args.seed, summary=summary, files=files))
    print(f"seed {args.seed}: average weekly sales {result.average_weekly_sales:.4f}")


def cmd_ensemble(args: argparse.Namespace) -> None:
    params = _load(args.config).validate()
    seeds = derive_seeds(args.base_seed, args.seeds)
    summary = run_ensemble(params, seeds, workers=args.workers)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    _write(out, "ensemble_runs.csv", write_runs_csv(summary))
    _write(out, "ensemble_summary.csv", write_summary_csv(summary))
    _write(out, "metadata.json", _metadata(params, base_seed=args.base_seed, seeds=seeds))
    print(
        f"{len(seeds)} runs: mean weekly sales {summary.mean_sales:.4f} "
        f"[p01 {summary.p01_sales:.4f}, p99 {summary.p99_sales:.4f}]"
    )


def cmd_sweep(args: argparse.Namespace) -> None:
    params = _load(args.config)
    key, values = _parse_grid(args.param, args.values)
    table = sweep(params, [{key: v} for v in values], args.seeds, args.base_seed, args.workers)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    _write(out, "sweep.csv", write_sweep_csv(table))
    seeds = {str(i): derive_seeds(args.base_seed, args.seeds, i) for i in range(len(values))}
    _write(
        out,
        "metadata.json",
        _metadata(params, param=key, values=values, base_seed=args.base_seed, seeds=seeds),
    )
    for row in table.rows:
        print(f"{key}={row.point[key]}: mean weekly sales {row.summary.mean_sales:.4f}")


COMMANDS = {"run": cmd_run, "ensemble": cmd_ensemble, "sweep": cmd_sweep}


def _join_values(argv: Sequence[str]) -> list[str]:
    # "--values -5,-15" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--values":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--values={nxt}")
        else:
            out.append(tok)
    return out


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parser.parse_args(_join_values(argv))
    except SystemExit as exc:
        # argparse exits 2 on usage errors; bad flags are configuration errors here
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        COMMANDS[args.command](args)
    except (ConfigError, ValidationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main() -> None:
    sys.exit(cli_main())
