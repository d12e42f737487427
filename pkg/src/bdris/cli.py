"""Batch command-line front end.

Subcommands:

  sweep     run the element-count sweep and write records.csv,
            aggregates.csv, manifest.json, and sweep.svg to a directory
  validate  run the invariant battery and print a pass/fail table
  table1    print the architecture/mode characteristics table

Exit codes: 0 success, 1 invariant failure, 2 bad input, 3 I/O failure.
The environment variable ``BDRIS_SEED`` overrides the configured base
seed; an explicit ``--seed`` flag overrides both.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import ConfigError, config_to_dict, load_config_file, resolve_config
from .scattering import Architecture, Mode, RisConfig, hardware_complexity, nonzero_count
from .scenario import AggregateRow, SweepRecord, run_sweep
from .validation import run_validation

RECORDS_HEADER = ("scheme", "n", "trial", "seed", "se_bits_per_hz", "p_v_watts",
                  "converged", "iterations")
AGGREGATES_HEADER = ("scheme", "n", "trials", "se_mean_bits_per_hz",
                     "se_stderr_bits_per_hz", "p_v_mean_watts", "converged_rate",
                     "iterations_mean")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records_csv(records: list[SweepRecord], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORDS_HEADER)
        for r in records:
            writer.writerow(
                [r.scheme, r.n, r.trial, r.seed, _fmt(r.se), _fmt(r.p_v_opt),
                 _fmt(r.converged), r.iterations]
            )


def write_aggregates_csv(rows: list[AggregateRow], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGGREGATES_HEADER)
        for a in rows:
            writer.writerow(
                [a.scheme, a.n, a.trials, _fmt(a.se_mean), _fmt(a.se_stderr),
                 _fmt(a.p_v_mean), _fmt(a.converged_rate), _fmt(a.iterations_mean)]
            )


def _resolve_base_seed(flag_seed: int | None, config_seed: int) -> int:
    # precedence: flag > environment > configuration file
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get("BDRIS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"BDRIS_SEED must be an integer, got {env!r}") from None
    return config_seed


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        cfg = load_config_file(args.config) if args.config else resolve_config({})
        overrides = {"base_seed": _resolve_base_seed(args.seed, cfg.base_seed)}
        if args.trials is not None:
            overrides["trials"] = args.trials
        cfg = replace(cfg, **overrides)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    records, aggregates = run_sweep(cfg, workers=args.threads)

    manifest = {
        "tool": "bdris",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config_path": args.config,
        "base_seed": cfg.base_seed,
        "config": config_to_dict(cfg),
    }
    try:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_records_csv(records, out / "records.csv")
        write_aggregates_csv(aggregates, out / "aggregates.csv")
        with open(out / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        from .plotting import render_sweep_figure  # defer pulling in matplotlib

        render_sweep_figure(aggregates, str(out / "sweep.svg"))
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return 3

    print(f"wrote {len(records)} records for {len(aggregates)} (scheme, N) cells to {out}")
    for row in aggregates:
        print(
            f"  {row.scheme:<17s} N={row.n:<3d} mean SE {row.se_mean:.6g} "
            f"+- {row.se_stderr:.2g} bits/s/Hz"
        )
    return 0


def characteristics_rows(
    n_list: list[int], g_list: list[int], sectors: int
) -> list[dict]:
    """Architecture/mode characteristics for the requested sizes."""
    rows = []
    for n in n_list:
        entries = [
            ("single_connected", RisConfig(Architecture.SINGLE_CONNECTED, Mode.REFLECTIVE, n)),
            ("fully_connected", RisConfig(Architecture.FULLY_CONNECTED, Mode.REFLECTIVE, n)),
        ]
        for g in g_list:
            entries.append(
                (
                    "group_connected",
                    RisConfig(Architecture.GROUP_CONNECTED, Mode.REFLECTIVE, n, n_groups=g),
                )
            )
        for name, base in entries:
            def complexity(mode: Mode) -> int:
                kwargs = {"n_sectors": sectors} if mode is Mode.MULTI_SECTOR else {}
                return hardware_complexity(
                    RisConfig(base.architecture, mode, n, n_groups=base.n_groups, **kwargs)
                )

            rows.append(
                {
                    "n": n,
                    "architecture": name,
                    "groups": base.group_count,
                    "group_dim": base.group_dim,
                    "elements_per_group": base.group_dim**2,
                    "nonzeros": nonzero_count(base),
                    "complexity_reflective": complexity(Mode.REFLECTIVE),
                    "complexity_transmissive": complexity(Mode.TRANSMISSIVE),
                    "complexity_hybrid": complexity(Mode.HYBRID),
                    f"complexity_multi_sector_s{sectors}": complexity(Mode.MULTI_SECTOR),
                }
            )
    return rows


def _print_table(rows: list[dict]) -> None:
    headers = list(rows[0])
    widths = [max(len(h), max(len(str(r[h])) for r in rows)) for h in headers]
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    for r in rows:
        print("  ".join(str(r[h]).ljust(w) for h, w in zip(headers, widths)))


def _int_list(text: str, what: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError(f"--{what} expects comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise ConfigError(f"--{what} expects positive integers, got {text!r}")
    return values


def cmd_table1(args: argparse.Namespace) -> int:
    try:
        n_list = _int_list(args.n, "n")
        g_list = _int_list(args.g, "g")
        if args.sectors < 2:
            raise ConfigError("--sectors must be at least 2")
        for n in n_list:
            for g in g_list:
                if n % g:
                    raise ConfigError(f"group count {g} does not divide N={n}")
        rows = characteristics_rows(n_list, g_list, args.sectors)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _print_table(rows)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(list(rows[0]))
                for r in rows:
                    writer.writerow(list(r.values()))
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 3
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    results = run_validation(quick=args.quick)
    width = max(len(r.name) for r in results)
    failures = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name.ljust(width)}  {status}  {r.detail}")
    print()
    print("hardware complexity, N in {16,32,64} x G in {2,4,8}, S=3:")
    _print_table(characteristics_rows([16, 32, 64], [2, 4, 8], sectors=3))
    if failures:
        print(f"\n{len(failures)} invariant(s) failed: "
              + ", ".join(r.name for r in failures), file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bdris",
        description="BD-RIS link-level simulator and beamforming optimizer",
    )
    parser.add_argument("--version", action="version", version=f"bdris {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run the element-count sweep")
    sweep.add_argument("--config", help="JSON configuration (or manifest) file")
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.add_argument("--trials", type=int, help="override the trial count")
    sweep.add_argument("--seed", type=int, help="override the base seed")
    sweep.add_argument("--threads", type=int, default=1, help="worker processes")
    sweep.set_defaults(func=cmd_sweep)

    val = sub.add_parser("validate", help="run the invariant battery")
    val.add_argument("--quick", action="store_true", help="reduced draw counts")
    val.set_defaults(func=cmd_validate)

    tab = sub.add_parser("table1", help="print architecture characteristics")
    tab.add_argument("--n", required=True, help="comma-separated element counts")
    tab.add_argument("--g", required=True, help="comma-separated group counts")
    tab.add_argument("--sectors", type=int, default=3, help="sector count for multi-sector")
    tab.add_argument("--out", help="also write the table as CSV")
    tab.set_defaults(func=cmd_table1)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
