"""Command-line entry points.

Subcommands:
    morph       baseline weather + shift file + model class -> future weather
    simulate    weather + archetype -> annual result CSV (optional trace)
    components  load attribution rows for one or all element orderings
    study       full city x period x scenario x class matrix
    validate    parse-only check of a study configuration

Exit codes: 0 success, 1 validation/configuration failure, 2 a study
completed but some runs failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import morph as morphing
from . import solar
from .components import (BREAKDOWN_CSV_HEADER, DEFAULT_ORDERING,
                         attribute_all_orderings, attribute_loads,
                         breakdown_csv_row, ordering_label, ordering_spread)
from .errors import ConfigError, RoomclimError
from .study import (archetype_from_dict, load_study_config, prepare_study,
                    run_study)
from .weather import Location, parse_weather, write_weather
from .zone import (RESULT_CSV_HEADER, TRACE_CSV_HEADER, result_csv_row,
                   simulate_year, SUBSTEP_SECONDS)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARTIAL = 2


def _add_weather_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--weather", required=True,
                        help="baseline weather file (EPW or CSV)")
    parser.add_argument("--format", choices=("epw", "csv"), default="epw",
                        help="weather file format (default epw)")
    parser.add_argument("--name", default=None,
                        help="site name override")
    parser.add_argument("--lat", type=float, default=None,
                        help="site latitude in degrees north (CSV input)")
    parser.add_argument("--lon", type=float, default=None,
                        help="site longitude in degrees east (CSV input)")
    parser.add_argument("--tz", type=float, default=None,
                        help="site timezone in hours east of UTC (CSV input)")


def _load_weather(args):
    override = None
    if args.lat is not None or args.lon is not None or args.name is not None:
        override = Location(args.name or "site", args.lat or 0.0,
                            args.lon or 0.0, args.tz or 0.0)
    year = parse_weather(args.weather, args.format, location=override)
    if override is not None:
        year.location = override
    return year


def _load_archetype(path):
    """Archetype overrides from a JSON file; an 'orientation' pair rotates
    the two exterior walls."""
    if path is None:
        return archetype_from_dict({})
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read archetype config {path}: {exc}") \
            from None
    orientation = data.pop("orientation", None)
    archetype = archetype_from_dict(data)
    if orientation is not None:
        archetype = archetype.with_orientation(tuple(orientation))
    return archetype


def _cmd_morph(args) -> int:
    year = _load_weather(args)
    tables = []
    for path in args.shifts:
        tables.extend(morphing.read_shift_tables(path))
    tables = [t for t in tables
              if t.scenario == args.scenario and t.period == args.period]
    if len(tables) < 2:
        print(f"error: need at least 2 model tables for {args.scenario} "
              f"{args.period}, found {len(tables)}", file=sys.stderr)
        return EXIT_INVALID
    loc = year.location
    shift_sets = [morphing.table_at_location(t, loc.latitude, loc.longitude)
                  for t in tables]
    classes = morphing.build_model_classes(shift_sets)
    result = morphing.morph_year(year, classes[args.model])
    write_weather(result.year, args.out, fmt=args.format)
    print(f"wrote {args.out} ({args.scenario} {args.period} {args.model}, "
          f"{result.clamped_hours} hours clamped to saturation)")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    year = solar.resplit_year(_load_weather(args))
    archetype = _load_archetype(args.config)
    result = simulate_year(archetype, year, dt=args.substep, trace=args.trace)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    row = result_csv_row(result, year.location.name, "baseline", "-", "-")
    (out_dir / "results.csv").write_text(
        RESULT_CSV_HEADER + "\n" + row + "\n", encoding="utf-8")
    if args.trace:
        lines = [TRACE_CSV_HEADER]
        for r in result.trace:
            lines.append(f"{r[0]},{r[1]},{r[2]},{r[3]:.4f},{r[4]:.7f},"
                         f"{r[5]:.2f},{r[6]:.2f},{r[7]:.2f},{r[8]:.2f},{r[9]}")
        (out_dir / "trace.csv").write_text("\n".join(lines) + "\n",
                                           encoding="utf-8")
    print(f"{year.location.name}: heating {result.heating_kwh:.1f} kWh, "
          f"cooling {result.cooling_total_kwh:.1f} kWh "
          f"(sensible {result.cooling_sensible_kwh:.1f} / latent "
          f"{result.cooling_latent_kwh:.1f}), usage {result.usage_hours} h")
    print(f"wrote {out_dir / 'results.csv'}")
    return EXIT_OK


def _cmd_components(args) -> int:
    year = solar.resplit_year(_load_weather(args))
    archetype = _load_archetype(args.config)
    city = year.location.name
    modes = ("heating", "cooling") if args.mode == "both" else (args.mode,)
    lines = [BREAKDOWN_CSV_HEADER]
    if args.ordering == "all":
        for mode in modes:
            breakdowns = attribute_all_orderings(archetype, year, mode,
                                                 dt=args.substep)
            for b in breakdowns:
                lines.append(breakdown_csv_row(b, city, "baseline", "-", "-"))
            spread = ordering_spread(breakdowns)
            worst = max(spread, key=spread.get)
            print(f"{mode}: ordering spread per element "
                  + ", ".join(f"{k} {v:.2f} pct-pts" for k, v in
                              spread.items())
                  + f" (largest: {worst})")
    else:
        ordering = tuple(args.ordering.split("-"))
        for mode in modes:
            b = attribute_loads(archetype, year, ordering=ordering,
                                mode=mode, dt=args.substep)
            lines.append(breakdown_csv_row(b, city, "baseline", "-", "-"))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "components.csv").write_text("\n".join(lines) + "\n",
                                            encoding="utf-8")
    print(f"wrote {out_dir / 'components.csv'}")
    return EXIT_OK


def _cmd_study(args) -> int:
    config = load_study_config(args.config)
    report = run_study(config, args.out, workers=args.workers)
    for line in report.baseline_comparison_lines():
        print(line)
    done = report.manifest["completed_runs"]
    total = report.manifest["expected_runs"]
    print(f"completed {done}/{total} runs in {report.runtime_s:.1f} s; "
          f"outputs in {report.out_dir}")
    if report.failures:
        for o in report.failures:
            print(f"failed: {o.city} {o.period} {o.scenario} {o.model}: "
                  f"{o.error}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = load_study_config(args.config)
    prepare_study(config)
    print(f"ok: {len(config.cities)} cities, "
          f"{len(config.shift_files)} shift files, "
          f"{config.run_count()} simulation runs planned")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roomclim",
        description="Single-zone room energy simulation and weather morphing")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("morph", help="apply a climate model class to a "
                                     "baseline weather year")
    _add_weather_args(p)
    p.add_argument("--shifts", action="append", required=True,
                   help="monthly shift table CSV (repeatable)")
    p.add_argument("--scenario", required=True,
                   choices=morphing.SCENARIOS)
    p.add_argument("--period", required=True, choices=morphing.PERIODS)
    p.add_argument("--model", default="median",
                   choices=morphing.MODEL_CLASS_KINDS)
    p.add_argument("--out", required=True, help="output weather file path")
    p.set_defaults(func=_cmd_morph)

    p = sub.add_parser("simulate", help="annual heating/cooling demand of "
                                        "the archetype room")
    _add_weather_args(p)
    p.add_argument("--config", default=None,
                   help="JSON archetype overrides")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--trace", action="store_true",
                   help="also write an hourly trace.csv")
    p.add_argument("--substep", type=float, default=SUBSTEP_SECONDS,
                   help="integration sub-step in seconds (default 600)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("components", help="attribute annual load to "
                                          "building elements")
    _add_weather_args(p)
    p.add_argument("--config", default=None,
                   help="JSON archetype overrides")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--mode", choices=("heating", "cooling", "both"),
                   default="both")
    p.add_argument("--ordering", default="all",
                   help="element ordering like "
                        f"{ordering_label(DEFAULT_ORDERING)}, or 'all' "
                        "for every ordering (default)")
    p.add_argument("--substep", type=float, default=SUBSTEP_SECONDS,
                   help="integration sub-step in seconds (default 600)")
    p.set_defaults(func=_cmd_components)

    p = sub.add_parser("study", help="run the full study matrix from a "
                                     "config file")
    p.add_argument("--config", required=True, help="study JSON config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel worker processes (default 1)")
    p.set_defaults(func=_cmd_study)

    p = sub.add_parser("validate", help="check all study inputs without "
                                        "simulating")
    p.add_argument("--config", required=True, help="study JSON config")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RoomclimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
