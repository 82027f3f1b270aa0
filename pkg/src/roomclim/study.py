"""Batch orchestration: baseline and morphed-future runs over many cities.

A study walks the matrix cities x (baseline + periods x scenarios x model
classes). Every run is simulated and attributed (one ordering, both
modes, three extra model variants per run) and the outcomes land in a set
of deterministic CSV tables plus a JSON manifest. Weather and shift files
are all parsed up front so configuration mistakes surface before the
first simulation.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import morph as morphing
from . import solar
from .components import (BREAKDOWN_CSV_HEADER, DEFAULT_ORDERING,
                         breakdown_csv_row, breakdown_from_results,
                         cumulative_sets, ELEMENTS, run_variants)
from .errors import ConfigError, RoomclimError
from .psychro import humidity_ratio_from_rh
from .weather import Location, parse_weather
from .zone import (Layer, RESULT_CSV_HEADER, RoomArchetype, SUBSTEP_SECONDS,
                   WallSpec, WindowSpec, result_csv_row)

CHANGES_CSV_HEADER = ("city,period,scenario,model,"
                      "baseline_heating_kWh,future_heating_kWh,"
                      "heating_delta_kWh,heating_delta_pct,"
                      "baseline_cooling_kWh,future_cooling_kWh,"
                      "cooling_delta_kWh,cooling_delta_pct")

CLIMATE_CSV_HEADER = ("city,period,scenario,model,dt_mean_C,q_change_pct,"
                      "rh_change_points,ghi_change_pct,wind_change_pct,"
                      "clamped_hours")

# Marker written where a percentage has no defined value (zero baseline).
UNDEFINED_PCT = "NA"

# Published single-room annual figures for the default archetype in these
# cities: (system usage hours, sensible cooling kWh, latent cooling kWh,
# total cooling kWh, heating kWh or None where negligible). Shown next to
# simulated baselines for orientation; nothing asserts against them.
REFERENCE_BASELINES = {
    "ahmedabad": (2931, 1980, 336, 2315, None),
    "bengaluru": (3111, 1100, 133, 1233, None),
    "chennai": (3650, 2410, 659, 3068, None),
    "hyderabad": (3308, 1628, 191, 1818, None),
    "kolkata": (2807, 1653, 509, 2162, None),
    "mumbai": (3567, 1851, 492, 2343, None),
    "new delhi": (2379, 1678, 277, 1955, 63.0),
    "srinagar": (1318, 491, 23, 514, 511.0),
}


# --- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class CityConfig:
    name: str
    weather_path: Path
    weather_format: str = "epw"
    orientation: tuple[float, float] = (0.0, 90.0)
    # Optional site override; needed for CSV weather, which has no metadata.
    latitude: float | None = None
    longitude: float | None = None
    timezone: float | None = None
    elevation: float = 0.0


@dataclass(frozen=True)
class StudyConfig:
    cities: tuple[CityConfig, ...]
    shift_files: tuple[Path, ...]
    periods: tuple[str, ...] = morphing.PERIODS
    scenarios: tuple[str, ...] = morphing.SCENARIOS
    model_classes: tuple[str, ...] = morphing.MODEL_CLASS_KINDS
    archetype: RoomArchetype = RoomArchetype()
    substep_seconds: float = SUBSTEP_SECONDS

    def run_count(self) -> int:
        return len(self.cities) * (1 + len(self.periods)
                                   * len(self.scenarios)
                                   * len(self.model_classes))


def archetype_from_dict(data: dict) -> RoomArchetype:
    """Build a room from a config mapping; omitted keys keep defaults."""
    base = RoomArchetype()
    known = {"width", "depth", "height", "infiltration_ach", "h_in", "h_out",
             "exterior_absorptance", "ground_albedo", "layers", "walls",
             "schedule", "setpoints"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown archetype keys: {sorted(unknown)}")

    kwargs = {k: data[k] for k in
              ("width", "depth", "height", "infiltration_ach", "h_in",
               "h_out", "exterior_absorptance", "ground_albedo") if k in data}
    try:
        if "layers" in data:
            kwargs["layers"] = tuple(Layer(**entry)
                                     for entry in data["layers"])
        if "walls" in data:
            walls = []
            for entry in data["walls"]:
                windows = tuple(WindowSpec(**w)
                                for w in entry.get("windows", []))
                walls.append(WallSpec(azimuth=entry["azimuth"],
                                      length=entry["length"],
                                      windows=windows))
            kwargs["walls"] = tuple(walls)
        if "schedule" in data:
            kwargs["schedule"] = replace(base.schedule, **data["schedule"])
        if "setpoints" in data:
            kwargs["setpoints"] = replace(base.setpoints, **data["setpoints"])
        archetype = replace(base, **kwargs)
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"bad archetype config: {exc}") from None
    archetype.validate()
    return archetype


def load_study_config(path) -> StudyConfig:
    """Read a study configuration from a JSON file.

    Relative paths inside the file resolve against the file's directory.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    base_dir = path.parent

    if "cities" not in data or not data["cities"]:
        raise ConfigError("config needs a non-empty 'cities' list")
    if "shift_files" not in data or not data["shift_files"]:
        raise ConfigError("config needs a non-empty 'shift_files' list")

    cities = []
    for entry in data["cities"]:
        if "name" not in entry or "weather" not in entry:
            raise ConfigError("each city needs 'name' and 'weather'")
        orientation = tuple(entry.get("orientation", (0.0, 90.0)))
        cities.append(CityConfig(
            name=entry["name"],
            weather_path=base_dir / entry["weather"],
            weather_format=entry.get("format", "epw"),
            orientation=orientation,
            latitude=entry.get("latitude"),
            longitude=entry.get("longitude"),
            timezone=entry.get("timezone"),
            elevation=entry.get("elevation", 0.0)))

    archetype = archetype_from_dict(data.get("archetype", {}))
    kinds = tuple(data.get("model_classes", morphing.MODEL_CLASS_KINDS))
    for kind in kinds:
        if kind not in morphing.MODEL_CLASS_KINDS:
            raise ConfigError(f"unknown model class {kind!r}")
    return StudyConfig(
        cities=tuple(cities),
        shift_files=tuple(base_dir / p for p in data["shift_files"]),
        periods=tuple(data.get("periods", morphing.PERIODS)),
        scenarios=tuple(data.get("scenarios", morphing.SCENARIOS)),
        model_classes=kinds,
        archetype=archetype,
        substep_seconds=float(data.get("substep_seconds", SUBSTEP_SECONDS)))


# --- validation --------------------------------------------------------------

@dataclass
class PreparedStudy:
    config: StudyConfig
    baselines: list          # resplit WeatherYear per city
    raw_years: list          # parsed WeatherYear per city (morphing input)
    locations: list[Location]
    classes: dict            # (city_idx, scenario, period) -> {kind: ModelClass}
    input_hashes: dict[str, str]


def prepare_study(config: StudyConfig) -> PreparedStudy:
    """Parse and cross-check every input before any simulation runs.

    Raises ConfigError listing every problem found.
    """
    errors: list[str] = []
    input_hashes: dict[str, str] = {}
    raw_years, baselines, locations = [], [], []

    for city in config.cities:
        try:
            input_hashes[str(city.weather_path)] = _sha256(city.weather_path)
            override = None
            if city.latitude is not None:
                override = Location(city.name, city.latitude,
                                    city.longitude or 0.0,
                                    city.timezone or 0.0, city.elevation)
            year = parse_weather(city.weather_path, city.weather_format,
                                 location=override)
            if override is not None:
                year.location = override
            raw_years.append(year)
            locations.append(year.location)
            baselines.append(None)  # filled after validation passes
        except (RoomclimError, OSError, ValueError) as exc:
            errors.append(f"{city.name}: {exc}")
            raw_years.append(None)
            locations.append(None)
            baselines.append(None)

    tables = []
    for path in config.shift_files:
        try:
            input_hashes[str(path)] = _sha256(path)
            tables.extend(morphing.read_shift_tables(path))
        except (RoomclimError, OSError) as exc:
            errors.append(f"{path}: {exc}")

    needs_future = bool(config.periods and config.scenarios
                        and config.model_classes)
    by_key: dict[tuple[str, str], list] = {}
    for t in tables:
        by_key.setdefault((t.scenario, t.period), []).append(t)
    if needs_future:
        for scenario in config.scenarios:
            for period in config.periods:
                n = len(by_key.get((scenario, period), ()))
                if n < 2:
                    errors.append(f"{scenario} {period}: found {n} model "
                                  f"tables, need at least 2")

    classes = {}
    if not errors:
        for idx, loc in enumerate(locations):
            for scenario in config.scenarios:
                for period in config.periods:
                    shift_sets = [morphing.table_at_location(
                        t, loc.latitude, loc.longitude)
                        for t in by_key[(scenario, period)]]
                    classes[(idx, scenario, period)] = \
                        morphing.build_model_classes(shift_sets)
        for idx, year in enumerate(raw_years):
            baselines[idx] = solar.resplit_year(year)

    if errors:
        raise ConfigError("study inputs invalid:\n  " + "\n  ".join(errors))
    return PreparedStudy(config=config, baselines=baselines,
                         raw_years=raw_years, locations=locations,
                         classes=classes, input_hashes=input_hashes)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


# --- change reporting --------------------------------------------------------

@dataclass(frozen=True)
class ChangeRecord:
    """Future-minus-baseline demand changes for one run."""

    heating_delta_kwh: float
    heating_delta_pct: float | None
    cooling_delta_kwh: float
    cooling_delta_pct: float | None


def report_changes(baseline, future) -> ChangeRecord:
    """Differences between two AnnualResults; percentages are undefined
    (None) when the baseline demand is zero."""
    dh = future.heating_kwh - baseline.heating_kwh
    dc = future.cooling_total_kwh - baseline.cooling_total_kwh
    hp = (100.0 * dh / baseline.heating_kwh
          if abs(baseline.heating_kwh) > 1e-12 else None)
    cp = (100.0 * dc / baseline.cooling_total_kwh
          if abs(baseline.cooling_total_kwh) > 1e-12 else None)
    return ChangeRecord(dh, hp, dc, cp)


def _pct_cell(value: float | None) -> str:
    return UNDEFINED_PCT if value is None else f"{value:.2f}"


# --- execution ---------------------------------------------------------------

@dataclass
class RunOutcome:
    city: str
    period: str
    scenario: str
    model: str
    result: object | None = None          # AnnualResult of the full room
    breakdowns: tuple = ()                 # one per attribution mode
    clamped_hours: int = 0
    climate: tuple | None = None           # morphed-vs-baseline deltas
    runtime_s: float = 0.0
    error: str | None = None


def _mean_w(year) -> float:
    return float(np.mean(humidity_ratio_from_rh(
        year.dry_bulb, year.rel_humidity / 100.0, year.pressure)))


def _execute_run(payload) -> RunOutcome:
    (city_name, period, scenario, kind, archetype, raw_year, baseline_year,
     model_class, dt) = payload
    started = time.perf_counter()
    outcome = RunOutcome(city=city_name, period=period, scenario=scenario,
                         model=kind)
    try:
        if model_class is None:
            year = baseline_year
        else:
            morphed = morphing.morph_year(raw_year, model_class)
            year = morphed.year
            outcome.clamped_hours = morphed.clamped_hours
            outcome.climate = (
                float(np.mean(year.dry_bulb) - np.mean(raw_year.dry_bulb)),
                100.0 * (_mean_w(year) / _mean_w(raw_year) - 1.0),
                float(np.mean(year.rel_humidity)
                      - np.mean(raw_year.rel_humidity)),
                100.0 * float(np.sum(year.ghi) / np.sum(raw_year.ghi) - 1.0),
                100.0 * float(np.mean(year.wind_speed)
                              / np.mean(raw_year.wind_speed) - 1.0))

        results = run_variants(archetype, year,
                               cumulative_sets(DEFAULT_ORDERING), dt=dt)
        full = results[frozenset(ELEMENTS)]
        outcome.result = full
        outcome.breakdowns = tuple(
            breakdown_from_results(results, archetype, DEFAULT_ORDERING, mode)
            for mode in ("heating", "cooling"))
    except Exception as exc:  # noqa: BLE001 - keep the matrix running
        outcome.error = f"{type(exc).__name__}: {exc}"
    outcome.runtime_s = time.perf_counter() - started
    return outcome


@dataclass
class StudyReport:
    out_dir: Path
    outcomes: list[RunOutcome]
    manifest: dict
    runtime_s: float

    @property
    def failures(self) -> list[RunOutcome]:
        return [o for o in self.outcomes if o.error is not None]

    def baseline_comparison_lines(self) -> list[str]:
        """Simulated baselines next to the published reference values."""
        lines = []
        for o in self.outcomes:
            if o.period != "baseline" or o.result is None:
                continue
            ref = REFERENCE_BASELINES.get(o.city.strip().lower())
            r = o.result
            if ref is None:
                lines.append(
                    f"{o.city}: cooling {r.cooling_total_kwh:.0f} kWh "
                    f"(sens {r.cooling_sensible_kwh:.0f} / lat "
                    f"{r.cooling_latent_kwh:.0f}), heating "
                    f"{r.heating_kwh:.0f} kWh, usage {r.usage_hours} h "
                    f"(no reference)")
                continue
            usage, sen, lat, total, heat = ref
            heat_ref = "-" if heat is None else f"{heat:.0f}"
            lines.append(
                f"{o.city}: cooling {r.cooling_total_kwh:.0f} kWh vs "
                f"reference {total} (sens {r.cooling_sensible_kwh:.0f} vs "
                f"{sen}, lat {r.cooling_latent_kwh:.0f} vs {lat}), heating "
                f"{r.heating_kwh:.0f} vs {heat_ref} kWh, usage "
                f"{r.usage_hours} vs {usage} h")
        return lines


def run_study(config: StudyConfig, out_dir, workers: int = 1) -> StudyReport:
    """Execute the full matrix and write CSV tables plus a manifest."""
    started = time.perf_counter()
    prepared = prepare_study(config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    payloads = []
    for idx, city in enumerate(config.cities):
        archetype = config.archetype.with_orientation(city.orientation)
        raw = prepared.raw_years[idx]
        baseline = prepared.baselines[idx]
        payloads.append((city.name, "baseline", "-", "-", archetype,
                         raw, baseline, None, config.substep_seconds))
        for period in config.periods:
            for scenario in config.scenarios:
                for kind in config.model_classes:
                    model = prepared.classes[(idx, scenario, period)][kind]
                    payloads.append((city.name, period, scenario, kind,
                                     archetype, raw, baseline, model,
                                     config.substep_seconds))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_execute_run, payloads))
    else:
        outcomes = [_execute_run(p) for p in payloads]

    _write_tables(out_dir, outcomes)
    manifest = _write_manifest(out_dir, config, prepared, outcomes)
    return StudyReport(out_dir=out_dir, outcomes=outcomes, manifest=manifest,
                       runtime_s=time.perf_counter() - started)


def _write_tables(out_dir: Path, outcomes: list[RunOutcome]) -> None:
    results = [RESULT_CSV_HEADER]
    breakdowns = [BREAKDOWN_CSV_HEADER]
    changes = [CHANGES_CSV_HEADER]
    climate = [CLIMATE_CSV_HEADER]

    baseline_by_city = {o.city: o.result for o in outcomes
                        if o.period == "baseline" and o.result is not None}
    for o in outcomes:
        if o.result is None:
            continue
        results.append(result_csv_row(o.result, o.city, o.period,
                                      o.scenario, o.model))
        for b in o.breakdowns:
            breakdowns.append(breakdown_csv_row(b, o.city, o.period,
                                                o.scenario, o.model))
        if o.period == "baseline":
            continue
        base = baseline_by_city.get(o.city)
        if base is not None:
            ch = report_changes(base, o.result)
            changes.append(",".join([
                o.city, o.period, o.scenario, o.model,
                f"{base.heating_kwh:.3f}", f"{o.result.heating_kwh:.3f}",
                f"{ch.heating_delta_kwh:.3f}", _pct_cell(ch.heating_delta_pct),
                f"{base.cooling_total_kwh:.3f}",
                f"{o.result.cooling_total_kwh:.3f}",
                f"{ch.cooling_delta_kwh:.3f}",
                _pct_cell(ch.cooling_delta_pct)]))
        if o.climate is not None:
            dt_mean, q_pct, rh_pts, ghi_pct, wind_pct = o.climate
            climate.append(",".join([
                o.city, o.period, o.scenario, o.model,
                f"{dt_mean:.4f}", f"{q_pct:.3f}", f"{rh_pts:.3f}",
                f"{ghi_pct:.3f}", f"{wind_pct:.3f}",
                str(o.clamped_hours)]))

    (out_dir / "results.csv").write_text("\n".join(results) + "\n",
                                         encoding="utf-8")
    (out_dir / "components.csv").write_text("\n".join(breakdowns) + "\n",
                                            encoding="utf-8")
    (out_dir / "changes.csv").write_text("\n".join(changes) + "\n",
                                         encoding="utf-8")
    (out_dir / "climate_changes.csv").write_text("\n".join(climate) + "\n",
                                                 encoding="utf-8")


def _config_fingerprint(config: StudyConfig) -> str:
    blob = json.dumps({
        "cities": [[c.name, str(c.weather_path), c.weather_format,
                    list(c.orientation), c.latitude, c.longitude,
                    c.timezone, c.elevation] for c in config.cities],
        "shift_files": [str(p) for p in config.shift_files],
        "periods": list(config.periods),
        "scenarios": list(config.scenarios),
        "model_classes": list(config.model_classes),
        "substep_seconds": config.substep_seconds,
        "archetype": repr(config.archetype),
    }, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _write_manifest(out_dir: Path, config: StudyConfig,
                    prepared: PreparedStudy,
                    outcomes: list[RunOutcome]) -> dict:
    manifest = {
        "config_sha256": _config_fingerprint(config),
        "inputs_sha256": dict(sorted(prepared.input_hashes.items())),
        "substep_seconds": config.substep_seconds,
        "expected_runs": config.run_count(),
        "completed_runs": sum(1 for o in outcomes if o.error is None),
        "runs": [{
            "city": o.city, "period": o.period, "scenario": o.scenario,
            "model": o.model,
            "status": "ok" if o.error is None else o.error,
            "runtime_s": round(o.runtime_s, 3),
            "clamped_hours": o.clamped_hours,
        } for o in outcomes],
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    return manifest
