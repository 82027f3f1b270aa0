"""Acceptance gate: the eleven release criteria, one test and one
printed pass/fail line each (see the terminal summary block).

Several criteria share the incremental-variant simulations of three
(climate, room) fixtures; those runs happen once in a module fixture.
The eight-city study matrix runs synthetic weather generated in a temp
directory, so the whole gate is self-contained.
"""

import functools
import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import (ACCEPTANCE_LINES, make_constant_year, make_year,
                      shift_table_text)
from roomclim.components import (ELEMENTS, attribute_all_orderings,
                                 wall_component)
from roomclim.morph import (ModelClass, MonthlyShifts, build_model_classes,
                            morph_year)
from roomclim.study import CityConfig, StudyConfig, run_study
from roomclim.weather import Location, monthly_mean, write_weather
from roomclim.zone import RoomArchetype, simulate_year, wall_u_value


def criterion(num, text):
    """Record one pass/fail summary line per criterion."""
    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                ACCEPTANCE_LINES.append(
                    f"FAIL  {num:2d}. {text} ({type(exc).__name__})")
                raise
            suffix = f" [{detail}]" if detail else ""
            ACCEPTANCE_LINES.append(f"PASS  {num:2d}. {text}{suffix}")
        return inner
    return wrap


def flat_shifts(gcm_id, dt):
    return MonthlyShifts(gcm_id=gcm_id, scenario="RCP4.5", period="2030s",
                         dt=np.full(12, dt), alpha=np.zeros(12),
                         q_scale=np.ones(12), ghi_scale=np.ones(12),
                         wind_scale=np.ones(12))


def shift_only(dt_per_month):
    return ModelClass(kind="median", scenario="-", period="-",
                      dt=np.asarray(dt_per_month, dtype=float),
                      alpha=np.zeros(12), q_scale=np.ones(12),
                      ghi_scale=np.ones(12), wind_scale=np.ones(12),
                      source_gcms=("-",) * 12)


@pytest.fixture(scope="module")
def fixtures3(hot_year, cold_year, mild_year, default_room, south_room):
    return [("hot/north-east", hot_year, default_room),
            ("cold/north-east", cold_year, default_room),
            ("mild/south-west", mild_year, south_room)]


@pytest.fixture(scope="module")
def variant_runs(fixtures3):
    """All-ordering breakdowns for both modes on each fixture, plus the
    wall-clock seconds the variant simulations took."""
    started = time.perf_counter()
    runs = {}
    for name, year, room in fixtures3:
        results = {}
        breakdowns = {mode: attribute_all_orderings(room, year, mode=mode,
                                                    results=results)
                      for mode in ("heating", "cooling")}
        runs[name] = (room, year, results, breakdowns)
    return runs, time.perf_counter() - started


CITY_SITES = [
    ("Ahmedabad", 23.0, 72.6, 5.5, 55.0,
     dict(t_mean=27.0, t_season=8.0, rh_base=55.0, seed=11)),
    ("Bengaluru", 13.0, 77.6, 5.5, 920.0,
     dict(t_mean=24.0, t_season=4.0, rh_base=60.0, seed=12)),
    ("Chennai", 13.1, 80.3, 5.5, 7.0,
     dict(t_mean=28.5, t_season=4.0, rh_base=70.0, seed=13)),
    ("Hyderabad", 17.4, 78.5, 5.5, 542.0,
     dict(t_mean=26.5, t_season=6.0, rh_base=55.0, seed=14)),
    ("Kolkata", 22.6, 88.4, 5.5, 9.0,
     dict(t_mean=26.5, t_season=8.0, rh_base=70.0, seed=15)),
    ("Mumbai", 19.1, 72.9, 5.5, 14.0,
     dict(t_mean=27.5, t_season=4.0, rh_base=75.0, seed=16)),
    ("New Delhi", 28.6, 77.2, 5.5, 216.0,
     dict(t_mean=25.0, t_season=11.0, rh_base=50.0, seed=17)),
    ("Srinagar", 34.1, 74.8, 5.5, 1585.0,
     dict(t_mean=13.5, t_season=11.0, rh_base=60.0, kt=0.5, seed=18)),
]


@pytest.fixture(scope="module")
def eight_city_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("matrix")
    for name, lat, lon, tz, elev, params in CITY_SITES:
        year = make_year(Location(name, lat, lon, tz, elev), **params)
        write_weather(year, root / f"{name.lower().replace(' ', '_')}.epw")
    grid = tuple((lat, lon) for lat in (10.0, 20.0, 30.0)
                 for lon in (70.0, 80.0, 90.0))
    (root / "shifts.csv").write_text(
        shift_table_text(scenarios=("RCP4.5", "RCP8.5"),
                         periods=("2030s", "2060s", "2090s"),
                         grid=grid, scenario_boost=0.6),
        encoding="utf-8")
    return root


def eight_city_config(root):
    cities = tuple(
        CityConfig(name=name,
                   weather_path=root / f"{name.lower().replace(' ', '_')}.epw")
        for name, *_ in CITY_SITES)
    return StudyConfig(cities=cities, shift_files=(root / "shifts.csv",))


# --- criteria ----------------------------------------------------------------

@criterion(1, "six-member ensemble gives min 0.71 / median 1.43 / "
              "max 1.63, zero tolerance")
def test_criterion_01_model_class_worked_example():
    shifts = (0.71, 0.86, 1.37, 1.49, 1.62, 1.63)
    classes = build_model_classes(
        [flat_shifts(f"gcm-{i}", s) for i, s in enumerate(shifts)])
    assert np.array_equal(classes["min"].dt, np.full(12, 0.71))
    assert np.array_equal(classes["median"].dt, np.full(12, 1.43))
    assert np.array_equal(classes["max"].dt, np.full(12, 1.63))
    return "median exactly 1.43"


@criterion(2, "additive morphing moves every monthly mean by the shift "
              "within 1e-9 degC in under 1 s")
def test_criterion_02_morphing_mean_contract(mild_year):
    rng = np.random.default_rng(42)
    shifts = rng.uniform(-3.0, 6.0, 12)
    started = time.perf_counter()
    morphed = morph_year(mild_year, shift_only(shifts)).year
    worst = max(abs(monthly_mean(morphed, "dry_bulb", m)
                    - monthly_mean(mild_year, "dry_bulb", m)
                    - shifts[m - 1]) for m in range(1, 13))
    elapsed = time.perf_counter() - started
    assert worst <= 1e-9
    assert elapsed < 1.0
    return f"max deviation {worst:.2e} degC in {elapsed:.2f} s"


@criterion(3, "components telescope to the total for 6 orderings x 2 modes "
              "x 3 fixtures within max(0.1%, 0.5 kWh)")
def test_criterion_03_attribution_telescoping(variant_runs):
    runs, elapsed = variant_runs
    worst_gap = 0.0
    for room, year, results, breakdowns in runs.values():
        for mode in ("heating", "cooling"):
            group = breakdowns[mode]
            totals = [b.total_kwh for b in group]
            assert max(totals) - min(totals) <= 1e-9
            for b in group:
                gap = abs(sum(b.components().values()) - b.total_kwh)
                worst_gap = max(worst_gap, gap)
                assert gap <= max(0.001 * abs(b.total_kwh), 0.5)
    assert elapsed < 120.0
    return f"worst |sum-total| {worst_gap:.2e} kWh, runs took {elapsed:.0f} s"


@criterion(4, "walls-only 100 kWh at 23.4/20.4 m2 rescales to 87.18 kWh "
              "(4-decimal arithmetic)")
def test_criterion_04_wall_rescale_arithmetic():
    value = wall_component(100.0, 23.4, 20.4)
    assert abs(value - 87.1795) <= 5e-5
    assert f"{value:.2f}" == "87.18"
    return f"wall component {value:.4f} kWh"


@criterion(5, "steady 36->26 degC cooling within 1% of UA x 10 K x 8760 h "
              "in under 10 s")
def test_criterion_05_steady_state_oracle():
    year = make_constant_year(t=36.0, rh_pct=30.0, ghi_kt=0.0, wind=0.0)
    room = RoomArchetype()
    room = replace(room, infiltration_ach=0.0,
                   schedule=replace(room.schedule, occupants=0,
                                    lighting_w=0.0, occupied_start=0,
                                    occupied_end=24))
    started = time.perf_counter()
    result = simulate_year(room, year)
    elapsed = time.perf_counter() - started
    net = room.total_gross_wall_area() - room.total_window_area()
    ua = (wall_u_value(room.layers, room.h_in, room.h_out) * net
          + sum(win.u_value * win.area
                for w in room.walls for win in w.windows))
    expected = ua * 10.0 * 8760.0 / 1000.0
    error = abs(result.cooling_sensible_kwh - expected) / expected
    assert error <= 0.01
    assert elapsed < 10.0
    return (f"{result.cooling_sensible_kwh:.1f} vs {expected:.1f} kWh, "
            f"error {100.0 * error:.3f}%")


@criterion(6, "annual max heat-balance residuals below 0.1 W sensible / "
              "0.25 W latent")
def test_criterion_06_balance_closure(variant_runs):
    runs, _ = variant_runs
    worst_s = worst_l = 0.0
    for room, year, results, breakdowns in runs.values():
        full = results[frozenset(ELEMENTS)]
        worst_s = max(worst_s, full.max_sensible_residual_w)
        worst_l = max(worst_l, full.max_latent_residual_w)
    assert worst_s < 0.1
    assert worst_l < 0.25
    return f"max residuals {worst_s:.2e} W sensible, {worst_l:.2e} W latent"


@criterion(7, "occupied HVAC-on hours stay in 17.99..26.01 degC and "
              "RH <= 65.5%; unoccupied demand is exactly zero")
def test_criterion_07_comfort_contract(mild_year, south_room):
    result = simulate_year(south_room, mild_year, trace=True)
    sched = south_room.schedule
    on_hours = 0
    for row in result.trace:
        hod = (row[2] - 1) % 24
        demand = row[6] + row[7] + row[8]
        if sched.occupied(hod):
            if demand > 1e-9:
                on_hours += 1
                assert 17.99 <= row[3] <= 26.01
            assert row[5] <= 65.5
        else:
            assert row[6] == 0.0 and row[7] == 0.0 and row[8] == 0.0
    assert on_hours > 0
    return f"{on_hours} occupied HVAC-on hours checked"


@criterion(8, "a uniform +2 degC shift strictly raises cooling and strictly "
              "lowers heating on every fixture")
def test_criterion_08_warming_monotonicity(fixtures3, variant_runs):
    runs, _ = variant_runs
    heated_fixtures = 0
    for name, year, room in fixtures3:
        base = runs[name][2][frozenset(ELEMENTS)]
        future = simulate_year(room, morph_year(
            year, shift_only(np.full(12, 2.0))).year)
        assert future.cooling_total_kwh > base.cooling_total_kwh, name
        if base.heating_kwh > 0.0:
            heated_fixtures += 1
            assert future.heating_kwh < base.heating_kwh, name
    assert heated_fixtures >= 1
    return f"3 fixtures, {heated_fixtures} with baseline heating"


@criterion(9, "eight-city default matrix yields exactly 152 deterministic "
              "result rows (8 baseline + 144 future) in under 10 min")
def test_criterion_09_study_matrix(eight_city_dir):
    config = eight_city_config(eight_city_dir)
    assert config.run_count() == 152
    started = time.perf_counter()
    report = run_study(config, eight_city_dir / "out")
    elapsed = time.perf_counter() - started
    assert report.failures == []
    lines = (eight_city_dir / "out" / "results.csv").read_text().splitlines()
    rows = lines[1:]
    assert len(rows) == 152
    baseline = [r for r in rows if ",baseline,-,-," in r]
    assert len(baseline) == 8
    assert len(rows) - len(baseline) == 144
    assert report.manifest["completed_runs"] == 152

    # Determinism probe: repeat a one-city slice and demand byte equality.
    small = StudyConfig(cities=config.cities[:1],
                        shift_files=config.shift_files,
                        periods=("2030s",), scenarios=("RCP4.5",))
    run_study(small, eight_city_dir / "det1")
    run_study(small, eight_city_dir / "det2")
    for fname in ("results.csv", "components.csv", "changes.csv",
                  "climate_changes.csv"):
        assert (eight_city_dir / "det1" / fname).read_bytes() == \
            (eight_city_dir / "det2" / fname).read_bytes(), fname
    assert elapsed < 600.0
    return f"152 rows in {elapsed:.0f} s, repeat slice byte-identical"


@criterion(10, "internal-gains component <= 0 in heating mode and >= 0 in "
               "cooling mode on every fixture and ordering")
def test_criterion_10_internal_gain_signs(variant_runs):
    runs, _ = variant_runs
    for room, year, results, breakdowns in runs.values():
        for b in breakdowns["heating"]:
            assert b.int_sensible_kwh + b.int_latent_kwh <= 1e-9
        for b in breakdowns["cooling"]:
            assert b.int_sensible_kwh + b.int_latent_kwh >= -1e-9
    return "36 breakdowns checked"


@criterion(11, "halving the sub-step moves annual totals by under 0.5% on "
               "every fixture")
def test_criterion_11_substep_convergence(fixtures3, variant_runs):
    runs, _ = variant_runs
    worst = 0.0
    for name, year, room in fixtures3:
        coarse = runs[name][2][frozenset(ELEMENTS)]
        fine = simulate_year(room, year, dt=300.0)
        for attr in ("heating_kwh", "cooling_total_kwh"):
            a, b = getattr(coarse, attr), getattr(fine, attr)
            denom = max(abs(a), abs(b))
            # Totals below 10 Wh are noise; the relative bound applies above.
            assert abs(a - b) <= max(0.005 * denom, 0.01), (name, attr)
            if denom > 0.0:
                worst = max(worst, abs(a - b) / denom)
    assert worst < 0.005
    return f"worst relative change {100.0 * worst:.3f}%"
