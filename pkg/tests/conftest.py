"""Shared fixtures: synthetic weather years, shift tables and room variants.

The weather builders make physically consistent years (irradiance from a
clearness index times the extraterrestrial ceiling, dew point from T/RH,
beam/diffuse from the package's own splitter) so validation passes and
simulations behave like real climates without shipping data files.
"""

import numpy as np
import pytest

from roomclim import solar
from roomclim.psychro import dew_point
from roomclim.weather import Location, WeatherYear, expected_calendar
from roomclim.zone import RoomArchetype


def make_year(location, t_mean=26.0, t_season=8.0, t_diurnal=5.0,
              rh_base=60.0, kt=0.55, wind=2.5, seed=0):
    """A synthetic but realistic year: seasonal + diurnal temperature
    cycles with noise, anti-correlated RH, clearness-index irradiance."""
    month, day, hour = expected_calendar()
    n = len(month)
    doy = np.repeat(np.arange(365), 24)
    hod = np.tile(np.arange(24), 365)
    rng = np.random.default_rng(seed)
    t = (t_mean
         - t_season * np.cos(2 * np.pi * (doy - 15) / 365.0)
         - t_diurnal * np.cos(2 * np.pi * (hod - 14.5) / 24.0)
         + rng.normal(0.0, 0.6, n))
    t = np.round(t, 1)
    rh = np.clip(rh_base + 25.0 * np.cos(2 * np.pi * (hod - 14.5) / 24.0)
                 + rng.normal(0.0, 3.0, n), 8.0, 97.0)
    rh = np.round(rh, 0)
    dew = np.minimum(
        np.round(np.array([dew_point(ti, ri / 100.0)
                           for ti, ri in zip(t, rh)]), 1),
        t + 0.5)
    ghi = np.zeros(n)
    for i in range(n):
        pos = solar.solar_position(location.latitude, location.longitude,
                                   location.timezone, int(month[i]),
                                   int(day[i]), (int(hour[i]) - 1) + 0.5)
        i0 = solar.extraterrestrial_horizontal(int(doy[i]) + 1, pos.altitude)
        ghi[i] = round(kt * i0)
    wind_speed = np.round(np.clip(wind + rng.normal(0.0, 0.8, n),
                                  0.0, 20.0), 1)
    wind_dir = np.round(rng.uniform(0.0, 360.0, n), 0)
    year = WeatherYear(location=location, month=month, day=day, hour=hour,
                       dry_bulb=t, dew_point=dew, rel_humidity=rh,
                       pressure=np.full(n, 101325.0), ghi=ghi,
                       dni=np.zeros(n), dhi=np.zeros(n),
                       wind_speed=wind_speed, wind_direction=wind_dir)
    year = solar.resplit_year(year)
    year.validate()
    return year


def make_constant_year(t=36.0, rh_pct=30.0, ghi_kt=0.0, wind=0.0,
                       location=None):
    """A year pinned at one outdoor condition; no sun unless ghi_kt > 0."""
    loc = location or Location("flatland", 23.0, 72.0, 5.5)
    month, day, hour = expected_calendar()
    n = len(month)
    dew = min(round(dew_point(t, rh_pct / 100.0), 4), t + 0.5)
    ghi = np.zeros(n)
    if ghi_kt > 0.0:
        doy = np.repeat(np.arange(365), 24)
        for i in range(n):
            pos = solar.solar_position(loc.latitude, loc.longitude,
                                       loc.timezone, int(month[i]),
                                       int(day[i]), (int(hour[i]) - 1) + 0.5)
            i0 = solar.extraterrestrial_horizontal(int(doy[i]) + 1,
                                                   pos.altitude)
            ghi[i] = round(ghi_kt * i0)
    year = WeatherYear(location=loc, month=month, day=day, hour=hour,
                       dry_bulb=np.full(n, float(t)),
                       dew_point=np.full(n, dew),
                       rel_humidity=np.full(n, float(rh_pct)),
                       pressure=np.full(n, 101325.0), ghi=ghi,
                       dni=np.zeros(n), dhi=np.zeros(n),
                       wind_speed=np.full(n, float(wind)),
                       wind_direction=np.zeros(n))
    year = solar.resplit_year(year)
    year.validate()
    return year


def shift_table_text(gcms=(("gcm-a", 0.8), ("gcm-b", 1.4), ("gcm-c", 2.1)),
                     scenarios=("RCP4.5",), periods=("2030s",),
                     grid=((22.0, 72.0), (22.0, 73.0),
                           (24.0, 72.0), (24.0, 73.0)),
                     alpha=0.04, q_scale=1.03, ghi_scale=0.99,
                     wind_scale=1.01, scenario_boost=0.0):
    """CSV text for an ensemble of monthly shift tables."""
    rows = ["gcm_id,scenario,period,lat,lon,month,"
            "dT_C,alpha,q_scale,ghi_scale,wind_scale"]
    for s_i, scenario in enumerate(scenarios):
        for p_i, period in enumerate(periods):
            for gcm, base in gcms:
                for lat, lon in grid:
                    for m in range(1, 13):
                        dt = (base + 0.05 * m + 0.01 * (lat - grid[0][0])
                              + scenario_boost * s_i + 0.5 * p_i)
                        rows.append(
                            f"{gcm},{scenario},{period},{lat},{lon},{m},"
                            f"{dt:.3f},{alpha},{q_scale},{ghi_scale},"
                            f"{wind_scale}")
    return "\n".join(rows) + "\n"


# One pass/fail line per acceptance criterion, printed after the run so it
# survives pytest's output capture.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def hot_year():
    return make_year(Location("hotville", 23.0, 72.6, 5.5, 55.0))


@pytest.fixture(scope="session")
def cold_year():
    return make_year(Location("coldville", 34.1, 74.8, 5.5, 1585.0),
                     t_mean=9.0, t_season=10.0, rh_base=55.0, kt=0.5, seed=3)


@pytest.fixture(scope="session")
def mild_year():
    return make_year(Location("mildville", 28.6, 77.2, 5.5, 216.0),
                     t_mean=18.0, t_season=11.0, rh_base=50.0, seed=7)


@pytest.fixture(scope="session")
def default_room():
    return RoomArchetype()


@pytest.fixture(scope="session")
def south_room():
    return RoomArchetype().with_orientation((180.0, 270.0))
