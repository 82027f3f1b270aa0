"""Reading, validating and writing hourly weather years.

Two on-disk forms are supported: EPW (8 header lines, one data line per
hour) and a flat CSV with one row per hour. Only the fields the simulator
consumes are interpreted; on EPW input every other column is carried along
verbatim and echoed on output, so a read-write cycle does not invent data.

A year is held column-wise as numpy arrays. Use `records()` or `record(i)`
for a per-hour view.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import ParseError, StructuralError, ValidationError
from .psychro import dew_point as _dew_point

HOURS_PER_YEAR = 8760
HOURS_IN_MONTH = (744, 672, 744, 720, 744, 720, 744, 744, 720, 744, 720, 744)
DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)

DEFAULT_PRESSURE = 101325.0  # Pa, used when a file has no station pressure

CSV_HEADER = ("month,day,hour,dry_bulb_C,dew_point_C,rh_pct,pressure_Pa,"
              "ghi_Whm2,dni_Whm2,dhi_Whm2,wind_mps,wind_dir_deg")

# EPW data-line layout (0-based): the indices we interpret.
_EPW_FIELDS = 35
_IDX_MONTH, _IDX_DAY, _IDX_HOUR = 1, 2, 3
_IDX_DRY, _IDX_DEW, _IDX_RH, _IDX_PRESS = 6, 7, 8, 9
_IDX_GHI, _IDX_DNI, _IDX_DHI = 13, 14, 15
_IDX_WDIR, _IDX_WSPD = 20, 21
_PARSED_IDX = {_IDX_MONTH, _IDX_DAY, _IDX_HOUR, _IDX_DRY, _IDX_DEW, _IDX_RH,
               _IDX_PRESS, _IDX_GHI, _IDX_DNI, _IDX_DHI, _IDX_WDIR, _IDX_WSPD}
_PRESERVED_IDX = tuple(i for i in range(_EPW_FIELDS) if i not in _PARSED_IDX)

# Values written for preserved columns when the year has none (EPW
# missing-value sentinels, plus a nominal year and minute).
_PRESERVED_DEFAULTS = {
    0: "2017", 4: "0", 5: "?",
    10: "9999", 11: "9999", 12: "9999",
    16: "999999", 17: "999999", 18: "999999", 19: "9999",
    22: "99", 23: "99", 24: "9999", 25: "99999",
    26: "9", 27: "999999999", 28: "999",
    29: ".999", 30: "999", 31: "99", 32: "999", 33: "999", 34: "99",
}

# Sentinels marking a missing value in the columns we interpret.
_SENTINEL_TEMP = 99.9
_SENTINEL_RH = 999.0
_SENTINEL_PRESSURE = 999999.0
_SENTINEL_IRRADIANCE = 9999.0
_SENTINEL_WIND = 999.0


@dataclass(frozen=True)
class Location:
    name: str
    latitude: float    # degrees, north positive
    longitude: float   # degrees, east positive
    timezone: float    # hours offset from UTC
    elevation: float = 0.0  # m above sea level


@dataclass(frozen=True)
class HourlyWeatherRecord:
    """One hour of weather. `hour` is 1..24, marking the hour ending then."""

    month: int
    day: int
    hour: int
    dry_bulb: float        # degC
    dew_point: float       # degC
    rel_humidity: float    # percent, 0..100
    pressure: float        # Pa
    ghi: float             # Wh/m2
    dni: float             # Wh/m2
    dhi: float             # Wh/m2
    wind_speed: float      # m/s
    wind_direction: float  # degrees from north


@dataclass
class WeatherYear:
    """A full non-leap year of hourly weather for one location."""

    location: Location
    month: np.ndarray
    day: np.ndarray
    hour: np.ndarray
    dry_bulb: np.ndarray
    dew_point: np.ndarray
    rel_humidity: np.ndarray
    pressure: np.ndarray
    ghi: np.ndarray
    dni: np.ndarray
    dhi: np.ndarray
    wind_speed: np.ndarray
    wind_direction: np.ndarray
    # Raw strings for EPW columns we do not interpret, one tuple per hour,
    # ordered as _PRESERVED_IDX. None for years not read from EPW.
    epw_extras: list[tuple[str, ...]] | None = field(default=None, repr=False)

    def record(self, i: int) -> HourlyWeatherRecord:
        return HourlyWeatherRecord(
            int(self.month[i]), int(self.day[i]), int(self.hour[i]),
            float(self.dry_bulb[i]), float(self.dew_point[i]),
            float(self.rel_humidity[i]), float(self.pressure[i]),
            float(self.ghi[i]), float(self.dni[i]), float(self.dhi[i]),
            float(self.wind_speed[i]), float(self.wind_direction[i]))

    def records(self) -> Iterator[HourlyWeatherRecord]:
        for i in range(len(self.month)):
            yield self.record(i)

    def validate(self) -> None:
        """Raise if any structural or range invariant fails."""
        _check_calendar(self.month, self.day, self.hour)
        _check_ranges(self)

    def copy(self) -> "WeatherYear":
        arrays = {n: getattr(self, n).copy()
                  for n in ("month", "day", "hour", "dry_bulb", "dew_point",
                            "rel_humidity", "pressure", "ghi", "dni", "dhi",
                            "wind_speed", "wind_direction")}
        extras = list(self.epw_extras) if self.epw_extras is not None else None
        return replace(self, epw_extras=extras, **arrays)


def expected_calendar() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The canonical (month, day, hour) sequence of a non-leap year."""
    months, days, hours = [], [], []
    for m, ndays in enumerate(DAYS_IN_MONTH, start=1):
        for d in range(1, ndays + 1):
            for h in range(1, 25):
                months.append(m)
                days.append(d)
                hours.append(h)
    return np.array(months), np.array(days), np.array(hours)


_CAL_MONTH, _CAL_DAY, _CAL_HOUR = expected_calendar()


def _check_calendar(month, day, hour) -> None:
    n = len(month)
    if n != HOURS_PER_YEAR:
        raise StructuralError(f"expected {HOURS_PER_YEAR} hourly records, found {n}")
    if (not np.array_equal(month, _CAL_MONTH) or not np.array_equal(day, _CAL_DAY)
            or not np.array_equal(hour, _CAL_HOUR)):
        bad = int(np.argmax((month != _CAL_MONTH) | (day != _CAL_DAY)
                            | (hour != _CAL_HOUR)))
        raise StructuralError(
            f"record {bad + 1}: timestamp {int(month[bad])}-{int(day[bad])} "
            f"hour {int(hour[bad])} breaks the chronological sequence "
            f"(expected {int(_CAL_MONTH[bad])}-{int(_CAL_DAY[bad])} "
            f"hour {int(_CAL_HOUR[bad])})")


def _check_ranges(year: WeatherYear) -> None:
    checks = (
        ("dry_bulb", year.dry_bulb, -70.0, 70.0),
        ("dew_point", year.dew_point, -90.0, 70.0),
        ("rel_humidity", year.rel_humidity, 0.0, 100.0),
        ("pressure", year.pressure, 31000.0, 120000.0),
        ("ghi", year.ghi, 0.0, 2000.0),
        ("dni", year.dni, 0.0, 2000.0),
        ("dhi", year.dhi, 0.0, 2000.0),
        ("wind_speed", year.wind_speed, 0.0, 60.0),
        ("wind_direction", year.wind_direction, 0.0, 360.0),
    )
    for name, arr, lo, hi in checks:
        bad = np.flatnonzero((arr < lo) | (arr > hi) | ~np.isfinite(arr))
        if bad.size:
            i = int(bad[0])
            raise ValidationError(name, float(arr[i]),
                                  f"hour {i + 1} outside {lo}..{hi}")
    bad = np.flatnonzero(year.dew_point > year.dry_bulb + 0.5)
    if bad.size:
        i = int(bad[0])
        raise ValidationError("dew_point", float(year.dew_point[i]),
                              f"hour {i + 1} exceeds dry_bulb "
                              f"{float(year.dry_bulb[i])} by more than 0.5")
    dark = year.ghi == 0.0
    bad = np.flatnonzero(dark & ((year.dni > 0.0) | (year.dhi > 0.0)))
    if bad.size:
        i = int(bad[0])
        raise ValidationError("dni" if year.dni[i] > 0 else "dhi",
                              float(max(year.dni[i], year.dhi[i])),
                              f"hour {i + 1} has direct or diffuse "
                              f"irradiance while ghi is zero")


def monthly_mean(year: WeatherYear, variable: str, month: int) -> float:
    """Mean of one weather variable over all hours of a month (1..12)."""
    if not 1 <= month <= 12:
        raise ValueError("month must be 1..12")
    arr = getattr(year, variable)
    return float(np.mean(arr[year.month == month]))


# --- parsing ---------------------------------------------------------------

def parse_weather(source, fmt: str = "epw",
                  location: Location | None = None) -> WeatherYear:
    """Read a weather year from a path or text stream.

    `fmt` is "epw" or "csv". CSV files carry no location metadata, so a
    Location may be supplied; it defaults to an unnamed point at 0 N, 0 E.
    """
    if fmt not in ("epw", "csv"):
        raise ValueError(f"unknown weather format {fmt!r}")
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as f:
            text = f.read()
    else:
        text = source.read()
    lines = text.splitlines()
    if fmt == "epw":
        return _parse_epw(lines)
    return _parse_csv(lines, location)


def _float_field(raw: str, name: str, line_no: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"field {name}: cannot parse {raw!r} as a number",
                         line_no) from None


def _int_field(raw: str, name: str, line_no: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"field {name}: cannot parse {raw!r} as an integer",
                         line_no) from None


def _parse_epw(lines: list[str]) -> WeatherYear:
    if len(lines) < 8:
        raise StructuralError("EPW file has fewer than 8 header lines")
    head = lines[0].split(",")
    if head[0].strip().upper() != "LOCATION" or len(head) < 10:
        raise ParseError("first line is not a LOCATION header", 1)
    loc = Location(name=head[1].strip(),
                   latitude=_float_field(head[6], "latitude", 1),
                   longitude=_float_field(head[7], "longitude", 1),
                   timezone=_float_field(head[8], "timezone", 1),
                   elevation=_float_field(head[9], "elevation", 1))
    data_lines = lines[8:]
    if len(data_lines) != HOURS_PER_YEAR:
        raise StructuralError(
            f"expected {HOURS_PER_YEAR} data lines after 8 headers, "
            f"found {len(data_lines)}")

    n = HOURS_PER_YEAR
    cols = {name: np.empty(n) for name in
            ("dry_bulb", "dew_point", "rel_humidity", "pressure", "ghi",
             "dni", "dhi", "wind_speed", "wind_direction")}
    month = np.empty(n, dtype=int)
    day = np.empty(n, dtype=int)
    hour = np.empty(n, dtype=int)
    extras: list[tuple[str, ...]] = []

    for i, line in enumerate(data_lines):
        line_no = i + 9
        f = line.split(",")
        if len(f) < _IDX_WSPD + 1:
            raise ParseError(f"expected at least {_IDX_WSPD + 1} fields, "
                             f"found {len(f)}", line_no)
        month[i] = _int_field(f[_IDX_MONTH], "month", line_no)
        day[i] = _int_field(f[_IDX_DAY], "day", line_no)
        hour[i] = _int_field(f[_IDX_HOUR], "hour", line_no)

        dry = _float_field(f[_IDX_DRY], "dry_bulb", line_no)
        if dry == _SENTINEL_TEMP:
            raise ValidationError("dry_bulb", dry, "missing-value sentinel",
                                  line_no)
        rh = _float_field(f[_IDX_RH], "rel_humidity", line_no)
        if rh == _SENTINEL_RH:
            raise ValidationError("rel_humidity", rh,
                                  "missing-value sentinel", line_no)
        dew_raw = _float_field(f[_IDX_DEW], "dew_point", line_no)
        if dew_raw == _SENTINEL_TEMP:
            dew = _dew_point(dry, max(rh, 0.1) / 100.0)
        else:
            dew = dew_raw
        press = _float_field(f[_IDX_PRESS], "pressure", line_no)
        if press == _SENTINEL_PRESSURE:
            press = DEFAULT_PRESSURE
        ghi = _float_field(f[_IDX_GHI], "ghi", line_no)
        dni = _float_field(f[_IDX_DNI], "dni", line_no)
        dhi = _float_field(f[_IDX_DHI], "dhi", line_no)
        for nm, v in (("ghi", ghi), ("dni", dni), ("dhi", dhi)):
            if v >= _SENTINEL_IRRADIANCE:
                raise ValidationError(nm, v, "missing-value sentinel", line_no)
        wdir = _float_field(f[_IDX_WDIR], "wind_direction", line_no)
        wspd = _float_field(f[_IDX_WSPD], "wind_speed", line_no)
        if wdir == _SENTINEL_WIND:
            raise ValidationError("wind_direction", wdir,
                                  "missing-value sentinel", line_no)
        if wspd == _SENTINEL_WIND:
            raise ValidationError("wind_speed", wspd,
                                  "missing-value sentinel", line_no)

        cols["dry_bulb"][i] = dry
        cols["dew_point"][i] = dew
        cols["rel_humidity"][i] = rh
        cols["pressure"][i] = press
        cols["ghi"][i] = ghi
        cols["dni"][i] = dni
        cols["dhi"][i] = dhi
        cols["wind_speed"][i] = wspd
        cols["wind_direction"][i] = wdir
        extras.append(tuple(f[j] if j < len(f) else _PRESERVED_DEFAULTS[j]
                            for j in _PRESERVED_IDX))

    year = WeatherYear(location=loc, month=month, day=day, hour=hour,
                       epw_extras=extras, **cols)
    year.validate()
    return year


def _parse_csv(lines: list[str], location: Location | None) -> WeatherYear:
    if not lines:
        raise StructuralError("empty CSV file")
    if lines[0].strip() != CSV_HEADER:
        raise ParseError(f"header must be exactly {CSV_HEADER!r}", 1)
    data_lines = [ln for ln in lines[1:] if ln.strip()]
    if len(data_lines) != HOURS_PER_YEAR:
        raise StructuralError(
            f"expected {HOURS_PER_YEAR} data rows, found {len(data_lines)}")
    names = CSV_HEADER.split(",")
    n = HOURS_PER_YEAR
    month = np.empty(n, dtype=int)
    day = np.empty(n, dtype=int)
    hour = np.empty(n, dtype=int)
    vals = np.empty((n, 9))
    for i, line in enumerate(data_lines):
        line_no = i + 2
        f = line.split(",")
        if len(f) != len(names):
            raise ParseError(f"expected {len(names)} fields, found {len(f)}",
                             line_no)
        month[i] = _int_field(f[0], "month", line_no)
        day[i] = _int_field(f[1], "day", line_no)
        hour[i] = _int_field(f[2], "hour", line_no)
        dry = _float_field(f[3], "dry_bulb_C", line_no)
        rh = _float_field(f[5], "rh_pct", line_no)
        dew = (_dew_point(dry, max(rh, 0.1) / 100.0) if f[4].strip() == ""
               else _float_field(f[4], "dew_point_C", line_no))
        press = (DEFAULT_PRESSURE if f[6].strip() == ""
                 else _float_field(f[6], "pressure_Pa", line_no))
        vals[i] = (dry, dew, rh, press,
                   _float_field(f[7], "ghi_Whm2", line_no),
                   _float_field(f[8], "dni_Whm2", line_no),
                   _float_field(f[9], "dhi_Whm2", line_no),
                   _float_field(f[10], "wind_mps", line_no),
                   _float_field(f[11], "wind_dir_deg", line_no))
    loc = location or Location("unnamed", 0.0, 0.0, 0.0, 0.0)
    year = WeatherYear(location=loc, month=month, day=day, hour=hour,
                       dry_bulb=vals[:, 0], dew_point=vals[:, 1],
                       rel_humidity=vals[:, 2], pressure=vals[:, 3],
                       ghi=vals[:, 4], dni=vals[:, 5], dhi=vals[:, 6],
                       wind_speed=vals[:, 7], wind_direction=vals[:, 8])
    year.validate()
    return year


# --- writing ---------------------------------------------------------------

def write_weather(year: WeatherYear, destination=None, fmt: str = "epw"):
    """Serialize a year to EPW or CSV.

    With no destination the text is returned; otherwise it is written to
    the given path or stream. EPW output quantizes temperatures to one
    decimal and irradiance to whole numbers, after which a read-write
    cycle reproduces the file byte for byte.
    """
    if fmt == "epw":
        text = _format_epw(year)
    elif fmt == "csv":
        text = _format_csv(year)
    else:
        raise ValueError(f"unknown weather format {fmt!r}")
    if destination is None:
        return text
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        destination.write(text)
    return None


def _format_epw(year: WeatherYear) -> str:
    loc = year.location
    name = loc.name.replace(",", " ")
    out = [
        f"LOCATION,{name},-,-,-,-,{loc.latitude:.4f},{loc.longitude:.4f},"
        f"{loc.timezone:.1f},{loc.elevation:.1f}",
        "DESIGN CONDITIONS,0",
        "TYPICAL/EXTREME PERIODS,0",
        "GROUND TEMPERATURES,0",
        "HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0",
        "COMMENTS 1,",
        "COMMENTS 2,",
        "DATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31",
    ]
    extras = year.epw_extras
    defaults = tuple(_PRESERVED_DEFAULTS[j] for j in _PRESERVED_IDX)
    for i in range(len(year.month)):
        row = [""] * _EPW_FIELDS
        ex = extras[i] if extras is not None else defaults
        for j, val in zip(_PRESERVED_IDX, ex):
            row[j] = val
        row[_IDX_MONTH] = str(int(year.month[i]))
        row[_IDX_DAY] = str(int(year.day[i]))
        row[_IDX_HOUR] = str(int(year.hour[i]))
        row[_IDX_DRY] = f"{year.dry_bulb[i]:.1f}"
        row[_IDX_DEW] = f"{year.dew_point[i]:.1f}"
        row[_IDX_RH] = f"{year.rel_humidity[i]:.0f}"
        row[_IDX_PRESS] = f"{year.pressure[i]:.0f}"
        ghi_q = f"{year.ghi[i]:.0f}"
        if ghi_q == "0":
            # Keep the zero-ghi invariant intact under quantization.
            row[_IDX_GHI], row[_IDX_DNI], row[_IDX_DHI] = "0", "0", "0"
        else:
            row[_IDX_GHI] = ghi_q
            row[_IDX_DNI] = f"{year.dni[i]:.0f}"
            row[_IDX_DHI] = f"{year.dhi[i]:.0f}"
        row[_IDX_WDIR] = f"{year.wind_direction[i]:.0f}"
        row[_IDX_WSPD] = f"{year.wind_speed[i]:.1f}"
        out.append(",".join(row))
    return "\n".join(out) + "\n"


def _format_csv(year: WeatherYear) -> str:
    out = [CSV_HEADER]
    for i in range(len(year.month)):
        out.append(",".join((
            str(int(year.month[i])), str(int(year.day[i])),
            str(int(year.hour[i])),
            str(float(year.dry_bulb[i])), str(float(year.dew_point[i])),
            str(float(year.rel_humidity[i])), str(float(year.pressure[i])),
            str(float(year.ghi[i])), str(float(year.dni[i])),
            str(float(year.dhi[i])),
            str(float(year.wind_speed[i])),
            str(float(year.wind_direction[i])))))
    return "\n".join(out) + "\n"
