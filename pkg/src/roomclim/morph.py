"""Climate-change morphing of baseline weather years.

Monthly change signals from an ensemble of climate models are interpolated
to a site, reduced to three bracketing model classes (min, median, max by
temperature shift) and applied hour by hour: an additive shift plus
mean-preserving stretch for temperature, multiplicative scaling for
humidity ratio, global irradiance and wind speed. Humidity is clamped to
saturation where scaling overshoots, dew point is recomputed, and the
direct/diffuse split is rebuilt from the scaled global irradiance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

import numpy as np

from . import solar
from .errors import ParseError, StructuralError, ValidationError
from .psychro import (humidity_ratio_from_rh, rh_from_humidity_ratio,
                      saturation_humidity_ratio, dew_point)
from .weather import WeatherYear

EARTH_RADIUS_KM = 6371.0
EXACT_MATCH_KM = 1.0     # targets closer than this take the grid value as-is
IDW_POWER = 2.0
IDW_NEIGHBORS = 4

SHIFT_FILE_HEADER = ("gcm_id,scenario,period,lat,lon,month,"
                     "dT_C,alpha,q_scale,ghi_scale,wind_scale")

SCENARIOS = ("RCP4.5", "RCP8.5")
PERIODS = ("2030s", "2060s", "2090s")
MODEL_CLASS_KINDS = ("min", "median", "max")

_VARIABLES = ("dt", "alpha", "q_scale", "ghi_scale", "wind_scale")


@dataclass(frozen=True)
class GcmShiftTable:
    """Monthly change signals of one climate model on a lat/lon grid.

    Each variable array has shape (n_points, 12), column m-1 holding
    month m.
    """

    gcm_id: str
    scenario: str
    period: str
    lat: np.ndarray
    lon: np.ndarray
    dt: np.ndarray          # degC, additive
    alpha: np.ndarray       # stretch factor, dimensionless
    q_scale: np.ndarray     # humidity ratio multiplier
    ghi_scale: np.ndarray   # global irradiance multiplier
    wind_scale: np.ndarray  # wind speed multiplier


@dataclass(frozen=True)
class MonthlyShifts:
    """One model's change signals interpolated to a single site."""

    gcm_id: str
    scenario: str
    period: str
    dt: np.ndarray
    alpha: np.ndarray
    q_scale: np.ndarray
    ghi_scale: np.ndarray
    wind_scale: np.ndarray


@dataclass(frozen=True)
class ModelClass:
    """A bracketing ensemble member: per-month shift plus companions.

    `source_gcms[m-1]` names the model whose companion variables
    (stretch, humidity, irradiance, wind) were adopted for month m.
    """

    kind: str  # "min" | "median" | "max"
    scenario: str
    period: str
    dt: np.ndarray
    alpha: np.ndarray
    q_scale: np.ndarray
    ghi_scale: np.ndarray
    wind_scale: np.ndarray
    source_gcms: tuple[str, ...]

    @classmethod
    def identity(cls, kind: str = "median", scenario: str = "-",
                 period: str = "-") -> "ModelClass":
        """A class that morphs a year onto itself."""
        z = np.zeros(12)
        one = np.ones(12)
        return cls(kind, scenario, period, z, z.copy(), one, one.copy(),
                   one.copy(), ("-",) * 12)


@dataclass
class MorphResult:
    year: WeatherYear
    clamped_hours: int  # hours where humidity was capped at saturation


def great_circle_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Haversine distance in kilometres."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dphi = p2 - p1
    dlam = math.radians(lon2 - lon1)
    a = (math.sin(dphi / 2.0) ** 2
         + math.cos(p1) * math.cos(p2) * math.sin(dlam / 2.0) ** 2)
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


def idw_interpolate(points, target_lat: float, target_lon: float,
                    power: float = IDW_POWER,
                    max_points: int = IDW_NEIGHBORS) -> float:
    """Inverse-distance-weighted estimate from (lat, lon, value) triples.

    Uses the `max_points` nearest points by great-circle distance. A point
    within EXACT_MATCH_KM of the target short-circuits to that value.
    """
    pts = list(points)
    if not pts:
        raise ValueError("no grid points supplied")
    dists = np.array([great_circle_km(la, lo, target_lat, target_lon)
                      for la, lo, _ in pts])
    values = np.array([v for _, _, v in pts])
    nearest = int(np.argmin(dists))
    if dists[nearest] < EXACT_MATCH_KM:
        return float(values[nearest])
    order = np.argsort(dists, kind="stable")[:max_points]
    w = dists[order] ** (-power)
    return float(np.sum(w * values[order]) / np.sum(w))


# --- shift file ingestion ----------------------------------------------------

def read_shift_tables(source) -> list[GcmShiftTable]:
    """Parse a shift CSV into one table per (gcm, scenario, period) group.

    Every grid point must carry all 12 months of every variable; a blank
    alpha cell means no stretch. Tables are returned sorted by key so
    downstream processing is order-stable.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as f:
            text = f.read()
    else:
        text = source.read()
    lines = text.splitlines()
    if not lines:
        raise StructuralError("empty shift file")
    if lines[0].strip() != SHIFT_FILE_HEADER:
        raise ParseError(f"header must be exactly {SHIFT_FILE_HEADER!r}", 1)

    groups: dict[tuple[str, str, str], dict[tuple[float, float], dict[int, tuple]]] = {}
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        f = line.split(",")
        if len(f) != 11:
            raise ParseError(f"expected 11 fields, found {len(f)}", i)
        gcm, scenario, period = f[0].strip(), f[1].strip(), f[2].strip()
        if not gcm:
            raise ValidationError("gcm_id", gcm, "empty", i)
        if scenario not in SCENARIOS:
            raise ValidationError("scenario", scenario,
                                  f"expected one of {SCENARIOS}", i)
        if period not in PERIODS:
            raise ValidationError("period", period,
                                  f"expected one of {PERIODS}", i)
        try:
            lat, lon = float(f[3]), float(f[4])
            mon = int(f[5])
            d_t = float(f[6])
            alpha = 0.0 if f[7].strip() == "" else float(f[7])
            scales = tuple(float(x) for x in f[8:11])
        except ValueError as exc:
            raise ParseError(str(exc), i) from None
        if not 1 <= mon <= 12:
            raise ValidationError("month", mon, "must be 1..12", i)
        if alpha <= -1.0:
            raise ValidationError("alpha", alpha, "must exceed -1", i)
        for name, v in zip(("q_scale", "ghi_scale", "wind_scale"), scales):
            if v <= 0.0:
                raise ValidationError(name, v, "must be positive", i)
        point = groups.setdefault((gcm, scenario, period), {}).setdefault(
            (lat, lon), {})
        if mon in point:
            raise StructuralError(
                f"line {i}: duplicate month {mon} for {gcm} at ({lat}, {lon})")
        point[mon] = (d_t, alpha) + scales

    tables = []
    for (gcm, scenario, period), grid in sorted(groups.items()):
        lats, lons = [], []
        arrays = {v: [] for v in _VARIABLES}
        for (lat, lon), months in sorted(grid.items()):
            missing = sorted(set(range(1, 13)) - set(months))
            if missing:
                raise StructuralError(
                    f"{gcm} {scenario} {period} at ({lat}, {lon}): "
                    f"missing months {missing}")
            lats.append(lat)
            lons.append(lon)
            rows = [months[m] for m in range(1, 13)]
            for k, v in enumerate(_VARIABLES):
                arrays[v].append([r[k] for r in rows])
        tables.append(GcmShiftTable(
            gcm_id=gcm, scenario=scenario, period=period,
            lat=np.array(lats), lon=np.array(lons),
            **{v: np.array(arrays[v]) for v in _VARIABLES}))
    return tables


def table_at_location(table: GcmShiftTable, lat: float, lon: float,
                      power: float = IDW_POWER,
                      max_points: int = IDW_NEIGHBORS) -> MonthlyShifts:
    """Interpolate every variable of a table to one site, month by month."""
    out = {}
    for v in _VARIABLES:
        grid = getattr(table, v)
        out[v] = np.array([
            idw_interpolate(zip(table.lat, table.lon, grid[:, m]),
                            lat, lon, power, max_points)
            for m in range(12)])
    return MonthlyShifts(gcm_id=table.gcm_id, scenario=table.scenario,
                         period=table.period, **out)


# --- model classes -----------------------------------------------------------

def _decimal_mean(a: float, b: float) -> float:
    """Mean of two published decimal values without binary rounding noise."""
    return float((Decimal(str(a)) + Decimal(str(b))) / 2)


def build_model_classes(shift_sets) -> dict[str, ModelClass]:
    """Reduce an ensemble of per-site shifts to min, median and max classes.

    For each month the minimum and maximum temperature shifts select their
    models outright; companion variables come from the selected model. The
    median class takes the statistical median of the shifts (for an even
    ensemble, the exact mean of the two middle values) and companions from
    the model whose shift lies nearest it. All ties resolve to the
    lexicographically smallest gcm_id.
    """
    sets = sorted(shift_sets, key=lambda s: s.gcm_id)
    if len(sets) < 2:
        raise ValueError("need at least two models to build classes")
    scenario = sets[0].scenario
    period = sets[0].period
    for s in sets:
        if s.scenario != scenario or s.period != period:
            raise ValueError("all shift sets must share scenario and period")

    picks = {kind: {"dt": np.zeros(12), "gcms": []} for kind in MODEL_CLASS_KINDS}
    companions = {kind: {v: np.zeros(12) for v in _VARIABLES[1:]}
                  for kind in MODEL_CLASS_KINDS}

    for m in range(12):
        ranked = sorted(sets, key=lambda s: (float(s.dt[m]), s.gcm_id))
        chosen = {"min": ranked[0], "max": ranked[-1]}
        n = len(ranked)
        if n % 2:
            med = float(ranked[n // 2].dt[m])
        else:
            med = _decimal_mean(float(ranked[n // 2 - 1].dt[m]),
                                float(ranked[n // 2].dt[m]))
        chosen["median"] = min(
            ranked, key=lambda s: (abs(float(s.dt[m]) - med), s.gcm_id))
        stats = {"min": float(ranked[0].dt[m]),
                 "median": med,
                 "max": float(ranked[-1].dt[m])}
        for kind in MODEL_CLASS_KINDS:
            picks[kind]["dt"][m] = stats[kind]
            picks[kind]["gcms"].append(chosen[kind].gcm_id)
            for v in _VARIABLES[1:]:
                companions[kind][v][m] = float(getattr(chosen[kind], v)[m])

    return {kind: ModelClass(kind=kind, scenario=scenario, period=period,
                             dt=picks[kind]["dt"],
                             source_gcms=tuple(picks[kind]["gcms"]),
                             **companions[kind])
            for kind in MODEL_CLASS_KINDS}


def classes_for_site(tables, lat: float, lon: float) -> dict[str, ModelClass]:
    """Interpolate tables to a site and build the three model classes."""
    return build_model_classes([table_at_location(t, lat, lon) for t in tables])


# --- morphing ----------------------------------------------------------------

def morph_year(baseline: WeatherYear, model: ModelClass) -> MorphResult:
    """Apply one model class to a baseline year.

    Temperature gets the monthly shift plus a stretch about the baseline
    monthly mean, so the morphed monthly mean moves by exactly the shift.
    The humidity ratio is scaled and capped at saturation for the new
    temperature (capped hours are counted, not fatal). Global irradiance
    and wind speed are scaled; the direct/diffuse split and the dew point
    are then rebuilt so the file stays self-consistent.
    """
    out = baseline.copy()
    midx = baseline.month - 1
    means = np.array([np.mean(baseline.dry_bulb[baseline.month == m])
                      for m in range(1, 13)])

    t0 = baseline.dry_bulb
    t1 = t0 + model.dt[midx] + model.alpha[midx] * (t0 - means[midx])

    w0 = humidity_ratio_from_rh(t0, baseline.rel_humidity / 100.0,
                                baseline.pressure)
    w1 = w0 * model.q_scale[midx]
    w_sat = saturation_humidity_ratio(t1, baseline.pressure)
    clamped = int(np.count_nonzero(w1 > w_sat))
    w1 = np.minimum(w1, w_sat)

    rh1 = np.minimum(rh_from_humidity_ratio(w1, t1, baseline.pressure), 1.0)
    dew1 = np.maximum(dew_point(t1, np.maximum(rh1, 1e-9)), -89.9)

    out.dry_bulb = t1
    out.rel_humidity = rh1 * 100.0
    out.dew_point = dew1
    out.ghi = baseline.ghi * model.ghi_scale[midx]
    out.wind_speed = baseline.wind_speed * model.wind_scale[midx]

    morphed = solar.resplit_year(out)
    morphed.validate()
    return MorphResult(year=morphed, clamped_hours=clamped)
