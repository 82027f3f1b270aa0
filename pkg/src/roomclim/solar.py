"""Solar geometry, irradiance splitting and surface incidence.

Positions come from a compact Meeus-style ephemeris evaluated for a nominal
non-leap year, which is adequate for typical-year weather files. Global
horizontal irradiance is divided into direct and diffuse parts with the
Boland-Ridley-Lauret logistic diffuse-fraction model so that morphed files
stay internally consistent.

Angles are degrees, irradiance W/m2 (equivalently Wh/m2 over one hour),
times are hours of local standard time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

SOLAR_CONSTANT = 1367.0  # W/m2

# Logistic coefficients for the diffuse fraction, in predictor order:
# intercept, hourly clearness, apparent solar time, altitude,
# daily clearness, persistence.
BRL_COEFFICIENTS = (-5.38, 6.63, 0.006, -0.007, 1.75, 1.31)

# Direct-normal irradiance is not resolved below this sun altitude; the
# whole global value is treated as diffuse instead.
MIN_BEAM_ALTITUDE = 1.0  # degrees

_DAYS_BEFORE_MONTH = (0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334)

# Julian day of the nominal year's Jan 1, 00:00 UT (2017, non-leap).
_JD_JAN1 = 2457754.5


@dataclass(frozen=True)
class SolarPosition:
    altitude: float             # degrees above horizon, negative at night
    azimuth: float              # degrees clockwise from north
    apparent_solar_time: float  # hours, 0..24


@dataclass(frozen=True)
class IrradianceSplit:
    dni: float               # W/m2, direct normal
    dhi: float               # W/m2, diffuse horizontal
    diffuse_fraction: float  # dhi / ghi, 0..1
    clearness_index: float   # ghi / extraterrestrial horizontal, clipped


def day_of_year(month: int, day: int) -> int:
    """Ordinal day 1..365 for a non-leap year."""
    return _DAYS_BEFORE_MONTH[month - 1] + day


def solar_position(lat: float, lon: float, tz: float, month: int, day: int,
                   hour: float) -> SolarPosition:
    """Sun position for local standard time `hour` (fractional, 0..24).

    `lon` is degrees east, `tz` the offset from UTC in hours. Altitude is
    accurate to a few hundredths of a degree against independent ephemerides.
    """
    doy = day_of_year(month, day)
    jd = _JD_JAN1 + (doy - 1) + (hour - tz) / 24.0
    t = (jd - 2451545.0) / 36525.0

    mean_long = math.radians((280.46646 + t * (36000.76983 + t * 0.0003032)) % 360.0)
    mean_anom = math.radians(357.52911 + t * (35999.05029 - t * 0.0001537))
    ecc = 0.016708634 - t * (0.000042037 + t * 0.0000001267)

    center = (math.sin(mean_anom) * (1.914602 - t * (0.004817 + 0.000014 * t))
              + math.sin(2 * mean_anom) * (0.019993 - 0.000101 * t)
              + math.sin(3 * mean_anom) * 0.000289)
    true_long = mean_long + math.radians(center)
    omega = math.radians(125.04 - 1934.136 * t)
    app_long = true_long - math.radians(0.00569 + 0.00478 * math.sin(omega))

    obliq0 = 23.0 + (26.0 + (21.448 - t * (46.8150 + t * (0.00059 - t * 0.001813))) / 60.0) / 60.0
    obliq = math.radians(obliq0 + 0.00256 * math.cos(omega))

    declination = math.asin(math.sin(obliq) * math.sin(app_long))

    y = math.tan(obliq / 2.0) ** 2
    eot_rad = (y * math.sin(2 * mean_long)
               - 2.0 * ecc * math.sin(mean_anom)
               + 4.0 * ecc * y * math.sin(mean_anom) * math.cos(2 * mean_long)
               - 0.5 * y * y * math.sin(4 * mean_long)
               - 1.25 * ecc * ecc * math.sin(2 * mean_anom))
    eot_min = 4.0 * math.degrees(eot_rad)

    ast = hour + eot_min / 60.0 + 4.0 * (lon - 15.0 * tz) / 60.0
    hour_angle = math.radians(15.0 * (ast - 12.0))

    phi = math.radians(lat)
    sin_alt = (math.sin(phi) * math.sin(declination)
               + math.cos(phi) * math.cos(declination) * math.cos(hour_angle))
    altitude = math.degrees(math.asin(max(-1.0, min(1.0, sin_alt))))

    az_south = math.atan2(math.sin(hour_angle),
                          math.cos(hour_angle) * math.sin(phi)
                          - math.tan(declination) * math.cos(phi))
    azimuth = (math.degrees(az_south) + 180.0) % 360.0

    return SolarPosition(altitude=altitude, azimuth=azimuth,
                         apparent_solar_time=ast % 24.0)


def extraterrestrial_horizontal(doy: int, altitude: float) -> float:
    """Extraterrestrial irradiance on a horizontal plane, W/m2."""
    if altitude <= 0.0:
        return 0.0
    eccentricity = 1.0 + 0.033 * math.cos(2.0 * math.pi * doy / 365.0)
    return SOLAR_CONSTANT * eccentricity * math.sin(math.radians(altitude))


def brl_diffuse_fraction(kt: float, ast: float, altitude: float,
                         kt_daily: float, persistence: float) -> float:
    """Diffuse fraction of global irradiance, 0..1.

    Logistic in hourly clearness, apparent solar time, sun altitude, daily
    clearness and clearness persistence. Near 1 for overcast skies and
    small (about 0.1..0.3) for clear ones.
    """
    b0, b1, b2, b3, b4, b5 = BRL_COEFFICIENTS
    z = b0 + b1 * kt + b2 * ast + b3 * altitude + b4 * kt_daily + b5 * persistence
    return 1.0 / (1.0 + math.exp(z))


def split_ghi(ghi: float, position: SolarPosition, kt: float,
              kt_daily: float, persistence: float) -> IrradianceSplit:
    """Split global horizontal irradiance into direct normal and diffuse parts.

    Below MIN_BEAM_ALTITUDE everything is treated as diffuse. Otherwise
    dhi = d * ghi and dni = (ghi - dhi) / sin(altitude), which reconstructs
    ghi exactly.
    """
    if ghi <= 0.0:
        return IrradianceSplit(0.0, 0.0, 1.0, 0.0)
    if position.altitude <= MIN_BEAM_ALTITUDE:
        return IrradianceSplit(0.0, ghi, 1.0, kt)
    d = brl_diffuse_fraction(kt, position.apparent_solar_time,
                             position.altitude, kt_daily, persistence)
    dhi = d * ghi
    dni = (ghi - dhi) / math.sin(math.radians(position.altitude))
    return IrradianceSplit(dni, dhi, d, kt)


def hourly_positions(lat: float, lon: float, tz: float,
                     months, days) -> list[SolarPosition]:
    """Mid-hour sun positions for a year of hourly records."""
    out = []
    for i, (m, d) in enumerate(zip(months, days)):
        out.append(solar_position(lat, lon, tz, int(m), int(d), (i % 24) + 0.5))
    return out


def clearness_series(ghi, months, days, positions) -> np.ndarray:
    """Hourly clearness index, clipped to 0..1.2; zero when the sun is down."""
    n = len(positions)
    kt = np.zeros(n)
    for i, pos in enumerate(positions):
        if pos.altitude <= 0.0:
            continue
        i0 = extraterrestrial_horizontal(day_of_year(int(months[i]), int(days[i])),
                                         pos.altitude)
        if i0 > 1.0:
            kt[i] = min(max(ghi[i] / i0, 0.0), 1.2)
    return kt


def daily_clearness_series(ghi, months, days, positions) -> np.ndarray:
    """Daily clearness index repeated across each day's hours."""
    n = len(positions)
    out = np.zeros(n)
    for start in range(0, n, 24):
        ghi_sum = 0.0
        i0_sum = 0.0
        for i in range(start, min(start + 24, n)):
            pos = positions[i]
            if pos.altitude <= 0.0:
                continue
            i0_sum += extraterrestrial_horizontal(
                day_of_year(int(months[i]), int(days[i])), pos.altitude)
            ghi_sum += ghi[i]
        kt_day = min(max(ghi_sum / i0_sum, 0.0), 1.2) if i0_sum > 1.0 else 0.0
        out[start:start + 24] = kt_day
    return out


def persistence_series(kt: np.ndarray, positions) -> np.ndarray:
    """Clearness persistence: mean of the adjacent daylight hours' kt.

    One-sided at sunrise and sunset; equal to the hour's own kt for an
    isolated daylight hour.
    """
    n = len(kt)
    daylight = np.array([p.altitude > 0.0 for p in positions])
    out = np.zeros(n)
    for i in range(n):
        if not daylight[i]:
            continue
        same_day = i // 24
        prev_ok = i > 0 and (i - 1) // 24 == same_day and daylight[i - 1]
        next_ok = i + 1 < n and (i + 1) // 24 == same_day and daylight[i + 1]
        if prev_ok and next_ok:
            out[i] = 0.5 * (kt[i - 1] + kt[i + 1])
        elif prev_ok:
            out[i] = kt[i - 1]
        elif next_ok:
            out[i] = kt[i + 1]
        else:
            out[i] = kt[i]
    return out


def resplit_year(year):
    """Recompute dni and dhi for every hour of a WeatherYear from its ghi.

    Returns a new WeatherYear; the input is not modified. Applied to both
    baseline and morphed files so the direct/diffuse division always comes
    from the same model.
    """
    loc = year.location
    positions = hourly_positions(loc.latitude, loc.longitude, loc.timezone,
                                 year.month, year.day)
    kt = clearness_series(year.ghi, year.month, year.day, positions)
    kt_day = daily_clearness_series(year.ghi, year.month, year.day, positions)
    psi = persistence_series(kt, positions)
    n = len(positions)
    dni = np.zeros(n)
    dhi = np.zeros(n)
    for i in range(n):
        s = split_ghi(float(year.ghi[i]), positions[i], float(kt[i]),
                      float(kt_day[i]), float(psi[i]))
        dni[i] = s.dni
        dhi[i] = s.dhi
    return replace(year, dni=dni, dhi=dhi)


def incidence_cosine(position: SolarPosition, surface_azimuth: float,
                     tilt: float = 90.0) -> float:
    """Cosine of the beam incidence angle on a tilted surface, clipped at 0."""
    if position.altitude <= 0.0:
        return 0.0
    alt = math.radians(position.altitude)
    s = math.radians(tilt)
    gamma = math.radians(position.azimuth - surface_azimuth)
    cos_theta = (math.cos(alt) * math.sin(s) * math.cos(gamma)
                 + math.sin(alt) * math.cos(s))
    return max(cos_theta, 0.0)


def tilted_components(split: IrradianceSplit, position: SolarPosition,
                      surface_azimuth: float, tilt: float = 90.0,
                      albedo: float = 0.2) -> tuple[float, float, float]:
    """(beam, sky diffuse, ground reflected) irradiance on a tilted surface, W/m2.

    Isotropic sky and ground; ground reflection uses the global horizontal
    value implied by the split.
    """
    beam = split.dni * incidence_cosine(position, surface_azimuth, tilt)
    sky = split.dhi * (1.0 + math.cos(math.radians(tilt))) / 2.0
    if position.altitude > 0.0:
        ghi = split.dhi + split.dni * math.sin(math.radians(position.altitude))
    else:
        ghi = split.dhi
    ground = ghi * albedo * (1.0 - math.cos(math.radians(tilt))) / 2.0
    return beam, sky, ground


def incident_on_surface(split: IrradianceSplit, position: SolarPosition,
                        surface_azimuth: float, tilt: float = 90.0,
                        albedo: float = 0.2) -> float:
    """Total shortwave irradiance on a tilted surface, W/m2."""
    return sum(tilted_components(split, position, surface_azimuth, tilt, albedo))


def overhang_shaded_fraction(position: SolarPosition, surface_azimuth: float,
                             window_height: float, overhang_depth: float,
                             overhang_gap: float = 0.0) -> float:
    """Fraction of a window's beam-irradiated area blocked by its overhang.

    The overhang is a horizontal strip of the given depth spanning the
    facade, mounted `overhang_gap` metres above the window head. The shadow
    edge sits depth * tan(profile angle) below the overhang, so the fraction
    is 0 for zero depth and clips to 1 once the shadow passes the sill.
    Returns 0 when the sun cannot strike the facade directly.
    """
    if overhang_depth <= 0.0 or position.altitude <= 0.0:
        return 0.0
    gamma = math.radians(position.azimuth - surface_azimuth)
    if math.cos(gamma) <= 0.0:
        return 0.0
    tan_profile = math.tan(math.radians(position.altitude)) / math.cos(gamma)
    shadow = overhang_depth * tan_profile - overhang_gap
    return min(max(shadow / window_height, 0.0), 1.0)
