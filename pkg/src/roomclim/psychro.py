"""Moist-air property relations (Magnus form).

All temperatures in degC, pressures in Pa, humidity ratios in kg water
per kg dry air. Functions accept floats or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Magnus curve fit constants over water
_MAGNUS_A = 610.94   # Pa
_MAGNUS_B = 17.625
_MAGNUS_C = 243.04   # degC

# Ratio of molecular weights, water vapor to dry air
_EPSILON = 0.621945

T_MIN = -60.0  # degC, lower bound of the Magnus fit
T_MAX = 90.0   # degC, upper bound of the Magnus fit


@dataclass(frozen=True)
class AirConstants:
    """Fixed moist-air properties used by the zone heat balance."""

    rho_air: float = 1.204      # kg/m3, dry air near sea level
    c_p: float = 1006.0         # J/(kg K), dry air
    h_fg: float = 2.501e6       # J/kg, latent heat of vaporization at 0 degC


def saturation_vapor_pressure(t_c):
    """Saturation vapor pressure over water, Pa.

    Magnus fit, valid for -60..90 degC. About 611 Pa at 0 degC and
    2339 Pa at 20 degC.
    """
    t = np.asarray(t_c, dtype=float)
    if np.any(t < T_MIN) or np.any(t > T_MAX):
        raise ValueError(f"temperature outside {T_MIN}..{T_MAX} degC range")
    p = _MAGNUS_A * np.exp(_MAGNUS_B * t / (t + _MAGNUS_C))
    return float(p) if np.isscalar(t_c) else p


def humidity_ratio_from_rh(t_c, rh, pressure_pa):
    """Humidity ratio from dry-bulb (degC), relative humidity (0..1), pressure (Pa)."""
    rh_a = np.asarray(rh, dtype=float)
    if np.any(rh_a < 0.0) or np.any(rh_a > 1.0):
        raise ValueError("relative humidity must be within 0..1")
    p_w = rh_a * saturation_vapor_pressure(t_c)
    p_da = np.asarray(pressure_pa, dtype=float) - p_w
    if np.any(p_da <= 0.0):
        raise ValueError("vapor pressure meets or exceeds total pressure")
    w = _EPSILON * p_w / p_da
    return float(w) if np.isscalar(rh) and np.isscalar(t_c) else w


def rh_from_humidity_ratio(w, t_c, pressure_pa):
    """Relative humidity (0..1) from humidity ratio, dry-bulb (degC), pressure (Pa)."""
    w_a = np.asarray(w, dtype=float)
    if np.any(w_a < 0.0):
        raise ValueError("humidity ratio must be non-negative")
    p_w = w_a * np.asarray(pressure_pa, dtype=float) / (_EPSILON + w_a)
    rh = p_w / saturation_vapor_pressure(t_c)
    return float(rh) if np.isscalar(w) and np.isscalar(t_c) else rh


def saturation_humidity_ratio(t_c, pressure_pa):
    """Humidity ratio of saturated air at dry-bulb (degC) and pressure (Pa)."""
    return humidity_ratio_from_rh(t_c, 1.0, pressure_pa)


def dew_point(t_c, rh):
    """Dew-point temperature (degC) from dry-bulb (degC) and relative humidity (0..1).

    Inverts the Magnus fit, so dew_point(t, 1.0) == t exactly and the result
    does not depend on pressure. Raises ValueError for rh <= 0.
    """
    rh_a = np.asarray(rh, dtype=float)
    if np.any(rh_a <= 0.0):
        raise ValueError("dew point undefined for rh <= 0")
    if np.any(rh_a > 1.0):
        raise ValueError("relative humidity must be within 0..1")
    t = np.asarray(t_c, dtype=float)
    alpha = np.log(rh_a) + _MAGNUS_B * t / (t + _MAGNUS_C)
    td = _MAGNUS_C * alpha / (_MAGNUS_B - alpha)
    return float(td) if np.isscalar(t_c) and np.isscalar(rh) else td


@dataclass(frozen=True)
class MoistAirState:
    """A thermodynamic state of zone or outdoor air."""

    dry_bulb: float        # degC
    humidity_ratio: float  # kg/kg
    pressure: float        # Pa

    def __post_init__(self):
        if not T_MIN <= self.dry_bulb <= T_MAX:
            raise ValueError(f"dry_bulb outside {T_MIN}..{T_MAX} degC")
        if self.humidity_ratio < 0.0:
            raise ValueError("humidity_ratio must be non-negative")
        w_sat = saturation_humidity_ratio(self.dry_bulb, self.pressure)
        if self.humidity_ratio > w_sat + 1e-6:
            raise ValueError("humidity_ratio exceeds saturation for this state")

    @property
    def relative_humidity(self) -> float:
        """Relative humidity, 0..1."""
        return rh_from_humidity_ratio(self.humidity_ratio, self.dry_bulb, self.pressure)

    @property
    def dew_point(self) -> float:
        """Dew-point temperature, degC."""
        # Clamp both ends: float round trips can land a hair outside 0..1
        # at exactly-saturated states.
        rh = min(max(self.relative_humidity, 1e-12), 1.0)
        return dew_point(self.dry_bulb, rh)
