"""roomclim: single-zone room energy simulation with climate morphing.

The package simulates the hourly heating and cooling demand of a small
residential room under a baseline weather year, morphs that year toward
future climate projections, and attributes annual demand to the envelope
and usage elements that cause it.
"""

from .components import (ComponentBreakdown, attribute_all_orderings,
                         attribute_loads, ordering_spread)
from .errors import (ConfigError, ParseError, RoomclimError, StructuralError,
                     ValidationError)
from .morph import (GcmShiftTable, ModelClass, MonthlyShifts, MorphResult,
                    build_model_classes, classes_for_site, idw_interpolate,
                    morph_year, read_shift_tables)
from .psychro import (AirConstants, MoistAirState, dew_point,
                      humidity_ratio_from_rh, rh_from_humidity_ratio,
                      saturation_humidity_ratio, saturation_vapor_pressure)
from .solar import (IrradianceSplit, SolarPosition, brl_diffuse_fraction,
                    incident_on_surface, resplit_year, solar_position,
                    split_ghi)
from .study import (ChangeRecord, StudyConfig, load_study_config,
                    report_changes, run_study)
from .weather import (HourlyWeatherRecord, Location, WeatherYear,
                      monthly_mean, parse_weather, write_weather)
from .zone import (AnnualResult, HvacDemand, Layer, OccupancySchedule,
                   RoomArchetype, Setpoints, WallSpec, WindowSpec, ZoneModel,
                   simulate_year, wall_u_value)

__version__ = "0.1.0"

__all__ = [
    "AirConstants", "AnnualResult", "ChangeRecord", "ComponentBreakdown",
    "ConfigError", "GcmShiftTable", "HourlyWeatherRecord", "HvacDemand",
    "IrradianceSplit", "Layer", "Location", "ModelClass", "MoistAirState",
    "MonthlyShifts", "MorphResult", "OccupancySchedule", "ParseError",
    "RoomArchetype", "RoomclimError", "Setpoints", "SolarPosition",
    "StructuralError", "StudyConfig", "ValidationError", "WallSpec",
    "WeatherYear", "WindowSpec", "ZoneModel",
    "attribute_all_orderings", "attribute_loads", "brl_diffuse_fraction",
    "build_model_classes", "classes_for_site", "dew_point",
    "humidity_ratio_from_rh", "idw_interpolate", "incident_on_surface",
    "load_study_config", "monthly_mean", "morph_year", "ordering_spread",
    "parse_weather", "read_shift_tables", "report_changes", "resplit_year",
    "rh_from_humidity_ratio", "run_study", "saturation_humidity_ratio",
    "saturation_vapor_pressure", "simulate_year", "solar_position",
    "split_ghi", "wall_u_value", "write_weather",
]
