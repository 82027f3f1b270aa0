"""Load-component attribution by incremental model variants.

The room is rebuilt in four stages: walls only, then two intermediate
models, then the full room, adding one element of {windows, infiltration,
internal gains} at each stage in a chosen order. In any model without
windows the walls cover the full gross facade. The walls component is the
walls-only energy normalized by gross wall area and rescaled to the net
(actual) wall area; the first added element absorbs the gross-to-net
remainder and every later element is the plain difference between its
model and the previous one. The stages therefore telescope: components
always sum to the full-model total, and components can be negative
(internal gains typically reduce heating).

Infiltration and internal components are additionally split into sensible
and latent parts from the per-mode demand ledgers of the same runs, so
the split sums to each element's increment by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import permutations

from .weather import WeatherYear
from .zone import (AnnualResult, RoomArchetype, SolarCache, simulate_year,
                   SUBSTEP_SECONDS)

ELEMENTS = ("windows", "infiltration", "internal")
DEFAULT_ORDERING = ("windows", "infiltration", "internal")

# Below this absolute total the percentage shares say nothing useful and
# are suppressed.
PERCENT_SUPPRESS_KWH = 10.0

BREAKDOWN_CSV_HEADER = (
    "city,period,scenario,model,mode,ordering,"
    "walls_kWh,windows_kWh,inf_sen_kWh,inf_lat_kWh,int_sen_kWh,int_lat_kWh,"
    "total_kWh,"
    "walls_pct,windows_pct,inf_sen_pct,inf_lat_pct,int_sen_pct,int_lat_pct")


def variant_archetype(archetype: RoomArchetype,
                      included: frozenset) -> RoomArchetype:
    """The room with only the given elements present.

    Excluded windows leave bare gross walls; excluded infiltration zeroes
    the air change rate; excluded internal gains remove occupants and
    lights but keep the occupancy window, which still gates the system.
    """
    unknown = included - set(ELEMENTS)
    if unknown:
        raise ValueError(f"unknown elements {sorted(unknown)}")
    out = archetype
    if "windows" not in included:
        out = replace(out, walls=tuple(replace(w, windows=())
                                       for w in out.walls))
    if "infiltration" not in included:
        out = replace(out, infiltration_ach=0.0)
    if "internal" not in included:
        out = replace(out, schedule=replace(out.schedule, occupants=0,
                                            lighting_w=0.0))
    return out


def wall_component(walls_only_kwh: float, gross_area: float,
                   net_area: float) -> float:
    """Walls-only energy per gross square metre, rescaled to the net area."""
    return walls_only_kwh / gross_area * net_area


def _latent_kwh(result: AnnualResult, mode: str) -> float:
    return result.cooling_latent_kwh if mode == "cooling" else 0.0


def cumulative_sets(ordering) -> list[frozenset]:
    """The four variant element sets of an ordering, walls-only first."""
    sets = [frozenset()]
    for element in ordering:
        sets.append(sets[-1] | {element})
    return sets


def run_variants(archetype: RoomArchetype, weather: WeatherYear,
                 element_sets, dt: float = SUBSTEP_SECONDS,
                 results: dict | None = None) -> dict:
    """Simulate each distinct variant once; `results` seeds/collects a cache."""
    if results is None:
        results = {}
    cache = SolarCache(weather, archetype.ground_albedo)
    for included in element_sets:
        if included not in results:
            results[included] = simulate_year(
                variant_archetype(archetype, included), weather,
                dt=dt, solar_cache=cache)
    return results


@dataclass(frozen=True)
class ComponentBreakdown:
    mode: str                       # "heating" | "cooling"
    ordering: tuple[str, str, str]  # the order elements were added
    walls_kwh: float
    windows_kwh: float
    inf_sensible_kwh: float
    inf_latent_kwh: float
    int_sensible_kwh: float
    int_latent_kwh: float
    total_kwh: float

    def components(self) -> dict[str, float]:
        return {"walls": self.walls_kwh, "windows": self.windows_kwh,
                "inf_sensible": self.inf_sensible_kwh,
                "inf_latent": self.inf_latent_kwh,
                "int_sensible": self.int_sensible_kwh,
                "int_latent": self.int_latent_kwh}

    def element_totals(self) -> dict[str, float]:
        return {"walls": self.walls_kwh, "windows": self.windows_kwh,
                "infiltration": self.inf_sensible_kwh + self.inf_latent_kwh,
                "internal": self.int_sensible_kwh + self.int_latent_kwh}

    def percentages(self) -> dict[str, float] | None:
        """Shares of the total's absolute value, signs kept; None when the
        total is too small to be meaningful."""
        if abs(self.total_kwh) < PERCENT_SUPPRESS_KWH:
            return None
        return {k: 100.0 * v / abs(self.total_kwh)
                for k, v in self.components().items()}


def breakdown_from_results(results: dict, archetype: RoomArchetype,
                           ordering, mode: str) -> ComponentBreakdown:
    """Assemble a breakdown from pre-run variant results."""
    sets = cumulative_sets(ordering)
    energy = [results[s].energy(mode) for s in sets]
    latent = [_latent_kwh(results[s], mode) for s in sets]

    gross = archetype.total_gross_wall_area()
    net = gross - archetype.total_window_area()
    walls = wall_component(energy[0], gross, net)

    split: dict[str, tuple[float, float]] = {}
    windows_total = 0.0
    for k, element in enumerate(ordering):
        total = energy[k + 1] - (walls if k == 0 else energy[k])
        lat = latent[k + 1] - latent[k]
        if element == "windows":
            windows_total = total
        else:
            split[element] = (total - lat, lat)

    inf_sen, inf_lat = split.get("infiltration", (0.0, 0.0))
    int_sen, int_lat = split.get("internal", (0.0, 0.0))
    return ComponentBreakdown(
        mode=mode, ordering=tuple(ordering),
        walls_kwh=walls, windows_kwh=windows_total,
        inf_sensible_kwh=inf_sen, inf_latent_kwh=inf_lat,
        int_sensible_kwh=int_sen, int_latent_kwh=int_lat,
        total_kwh=energy[3])


def attribute_loads(archetype: RoomArchetype, weather: WeatherYear,
                    ordering=DEFAULT_ORDERING, mode: str = "cooling",
                    dt: float = SUBSTEP_SECONDS,
                    results: dict | None = None) -> ComponentBreakdown:
    """Attribute one mode's annual energy to envelope and usage elements."""
    ordering = tuple(ordering)
    if sorted(ordering) != sorted(ELEMENTS):
        raise ValueError(f"ordering must permute {ELEMENTS}, got {ordering}")
    results = run_variants(archetype, weather, cumulative_sets(ordering),
                           dt=dt, results=results)
    return breakdown_from_results(results, archetype, ordering, mode)


def all_orderings() -> list[tuple[str, str, str]]:
    return list(permutations(ELEMENTS))


def attribute_all_orderings(archetype: RoomArchetype, weather: WeatherYear,
                            mode: str = "cooling", dt: float = SUBSTEP_SECONDS,
                            results: dict | None = None
                            ) -> list[ComponentBreakdown]:
    """Breakdowns for all six orderings, reusing each distinct variant run."""
    if results is None:
        results = {}
    needed = set()
    for ordering in all_orderings():
        needed.update(cumulative_sets(ordering))
    run_variants(archetype, weather, sorted(needed, key=sorted), dt=dt,
                 results=results)
    return [breakdown_from_results(results, archetype, ordering, mode)
            for ordering in all_orderings()]


def ordering_spread(breakdowns) -> dict[str, float]:
    """Max minus min percentage share per element across orderings.

    Elements whose percentages are suppressed (small totals) are skipped.
    """
    spans: dict[str, float] = {}
    shares: dict[str, list[float]] = {}
    for b in breakdowns:
        pct = b.percentages()
        if pct is None:
            continue
        totals = b.element_totals()
        denom = abs(b.total_kwh)
        for element, value in totals.items():
            shares.setdefault(element, []).append(100.0 * value / denom)
    for element, values in shares.items():
        spans[element] = max(values) - min(values)
    return spans


def ordering_label(ordering) -> str:
    return "-".join(ordering)


def breakdown_csv_row(b: ComponentBreakdown, city: str, period: str,
                      scenario: str, model: str) -> str:
    pct = b.percentages()
    pct_cells = (["", "", "", "", "", ""] if pct is None else
                 [f"{pct[k]:.2f}" for k in ("walls", "windows", "inf_sensible",
                                            "inf_latent", "int_sensible",
                                            "int_latent")])
    return ",".join([
        city, period, scenario, model, b.mode, ordering_label(b.ordering),
        f"{b.walls_kwh:.3f}", f"{b.windows_kwh:.3f}",
        f"{b.inf_sensible_kwh:.3f}", f"{b.inf_latent_kwh:.3f}",
        f"{b.int_sensible_kwh:.3f}", f"{b.int_latent_kwh:.3f}",
        f"{b.total_kwh:.3f}"] + pct_cells)
