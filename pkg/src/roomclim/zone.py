"""Single-zone room model with ideal heating, cooling and dehumidification.

The room is a rectangular box with one or more exterior walls; remaining
surfaces are adiabatic. Each exterior wall is a 1-D multilayer slab solved
with an implicit finite-difference scheme on a fixed sub-hourly step, with
a combined convection boundary and absorbed solar outside and a film
coefficient to the zone air inside. Windows are massless conductors whose
transmitted solar (less overhang shading of the beam part) goes straight
to the zone air. The zone air holds one temperature and one humidity
ratio; an ideal system pins them to the setpoints during occupied hours
and is off otherwise.

The sensible balance solved each sub-step is

    Q_sys = sum(Q_internal) + sum(h A (T_surface - T_zone))
            + (m_inf c_p + sum(U A)_windows) (T_out - T_zone)
            - rho V c_p dT_zone/dt

with Q_sys positive when the system removes heat (cooling) and negative
when it must add heat. The moisture balance has the same shape with
humidity ratios and the latent heat of vaporization, and the system never
adds moisture.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

from . import solar as _solar
from .psychro import AirConstants
from .weather import WeatherYear

logger = logging.getLogger(__name__)

SUBSTEP_SECONDS = 600.0     # default integration step
WARMUP_TOLERANCE = 0.01     # degC, max node change between day-one repeats
WARMUP_MAX_REPEATS = 30
MAX_CELL_THICKNESS = 0.05   # m, finite-difference cell size cap
MIN_CELLS_PER_LAYER = 2     # gives >= 3 nodes per layer

# Magnus constants, duplicated from psychro for the scalar hot path.
_MA, _MB, _MC, _MEPS = 610.94, 17.625, 243.04, 0.621945


def _w_from_rh(t: float, rh: float, p: float) -> float:
    pw = rh * _MA * math.exp(_MB * t / (t + _MC))
    return _MEPS * pw / (p - pw)


@dataclass(frozen=True)
class Layer:
    """One homogeneous wall layer, outside to inside order."""

    thickness: float      # m
    conductivity: float   # W/(m K)
    density: float        # kg/m3
    specific_heat: float  # J/(kg K)


@dataclass(frozen=True)
class WindowSpec:
    width: float = 1.5            # m
    height: float = 1.0           # m
    u_value: float = 5.7          # W/(m2 K), air to air
    shgc: float = 0.81            # solar heat gain coefficient
    shade_multiplier: float = 0.7  # static interior drapes
    overhang_depth: float = 0.6   # m, horizontal strip above the head
    overhang_gap: float = 0.0     # m between window head and overhang

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class WallSpec:
    """An exterior wall: azimuth, facade length and its windows."""

    azimuth: float                 # degrees clockwise from north
    length: float                  # m along the facade
    windows: tuple[WindowSpec, ...] = ()


@dataclass(frozen=True)
class OccupancySchedule:
    """Occupants and lights by hour of day; hours are 0..23 starts.

    A window (start, end) covers start <= h < end and wraps past
    midnight when start > end; (0, 24) means always.
    """

    occupied_start: int = 21
    occupied_end: int = 7
    occupants: int = 2
    sensible_per_person: float = 70.0  # W
    latent_per_person: float = 45.0    # W
    lighting_w: float = 54.0
    lighting_start: int = 21
    lighting_end: int = 23

    @staticmethod
    def _in_window(hour: int, start: int, end: int) -> bool:
        if start < end:
            return start <= hour < end
        if start > end:
            return hour >= start or hour < end
        return False

    def occupied(self, hour: int) -> bool:
        return self._in_window(hour, self.occupied_start, self.occupied_end)

    def lights_on(self, hour: int) -> bool:
        return self._in_window(hour, self.lighting_start, self.lighting_end)


@dataclass(frozen=True)
class Setpoints:
    heating: float = 18.0       # degC
    cooling: float = 26.0       # degC
    dehumidify_rh: float = 0.65  # relative humidity ceiling, 0..1


def default_layers() -> tuple[Layer, ...]:
    """Plastered solid brick wall, outside to inside."""
    return (Layer(0.015, 0.72, 1860.0, 840.0),
            Layer(0.230, 0.81, 1760.0, 840.0),
            Layer(0.015, 0.72, 1860.0, 840.0))


@dataclass(frozen=True)
class RoomArchetype:
    """Geometry, construction, schedules and setpoints of the room."""

    width: float = 3.33    # m
    depth: float = 4.03    # m
    height: float = 3.18   # m
    walls: tuple[WallSpec, ...] = (
        WallSpec(azimuth=0.0, length=4.03, windows=(WindowSpec(),)),
        WallSpec(azimuth=90.0, length=3.33, windows=(WindowSpec(),)),
    )
    layers: tuple[Layer, ...] = field(default_factory=default_layers)
    infiltration_ach: float = 0.75      # air changes per hour
    schedule: OccupancySchedule = OccupancySchedule()
    setpoints: Setpoints = Setpoints()
    h_in: float = 8.3                   # W/(m2 K), interior film
    h_out: float = 17.0                 # W/(m2 K), exterior film
    exterior_absorptance: float = 0.6   # shortwave, opaque walls
    ground_albedo: float = 0.2

    @property
    def volume(self) -> float:
        return self.width * self.depth * self.height

    def wall_gross_area(self, wall: WallSpec) -> float:
        return wall.length * self.height

    def wall_net_area(self, wall: WallSpec) -> float:
        return self.wall_gross_area(wall) - sum(w.area for w in wall.windows)

    def total_gross_wall_area(self) -> float:
        return sum(self.wall_gross_area(w) for w in self.walls)

    def total_window_area(self) -> float:
        return sum(win.area for w in self.walls for win in w.windows)

    def with_orientation(self, azimuths: tuple[float, float]) -> "RoomArchetype":
        """The same room with its two exterior walls facing new directions."""
        if len(azimuths) != len(self.walls):
            raise ValueError("need one azimuth per exterior wall")
        walls = tuple(replace(w, azimuth=a)
                      for w, a in zip(self.walls, azimuths))
        return replace(self, walls=walls)

    def validate(self) -> None:
        if min(self.width, self.depth, self.height) <= 0:
            raise ValueError("room dimensions must be positive")
        for wall in self.walls:
            if self.wall_net_area(wall) <= 0:
                raise ValueError("windows exceed their wall's area")
        for layer in self.layers:
            if min(layer.thickness, layer.conductivity, layer.density,
                   layer.specific_heat) <= 0:
                raise ValueError("layer properties must be positive")
        if self.infiltration_ach < 0:
            raise ValueError("infiltration must be non-negative")
        if self.setpoints.heating > self.setpoints.cooling:
            raise ValueError("heating setpoint above cooling setpoint")


def wall_u_value(layers, h_in: float, h_out: float) -> float:
    """Air-to-air steady conductance of a layered wall, W/(m2 K)."""
    r = 1.0 / h_out + sum(l.thickness / l.conductivity for l in layers) + 1.0 / h_in
    return 1.0 / r


@dataclass
class ZoneState:
    """Prognostic variables: wall node temperatures and zone air."""

    wall_nodes: list[list[float]]
    t_zone: float   # degC
    w_zone: float   # kg/kg


@dataclass(frozen=True)
class HvacDemand:
    """Energy delivered over one hour, J; magnitudes are positive."""

    heating: float
    cooling_sensible: float
    cooling_latent: float
    mode: str  # "heating" | "cooling_sensible" | "dehumidify" | "off"

    @property
    def total(self) -> float:
        return self.heating + self.cooling_sensible + self.cooling_latent


@dataclass
class AnnualResult:
    heating_kwh: float
    cooling_sensible_kwh: float
    cooling_latent_kwh: float
    usage_hours: int
    warmup_repeats: int
    max_sensible_residual_w: float
    max_latent_residual_w: float
    trace: list | None = None

    @property
    def cooling_total_kwh(self) -> float:
        return self.cooling_sensible_kwh + self.cooling_latent_kwh

    def energy(self, mode: str) -> float:
        """Annual kWh for attribution: 'heating' or 'cooling' (total)."""
        if mode == "heating":
            return self.heating_kwh
        if mode == "cooling":
            return self.cooling_total_kwh
        raise ValueError(f"unknown mode {mode!r}")


RESULT_CSV_HEADER = ("city,period,scenario,model,heating_kWh,"
                     "cooling_sensible_kWh,cooling_latent_kWh,"
                     "cooling_total_kWh,usage_hours")

TRACE_CSV_HEADER = ("month,day,hour,t_zone_C,w_zone_kgkg,rh_pct,"
                    "heating_Wh,cooling_sensible_Wh,cooling_latent_Wh,mode")


def result_csv_row(result: AnnualResult, city: str, period: str,
                   scenario: str, model: str) -> str:
    return (f"{city},{period},{scenario},{model},"
            f"{result.heating_kwh:.3f},{result.cooling_sensible_kwh:.3f},"
            f"{result.cooling_latent_kwh:.3f},{result.cooling_total_kwh:.3f},"
            f"{result.usage_hours}")


class SolarCache:
    """Per-hour surface irradiance shared between simulations of one year."""

    def __init__(self, weather: WeatherYear, albedo: float):
        loc = weather.location
        self.albedo = albedo
        self.positions = _solar.hourly_positions(
            loc.latitude, loc.longitude, loc.timezone,
            weather.month, weather.day)
        self._dni = weather.dni
        self._dhi = weather.dhi
        self._parts: dict[float, list[tuple[float, float, float]]] = {}
        self._shade: dict[tuple, list[float]] = {}

    def surface_parts(self, azimuth: float):
        """(beam, sky, ground) on a vertical surface for every hour, W/m2."""
        key = round(azimuth, 6)
        if key not in self._parts:
            out = []
            for i, pos in enumerate(self.positions):
                split = _solar.IrradianceSplit(float(self._dni[i]),
                                               float(self._dhi[i]), 0.0, 0.0)
                out.append(_solar.tilted_components(split, pos, azimuth,
                                                    90.0, self.albedo))
            self._parts[key] = out
        return self._parts[key]

    def shade_fractions(self, azimuth: float, window: WindowSpec):
        key = (round(azimuth, 6), window.height, window.overhang_depth,
               window.overhang_gap)
        if key not in self._shade:
            self._shade[key] = [
                _solar.overhang_shaded_fraction(pos, azimuth, window.height,
                                                window.overhang_depth,
                                                window.overhang_gap)
                for pos in self.positions]
        return self._shade[key]


class ZoneModel:
    """A room bound to one weather year, ready to run."""

    def __init__(self, archetype: RoomArchetype, weather: WeatherYear,
                 dt: float = SUBSTEP_SECONDS,
                 constants: AirConstants = AirConstants(),
                 solar_cache: SolarCache | None = None):
        archetype.validate()
        if 3600.0 % dt:
            raise ValueError("sub-step must divide one hour evenly")
        self.archetype = archetype
        self.weather = weather
        self.dt = dt
        self.constants = constants
        self.steps_per_hour = int(round(3600.0 / dt))

        rho, cp = constants.rho_air, constants.c_p
        self.cz = rho * archetype.volume * cp          # J/K, zone air
        self.cw = rho * archetype.volume               # kg, dry air mass proxy
        self.m_inf = rho * archetype.volume * archetype.infiltration_ach / 3600.0
        logger.debug("infiltration %.2f 1/h = %.1f L/s",
                     archetype.infiltration_ach,
                     archetype.volume * archetype.infiltration_ach / 3.6)

        self._build_walls()
        self._build_gains()
        self._build_forcing(solar_cache)

    # -- setup ---------------------------------------------------------------

    def _build_walls(self):
        arch = self.archetype
        self.walls = []
        for wall in arch.walls:
            cells = []
            for layer in arch.layers:
                n = max(MIN_CELLS_PER_LAYER,
                        math.ceil(layer.thickness / MAX_CELL_THICKNESS))
                dx = layer.thickness / n
                cells.extend([(dx, layer.conductivity,
                               layer.density * layer.specific_heat)] * n)
            n_nodes = len(cells) + 1
            cond = [k / dx for dx, k, _ in cells]          # W/(m2 K) per cell
            cap = [0.0] * n_nodes                          # J/(m2 K) per node
            for j, (dx, _, rc) in enumerate(cells):
                cap[j] += rc * dx / 2.0
                cap[j + 1] += rc * dx / 2.0

            dt = self.dt
            beta = [c / dt for c in cap]
            h_in, h_out = arch.h_in, arch.h_out
            last = n_nodes - 1
            diag = [beta[0] + h_out + cond[0]]
            sub = [0.0]
            sup = [-cond[0]]
            for j in range(1, last):
                sub.append(-cond[j - 1])
                diag.append(beta[j] + cond[j - 1] + cond[j])
                sup.append(-cond[j])
            sub.append(-cond[last - 1])
            diag.append(beta[last] + cond[last - 1] + h_in)
            sup.append(0.0)

            den = [diag[0]]
            cpf = [sup[0] / diag[0]]
            for j in range(1, n_nodes):
                d = diag[j] - sub[j] * cpf[j - 1]
                den.append(d)
                cpf.append(sup[j] / d)

            # Response of the wall to a unit zone temperature.
            rhs = [0.0] * n_nodes
            rhs[last] = h_in
            v = self._thomas(sub, den, cpf, rhs)

            self.walls.append({
                "n": n_nodes,
                "beta": beta,
                "sub": sub,
                "den": den,
                "cpf": cpf,
                "v": v,
                "v_last": v[last],
                "area": arch.wall_net_area(wall),
                "spec": wall,
            })
        self.ua_windows = sum(win.u_value * win.area
                              for w in arch.walls for win in w.windows)

    @staticmethod
    def _thomas(sub, den, cpf, rhs):
        n = len(rhs)
        dp = [0.0] * n
        dp[0] = rhs[0] / den[0]
        for j in range(1, n):
            dp[j] = (rhs[j] - sub[j] * dp[j - 1]) / den[j]
        x = [0.0] * n
        x[n - 1] = dp[n - 1]
        for j in range(n - 2, -1, -1):
            x[j] = dp[j] - cpf[j] * x[j + 1]
        return x

    def _build_gains(self):
        sched = self.archetype.schedule
        hfg = self.constants.h_fg
        self.occupied = [sched.occupied(h) for h in range(24)]
        self.gain_sensible = [0.0] * 24   # W
        self.gain_latent_kgps = [0.0] * 24
        for h in range(24):
            if sched.occupied(h):
                self.gain_sensible[h] += sched.occupants * sched.sensible_per_person
                self.gain_latent_kgps[h] += (sched.occupants
                                             * sched.latent_per_person / hfg)
            if sched.lights_on(h):
                self.gain_sensible[h] += sched.lighting_w

    def _build_forcing(self, cache: SolarCache | None):
        wx = self.weather
        arch = self.archetype
        n = len(wx.month)
        self.t_out = [float(v) for v in wx.dry_bulb]
        self.p_out = [float(v) for v in wx.pressure]
        self.w_out = [_w_from_rh(self.t_out[i],
                                 min(float(wx.rel_humidity[i]), 100.0) / 100.0,
                                 self.p_out[i])
                      for i in range(n)]

        if self.walls and cache is None:
            cache = SolarCache(wx, arch.ground_albedo)

        self.win_solar = [0.0] * n  # W into the zone through all windows
        for wall in self.walls:
            spec = wall["spec"]
            if cache is None:
                wall["flux"] = [0.0] * n
                continue
            parts = cache.surface_parts(spec.azimuth)
            a = arch.exterior_absorptance
            wall["flux"] = [a * (b + s + g) for b, s, g in parts]
            for win in spec.windows:
                shade = cache.shade_fractions(spec.azimuth, win)
                factor = win.shgc * win.shade_multiplier * win.area
                ws = self.win_solar
                for i, (b, s, g) in enumerate(parts):
                    ws[i] += factor * (b * (1.0 - shade[i]) + s + g)

    # -- stepping ------------------------------------------------------------

    def initial_state(self) -> ZoneState:
        t0 = self.t_out[0]
        return ZoneState(wall_nodes=[[t0] * w["n"] for w in self.walls],
                         t_zone=0.5 * (self.archetype.setpoints.heating
                                       + self.archetype.setpoints.cooling),
                         w_zone=self.w_out[0])

    def step_hour(self, state: ZoneState, i: int,
                  prev: int | None = None) -> HvacDemand:
        """Advance one hour (all sub-steps); returns the hour's demand.

        `prev` selects the record whose values anchor the start-of-hour
        interpolation; it defaults to the previous hour, wrapping at the
        start of the year.
        """
        if prev is None:
            prev = i - 1
        dt = self.dt
        nstep = self.steps_per_hour
        arch = self.archetype
        setp = arch.setpoints
        hod = i % 24
        occupied = self.occupied[hod]
        q_int = self.gain_sensible[hod]
        s_lat = self.gain_latent_kgps[hod]
        q_sol = self.win_solar[i]
        t0h, t1h = self.t_out[prev], self.t_out[i]
        w0h, w1h = self.w_out[prev], self.w_out[i]
        p_h = self.p_out[i]
        cz_dt = self.cz / dt
        cw_dt = self.cw / dt
        hfg = self.constants.h_fg
        g_cond = self.m_inf * self.constants.c_p + self.ua_windows
        walls = self.walls
        nodes = state.wall_nodes
        t_heat, t_cool = setp.heating, setp.cooling
        rh_max = setp.dehumidify_rh

        heat_j = cool_s_j = cool_l_j = 0.0
        max_rs = max_rl = 0.0

        for s in range(1, nstep + 1):
            f = s / nstep
            t_o = t0h + (t1h - t0h) * f
            w_o = w0h + (w1h - w0h) * f

            # Wall forward/backward sweeps with the zone term left symbolic.
            u_list = []
            conv_num = 0.0   # sum area*h*u_last
            conv_den = 0.0   # sum area*h*(1 - v_last)
            for k, wall in enumerate(walls):
                beta = wall["beta"]
                sub = wall["sub"]
                den = wall["den"]
                cpf = wall["cpf"]
                tw = nodes[k]
                nn = wall["n"]
                dp = [0.0] * nn
                dp[0] = (beta[0] * tw[0] + arch.h_out * t_o
                         + wall["flux"][i]) / den[0]
                for j in range(1, nn):
                    dp[j] = (beta[j] * tw[j] - sub[j] * dp[j - 1]) / den[j]
                u = [0.0] * nn
                u[nn - 1] = dp[nn - 1]
                for j in range(nn - 2, -1, -1):
                    u[j] = dp[j] - cpf[j] * u[j + 1]
                u_list.append(u)
                ah = wall["area"] * arch.h_in
                conv_num += ah * u[nn - 1]
                conv_den += ah * (1.0 - wall["v_last"])

            t_prev = state.t_zone
            t_free = ((cz_dt * t_prev + q_int + q_sol + g_cond * t_o + conv_num)
                      / (cz_dt + g_cond + conv_den))

            q_heat = q_cool = 0.0
            pinned = False
            if occupied and t_free > t_cool:
                t_new = t_cool
                pinned = True
            elif occupied and t_free < t_heat:
                t_new = t_heat
                pinned = True
            else:
                t_new = t_free

            for k, wall in enumerate(walls):
                u = u_list[k]
                v = wall["v"]
                tw = nodes[k]
                for j in range(wall["n"]):
                    tw[j] = u[j] + v[j] * t_new

            conv = sum(wall["area"] * arch.h_in * (nodes[k][wall["n"] - 1] - t_new)
                       for k, wall in enumerate(walls))
            balance = (q_int + q_sol + conv + g_cond * (t_o - t_new)
                       - cz_dt * (t_new - t_prev))
            if pinned:
                if balance > 0.0:
                    q_cool = balance
                else:
                    q_heat = -balance
                resid = abs((q_cool - q_heat) - balance)
            else:
                resid = abs(balance)
            if resid > max_rs:
                max_rs = resid

            # Moisture balance at the settled zone temperature.
            w_prev = state.w_zone
            w_free = ((cw_dt * w_prev + s_lat + self.m_inf * w_o)
                      / (cw_dt + self.m_inf))
            q_lat = 0.0
            w_new = w_free
            if occupied:
                w_cap = _w_from_rh(t_new, rh_max, p_h)
                if w_free > w_cap:
                    w_new = w_cap
                    q_lat = hfg * (s_lat + self.m_inf * (w_o - w_cap)
                                   - cw_dt * (w_cap - w_prev))
                    if q_lat < 0.0:
                        q_lat = 0.0
            resid_l = abs(q_lat - hfg * (s_lat + self.m_inf * (w_o - w_new)
                                         - cw_dt * (w_new - w_prev)))
            if resid_l > max_rl:
                max_rl = resid_l

            state.t_zone = t_new
            state.w_zone = w_new
            heat_j += q_heat * dt
            cool_s_j += q_cool * dt
            cool_l_j += q_lat * dt

        if heat_j > 0.0:
            mode = "heating"
        elif cool_s_j > 0.0:
            mode = "cooling_sensible"
        elif cool_l_j > 0.0:
            mode = "dehumidify"
        else:
            mode = "off"
        self._last_residuals = (max_rs, max_rl)
        return HvacDemand(heat_j, cool_s_j, cool_l_j, mode)

    def warm_up(self, state: ZoneState) -> int:
        """Repeat the first day until the walls settle; returns repeat count."""
        repeats = 0
        prev_snapshot = None
        while repeats < WARMUP_MAX_REPEATS:
            for i in range(24):
                self.step_hour(state, i, prev=23 if i == 0 else i - 1)
            repeats += 1
            snapshot = [t for wall in state.wall_nodes for t in wall]
            snapshot.append(state.t_zone)
            if prev_snapshot is not None:
                change = max(abs(a - b) for a, b in zip(snapshot, prev_snapshot))
                if change < WARMUP_TOLERANCE:
                    break
            prev_snapshot = snapshot
        return repeats

    def run(self, trace: bool = False) -> AnnualResult:
        state = self.initial_state()
        repeats = self.warm_up(state)
        wx = self.weather
        heat = cool_s = cool_l = 0.0
        usage = 0
        max_rs = max_rl = 0.0
        rows = [] if trace else None
        for i in range(len(self.t_out)):
            demand = self.step_hour(state, i)
            rs, rl = self._last_residuals
            if rs > max_rs:
                max_rs = rs
            if rl > max_rl:
                max_rl = rl
            heat += demand.heating
            cool_s += demand.cooling_sensible
            cool_l += demand.cooling_latent
            if demand.total > 1e-6:
                usage += 1
            if trace:
                p = self.p_out[i]
                pws = _MA * math.exp(_MB * state.t_zone / (state.t_zone + _MC))
                pw = state.w_zone * p / (_MEPS + state.w_zone)
                rh = 100.0 * pw / pws
                rows.append((int(wx.month[i]), int(wx.day[i]), int(wx.hour[i]),
                             state.t_zone, state.w_zone, rh,
                             demand.heating / 3600.0,
                             demand.cooling_sensible / 3600.0,
                             demand.cooling_latent / 3600.0, demand.mode))
        to_kwh = 1.0 / 3.6e6
        return AnnualResult(heating_kwh=heat * to_kwh,
                            cooling_sensible_kwh=cool_s * to_kwh,
                            cooling_latent_kwh=cool_l * to_kwh,
                            usage_hours=usage,
                            warmup_repeats=repeats,
                            max_sensible_residual_w=max_rs,
                            max_latent_residual_w=max_rl,
                            trace=rows)


def simulate_year(archetype: RoomArchetype, weather: WeatherYear,
                  dt: float = SUBSTEP_SECONDS, trace: bool = False,
                  constants: AirConstants = AirConstants(),
                  solar_cache: SolarCache | None = None) -> AnnualResult:
    """Run a full year and return annual demands."""
    model = ZoneModel(archetype, weather, dt=dt, constants=constants,
                      solar_cache=solar_cache)
    return model.run(trace=trace)
