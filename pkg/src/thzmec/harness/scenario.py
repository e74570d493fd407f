"""Scenario configuration: system-table defaults plus an INI-style loader."""

import configparser
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field

from thzmec import channel as ch
from thzmec.ceemax import SolverSettings
from thzmec.emin import ComputeProfile
from thzmec.errors import ConfigError, DomainError
from thzmec.topology import CellGeometry

MODES = ("full", "partial", "none", "oma", "mmwave")
OBJECTIVES = ("energy_min", "cee_max")
P_MAX_UNITS = ("dBW", "dBm")
LOCAL_TIMES = ("block", "slot")


@dataclass(frozen=True)
class Scenario:
    window: str = ch.DEFAULT_WINDOW  # f1..f9, mmwave, or custom
    custom_frequency_hz: float = 0.0
    custom_bandwidth_hz: float = 0.0
    custom_absorption_per_m: float = 0.0
    noise_figure_db: float = 10.0
    noise_dbm: float = None  # overrides the thermal formula when set
    n_antennas: int = 4
    n_beams: int = 20
    bits_edge: float = 1e9
    bits_center: float = 1e9
    block_s: float = 0.25
    users: tuple = (4, 8, 12, 16, 20)
    beta_edge: float = 0.3
    p_max_db: float = 9.0
    p_max_unit: str = "dBW"
    mode: str = "full"
    offload_fraction: float = 0.8
    objective: str = "energy_min"
    trials: int = 100
    seed: int = 2023
    center_radius_m: float = 3.0
    edge_radius_m: float = 5.0
    min_radius_m: float = 0.5
    user_tx_dbi: float = 3.0
    user_rx_dbi: float = 3.0
    bs_rx_dbi: float = 26.0
    cycles_per_bit: float = 1.0
    capacitance_coeff: float = 1e-27
    no_offload_time: str = "block"
    partial_local_time: str = "slot"
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        validate(self)

    # derived objects -------------------------------------------------------
    @property
    def thz_window(self):
        if self.mode == "mmwave" and self.window == ch.DEFAULT_WINDOW:
            return ch.MMWAVE
        if self.window == "custom":
            return ch.ThzWindow(self.custom_frequency_hz, self.custom_bandwidth_hz, self.custom_absorption_per_m)
        return ch.get_window(self.window)

    @property
    def noise_w(self):
        if self.noise_dbm is not None:
            return ch.dbm_to_watts(self.noise_dbm)
        if self.mode == "mmwave" or self.window == "mmwave":
            return ch.dbm_to_watts(ch.MMWAVE_NOISE_DBM)
        return ch.noise_power(self.thz_window.bandwidth, self.noise_figure_db)

    @property
    def p_max_w(self):
        offset = 0.0 if self.p_max_unit == "dBW" else -30.0
        return ch.db_to_linear(self.p_max_db + offset)

    @property
    def gains(self):
        return ch.AntennaGains.from_dbi(self.user_tx_dbi, self.user_rx_dbi, self.bs_rx_dbi)

    @property
    def geometry(self):
        return CellGeometry(self.center_radius_m, self.edge_radius_m, self.min_radius_m)

    @property
    def profile(self):
        return ComputeProfile(self.cycles_per_bit, self.capacitance_coeff)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["users"] = list(self.users)
        return d

    def digest(self):
        """Short stable hash of every field, for CSV metadata."""
        blob = json.dumps(self.to_dict(), sort_keys=True, default=repr).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _require(cond, fld, msg):
    if not cond:
        raise ConfigError(msg, field=fld)


def validate(s):
    _require(s.mode in MODES, "scenario.mode", f"must be one of {MODES}, got {s.mode!r}")
    _require(s.objective in OBJECTIVES, "scenario.objective", f"must be one of {OBJECTIVES}")
    _require(not (s.objective == "cee_max" and s.mode == "oma"), "scenario.mode",
             "oma has no CEE pipeline; use energy_min")
    _require(s.p_max_unit in P_MAX_UNITS, "scenario.p_max_unit", f"must be one of {P_MAX_UNITS}")
    _require(s.no_offload_time in LOCAL_TIMES, "compute.no_offload_time", f"must be one of {LOCAL_TIMES}")
    _require(s.partial_local_time in LOCAL_TIMES, "compute.partial_local_time", f"must be one of {LOCAL_TIMES}")
    _require(s.n_antennas >= 1, "scenario.n_antennas", "must be >= 1")
    _require(s.n_beams >= 1, "scenario.n_beams", "must be >= 1")
    _require(s.bits_edge > 0 and s.bits_center > 0, "scenario.bits_edge", "task sizes must be > 0")
    _require(s.block_s > 0, "scenario.block_s", "must be > 0")
    _require(0 < s.beta_edge < 1, "scenario.beta_edge", "must lie in (0, 1)")
    _require(0 < s.offload_fraction < 1, "scenario.offload_fraction", "must lie in (0, 1)")
    _require(s.trials >= 1, "scenario.trials", "must be >= 1")
    _require(len(s.users) >= 1, "scenario.users", "need at least one user count")
    for u in s.users:
        _require(u >= 2 and u % 2 == 0, "scenario.users", f"user counts must be even and >= 2, got {u}")
    _require(s.cycles_per_bit > 0 and s.capacitance_coeff > 0, "compute", "profile values must be > 0")
    _require(all(math.isfinite(v) for v in (s.p_max_db, s.noise_figure_db)), "scenario.p_max_db", "must be finite")
    try:
        s.thz_window
        s.geometry
        s.gains
    except DomainError as exc:
        field_name = "scenario.window" if "window" in str(exc) or "bandwidth" in str(exc) or "frequency" in str(exc) \
            else "geometry" if "radius" in str(exc) else "antenna"
        raise ConfigError(str(exc), field=field_name) from None


# file key -> (dataclass field, parser)
def _users(text):
    return tuple(int(v) for v in text.replace(" ", "").split(",") if v)


def _opt_float(text):
    return None if text.strip().lower() in ("", "none") else float(text)


_KEYS = {
    "scenario.window": ("window", str),
    "scenario.noise_figure_db": ("noise_figure_db", float),
    "scenario.noise_dbm": ("noise_dbm", _opt_float),
    "scenario.n_antennas": ("n_antennas", int),
    "scenario.n_beams": ("n_beams", int),
    "scenario.bits_edge": ("bits_edge", float),
    "scenario.bits_center": ("bits_center", float),
    "scenario.block_s": ("block_s", float),
    "scenario.users": ("users", _users),
    "scenario.beta_edge": ("beta_edge", float),
    "scenario.p_max_db": ("p_max_db", float),
    "scenario.p_max_unit": ("p_max_unit", str),
    "scenario.mode": ("mode", str),
    "scenario.offload_fraction": ("offload_fraction", float),
    "scenario.objective": ("objective", str),
    "scenario.trials": ("trials", int),
    "scenario.seed": ("seed", int),
    "custom_window.frequency_hz": ("custom_frequency_hz", float),
    "custom_window.bandwidth_hz": ("custom_bandwidth_hz", float),
    "custom_window.absorption_per_m": ("custom_absorption_per_m", float),
    "geometry.center_radius_m": ("center_radius_m", float),
    "geometry.edge_radius_m": ("edge_radius_m", float),
    "geometry.min_radius_m": ("min_radius_m", float),
    "antenna.user_tx_dbi": ("user_tx_dbi", float),
    "antenna.user_rx_dbi": ("user_rx_dbi", float),
    "antenna.bs_rx_dbi": ("bs_rx_dbi", float),
    "compute.cycles_per_bit": ("cycles_per_bit", float),
    "compute.capacitance_coeff": ("capacitance_coeff", float),
    "compute.no_offload_time": ("no_offload_time", str),
    "compute.partial_local_time": ("partial_local_time", str),
}
_SOLVER_KEYS = {
    "solver.dinkelbach_eps": ("dinkelbach_eps", float),
    "solver.dinkelbach_lambda0": ("dinkelbach_lambda0", float),
    "solver.max_iters": ("max_iters", int),
}


def scenario_from_mapping(values, base=None):
    """Build a scenario from dotted ``section.key -> text`` pairs over ``base``."""
    base = base or Scenario()
    changes, solver_changes = {}, {}
    for key, text in values.items():
        if key in _KEYS:
            target, parse, bucket = *_KEYS[key], changes
        elif key in _SOLVER_KEYS:
            target, parse, bucket = *_SOLVER_KEYS[key], solver_changes
        else:
            raise ConfigError("unknown key", field=key)
        try:
            bucket[target] = parse(text) if isinstance(text, str) else text
        except ValueError as exc:
            raise ConfigError(f"cannot parse {text!r} ({exc})", field=key) from None
    if solver_changes:
        changes["solver"] = dataclasses.replace(base.solver, **solver_changes)
    return base.replace(**changes)


def load_scenario(path):
    """Read an INI-style scenario file; an empty file yields the defaults."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(str(exc), field="--config") from None
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], field="--config") from None
    values = {f"{sec}.{key}": val for sec in parser.sections() for key, val in parser.items(sec)}
    return scenario_from_mapping(values)
