"""Run configuration: YAML parsing, validation and run manifests.

Configuration files use conventional units (GHz, MHz, dBm, um) with the
unit in the key name.  Every section and key has a default, so an empty
file is a valid configuration.  Unknown keys are rejected with their
line and column.
"""
from dataclasses import dataclass, field
import copy
import hashlib

import yaml

from ._errors import InvalidParameterError
from .bloch import DampingParams, LzsDrive
from .grids import SweepGrid
from .intermod import PumpCalibration
from .kerr import KerrParams
from .units import PRESETS, TWO_PI, load_preset, material_from_mapping

COMMANDS = ("kerr-estimate", "energy-scan", "simulate", "lzs-map", "stability-map",
            "flow-map", "imd-gain", "verify")


class ConfigError(InvalidParameterError):
    """Invalid configuration, with an optional ``line:column`` location."""

    def __init__(self, message, path=None, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: "
        field_name = f"{path}: " if path else ""
        super().__init__(f"{where}{field_name}{message}")
        self.path = path
        self.line = line
        self.column = column


# value checks -----------------------------------------------------------

def _num(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"expected a number, got {v!r}")
    v = float(v)
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError("must be finite")
    return v


def _positive(v):
    v = _num(v)
    if not v > 0:
        raise ValueError(f"must be positive (got {v!r})")
    return v


def _nonneg(v):
    v = _num(v)
    if v < 0:
        raise ValueError(f"must be non-negative (got {v!r})")
    return v


def _count(v):
    if isinstance(v, bool) or not isinstance(v, int) or v < 2:
        raise ValueError(f"must be an integer >= 2 (got {v!r})")
    return v


def _int_at_least(lo):
    def check(v):
        if isinstance(v, bool) or not isinstance(v, int) or v < lo:
            raise ValueError(f"must be an integer >= {lo} (got {v!r})")
        return v
    return check


def _choice(*options):
    def check(v):
        if v not in options:
            raise ValueError(f"must be one of {', '.join(map(str, options))} (got {v!r})")
        return v
    return check


def _rtol(v):
    v = _num(v)
    if not 1e-13 < v < 1e-2:
        raise ValueError(f"must lie in (1e-13, 1e-2) (got {v!r})")
    return v


def _bool(v):
    if not isinstance(v, bool):
        raise ValueError(f"expected true or false, got {v!r}")
    return v


def _grid(keys, defaults):
    return {"__grid__": True, "keys": keys, "defaults": defaults}


# schema: section -> key -> (default, check)
SCHEMA = {
    "material": {
        "M_s_kA_per_m": (None, _positive),
        "K_c1_J_per_m3": (None, _num),
        "K_c2_over_K_c1": (None, _num),
        "rho_s_per_cm3": (None, _positive),
        "R_s_um": (None, _positive),
    },
    "resonator": {
        "gamma_c_MHz": (1.0, _positive),
        "omega_c_GHz": (3.875, _positive),
        "pump_dbm": (0.4, _num),
        "phi_deg": (0.0, _num),
    },
    "drive": {
        "omega_1_MHz": (0.5, _num),
        "omega_GHz": (2.305, _num),
        "omega_c_GHz": (2.305, _num),
        "omega_b_MHz": (0.5, _num),
        "omega_m_MHz": (0.5, _nonneg),
        "sense": (-1, _choice(-1, 1)),
    },
    "damping": {
        "gamma_1_MHz": (1.0, _positive),
        "gamma_2_MHz": (2.0, _positive),
        "p_zs": (1.0, _num),
    },
    "kerr": {
        "delta_MHz": (0.0, _num),
        "b_sqrt_Hz": (0.0, _nonneg),
        "gamma_1_MHz": (0.5, _nonneg),
        "gamma_2_MHz": (0.5, _nonneg),
        "kerr_Hz": (-2.0e-9, _num),
        "gamma_3_Hz": (0.0, _nonneg),
        "phi_1_rad": (0.0, _num),
    },
    "calibration": {
        "p_bop_dbm": (0.4, _num),
        "delta_bop_MHz": (1.3, _num),
        "omega_c_GHz": (3.875, _positive),
    },
    "energy_scan": {
        "count": (181, _count),
        "H_kA_per_m": (0.0, _num),
        "theta_MH_deg": (0.0, _num),
    },
    "simulate": {
        "t_end_us": (10.0, _positive),
        "frame": ("rotating", _choice("rotating", "lab")),
        "samples_per_period": (32, _int_at_least(2)),
        "rel_tol": (1e-9, _rtol),
    },
    "lzs_map": {
        "omega_mw_GHz": _grid(("min", "max", "count"), (2.302, 2.308, 601)),
        "l_max": (8, _int_at_least(0)),
    },
    "stability_map": {
        "delta_ratio": _grid(("min", "max", "count"), (-4.0, 1.0, 201)),
        "b_ratio": _grid(("min", "max", "count"), (0.0, 2.0, 201)),
    },
    "flow_map": {
        "delta_ratio": (-2.0, _num),
        "b_ratio": (1.49, _positive),
        "n_re": (15, _count),
        "n_im": (15, _count),
        "rel_tol": (1e-8, _rtol),
        "path_stride": (4, _int_at_least(1)),
    },
    "imd_gain": {
        "omega_p_GHz": (3.8704, _positive),
        "omega_MHz": _grid(("min", "max", "count"), (-6.0, 6.0, 241)),
        "power_dbm": _grid(("min", "max", "count"), (-10.0, 25.0, 351)),
        "mask_MHz": (0.0, _nonneg),
    },
    "verify": {
        "quick": (False, _bool),
    },
}

TOP_LEVEL = {
    "command": (None, _choice(*COMMANDS)),
    "preset": ("YIG-297K", _choice(*PRESETS)),
    "threads": (1, _int_at_least(1)),
    "output_dir": ("out", str),
}


# YAML with locations ------------------------------------------------------

def _load_with_marks(text):
    """Parse YAML; return ``(data, marks)`` with ``marks[path] = (line, col)``."""
    try:
        loader = yaml.SafeLoader(text)
        try:
            node = loader.get_single_node()
            data = loader.construct_document(node) if node is not None else None
        finally:
            loader.dispose()
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise ConfigError(f"syntax error: {exc.problem or exc}", line=line, column=col) from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"syntax error: {exc}") from None
    marks = {}

    def walk(n, prefix):
        if isinstance(n, yaml.MappingNode):
            for k, v in n.value:
                path = f"{prefix}.{k.value}" if prefix else str(k.value)
                marks[path] = (k.start_mark.line + 1, k.start_mark.column + 1)
                walk(v, path)

    if node is not None:
        walk(node, "")
    return ({} if data is None else data), marks


def _fail(msg, path, marks):
    line, col = marks.get(path, (None, None))
    raise ConfigError(msg, path=path, line=line, column=col)


# run config ------------------------------------------------------------

@dataclass
class RunConfig:
    """Validated configuration in conventional units (see :data:`SCHEMA`)."""

    command: str
    preset: str
    threads: int
    output_dir: str
    sections: dict
    digest: str = ""

    def resolved(self):
        """Plain nested mapping of every parameter (round-trips through YAML)."""
        out = {"command": self.command, "preset": self.preset, "threads": self.threads,
               "output_dir": self.output_dir}
        out.update(copy.deepcopy(self.sections))
        return out

    def to_yaml(self):
        return yaml.safe_dump(self.resolved(), sort_keys=True)

    # domain objects
    def material(self):
        return material_from_mapping(self.sections["material"], name=self.preset)

    def lzs_drive(self):
        d = self.sections["drive"]
        return LzsDrive(omega_1=TWO_PI * d["omega_1_MHz"] * 1e6, omega=TWO_PI * d["omega_GHz"] * 1e9,
                        omega_c=TWO_PI * d["omega_c_GHz"] * 1e9, omega_b=TWO_PI * d["omega_b_MHz"] * 1e6,
                        omega_m=TWO_PI * d["omega_m_MHz"] * 1e6, sense=d["sense"])

    def damping(self):
        d = self.sections["damping"]
        return DampingParams(TWO_PI * d["gamma_1_MHz"] * 1e6, TWO_PI * d["gamma_2_MHz"] * 1e6, d["p_zs"])

    def kerr_params(self):
        k = self.sections["kerr"]
        return KerrParams(delta=TWO_PI * k["delta_MHz"] * 1e6, gamma_1=TWO_PI * k["gamma_1_MHz"] * 1e6,
                          gamma_2=TWO_PI * k["gamma_2_MHz"] * 1e6, kerr=TWO_PI * k["kerr_Hz"],
                          b=k["b_sqrt_Hz"], gamma_3=TWO_PI * k["gamma_3_Hz"], phi_1=k["phi_1_rad"])

    def calibration(self):
        c = self.sections["calibration"]
        return PumpCalibration(c["p_bop_dbm"], TWO_PI * c["delta_bop_MHz"] * 1e6,
                               TWO_PI * c["omega_c_GHz"] * 1e9)

    def grid(self, section, name):
        g = self.sections[section][name]
        return SweepGrid(g["min"], g["max"], g["count"])


def _section(name, given, marks, out):
    schema = SCHEMA[name]
    if given is None:
        given = {}
    if not isinstance(given, dict):
        _fail("section must be a mapping", name, marks)
    for key in given:
        if key not in schema:
            _fail(f"unknown key {key!r} in section {name!r}; allowed: {', '.join(schema)}",
                  f"{name}.{key}", marks)
    for key, spec in schema.items():
        path = f"{name}.{key}"
        if isinstance(spec, dict):
            g = given.get(key, {})
            if not isinstance(g, dict):
                _fail("grid must be a mapping with min, max, count", path, marks)
            for gk in g:
                if gk not in spec["keys"]:
                    _fail(f"unknown grid key {gk!r}; allowed: min, max, count", f"{path}.{gk}", marks)
            vals = dict(zip(spec["keys"], spec["defaults"]))
            vals.update(g)
            try:
                vals["min"], vals["max"] = _num(vals["min"]), _num(vals["max"])
                vals["count"] = _count(vals["count"])
                SweepGrid(vals["min"], vals["max"], vals["count"])
            except (ValueError, InvalidParameterError) as exc:
                _fail(str(exc), path, marks)
            out[key] = vals
            continue
        default, check = spec
        if key not in given:
            out[key] = default
            continue
        try:
            out[key] = check(given[key])
        except ValueError as exc:
            _fail(str(exc), path, marks)


def parse_config(text, command=None, preset=None):
    """Parse and validate YAML text into a :class:`RunConfig`.

    ``command`` and ``preset`` (from the command line) override the file.

    Raises
    ------
    ConfigError
        On syntax errors (with line and column), unknown keys (with their
        location) and out-of-range values (naming the field).
    """
    data, marks = _load_with_marks(text)
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", line=1, column=1)
    for key in data:
        if key not in TOP_LEVEL and key not in SCHEMA:
            _fail(f"unknown key {key!r}; allowed: {', '.join(list(TOP_LEVEL) + list(SCHEMA))}",
                  str(key), marks)
    top = {}
    for key, (default, check) in TOP_LEVEL.items():
        value = data.get(key, default)
        if key == "command" and command is not None:
            value = command
        if key == "preset" and preset is not None:
            value = preset
        if value is None:
            top[key] = None
            continue
        try:
            top[key] = check(value)
        except ValueError as exc:
            _fail(str(exc), key, marks)
    if top["command"] is None:
        raise ConfigError("no subcommand given", path="command")

    sections = {}
    for name in SCHEMA:
        sections[name] = {}
        _section(name, data.get(name), marks, sections[name])

    # the material section overrides the preset
    base = load_preset(top["preset"])
    mat = sections["material"]
    defaults = {"M_s_kA_per_m": base.M_s / 1e3, "K_c1_J_per_m3": base.K_c1,
                "K_c2_over_K_c1": base.K_c2 / base.K_c1 if base.K_c1 else 0.0,
                "rho_s_per_cm3": base.rho_s / 1e6, "R_s_um": base.R_s * 1e6}
    for k, v in defaults.items():
        if mat[k] is None:
            mat[k] = v

    cfg = RunConfig(top["command"], top["preset"], top["threads"], top["output_dir"], sections,
                    digest=hashlib.sha256(text.encode()).hexdigest())
    # semantic checks through the domain constructors
    for build, name in ((cfg.material, "material"), (cfg.lzs_drive, "drive"), (cfg.damping, "damping"),
                        (cfg.kerr_params, "kerr"), (cfg.calibration, "calibration")):
        try:
            build()
        except InvalidParameterError as exc:
            _fail(str(exc), name, marks)
    return cfg


@dataclass
class RunManifest:
    """What was run: resolved parameters, tool version, input digest, duration."""

    command: str
    resolved: dict
    version: str
    config_sha256: str
    duration_s: float
    outputs: dict = field(default_factory=dict)  # file name -> sha256

    def as_dict(self):
        return {"command": self.command, "version": self.version,
                "config_sha256": self.config_sha256, "duration_s": self.duration_s,
                "outputs": dict(sorted(self.outputs.items())), "resolved": self.resolved}
