"""Run configuration: a sectioned key-value document (INI style) or JSON.

Example::

    [model]
    family = power
    w = 1/3
    tau0 = 1
    D = 4

    [matter]
    xi = 0.1
    epsilon = 1e-3
    p = 5

    [grid]
    d_sim = 1
    N = 256
    L = 48

    [solver]
    T = 20

Every section and key is optional; :data:`SCHEMA` lists the defaults.
Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import FRWError, ParseError, ValidationError
from .evolve import DEFAULT_BLOWUP_THRESHOLD, DEFAULT_CFL_SAFETY, max_stable_dt
from .geometry import Family, ScaleFactorModel
from .grid import Frame, SpatialGrid
from .matter import CouplingSpec, PotentialSpec

_NUMBER = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_number(text):
    """int/Fraction for integer or 'a/b' literals, float otherwise."""
    if isinstance(text, (int, float, Fraction)) and not isinstance(text, bool):
        return text
    s = str(text).strip()
    if _NUMBER.match(s):
        v = Fraction(s)
        return int(v) if v.denominator == 1 else v
    return float(s)


def _bool(text):
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt(conv):
    def f(text):
        if text is None or str(text).strip().lower() in ("", "none", "auto"):
            return None
        return conv(text)
    return f


def _choice(*options):
    def f(text):
        s = str(text).strip().lower()
        if s not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return s
    return f


def _center(text):
    if text is None or str(text).strip().lower() in ("", "none", "auto"):
        return None
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).split(","))


# section -> key -> (converter, default)
SCHEMA = {
    "model": {
        "family": (_choice("power", "exponential"), "power"),
        "alpha": (_opt(parse_number), None),
        "w": (_opt(parse_number), None),
        "tau0": (parse_number, 1),
        "D": (int, 4),
    },
    "matter": {
        "xi": (float, 0.0),
        "epsilon": (float, 0.0),
        "p": (parse_number, 3),
    },
    "grid": {
        "d_sim": (int, 1),
        "N": (int, 128),
        "L": (float, 8.0),
    },
    "solver": {
        "mode": (_choice("mol", "picard"), "mol"),
        "frame": (_choice("original", "transformed"), "original"),
        "dt": (_opt(float), None),
        "T": (float, 1.0),
        "l_max": (int, 20),
        "tol": (float, 1e-12),
        "cfl_safety": (float, DEFAULT_CFL_SAFETY),
        "blowup_threshold": (float, DEFAULT_BLOWUP_THRESHOLD),
        "dealias": (_bool, False),
        "sample_every": (int, 1),
    },
    "initial": {
        "profile": (_choice("bump", "plane_wave", "zero", "random"), "bump"),
        "amplitude": (float, 1.0),
        "radius": (float, 1.0),
        "center": (_center, None),
        "mode": (int, 1),
        "velocity": (_choice("zero", "comoving"), "zero"),
    },
    "output": {
        "directory": (str, "run"),
        "k_max": (int, 2),
        "plot_energy": (_bool, False),
        "plot_decay": (_bool, False),
        "support_threshold": (float, 1e-10),
    },
    "run": {
        "seed": (int, 0),
    },
}


@dataclass
class RunConfig:
    model: dict = field(default_factory=dict)
    matter: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    initial: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)

    @property
    def seed(self):
        return self.run["seed"]

    def scale_factor_model(self) -> ScaleFactorModel:
        m = self.model
        if m["family"] == "exponential":
            return ScaleFactorModel(Family.EXPONENTIAL, m["alpha"], m["tau0"], m["D"], m["w"])
        if m["w"] is not None:
            return ScaleFactorModel.from_w(m["D"], m["w"], m["tau0"],
                                           rate=m["alpha"] if m["alpha"] is not None else 1.0)
        return ScaleFactorModel.power_law(m["alpha"] if m["alpha"] is not None else 0,
                                          m["tau0"], m["D"])

    def coupling(self):
        return CouplingSpec(self.matter["xi"])

    def potential(self):
        return PotentialSpec(self.matter["epsilon"], self.matter["p"])

    def spatial_grid(self) -> SpatialGrid:
        g = self.grid
        return SpatialGrid(g["d_sim"], g["N"], g["L"])

    @property
    def frame(self):
        return Frame(self.solver["frame"])

    @property
    def dt(self):
        s = self.solver
        if s["dt"] is not None:
            return s["dt"]
        return max_stable_dt(self.spatial_grid(), s["cfl_safety"])

    @property
    def bump_radius(self):
        return self.initial["radius"] if self.initial["profile"] in ("bump", "random") else None

    def to_dict(self):
        def conv(v):
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, tuple):
                return list(v)
            return v
        return {sec: {k: conv(v) for k, v in getattr(self, sec).items()} for sec in SCHEMA}


def _line_of(text, section, key=None):
    current = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"^\[(.+)\]$", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return n
            continue
        if key is not None and current == section:
            k = re.split(r"[=:]", line, maxsplit=1)[0].strip()
            if k.lower() == key.lower():
                return n
    return None


def _raw_from_ini(text):
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("key outside of any [section]", line=exc.lineno) from exc
    except configparser.DuplicateOptionError as exc:
        raise ParseError("duplicate key", line=exc.lineno, key=exc.option) from exc
    except configparser.DuplicateSectionError as exc:
        raise ParseError(f"duplicate section [{exc.section}]", line=exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError("malformed line", line=line) from exc
    return {sec: dict(cp.items(sec)) for sec in cp.sections()}


def _raw_from_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise ParseError("JSON config must map section names to objects")
    return data


def parse_config(text, fmt=None) -> RunConfig:
    """Parse and fully validate a run configuration.

    ``fmt`` is ``"ini"`` or ``"json"``; by default JSON is detected from a
    leading ``{``.
    """
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "ini"
    raw = _raw_from_json(text) if fmt == "json" else _raw_from_ini(text)
    line = (lambda s, k=None: _line_of(text, s, k)) if fmt == "ini" else (lambda s, k=None: None)

    values = {}
    for sec, items in raw.items():
        if sec not in SCHEMA:
            raise ParseError(f"unknown section [{sec}]", line=line(sec))
        schema_keys = {k.lower(): k for k in SCHEMA[sec]}
        for key in items:
            if key.lower() not in schema_keys:
                raise ParseError(f"unknown key in [{sec}]", line=line(sec, key), key=key)
    for sec, keys in SCHEMA.items():
        given = {k.lower(): v for k, v in raw.get(sec, {}).items()}
        out = {}
        for key, (conv, default) in keys.items():
            if key.lower() in given:
                try:
                    out[key] = conv(given[key.lower()])
                except (ValueError, TypeError) as exc:
                    raise ParseError(f"bad value {given[key.lower()]!r}: {exc}",
                                     line=line(sec, key), key=f"{sec}.{key}") from exc
            else:
                out[key] = default
        values[sec] = out
    cfg = RunConfig(**values)
    validate(cfg)
    return cfg


def default_config() -> RunConfig:
    return parse_config("")


def validate(cfg: RunConfig):
    m, g, s, i, o = cfg.model, cfg.grid, cfg.solver, cfg.initial, cfg.output

    def fail(tag, msg):
        raise ValidationError(f"{tag}: {msg}")

    if m["D"] < 4:
        fail("D >= 4", f"spacetime dimension must be at least 4, got {m['D']}")
    if not m["tau0"] > 0:
        fail("tau0 > 0", f"got {m['tau0']}")
    if m["family"] == "power" and m["alpha"] is not None and m["w"] is not None:
        degenerate = abs(m["w"] + Fraction(m["D"] - 3, m["D"] - 1)) <= 1e-12
        if not degenerate:
            fail("alpha or w", "give the power-law exponent either as alpha or via w, not both;"
                 " alpha is only read as the exponential rate on w = -(D-3)/(D-1)")
    if m["family"] == "exponential" and (m["alpha"] is None or not m["alpha"] > 0):
        fail("exponential rate", "family=exponential needs alpha > 0 (the rate)")
    if g["d_sim"] not in (1, 2, 3):
        fail("d_sim", f"must be 1, 2 or 3, got {g['d_sim']}")
    if g["N"] % 2 or g["N"] < 16:
        fail("N even", f"N must be an even integer >= 16, got {g['N']}")
    if not g["L"] > 0:
        fail("L > 0", f"got {g['L']}")
    if not s["T"] > 0:
        fail("T > 0", f"got {s['T']}")
    if s["dt"] is not None and not s["dt"] > 0:
        fail("dt > 0", f"got {s['dt']}")
    if not s["cfl_safety"] > 0:
        fail("cfl_safety > 0", f"got {s['cfl_safety']}")
    if s["dt"] is not None:
        limit = max_stable_dt(cfg.spatial_grid(), s["cfl_safety"])
        if s["dt"] > limit * (1 + 1e-12):
            fail("CFL", f"dt={s['dt']} exceeds cfl_safety*dx/sqrt(d_sim) = {limit:.6g}")
    if s["l_max"] < 1:
        fail("l_max >= 1", f"got {s['l_max']}")
    if s["sample_every"] < 1:
        fail("sample_every >= 1", f"got {s['sample_every']}")
    if o["k_max"] < 0:
        fail("k_max >= 0", f"got {o['k_max']}")
    if not o["support_threshold"] > 0:
        fail("support_threshold > 0", f"got {o['support_threshold']}")
    if i["center"] is not None and len(i["center"]) not in (1, g["d_sim"]):
        fail("center", f"needs 1 or {g['d_sim']} coordinates")
    if i["profile"] in ("bump", "random"):
        r = i["radius"]
        if not 0 < r < g["L"] / 2:
            fail("radius < L/2", f"radius={r} must lie in (0, L/2={g['L'] / 2})")
        if r + s["T"] >= g["L"] / 2:
            fail("wraparound", f"radius + T = {r + s['T']} >= L/2 = {g['L'] / 2}")
    if not cfg.matter["p"] > 0:
        fail("p > 0", f"got {cfg.matter['p']}")
    if cfg.matter["epsilon"] < 0:
        fail("epsilon >= 0", f"got {cfg.matter['epsilon']}")
    try:
        cfg.scale_factor_model()
        cfg.potential()
        cfg.coupling()
        cfg.spatial_grid()
    except FRWError as exc:
        raise ValidationError(str(exc)) from exc
    return cfg
