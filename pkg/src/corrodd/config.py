"""JSON configuration files.

Every key is optional; missing ones take the documented defaults.  Unknown
keys are rejected so that a mistyped coefficient cannot slip through.

Example::

    {
      "rho_hl": -5, "Pm": 2, "Nm": 1,
      "kinetics": {"P": {"side0": {"m": 1, "k": 1, "a": 0.5, "b": 0.5}}},
      "grid": {"M": 100},
      "time": {"dt": "auto", "safety": 0.9, "T": 0.5},
      "init": {"P": {"constant": 1.8}, "N": {"file": "n0.csv"}},
      "output": {"snapshot_times": [0, 0.25, 0.5], "series": true}
    }

The default initial state is the electroneutral one, ``P0 = 0.9 Pm`` and
``N0 = 3 P0 + rho_hl`` (clipped to ``[0, Nm]``).
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

import jsonschema

from .discretization import Grid
from .errors import ConfigError, NonFiniteParameterError
from .params import InterfaceKinetics, ModelParams, Side, Species, check_admissibility
from .timeloop import InitSpec, RunConfig

SCALAR_KEYS = ("lambda2", "epsilon", "rho_hl", "alpha0", "alpha1", "V", "dpsi0_pzc", "dpsi1_pzc", "Pm", "Nm")
DEFAULT_T = 0.5
DEFAULT_SAFETY = 0.9
DEFAULT_M = 100
NEUTRAL_FRACTION = 0.9

_number = {"type": "number"}
_reaction = {
    "type": "object",
    "additionalProperties": False,
    "properties": {k: _number for k in ("m", "k", "a", "b")},
}
_species = {
    "type": "object",
    "additionalProperties": False,
    "properties": {"side0": _reaction, "side1": _reaction},
}
_init = {
    "oneOf": [
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["constant"],
            "properties": {"constant": _number},
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["file"],
            "properties": {"file": {"type": "string"}},
        },
    ]
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        **{k: _number for k in SCALAR_KEYS},
        "kinetics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"P": _species, "N": _species},
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"M": {"type": "integer", "minimum": 2}},
        },
        "time": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dt": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "auto"}]},
                "safety": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "T": {"type": "number", "minimum": 0},
            },
        },
        "init": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"P": _init, "N": _init},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "snapshot_times": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "series": {"type": "boolean"},
            },
        },
    },
}


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``key=value`` overrides with dotted keys, e.g. ``grid.M=50``."""
    data = copy.deepcopy(data)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, text = item.split("=", 1)
        set_key(data, key.strip(), _parse_value(text.strip()))
    return data


def set_key(data: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    node = data
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {dotted!r}: {part!r} is not an object")
    node[parts[-1]] = value


def validate(data) -> None:
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = []
        for err in errors:
            where = ".".join(str(x) for x in err.absolute_path) or "<root>"
            msgs.append(f"{where}: {err.message}")
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(msgs))


def params_from_dict(data: dict) -> ModelParams:
    base = ModelParams()
    scalars = {k: float(data.get(k, getattr(base, k))) for k in SCALAR_KEYS}
    kin = dict(base.kinetics)
    for sname, sides in data.get("kinetics", {}).items():
        for sidename, coeffs in sides.items():
            key = (Species(sname), Side(int(sidename[-1])))
            kin[key] = InterfaceKinetics(**{**vars(kin[key]), **{k: float(v) for k, v in coeffs.items()}})
    return ModelParams(**scalars, kinetics=kin)


def _default_init(p: ModelParams):
    P0 = NEUTRAL_FRACTION * p.Pm
    N0 = min(max(3.0 * P0 + p.rho_hl, 0.0), p.Nm)
    return InitSpec(constant=P0), InitSpec(constant=N0)


def _init_spec(entry) -> InitSpec:
    if "constant" in entry:
        return InitSpec(constant=float(entry["constant"]))
    return InitSpec(file=entry["file"])


def config_from_dict(
    data: dict,
    base_dir=None,
    unsafe_dt: bool = False,
    unsafe_pzc: bool = False,
    check: bool = True,
) -> RunConfig:
    """Build a :class:`RunConfig` from parsed JSON.

    With ``check`` set, the admissibility report must pass (the pzc
    intervals may be ignored with ``unsafe_pzc``) and an explicit ``dt`` must
    not exceed the bound unless ``unsafe_dt``.
    """
    validate(data)
    try:
        p = params_from_dict(data)
        report = check_admissibility(p)
    except NonFiniteParameterError as exc:
        raise ConfigError(str(exc)) from exc
    if check:
        ok = report.passed_except_pzc() if unsafe_pzc else report.passed
        if not ok:
            raise ConfigError(
                "configuration rejected: " + ", ".join(report.failed()) + "\n" + report.format()
            )

    time = data.get("time", {})
    init = data.get("init", {})
    out = data.get("output", {})
    dflt_P, dflt_N = _default_init(p)
    times = out.get("snapshot_times")
    try:
        cfg = RunConfig(
            params=p,
            grid=Grid(int(data.get("grid", {}).get("M", DEFAULT_M))),
            dt=time.get("dt", "auto") if time.get("dt", "auto") == "auto" else float(time["dt"]),
            safety=float(time.get("safety", DEFAULT_SAFETY)),
            T=float(time.get("T", DEFAULT_T)),
            init_P=_init_spec(init["P"]) if "P" in init else dflt_P,
            init_N=_init_spec(init["N"]) if "N" in init else dflt_N,
            snapshot_times=None if times is None else tuple(float(t) for t in times),
            series=bool(out.get("series", True)),
            unsafe_dt=unsafe_dt,
            unsafe_pzc=unsafe_pzc,
            base_dir=None if base_dir is None else str(base_dir),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    if check and cfg.dt != "auto" and not unsafe_dt:
        tau = cfg.tau()
        if cfg.dt > tau:
            raise ConfigError(f"time.dt = {cfg.dt!r} exceeds the bound tau = {tau!r}; use --unsafe-dt")
    return cfg


def read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path} is not valid UTF-8: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def load_config(path, overrides=(), unsafe_dt: bool = False, unsafe_pzc: bool = False) -> RunConfig:
    """Read, validate and check a configuration file."""
    data = apply_overrides(read_json(path), overrides)
    return config_from_dict(data, base_dir=Path(path).parent, unsafe_dt=unsafe_dt, unsafe_pzc=unsafe_pzc)


def dump_config(cfg: RunConfig) -> dict:
    """Fully explicit JSON-ready form of ``cfg``; loading it gives back ``cfg``."""
    p = cfg.params
    data = {k: getattr(p, k) for k in SCALAR_KEYS}
    data["kinetics"] = {
        s.value: {f"side{int(side)}": dict(vars(p.kin(s, side))) for side in Side} for s in Species
    }
    data["grid"] = {"M": cfg.grid.M}
    data["time"] = {"dt": cfg.dt, "safety": cfg.safety, "T": cfg.T}

    def init_entry(spec: InitSpec):
        if spec.constant is not None:
            return {"constant": spec.constant}
        if spec.file is not None:
            return {"file": spec.file}
        raise ConfigError("explicit initial values cannot be serialized; write them to a file")

    data["init"] = {"P": init_entry(cfg.init_P), "N": init_entry(cfg.init_N)}
    data["output"] = {"series": cfg.series}
    if cfg.snapshot_times is not None:
        data["output"]["snapshot_times"] = list(cfg.snapshot_times)
    return data
