"""Declarative simulation scenarios loaded from JSON files.

A scenario file fully determines one simulation: the model kind and its
parameters, the bath, the initial state, the time grid, the observables to
record, and the synchronization analysis to attach.  Validation is strict:
unknown keys are rejected and every physical-parameter violation surfaces as
a :class:`ValidationError` naming the broken invariant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ParseError, QsyncError, ValidationError
from .gaussian import BathConfig, HarmonicNetwork
from .spins import (
    DephasingPairModel,
    OhmicBath,
    SpinPairModel,
    dephasing_block,
    jw_modes,
)

SCHEMA_VERSION = 1

KINDS = (
    "harmonic",
    "spin_pair_local_bath",
    "spin_pair_dephasing",
    "spin_local_me_comparison",
)

SPIN_STATES = ("plus_plus", "excited_ground", "ground_excited", "excited_excited")

_TOP_KEYS = {
    "schema_version", "name", "kind", "model", "bath", "secular", "initial",
    "time", "observables", "analysis", "intensity", "sweep",
}


def _require(data: dict, key: str, where: str) -> Any:
    if key not in data:
        raise ValidationError(f"{where}: missing required key {key!r}")
    return data[key]


def _reject_unknown(data: dict, allowed: set[str], where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ValidationError(f"{where}: unknown keys {sorted(unknown)}")


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _positive(value: Any, where: str) -> float:
    x = _number(value, where)
    if x <= 0:
        raise ValidationError(f"{where}: must be positive, got {x}")
    return x


def _vector(value: Any, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ValidationError(f"{where}: expected a non-empty list of numbers")
    return np.array([_number(v, where) for v in value])


@dataclass(frozen=True)
class Scenario:
    """A fully resolved scenario: raw values plus the validated domain objects."""

    name: str
    kind: str
    data: dict

    @property
    def time_grid(self) -> np.ndarray:
        t = self.data["time"]
        n = int(round(t["t_max"] / t["dt"]))
        return np.linspace(0.0, n * t["dt"], n + 1)

    @property
    def observables(self) -> list[str]:
        return list(self.data["observables"])

    @property
    def analysis(self) -> dict | None:
        return self.data.get("analysis")

    @property
    def sweep(self) -> dict | None:
        return self.data.get("sweep")


def _resolve_couplings(model: dict, n: int) -> np.ndarray:
    raw = model.get("coupling", model.get("couplings"))
    if raw is None:
        return np.zeros((n, n))
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        if n != 2:
            raise ValidationError("model: scalar coupling requires two oscillators")
        lam = np.zeros((2, 2))
        lam[0, 1] = lam[1, 0] = float(raw)
        return lam
    if isinstance(raw, list):
        mat = np.array([[_number(v, "model.couplings") for v in row] for row in raw])
        return mat
    raise ValidationError("model: coupling must be a number or a matrix")


def build_network(model: dict) -> HarmonicNetwork:
    """Harmonic network from a scenario model block.

    ``coupling_form`` selects how couplings enter the potential matrix:
    ``bilinear`` puts them off-diagonal as is, ``spring`` treats each
    coupling as a spring constant joining the two sites, shifting both
    diagonal entries and entering off-diagonal with a minus sign.
    """
    freqs = _vector(_require(model, "frequencies", "model"), "model.frequencies")
    lam = _resolve_couplings(model, freqs.size)
    form = model.get("coupling_form", "bilinear")
    if form not in ("bilinear", "spring"):
        raise ValidationError("model.coupling_form: must be 'bilinear' or 'spring'")
    try:
        if form == "spring":
            eff = np.sqrt(freqs**2 + lam.sum(axis=1))
            return HarmonicNetwork(eff, -lam)
        return HarmonicNetwork(freqs, lam)
    except QsyncError as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc


def build_bath(bath: dict) -> BathConfig:
    kind = _require(bath, "kind", "bath")
    try:
        if kind == "local":
            return BathConfig.local(int(bath.get("node", 0)),
                                    _number(_require(bath, "gamma", "bath"), "bath.gamma"),
                                    _number(bath.get("temperature", 0.0), "bath.temperature"))
        if kind in ("separate", "common"):
            return BathConfig(kind,
                              _number(_require(bath, "gamma", "bath"), "bath.gamma"),
                              _number(bath.get("temperature", 0.0), "bath.temperature"))
    except QsyncError as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc
    raise ValidationError(f"bath.kind: unknown kind {kind!r}")


def build_spin_pair(model: dict) -> SpinPairModel:
    try:
        return jw_modes(
            _positive(_require(model, "omega1", "model"), "model.omega1"),
            _positive(_require(model, "omega2", "model"), "model.omega2"),
            _number(_require(model, "coupling", "model"), "model.coupling"),
        )
    except QsyncError as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc


def build_ohmic_bath(bath: dict) -> OhmicBath:
    try:
        return OhmicBath(
            _positive(_require(bath, "gamma0", "bath"), "bath.gamma0"),
            _positive(bath.get("cutoff", 10.0), "bath.cutoff"),
        )
    except QsyncError as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc


def build_dephasing_model(model: dict) -> DephasingPairModel:
    try:
        return dephasing_block(
            _positive(_require(model, "omega1", "model"), "model.omega1"),
            _positive(_require(model, "omega2", "model"), "model.omega2"),
            _number(_require(model, "gamma", "model"), "model.gamma"),
            _number(model.get("gamma_z", 0.0), "model.gamma_z"),
            _number(model.get("s", 0.0), "model.s"),
        )
    except QsyncError as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc


_HARMONIC_OBS = ("x_sq", "p_sq")
_SPIN_OBS = ("sx", "sy", "sz")


def _default_observables(kind: str, n: int) -> list[str]:
    if kind == "harmonic":
        return [f"{base}_{i + 1}" for base in _HARMONIC_OBS for i in range(n)]
    return [f"sx_{i + 1}" for i in range(2)]


def _validate_observable(name: str, kind: str, n: int) -> None:
    if kind == "harmonic":
        base, _, idx = name.rpartition("_")
        if base in _HARMONIC_OBS and idx.isdigit() and 1 <= int(idx) <= n:
            return
    else:
        base, _, idx = name.rpartition("_")
        if base in _SPIN_OBS and idx.isdigit() and 1 <= int(idx) <= 2:
            return
        if base in ("re_sp_sm", "im_sp_sm") and len(idx) == 2 and idx.isdigit():
            return
        if name == "intensity" and kind == "spin_pair_dephasing":
            return
    raise ValidationError(f"observables: unknown observable {name!r} for kind {kind!r}")


def _validate_time(time: dict) -> dict:
    _reject_unknown(time, {"t_max", "dt"}, "time")
    t_max = _positive(_require(time, "t_max", "time"), "time.t_max")
    dt = _positive(_require(time, "dt", "time"), "time.dt")
    if dt >= t_max:
        raise ValidationError("time: dt must be smaller than t_max")
    return {"t_max": t_max, "dt": dt}


def _validate_analysis(analysis: dict, observables: list[str], dt: float, t_max: float) -> dict:
    _reject_unknown(analysis, {"pearson"}, "analysis")
    block = _require(analysis, "pearson", "analysis")
    _reject_unknown(block, {"pairs", "window", "threshold"}, "analysis.pearson")
    window = _positive(block.get("window", 20.0), "analysis.pearson.window")
    threshold = _number(block.get("threshold", 0.9), "analysis.pearson.threshold")
    if not 0 < threshold <= 1:
        raise ValidationError("analysis.pearson.threshold: must be in (0, 1]")
    if window < 10 * dt:
        raise ValidationError("analysis.pearson.window: must span at least 10 samples")
    if window >= t_max:
        raise ValidationError("analysis.pearson.window: must be shorter than t_max")
    pairs = block.get("pairs")
    if pairs is None:
        raise ValidationError("analysis.pearson: missing required key 'pairs'")
    clean_pairs = []
    for pair in pairs:
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValidationError("analysis.pearson.pairs: each pair must list two observables")
        for name in pair:
            if name not in observables:
                raise ValidationError(
                    f"analysis.pearson.pairs: {name!r} is not a recorded observable"
                )
        clean_pairs.append([str(pair[0]), str(pair[1])])
    return {"pearson": {"pairs": clean_pairs, "window": window, "threshold": threshold}}


def _validate_sweep(sweep: dict, model: dict) -> dict:
    _reject_unknown(sweep, {"coupling", "omega2", "eval_time", "window"}, "sweep")
    out = {}
    for axis in ("coupling", "omega2"):
        block = _require(sweep, axis, "sweep")
        _reject_unknown(block, {"min", "max", "num"}, f"sweep.{axis}")
        lo = _number(_require(block, "min", f"sweep.{axis}"), f"sweep.{axis}.min")
        hi = _number(_require(block, "max", f"sweep.{axis}"), f"sweep.{axis}.max")
        num = block.get("num", 20)
        if not isinstance(num, int) or num < 2:
            raise ValidationError(f"sweep.{axis}.num: must be an integer >= 2")
        if hi <= lo:
            raise ValidationError(f"sweep.{axis}: max must exceed min")
        out[axis] = {"min": lo, "max": hi, "num": num}
    out["eval_time"] = _positive(_require(sweep, "eval_time", "sweep"), "sweep.eval_time")
    out["window"] = _positive(sweep.get("window", 20.0), "sweep.window")
    freqs = _vector(_require(model, "frequencies", "model"), "model.frequencies")
    if freqs.size != 2:
        raise ValidationError("sweep: only two-oscillator scenarios can be swept")
    return out


def validate_scenario(raw: dict, where: str = "scenario") -> Scenario:
    """Validate a raw scenario dictionary and resolve defaults."""
    if not isinstance(raw, dict):
        raise ValidationError(f"{where}: top level must be an object")
    _reject_unknown(raw, _TOP_KEYS, where)
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValidationError(f"{where}: unsupported schema_version {version!r}")
    kind = _require(raw, "kind", where)
    if kind not in KINDS:
        raise ValidationError(f"{where}: unknown kind {kind!r}")
    name = raw.get("name", "scenario")
    if not isinstance(name, str) or not name:
        raise ValidationError(f"{where}: name must be a non-empty string")

    model = dict(_require(raw, "model", where))
    data: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "model": model}

    if kind == "harmonic":
        _reject_unknown(
            model, {"frequencies", "coupling", "couplings", "coupling_form"}, "model"
        )
        network = build_network(model)
        n = network.n
        bath = dict(_require(raw, "bath", where))
        _reject_unknown(bath, {"kind", "gamma", "temperature", "node"}, "bath")
        build_bath(bath)
        data["bath"] = bath
        initial = dict(_require(raw, "initial", where))
        _reject_unknown(initial, {"squeezing"}, "initial")
        squeezing = _vector(_require(initial, "squeezing", "initial"), "initial.squeezing")
        if squeezing.size != n:
            raise ValidationError("initial.squeezing: one parameter per oscillator required")
        data["initial"] = {"squeezing": squeezing.tolist()}
        if "secular" in raw or "intensity" in raw:
            raise ValidationError(f"{where}: harmonic scenarios take no secular/intensity keys")
    elif kind == "spin_pair_local_bath":
        _reject_unknown(model, {"omega1", "omega2", "coupling"}, "model")
        build_spin_pair(model)
        bath = dict(_require(raw, "bath", where))
        _reject_unknown(bath, {"gamma0", "cutoff"}, "bath")
        build_ohmic_bath(bath)
        data["bath"] = bath
        secular = raw.get("secular", "full")
        if secular not in ("full", "partial"):
            raise ValidationError("secular: must be 'full' or 'partial'")
        data["secular"] = secular
        data["initial"] = _validate_spin_initial(raw)
        n = 2
    elif kind == "spin_pair_dephasing":
        _reject_unknown(model, {"omega1", "omega2", "gamma", "gamma_z", "s"}, "model")
        dm = build_dephasing_model(model)
        data["initial"] = _validate_spin_initial(raw)
        intensity = raw.get("intensity", {})
        _reject_unknown(intensity, {"rates"}, "intensity")
        rates = intensity.get("rates")
        if rates is None:
            rates = (2 * dm.gamma * np.ones((2, 2))).tolist()
        else:
            rates = [[_number(v, "intensity.rates") for v in row] for row in rates]
            if np.array(rates).shape != (2, 2):
                raise ValidationError("intensity.rates: must be a 2x2 matrix")
        data["intensity"] = {"rates": rates}
        n = 2
    else:  # spin_local_me_comparison
        _reject_unknown(model, {"omega1", "omega2", "coupling", "gamma1", "gamma2"}, "model")
        _positive(_require(model, "omega1", "model"), "model.omega1")
        _positive(_require(model, "omega2", "model"), "model.omega2")
        _number(_require(model, "coupling", "model"), "model.coupling")
        for key in ("gamma1", "gamma2"):
            if _number(_require(model, key, "model"), f"model.{key}") < 0:
                raise ValidationError(f"model.{key}: must be non-negative")
        data["initial"] = _validate_spin_initial(raw)
        n = 2

    time = _validate_time(dict(_require(raw, "time", where)))
    data["time"] = time
    observables = raw.get("observables")
    if observables is None:
        observables = _default_observables(kind, n)
    if not isinstance(observables, list) or not observables:
        raise ValidationError("observables: must be a non-empty list")
    for obs in observables:
        _validate_observable(str(obs), kind, n)
    data["observables"] = [str(o) for o in observables]

    if "analysis" in raw:
        data["analysis"] = _validate_analysis(
            dict(raw["analysis"]), data["observables"], time["dt"], time["t_max"]
        )
    if "sweep" in raw:
        if kind != "harmonic":
            raise ValidationError("sweep: only harmonic scenarios can be swept")
        data["sweep"] = _validate_sweep(dict(raw["sweep"]), model)
    data["name"] = name
    data["kind"] = kind
    return Scenario(name, kind, data)


def _validate_spin_initial(raw: dict) -> dict:
    initial = dict(_require(raw, "initial", "scenario"))
    _reject_unknown(initial, {"state"}, "initial")
    state = _require(initial, "state", "initial")
    if state not in SPIN_STATES:
        raise ValidationError(f"initial.state: must be one of {SPIN_STATES}")
    return {"state": state}


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return validate_scenario(raw, where=str(path))


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package (without extension)."""
    ref = resources.files("qsync").joinpath("scenarios", f"{name}.json")
    with resources.as_file(ref) as concrete:
        return Path(concrete)


def load_bundled(name: str) -> Scenario:
    """Load one of the scenarios shipped with the package."""
    return load_scenario(bundled_scenario_path(name))
