# ABOUTME: Experiment configuration parsing and validation for relay-secrecy
# ABOUTME: TOML experiment files plus CLI overrides, reporting every invalid field at once

import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Type
from enum import Enum

from ..core.exceptions import ConfigurationError, ValidationError
from ..core.models import (
    AfModel, AfVariant, CurveSpec, ExperimentSpec, Gamma0Policy, Metric, RelayOffset, Strategy, SweepAxis,
)
from ..shared.config import config as app_config
from ..shared.logger import get_logger

logger = get_logger(__name__)

ALLOWED_KEYS = {
    'experiment': {'strategy', 'outputs', 'target_rate', 'trials', 'seed', 'normalize_awgn',
                   'workers'},
    'network': {'relays', 'relay', 'file'},
    'channel': {'gamma_e_db', 'decoding_threshold'},
    'sweep': {'start', 'stop', 'step'},
    'af_model': {'variant', 'first_hop_boost_db', 'shared_first_hop'},
    'opa': {'gamma0_policy', 'gamma0'},
    'curve': {'strategy', 'relays'},
}
RELAY_KEYS = {'main_offset_db', 'eve_offset_db'}

_MISSING = object()

class SpecBuilder:
    """Builds an ExperimentSpec from raw nested dictionaries, collecting all errors"""

    def __init__(self, raw: Dict[str, Any], base_dir: Optional[Path] = None):
        self.raw = raw
        self.base_dir = base_dir or Path.cwd()
        self.errors: List[ValidationError] = []

    def _error(self, path: str, message: str, value: Any = None):
        self.errors.append(ValidationError(message, field=path, value=value))

    def _section(self, name: str) -> Dict[str, Any]:
        """Fetch a section and reject keys it does not know"""
        section = self.raw.get(name, {})
        if not isinstance(section, dict):
            self._error(name, "must be a table", section)
            return {}
        for key in section:
            if key not in ALLOWED_KEYS[name]:
                self._error(f"{name}.{key}", "unknown key")
        return section

    def _number(self, section: Dict[str, Any], path: str, default: Any,
                minimum: Optional[float] = None, strict: bool = False,
                integer: bool = False) -> Any:
        """Read a finite number with optional lower bound"""
        value = section.get(path.rsplit('.', 1)[-1], _MISSING)
        if value is _MISSING:
            return default
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self._error(path, "must be a number", value)
            return default
        if integer and (not float(value).is_integer()):
            self._error(path, "must be an integer", value)
            return default
        if not math.isfinite(value):
            self._error(path, "must be finite", value)
            return default
        if minimum is not None and (value <= minimum if strict else value < minimum):
            relation = ">" if strict else "≥"
            self._error(path, f"must be {relation} {minimum:g}", value)
            return default
        return int(value) if integer else float(value)

    def _choice(self, section: Dict[str, Any], path: str, enum_cls: Type[Enum], default: Enum) -> Enum:
        """Read an enum value by its (case-insensitive) string value"""
        value = section.get(path.rsplit('.', 1)[-1], _MISSING)
        if value is _MISSING:
            return default
        if isinstance(value, str):
            for member in enum_cls:
                if member.value.lower() == value.strip().lower().replace('_', '-'):
                    return member
        choices = ", ".join(member.value for member in enum_cls)
        self._error(path, f"must be one of {choices}", value)
        return default

    def _flag(self, section: Dict[str, Any], path: str, default: bool) -> bool:
        value = section.get(path.rsplit('.', 1)[-1], _MISSING)
        if value is _MISSING:
            return default
        if not isinstance(value, bool):
            self._error(path, "must be true or false", value)
            return default
        return value

    def _relay_entries(self, entries: Any, path: str) -> List[RelayOffset]:
        if not isinstance(entries, list) or not entries:
            self._error(path, "must be a non-empty list of relay tables", entries)
            return []
        relays = []
        for index, entry in enumerate(entries):
            entry_path = f"{path}[{index}]"
            if not isinstance(entry, dict):
                self._error(entry_path, "must be a table", entry)
                continue
            for key in entry:
                if key not in RELAY_KEYS:
                    self._error(f"{entry_path}.{key}", "unknown key")
            relays.append(RelayOffset(
                main_offset_db=self._number(entry, f"{entry_path}.main_offset_db", 0.0),
                eve_offset_db=self._number(entry, f"{entry_path}.eve_offset_db", 0.0),
            ))
        return relays

    def _network(self) -> List[RelayOffset]:
        section = self._section('network')
        given = [key for key in ('relays', 'relay', 'file') if key in section]
        if len(given) > 1:
            self._error("network", f"specify only one of relays, relay, file (got {', '.join(given)})")
            return []
        if 'relay' in section:
            return self._relay_entries(section['relay'], "network.relay")
        if 'file' in section:
            return self._network_file(section['file'])
        count = self._number(section, "network.relays", 1, minimum=1, integer=True)
        return [RelayOffset() for _ in range(count)]

    def _network_file(self, file_name: Any) -> List[RelayOffset]:
        if not isinstance(file_name, str):
            self._error("network.file", "must be a path string", file_name)
            return []
        path = Path(file_name)
        if not path.is_absolute():
            path = self.base_dir / path
        try:
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            self._error("network.file", f"file not found: {path}", file_name)
            return []
        except tomllib.TOMLDecodeError as e:
            self._error("network.file", f"invalid TOML: {e}", file_name)
            return []
        for key in data:
            if key != 'relay':
                self._error(f"network.file.{key}", "unknown key")
        return self._relay_entries(data.get('relay'), "network.file.relay")

    def _curves(self) -> List[CurveSpec]:
        """[[curve]] tables: a strategy and an optional IID relay count per curve"""
        entries = self.raw.get('curve', [])
        if not isinstance(entries, list):
            self._error("curve", "must be an array of tables ([[curve]])", entries)
            return []
        curves = []
        for index, entry in enumerate(entries):
            path = f"curve[{index}]"
            if not isinstance(entry, dict):
                self._error(path, "must be a table", entry)
                continue
            for key in entry:
                if key not in ALLOWED_KEYS['curve']:
                    self._error(f"{path}.{key}", "unknown key")
            if 'strategy' not in entry:
                self._error(f"{path}.strategy", "required")
                continue
            strategy = self._choice(entry, f"{path}.strategy", Strategy, Strategy.SDF)
            count = self._number(entry, f"{path}.relays", None, minimum=1, integer=True)
            relays = None if count is None else tuple(RelayOffset() for _ in range(count))
            curves.append(CurveSpec(strategy=strategy, relays=relays))
        return curves

    def build(self) -> ExperimentSpec:
        """Validate everything and return an ExperimentSpec, or raise ConfigurationError with all problems"""
        for name in self.raw:
            if name not in ALLOWED_KEYS:
                self._error(name, "unknown section")

        experiment = self._section('experiment')
        channel = self._section('channel')
        sweep = self._section('sweep')
        af = self._section('af_model')
        opa = self._section('opa')

        relays = self._network()
        curves = self._curves()
        strategy = self._choice(experiment, "experiment.strategy", Strategy, Strategy.SDF)
        outputs = self._choice(experiment, "experiment.outputs", Metric, Metric.BOTH)
        target_rate = self._number(experiment, "experiment.target_rate", 0.5, minimum=0.0)
        trials = self._number(experiment, "experiment.trials", app_config.default_trials,
                              minimum=1, integer=True)
        seed = self._number(experiment, "experiment.seed", app_config.default_seed,
                            minimum=0, integer=True)
        workers = self._number(experiment, "experiment.workers", None, minimum=1, integer=True)
        normalize = self._flag(experiment, "experiment.normalize_awgn", False)

        gamma_e_db = self._number(channel, "channel.gamma_e_db", 10.0)
        threshold = self._number(channel, "channel.decoding_threshold", 0.0, minimum=0.0)

        start = self._number(sweep, "sweep.start", 0.0)
        stop = self._number(sweep, "sweep.stop", 20.0)
        step = self._number(sweep, "sweep.step", 5.0, minimum=0.0, strict=True)
        if start > stop:
            self._error("sweep.start", f"must not exceed sweep.stop ({stop:g})", start)

        variant = self._choice(af, "af_model.variant", AfVariant, AfVariant.APPROX_PRODUCT)
        boost = self._number(af, "af_model.first_hop_boost_db", 0.0)
        shared = self._flag(af, "af_model.shared_first_hop", True)

        policy = self._choice(opa, "opa.gamma0_policy", Gamma0Policy, Gamma0Policy.RELAY_AVERAGE)
        gamma0 = self._number(opa, "opa.gamma0", None, minimum=0.0, strict=True)
        if policy is Gamma0Policy.FIXED and gamma0 is None:
            self._error("opa.gamma0", "required when gamma0_policy is fixed")

        if self.errors:
            raise ConfigurationError(f"Invalid experiment configuration ({len(self.errors)} errors)",
                                     errors=self.errors)

        spec = ExperimentSpec(
            relays=relays,
            strategy=strategy,
            af_model=AfModel(variant=variant, first_hop_boost_db=boost, shared_first_hop=shared),
            sweep=SweepAxis(start=start, stop=stop, step=step),
            gamma_e_db=gamma_e_db,
            target_rate=target_rate,
            trials=trials,
            seed=seed,
            outputs=outputs,
            normalize_awgn=normalize,
            workers=workers,
            decoding_threshold=threshold,
            gamma0_policy=policy,
            gamma0=gamma0,
            curves=curves,
        )
        logger.debug(f"Experiment spec: {spec.strategy.value}, {spec.relay_count} relays, "
                     f"{len(spec.sweep.points())} sweep points")
        return spec

def build_spec(raw: Dict[str, Any], base_dir: Optional[Path] = None) -> ExperimentSpec:
    """Validate a raw nested dictionary"""
    return SpecBuilder(raw, base_dir).build()

def parse_config(text: str, base_dir: Optional[Path] = None) -> ExperimentSpec:
    """Parse and validate TOML experiment text"""
    return build_spec(load_toml(text), base_dir)

def load_toml(text: str) -> Dict[str, Any]:
    """Decode TOML text, reporting syntax errors as configuration errors"""
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"Invalid TOML: {e}", errors=[ValidationError(str(e), field="<toml>")])

def load_config_file(path: Path) -> Dict[str, Any]:
    """Read a TOML experiment file into a raw dictionary"""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read config {path}: {e}", setting=str(path))
    return load_toml(text)

def parse_sweep(text: str) -> Dict[str, float]:
    """Parse 'start:stop:step' or a single dB value into sweep keys"""
    parts = text.split(':')
    try:
        values = [float(part) for part in parts]
    except ValueError:
        raise ConfigurationError(
            "Invalid --snr-db", errors=[ValidationError("expected start:stop:step or a number",
                                                       field="sweep", value=text)])
    if len(values) == 1:
        return {'start': values[0], 'stop': values[0], 'step': 1.0}
    if len(values) == 3:
        return {'start': values[0], 'stop': values[1], 'step': values[2]}
    raise ConfigurationError(
        "Invalid --snr-db", errors=[ValidationError("expected start:stop:step or a number",
                                                   field="sweep", value=text)])

def apply_overrides(raw: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Merge dotted-path CLI overrides (e.g. 'channel.gamma_e_db') into a raw config"""
    for path, value in overrides.items():
        if value is None:
            continue
        section, key = path.split('.', 1)
        if section == 'network':
            # a network given on the command line replaces the file's network entirely
            raw['network'] = {key: value}
            continue
        if section == 'sweep' and key == '*':
            raw.setdefault('sweep', {}).update(value)
            continue
        raw.setdefault(section, {})[key] = value
    return raw
