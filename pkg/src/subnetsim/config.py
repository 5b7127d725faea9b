"""Run configuration: one INI-style file with a section per subsystem.

Missing keys fall back to the defaults baked into each dataclass; unknown
sections or keys are errors so typos cannot silently change an experiment.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field

from .channel import ChannelConfig
from .cqi import CqiConfig
from .interference import NoiseConfig, TrafficConfig
from .link_adaptation import LaConfig
from .predictor import DssmConfig, PredictorKind
from .scenario import ScenarioConfig

DEFAULT_PREDICTORS = ("ekf", "ma", "genie")


class ConfigError(ValueError):
    """Raised on unknown keys, bad values, or inconsistent settings."""


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    cqi: CqiConfig = field(default_factory=CqiConfig)
    dssm: DssmConfig = field(default_factory=DssmConfig)
    la: LaConfig = field(default_factory=LaConfig)
    seed: int = 12345
    n_drops: int = 1
    n_ttis: int = 1450
    warmup_ttis: int = 100
    calibration_ttis: int = 10_000
    predictors: tuple[str, ...] = DEFAULT_PREDICTORS

    def validate(self) -> None:
        try:
            self.scenario.validate()
            self.channel.validate()
            self.traffic.validate()
            self.noise.validate()
            self.cqi.validate()
            self.dssm.validate()
            self.la.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.scenario.tti != self.channel.tti:
            raise ConfigError("scenario.tti and channel.tti must match")
        if not (0 <= self.seed < 2 ** 64):
            raise ConfigError("seed must fit an unsigned 64-bit integer")
        if self.n_drops < 1:
            raise ConfigError("n_drops must be at least 1")
        if self.n_ttis <= self.warmup_ttis:
            raise ConfigError("n_ttis must exceed warmup_ttis")
        if self.warmup_ttis < 2:
            raise ConfigError("warmup_ttis must be at least 2")
        if self.cqi.sinr_min_db is None and self.calibration_ttis < 100:
            raise ConfigError("calibration_ttis too small to anchor the quantizer")
        if not self.predictors:
            raise ConfigError("at least one predictor must be enabled")
        if len(set(self.predictors)) != len(self.predictors):
            raise ConfigError("duplicate predictor names")
        for name in self.predictors:
            try:
                PredictorKind.from_string(name)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _cast_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in _BOOL_TRUE:
        return True
    if low in _BOOL_FALSE:
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _cast_optional_float(text: str) -> float | None:
    low = text.strip().lower()
    if low in ("", "none", "auto"):
        return None
    return float(text)


def _cast_predictors(text: str) -> tuple[str, ...]:
    names = tuple(p.strip().lower() for p in text.split(",") if p.strip())
    return names


_SECTION_TYPES = {
    "scenario": ScenarioConfig,
    "channel": ChannelConfig,
    "traffic": TrafficConfig,
    "noise": NoiseConfig,
    "cqi": CqiConfig,
    "dssm": DssmConfig,
    "la": LaConfig,
}

_RUN_FIELDS = ("seed", "n_drops", "n_ttis", "warmup_ttis", "calibration_ttis", "predictors")

_SPECIAL_CASTS = {
    ("cqi", "sinr_min_db"): _cast_optional_float,
    ("la", "table_path"): lambda s: None if s.strip().lower() in ("", "none") else s.strip(),
    ("run", "predictors"): _cast_predictors,
}


def _cast(section: str, key: str, text: str, target_type: type) -> object:
    special = _SPECIAL_CASTS.get((section, key))
    if special is not None:
        return special(text)
    if target_type is bool:
        return _cast_bool(text)
    if target_type is int:
        return int(text)
    if target_type is float:
        return float(text)
    if target_type is str:
        return text.strip()
    raise ValueError(f"no caster for type {target_type}")


def parse_config(path_or_text: str, from_text: bool = False) -> RunConfig:
    """Build a RunConfig from an INI file (or raw text with from_text=True)."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        if from_text:
            parser.read_string(path_or_text)
        else:
            with open(path_or_text) as fh:
                parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from exc

    kwargs: dict = {}
    for section in parser.sections():
        if section == "run":
            continue
        if section not in _SECTION_TYPES:
            raise ConfigError(f"unknown section [{section}]")
        cls = _SECTION_TYPES[section]
        field_types = {f.name: f.type for f in dataclasses.fields(cls)}
        overrides: dict = {}
        for key, text in parser.items(section):
            if key not in field_types:
                raise ConfigError(f"unknown key '{key}' in [{section}]")
            base = getattr(cls, "__dataclass_fields__")[key]
            target = base.default.__class__ if base.default is not dataclasses.MISSING else float
            try:
                overrides[key] = _cast(section, key, text, target)
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key}: {exc}") from exc
        kwargs[section] = cls(**overrides)

    if parser.has_section("run"):
        defaults = RunConfig()
        for key, text in parser.items("run"):
            if key not in _RUN_FIELDS:
                raise ConfigError(f"unknown key '{key}' in [run]")
            target = type(getattr(defaults, key))
            try:
                kwargs[key] = _cast("run", key, text, target)
            except ValueError as exc:
                raise ConfigError(f"[run] {key}: {exc}") from exc

    cfg = RunConfig(**kwargs)
    cfg.validate()
    return cfg


def _format_value(value: object) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def config_to_ini(cfg: RunConfig) -> str:
    """Serialize the effective configuration; parse_config inverts this."""
    buf = io.StringIO()
    buf.write("[run]\n")
    for key in _RUN_FIELDS:
        buf.write(f"{key} = {_format_value(getattr(cfg, key))}\n")
    for section, sub in (
        ("scenario", cfg.scenario),
        ("channel", cfg.channel),
        ("traffic", cfg.traffic),
        ("noise", cfg.noise),
        ("cqi", cfg.cqi),
        ("dssm", cfg.dssm),
        ("la", cfg.la),
    ):
        buf.write(f"\n[{section}]\n")
        for f in dataclasses.fields(sub):
            buf.write(f"{f.name} = {_format_value(getattr(sub, f.name))}\n")
    return buf.getvalue()


def emit_defaults() -> str:
    """Canonical INI text carrying every default value."""
    return config_to_ini(RunConfig())
