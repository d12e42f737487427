"""JSON configuration schema with full default materialization.

Every field of :class:`~bdris.scenario.SweepConfig` maps to a JSON key of
the same name; missing sections or fields take the package defaults and
unknown keys are rejected, so a configuration never changes meaning
silently.  ``config_to_dict`` emits a fully materialized dictionary that
round-trips through ``resolve_config``, which is what the run manifest
stores.  A manifest file (recognised by its ``config`` key) can itself be
loaded as a configuration.
"""

from __future__ import annotations

import json
from dataclasses import fields

from .channel import FadingConfig, GeometryConfig
from .metrics import LinkBudget
from .optimizer import OptimizerSettings
from .scenario import SweepConfig


class ConfigError(ValueError):
    """Configuration file is syntactically valid JSON but semantically wrong."""


def _reject_unknown(data: dict, allowed, where: str) -> None:
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown field {where}{sorted(unknown)[0]!r}")


def _number(data: dict, key: str, default, where: str) -> float:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field {where}{key!r} must be a number")
    return float(value)


def _integer(data: dict, key: str, default, where: str) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field {where}{key!r} must be an integer")
    return value


def _boolean(data: dict, key: str, default, where: str) -> bool:
    value = data.get(key, default)
    if not isinstance(value, bool):
        raise ConfigError(f"field {where}{key!r} must be a boolean")
    return value


def _point(data: dict, key: str, default, where: str) -> tuple[float, float]:
    value = data.get(key, list(default))
    ok = (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    )
    if not ok:
        raise ConfigError(f"field {where}{key!r} must be a pair of coordinates")
    return (float(value[0]), float(value[1]))


def _section(data: dict, key: str) -> dict:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"field {key!r} must be an object")
    return value


def _build(cls, data: dict, where: str, specials=()):
    """Construct a flat numeric dataclass from a JSON object with defaults."""
    names = [f.name for f in fields(cls)]
    _reject_unknown(data, names, where)
    defaults = cls()
    kwargs = {}
    for f in fields(cls):
        if f.name in specials:
            continue
        default = getattr(defaults, f.name)
        if isinstance(default, bool):
            kwargs[f.name] = _boolean(data, f.name, default, where)
        elif isinstance(default, int):
            kwargs[f.name] = _integer(data, f.name, default, where)
        else:
            kwargs[f.name] = _number(data, f.name, default, where)
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"in section {where.rstrip('.')}: {exc}") from exc


_TOP_LEVEL = (
    "n_values",
    "schemes",
    "trials",
    "base_seed",
    "group_dim",
    "ris_interference",
    "budget",
    "geometry",
    "fading",
    "optimizer",
)


def resolve_config(data: dict) -> SweepConfig:
    """Materialize a (possibly partial) JSON dictionary into a SweepConfig."""
    if not isinstance(data, dict):
        raise ConfigError("top-level configuration must be a JSON object")
    _reject_unknown(data, _TOP_LEVEL, "")

    geo_data = _section(data, "geometry")
    _reject_unknown(geo_data, [f.name for f in fields(GeometryConfig)], "geometry.")
    geo_defaults = GeometryConfig()
    try:
        geometry = GeometryConfig(
            v2v_tx=_point(geo_data, "v2v_tx", geo_defaults.v2v_tx, "geometry."),
            v2v_rx=_point(geo_data, "v2v_rx", geo_defaults.v2v_rx, "geometry."),
            ris=_point(geo_data, "ris", geo_defaults.ris, "geometry."),
            rsu=_point(geo_data, "rsu", geo_defaults.rsu, "geometry."),
            cell_user=_point(geo_data, "cell_user", geo_defaults.cell_user, "geometry."),
            carrier_hz=_number(geo_data, "carrier_hz", geo_defaults.carrier_hz, "geometry."),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"in section geometry: {exc}") from exc

    fad_data = _section(data, "fading")
    names = [f.name for f in fields(FadingConfig)]
    _reject_unknown(fad_data, names, "fading.")
    fad_defaults = FadingConfig.for_carrier(geometry.carrier_hz)
    try:
        fading = FadingConfig(
            **{name: _number(fad_data, name, getattr(fad_defaults, name), "fading.") for name in names}
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"in section fading: {exc}") from exc

    budget = _build(LinkBudget, _section(data, "budget"), "budget.")
    optimizer = _build(OptimizerSettings, _section(data, "optimizer"), "optimizer.")

    n_values = data.get("n_values", list(SweepConfig.n_values))
    if not isinstance(n_values, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in n_values
    ):
        raise ConfigError("field 'n_values' must be a list of integers")
    schemes = data.get("schemes", list(SweepConfig.schemes))
    if not isinstance(schemes, list) or not all(isinstance(s, str) for s in schemes):
        raise ConfigError("field 'schemes' must be a list of scheme names")

    try:
        return SweepConfig(
            n_values=tuple(n_values),
            schemes=tuple(schemes),
            trials=_integer(data, "trials", SweepConfig.trials, ""),
            base_seed=_integer(data, "base_seed", SweepConfig.base_seed, ""),
            group_dim=_integer(data, "group_dim", SweepConfig.group_dim, ""),
            ris_interference=_boolean(data, "ris_interference", SweepConfig.ris_interference, ""),
            budget=budget,
            geometry=geometry,
            fading=fading,
            optimizer=optimizer,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def config_to_dict(cfg: SweepConfig) -> dict:
    """Fully materialized dictionary; round-trips through resolve_config."""
    return {
        "n_values": list(cfg.n_values),
        "schemes": list(cfg.schemes),
        "trials": cfg.trials,
        "base_seed": cfg.base_seed,
        "group_dim": cfg.group_dim,
        "ris_interference": cfg.ris_interference,
        "budget": {f.name: getattr(cfg.budget, f.name) for f in fields(LinkBudget)},
        "geometry": {
            "v2v_tx": list(cfg.geometry.v2v_tx),
            "v2v_rx": list(cfg.geometry.v2v_rx),
            "ris": list(cfg.geometry.ris),
            "rsu": list(cfg.geometry.rsu),
            "cell_user": list(cfg.geometry.cell_user),
            "carrier_hz": cfg.geometry.carrier_hz,
        },
        "fading": {f.name: getattr(cfg.fading, f.name) for f in fields(FadingConfig)},
        "optimizer": {
            f.name: getattr(cfg.optimizer, f.name) for f in fields(OptimizerSettings)
        },
    }


def load_config_file(path: str) -> SweepConfig:
    """Load a configuration or run-manifest JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if isinstance(data, dict) and "config" in data:
        data = data["config"]
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: manifest 'config' entry must be an object")
    return resolve_config(data)
