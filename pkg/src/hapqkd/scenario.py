"""Scenario documents: one JSON object per link configuration.

Every section and field is optional; anything left out keeps its default
(1550 nm, 0.1 m / 0.4 m apertures, r0 = 0.2 m, 5 urad jitter, 20 km altitude,
moonless sky, clear weather). Unknown keys are rejected so that a misspelled
parameter cannot silently fall back to its default.
"""

from __future__ import annotations

import collections.abc
import dataclasses
import json
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Union

from hapqkd import budget
from hapqkd.atmosphere import (
    MolecularAbsorptionTable,
    SkyRadiance,
    TurbulenceModel,
    WeatherCondition,
)
from hapqkd.budget import NanoBobEfficiencies, ReceiverLosses
from hapqkd.errors import DomainError, ScenarioError
from hapqkd.geometry import LinkGeometry, elevation_for_los
from hapqkd.optics import PointingModel, ReceiverOptics, TransmitterOptics
from hapqkd.qkd import CvProtocolParams, DetectorParams, DvProtocolParams


@dataclass(frozen=True)
class Scenario:
    geometry: LinkGeometry = field(default_factory=LinkGeometry)
    transmitter: TransmitterOptics = field(default_factory=TransmitterOptics)
    receiver: ReceiverOptics = field(default_factory=ReceiverOptics)
    pointing: PointingModel = field(default_factory=PointingModel)
    turbulence: TurbulenceModel = field(default_factory=TurbulenceModel)
    weather: WeatherCondition = field(default_factory=WeatherCondition)
    sky: SkyRadiance = field(default_factory=SkyRadiance)
    molecular_absorption: MolecularAbsorptionTable = field(
        default_factory=MolecularAbsorptionTable
    )
    receiver_losses: ReceiverLosses = field(default_factory=ReceiverLosses)
    nanobob_efficiencies: NanoBobEfficiencies = field(default_factory=NanoBobEfficiencies)
    dv: DvProtocolParams = field(default_factory=DvProtocolParams)
    detector: DetectorParams = field(default_factory=DetectorParams)
    cv: CvProtocolParams = field(default_factory=CvProtocolParams)
    method: str = "method1"

    def __post_init__(self) -> None:
        if self.method not in budget.METHODS:
            raise DomainError(f"method must be one of {budget.METHODS}, got {self.method!r}")
        layer = self.weather.resolved_layer()
        if layer is not None and layer.layer_top_altitude > self.geometry.hap_altitude:
            raise DomainError(
                f"weather layer top {layer.layer_top_altitude} m is above the platform "
                f"altitude {self.geometry.hap_altitude} m"
            )


def _field_types(cls) -> dict[str, Any]:
    return typing.get_type_hints(cls)


def _unwrap_optional(tp):
    if typing.get_origin(tp) is Union:
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if len(args) == 1:
            return args[0], True
    return tp, False


def _convert(value, tp, where: str):
    tp, optional = _unwrap_optional(tp)
    if value is None:
        if optional:
            return None
        raise ScenarioError(f"{where}: null is not allowed")
    if dataclasses.is_dataclass(tp):
        if not isinstance(value, dict):
            raise ScenarioError(f"{where}: expected an object")
        return _overlay(tp, None, value, where)
    if tp is bool:
        if not isinstance(value, bool):
            raise ScenarioError(f"{where}: expected true or false")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"{where}: expected a number")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ScenarioError(f"{where}: expected a string")
        return value
    if typing.get_origin(tp) in (collections.abc.Mapping, dict):
        if not isinstance(value, dict):
            raise ScenarioError(f"{where}: expected an object")
        out = {}
        for k, v in value.items():
            try:
                key = float(k)
            except ValueError:
                raise ScenarioError(f"{where}: key {k!r} is not a number") from None
            out[key] = _convert(v, float, f"{where}.{k}")
        return out
    raise ScenarioError(f"{where}: unsupported field type {tp!r}")


def _overlay(cls, base, doc: Mapping[str, Any], where: str):
    types = _field_types(cls)
    unknown = sorted(set(doc) - set(types))
    if unknown:
        prefix = f"{where}." if where else ""
        raise ScenarioError(
            f"unknown key '{prefix}{unknown[0]}'; allowed keys: {sorted(types)}"
        )
    kwargs = {}
    for name, value in doc.items():
        sub = f"{where}.{name}" if where else name
        tp, _ = _unwrap_optional(types[name])
        current = getattr(base, name) if base is not None else None
        if (
            dataclasses.is_dataclass(tp)
            and isinstance(value, dict)
            and current is not None
        ):
            kwargs[name] = _overlay(tp, current, value, sub)
        else:
            kwargs[name] = _convert(value, types[name], sub)
    try:
        if base is None:
            return cls(**kwargs)
        return dataclasses.replace(base, **kwargs)
    except DomainError as exc:
        raise ScenarioError(f"{where or 'scenario'}: {exc}") from None
    except TypeError as exc:
        raise ScenarioError(f"{where or 'scenario'}: {exc}") from None


def scenario_from_dict(doc: Mapping[str, Any]) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    return _overlay(Scenario, Scenario(), doc, "")


def load_scenario(source: Union[str, Path, Mapping[str, Any], None] = None) -> Scenario:
    """Build a scenario from a file path, a JSON string, a dict, or nothing.

    A ``str`` is treated as JSON text when it starts with ``{`` and as a
    path otherwise.
    """
    if source is None:
        return Scenario()
    if isinstance(source, Mapping):
        return scenario_from_dict(dict(source))
    if isinstance(source, Path) or not str(source).lstrip().startswith("{"):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario file {path}: {exc.strerror}") from None
    else:
        text = str(source)
    if not text.strip():
        return Scenario()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return scenario_from_dict(doc)


def _plain(value):
    if dataclasses.is_dataclass(value):
        return {f.name: _plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, Mapping):
        return {repr(float(k)): _plain(v) for k, v in sorted(value.items())}
    return value


def scenario_to_dict(scenario: Scenario) -> dict:
    return _plain(scenario)


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def with_value(scenario: Scenario, path: str, value) -> Scenario:
    """Return a copy with the dotted field ``path`` set to ``value``.

    ``geometry.los`` is accepted as a pseudo-field: it sets the elevation
    that gives that slant range at the current altitude.
    """
    if path == "geometry.los":
        elev = elevation_for_los(scenario.geometry.hap_altitude, value)
        return with_value(scenario, "geometry.elevation_deg", elev)
    head, _, rest = path.partition(".")
    names = {f.name for f in dataclasses.fields(scenario)}
    if head not in names:
        raise ScenarioError(f"unknown field {head!r} in path {path!r}")
    if not rest:
        return dataclasses.replace(scenario, **{head: value})
    child = getattr(scenario, head)
    if child is None and "." not in rest:
        # optional sub-record that is currently unset, e.g. weather.layer
        tp, _ = _unwrap_optional(_field_types(type(scenario))[head])
        return dataclasses.replace(scenario, **{head: tp(**{rest: value})})
    if not dataclasses.is_dataclass(child):
        raise ScenarioError(f"cannot descend into {head!r} in path {path!r}")
    return dataclasses.replace(scenario, **{head: with_value(child, rest, value)})
