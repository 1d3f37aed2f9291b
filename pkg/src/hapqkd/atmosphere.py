"""Attenuation rates, sky radiance presets and turbulence parameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from hapqkd.errors import DomainError, MissingEntryError
from hapqkd.geometry import WeatherLayer

DEFAULT_MOLECULAR_RATES: dict[float, float] = {
    550.0: 0.13,
    690.0: 0.01,
    850.0: 0.41,
    1550.0: 0.01,
}

# W m^-2 sr^-1 um^-1
SKY_PRESETS: dict[str, float] = {
    "day_cloud": 150.0,
    "day_hazy": 15.0,
    "day_clear": 1.5,
    "full_moon": 1.5e-3,
    "new_moon": 1.5e-4,
    "moonless": 1.5e-5,
}
NIGHT_PRESETS = ("full_moon", "new_moon", "moonless")
DAY_PRESETS = ("day_clear", "day_hazy", "day_cloud")

WEATHER_KINDS = ("clear", "fog", "rain", "snow")

# layer tops in meters when a condition does not give its own
DEFAULT_LAYER_TOP = {"fog": 500.0, "rain": 5000.0, "snow": 5000.0}

# representative visibilities (km) for the figure sweeps
WEATHER_GRADES: dict[str, dict[str, float]] = {
    "fog": {"heavy": 0.2, "moderate": 0.5, "light": 1.0},
    "rain": {"heavy": 1.0, "moderate": 2.8, "light": 5.9},
    "snow": {"heavy": 0.5, "moderate": 1.0, "light": 2.0},
}

_WAVELENGTH_MATCH_NM = 1e-6


@dataclass(frozen=True)
class MolecularAbsorptionTable:
    """Molecular absorption in dB/km keyed by wavelength in nm."""

    entries: Mapping[float, float] = field(default_factory=lambda: dict(DEFAULT_MOLECULAR_RATES))

    def __post_init__(self) -> None:
        clean = {}
        for wl, rate in self.entries.items():
            wl, rate = float(wl), float(rate)
            if not wl > 0:
                raise DomainError(f"molecular table wavelength must be > 0, got {wl!r}")
            if rate < 0:
                raise DomainError(f"molecular rate at {wl} nm must be >= 0, got {rate!r}")
            clean[wl] = rate
        object.__setattr__(self, "entries", clean)


@dataclass(frozen=True)
class WeatherCondition:
    kind: str = "clear"
    visibility_km: Optional[float] = None
    layer: Optional[WeatherLayer] = None

    def __post_init__(self) -> None:
        if self.kind not in WEATHER_KINDS:
            raise DomainError(f"weather kind must be one of {WEATHER_KINDS}, got {self.kind!r}")
        if self.kind != "clear":
            if self.visibility_km is None or not self.visibility_km > 0:
                raise DomainError(
                    f"visibility_km must be > 0 for {self.kind}, got {self.visibility_km!r}"
                )

    def resolved_layer(self) -> Optional[WeatherLayer]:
        if self.kind == "clear":
            return None
        if self.layer is not None:
            return self.layer
        return WeatherLayer(DEFAULT_LAYER_TOP[self.kind])


@dataclass(frozen=True)
class SkyRadiance:
    """Sky spectral radiance, either a named preset or ``preset="custom"``.

    ``light_pollution`` is added on top of either.
    """

    preset: str = "moonless"
    brightness: Optional[float] = None
    light_pollution: float = 0.0

    def __post_init__(self) -> None:
        if self.preset == "custom":
            if self.brightness is None or self.brightness < 0:
                raise DomainError("custom sky needs brightness >= 0")
        elif self.preset not in SKY_PRESETS:
            raise DomainError(
                f"sky preset must be one of {sorted(SKY_PRESETS)} or 'custom', got {self.preset!r}"
            )
        elif self.brightness is not None:
            raise DomainError("brightness is only allowed with preset='custom'")
        if self.light_pollution < 0:
            raise DomainError("light_pollution must be >= 0")

    @property
    def radiance(self) -> float:
        base = self.brightness if self.preset == "custom" else SKY_PRESETS[self.preset]
        return base + self.light_pollution


@dataclass(frozen=True)
class TurbulenceModel:
    fried_parameter: float = 0.2
    fixed_atmospheric_loss: float = 3.0

    def __post_init__(self) -> None:
        if not self.fried_parameter > 0:
            raise DomainError(f"fried_parameter must be > 0, got {self.fried_parameter!r}")
        if self.fixed_atmospheric_loss < 0:
            raise DomainError("fixed_atmospheric_loss must be >= 0")


def molecular_rate(table: MolecularAbsorptionTable, wavelength_nm: float) -> float:
    """Tabulated absorption rate in dB/km. No interpolation between entries."""
    for wl, rate in table.entries.items():
        if abs(wl - wavelength_nm) <= _WAVELENGTH_MATCH_NM:
            return rate
    raise MissingEntryError(
        f"no molecular absorption entry for {wavelength_nm:g} nm "
        f"(tabulated: {sorted(table.entries)})"
    )


def size_distribution_exponent(visibility_km: float) -> float:
    """Particle size exponent p for the fog model; boundary values take the upper branch."""
    if not visibility_km > 0:
        raise DomainError(f"visibility must be > 0, got {visibility_km!r}")
    if visibility_km >= 50:
        return 1.6
    if visibility_km >= 6:
        return 1.3
    return 0.585 * visibility_km ** (1.0 / 3.0)


def fog_rate(visibility_km: float, wavelength_nm: float) -> float:
    p = size_distribution_exponent(visibility_km)
    return 3.91 / visibility_km * (wavelength_nm / 550.0) ** (-p)


def snow_rate(visibility_km: float) -> float:
    if not visibility_km > 0:
        raise DomainError(f"visibility must be > 0, got {visibility_km!r}")
    return 58.0 / visibility_km


def rain_rate(visibility_km: float) -> float:
    if not visibility_km > 0:
        raise DomainError(f"visibility must be > 0, got {visibility_km!r}")
    return 2.8 / visibility_km


def weather_rate(cond: WeatherCondition, wavelength_nm: float) -> float:
    """Weather attenuation in dB/km."""
    if cond.kind == "clear":
        return 0.0
    if cond.kind == "fog":
        return fog_rate(cond.visibility_km, wavelength_nm)
    if cond.kind == "snow":
        return snow_rate(cond.visibility_km)
    return rain_rate(cond.visibility_km)


def wavelength_nm(wavelength_m: float) -> float:
    return wavelength_m * 1e9
