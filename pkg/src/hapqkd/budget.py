"""Total channel loss under the additive-dB method and the NanoBob estimate.

Both methods produce a :class:`LossBreakdown`. ``channel_total`` leaves out the
receiver-internal losses because those are already folded into the detector
efficiency of the QBER model; ``system_total`` adds them back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from hapqkd import atmosphere, geometry, optics
from hapqkd.errors import DomainError

if TYPE_CHECKING:
    from hapqkd.scenario import Scenario

METHODS = ("method1", "nanobob")


@dataclass(frozen=True)
class ReceiverLosses:
    non_ideal_optics: float = 3.0
    telescope: float = 2.2

    def __post_init__(self) -> None:
        if self.non_ideal_optics < 0 or self.telescope < 0:
            raise DomainError("receiver losses must be >= 0 dB")

    @property
    def total(self) -> float:
        return self.non_ideal_optics + self.telescope


@dataclass(frozen=True)
class NanoBobEfficiencies:
    transmitter: float = 0.8
    receiver: float = 0.8
    pointing: float = 0.8

    def __post_init__(self) -> None:
        for name in ("transmitter", "receiver", "pointing"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise DomainError(f"{name} efficiency must be in (0, 1], got {value!r}")

    @property
    def product(self) -> float:
        return self.transmitter * self.pointing * self.receiver


@dataclass(frozen=True)
class LossBreakdown:
    method: str
    geometric: float
    pointing: float
    molecular: float
    weather: float
    fixed_atmospheric: float
    receiver: float
    channel_total: float
    system_total: float
    # unclamped spreading term, may be negative in the near field
    geometric_raw: float

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "geometric_db": self.geometric,
            "geometric_raw_db": self.geometric_raw,
            "pointing_db": self.pointing,
            "molecular_db": self.molecular,
            "weather_db": self.weather,
            "fixed_atmospheric_db": self.fixed_atmospheric,
            "receiver_db": self.receiver,
            "channel_total_db": self.channel_total,
            "system_total_db": self.system_total,
        }


def geometric_loss_db_raw(
    tx_aperture: float, rx_aperture: float, los: float, divergence: float
) -> float:
    if not (tx_aperture > 0 and rx_aperture > 0):
        raise DomainError("apertures must be > 0")
    if los < 0 or divergence < 0:
        raise DomainError("los and divergence must be >= 0")
    spot = geometry.ground_footprint_diameter(tx_aperture, los, divergence)
    return 20.0 * math.log10(spot / rx_aperture)


def geometric_loss_db(
    tx_aperture: float, rx_aperture: float, los: float, divergence: float
) -> float:
    """Beam-spreading loss in dB, clamped at zero when the spot fits inside the receiver."""
    return max(0.0, geometric_loss_db_raw(tx_aperture, rx_aperture, los, divergence))


def _weather_db(scenario: Scenario) -> float:
    layer = scenario.weather.resolved_layer()
    if layer is None:
        return 0.0
    rate = atmosphere.weather_rate(
        scenario.weather, atmosphere.wavelength_nm(scenario.transmitter.wavelength)
    )
    path_km = geometry.slant_through_layer(layer, scenario.geometry.elevation_deg) / 1000.0
    return rate * path_km


def _breakdown(method, geometric_raw, pointing, molecular, weather, fixed_atm, receiver):
    geometric = max(0.0, geometric_raw)
    channel = math.fsum((geometric, pointing, molecular, weather, fixed_atm))
    return LossBreakdown(
        method=method,
        geometric=geometric,
        pointing=pointing,
        molecular=molecular,
        weather=weather,
        fixed_atmospheric=fixed_atm,
        receiver=receiver,
        channel_total=channel,
        system_total=channel + receiver,
        geometric_raw=geometric_raw,
    )


def method1_total(scenario: Scenario) -> LossBreakdown:
    tx = scenario.transmitter
    los = geometry.los_distance(scenario.geometry)
    theta = optics.diffraction_divergence(tx)
    geo_raw = geometric_loss_db_raw(
        tx.aperture_diameter, scenario.receiver.aperture_diameter, los, theta
    )
    jitter = optics.effective_jitter(
        scenario.pointing, tx, scenario.turbulence.fried_parameter
    )
    pointing = optics.pointing_loss_db(jitter, theta)
    rate = atmosphere.molecular_rate(
        scenario.molecular_absorption, atmosphere.wavelength_nm(tx.wavelength)
    )
    molecular = rate * los / 1000.0
    return _breakdown(
        "method1", geo_raw, pointing, molecular, _weather_db(scenario), 0.0,
        scenario.receiver_losses.total,
    )


def nanobob_spreading_db(
    los: float,
    divergence: float,
    turbulent_divergence: float,
    rx_aperture: float,
    efficiency_product: float,
) -> float:
    """The logarithmic term of the NanoBob estimate.

    The efficiency product multiplies the receiver aperture squared in the
    denominator.
    """
    num = los**2 * (divergence**2 + turbulent_divergence**2)
    den = rx_aperture**2 * efficiency_product
    if num == 0:
        return -math.inf
    return 10.0 * math.log10(num / den)


def nanobob_total(scenario: Scenario) -> LossBreakdown:
    tx = scenario.transmitter
    los = geometry.los_distance(scenario.geometry)
    theta = optics.nanobob_divergence(tx)
    theta_atm = optics.turbulent_divergence(tx.wavelength, scenario.turbulence.fried_parameter)
    spread = nanobob_spreading_db(
        los, theta, theta_atm, scenario.receiver.aperture_diameter,
        scenario.nanobob_efficiencies.product,
    )
    return _breakdown(
        "nanobob", spread, 0.0, 0.0, _weather_db(scenario),
        scenario.turbulence.fixed_atmospheric_loss, scenario.receiver_losses.total,
    )


def total_loss(scenario: Scenario, method: str | None = None) -> LossBreakdown:
    method = method or scenario.method
    if method == "method1":
        return method1_total(scenario)
    if method == "nanobob":
        return nanobob_total(scenario)
    raise DomainError(f"method must be one of {METHODS}, got {method!r}")
