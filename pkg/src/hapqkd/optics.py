"""Transmitter divergence, receiver field of view and pointing effects."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from hapqkd.errors import DomainError, SingularConfigurationError

# dB per unit of (jitter/divergence)^2 for a Gaussian misalignment
_POINTING_DB_COEFF = 80.0 / math.log(10.0)

# Solid-angle FoV that reproduces the clear-day 43 dB QBER threshold with the
# default receiver and detector. See tests/test_calibration.py for the inversion.
CALIBRATED_FOV_SR = 1.02e-10


@dataclass(frozen=True)
class TransmitterOptics:
    aperture_diameter: float = 0.1
    wavelength: float = 1550e-9
    divergence_override: Optional[float] = None
    # informational only, the photon-counting model does not use it
    classical_power: float = 1e-3

    def __post_init__(self) -> None:
        if not self.aperture_diameter > 0:
            raise DomainError(f"aperture_diameter must be > 0, got {self.aperture_diameter!r}")
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be > 0, got {self.wavelength!r}")
        if self.divergence_override is not None and not self.divergence_override > 0:
            raise DomainError(
                f"divergence_override must be > 0 when set, got {self.divergence_override!r}"
            )
        if self.classical_power < 0:
            raise DomainError("classical_power must be >= 0")


@dataclass(frozen=True)
class ReceiverOptics:
    """Ground telescope, relay optics and detector coupling.

    The FoV solid angle resolves in this order: ``fov_solid_angle_override``
    if set, then the focal chain if both focal lengths are set, then
    :data:`CALIBRATED_FOV_SR`.
    """

    aperture_diameter: float = 0.4
    detector_diameter: float = 64.5e-6
    telescope_focal_length: Optional[float] = None
    relay_focal_length: Optional[float] = None
    lens_separation: float = 0.0
    filter_bandwidth_um: float = 1e-4
    fov_solid_angle_override: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.aperture_diameter > 0:
            raise DomainError(f"aperture_diameter must be > 0, got {self.aperture_diameter!r}")
        if not self.detector_diameter > 0:
            raise DomainError(f"detector_diameter must be > 0, got {self.detector_diameter!r}")
        if self.filter_bandwidth_um < 0:
            raise DomainError(f"filter_bandwidth_um must be >= 0, got {self.filter_bandwidth_um!r}")
        if self.fov_solid_angle_override is not None and self.fov_solid_angle_override < 0:
            raise DomainError("fov_solid_angle_override must be >= 0")
        if (self.telescope_focal_length is None) != (self.relay_focal_length is None):
            raise DomainError(
                "telescope_focal_length and relay_focal_length must be set together"
            )

    @property
    def area(self) -> float:
        return math.pi * (self.aperture_diameter / 2.0) ** 2

    @property
    def has_focal_chain(self) -> bool:
        return self.telescope_focal_length is not None and self.relay_focal_length is not None


@dataclass(frozen=True)
class PointingModel:
    """RMS pointing jitter in radians.

    With ``include_beam_wander`` the turbulence-induced centroid wander is
    converted to an angle and added in quadrature to the jitter.
    """

    jitter: float = 5e-6
    include_beam_wander: bool = False

    def __post_init__(self) -> None:
        if self.jitter < 0:
            raise DomainError(f"jitter must be >= 0, got {self.jitter!r}")


def diffraction_divergence(tx: TransmitterOptics) -> float:
    """Full divergence angle 1.22 λ/D, or the override when one is set."""
    if tx.divergence_override is not None:
        return tx.divergence_override
    return 1.22 * tx.wavelength / tx.aperture_diameter


def nanobob_divergence(tx: TransmitterOptics) -> float:
    """Pessimistic divergence 2.44 λ/D used by the NanoBob budget."""
    if tx.divergence_override is not None:
        return tx.divergence_override
    return 2.44 * tx.wavelength / tx.aperture_diameter


def turbulent_divergence(wavelength: float, fried_parameter: float) -> float:
    if not fried_parameter > 0:
        raise DomainError(f"fried_parameter must be > 0, got {fried_parameter!r}")
    return 2.1 * wavelength / fried_parameter


def effective_focal_length(rx: ReceiverOptics) -> float:
    """Effective focal length of the telescope + relay pair."""
    if not rx.has_focal_chain:
        raise DomainError("receiver has no focal chain")
    f1 = rx.telescope_focal_length
    f2 = rx.relay_focal_length
    denom = f1 + f2 - rx.lens_separation
    if denom == 0:
        raise SingularConfigurationError(
            f"f1 + f2 - d is zero (f1={f1}, f2={f2}, d={rx.lens_separation}); "
            "the system is afocal"
        )
    return f1 * f2 / denom


def receiver_fov(rx: ReceiverOptics) -> tuple[float, float]:
    """Return ``(planar_full_angle_rad, solid_angle_sr)``.

    The solid angle uses the small-cone conversion pi * (planar / 2)**2.
    When no focal chain is configured the planar angle is back-computed from
    the solid angle.
    """
    if rx.fov_solid_angle_override is not None:
        solid = rx.fov_solid_angle_override
        return 2.0 * math.sqrt(solid / math.pi), solid
    if rx.has_focal_chain:
        focal = effective_focal_length(rx)
        planar = 2.0 * math.atan(rx.detector_diameter / (2.0 * abs(focal)))
        return planar, math.pi * (planar / 2.0) ** 2
    solid = CALIBRATED_FOV_SR
    return 2.0 * math.sqrt(solid / math.pi), solid


def effective_jitter(
    pointing: PointingModel,
    tx: TransmitterOptics | None = None,
    fried_parameter: float | None = None,
) -> float:
    if not pointing.include_beam_wander:
        return pointing.jitter
    if tx is None or fried_parameter is None:
        raise DomainError("beam wander mode needs the transmitter and fried parameter")
    # variance / R^2 does not depend on R
    wander_angle_sq = beam_wander_variance(1.0, tx, fried_parameter)
    return math.sqrt(pointing.jitter**2 + wander_angle_sq)


def pointing_loss_db(pointing: PointingModel | float, divergence: float) -> float:
    """Misalignment loss in dB for the transmission fraction exp(-8 θj²/θ²)."""
    jitter = pointing.jitter if isinstance(pointing, PointingModel) else float(pointing)
    if not divergence > 0:
        raise DomainError(f"divergence must be > 0, got {divergence!r}")
    if jitter < 0:
        raise DomainError("jitter must be >= 0")
    return _POINTING_DB_COEFF * (jitter / divergence) ** 2


def beam_wander_variance(los: float, tx: TransmitterOptics, fried_parameter: float) -> float:
    """Variance of the beam centroid displacement at the receiver, in m²."""
    if not (los > 0 and fried_parameter > 0):
        raise DomainError("los and fried_parameter must be > 0")
    d = tx.aperture_diameter
    return 0.54 * los**2 * (tx.wavelength / d) ** 2 * (d / fried_parameter) ** (5.0 / 3.0)
