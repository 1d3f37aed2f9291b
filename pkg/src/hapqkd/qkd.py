"""Count rates, QBER and SNR as functions of channel loss, plus inverse solvers.

DV-QKD QBER model: only background and dark counts cause errors, and half of
them land in the wrong bin, so ``QBER = 0.5 N / (S + N)``. Basis sifting scales
S and N alike and is left out.

CV-QKD SNR model, in shot-noise units: ``SNR = T V / (1 + v_el + T xi)``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np
from scipy import constants, optimize

from hapqkd import budget, optics
from hapqkd.atmosphere import SkyRadiance
from hapqkd.errors import ConfigurationError, DomainError, UndefinedQberError
from hapqkd.optics import ReceiverOptics

if TYPE_CHECKING:
    from hapqkd.scenario import Scenario

PROTOCOLS = ("dv", "cv")
PHOTON_NUMBER_MODES = ("average", "signal")


@dataclass(frozen=True)
class DvProtocolParams:
    """Decoy-state BB84 source and timing.

    ``photon_number_mode="average"`` drives count rates with the
    probability-weighted mean photon number of signal and decoy pulses;
    ``"signal"`` uses the signal state alone.
    """

    repetition_rate: float = 5e8
    signal_mean_photon: float = 0.5
    decoy_mean_photon: float = 1.0
    signal_probability: float = 0.8
    decoy_probability: float = 0.2
    qber_limit: float = 0.11
    gate_width: float = 500e-12
    photon_number_mode: str = "average"

    def __post_init__(self) -> None:
        if not math.isclose(self.signal_probability + self.decoy_probability, 1.0, abs_tol=1e-12):
            raise DomainError("signal_probability + decoy_probability must equal 1")
        for name in ("signal_probability", "decoy_probability"):
            if not 0 <= getattr(self, name) <= 1:
                raise DomainError(f"{name} must be in [0, 1]")
        for name in ("repetition_rate", "signal_mean_photon", "decoy_mean_photon", "gate_width"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if not 0 < self.qber_limit < 0.5:
            raise DomainError(f"qber_limit must be in (0, 0.5), got {self.qber_limit!r}")
        if self.photon_number_mode not in PHOTON_NUMBER_MODES:
            raise DomainError(f"photon_number_mode must be one of {PHOTON_NUMBER_MODES}")


@dataclass(frozen=True)
class DetectorParams:
    efficiency: float = 0.25
    dead_time: float = 18e-6
    dark_rate: float = 500.0
    diameter: float = 64.5e-6

    def __post_init__(self) -> None:
        if not 0 < self.efficiency <= 1:
            raise DomainError(f"efficiency must be in (0, 1], got {self.efficiency!r}")
        if self.dead_time < 0 or self.dark_rate < 0:
            raise DomainError("dead_time and dark_rate must be >= 0")
        if not self.diameter > 0:
            raise DomainError("diameter must be > 0")


@dataclass(frozen=True)
class CvProtocolParams:
    """Gaussian-modulated coherent states with homodyne detection, in shot-noise units."""

    modulation_variance: float = 10.0
    excess_noise: float = 0.03
    electronic_noise: float = 0.1
    snr_threshold: float = 0.024

    def __post_init__(self) -> None:
        if not self.modulation_variance > 0:
            raise DomainError("modulation_variance must be > 0")
        if self.excess_noise < 0 or self.electronic_noise < 0:
            raise DomainError("noise terms must be >= 0")
        if not self.snr_threshold > 0:
            raise DomainError("snr_threshold must be > 0")


@dataclass(frozen=True)
class FeasibilityResult:
    protocol: str
    channel_loss_db: float
    # loss at which the protocol limit is reached
    limit_loss_db: float
    margin_db: float
    feasible: bool
    signal_counts: Optional[float] = None
    noise_counts: Optional[float] = None
    qber: Optional[float] = None
    snr: Optional[float] = None

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def photon_energy(wavelength: float) -> float:
    return constants.h * constants.c / wavelength


def background_power(sky: SkyRadiance, rx: ReceiverOptics) -> float:
    """Sky background power in W reaching the detector plane."""
    _, solid_angle = optics.receiver_fov(rx)
    return sky.radiance * solid_angle * rx.area * rx.filter_bandwidth_um


def gate_factor(dv: DvProtocolParams) -> float:
    factor = dv.gate_width * dv.repetition_rate
    if factor > 1:
        raise ConfigurationError(
            f"gate width {dv.gate_width} s exceeds the pulse period at {dv.repetition_rate} Hz"
        )
    return factor


def noise_count_rate(
    sky: SkyRadiance,
    rx: ReceiverOptics,
    det: DetectorParams,
    dv: DvProtocolParams,
    wavelength: float,
) -> float:
    """Gated background plus dark counts per second."""
    gate = gate_factor(dv)
    photons = background_power(sky, rx) / photon_energy(wavelength)
    return photons * gate * det.efficiency + det.dark_rate * gate


def mean_photon_number(dv: DvProtocolParams) -> float:
    if dv.photon_number_mode == "signal":
        return dv.signal_mean_photon
    return (
        dv.signal_probability * dv.signal_mean_photon
        + dv.decoy_probability * dv.decoy_mean_photon
    )


def _transmittance(loss_db: float) -> float:
    return 10.0 ** (-loss_db / 10.0)


def signal_count_rate(
    dv: DvProtocolParams, det: DetectorParams, channel_loss: float, saturate: bool = True
) -> float:
    """Detected signal counts per second.

    With ``saturate`` the non-paralyzable dead-time correction N/(1 + N tau)
    is applied to the signal alone.
    """
    if channel_loss < 0:
        raise DomainError(f"channel_loss must be >= 0, got {channel_loss!r}")
    raw = dv.repetition_rate * mean_photon_number(dv) * _transmittance(channel_loss) * det.efficiency
    if not saturate:
        return raw
    return raw / (1.0 + raw * det.dead_time)


def dead_time_scaled(signal: float, noise: float, dead_time: float) -> tuple[float, float]:
    """Apply one dead-time factor to signal and noise clicks sharing a detector."""
    factor = 1.0 / (1.0 + (signal + noise) * dead_time)
    return signal * factor, noise * factor


def qber(signal: float, noise: float) -> float:
    if signal < 0 or noise < 0:
        raise DomainError("count rates must be >= 0")
    total = signal + noise
    if total == 0:
        raise UndefinedQberError("QBER undefined with zero signal and zero noise")
    return 0.5 * noise / total


def qber_at_loss(
    channel_loss: float,
    sky: SkyRadiance,
    rx: ReceiverOptics,
    det: DetectorParams,
    dv: DvProtocolParams,
    wavelength: float,
) -> float:
    signal, noise = _dv_counts(channel_loss, sky, rx, det, dv, wavelength)
    return qber(signal, noise)


def _dv_counts(channel_loss, sky, rx, det, dv, wavelength):
    signal = signal_count_rate(dv, det, channel_loss, saturate=False)
    noise = noise_count_rate(sky, rx, det, dv, wavelength)
    return dead_time_scaled(signal, noise, det.dead_time)


def max_tolerable_loss_db(
    sky: SkyRadiance,
    rx: ReceiverOptics,
    det: DetectorParams,
    dv: DvProtocolParams,
    wavelength: float,
) -> float:
    """Channel loss at which the QBER reaches ``dv.qber_limit``.

    Returns ``inf`` when there is no noise at all. A negative value means the
    limit is exceeded even over a lossless channel.
    """
    noise = noise_count_rate(sky, rx, det, dv, wavelength)
    if noise == 0:
        return math.inf
    limit = dv.qber_limit
    needed = noise * (0.5 - limit) / limit
    full = dv.repetition_rate * mean_photon_number(dv) * det.efficiency
    return 10.0 * math.log10(full / needed)


def calibrate_fov_solid_angle(
    target_loss_db: float,
    sky: SkyRadiance,
    rx: ReceiverOptics,
    det: DetectorParams,
    dv: DvProtocolParams,
    wavelength: float,
) -> float:
    """Solid-angle FoV (sr) that puts the QBER limit at ``target_loss_db``.

    Runs the count chain backwards: required signal, tolerable noise, sky
    photons, background power, then solid angle.
    """
    gate = gate_factor(dv)
    full = dv.repetition_rate * mean_photon_number(dv) * det.efficiency
    signal = full * _transmittance(target_loss_db)
    noise = signal * dv.qber_limit / (0.5 - dv.qber_limit)
    sky_counts = noise - det.dark_rate * gate
    if sky_counts <= 0:
        raise DomainError("dark counts alone already exceed the target threshold")
    power = sky_counts / (gate * det.efficiency) * photon_energy(wavelength)
    return power / (sky.radiance * rx.area * rx.filter_bandwidth_um)


def cv_snr(cv: CvProtocolParams, channel_loss: float) -> float:
    if channel_loss < 0:
        raise DomainError(f"channel_loss must be >= 0, got {channel_loss!r}")
    t = _transmittance(channel_loss)
    return t * cv.modulation_variance / (1.0 + cv.electronic_noise + t * cv.excess_noise)


def cv_threshold_loss_db(cv: CvProtocolParams) -> float:
    """Channel loss at which the SNR drops to ``cv.snr_threshold``."""
    denom = cv.modulation_variance - cv.snr_threshold * cv.excess_noise
    if denom <= 0:
        return -math.inf
    t = cv.snr_threshold * (1.0 + cv.electronic_noise) / denom
    return -10.0 * math.log10(t)


def dv_feasibility(scenario: Scenario, channel_loss: float) -> FeasibilityResult:
    wl = scenario.transmitter.wavelength
    signal, noise = _dv_counts(
        channel_loss, scenario.sky, scenario.receiver, scenario.detector, scenario.dv, wl
    )
    limit = max_tolerable_loss_db(
        scenario.sky, scenario.receiver, scenario.detector, scenario.dv, wl
    )
    q = qber(signal, noise) if signal + noise > 0 else 0.0
    return FeasibilityResult(
        protocol="dv",
        channel_loss_db=channel_loss,
        limit_loss_db=limit,
        margin_db=limit - channel_loss,
        feasible=q <= scenario.dv.qber_limit,
        signal_counts=signal,
        noise_counts=noise,
        qber=q,
    )


def cv_feasibility(scenario: Scenario, channel_loss: float) -> FeasibilityResult:
    snr = cv_snr(scenario.cv, channel_loss)
    limit = cv_threshold_loss_db(scenario.cv)
    return FeasibilityResult(
        protocol="cv",
        channel_loss_db=channel_loss,
        limit_loss_db=limit,
        margin_db=limit - channel_loss,
        feasible=snr >= scenario.cv.snr_threshold,
        snr=snr,
    )


def limit_loss_db(scenario: Scenario, protocol: str = "dv") -> float:
    if protocol == "dv":
        return max_tolerable_loss_db(
            scenario.sky, scenario.receiver, scenario.detector, scenario.dv,
            scenario.transmitter.wavelength,
        )
    if protocol == "cv":
        return cv_threshold_loss_db(scenario.cv)
    raise DomainError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")


def _natural_divergence(scenario: Scenario, method: str) -> float:
    tx = dataclasses.replace(scenario.transmitter, divergence_override=None)
    if method == "nanobob":
        return optics.nanobob_divergence(tx)
    return optics.diffraction_divergence(tx)


def max_feasible_divergence(
    scenario: Scenario,
    protocol: str = "dv",
    method: str | None = None,
    *,
    steps_per_octave: int = 8,
    max_divergence: float = 1.0,
) -> Optional[float]:
    """Largest full divergence (rad) whose channel loss stays within the protocol limit.

    Returns ``None`` if no divergence at or above the natural (diffraction)
    value is feasible, and ``inf`` if the limit is unbounded. The search scans
    a geometric grid upward from the natural divergence, then refines the last
    feasible-to-infeasible transition with a bracketing root finder.
    """
    method = method or scenario.method
    limit = limit_loss_db(scenario, protocol)
    if math.isinf(limit) and limit > 0:
        return math.inf

    def excess(theta: float) -> float:
        tx = dataclasses.replace(scenario.transmitter, divergence_override=theta)
        s = dataclasses.replace(scenario, transmitter=tx)
        return budget.total_loss(s, method).channel_total - limit

    lo = _natural_divergence(scenario, method)
    n = int(math.ceil(math.log2(max_divergence / lo) * steps_per_octave)) + 1
    grid = lo * np.exp2(np.arange(n) / steps_per_octave)
    values = [excess(float(t)) for t in grid]
    feasible = [i for i, v in enumerate(values) if v <= 0]
    if not feasible:
        return None
    i = feasible[-1]
    if i == len(grid) - 1:
        # still feasible at the search ceiling
        return float(grid[-1])
    if values[i] == 0:
        return float(grid[i])
    return float(optimize.brentq(excess, grid[i], grid[i + 1], xtol=1e-12, rtol=1e-12))
