"""Slant-path geometry between a stratospheric platform and a ground station.

Flat-earth model: the slant range is altitude / sin(elevation). Earth curvature
and refraction are ignored, even at 5 degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from hapqkd.errors import DomainError


def _check_elevation(elevation_deg: float) -> None:
    if not (0.0 < elevation_deg <= 90.0):
        raise DomainError(f"elevation_deg must be in (0, 90], got {elevation_deg!r}")


def _sin_elevation(elevation_deg: float) -> float:
    # sin(radians(90)) is exactly 1.0, so the vertical case stays exact
    return math.sin(math.radians(elevation_deg))


@dataclass(frozen=True)
class LinkGeometry:
    """Platform altitude (m) and elevation angle seen from the ground (degrees)."""

    hap_altitude: float = 20_000.0
    elevation_deg: float = 90.0

    def __post_init__(self) -> None:
        if not self.hap_altitude > 0:
            raise DomainError(f"hap_altitude must be > 0, got {self.hap_altitude!r}")
        _check_elevation(self.elevation_deg)

    @property
    def los(self) -> float:
        return los_distance(self)


@dataclass(frozen=True)
class WeatherLayer:
    """Top of a weather layer (fog, rain or snow) above the ground station, in meters."""

    layer_top_altitude: float

    def __post_init__(self) -> None:
        if not self.layer_top_altitude > 0:
            raise DomainError(
                f"layer_top_altitude must be > 0, got {self.layer_top_altitude!r}"
            )


def los_distance(geom: LinkGeometry) -> float:
    """Line-of-sight distance in meters."""
    _check_elevation(geom.elevation_deg)
    return geom.hap_altitude / _sin_elevation(geom.elevation_deg)


def slant_through_layer(layer: WeatherLayer, elevation_deg: float) -> float:
    """Path length in meters spent inside a weather layer."""
    _check_elevation(elevation_deg)
    if not layer.layer_top_altitude > 0:
        raise DomainError("layer_top_altitude must be > 0")
    return layer.layer_top_altitude / _sin_elevation(elevation_deg)


def elevation_for_los(hap_altitude: float, los: float) -> float:
    """Elevation (degrees) at which the slant range equals ``los``."""
    if not hap_altitude > 0:
        raise DomainError("hap_altitude must be > 0")
    if los < hap_altitude:
        raise DomainError(f"los {los!r} m is shorter than the altitude {hap_altitude!r} m")
    return math.degrees(math.asin(hap_altitude / los))


def ground_footprint_diameter(tx_aperture: float, los: float, divergence: float) -> float:
    """Full beam diameter on the ground in meters (aperture plus linear spreading).

    ``divergence`` is the full angle in radians. Halve the result for the radius.
    """
    if tx_aperture < 0 or los < 0 or divergence < 0:
        raise DomainError("aperture, distance and divergence must be non-negative")
    return tx_aperture + los * divergence
