"""Read-only catalog of stratospheric and lighter-than-air platforms.

Text columns keep the published wording (ranges, "Months", "Almost
unlimited"). The ``*_kg``, ``*_w`` and ``*_km`` columns hold a single number
where one can be read off (the upper end of a range) and are empty otherwise.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

PLATFORM_CLASSES = ("fixed-wing", "balloon", "airship", "tethered")


@dataclass(frozen=True)
class PlatformRecord:
    name: str
    platform_class: str
    company: str
    platform_type: str
    source_table: str
    altitude: Optional[str]
    altitude_km: Optional[float]
    payload_capacity: Optional[str]
    payload_capacity_kg: Optional[float]
    payload_power: Optional[str]
    payload_power_w: Optional[float]
    aircraft_weight: Optional[str]
    dimensions: Optional[str]
    mobility: Optional[str]
    endurance: Optional[str]
    status: Optional[str]


def _text(cell: str) -> Optional[str]:
    return cell if cell != "" else None


def _number(cell: str) -> Optional[float]:
    return float(cell) if cell != "" else None


@lru_cache(maxsize=1)
def _load() -> tuple[PlatformRecord, ...]:
    raw = resources.files("hapqkd").joinpath("data/platforms.csv").read_text(encoding="utf-8")
    records = []
    for row in csv.DictReader(io.StringIO(raw)):
        records.append(
            PlatformRecord(
                name=row["name"],
                platform_class=row["class"],
                company=row["company"],
                platform_type=row["platform_type"],
                source_table=row["table"],
                altitude=_text(row["altitude"]),
                altitude_km=_number(row["altitude_km"]),
                payload_capacity=_text(row["payload_capacity"]),
                payload_capacity_kg=_number(row["payload_capacity_kg"]),
                payload_power=_text(row["payload_power"]),
                payload_power_w=_number(row["payload_power_w"]),
                aircraft_weight=_text(row["aircraft_weight"]),
                dimensions=_text(row["dimensions"]),
                mobility=_text(row["mobility"]),
                endurance=_text(row["endurance"]),
                status=_text(row["status"]),
            )
        )
    return tuple(records)


def catalog(
    platform_class: Optional[str] = None,
    min_payload: Optional[float] = None,
    name: Optional[str] = None,
) -> list[PlatformRecord]:
    """Platforms matching every given filter, in table order.

    Records without a numeric payload never pass a ``min_payload`` filter.
    """
    if platform_class is not None and platform_class not in PLATFORM_CLASSES:
        raise ValueError(f"class must be one of {PLATFORM_CLASSES}, got {platform_class!r}")
    out = []
    for rec in _load():
        if platform_class is not None and rec.platform_class != platform_class:
            continue
        if name is not None and rec.name.lower() != name.lower():
            continue
        if min_payload is not None and (
            rec.payload_capacity_kg is None or rec.payload_capacity_kg < min_payload
        ):
            continue
        out.append(rec)
    return out


def embedded_row_count() -> int:
    raw = resources.files("hapqkd").joinpath("data/platforms.csv").read_text(encoding="utf-8")
    return sum(1 for _ in csv.DictReader(io.StringIO(raw)))
