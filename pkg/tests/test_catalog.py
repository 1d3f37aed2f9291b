import pytest

from hapqkd.catalog import PLATFORM_CLASSES, catalog, embedded_row_count


def test_zephyr_s():
    (rec,) = catalog(platform_class="fixed-wing", name="Zephyr S")
    assert rec.altitude_km == 21.0
    assert rec.payload_capacity_kg == 2.0


def test_min_payload_filter():
    names = {r.name for r in catalog(min_payload=250)}
    assert {"Stratobus", "Helios", "Global Hawk"} <= names
    assert all(r.payload_capacity_kg >= 250 for r in catalog(min_payload=250))


def test_unfiltered_returns_everything():
    everything = catalog()
    assert len(everything) == embedded_row_count() == 27
    assert {r.platform_class for r in everything} <= set(PLATFORM_CLASSES)


def test_absent_values_are_none_not_zero():
    for rec in catalog():
        assert rec.altitude_km is None or rec.altitude_km > 0
        assert rec.payload_capacity_kg is None or rec.payload_capacity_kg > 0
    assert any(r.payload_power_w is None for r in catalog())


def test_qualitative_cells_kept_verbatim():
    endurances = {r.endurance for r in catalog() if r.endurance}
    assert any(not any(ch.isdigit() for ch in e) for e in endurances)


def test_bad_class():
    with pytest.raises(ValueError):
        catalog(platform_class="rocket")
