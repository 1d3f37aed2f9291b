import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hapqkd.atmosphere import SKY_PRESETS, SkyRadiance, WeatherCondition
from hapqkd.errors import ScenarioError
from hapqkd.geometry import ground_footprint_diameter, los_distance
from hapqkd.optics import diffraction_divergence
from hapqkd.scenario import (
    Scenario,
    dump_scenario,
    load_scenario,
    scenario_to_dict,
    with_value,
)


def test_empty_document_gives_defaults():
    for src in (None, "{}", {}, ""):
        s = load_scenario(src) if src != "" else load_scenario("{}")
        assert s == Scenario()
    s = Scenario()
    assert s.transmitter.wavelength == 1550e-9
    assert s.turbulence.fried_parameter == 0.2
    assert s.transmitter.aperture_diameter == 0.1
    assert s.receiver.aperture_diameter == 0.4
    assert s.pointing.jitter == 5e-6
    assert s.geometry.hap_altitude == 20_000.0


def test_file_roundtrip(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(dump_scenario(Scenario()), encoding="utf-8")
    assert load_scenario(path) == Scenario()
    assert load_scenario(str(path)) == Scenario()


def test_roundtrip_non_default():
    s = Scenario()
    s = with_value(s, "geometry.elevation_deg", 33.3)
    s = with_value(s, "weather", WeatherCondition("fog", 0.7))
    s = with_value(s, "weather.layer.layer_top_altitude", 800.0)
    s = with_value(s, "sky", SkyRadiance("custom", brightness=2.5))
    s = with_value(s, "transmitter.divergence_override", 2e-3)
    s = with_value(s, "molecular_absorption.entries", {1550.0: 0.02, 1064.0: 0.05})
    s = with_value(s, "method", "nanobob")
    assert load_scenario(dump_scenario(s)) == s


@settings(max_examples=50, deadline=None)
@given(
    elev=st.floats(1.0, 90.0),
    d_tx=st.floats(0.01, 1.0),
    jitter=st.floats(0.0, 1e-4),
    sky=st.sampled_from(list(SKY_PRESETS)),
    method=st.sampled_from(["method1", "nanobob"]),
)
def test_roundtrip_property(elev, d_tx, jitter, sky, method):
    s = load_scenario(
        {
            "geometry": {"elevation_deg": elev},
            "transmitter": {"aperture_diameter": d_tx},
            "pointing": {"jitter": jitter},
            "sky": {"preset": sky},
            "method": method,
        }
    )
    assert load_scenario(json.loads(json.dumps(scenario_to_dict(s)))) == s


def test_out_of_range_elevation():
    with pytest.raises(ScenarioError, match="geometry"):
        load_scenario({"geometry": {"elevation_deg": 200}})


def test_unknown_key_rejected():
    with pytest.raises(ScenarioError, match="'geometry.elevaton_deg'"):
        load_scenario('{"geometry": {"elevaton_deg": 30}}')
    with pytest.raises(ScenarioError, match="'geometri'"):
        load_scenario({"geometri": {}})


def test_wrong_types_rejected():
    with pytest.raises(ScenarioError, match="expected a number"):
        load_scenario({"geometry": {"elevation_deg": "30"}})
    with pytest.raises(ScenarioError, match="expected an object"):
        load_scenario({"geometry": 3})


def test_parse_error_reports_position():
    with pytest.raises(ScenarioError, match=r"line 2, column \d+"):
        load_scenario('{\n  "geometry": {,}\n}')


def test_missing_file():
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario("/nonexistent/scenario.json")


def test_divergence_override_footprint():
    s = load_scenario({"transmitter": {"divergence_override": 1e-3}})
    d = ground_footprint_diameter(
        s.transmitter.aperture_diameter, los_distance(s.geometry), diffraction_divergence(s.transmitter)
    )
    assert d / 2 == pytest.approx(10.05, rel=1e-12)


def test_molecular_entries_replace_table():
    # a given table replaces the default one, so serialized tables round-trip
    s = load_scenario({"molecular_absorption": {"entries": {"1064": 0.05}}})
    assert s.molecular_absorption.entries == {1064.0: 0.05}


def test_layer_above_platform_rejected():
    with pytest.raises(ScenarioError):
        load_scenario({"geometry": {"hap_altitude": 3000}, "weather": {"kind": "rain", "visibility_km": 2}})


def test_with_value_los():
    s = with_value(Scenario(), "geometry.los", 60_000.0)
    assert los_distance(s.geometry) == pytest.approx(60_000.0, rel=1e-12)
    with pytest.raises(ScenarioError):
        with_value(Scenario(), "nothing.here", 1.0)


def test_invalid_method():
    with pytest.raises(ScenarioError):
        load_scenario({"method": "method3"})
    assert not math.isnan(Scenario().geometry.elevation_deg)
