import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hapqkd import budget
from hapqkd.atmosphere import TurbulenceModel, WeatherCondition
from hapqkd.budget import (
    NanoBobEfficiencies,
    ReceiverLosses,
    geometric_loss_db,
    geometric_loss_db_raw,
    method1_total,
    nanobob_spreading_db,
    nanobob_total,
)
from hapqkd.errors import DomainError
from hapqkd.geometry import WeatherLayer
from hapqkd.scenario import Scenario, with_value

COMPONENTS = ("geometric", "pointing", "molecular", "weather", "fixed_atmospheric")


def at(elev, **kw) -> Scenario:
    s = with_value(Scenario(), "geometry.elevation_deg", elev)
    return dataclasses.replace(s, **kw)


def test_geometric_loss_values():
    # 20 log10((0.1 + R * 18.91e-6) / 0.4), mpmath reference
    assert geometric_loss_db(0.1, 0.4, 60_000.0, 18.91e-6) == pytest.approx(9.78932562606257, rel=1e-12)
    assert geometric_loss_db(0.1, 0.4, 20_000.0, 18.91e-6) == pytest.approx(1.55099160903587, rel=1e-12)


def test_geometric_loss_unity_ratio_and_clamp():
    assert geometric_loss_db(0.1, 0.4, 300.0, 1e-3) == pytest.approx(0.0, abs=1e-12)
    assert geometric_loss_db_raw(0.1, 0.4, 0.0, 0.0) == pytest.approx(20 * math.log10(0.25))
    assert geometric_loss_db(0.1, 0.4, 0.0, 0.0) == 0.0


def test_geometric_loss_rejects_bad_inputs():
    with pytest.raises(DomainError):
        geometric_loss_db(0.0, 0.4, 1.0, 1e-5)
    with pytest.raises(DomainError):
        geometric_loss_db(0.1, 0.4, -1.0, 1e-5)


def test_method1_regular_elevation():
    b = method1_total(at(20.0))
    assert b.channel_total == pytest.approx(12.5979638050738, rel=1e-12)
    assert b.geometric == pytest.approx(9.58418203814224, rel=1e-12)
    assert b.pointing == pytest.approx(2.42902088689893, rel=1e-12)
    assert b.molecular == pytest.approx(0.584760880032618, rel=1e-12)
    assert b.receiver == pytest.approx(5.2)
    assert b.system_total == pytest.approx(b.channel_total + 5.2)


def test_method1_vertical():
    assert method1_total(at(90.0)).channel_total == pytest.approx(4.18001249593480, rel=1e-12)


def test_method1_zero_jitter_near_field_is_zero():
    s = at(90.0, pointing=dataclasses.replace(Scenario().pointing, jitter=0.0))
    s = with_value(s, "molecular_absorption.entries", {1550.0: 0.0})
    s = with_value(s, "transmitter.divergence_override", 1e-9)
    b = method1_total(s)
    assert b.geometric_raw < 0
    assert b.channel_total == 0.0


def test_nanobob_values():
    assert nanobob_total(at(90.0)).channel_total == pytest.approx(12.1789817108409, rel=1e-12)
    assert nanobob_total(at(20.0)).channel_total == pytest.approx(21.4979480179305, rel=1e-12)


def test_nanobob_far_field_limit():
    eff = NanoBobEfficiencies(1.0, 1.0, 1.0)
    got = nanobob_spreading_db(50_000.0, 1e-4, 0.0, 0.4, eff.product)
    assert got == pytest.approx(20 * math.log10(50_000.0 * 1e-4 / 0.4), rel=1e-12)


def test_nanobob_limit_through_scenario():
    s = at(
        30.0,
        nanobob_efficiencies=NanoBobEfficiencies(1.0, 1.0, 1.0),
        turbulence=TurbulenceModel(fried_parameter=1e12, fixed_atmospheric_loss=0.0),
    )
    theta = 2.44 * 1550e-9 / 0.1
    expected = 20 * math.log10(40_000.0 * theta / 0.4)
    assert nanobob_total(s).channel_total == pytest.approx(expected, rel=1e-9)


def test_breakdown_sums_exactly():
    for method in budget.METHODS:
        s = at(35.0, weather=WeatherCondition("fog", 0.7))
        b = budget.total_loss(s, method)
        assert b.channel_total == math.fsum(getattr(b, c) for c in COMPONENTS)
        assert b.system_total == b.channel_total + b.receiver
        assert all(getattr(b, c) >= 0 for c in COMPONENTS + ("receiver",))


def test_weather_adds_exactly_rate_times_path():
    for method in budget.METHODS:
        clear = budget.total_loss(at(30.0), method)
        rainy = budget.total_loss(at(30.0, weather=WeatherCondition("rain", 2.0)), method)
        # 1.4 dB/km through 10 km of slant path
        assert rainy.weather == pytest.approx(14.0, rel=1e-12)
        assert rainy.channel_total - clear.channel_total == pytest.approx(14.0, rel=1e-12)


def test_custom_weather_layer():
    s = at(90.0, weather=WeatherCondition("fog", 1.0, WeatherLayer(250.0)))
    assert method1_total(s).weather == pytest.approx(2.13277424343515 * 0.25, rel=1e-12)


def test_receiver_losses_and_efficiencies_invariants():
    assert ReceiverLosses().total == pytest.approx(5.2)
    with pytest.raises(DomainError):
        ReceiverLosses(-1.0, 0.0)
    with pytest.raises(DomainError):
        NanoBobEfficiencies(0.0, 0.8, 0.8)
    with pytest.raises(DomainError):
        NanoBobEfficiencies(1.2, 0.8, 0.8)


def test_unknown_method():
    with pytest.raises(DomainError):
        budget.total_loss(Scenario(), "method3")


def test_nanobob_above_method1_over_range():
    for los_km in np.linspace(20, 230, 85):
        s = with_value(Scenario(), "geometry.los", float(los_km) * 1000)
        assert nanobob_total(s).channel_total > method1_total(s).channel_total


@settings(max_examples=60, deadline=None)
@given(st.floats(20_000, 230_000), st.floats(20_000, 230_000))
def test_totals_nondecreasing_in_distance(a, b):
    lo, hi = sorted((a, b))
    s_lo = with_value(Scenario(), "geometry.los", lo)
    s_hi = with_value(Scenario(), "geometry.los", hi)
    for method in budget.METHODS:
        assert budget.total_loss(s_hi, method).channel_total >= budget.total_loss(s_lo, method).channel_total - 1e-12


def test_aperture_optimum_interior():
    ds = np.linspace(0.05, 0.30, 2501)
    losses = [
        method1_total(at(20.0, transmitter=dataclasses.replace(Scenario().transmitter, aperture_diameter=float(d)))).channel_total
        for d in ds
    ]
    best = ds[int(np.argmin(losses))]
    assert 0.11 <= best <= 0.13
    assert losses[0] > min(losses) < losses[-1]
