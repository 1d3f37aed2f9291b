"""The default FoV solid angle is a calibration constant.

It comes from running the count chain backwards so that the QBER limit on a
clear day sits at 43 dB. The other five sky presets are then predictions.
"""

import pytest

from hapqkd.atmosphere import SkyRadiance
from hapqkd.optics import CALIBRATED_FOV_SR, ReceiverOptics
from hapqkd.qkd import (
    DetectorParams,
    DvProtocolParams,
    calibrate_fov_solid_angle,
    max_tolerable_loss_db,
)

WL = 1550e-9


def test_inversion_reproduces_shipped_constant():
    omega = calibrate_fov_solid_angle(43.0, SkyRadiance("day_clear"), ReceiverOptics(), DetectorParams(), DvProtocolParams(), WL)
    # 30-digit reference 1.01734941481e-10; shipped constant is rounded to 3 digits
    assert omega == pytest.approx(1.01734941481212e-10, rel=1e-9)
    assert round(omega, 12) == CALIBRATED_FOV_SR


def test_inversion_roundtrip():
    omega = calibrate_fov_solid_angle(43.0, SkyRadiance("day_clear"), ReceiverOptics(), DetectorParams(), DvProtocolParams(), WL)
    rx = ReceiverOptics(fov_solid_angle_override=omega)
    got = max_tolerable_loss_db(SkyRadiance("day_clear"), rx, DetectorParams(), DvProtocolParams(), WL)
    assert got == pytest.approx(43.0, abs=1e-9)


@pytest.mark.parametrize(
    "preset, published",
    [("day_hazy", 34.0), ("day_cloud", 24.0), ("moonless", 52.0), ("new_moon", 52.0), ("full_moon", 52.0)],
)
def test_calibrated_constant_predicts_other_presets(preset, published):
    got = max_tolerable_loss_db(SkyRadiance(preset), ReceiverOptics(), DetectorParams(), DvProtocolParams(), WL)
    assert abs(got - published) <= 1.0
