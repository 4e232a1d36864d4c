import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hetcomp import geometry, propagation as prop
from hetcomp.geometry import UserEquipment

# 46.3 + 33.9 log10(2100) - 13.82 log10(25) - a(1.5) + 3, with a(1.5) from the
# large-city correction; evaluated separately at 30 significant digits.
PL_1KM = 142.604622218586798


def test_path_loss_regression_value():
    assert prop.cost231_path_loss(1000.0, 2100.0, 25.0, 1.5) == pytest.approx(PL_1KM, abs=1e-9)


@given(d=st.floats(1.0, 5000.0), hb=st.floats(5.0, 60.0))
def test_distance_doubling_slope(d, hb):
    step = prop.cost231_path_loss(2 * d, h_base=hb) - prop.cost231_path_loss(d, h_base=hb)
    assert step == pytest.approx((44.9 - 6.55 * math.log10(hb)) * math.log10(2.0), abs=1e-9)


def test_distance_clamp():
    assert prop.cost231_path_loss(0.5) == prop.cost231_path_loss(1.0)
    assert prop.cost231_path_loss(0.0) == prop.cost231_path_loss(1.0)


@pytest.mark.parametrize("kw", [{"freq": 0.0}, {"h_base": -1.0}, {"h_ue": 0.0}])
def test_path_loss_rejects_non_positive(kw):
    with pytest.raises(ValueError):
        prop.cost231_path_loss(100.0, **kw)


def test_antenna_boresight_and_beamwidth():
    spec = prop.MACRO_ANTENNA
    assert prop.antenna_gain(spec, 0.0, 4.0, tilt=4.0) == 18.0
    assert prop.antenna_gain(spec, 65.0, 4.0, tilt=4.0) == pytest.approx(18.0 - 12.0)
    assert prop.antenna_gain(spec, 180.0, 4.0, tilt=4.0) == pytest.approx(18.0 - 30.0)


@given(az=st.floats(-180, 180), el=st.floats(-90, 90))
def test_omni_is_direction_independent(az, el):
    assert prop.antenna_gain(prop.PICO_ANTENNA, az, el) == prop.PICO_ANTENNA.max_gain


@given(az=st.floats(-180, 180), el=st.floats(-90, 90))
def test_sector_gain_bounded(az, el):
    g = prop.antenna_gain(prop.MACRO_ANTENNA, az, el, tilt=4.0)
    assert 18.0 - 30.0 <= g <= 18.0


def test_noise_floor():
    assert prop.noise_floor_dbm(7.0) == pytest.approx(-97.0, abs=1e-12)


def _cell(power=46.0):
    return geometry.Cell(0, "macro_sector", (0.0, 0.0), 25.0, power, prop.MACRO_ANTENNA, 0.0, 4.0, 0)


def test_power_linearity():
    ue = UserEquipment(0, (120.0, 30.0), 0)
    a = prop.budget(_cell(46.0), ue, 0.0)
    b = prop.budget(_cell(49.0), ue, 0.0)
    assert b.rsrp - a.rsrp == pytest.approx(3.0)
    assert b.wideband_snr - a.wideband_snr == pytest.approx(3.0)


def test_rsrp_recomputable_from_fields():
    ue = UserEquipment(0, (80.0, -50.0), 0)
    l = prop.budget(_cell(), ue, 0.0)
    expected = 46.0 - 10 * math.log10(600) + l.antenna_gain - 1.0 - l.path_loss
    assert l.rsrp == pytest.approx(expected, abs=1e-12)
    assert l.wideband_snr == pytest.approx(l.rsrp + 10 * math.log10(600) + 97.0, abs=1e-12)


def test_rsrp_decreases_with_distance():
    # omni, so the antenna term stays fixed while only the path loss changes
    pico = geometry.Cell(0, "pico", (0.0, 0.0), 10.0, 37.0, prop.PICO_ANTENNA)
    near = prop.budget(pico, UserEquipment(0, (100.0, 0.0), 0), 0.0)
    far = prop.budget(pico, UserEquipment(0, (300.0, 0.0), 0), 0.0)
    assert far.path_loss > near.path_loss and far.rsrp < near.rsrp


def test_wrap_degrees():
    assert prop.wrap_degrees(190.0) == -170.0
    assert prop.wrap_degrees(-180.0) == 180.0
    assert prop.wrap_degrees(540.0) == 180.0


def test_no_interference_model_is_plain_snr():
    rsrp = np.array([[-70.0, -80.0, -90.0], [-85.0, -75.0, -95.0]])
    out = prop.stream_sinr(rsrp, np.array([0, 1]), np.array([1, 0]), 7.0, "none")
    snr = rsrp + 10 * math.log10(600) + 97.0
    np.testing.assert_allclose(out, [[snr[0, 0], snr[0, 1]], [snr[1, 1], snr[1, 0]]])


def test_interference_models_order():
    rsrp = np.array([[-70.0, -80.0, -90.0]])
    args = (rsrp, np.array([0]), np.array([1]), 7.0)
    none, resid, full = (prop.stream_sinr(*args, m) for m in prop.INTERFERENCE_MODELS)
    assert np.all(none > resid) and np.all(resid > full)
    with pytest.raises(ValueError):
        prop.stream_sinr(*args, "bogus")


def test_shadowing_is_shared_between_calls():
    sc = geometry.build_scenario("A", 2)
    ues = geometry.drop_ues(sc, 10, 2)
    assert geometry.link_table(sc, ues, 2) == geometry.link_table(sc, ues, 2)
