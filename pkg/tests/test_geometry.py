import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from leo_outage.errors import BeamMissesEarth, DomainError
from leo_outage.geometry import (
    EarthGeometry,
    cap_fraction,
    inverse_cap_fraction,
    max_polar_angle,
    max_slant_range,
    min_elevation_from_range,
    surface_areas,
    threshold_distance,
    threshold_polar_angle,
)

GEO = EarthGeometry(a=600e3)
R_E = GEO.r_e

altitudes = st.floats(min_value=200e3, max_value=2000e3)
elevations = st.floats(min_value=0.0, max_value=math.pi / 2)
beams = st.floats(min_value=0.0, max_value=math.radians(40.0))


def test_zenith_and_horizon():
    assert max_slant_range(math.pi / 2, GEO) == pytest.approx(GEO.a, rel=1e-12)
    assert max_slant_range(0.0, GEO) == pytest.approx(math.sqrt(GEO.a**2 + 2 * R_E * GEO.a), rel=1e-15)


def test_slant_range_solves_law_of_cosines():
    theta = math.radians(10.0)
    s = math.sin(theta)

    def residual(d):
        return d * d + R_E * R_E + 2 * d * R_E * s - GEO.shell_radius**2

    root = brentq(residual, GEO.a, GEO.horizon_range, xtol=1e-9)
    assert max_slant_range(theta, GEO) == pytest.approx(root, rel=1e-12)


@given(altitudes, elevations)
def test_slant_range_reproduces_shell_radius(a, theta):
    geo = EarthGeometry(a=a)
    d = max_slant_range(theta, geo)
    lhs = d * d + geo.r_e**2 + 2 * d * geo.r_e * math.sin(theta)
    assert lhs == pytest.approx(geo.shell_radius**2, rel=1e-12)


def test_elevation_inverse_endpoints():
    assert min_elevation_from_range(GEO.a, GEO) == pytest.approx(math.pi / 2, abs=1e-7)
    assert min_elevation_from_range(GEO.horizon_range, GEO) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("theta_deg", [5.0, 25.0, 60.0])
def test_elevation_round_trip(theta_deg):
    theta = math.radians(theta_deg)
    assert min_elevation_from_range(max_slant_range(theta, GEO), GEO) == pytest.approx(theta, abs=1e-10)


def test_domain_errors():
    with pytest.raises(DomainError):
        max_slant_range(-0.1, GEO)
    with pytest.raises(DomainError):
        max_slant_range(2.0, GEO)
    with pytest.raises(DomainError):
        min_elevation_from_range(GEO.a * 0.5, GEO)
    with pytest.raises(DomainError):
        cap_fraction(GEO.far_range * 1.01, GEO)
    with pytest.raises(DomainError):
        EarthGeometry(a=0.0)


def test_polar_angle_endpoints():
    assert max_polar_angle(GEO.a, GEO) == pytest.approx(0.0, abs=1e-7)
    assert max_polar_angle(GEO.horizon_range, GEO) == pytest.approx(math.acos(R_E / GEO.shell_radius), rel=1e-12)


def test_polar_angle_via_elevation_triangle():
    # triangle centre-terminal-satellite: angle at the terminal is 90 + theta,
    # so the angle at the satellite is asin(r_e cos(theta) / r_s) and psi closes the sum
    theta = math.radians(10.0)
    at_sat = math.asin(R_E * math.cos(theta) / GEO.shell_radius)
    direct = math.pi / 2 - theta - at_sat
    assert max_polar_angle(max_slant_range(theta, GEO), GEO) == pytest.approx(direct, abs=1e-10)


def test_threshold_polar_angle_values():
    assert threshold_polar_angle(0.0, GEO) == 0.0
    assert threshold_polar_angle(math.radians(20), GEO) > threshold_polar_angle(math.radians(10), GEO)
    omega = math.radians(20.0)
    ratio = GEO.shell_radius / R_E
    root = brentq(lambda psi: math.sin(psi + omega) / math.sin(omega) - ratio, 0.0, 0.5, xtol=1e-14)
    assert threshold_polar_angle(omega, GEO) == pytest.approx(root, abs=1e-12)


def test_beam_missing_earth():
    wide = math.asin(R_E / GEO.shell_radius) + 0.01
    with pytest.raises(BeamMissesEarth):
        threshold_polar_angle(wide, GEO)
    d = surface_areas(math.radians(10), wide, GEO)
    assert d.psi_th == d.psi_max
    assert d.area_sl == 0.0


@given(altitudes, st.floats(min_value=0.0, max_value=math.radians(35)), st.floats(min_value=1e-4, max_value=math.radians(10)))
def test_threshold_polar_angle_increasing(a, omega, step):
    geo = EarthGeometry(a=a)
    try:
        hi = threshold_polar_angle(omega + step, geo)
    except BeamMissesEarth:
        return
    assert hi > threshold_polar_angle(omega, geo)


def test_threshold_distance():
    assert threshold_distance(0.0, GEO) == pytest.approx(GEO.a, rel=1e-15)
    theta = math.radians(10)
    d_max = max_slant_range(theta, GEO)
    assert threshold_distance(max_polar_angle(d_max, GEO), GEO) == pytest.approx(d_max, rel=1e-9)
    psi = threshold_polar_angle(math.radians(20), GEO)
    assert cap_fraction(threshold_distance(psi, GEO), GEO) == pytest.approx((1 - math.cos(psi)) / 2, rel=1e-10)


def test_cap_fraction_ends_and_area_ratio():
    assert cap_fraction(GEO.a, GEO) == 0.0
    assert cap_fraction(GEO.far_range, GEO) == pytest.approx(1.0, rel=1e-15)
    d = surface_areas(math.radians(10), math.radians(20), GEO)
    assert cap_fraction(d.d_max, GEO) == pytest.approx(d.area_vis / d.area_total, rel=1e-12)


def test_cap_fraction_bijection():
    for i in range(11):
        y = i / 10
        assert cap_fraction(inverse_cap_fraction(y, GEO), GEO) == pytest.approx(y, abs=1e-12)


def test_slant_range_strictly_decreasing():
    values = [max_slant_range(math.radians(t), GEO) for t in range(0, 91)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_area_values_at_600km():
    d = surface_areas(math.radians(10), math.radians(20), GEO)
    assert d.area_sl / 1e6 == pytest.approx(1.14e7, rel=0.01)
    assert d.area_ml / 1e6 == pytest.approx(1.82e5, rel=0.01)


def test_zero_beam_areas():
    d = surface_areas(math.radians(10), 0.0, GEO)
    assert d.area_ml == 0.0
    assert d.area_sl == d.area_vis


@given(altitudes, elevations, beams)
def test_partition_and_ordering(a, theta, omega):
    geo = EarthGeometry(a=a)
    d = surface_areas(theta, omega, geo)
    assert d.area_ml >= 0 and d.area_sl >= 0
    assert d.area_ml + d.area_sl == pytest.approx(d.area_vis, rel=1e-12, abs=1e-6)
    assert d.area_vis <= d.area_total
    assert geo.a * (1 - 1e-12) <= d.d_th <= d.d_max * (1 + 1e-12)
    assert d.d_max <= geo.horizon_range * (1 + 1e-12)
    assert 0.0 <= d.psi_th <= d.psi_max <= math.pi / 2
