import math

import pytest

from multiroute.geo import EARTH_RADIUS_M, GeoPoint, haversine


def test_identical_points_zero():
    p = GeoPoint(0.0, 0.0)
    assert haversine(p, p) == 0.0


def test_quarter_great_circle():
    d = haversine(GeoPoint(0.0, 0.0), GeoPoint(0.0, 90.0))
    assert d == pytest.approx(math.pi / 2 * EARTH_RADIUS_M, abs=1e-6)


def test_paris_to_london_pinned():
    # Value computed beforehand with an independent high-precision evaluation.
    d = haversine(GeoPoint(48.8566, 2.3522), GeoPoint(51.5074, -0.1278))
    assert d == pytest.approx(343556.06, abs=1.0)


def test_symmetry_and_positivity():
    a = GeoPoint(12.34, -56.78)
    b = GeoPoint(-43.21, 87.65)
    assert haversine(a, b) == haversine(b, a)
    assert haversine(a, b) > 0.0


def test_antipodal_does_not_exceed_half_circumference():
    d = haversine(GeoPoint(0.0, 0.0), GeoPoint(0.0, 180.0))
    assert d == pytest.approx(math.pi * EARTH_RADIUS_M, rel=1e-12)


@pytest.mark.parametrize(
    "lat,lon",
    [(91.0, 0.0), (-90.5, 0.0), (0.0, 180.5), (0.0, -181.0), (float("nan"), 0.0), (0.0, float("inf"))],
)
def test_invalid_coordinates_rejected(lat, lon):
    with pytest.raises(ValueError):
        GeoPoint(lat, lon)
