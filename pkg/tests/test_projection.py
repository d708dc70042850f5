"""Closed-form projection onto the parabolic cone."""

import math

import numpy as np
import pytest

from edp_ocs.exceptions import CutError, InputError
from edp_ocs.projection import (
    ConePoint,
    cardano_real_root,
    cardano_real_roots,
    geometric_cut,
    is_outside,
    multiplier_cubic,
    project,
    projection_oracle,
)


@pytest.mark.parametrize(
    "coeffs, roots",
    [
        ((1.0, -6.0, 11.0, -6.0), (1.0, 2.0, 3.0)),
        ((2.0, 0.0, 0.0, -16.0), (2.0,)),
        ((1.0, 0.0, 0.0, 0.0), (0.0,)),
        ((1.0, -3.0, 3.0, -1.0), (1.0,)),
    ],
)
def test_cardano(coeffs, roots):
    found = cardano_real_roots(*coeffs)
    # A triple root may come back once or three times
    assert sorted(set(np.round(found, 6))) == sorted(set(roots))
    assert cardano_real_root(*coeffs) == pytest.approx(max(roots), abs=1e-6)


def test_cardano_rejects_quadratic():
    with pytest.raises(InputError):
        cardano_real_roots(0.0, 1.0, 2.0, 3.0)


def test_inside_points_are_unchanged():
    point = ConePoint(1.0, 2.0, 1.0)
    assert not is_outside(point)
    assert project(point) is point
    assert projection_oracle(point) is point


def test_apex():
    assert project(ConePoint(0.0, -1.0, 2.0)) == ConePoint(0.0, 0.0, 2.0)
    assert projection_oracle(ConePoint(0.0, -1.0, 2.0)) == ConePoint(0.0, 0.0, 2.0)


def test_simple_projection():
    # ẑ = 1, ŵ = 0, c₀ = 1: nearest point of w = z² to (1, 0)
    foot = project(ConePoint(1.0, 0.0, 1.0))
    assert foot.w == pytest.approx(foot.z**2)
    # Stationarity: 2z³ + (1 − 0)z − 1 = 0
    assert 2 * foot.z**3 + foot.z - 1 == pytest.approx(0.0, abs=1e-12)
    lam = (1.0 / foot.z - 1) / 2
    a, b, c, d = multiplier_cubic(ConePoint(1.0, 0.0, 1.0))
    assert ((a * lam + b) * lam + c) * lam + d == pytest.approx(0.0, abs=1e-10)


def test_nonpositive_radius():
    with pytest.raises(InputError):
        ConePoint(1.0, 1.0, 0.0)


@pytest.mark.parametrize("c0", [0.1, 1.0, 37.4])
def test_matches_oracle(c0):
    rng = np.random.default_rng(int(c0 * 10))
    points = rng.uniform(-10.0, 10.0, size=(10_000 // 3 + 1, 2))
    worst = 0.0
    for z_hat, w_hat in points:
        point = ConePoint(float(z_hat), float(w_hat), c0)
        closed, oracle = project(point), projection_oracle(point)
        worst = max(worst, abs(closed.z - oracle.z), abs(closed.w - oracle.w))
        if is_outside(point):
            assert closed.z * closed.z == pytest.approx(closed.w * c0, rel=1e-9, abs=1e-9)
    assert worst <= 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_cut_separates_and_is_valid(seed):
    rng = np.random.default_rng(seed)
    c0 = float(rng.uniform(0.5, 5.0))
    hat = ConePoint(float(rng.uniform(1, 5)), float(rng.uniform(-3, 0)), c0)
    assert is_outside(hat)
    bar = project(hat)
    cut = geometric_cut(hat, bar)
    assert cut.violation(hat.z, hat.w) == pytest.approx(hat.distance(bar) ** 2)
    assert cut.violation(bar.z, bar.w) == pytest.approx(0.0, abs=1e-9)

    # Every point of the parabola satisfies the cut
    z = np.linspace(-20, 20, 2001)
    assert np.all(cut.violation(z, z * z / c0) <= 1e-9)


def test_cut_from_coinciding_points():
    point = ConePoint(1.0, 1.0, 1.0)
    with pytest.raises(CutError):
        geometric_cut(point, point)


def test_cardano_single_real_root():
    # 4λ³ + 4λ² + λ − 4 has Q³ + R² > 0
    roots = cardano_real_roots(4.0, 4.0, 1.0, -4.0)
    assert len(roots) == 1
    lam = roots[0]
    assert ((4 * lam + 4) * lam + 1) * lam - 4 == pytest.approx(0.0, abs=1e-12)
    assert lam == pytest.approx(0.69743, abs=1e-4)


def test_cardano_double_root_boundary():
    # 4λ³ − 3λ − 1 = (λ − 1)(2λ + 1)² sits on Q³ + R² = 0
    roots = cardano_real_roots(4.0, 0.0, -3.0, -1.0)
    assert roots == pytest.approx((-0.5, -0.5, 1.0), abs=1e-7)
    assert cardano_real_root(4.0, 0.0, -3.0, -1.0) == pytest.approx(1.0, abs=1e-12)


def test_projection_below_apex_and_its_cut():
    hat = ConePoint(0.0, -1.0, 1.0)
    bar = project(hat)
    assert bar == ConePoint(0.0, 0.0, 1.0)
    cut = geometric_cut(hat, bar)
    assert cut == (0.0, -1.0, 0.0)
    assert cut.violation(hat.z, hat.w) == pytest.approx(1.0)
    assert cut.normalized() == (0.0, -1.0, 0.0)


def test_projection_of_point_on_axis_and_its_cut():
    hat = ConePoint(2.0, 0.0, 1.0)
    bar = project(hat)
    # The multiplier solves 4λ³ + 4λ² + λ − 4 = 0
    lam = cardano_real_root(*multiplier_cubic(hat))
    assert multiplier_cubic(hat) == (4.0, 4.0, 1.0, -4.0)
    assert bar.z == pytest.approx(2.0 / (1 + 2 * lam), rel=1e-12)
    assert bar.w == pytest.approx(lam, rel=1e-12)
    assert bar.w == pytest.approx(bar.z**2, rel=1e-10)
    assert bar.z == pytest.approx(0.83512, abs=1e-4)

    cut = geometric_cut(hat, bar)
    assert cut.a_z == pytest.approx(2.0 - bar.z)
    assert cut.a_w == pytest.approx(-bar.w)
    assert cut.b == pytest.approx(0.48642, abs=1e-4)
    assert cut.violation(hat.z, hat.w) == pytest.approx(1.84336, abs=1e-4)
    assert cut.violation(hat.z, hat.w) == pytest.approx(hat.distance(bar) ** 2)


@pytest.mark.parametrize("seed", range(5))
def test_normalized_cut_violation_is_distance(seed):
    rng = np.random.default_rng(seed)
    c0 = float(rng.uniform(0.5, 5.0))
    hat = ConePoint(float(rng.uniform(1, 5)), float(rng.uniform(-3, 0)), c0)
    bar = project(hat)
    cut = geometric_cut(hat, bar).normalized()
    assert math.hypot(cut.a_z, cut.a_w) == pytest.approx(1.0)
    assert cut.violation(hat.z, hat.w) == pytest.approx(hat.distance(bar))
    assert cut.violation(bar.z, bar.w) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("c0", [0.3, 1.0, 12.0])
def test_projection_is_idempotent_and_nonexpansive(c0):
    rng = np.random.default_rng(int(c0 * 10))
    samples = rng.uniform(-10.0, 10.0, size=(400, 2))
    points = [ConePoint(float(z), float(w), c0) for z, w in samples]
    feet = [project(point) for point in points]
    for foot in feet:
        assert project(foot) == foot
    for (p, p_bar), (q, q_bar) in zip(zip(points, feet), zip(points[1:], feet[1:])):
        assert p_bar.distance(q_bar) <= p.distance(q) + 1e-8
