"""Oracle cubature: known volumes, closed-form checks, linearity."""

import math

import numpy as np
import pytest

from invisiscat.quadrature import (
    AnnularParaboloid,
    Ball,
    Box,
    BudgetExceeded,
    GraphCap,
    ParaboloidCap,
    integrate,
    integrate_full,
)

ONE = lambda pts: np.ones(pts.shape[0])


class TestElementaryVolumes:
    def test_unit_disk_area(self):
        val = integrate(ONE, Ball([0.0, 0.0], 1.0, dim=2), tol=1e-10)
        assert abs(val - math.pi) < 1e-9

    def test_unit_ball_volume(self):
        val = integrate(ONE, Ball([0.0, 0.0, 0.0], 1.0, dim=3), tol=1e-9)
        assert abs(val - 4.0 * math.pi / 3.0) < 1e-8

    def test_box_volume(self):
        val = integrate(ONE, Box([0, 0], [2, 3]), tol=1e-12)
        assert abs(val - 6.0) < 1e-11

    def test_annular_paraboloid_exact(self):
        # int_0^1 (sqrt(x2) - sqrt(x2/2)) * 2 dx2 = (4/3)(1 - 1/sqrt 2)
        val = integrate(ONE, AnnularParaboloid(1.0, 2.0, 1.0, dim=2), tol=1e-10)
        want = (4.0 / 3.0) * (1.0 - 1.0 / math.sqrt(2.0))
        assert abs(val - want) < 1e-9

    def test_annular_empty_when_equal(self):
        val = integrate(ONE, AnnularParaboloid(2.0, 2.0, 1.0, dim=2), tol=1e-10)
        assert val == 0.0

    def test_paraboloid_cap_volume_2d(self):
        # int_0^h 2 sqrt(t/K) dt = (4/3) h^(3/2) / sqrt(K)
        K, h = 3.0, 0.7
        val = integrate(ONE, ParaboloidCap(K, h, dim=2), tol=1e-10)
        want = 4.0 / 3.0 * h**1.5 / math.sqrt(K)
        assert abs(val - want) < 1e-9 * want

    def test_paraboloid_cap_volume_3d(self):
        # int_0^h pi t/K dt = pi h^2 / (2K)
        K, h = 2.0, 0.5
        val = integrate(ONE, ParaboloidCap(K, h, dim=3), tol=1e-9)
        want = math.pi * h * h / (2.0 * K)
        assert abs(val - want) < 1e-8 * want


class TestCgoClosedFormSeed:
    def test_unbounded_cap_cgo_2d(self):
        # rho = i e_1 - e_2, K = 1: integral is sqrt(pi) e^{-1/4}.
        rho = np.array([1j, -1.0])

        def f(pts):
            return np.exp(pts @ rho)

        region = ParaboloidCap(1.0, dim=2, decay_rate=1.0)
        val = integrate(f, region, tol=1e-10)
        want = math.sqrt(math.pi) * math.exp(-0.25)
        assert abs(val - want) < 1e-8 * want
        assert abs(want - 1.380388) < 1e-6

    def test_gaussian_on_plane_sanity(self):
        # Full-plane Gaussian via a big box, checks the 2d tensor rule.
        def f(pts):
            return np.exp(-np.sum(pts**2, axis=1))

        val = integrate(f, Box([-8, -8], [8, 8]), tol=1e-10)
        assert abs(val - math.pi) < 1e-9


class TestGraphCap:
    def test_pure_paraboloid_graph_matches_cap(self):
        K, h = 5.0, 1.0 / 5.0
        b = math.sqrt(2.0) / 5.0

        def omega(xp):
            return K * np.sum(xp**2, axis=1)

        g = GraphCap(omega, b, h, dim=2, K_bracket=(K, K))
        val_g = integrate(ONE, g, tol=1e-9)
        val_c = integrate(ONE, ParaboloidCap(K, h, dim=2), tol=1e-9)
        assert abs(val_g - val_c) < 1e-8 * abs(val_c)

    def test_pure_paraboloid_graph_matches_cap_3d(self):
        K, h = 4.0, 0.25
        b = math.sqrt(2.0) / 4.0

        def omega(xp):
            return K * np.sum(xp**2, axis=1)

        g = GraphCap(omega, b, h, dim=3, K_bracket=(K, K))
        val_g = integrate(ONE, g, tol=1e-8)
        val_c = integrate(ONE, ParaboloidCap(K, h, dim=3), tol=1e-8)
        assert abs(val_g - val_c) < 1e-7 * abs(val_c)


class TestProperties:
    def test_linearity(self):
        region = Ball([0.3, -0.2], 1.3, dim=2)
        f = lambda p: np.exp(1j * p[:, 0]) * p[:, 1]
        g = lambda p: np.cos(p[:, 0] - p[:, 1])
        a, b = 2.0 - 1.0j, 0.5 + 0.25j
        tol = 1e-9
        lhs = integrate(lambda p: a * f(p) + b * g(p), region, tol=tol)
        rhs = a * integrate(f, region, tol=tol) + b * integrate(g, region, tol=tol)
        assert abs(lhs - rhs) <= 3 * tol * (1 + abs(lhs))

    def test_region_additivity_cap_split(self):
        # Integral over the unbounded cap equals bounded cap + tail piece.
        tau, K, h = 2.0, 1.5, 0.8

        def f(pts):
            return np.exp(-tau * pts[:, -1])

        tol = 1e-9
        whole = integrate(f, ParaboloidCap(K, dim=2, decay_rate=tau), tol=tol)
        inner = integrate(f, ParaboloidCap(K, h, dim=2), tol=tol)
        tail = integrate(
            f, ParaboloidCap(K, floor=h, dim=2, decay_rate=tau), tol=tol
        )
        assert abs(whole - (inner + tail)) <= 3 * tol * (1 + abs(whole))

    def test_budget_exceeded(self):
        # Everywhere-oscillatory integrand under a tiny budget.
        def f(pts):
            return np.cos(4e4 * pts[:, 0]) * np.cos(3e4 * pts[:, 1])

        with pytest.raises(BudgetExceeded):
            integrate(f, Box([0, 0], [1, 1]), tol=1e-12, budget=20000)

    def test_determinism(self):
        f = lambda p: np.exp(1j * 7.0 * p[:, 0]) * np.exp(-p[:, 1])
        region = ParaboloidCap(2.0, 1.0, dim=2)
        v1, e1, n1 = integrate_full(f, region, tol=1e-10)
        v2, e2, n2 = integrate_full(f, region, tol=1e-10)
        assert v1 == v2 and e1 == e2 and n1 == n2
