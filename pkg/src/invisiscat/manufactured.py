"""Manufactured fields with analytic derivatives.

Polynomial-in-distance bumps vanishing to second order on prescribed
boundary pieces, their exact gradients and Laplacians, and the harmonic
test fields they are paired against.  With phi := (Delta + k^2) w
computed in closed form, integration-by-parts identities hold exactly
in the continuum and any computed residual isolates pure quadrature
error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ConstField", "CgoField", "CapBump", "BoxBump", "LensBump"]


@dataclass
class ConstField:
    """u0 = const; trivially harmonic."""

    c: complex = 1.0

    def value(self, pts):
        return np.full(pts.shape[0], self.c, dtype=complex)

    def grad(self, pts):
        return np.zeros_like(pts, dtype=complex)


@dataclass
class CgoField:
    """u0 = exp(rho . x) with rho . rho = 0 (complex bilinear), so harmonic."""

    rho: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        if abs(np.sum(self.rho * self.rho)) > 1e-10 * max(
            1.0, float(np.sum(np.abs(self.rho) ** 2))
        ):
            raise ValueError("rho . rho must vanish for a harmonic exponential")

    def value(self, pts):
        return np.exp(pts @ self.rho)

    def grad(self, pts):
        return self.value(pts)[:, None] * self.rho[None, :]


class CapBump:
    """w = (x_n - omega(x'))^2 (h - x_n)^2 on the cap window.

    Vanishes to second order on the graph {x_n = omega} and on the lid
    {x_n = h}; with r = x_n - omega and s = h - x_n,

        Lap w = s^2 (2(1+|grad omega|^2) - 2 r Lap omega) + 2 r^2 - 8 r s.
    """

    def __init__(self, cap):
        self.cap = cap

    def _split(self, pts):
        return pts[:, :-1], pts[:, -1]

    def value(self, pts):
        xp, xn = self._split(pts)
        r = xn - self.cap.omega(xp)
        s = self.cap.h - xn
        return (r * s) ** 2

    def grad(self, pts):
        xp, xn = self._split(pts)
        r = xn - self.cap.omega(xp)
        s = self.cap.h - xn
        gw = self.cap.omega_grad(xp)
        g_t = -2.0 * (r * s * s)[:, None] * gw
        g_n = 2.0 * r * s * s - 2.0 * r * r * s
        return np.concatenate([g_t, g_n[:, None]], axis=-1)

    def laplacian(self, pts):
        xp, xn = self._split(pts)
        r = xn - self.cap.omega(xp)
        s = self.cap.h - xn
        grad2 = 1.0 + np.sum(self.cap.omega_grad(xp) ** 2, axis=1)
        lap_om = self.cap.omega_laplacian(xp)
        return s * s * (2.0 * grad2 - 2.0 * r * lap_om) + 2.0 * r * r - 8.0 * r * s

    def phi(self, pts, k: float):
        return self.laplacian(pts) + k * k * self.value(pts)


class LensBump(CapBump):
    """CapBump extended by zero above the lid.

    As a field on a cap-bottomed body it lies in H^2_0: the second-order
    contact at x_n = h makes the zero extension C^1 with an L^infinity
    Laplacian, and phi restricted to the closed cap window stays smooth
    from below.
    """

    def _mask(self, pts):
        # Closed window: boundary values are the one-sided limits from
        # inside the lens, matching the restriction to the closure.
        xp, xn = self._split(pts)
        return (xn >= self.cap.omega(xp)) & (xn <= self.cap.h)

    def value(self, pts):
        m = self._mask(pts)
        out = np.zeros(pts.shape[0])
        if np.any(m):
            out[m] = super().value(pts[m])
        return out

    def grad(self, pts):
        m = self._mask(pts)
        out = np.zeros(pts.shape, dtype=float)
        if np.any(m):
            out[m] = super().grad(pts[m]).real
        return out

    def laplacian(self, pts):
        m = self._mask(pts)
        out = np.zeros(pts.shape[0])
        if np.any(m):
            out[m] = super().laplacian(pts[m])
        return out


class BoxBump:
    """w = prod_d (x_d - a_d)^2 (b_d - x_d)^2, H^2_0 on the box."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)

    def _uv(self, pts):
        return pts - self.lo, self.hi - pts

    def value(self, pts):
        u, v = self._uv(pts)
        return np.prod((u * v) ** 2, axis=1)

    def _q(self, u, v):
        q = (u * v) ** 2
        qp = 2.0 * u * v * (v - u)
        qpp = 2.0 * ((v - u) ** 2 - 2.0 * u * v)
        return q, qp, qpp

    def grad(self, pts):
        u, v = self._uv(pts)
        q, qp, _ = self._q(u, v)
        total = np.prod(q, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(q > 0, total[:, None] / q, 0.0) * qp
        # Fall back to explicit products where a factor vanishes.
        bad = np.any(q <= 0, axis=1)
        if np.any(bad):
            for i in np.nonzero(bad)[0]:
                for d in range(pts.shape[1]):
                    rest = np.prod(np.delete(q[i], d))
                    out[i, d] = qp[i, d] * rest
        return out

    def laplacian(self, pts):
        u, v = self._uv(pts)
        q, _, qpp = self._q(u, v)
        out = np.zeros(pts.shape[0])
        for d in range(pts.shape[1]):
            rest = np.prod(np.delete(q, d, axis=1), axis=1)
            out += qpp[:, d] * rest
        return out

    def phi(self, pts, k: float):
        return self.laplacian(pts) + k * k * self.value(pts)
