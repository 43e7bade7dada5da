"""Brute-force adaptive integration over scattering-relevant regions.

This is the independent oracle used to validate every closed-form
integral and far-field computation in the package, so it deliberately
shares no code with the formulas it checks.

Regions are described by one or more smooth charts mapping a coordinate
box onto the physical set with a Jacobian; integration is an adaptive
tensor Gauss-Kronrod (G7, K15) cubature on the charts.  Subdivision is
driven by a priority queue on the per-box error estimate |K15 - G7|,
splitting along the axis with the largest internal variation.  All
orderings are deterministic, so repeated runs give bit-identical
results.

The paraboloid regions are bodies bounded below by x_n = K |x'|^2:

* ``ParaboloidCap(K, h)``      {x : K|x'|^2 < x_n < h}, optionally with
  a floor {x_n > floor} and optionally unbounded (h = inf), in which
  case the integrand must decay like exp(-decay_rate x_n) and the
  truncation height is chosen so the analytic tail bound falls three
  orders below the requested tolerance.
* ``AnnularParaboloid(K-, K+)`` the shell between two nested paraboloid
  caps of the same height.
* ``GraphCap(omega, b, h)``     {|x'| < b, omega(x') < x_n < h} for a
  boundary graph omega pinched between K-|x'|^2 and K+|x'|^2.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .specfun import gamma_fn, sphere_measure

__all__ = [
    "Ball",
    "Box",
    "ParaboloidCap",
    "AnnularParaboloid",
    "GraphCap",
    "BudgetExceeded",
    "integrate",
    "integrate_full",
]


class BudgetExceeded(RuntimeError):
    """Tolerance unreachable within the evaluation budget."""

    def __init__(self, message, value=None, error=None, evals=None):
        super().__init__(message)
        self.value = value
        self.error = error
        self.evals = evals


# ---------------------------------------------------------------------------
# Gauss-Kronrod (G7, K15) rule, QUADPACK abscissae
# ---------------------------------------------------------------------------

_XGK = np.array(
    [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
        0.0,
    ]
)
_WGK = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
    ]
)
_WG = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
    ]
)

# Symmetric 15-point arrays on [-1, 1]; Gauss subset sits at odd indices.
_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_W15 = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_W7 = np.zeros(15)
_W7[1:14:2] = np.concatenate([_WG[:3], [_WG[3]], _WG[2::-1]])


def _tensor_rule(dim: int):
    grids = np.meshgrid(*([_NODES] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    w15 = np.ones(pts.shape[0])
    w7 = np.ones(pts.shape[0])
    for d in range(dim):
        idx = np.meshgrid(*([np.arange(15)] * dim), indexing="ij")[d].ravel()
        w15 *= _W15[idx]
        w7 *= _W7[idx]
    return pts, w15, w7


_RULES = {d: _tensor_rule(d) for d in (1, 2, 3)}


# ---------------------------------------------------------------------------
# Charts and regions
# ---------------------------------------------------------------------------


@dataclass
class Chart:
    """Coordinate box [lo, hi] with a map onto physical points.

    ``mapping(u)`` takes an (m, d) array of box coordinates and returns
    (physical points (m, n), jacobian (m,)).
    """

    lo: np.ndarray
    hi: np.ndarray
    mapping: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


class Region:
    dim: int

    def charts(self) -> Sequence[Chart]:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass
class Box(Region):
    lo: Sequence[float]
    hi: Sequence[float]

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        self.dim = len(self.lo)

    def charts(self):
        def mapping(u):
            return u.copy(), np.ones(u.shape[0])

        return [Chart(self.lo, self.hi, mapping)]


@dataclass
class Ball(Region):
    center: Sequence[float]
    radius: float
    dim: int = 2

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    def charts(self):
        c = self.center
        if self.dim == 2:

            def mapping(u):
                r, th = u[:, 0], u[:, 1]
                pts = np.stack(
                    [c[0] + r * np.cos(th), c[1] + r * np.sin(th)], axis=-1
                )
                return pts, r

            return [
                Chart(np.array([0.0, -math.pi]), np.array([self.radius, math.pi]), mapping)
            ]
        if self.dim == 3:

            def mapping(u):
                r, th, ph = u[:, 0], u[:, 1], u[:, 2]
                sp = np.sin(ph)
                pts = np.stack(
                    [
                        c[0] + r * sp * np.cos(th),
                        c[1] + r * sp * np.sin(th),
                        c[2] + r * np.cos(ph),
                    ],
                    axis=-1,
                )
                return pts, r * r * sp

            return [
                Chart(
                    np.array([0.0, -math.pi, 0.0]),
                    np.array([self.radius, math.pi, math.pi]),
                    mapping,
                )
            ]
        raise ValueError("ball regions support dim 2 or 3")


def _paraboloid_tail_bound(tau: float, K: float, h: float, n: int) -> float:
    # Tail of exp(-tau x_n) over the cap above height h:
    # C_n (1 + (tau h)^((n-1)/2)) / (tau^((n+1)/2) K^((n-1)/2)) exp(-tau h).
    cn = (
        max(1.0, 2.0 ** ((n + 1) / 2.0 - 2.0))
        * max(gamma_fn((n + 1) / 2.0), 1.0)
        * sphere_measure(n - 2)
        / (n - 1)
    )
    return (
        cn
        * (1.0 + (tau * h) ** ((n - 1) / 2.0))
        / (tau ** ((n + 1) / 2.0) * K ** ((n - 1) / 2.0))
        * math.exp(-tau * h)
    )


@dataclass
class ParaboloidCap(Region):
    """{x in R^n : max(K |x'|^2, floor) < x_n < h}; h may be math.inf."""

    K: float
    h: float = math.inf
    floor: float = 0.0
    dim: int = 2
    decay_rate: float | None = None

    def __post_init__(self):
        if self.K <= 0:
            raise ValueError("paraboloid coefficient K must be positive")
        if self.floor < 0 or self.h <= self.floor:
            raise ValueError("need 0 <= floor < h")
        if math.isinf(self.h) and self.decay_rate is None:
            raise ValueError(
                "unbounded paraboloid cap requires decay_rate of the integrand"
            )

    def truncation_height(self, tol: float) -> float:
        if not math.isinf(self.h):
            return self.h
        tau = float(self.decay_rate)
        target = tol * 1e-3
        x_max = max(self.floor, 1.0 / tau, 1.0)
        while _paraboloid_tail_bound(tau, self.K, x_max, self.dim) > target:
            x_max *= 1.25
            if x_max > 1e12:
                break
        return x_max

    def charts(self, tol: float = 1e-10):
        top = self.truncation_height(tol)
        K = self.K
        if self.dim == 2:

            def mapping(u):
                t, s = u[:, 0], u[:, 1]
                w = np.sqrt(t / K)
                pts = np.stack([s * w, t], axis=-1)
                return pts, w

            return [
                Chart(np.array([self.floor, -1.0]), np.array([top, 1.0]), mapping)
            ]
        if self.dim == 3:

            def mapping(u):
                t, s, th = u[:, 0], u[:, 1], u[:, 2]
                w = np.sqrt(t / K)
                r = s * w
                pts = np.stack([r * np.cos(th), r * np.sin(th), t], axis=-1)
                return pts, w * r

            return [
                Chart(
                    np.array([self.floor, 0.0, -math.pi]),
                    np.array([top, 1.0, math.pi]),
                    mapping,
                )
            ]
        raise ValueError("paraboloid regions support dim 2 or 3")


@dataclass
class AnnularParaboloid(Region):
    """{x : K_- |x'|^2 < x_n < h} minus {x : K_+ |x'|^2 < x_n < h}.

    Horizontal slice at height t is the annulus
    sqrt(t/K_+) < |x'| < sqrt(t/K_-).
    """

    K_minus: float
    K_plus: float
    h: float
    dim: int = 2

    def __post_init__(self):
        if not (0 < self.K_minus <= self.K_plus):
            raise ValueError("need 0 < K_- <= K_+")
        if self.h <= 0:
            raise ValueError("height must be positive")

    def charts(self):
        km, kp, h = self.K_minus, self.K_plus, self.h
        if km == kp:
            return []
        if self.dim == 2:

            def make(side):
                def mapping(u):
                    t, s = u[:, 0], u[:, 1]
                    a = np.sqrt(t / kp)
                    bb = np.sqrt(t / km)
                    r = a + s * (bb - a)
                    pts = np.stack([side * r, t], axis=-1)
                    return pts, bb - a

                return mapping

            return [
                Chart(np.array([0.0, 0.0]), np.array([h, 1.0]), make(+1.0)),
                Chart(np.array([0.0, 0.0]), np.array([h, 1.0]), make(-1.0)),
            ]
        if self.dim == 3:

            def mapping(u):
                t, s, th = u[:, 0], u[:, 1], u[:, 2]
                a = np.sqrt(t / kp)
                bb = np.sqrt(t / km)
                r = a + s * (bb - a)
                pts = np.stack([r * np.cos(th), r * np.sin(th), t], axis=-1)
                return pts, (bb - a) * r

            return [
                Chart(
                    np.array([0.0, 0.0, -math.pi]),
                    np.array([h, 1.0, math.pi]),
                    mapping,
                )
            ]
        raise ValueError("annular paraboloid supports dim 2 or 3")


@dataclass
class GraphCap(Region):
    """{x : |x'| < b, omega(x') < x_n < h} for a graph omega >= 0.

    ``omega`` maps an (m, dim-1) array of tangential coordinates to
    heights.  ``K_bracket`` gives (K_lo, K_hi) with
    K_lo |x'|^2 <= omega <= K_hi |x'|^2, used to bracket the rim
    {omega = h} for the radial root-find.
    """

    omega: Callable[[np.ndarray], np.ndarray]
    b: float
    h: float
    dim: int = 2
    K_bracket: tuple[float, float] | None = None

    def _rim_radius(self, direction: np.ndarray) -> np.ndarray:
        """Radii r(theta) with omega(r * direction) = h, vectorized bisection."""
        if self.K_bracket is not None:
            k_lo, k_hi = self.K_bracket
            lo = np.full(direction.shape[0], 0.95 * math.sqrt(self.h / k_hi))
            hi = np.full(direction.shape[0], min(1.05 * math.sqrt(self.h / k_lo), self.b))
        else:
            lo = np.zeros(direction.shape[0])
            hi = np.full(direction.shape[0], self.b)
        f_hi = self.omega(direction * hi[:, None]) - self.h
        # Columns whose graph never reaches h are clamped at b.
        open_col = f_hi < 0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            f_mid = self.omega(direction * mid[:, None]) - self.h
            take_hi = f_mid >= 0
            hi = np.where(take_hi, mid, hi)
            lo = np.where(take_hi, lo, mid)
        r = 0.5 * (lo + hi)
        return np.where(open_col, self.b, r)

    def charts(self):
        om, h = self.omega, self.h
        if self.dim == 2:

            def make(side):
                def mapping(u):
                    s, t = u[:, 0], u[:, 1]
                    direction = np.full((u.shape[0], 1), side)
                    rstar = self._rim_radius(direction)
                    x1 = side * s * rstar
                    w = om(x1[:, None])
                    xn = w + t * (h - w)
                    pts = np.stack([x1, xn], axis=-1)
                    return pts, rstar * np.maximum(h - w, 0.0)

                return mapping

            return [
                Chart(np.array([0.0, 0.0]), np.array([1.0, 1.0]), make(+1.0)),
                Chart(np.array([0.0, 0.0]), np.array([1.0, 1.0]), make(-1.0)),
            ]
        if self.dim == 3:

            def mapping(u):
                s, th, t = u[:, 0], u[:, 1], u[:, 2]
                direction = np.stack([np.cos(th), np.sin(th)], axis=-1)
                rstar = self._rim_radius(direction)
                r = s * rstar
                xp = direction * r[:, None]
                w = om(xp)
                xn = w + t * (h - w)
                pts = np.concatenate([xp, xn[:, None]], axis=-1)
                return pts, rstar * r * np.maximum(h - w, 0.0)

            return [
                Chart(
                    np.array([0.0, -math.pi, 0.0]),
                    np.array([1.0, math.pi, 1.0]),
                    mapping,
                )
            ]
        raise ValueError("graph caps support dim 2 or 3")


# ---------------------------------------------------------------------------
# Adaptive cubature
# ---------------------------------------------------------------------------


@dataclass(order=True)
class _BoxEntry:
    neg_err: float
    order: int
    lo: np.ndarray = field(compare=False)
    hi: np.ndarray = field(compare=False)
    chart: Chart = field(compare=False)
    value: complex = field(compare=False)
    err: float = field(compare=False)
    split_dim: int = field(compare=False)


def _eval_box(f, chart: Chart, lo: np.ndarray, hi: np.ndarray, dim: int):
    pts_ref, w15, w7 = _RULES[dim]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    u = mid + pts_ref * half
    phys, jac = chart.mapping(u)
    vals = np.asarray(f(phys), dtype=complex) * jac
    scale = float(np.prod(half))
    i15 = complex(np.sum(vals * w15)) * scale
    i7 = complex(np.sum(vals * w7)) * scale
    err = abs(i15 - i7)
    # Pick the split axis by internal variation of the sampled values.
    shape = (15,) * dim
    grid = vals.reshape(shape)
    best, best_var = 0, -1.0
    for d in range(dim):
        var = float(np.sum(np.abs(np.diff(grid, n=2, axis=d))))
        if var > best_var:
            best, best_var = d, var
    return i15, err, best


def integrate_full(
    f: Callable[[np.ndarray], np.ndarray],
    region: Region,
    tol: float = 1e-8,
    budget: int = 10**7,
):
    """Adaptive integration of a complex field over a region.

    Returns (value, error_estimate, evaluations).  Raises
    ``BudgetExceeded`` when the tolerance target err <= tol*(1+|I|)
    cannot be met within the evaluation budget.
    """
    if isinstance(region, ParaboloidCap):
        charts = region.charts(tol)
    else:
        charts = region.charts()
    dim = region.dim
    heap: list[_BoxEntry] = []
    counter = 0
    evals = 0
    for chart in charts:
        val, err, sd = _eval_box(f, chart, chart.lo, chart.hi, dim)
        evals += 15**dim
        heapq.heappush(
            heap, _BoxEntry(-err, counter, chart.lo, chart.hi, chart, val, err, sd)
        )
        counter += 1
    if not heap:
        return 0.0 + 0.0j, 0.0, 0

    value = sum(e.value for e in heap)
    err_total = sum(e.err for e in heap)
    refresh = 0
    while True:
        if refresh >= 512:
            # Resum to shed rounding drift of the incremental bookkeeping.
            value = sum(e.value for e in heap)
            err_total = sum(e.err for e in heap)
            refresh = 0
        if err_total <= tol * (1.0 + abs(value)):
            value = sum(e.value for e in heap)
            err_total = sum(e.err for e in heap)
            if err_total <= tol * (1.0 + abs(value)):
                return value, err_total, evals
        if evals + 2 * 15**dim > budget:
            raise BudgetExceeded(
                f"cubature budget {budget} exhausted at error {err_total:.3e}",
                value=value,
                error=err_total,
                evals=evals,
            )
        worst = heapq.heappop(heap)
        value -= worst.value
        err_total -= worst.err
        d = worst.split_dim
        mid = 0.5 * (worst.lo[d] + worst.hi[d])
        for piece in range(2):
            lo = worst.lo.copy()
            hi = worst.hi.copy()
            if piece == 0:
                hi[d] = mid
            else:
                lo[d] = mid
            val, err, sd = _eval_box(f, worst.chart, lo, hi, dim)
            evals += 15**dim
            value += val
            err_total += err
            heapq.heappush(
                heap, _BoxEntry(-err, counter, lo, hi, worst.chart, val, err, sd)
            )
            counter += 1
        refresh += 1


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    region: Region,
    tol: float = 1e-8,
    budget: int = 10**7,
) -> complex:
    """Adaptive integral of ``f`` over ``region`` to relative tolerance."""
    value, _, _ = integrate_full(f, region, tol=tol, budget=budget)
    return value
