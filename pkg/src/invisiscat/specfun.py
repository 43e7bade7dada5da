"""Self-contained special functions for Helmholtz scattering kernels.

Everything here is built from primary definitions so that the accuracy
chain stays auditable:

* ``bessel_j`` / ``bessel_y``: ascending power series in 80-bit extended
  precision for x < 15, Hankel (P, Q) asymptotic sums truncated at the
  smallest term for x >= 15.  Half-integer orders use the exact closed
  trigonometric forms at every x.
* ``hankel1``: J + iY.
* ``gamma_fn``: Lanczos approximation (g = 7, 9 terms).
* ``lower_incomplete_gamma``: ascending series for x < a + 1, modified
  Lentz continued fraction for the complement otherwise.
* ``sphere_measure``: closed form 2 pi^((d+1)/2) / Gamma((d+1)/2).

Supported orders: nonnegative integers and half-integers.  That covers
the kernel order (n-2)/2, the radiating-ball order n/2, and the
cylindrical/spherical mode ladders for n in {2, 3}.

Accuracy note: the asymptotic remainder after optimal truncation decays
like exp(-2x), which drops below the 1e-12 target only for x >= ~14.5.
The series/asymptotics switch therefore sits at x = 15, with the series
side accumulated in extended precision to survive the cancellation
(largest term ~ 1e6 at x = 15).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "bessel_j",
    "bessel_jp",
    "bessel_y",
    "bessel_yp",
    "hankel1",
    "hankel1p",
    "spherical_jn",
    "spherical_jnp",
    "gamma_fn",
    "lower_incomplete_gamma",
    "sphere_measure",
]

_EULER_GAMMA = 0.57721566490153286060651209008240243104215933593992

# Series/asymptotics split.  exp(-2x) remainder of the optimally
# truncated Hankel expansion is ~9e-14 at x = 15.
_ASYMPTOTIC_SWITCH = 15.0


def _is_half_integer(nu: float) -> bool:
    return abs(nu - math.floor(nu) - 0.5) < 1e-14


def _is_integer(nu: float) -> bool:
    return abs(nu - round(nu)) < 1e-14


# ---------------------------------------------------------------------------
# Gamma function (Lanczos, g = 7)
# ---------------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(a: float) -> float:
    """Gamma(a) for a > 0 via the Lanczos approximation.

    Satisfies Gamma(1/2) = sqrt(pi) and Gamma(a+1) = a Gamma(a) to
    ~1e-14 relative.
    """
    if a <= 0:
        raise ValueError(f"gamma_fn requires a > 0, got {a}")
    if _is_integer(a) and a <= 170:
        return float(math.factorial(round(a) - 1))
    z = a - 1.0
    x = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * x


# ---------------------------------------------------------------------------
# Lower incomplete gamma
# ---------------------------------------------------------------------------


def lower_incomplete_gamma(x: float, a: float) -> float:
    """gamma(x, a) = int_0^x exp(-t) t^(a-1) dt for x >= 0, a > 0.

    Ascending series for x < a + 1, complement of the Lentz continued
    fraction for the upper tail otherwise.  Monotone nondecreasing in x
    and bounded by Gamma(a).
    """
    if a <= 0:
        raise ValueError(f"lower_incomplete_gamma requires a > 0, got {a}")
    if x < 0:
        raise ValueError(f"lower_incomplete_gamma requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        # gamma(x,a) = x^a e^-x sum_n x^n / (a (a+1) ... (a+n))
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(1, 500):
            denom += 1.0
            term *= x / denom
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        return total * math.exp(-x + a * math.log(x))
    # Upper tail Gamma(x,a) by modified Lentz; gamma = Gamma(a) - upper.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    upper = math.exp(-x + a * math.log(x)) * h
    return gamma_fn(a) - upper


def sphere_measure(d: int) -> float:
    """Surface measure of the unit sphere S^d embedded in R^(d+1).

    sigma(S^d) = 2 pi^((d+1)/2) / Gamma((d+1)/2); sigma(S^0) = 2 counts
    the two endpoints of an interval.
    """
    if d < 0:
        raise ValueError(f"sphere_measure requires d >= 0, got {d}")
    return 2.0 * math.pi ** ((d + 1) / 2.0) / gamma_fn((d + 1) / 2.0)


# ---------------------------------------------------------------------------
# Cylindrical Bessel functions, integer order
# ---------------------------------------------------------------------------


def _bessel_j_series_int(n: int, x: float) -> float:
    # Ascending series in extended precision; cancellation peaks at
    # (x/2)^(2m)/(m!)^2 ~ 1e6 for x = 15, well inside longdouble range.
    xl = np.longdouble(x)
    half = xl / 2
    term = half**n / np.longdouble(math.factorial(n))
    total = term
    x2 = -(half * half)
    for m in range(1, 200):
        term = term * x2 / (np.longdouble(m) * np.longdouble(m + n))
        total += term
        if abs(term) < abs(total) * np.longdouble(1e-22) + np.longdouble(1e-330):
            break
    return float(total)


def _bessel_y_series_int(n: int, x: float) -> float:
    # Canonical log series: Y_n = (2/pi) ln(x/2) J_n - (x/2)^-n/pi *
    # sum_{m<n} (n-m-1)!/m! (x^2/4)^m - (x/2)^n/pi *
    # sum_m (psi(m+1)+psi(n+m+1)) (-x^2/4)^m / (m! (n+m)!)
    xl = np.longdouble(x)
    half = xl / 2
    q = half * half
    lead = np.longdouble(0.0)
    if n > 0:
        term = np.longdouble(math.factorial(n - 1))
        lead = term
        for m in range(1, n):
            term = term * q / np.longdouble(m * (n - m))
            lead += term
        lead = lead * half ** (-n)
    psi1 = -np.longdouble(_EULER_GAMMA)
    psi2 = -np.longdouble(_EULER_GAMMA) + sum(
        np.longdouble(1.0) / np.longdouble(j) for j in range(1, n + 1)
    )
    term = half**n / np.longdouble(math.factorial(n))
    total = (psi1 + psi2) * term
    for m in range(1, 250):
        term = term * (-q) / (np.longdouble(m) * np.longdouble(m + n))
        psi1 += np.longdouble(1.0) / np.longdouble(m)
        psi2 += np.longdouble(1.0) / np.longdouble(m + n)
        contrib = (psi1 + psi2) * term
        total += contrib
        if abs(contrib) < abs(total) * np.longdouble(1e-22) + np.longdouble(1e-330):
            break
    j_part = np.longdouble(_bessel_j_series_int(n, x))
    out = (2 * np.log(half) * j_part - lead - total) / np.longdouble(math.pi)
    return float(out)


def _hankel_pq(nu: float, x: float) -> tuple[float, float]:
    # Asymptotic sums P(nu,x), Q(nu,x) truncated at the smallest term:
    # J = sqrt(2/(pi x)) (P cos chi - Q sin chi),
    # Y = sqrt(2/(pi x)) (P sin chi + Q cos chi),
    # chi = x - nu pi/2 - pi/4.
    # a_k = prod_{j<=k} (mu - (2j-1)^2) / (k! 8^k x^k) feeds P for even k
    # (signs + - + -) and Q for odd k (signs + - + -).
    mu = 4.0 * nu * nu
    p = 0.0
    q = 0.0
    term = 1.0
    k = 0
    while k < 80:
        if k % 2 == 0:
            p += term * (1.0 if k % 4 == 0 else -1.0)
        else:
            q += term * (1.0 if k % 4 == 1 else -1.0)
        nxt = term * (mu - (2 * k + 1) ** 2) / (8.0 * x * (k + 1))
        if abs(nxt) >= abs(term) and k > 2:
            break
        term = nxt
        k += 1
    return p, q


def _bessel_jy_asymptotic(nu: float, x: float) -> tuple[float, float]:
    p, q = _hankel_pq(nu, x)
    chi = x - nu * math.pi / 2.0 - math.pi / 4.0
    amp = math.sqrt(2.0 / (math.pi * x))
    return amp * (p * math.cos(chi) - q * math.sin(chi)), amp * (
        p * math.sin(chi) + q * math.cos(chi)
    )


def _bessel_j_half(nu: float, x: float) -> float:
    # J_(m+1/2) via spherical Bessel: J = sqrt(2x/pi) j_m(x) / x * x ...
    m = round(nu - 0.5)
    return math.sqrt(2.0 * x / math.pi) * _sph_jn(m, x)


def _bessel_y_half(nu: float, x: float) -> float:
    # Y_(m+1/2)(x) = (-1)^(m+1) J_(-m-1/2)(x) = sqrt(2x/pi) y_m(x)/1
    m = round(nu - 0.5)
    return math.sqrt(2.0 * x / math.pi) * _sph_yn(m, x)


def _sph_jn(m: int, x: float) -> float:
    """Spherical Bessel j_m(x), downward (Miller) recurrence for stability."""
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    if x < 1e-4 and m >= 1:
        # Leading order x^m / (2m+1)!! with first correction.
        dfact = 1.0
        for j in range(1, 2 * m + 2, 2):
            dfact *= j
        return x**m / dfact * (1.0 - x * x / (2.0 * (2 * m + 3)))
    j0 = math.sin(x) / x
    if m == 0:
        return j0
    j1 = math.sin(x) / (x * x) - math.cos(x) / x
    if m == 1:
        return j1
    if x > m:
        # Upward recurrence is stable when x dominates the order.
        jm1, jm = j0, j1
        for ell in range(1, m):
            jm1, jm = jm, (2 * ell + 1) / x * jm - jm1
        return jm
    # Miller downward recurrence normalized by j0.
    start = m + int(2 * math.sqrt(40.0 * m)) + 20
    jp1 = 0.0
    jj = 1e-300
    target = 0.0
    for ell in range(start, -1, -1):
        jm1 = (2 * ell + 3) / x * jj - jp1  # j_ell from j_(ell+1), j_(ell+2)
        jp1, jj = jj, jm1
        if ell == m:
            target = jj
        if abs(jj) > 1e280:
            jj *= 1e-280
            jp1 *= 1e-280
            target *= 1e-280
    return target * (j0 / jj)


def _sph_yn(m: int, x: float) -> float:
    """Spherical Bessel y_m(x); upward recurrence (stable: y grows with m)."""
    y0 = -math.cos(x) / x
    if m == 0:
        return y0
    y1 = -math.cos(x) / (x * x) - math.sin(x) / x
    if m == 1:
        return y1
    ym1, ym = y0, y1
    for ell in range(1, m):
        ym1, ym = ym, (2 * ell + 1) / x * ym - ym1
    return ym


def spherical_jn(m: int, x: float) -> float:
    """Spherical Bessel function j_m(x) for integer m >= 0, x >= 0."""
    if m < 0:
        raise ValueError("spherical_jn requires m >= 0")
    if x < 0:
        raise ValueError("spherical_jn requires x >= 0")
    return _sph_jn(m, x)


def spherical_jnp(m: int, x: float) -> float:
    """Derivative d/dx j_m(x) via j_m' = j_(m-1) - (m+1)/x j_m."""
    if x == 0.0:
        return 1.0 / 3.0 if m == 1 else 0.0
    if m == 0:
        return -_sph_jn(1, x)
    return _sph_jn(m - 1, x) - (m + 1) / x * _sph_jn(m, x)


def bessel_j(nu: float, x: float) -> float:
    """Bessel function of the first kind J_nu(x) for x >= 0.

    Orders: nonnegative integers and half-integers.
    """
    if x < 0:
        raise ValueError(f"bessel_j requires x >= 0, got {x}")
    if nu < 0:
        # Negative half-integer orders arise in derivative recurrences:
        # J_(-m-1/2) = (-1)^(m+1) Y_(m+1/2).
        if _is_half_integer(nu) and x > 0:
            m = round(-nu - 0.5)
            return (-1.0) ** (m + 1) * _bessel_y_half(-nu, x)
        raise ValueError(f"bessel_j requires nu >= 0, got {nu}")
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    if _is_half_integer(nu):
        return _bessel_j_half(nu, x)
    if not _is_integer(nu):
        raise ValueError(f"order must be integer or half-integer, got {nu}")
    n = round(nu)
    if x < _ASYMPTOTIC_SWITCH or n > x:
        return _bessel_j_series_int(n, x)
    if n <= 1:
        return _bessel_jy_asymptotic(float(n), x)[0]
    # Mid-range order at large argument: upward recurrence is neutral
    # while the order stays below the argument.
    jm1 = _bessel_jy_asymptotic(0.0, x)[0]
    jm = _bessel_jy_asymptotic(1.0, x)[0]
    for ell in range(1, n):
        jm1, jm = jm, 2.0 * ell / x * jm - jm1
    return jm


def bessel_y(nu: float, x: float) -> float:
    """Bessel function of the second kind Y_nu(x) for x > 0."""
    if x <= 0:
        raise ValueError(f"bessel_y requires x > 0, got {x}")
    if nu < 0:
        # Y_(-m-1/2) = (-1)^m J_(m+1/2).
        if _is_half_integer(nu):
            m = round(-nu - 0.5)
            return (-1.0) ** m * _bessel_j_half(-nu, x)
        raise ValueError(f"bessel_y requires nu >= 0, got {nu}")
    if _is_half_integer(nu):
        return _bessel_y_half(nu, x)
    if not _is_integer(nu):
        raise ValueError(f"order must be integer or half-integer, got {nu}")
    n = round(nu)
    if x >= _ASYMPTOTIC_SWITCH:
        if n <= 1:
            return _bessel_jy_asymptotic(float(n), x)[1]
        # Upward recurrence from the asymptotic seed (stable for Y).
        ym1 = _bessel_jy_asymptotic(0.0, x)[1]
        ym = _bessel_jy_asymptotic(1.0, x)[1]
        for ell in range(1, n):
            ym1, ym = ym, 2.0 * ell / x * ym - ym1
        return ym
    if n <= 1:
        return _bessel_y_series_int(n, x)
    ym1 = _bessel_y_series_int(0, x)
    ym = _bessel_y_series_int(1, x)
    for ell in range(1, n):
        ym1, ym = ym, 2.0 * ell / x * ym - ym1
    return ym


def bessel_jp(nu: float, x: float) -> float:
    """Derivative J_nu'(x) via J' = (J_(nu-1) - J_(nu+1))/2, J_0' = -J_1."""
    if nu == 0:
        return -bessel_j(1.0, x)
    if x == 0.0:
        return 0.5 if abs(nu - 1.0) < 1e-14 else 0.0
    return 0.5 * (bessel_j(nu - 1.0, x) - bessel_j(nu + 1.0, x))


def bessel_yp(nu: float, x: float) -> float:
    """Derivative Y_nu'(x); Y_0' = -Y_1."""
    if nu == 0:
        return -bessel_y(1.0, x)
    return 0.5 * (bessel_y(nu - 1.0, x) - bessel_y(nu + 1.0, x))


def hankel1(nu: float, x: float) -> complex:
    """First-kind Hankel function H^(1)_nu(x) = J_nu(x) + i Y_nu(x).

    The Green's kernel is singular at coincidence, so x <= 0 is a
    domain error.
    """
    if x <= 0:
        raise ValueError(f"hankel1 requires x > 0, got {x}")
    return complex(bessel_j(nu, x), bessel_y(nu, x))


def hankel1p(nu: float, x: float) -> complex:
    """Derivative of H^(1)_nu."""
    return complex(bessel_jp(nu, x), bessel_yp(nu, x))


# ---------------------------------------------------------------------------
# Vectorized integer-order evaluation for convolution kernels
# ---------------------------------------------------------------------------


def _jy_series_vec(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Extended-precision ascending series, vectorized; valid for x < 15.
    xl = x.astype(np.longdouble)
    half = xl / 2
    q = half * half
    term = half**n / np.longdouble(math.factorial(n))
    j_tot = term.copy()
    psi1 = np.longdouble(-_EULER_GAMMA)
    psi2 = np.longdouble(-_EULER_GAMMA) + sum(
        np.longdouble(1.0) / np.longdouble(i) for i in range(1, n + 1)
    )
    yterm = term.copy()
    y_tot = (psi1 + psi2) * yterm
    for m in range(1, 80):
        term = term * (-q) / (np.longdouble(m) * np.longdouble(m + n))
        j_tot += term
        psi1 += np.longdouble(1.0) / np.longdouble(m)
        psi2 += np.longdouble(1.0) / np.longdouble(m + n)
        yterm = yterm * (-q) / (np.longdouble(m) * np.longdouble(m + n))
        y_tot += (psi1 + psi2) * yterm
    lead = np.zeros_like(xl)
    if n > 0:
        lt = np.longdouble(math.factorial(n - 1)) * np.ones_like(q)
        lead = lt.copy()
        for m in range(1, n):
            lt = lt * q / np.longdouble(m * (n - m))
            lead += lt
        with np.errstate(over="ignore"):
            lead = lead * half ** (-np.longdouble(n))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        y = (2 * np.log(half) * j_tot - lead - y_tot) / np.longdouble(math.pi)
        return j_tot.astype(float), y.astype(float)


def _jy_asymptotic_vec(nu: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Fixed 28-term P/Q sums; optimal truncation sits past k = 28 for all
    # x >= 15 and nu <= 1, so truncation error stays ~exp(-2x).
    mu = 4.0 * nu * nu
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(28):
        if k % 2 == 0:
            p += term * (1.0 if k % 4 == 0 else -1.0)
        else:
            q += term * (1.0 if k % 4 == 1 else -1.0)
        term = term * (mu - (2 * k + 1) ** 2) / (8.0 * x * (k + 1))
    chi = x - nu * math.pi / 2.0 - math.pi / 4.0
    amp = np.sqrt(2.0 / (math.pi * x))
    return amp * (p * np.cos(chi) - q * np.sin(chi)), amp * (
        p * np.sin(chi) + q * np.cos(chi)
    )


def bessel_jy_grid(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (J_n, Y_n) for integer n >= 0 on positive arrays.

    J uses the extended-precision series where x < 15 or the order
    exceeds the argument (forward recurrence is unstable there); Y uses
    series seeds below the switch and asymptotic seeds above, with the
    always-stable upward recurrence for higher orders.
    """
    x = np.asarray(x, dtype=float)
    j = np.empty_like(x)
    y = np.empty_like(x)
    small = x < _ASYMPTOTIC_SWITCH
    series_j = small | (x < n)
    if np.any(series_j):
        j[series_j] = _jy_series_vec(n, x[series_j])[0]
    rec_j = ~series_j
    if np.any(rec_j):
        if n <= 1:
            j[rec_j] = _jy_asymptotic_vec(float(n), x[rec_j])[0]
        else:
            xb = x[rec_j]
            jm1 = _jy_asymptotic_vec(0.0, xb)[0]
            jm = _jy_asymptotic_vec(1.0, xb)[0]
            for ell in range(1, n):
                jm1, jm = jm, 2.0 * ell / xb * jm - jm1
            j[rec_j] = jm
    if np.any(small):
        if n <= 1:
            y[small] = _jy_series_vec(n, x[small])[1]
        else:
            ym1 = _jy_series_vec(0, x[small])[1]
            ym = _jy_series_vec(1, x[small])[1]
            with np.errstate(over="ignore", invalid="ignore"):
                for ell in range(1, n):
                    ym1, ym = ym, 2.0 * ell / x[small] * ym - ym1
            y[small] = ym
    big = ~small
    if np.any(big):
        if n <= 1:
            y[big] = _jy_asymptotic_vec(float(n), x[big])[1]
        else:
            xb = x[big]
            ym1 = _jy_asymptotic_vec(0.0, xb)[1]
            ym = _jy_asymptotic_vec(1.0, xb)[1]
            for ell in range(1, n):
                ym1, ym = ym, 2.0 * ell / xb * ym - ym1
            y[big] = ym
    return j, y


def bessel_j_grid(n: int, x: np.ndarray) -> np.ndarray:
    """Vectorized J_n alone (skips the Y series, safe near x = 0)."""
    x = np.asarray(x, dtype=float)
    j = np.empty_like(x)
    series = (x < _ASYMPTOTIC_SWITCH) | (x < n)
    if np.any(series):
        j[series] = _jy_series_vec(n, x[series])[0]
    rec = ~series
    if np.any(rec):
        if n <= 1:
            j[rec] = _jy_asymptotic_vec(float(n), x[rec])[0]
        else:
            xb = x[rec]
            jm1 = _jy_asymptotic_vec(0.0, xb)[0]
            jm = _jy_asymptotic_vec(1.0, xb)[0]
            for ell in range(1, n):
                jm1, jm = jm, 2.0 * ell / xb * jm - jm1
            j[rec] = jm
    return j


def hankel1_grid(n: int, x: np.ndarray) -> np.ndarray:
    """Vectorized H^(1)_n on positive arrays (integer order)."""
    j, y = bessel_jy_grid(n, x)
    return j + 1j * y
