"""Special functions: Bessel J1, disc overlap area, displacement matrix elements."""

import math

import numpy as np
from scipy.special import gammaln

# |x| below this: power series; above ASYMPTOTIC_START: Hankel expansion.
SERIES_LIMIT = 8.0
ASYMPTOTIC_START = 30.0


def _j1_series(x):
    if x == 0.0:
        return 0.0
    half = 0.5 * x
    q = -half * half
    term = half
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + 1))
        total += term
        if abs(term) < 1e-17 * abs(total):
            return total


def _j1_integral(x):
    # J1(x) = (1/2pi) int_0^{2pi} cos(t - x sin t) dt; the trapezoid rule is
    # exponentially accurate for this periodic integrand once n > x + 40.
    n = int(x) + 64
    t = np.arange(n) * (2.0 * math.pi / n)
    return float(np.mean(np.cos(t - x * np.sin(t))))


def _j1_asymptotic(x):
    mu = 4.0
    z = 8.0 * x
    p = 1.0
    q = 0.0
    term = 1.0
    k = 0
    best = math.inf
    # alternating P/Q series; stop at the smallest term
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (k * z)
        if abs(term) >= best:
            break
        best = abs(term)
        if k % 2 == 1:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += -term if (k // 2) % 2 == 1 else term
        if best < 1e-17:
            break
    chi = x - 0.75 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def j1(x):
    """Bessel function of the first kind, order one.

    Power series below |x| = 8, a trapezoid evaluation of Bessel's integral
    on 8 <= |x| < 30 and the Hankel asymptotic expansion beyond. Absolute
    error is below 1e-14 everywhere.
    """
    x = float(x)
    if x < 0:
        return -j1(-x)
    if x < SERIES_LIMIT:
        return _j1_series(x)
    if x < ASYMPTOTIC_START:
        return _j1_integral(x)
    return _j1_asymptotic(x)


def j1_zero(k=1, tol=1e-14):
    """k-th positive zero of J1, by bracketing on a grid and bisection."""
    if k < 1:
        raise ValueError("k must be >= 1")
    step = 0.1
    a = 1.0
    fa = j1(a)
    found = 0
    while True:
        b = a + step
        fb = j1(b)
        if fa * fb < 0:
            found += 1
            if found == k:
                break
        a, fa = b, fb
    while b - a > tol:
        c = 0.5 * (a + b)
        fc = j1(c)
        if fa * fc <= 0:
            b = c
        else:
            a, fa = c, fc
    return 0.5 * (a + b)


def lens_area(s):
    """Overlap area of two discs of radius 1/2 whose centres are s apart.

    Vectorised; zero for s >= 1.
    """
    s = np.abs(np.asarray(s, dtype=float))
    inside = np.clip(s, 0.0, 1.0)
    area = 0.5 * np.arccos(inside) - 0.5 * inside * np.sqrt(1.0 - inside * inside)
    return np.where(s < 1.0, area, 0.0)


def displacement_bands(radii, ks, n_max):
    """Normalised displacement matrix elements on a set of radii.

    Returns h with shape (len(ks), n_max, len(radii)) where

        h[i, n, j] = sqrt(n!/(n+k)!) r^k exp(-r^2/2) L_n^(k)(r^2),  k = ks[i],

    the modulus of <n+k|D(beta)|n> at |beta| = r. Computed by the three-term
    recurrence in n at fixed order k, started from sqrt(Poisson(k; r^2)), so
    no factorial ratio is ever formed. |h| <= 1.
    """
    r = np.atleast_1d(np.asarray(radii, dtype=float))
    ks = np.atleast_1d(np.asarray(ks, dtype=int))
    x = r * r
    kcol = ks[:, None].astype(float)
    pos = x > 0
    logx = np.log(np.where(pos, x, 1.0))
    logh0 = 0.5 * (kcol * logx[None, :] - x[None, :] - gammaln(kcol + 1.0))
    logh0 = np.where(pos[None, :], logh0, np.where(kcol == 0, 0.0, -np.inf))
    out = np.zeros((len(ks), n_max, len(r)))
    prev = np.zeros((len(ks), len(r)))
    cur = np.exp(logh0)
    for n in range(n_max):
        out[:, n, :] = cur
        nxt = ((2 * n + kcol + 1 - x[None, :]) * cur - np.sqrt(n * (n + kcol)) * prev) / np.sqrt(
            (n + 1) * (n + kcol + 1)
        )
        prev, cur = cur, nxt
    return out

