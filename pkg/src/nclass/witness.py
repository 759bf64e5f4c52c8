"""The disc-filter universal witness W_w(alpha) and the classic baseline tests.

The Fock diagonal of the witness is the finite alternating series

    <n|W_w|n> = (w^2/16) sum_{m<=n} (-w^2/4)^m / ((m+1)!)^2 C(2m+2, m) n!/(n-m)!

whose terms grow like exp(2 w sqrt(n)) before cancelling down to O(1).
It is summed in decimal arithmetic with a working precision derived from
the largest term, so results are exact to ~1e-20 absolute whatever n and w.
"""

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import DomainError
from .fock import (
    annihilation,
    as_point,
    char_function,
    displace_state,
    photon_statistics,
)
from .filters import DISC_AREA
from .special import j1

ABS_DIGITS = 24  # absolute accuracy target (decimal digits) of the exact sums


@dataclass(frozen=True)
class WitnessSpec:
    """Width ``w`` and displacement ``alpha`` of one universal witness."""

    w: float
    alpha: complex = 0j

    def __post_init__(self):
        if not (self.w > 0 and math.isfinite(self.w)):
            raise DomainError(f"witness width must be positive and finite, got {self.w}")
        object.__setattr__(self, "alpha", as_point(self.alpha))


@dataclass(frozen=True)
class ExpectationReport:
    value: float
    truncation_bound: float
    terms_used: int
    dim_used: int

    @property
    def certified(self):
        """True when the truncation bound cannot flip the sign of ``value``."""
        return self.truncation_bound < abs(self.value)


def _check_width(w):
    if not w > 0:
        raise DomainError(f"witness width must be positive, got {w}")


def _log_coeffs(w, m):
    """log |c_m|, c_m = (w^2/16)(-w^2/4)^m C(2m+2,m)/((m+1)!)^2."""
    m = np.asarray(m, dtype=float)
    return (
        math.log(w * w / 16.0)
        + m * math.log(w * w / 4.0)
        + gammaln(2 * m + 3)
        - gammaln(m + 1)
        - gammaln(m + 3)
        - 2.0 * gammaln(m + 2)
    )


def _coeff_ratio(m):
    """c_{m+1} / c_m without the (-w^2/4) factor, as an integer fraction."""
    return (2 * m + 4) * (2 * m + 3), (m + 1) * (m + 3) * (m + 2) ** 2


def _precision(log_peak):
    return max(30, int(math.ceil(log_peak / math.log(10.0))) + ABS_DIGITS + 5)


@lru_cache(maxsize=100_000)
def witness_diag(n, w):
    """<n|W_w|n> for the disc-filter witness, exact to ~1e-24 absolute."""
    _check_width(w)
    if n < 0:
        raise DomainError("photon number must be non-negative")
    n = int(n)
    w = float(w)
    ms = np.arange(n + 1)
    logt = _log_coeffs(w, ms) + gammaln(n + 1.0) - gammaln(n - ms + 1.0)
    peak = int(np.argmax(logt))
    floor = Decimal(10) ** (-ABS_DIGITS - 2)
    with localcontext() as ctx:
        ctx.prec = _precision(float(logt[peak]))
        wd = Decimal(w)
        y = -wd * wd / 4
        t = wd * wd / 16
        s = t
        for m in range(n):
            num, den = _coeff_ratio(m)
            t = t * y * (num * (n - m)) / den
            s += t
            if m > peak and abs(t) < floor:
                break
        return float(s)


def witness_diag_table(dim, w):
    return np.array([witness_diag(n, w) for n in range(dim)])


def witness_coherent_closed_form(r, w):
    """<alpha|W_w|alpha> = J1(w r)^2 / (4 r^2), r = |alpha - witness displacement|."""
    _check_width(w)
    r = abs(float(r))
    if r == 0.0:
        return w * w / 16.0
    return j1(w * r) ** 2 / (4.0 * r * r)


class NormalMoments:
    """Factorial moments <:n^m:> = sum_n p_n n!/(n-m)! of a photon distribution.

    Kept in decimal so that sum_m c_m <:n^m:> (the witness expectation) can
    be evaluated for many widths without re-deriving the moments.
    """

    def __init__(self, stats):
        self.stats = stats
        p = np.asarray(stats.probs, dtype=float)
        nz = np.nonzero(p > 0)[0]
        self.size = int(nz[-1]) + 1 if len(nz) else 1
        self.probs = p[: self.size]
        n = np.arange(self.size)
        with np.errstate(divide="ignore"):
            logp = np.log(self.probs)
        ms = np.arange(self.size)
        # log <:n^m:> by log-sum-exp over n >= m
        logf = logp[None, :] + gammaln(n[None, :] + 1.0) - gammaln(np.maximum(n[None, :] - ms[:, None], 0) + 1.0)
        logf = np.where(n[None, :] >= ms[:, None], logf, -np.inf)
        self.log_moments = np.logaddexp.reduce(logf, axis=1)
        self._cache = {}

    def _moments(self, prec):
        if prec in self._cache:
            return self._cache[prec]
        with localcontext() as ctx:
            ctx.prec = prec
            v = [Decimal(float(x)) for x in self.probs]
            moments = []
            for m in range(self.size):
                if m:
                    for k in range(m, self.size):
                        v[k] *= k - m + 1
                moments.append(sum(v[m:], Decimal(0)))
        self._cache[prec] = moments
        return moments

    def series_value(self, w):
        """sum_m c_m(w) <:n^m:>, i.e. sum_n <n|W_w|n> p_n. Returns (value, terms)."""
        _check_width(w)
        ms = np.arange(self.size)
        logt = _log_coeffs(w, ms) + self.log_moments
        finite = np.isfinite(logt)
        if not np.any(finite):
            return 0.0, 0
        prec = _precision(float(np.max(logt[finite])))
        prec = 20 * int(math.ceil(prec / 20))
        moments = self._moments(prec)
        with localcontext() as ctx:
            ctx.prec = prec
            wd = Decimal(float(w))
            y = -wd * wd / 4
            c = wd * wd / 16
            total = c * moments[0]
            for m in range(self.size - 1):
                num, den = _coeff_ratio(m)
                c = c * y * num / den
                total += c * moments[m + 1]
            return float(total), self.size


def _probe_sup(dim, w, probes=8):
    """max |<n|W_w|n>| over a geometric probe set in [dim, 4 dim]."""
    ns = sorted({int(round(dim * 4.0 ** (j / (probes - 1)))) for j in range(probes)})
    return max(abs(witness_diag(n, w)) for n in ns)


def _report(moments, w, dim):
    value, terms = moments.series_value(w)
    tail = moments.stats.tail_mass
    bound = _probe_sup(dim, w) * tail if tail > 0 else 0.0
    return ExpectationReport(value, bound, terms, dim)


def expectation(rho, spec):
    """<W_w(alpha)> from the photon statistics of the state displaced by -alpha.

    ``truncation_bound`` = (probe supremum of |<n|W_w|n>| beyond the
    truncation) x tail_mass; the report is uncertified when it exceeds the
    magnitude of the value.
    """
    shifted = displace_state(rho, -spec.alpha)
    return _report(NormalMoments(photon_statistics(shifted)), spec.w, rho.dim)


@dataclass
class ScanResult:
    alpha: complex
    rows: list = field(default_factory=list)  # (w, ExpectationReport)
    detected: bool = False
    w_star: float = None
    bracket: tuple = None

    @property
    def widths(self):
        return np.array([w for w, _ in self.rows])

    @property
    def values(self):
        return np.array([r.value for _, r in self.rows])

    @property
    def minimum(self):
        i = int(np.argmin(self.values))
        return self.rows[i][0], self.rows[i][1].value


def scan_width(rho, alpha, w_grid, xtol=1e-8):
    """Witness expectation over a strictly increasing grid of widths.

    ``detected`` is set when some value is negative beyond its truncation
    bound. ``w_star`` is the first sign change, refined by bisection, and is
    reported only when both bracketing values are certified.
    """
    w_grid = [float(w) for w in w_grid]
    if not w_grid or w_grid[0] <= 0 or any(b <= a for a, b in zip(w_grid, w_grid[1:])):
        raise DomainError("width grid must be positive and strictly increasing")
    alpha = as_point(alpha)
    moments = NormalMoments(photon_statistics(displace_state(rho, -alpha)))
    result = ScanResult(alpha)
    for w in w_grid:
        result.rows.append((w, _report(moments, w, rho.dim)))
    result.detected = any(r.value < 0 and r.certified for _, r in result.rows)
    # last certified positive value before the first certified negative one;
    # uncertified points in between (e.g. an exact zero) stay inside the bracket
    last_pos = None
    for w, r in result.rows:
        if not r.certified:
            continue
        if r.value > 0:
            last_pos = w
        elif last_pos is not None:
            lo, hi = last_pos, w
            while hi - lo > xtol:
                mid = 0.5 * (lo + hi)
                if moments.series_value(mid)[0] > 0:
                    lo = mid
                else:
                    hi = mid
            result.w_star = 0.5 * (lo + hi)
            result.bracket = (last_pos, w)
            break
    return result


def witness_trace(w, dim, normalized=True):
    """Partial trace sum_{n<dim} <n|W_w|n>.

    The disc family has Omega_1(0) = pi/4, so the raw partial sums approach
    1/4; with ``normalized`` the witness is rescaled to unit filter value at
    the origin and the sums approach 1/pi. The error decays like dim^(-1/2).
    The sum over n is collapsed exactly with
    sum_{n<N} n!/(n-m)! = m! C(N, m+1) and evaluated in decimal arithmetic.
    """
    _check_width(w)
    if dim < 1:
        raise DomainError("dim must be >= 1")
    w = float(w)
    big_n = int(dim)
    ms = np.arange(big_n)
    logt = _log_coeffs(w, ms) + gammaln(ms + 1.0) + gammaln(big_n + 1.0) - gammaln(ms + 2.0) - gammaln(big_n - ms)
    peak = int(np.argmax(logt))
    floor = Decimal(10) ** (-ABS_DIGITS - 2)
    with localcontext() as ctx:
        ctx.prec = _precision(float(logt[peak]))
        wd = Decimal(w)
        y = -wd * wd / 4
        t = wd * wd / 16 * big_n
        s = t
        for m in range(big_n - 1):
            num, den = _coeff_ratio(m)
            t = t * y * (num * (m + 1) * (big_n - m - 1)) / (den * (m + 2))
            s += t
            if m > peak and abs(t) < floor:
                break
        total = float(s)
    return total / DISC_AREA if normalized else total


# --- baseline tests ---------------------------------------------------------------


def mandel_q(rho):
    """Mandel Q = (Var n - <n>) / <n>; negative means sub-Poissonian."""
    stats = photon_statistics(rho)
    p = stats.probs
    n = np.arange(len(p), dtype=float)
    norm = p.sum()
    mean = np.dot(n, p) / norm
    if mean <= 0:
        raise DomainError("Mandel Q is undefined for a state with <n> = 0")
    second = np.dot(n * n, p) / norm
    return float((second - mean * mean - mean) / mean)


def _quadrature_moments(rho):
    m = rho.elements
    a = annihilation(rho.dim)
    norm = np.trace(m).real
    ea = np.trace(m @ a) / norm
    ea2 = np.trace(m @ a @ a) / norm
    en = np.trace(m @ a.T @ a).real / norm
    return ea, ea2, en


def quadrature_variance(rho, phase):
    """Variance of x_phi = a e^{-i phi} + a^dag e^{i phi}; the vacuum gives 1."""
    ea, ea2, en = _quadrature_moments(rho)
    e = np.exp(-1j * phase)
    mean = 2.0 * (e * ea).real
    second = 2.0 * (e * e * ea2).real + 2.0 * en + 1.0
    return float(second - mean * mean)


def min_quadrature_variance(rho):
    """Minimum over phi of the quadrature variance, in closed form. Returns (value, phase)."""
    ea, ea2, en = _quadrature_moments(rho)
    cov = ea2 - ea * ea
    value = 1.0 + 2.0 * (en - abs(ea) ** 2) - 2.0 * abs(cov)
    phase = 0.5 * (np.angle(cov) + math.pi) if abs(cov) > 0 else 0.0
    return float(value), float(phase)


def default_beta_grid(radius=3.0, points=61):
    axis = np.linspace(-radius, radius, points)
    grid = axis[:, None] + 1j * axis[None, :]
    return grid[np.abs(grid) <= radius + 1e-12]


def first_order_char_test(rho, beta_grid=None, tol=1e-9):
    """max |Phi(beta)| over a grid; classical states never exceed 1.

    Returns (max_modulus, witnessed).
    """
    grid = default_beta_grid() if beta_grid is None else np.asarray(beta_grid, dtype=complex)
    vals = char_function(rho, grid)
    top = float(np.max(np.abs(vals)))
    return top, top > 1.0 + tol
