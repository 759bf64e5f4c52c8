"""Nonclassicality filters: kernels, autocorrelation families, width scaling,
condition checks and the construction of a filter family from a witness."""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import j0

from .errors import DomainError
from .quadrature import _leggauss, fourier_integral, polar_rule, segment_rule
from .special import j1, lens_area

DISC_AREA = math.pi / 4.0


@dataclass(frozen=True)
class FilterKernel:
    """Rotationally symmetric kernel omega_1(beta) with its transform pair.

    ``profile`` maps |beta| to the kernel value. ``transform`` maps |alpha| to
    (1/pi) int d^2beta omega_1(beta) e^{alpha beta* - alpha* beta}.
    ``support_radius`` is None for kernels without compact support, in which
    case ``cutoff`` bounds the region where the kernel exceeds 1e-20.
    """

    profile: Callable
    transform: Callable
    support_radius: Optional[float]
    cutoff: float
    name: str = "kernel"

    def eval(self, beta):
        return self.profile(np.abs(np.asarray(beta, dtype=complex)))

    @property
    def compact(self):
        return self.support_radius is not None


def _disc_transform(a):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    out = np.array([0.25 if x == 0 else j1(x) / (2.0 * x) for x in a])
    return out


def disc_kernel():
    """Indicator of the disc |beta| < 1/2."""
    return FilterKernel(
        profile=lambda r: (np.asarray(r) < 0.5).astype(float),
        transform=_disc_transform,
        support_radius=0.5,
        cutoff=0.5,
        name="disc",
    )


def _radial_transform(profile, cutoff, order=200):
    r, wr = segment_rule(0.0, cutoff, order)
    prof = profile(r)

    def transform(a):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        return 2.0 * (j0(2.0 * np.outer(a, r)) * (r * prof)) @ wr

    return transform


def quartic_kernel():
    """Super-Gaussian kernel exp(-|beta|^4), cut off where it drops below e^-46.

    The cut makes the kernel compactly supported (radius 46^(1/4) ~ 2.60), so
    its autocorrelation vanishes beyond twice that radius.
    """
    cutoff = 46.0**0.25

    def profile(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < cutoff, np.exp(-(r**4)), 0.0)

    return FilterKernel(profile, _radial_transform(profile, cutoff), cutoff, cutoff, name="quartic")


@dataclass(frozen=True)
class AutocorrConfig:
    order: int = 64


def autocorrelate(kernel, beta, quad=AutocorrConfig()):
    """Omega_1(beta) = int d^2beta' omega_1(beta') omega_1(beta + beta').

    Tensor Gauss-Legendre. For compact kernels the outer coordinate runs
    over the lens where both supports overlap, split where the two boundary
    arcs cross, so each piece is smooth; non-compact kernels use the square
    [-cutoff, cutoff]^2.
    """
    s = float(abs(complex(beta)))
    n = quad.order
    if kernel.compact:
        big_r = kernel.support_radius
        if s >= 2.0 * big_r:
            return 0.0
        total = 0.0
        pieces = (
            (-big_r, -0.5 * s, lambda x: np.sqrt(np.maximum(big_r**2 - x**2, 0.0))),
            (-0.5 * s, big_r - s, lambda x: np.sqrt(np.maximum(big_r**2 - (x + s) ** 2, 0.0))),
        )
        t, wt = _leggauss(n)
        for a, b, half in pieces:
            if b <= a:
                continue
            xs, wx = segment_rule(a, b, n)
            h = half(xs)
            ys = h[:, None] * t[None, :]
            wy = h[:, None] * wt[None, :]
            p1 = kernel.profile(np.hypot(xs[:, None], ys))
            p2 = kernel.profile(np.hypot(xs[:, None] + s, ys))
            total += float(np.sum(wx[:, None] * wy * p1 * p2))
        return total
    big_l = kernel.cutoff
    t, wt = _leggauss(n)
    xs = big_l * t
    wx = big_l * wt
    p1 = kernel.profile(np.hypot(xs[:, None], xs[None, :]))
    p2 = kernel.profile(np.hypot(xs[:, None] + s, xs[None, :]))
    return float(np.einsum("i,j,ij->", wx, wx, p1 * p2))


@dataclass(frozen=True)
class FilterFamily:
    """A width-parameterised filter family Omega_w(beta).

    ``eval(beta, w)`` is vectorised over ``beta``. ``radius`` is the support
    (or decay) radius at w = 1 and ``kinks`` the radii at w = 1 where the
    profile is not smooth; both scale linearly with w.
    """

    eval: Callable
    normalized: bool
    radius: float
    compact: bool = True
    kinks: tuple = ()
    name: str = "filter"

    def __call__(self, beta, w=1.0):
        if not w > 0:
            raise DomainError(f"filter width must be positive, got {w}")
        return self.eval(np.asarray(beta, dtype=complex), float(w))

    def breakpoints(self, w):
        pts = sorted({0.0, *(k * w for k in self.kinks), self.radius * w})
        return [p for p in pts if p <= self.radius * w]


def disc_family(normalized=False):
    """Autocorrelation of the disc kernel, Omega_w(beta) = lens(|beta|/w).

    Unnormalised by default (Omega_1(0) = pi/4), which matches the Fock-basis
    witness series; ``normalized=True`` divides by pi/4.
    """
    scale = 1.0 / DISC_AREA if normalized else 1.0

    def ev(beta, w):
        return scale * lens_area(np.abs(beta) / w) + 0j

    return FilterFamily(ev, normalized, radius=1.0, compact=True, name="disc-normalized" if normalized else "disc")


def kernel_family(kernel, normalized=True, quad=AutocorrConfig()):
    """Filter family generated by autocorrelating ``kernel`` (rotationally symmetric)."""

    @lru_cache(maxsize=200_000)
    def profile(s):
        return autocorrelate(kernel, s, quad)

    norm = profile(0.0) if normalized else 1.0

    def ev(beta, w):
        s = np.round(np.abs(beta) / w, 15)
        uniq, inv = np.unique(s.ravel(), return_inverse=True)
        vals = np.array([profile(float(u)) for u in uniq]) / norm
        return vals[inv].reshape(s.shape) + 0j

    radius = 2.0 * (kernel.support_radius if kernel.compact else kernel.cutoff)
    return FilterFamily(ev, normalized, radius=radius, compact=kernel.compact, name=f"{kernel.name}-autocorrelation")


def reference_family():
    """Normalised autocorrelation family of exp(-|beta|^4)."""
    return kernel_family(quartic_kernel(), normalized=True)


def scale_width(family, w):
    """Family G with G_v = F_{v w}; composes as scale(scale(F, a), b) = scale(F, a b)."""
    if not w > 0:
        raise DomainError(f"width scale must be positive, got {w}")
    w = float(w)
    return FilterFamily(
        eval=lambda beta, v: family.eval(beta, v * w),
        normalized=family.normalized,
        radius=family.radius * w,
        compact=family.compact,
        kinks=tuple(k * w for k in family.kinks),
        name=f"{family.name}*{w:g}",
    )


# --- witnesses as characteristic functions --------------------------------------


@dataclass(frozen=True)
class WitnessCharFn:
    """Q-characteristic function of a witness normalised to trace 1/pi (value 1 at 0)."""

    eval: Callable
    radius: float
    compact: bool = True
    kinks: tuple = ()
    name: str = "witness"

    def __call__(self, beta):
        return self.eval(np.asarray(beta, dtype=complex))


def witness_from_family(family, w0=1.0):
    """Char. function of the witness built from ``family`` at width ``w0``, rescaled to trace 1/pi."""
    norm = complex(family(0.0, w0))
    if norm == 0:
        raise DomainError("family vanishes at the origin; cannot normalise the witness trace")
    return WitnessCharFn(
        eval=lambda beta: family(beta, w0) / norm,
        radius=family.radius * w0,
        compact=family.compact,
        kinks=tuple(k * w0 for k in family.kinks),
        name=f"witness[{family.name}, w={w0:g}]",
    )


def gaussian_witness(rate=1.0):
    """Witness with char. function exp(-rate |beta|^2); rate > 1/2 keeps C1."""
    cutoff = math.sqrt(46.0 / rate)
    return WitnessCharFn(
        eval=lambda beta: np.exp(-rate * np.abs(beta) ** 2) + 0j,
        radius=cutoff,
        compact=False,
        name=f"gaussian-witness[{rate:g}]",
    )


def blend_weight(w):
    """f(w): 1 at w = 1, so the filter starts out as the witness itself."""
    return math.exp(-((w - 1.0) ** 2))


def damping_rate(w):
    """g(w): Gaussian damping that keeps |Omega_w| e^{|beta|^2/2} integrable for w > 1."""
    return max(1.0 - 1.0 / (w * w), 0.0)


def filter_from_witness(phi_q, reference, w, beta, g=damping_rate):
    """f(w) phiQ(beta/w) exp(-g(w)|beta|^2/2) + (1 - f(w)) Omega'_w(beta), for w >= 1."""
    if not w >= 1.0:
        raise DomainError(f"construction is defined for w >= 1, got {w}")
    beta = np.asarray(beta, dtype=complex)
    f = blend_weight(w)
    out = f * phi_q(beta / w) * np.exp(-0.5 * g(w) * np.abs(beta) ** 2)
    if f < 1.0:
        out = out + (1.0 - f) * reference(beta, w)
    return out


def witness_filter_family(phi_q, reference=None, g=damping_rate):
    """Filter family from a witness characteristic function (w >= 1 only)."""
    reference = reference if reference is not None else reference_family()
    kinks = tuple(phi_q.kinks) + ((phi_q.radius,) if phi_q.compact else ())
    kinks += tuple(reference.kinks) + ((reference.radius,) if reference.compact else ())
    radius = max(phi_q.radius, reference.radius)
    return FilterFamily(
        eval=lambda beta, w: filter_from_witness(phi_q, reference, w, beta, g=g),
        normalized=True,
        radius=radius,
        compact=phi_q.compact and reference.compact,
        kinks=tuple(k for k in kinks if k < radius),
        name=f"witness-filter[{phi_q.name}]",
    )


# --- condition checks ---------------------------------------------------------------


@dataclass(frozen=True)
class GridConfig:
    """Square grid [-extent, extent]^2 with ``points`` nodes per axis."""

    extent: float = 4.0
    points: int = 41

    def alphas(self):
        axis = np.linspace(-self.extent, self.extent, self.points)
        return axis[:, None] + 1j * axis[None, :]


@dataclass
class ConditionReport:
    w: float
    c1_pass: bool
    c1_detail: str
    c1_decay_slope: float
    c2_min: float
    c2_imag_residue: float
    c2_pass: bool
    value_at_zero: complex
    normalized: bool
    limit_deviations: list = field(default_factory=list)
    limit_monotone: bool = True
    c3_pass: bool = False

    @property
    def passed(self):
        return self.c1_pass and self.c2_pass and self.c3_pass


@dataclass
class FilterReport:
    family: str
    conditions: list

    @property
    def passed(self):
        return all(c.passed for c in self.conditions)


def decay_proxy(family, w, samples=2001, extent=8.0):
    """Sampled evidence that |Omega_w(beta)| e^{|beta|^2/2} is integrable.

    Works on the log of the radial integrand r max_theta |Omega_w| e^{r^2/2}
    over r in (0, extent*w]. Passes if the integrand vanishes beyond some
    radius, or if it is decreasing over the last tenth of the range with a
    negative fitted log-slope and an exponentially extrapolated tail below
    1e-6 of the sampled integral. Returns (passed, detail, slope).
    """
    r = np.linspace(extent * w / samples, extent * w, samples)
    angles = np.array([0.0, 0.5, 1.0, 1.5]) * math.pi
    beta = r[:, None] * np.exp(1j * angles)[None, :]
    mag = np.max(np.abs(family(beta, w)), axis=1)
    with np.errstate(divide="ignore"):
        logi = np.log(mag) + 0.5 * r * r + np.log(r)
    finite = np.isfinite(logi)
    if not np.any(finite):
        return True, "identically zero on the sampled range", -math.inf
    last = int(np.nonzero(finite)[0][-1])
    if last < samples - 1 and not np.any(finite[last + 1:]):
        return True, f"vanishes beyond r = {r[last]:.4g}", -math.inf
    tail = slice(int(0.9 * samples), samples)
    slope = float(np.polyfit(r[tail], logi[tail], 1)[0])
    decreasing = bool(np.all(np.diff(logi[tail]) < 0))
    log_total = float(np.logaddexp.reduce(logi[finite]) + math.log(r[1] - r[0]))
    log_tail = float(logi[-1] - math.log(abs(slope))) if slope < 0 else math.inf
    ok = decreasing and slope < 0 and log_tail - log_total < math.log(1e-6)
    detail = f"log-slope {slope:.4g} at r = {r[-1]:.4g}, tail/total = {math.exp(min(log_tail - log_total, 700.0)):.3g}"
    return ok, detail, slope


def sampled_transform(family, w, alphas, radial=128, angular=None):
    """(1/pi^2) int d^2beta Omega_w(beta) e^{alpha beta* - alpha* beta} on a set of alphas."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    bps = family.breakpoints(w)
    amax = float(np.max(np.abs(alphas))) if alphas.size else 0.0
    if angular is None:
        angular = max(64, int(math.ceil((4.0 * amax * bps[-1] + 64) / 8.0)) * 8)
    rule = polar_rule(bps, radial, angular)
    vals = family(rule.points, w)
    return fourier_integral(rule, vals, alphas.ravel()).reshape(alphas.shape) / math.pi**2


def verify_filter_conditions(family, w_list, grid=GridConfig(), tol=1e-8):
    """Sampled checks of C1 (integrability proxy), C2 (non-negative transform)
    and C3 (normalisation and the w -> infinity limit) for each width."""
    reports = []
    probe = np.array([0.5, 1.0, 2.0]) * np.exp(1j * np.array([0.0, 1.0, 2.5]))
    for w in w_list:
        c1_ok, c1_detail, slope = decay_proxy(family, w)
        ft = sampled_transform(family, w, grid.alphas())
        c2_min = float(ft.real.min())
        resid = float(np.abs(ft.imag).max())
        at0 = complex(family(0.0, w))
        normalized = abs(at0 - 1.0) < 1e-12
        devs = []
        for j in range(6):
            wj = w * 2.0**j
            devs.append(float(np.max(np.abs(family(probe, wj) - family(0.0, wj)))))
        monotone = all(b <= a + 1e-12 for a, b in zip(devs, devs[1:]))
        reports.append(
            ConditionReport(
                w=w,
                c1_pass=c1_ok,
                c1_detail=c1_detail,
                c1_decay_slope=slope,
                c2_min=c2_min,
                c2_imag_residue=resid,
                c2_pass=c2_min >= -tol,
                value_at_zero=at0,
                normalized=normalized,
                limit_deviations=devs,
                limit_monotone=monotone,
                c3_pass=normalized and monotone,
            )
        )
    return FilterReport(family.name, reports)
