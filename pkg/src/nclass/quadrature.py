"""Quadrature rules for radial and polar integrals over phase space."""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class QuadConfig:
    """Polar quadrature settings.

    ``radial`` Gauss-Legendre nodes per radial segment, ``angular`` trapezoid
    nodes on [0, 2pi). When ``self_check`` is on, results are recomputed with
    both orders doubled and must agree within ``tol``; ``max_doublings``
    bounds the refinement.
    """

    radial: int = 128
    angular: int = 256
    tol: float = 1e-7
    self_check: bool = True
    max_doublings: int = 2

    def doubled(self):
        return QuadConfig(2 * self.radial, 2 * self.angular, self.tol, self.self_check, self.max_doublings)


@lru_cache(maxsize=64)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def segment_rule(a, b, n):
    """Gauss-Legendre on [a, b] after the substitution r = a + (b-a) sin^2(t).

    The map flattens square-root endpoint behaviour such as the edge of a
    disc support, so piecewise-smooth radial integrands converge
    spectrally. Returns nodes and weights for int_a^b f(r) dr.
    """
    x, wx = _leggauss(n)
    t = 0.25 * math.pi * (x + 1.0)
    s, c = np.sin(t), np.cos(t)
    nodes = a + (b - a) * s * s
    weights = wx * 0.25 * math.pi * (b - a) * 2.0 * s * c
    return nodes, weights


def radial_rule(breakpoints, n):
    """Composite segment rule over consecutive breakpoints (ascending)."""
    nodes, weights = [], []
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        if b > a:
            r, w = segment_rule(a, b, n)
            nodes.append(r)
            weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True)
class PolarRule:
    """Tensor rule for int d^2 beta f(beta): the area element r dr dtheta is
    folded into ``weights`` (shape radii x angles)."""

    radii: np.ndarray
    radial_weights: np.ndarray
    angles: np.ndarray

    @property
    def dtheta(self):
        return 2.0 * math.pi / len(self.angles)

    @property
    def points(self):
        return self.radii[:, None] * np.exp(1j * self.angles)[None, :]

    @property
    def weights(self):
        return (self.radii * self.radial_weights)[:, None] * self.dtheta * np.ones(len(self.angles))[None, :]


def polar_rule(breakpoints, radial, angular):
    r, wr = radial_rule(breakpoints, radial)
    theta = np.arange(angular) * (2.0 * math.pi / angular)
    return PolarRule(r, wr, theta)


def fourier_phases(rule, alphas):
    """exp(alpha beta* - alpha* beta) on the rule's nodes, for each alpha.

    Shape (len(alphas), radii, angles).
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    beta = rule.points
    arg = alphas[:, None, None] * np.conj(beta)[None] - np.conj(alphas)[:, None, None] * beta[None]
    return np.exp(arg)


def max_threads():
    """Worker cap from NCLASS_THREADS (default: CPU count)."""
    raw = os.environ.get("NCLASS_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def pmap(fn, items):
    """Order-preserving map over a thread pool capped by NCLASS_THREADS."""
    items = list(items)
    n = min(max_threads(), len(items))
    if n <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fourier_integral(rule, values, alphas, chunk=16):
    """int d^2 beta values(beta) exp(alpha beta* - alpha* beta) for each alpha.

    ``values`` lives on the nodes of ``rule``; the sum is done in chunks of
    alphas to bound memory.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    weighted = values * rule.weights
    out = np.empty(len(alphas), dtype=complex)
    for start in range(0, len(alphas), chunk):
        block = alphas[start:start + chunk]
        out[start:start + chunk] = np.einsum("arl,rl->a", fourier_phases(rule, block), weighted)
    return out


def self_converged(compute, quad):
    """Run ``compute(quad)`` and refine until successive results agree.

    Returns (result, report). ``compute`` must return an array-like; the
    agreement test is on its maximum absolute change.
    """
    est = np.asarray(compute(quad))
    report = {"radial": quad.radial, "angular": quad.angular, "change": None}
    if not quad.self_check:
        return est, report
    q = quad
    change = math.inf
    for _ in range(quad.max_doublings):
        q = q.doubled()
        new = np.asarray(compute(q))
        change = float(np.max(np.abs(new - est))) if new.size else 0.0
        est = new
        if change < quad.tol:
            return est, {"radial": q.radial, "angular": q.angular, "change": change}
    from .errors import AccuracyError

    raise AccuracyError(
        f"quadrature did not self-converge (last change {change:.3g} > tol {quad.tol:.1g})",
        estimate=est,
        error=change,
    )
