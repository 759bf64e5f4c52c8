"""Nonclassicality-filtered P function by direct phase-space quadrature.

P_w(alpha) = (1/pi^2) int d^2beta Phi(beta) Omega_w(beta) exp(alpha beta* - alpha* beta),
with Phi the normally ordered characteristic function. This is the route
independent of the Fock-basis witness series.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SymmetryError
from .filters import GridConfig, disc_family
from .fock import _angular_nodes, as_point, symmetric_char_on_rule
from .quadrature import QuadConfig, fourier_integral, pmap, polar_rule, self_converged

IMAG_TOL = 1e-7


def _kmax(rho):
    m = rho.elements
    return max((k for k in range(rho.dim) if np.any(np.diagonal(m, k))), default=0)


def nfp_values(rho, w, alphas, family=None, quad=None):
    """P_w at every alpha in ``alphas``. Returns (real values, quadrature report).

    The characteristic function and filter are evaluated once per
    quadrature level and shared across all alphas.
    """
    family = family or disc_family(normalized=True)
    quad = quad or QuadConfig()
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    flat = alphas.ravel()
    radius = family.radius * w
    amax = float(np.max(np.abs(flat))) if flat.size else 0.0
    kmax = _kmax(rho)
    edges = family.breakpoints(w)

    def compute(q):
        rule = polar_rule(edges, q.radial, _angular_nodes(q.angular, kmax, amax, radius))
        integrand = (
            np.exp(0.5 * rule.radii**2)[:, None] * symmetric_char_on_rule(rho, rule) * family(rule.points, w)
        )
        chunks = [flat[i:i + 16] for i in range(0, len(flat), 16)]
        parts = pmap(lambda block: fourier_integral(rule, integrand, block), chunks)
        return (np.concatenate(parts) if parts else np.zeros(0, complex)) / math.pi**2

    vals, report = self_converged(compute, quad)
    resid = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
    report["imag_residue"] = resid
    if resid > IMAG_TOL:
        raise SymmetryError(f"imaginary residue {resid:.3g} exceeds {IMAG_TOL:g}")
    return vals.real.reshape(alphas.shape), report


def nfp_point(rho, w, alpha=0j, family=None, quad=None):
    """P_w(alpha) for one displacement; default filter is the normalised disc family."""
    vals, _ = nfp_values(rho, w, np.array([as_point(alpha)]), family, quad)
    return float(vals[0])


@dataclass
class NfpGrid:
    alphas: np.ndarray
    values: np.ndarray
    w: float
    quad_report: dict = field(default_factory=dict)

    @property
    def argmin(self):
        i = np.unravel_index(int(np.argmin(self.values)), self.values.shape)
        return complex(self.alphas[i])

    @property
    def minimum(self):
        return float(np.min(self.values))

    @property
    def argmax(self):
        i = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return complex(self.alphas[i])


def nfp_grid(rho, w, grid=GridConfig(), family=None, quad=None):
    alphas = grid.alphas()
    vals, report = nfp_values(rho, w, alphas, family, quad)
    return NfpGrid(alphas, vals, float(w), report)
