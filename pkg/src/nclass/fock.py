"""Truncated Fock-basis states, channels and phase-space functions.

All states live on the span of |0>, ..., |dim-1>. Every constructor records
``tail_mass``, the probability weight that the truncation discards, and
refuses to build a state whose tail exceeds ``tol`` (1e-8 by default).

Quadrature convention: x_phi = a e^{-i phi} + a^dag e^{i phi}, so the vacuum
has unit quadrature variance.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln, xlogy

from .errors import DimensionError, DomainError, NumericalNegativityError, RangeError, TruncationError
from .quadrature import QuadConfig, fourier_integral, polar_rule, self_converged
from .special import displacement_bands

DEFAULT_TAIL_TOL = 1e-8
NEGATIVITY_CLAMP = 1e-12
# largest |beta| with exp(|beta|^2/2) finite in double precision
MAX_CHAR_RADIUS = math.sqrt(2.0 * 709.0)


def as_point(z):
    """Coerce to a finite complex phase-space point."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"phase-space point must be finite, got {z!r}")
    return z


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Density matrix in a truncated Fock basis.

    ``elements`` is Hermitised on construction, so element (m, n) is exactly
    the conjugate of element (n, m).
    """

    elements: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        m = np.array(self.elements, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionError(f"density matrix must be square and non-empty, got shape {m.shape}")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "elements", m)
        if not self.tail_mass >= 0:
            raise DomainError("tail_mass must be >= 0")
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    @property
    def dim(self):
        return self.elements.shape[0]

    @property
    def trace(self):
        return float(np.trace(self.elements).real)

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.elements)[0])

    def is_diagonal(self):
        m = self.elements
        return not np.any(m - np.diag(np.diag(m)))

    def normalized(self):
        return DensityMatrix(self.elements / self.trace, self.tail_mass)


@dataclass(frozen=True)
class PhotonStatistics:
    """Photon-number probabilities p_0 .. p_{dim-1}.

    The deficit 1 - sum(probs) is the truncation tail (up to rounding).
    """

    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if np.any(p < 0) or np.any(p > 1 + 1e-12) or p.sum() > 1 + 1e-12:
            raise DomainError("photon statistics must be probabilities with sum <= 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return len(self.probs)

    def mean(self):
        return float(np.dot(np.arange(len(self.probs)), self.probs))

    def moment(self, k):
        return float(np.dot(np.arange(len(self.probs), dtype=float) ** k, self.probs))


def _check_tail(tail, tol, what):
    if tail > tol:
        raise TruncationError(f"{what}: truncation tail {tail:.3g} exceeds tolerance {tol:.1g}", tail_mass=tail)


def _check_eta(eta):
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"efficiency eta must lie in [0, 1], got {eta}")


def make_fock(n, dim):
    if n < 0:
        raise DomainError("photon number must be non-negative")
    if n >= dim:
        raise DimensionError(f"Fock state |{n}> does not fit in dimension {dim}")
    m = np.zeros((dim, dim))
    m[n, n] = 1.0
    return DensityMatrix(m)


def make_vacuum(dim):
    return make_fock(0, dim)


def coherent_amplitudes(alpha, dim):
    """Fock amplitudes exp(-|a|^2/2) a^n / sqrt(n!) for n < dim."""
    alpha = as_point(alpha)
    n = np.arange(dim)
    if alpha == 0:
        c = np.zeros(dim, dtype=complex)
        c[0] = 1.0
        return c
    x = abs(alpha) ** 2
    mod = np.exp(-0.5 * x + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1.0))
    return mod * np.exp(1j * n * cmath.phase(alpha))


def make_coherent(alpha, dim, tol=DEFAULT_TAIL_TOL):
    alpha = as_point(alpha)
    tail = float(gammainc(dim, abs(alpha) ** 2)) if alpha != 0 else 0.0
    _check_tail(tail, tol, f"coherent state alpha={alpha}")
    c = coherent_amplitudes(alpha, dim)
    c /= np.linalg.norm(c)
    return DensityMatrix(np.outer(c, c.conj()), tail)


def _geometric(nbar, dim):
    q = nbar / (1.0 + nbar)
    p = (1.0 - q) * q ** np.arange(dim)
    return q, p


def make_thermal(nbar, dim, tol=DEFAULT_TAIL_TOL):
    if not nbar >= 0:
        raise DomainError(f"mean photon number must be >= 0, got {nbar}")
    q, p = _geometric(nbar, dim)
    tail = q**dim
    _check_tail(tail, tol, f"thermal state nbar={nbar}")
    return DensityMatrix(np.diag(p / p.sum()), tail)


def creation(dim):
    """Truncated creation operator a^dag."""
    return np.diag(np.sqrt(np.arange(1, dim)), -1)


def make_spats(nbar, eta, dim, tol=DEFAULT_TAIL_TOL):
    """Single-photon-added thermal state a^dag rho_th a / Tr, then loss eta.

    The loss acts after the photon addition (detection efficiency).
    """
    if not nbar >= 0:
        raise DomainError(f"mean photon number must be >= 0, got {nbar}")
    _check_eta(eta)
    if dim < 2:
        raise DimensionError("photon-added state needs dim >= 2")
    q, p = _geometric(nbar, dim)
    # weight of n >= dim in n q^(n-1) (1-q)^2
    tail = q ** (dim - 1) * (dim * (1.0 - q) + q)
    _check_tail(tail, tol, f"SPATS nbar={nbar}")
    ad = creation(dim)
    added = ad @ np.diag(p) @ ad.T
    rho = DensityMatrix(added / np.trace(added), tail)
    return apply_loss(rho, eta)


def mix(states, weights):
    """Convex mixture of states of equal dimension."""
    states = list(states)
    weights = np.asarray(weights, dtype=float)
    if len(states) != len(weights) or len(states) == 0:
        raise DomainError("need one weight per state")
    if np.any(weights < 0) or not math.isclose(weights.sum(), 1.0, rel_tol=0, abs_tol=1e-12):
        raise DomainError("mixture weights must be non-negative and sum to 1")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimensionError(f"cannot mix states of dimensions {sorted(dims)}")
    m = sum(wt * s.elements for wt, s in zip(weights, states))
    tail = float(sum(wt * s.tail_mass for wt, s in zip(weights, states)))
    return DensityMatrix(m, tail)


def loss_amplitudes(eta, dim):
    """A[n, k] = sqrt(C(n, k) eta^(n-k) (1-eta)^k), zero for k > n."""
    n = np.arange(dim)[:, None].astype(float)
    k = np.arange(dim)[None, :].astype(float)
    valid = k <= n
    nk = np.where(valid, n - k, 0.0)
    logc = gammaln(n + 1) - gammaln(k + 1) - gammaln(nk + 1)
    loga = 0.5 * (logc + xlogy(nk, eta) + xlogy(k, 1.0 - eta))
    return np.where(valid, np.exp(loga), 0.0)


def apply_loss(rho, eta):
    """Pure-loss channel (beam splitter of transmissivity eta, vacuum input).

    Kraus form K_k |n> = A[n, k] |n-k>, valid for non-diagonal states.
    """
    _check_eta(eta)
    if eta == 1.0:
        return DensityMatrix(rho.elements, rho.tail_mass)
    dim = rho.dim
    amp = loss_amplitudes(eta, dim)
    src = rho.elements
    out = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        a = amp[k:, k]
        out[: dim - k, : dim - k] += np.outer(a, a) * src[k:, k:]
    return DensityMatrix(out, rho.tail_mass)


def displacement_matrix(alpha, dim):
    """Truncated displacement operator D(alpha) = exp(alpha a^dag - alpha* a).

    D[m, n] = sqrt(n!/m!) alpha^(m-n) exp(-|alpha|^2/2) L_n^(m-n)(|alpha|^2)
    for m >= n, and D[n, m] = (-conj(phase))^(m-n) |D[m, n]| otherwise.
    """
    alpha = as_point(alpha)
    r = abs(alpha)
    phase = cmath.exp(1j * cmath.phase(alpha)) if r > 0 else 1.0
    ks = np.arange(dim)
    h = displacement_bands([r], ks, dim)[:, :, 0]
    d = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        band = h[k, : dim - k]
        idx = np.arange(dim - k)
        d[idx + k, idx] = phase**k * band
        if k:
            d[idx, idx + k] = (-np.conj(phase)) ** k * band
    return d


def displace_state(rho, alpha, tol=DEFAULT_TAIL_TOL):
    """D(alpha) rho D(alpha)^dag within the truncated space.

    Probability pushed above the truncation is measured exactly (trace
    deficit) and added to ``tail_mass``; the result is not renormalised.
    """
    alpha = as_point(alpha)
    if alpha == 0:
        return DensityMatrix(rho.elements, rho.tail_mass)
    d = displacement_matrix(alpha, rho.dim)
    out = d @ rho.elements @ d.conj().T
    leaked = max(rho.trace - float(np.trace(out).real), 0.0)
    tail = rho.tail_mass + leaked
    _check_tail(tail, tol, f"displacement by {alpha}")
    return DensityMatrix(out, tail)


def photon_statistics(rho):
    diag = np.diag(rho.elements).real.copy()
    worst = diag.min()
    if worst < -NEGATIVITY_CLAMP:
        raise NumericalNegativityError(f"diagonal element {worst:.3g} is negative beyond roundoff")
    diag[diag < 0] = 0.0
    return PhotonStatistics(np.minimum(diag, 1.0), rho.tail_mass)


# --- characteristic functions ------------------------------------------------


def char_bands(rho, radii):
    """Angular bands of Tr{rho D(beta)} on a set of radii.

    Returns (ks, F) with F[i, j] = sum_n rho[n, n+k] h_{n,k}(r_j), k = ks[i] >= 0.
    Then Tr{rho D(r e^{i t})} = sum_k F_k e^{ikt} + sum_{k>0} (-1)^k conj(F_k) e^{-ikt}.
    Bands on which rho vanishes identically are skipped.
    """
    m = rho.elements
    dim = rho.dim
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    ks = [k for k in range(dim) if np.any(np.diagonal(m, k))]
    if not ks:
        ks = [0]
    ks = np.array(ks)
    out = np.zeros((len(ks), len(radii)), dtype=complex)
    for start in range(0, len(ks), 32):
        block = ks[start:start + 32]
        n_max = dim - int(block.min())
        h = displacement_bands(radii, block, n_max)
        for i, k in enumerate(block):
            diag = np.diagonal(m, k)
            out[start + i] = diag @ h[i, : dim - k, :]
    return ks, out


def _bands_on_angles(ks, bands, angles):
    e = np.exp(1j * np.outer(ks, angles))
    total = bands.T @ e
    pos = ks > 0
    if np.any(pos):
        sign = np.where(ks[pos] % 2 == 0, 1.0, -1.0)
        total += (np.conj(bands[pos]) * sign[:, None]).T @ np.conj(e[pos])
    return total


def symmetric_char(rho, betas):
    """Tr{rho D(beta)} for an array of beta (the symmetric characteristic function)."""
    betas = np.asarray(betas, dtype=complex)
    flat = betas.ravel()
    r = np.abs(flat)
    ks, bands = char_bands(rho, r)
    e = np.exp(1j * np.outer(ks, np.angle(flat)))
    total = np.sum(bands * e, axis=0)
    pos = ks > 0
    if np.any(pos):
        sign = np.where(ks[pos] % 2 == 0, 1.0, -1.0)[:, None]
        total += np.sum(sign * np.conj(bands[pos]) * np.conj(e[pos]), axis=0)
    return total.reshape(betas.shape)


def symmetric_char_on_rule(rho, rule):
    ks, bands = char_bands(rho, rule.radii)
    return _bands_on_angles(ks, bands, rule.angles)


def char_function(rho, beta):
    """Normally ordered characteristic function Tr{rho e^{beta a^dag} e^{-beta* a}}.

    Evaluated as exp(|beta|^2/2) Tr{rho D(beta)}. Accepts a scalar or array.
    """
    betas = np.asarray(beta, dtype=complex)
    rmax = float(np.max(np.abs(betas))) if betas.size else 0.0
    if rmax > MAX_CHAR_RADIUS:
        raise RangeError(
            f"|beta| = {rmax:.4g} overflows exp(|beta|^2/2); max usable |beta| is {MAX_CHAR_RADIUS:.4g}",
            max_usable=MAX_CHAR_RADIUS,
        )
    val = np.exp(0.5 * np.abs(betas) ** 2) * symmetric_char(rho, betas)
    if betas.ndim == 0:
        return complex(val)
    return val


def char_radius(rho, floor=1e-15):
    """Radius beyond which |Tr{rho D(beta)}| stays below ``floor``."""
    p = np.diag(rho.elements).real
    populated = np.nonzero(p > 1e-18)[0]
    n_top = int(populated[-1]) if len(populated) else rho.dim - 1
    r_probe = math.sqrt(4.0 * n_top + 4.0) + 12.0
    radii = np.linspace(0.0, r_probe, 400)
    ks, bands = char_bands(rho, radii)
    envelope = np.abs(bands[0]) + 2.0 * np.sum(np.abs(bands[1:]), axis=0)
    above = np.nonzero(envelope >= floor)[0]
    if len(above) == 0:
        return radii[1]
    last = int(above[-1])
    return float(radii[min(last + 1, len(radii) - 1)])


def _angular_nodes(base, kmax, alpha_max, radius):
    need = 2 * kmax + 4.0 * alpha_max * radius + 64
    n = max(base, int(math.ceil(need / 8.0)) * 8)
    return n


def wigner_grid(rho, alphas, quad=None):
    """Wigner function W(alpha) = (1/pi^2) int d^2beta Tr{rho D(beta)} e^{alpha beta* - alpha* beta}.

    Polar quadrature (Gauss-Legendre radial x trapezoid angular) out to the
    radius where the symmetric characteristic function has decayed below
    1e-15; refined until doubling the orders changes no value by more than
    ``quad.tol``. Returns a real array shaped like ``alphas``.
    """
    quad = quad or QuadConfig(radial=96, angular=128, tol=1e-8)
    alphas = np.asarray(alphas, dtype=complex)
    flat = alphas.ravel()
    radius = char_radius(rho)
    kmax = max(k for k in range(rho.dim) if np.any(np.diagonal(rho.elements, k))) if rho.dim else 0
    amax = float(np.max(np.abs(flat))) if flat.size else 0.0

    def compute(q):
        rule = polar_rule([0.0, radius], q.radial, _angular_nodes(q.angular, kmax, amax, radius))
        chi = symmetric_char_on_rule(rho, rule)
        return fourier_integral(rule, chi, flat) / math.pi**2

    vals, _ = self_converged(compute, quad)
    resid = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
    if resid > 1e-8:
        from .errors import SymmetryError

        raise SymmetryError(f"Wigner imaginary residue {resid:.3g} exceeds 1e-8")
    return vals.real.reshape(alphas.shape)


def wigner(rho, alpha, quad=None):
    return float(wigner_grid(rho, np.array([as_point(alpha)]), quad)[0])


def annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1)
