import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.stats import binom, poisson

from nclass.errors import (
    DimensionError,
    DomainError,
    NumericalNegativityError,
    RangeError,
    TruncationError,
)
from nclass.fock import (
    DensityMatrix,
    annihilation,
    apply_loss,
    char_function,
    creation,
    displace_state,
    displacement_matrix,
    make_coherent,
    make_fock,
    make_spats,
    make_thermal,
    make_vacuum,
    mix,
    photon_statistics,
    wigner,
    wigner_grid,
)

points = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def assert_valid(rho):
    m = rho.elements
    assert np.array_equal(m, m.conj().T)
    assert rho.trace == pytest.approx(1.0, abs=1e-12)
    assert rho.min_eigenvalue() >= -1e-10


def test_make_fock():
    assert np.array_equal(make_fock(0, 4).elements, np.diag([1, 0, 0, 0]))
    assert np.array_equal(make_fock(2, 4).elements, np.diag([0, 0, 1, 0]))
    with pytest.raises(DimensionError):
        make_fock(5, 4)


def test_make_coherent():
    assert np.allclose(make_coherent(0, 6).elements, make_vacuum(6).elements)
    p = photon_statistics(make_coherent(1.0, 32)).probs
    assert np.allclose(p, poisson.pmf(np.arange(32), 1.0), atol=1e-12)
    with pytest.raises(TruncationError) as exc:
        make_coherent(10, 16)
    assert exc.value.tail_mass > 0.9


def test_make_thermal():
    assert np.allclose(make_thermal(0, 5).elements, make_vacuum(5).elements)
    rho = make_thermal(1.0, 128)
    p = photon_statistics(rho).probs
    assert p[0] == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(p[1:] / p[:-1], 0.5)
    with pytest.raises(DomainError):
        make_thermal(-0.5, 8)


def test_make_spats_lossless():
    p = photon_statistics(make_spats(1.0, 1.0, 128)).probs
    n = np.arange(128)
    oracle = n * 1.0 ** np.maximum(n - 1, 0) / 2.0 ** (n + 1)
    assert p[0] == 0.0
    assert p[1] == pytest.approx(0.25, abs=1e-14)
    assert np.allclose(p, oracle, atol=1e-14)


def test_make_spats_matches_explicit_construction():
    dim = 40
    th = make_thermal(0.7, dim).elements
    ad = creation(dim)
    m = ad @ th @ ad.conj().T
    m /= np.trace(m)
    assert np.allclose(make_spats(0.7, 1.0, dim).elements, m, atol=1e-15)


def test_make_spats_lossy():
    rho = make_spats(1.0, 0.5, 128)
    stats = photon_statistics(rho)
    assert stats.probs[0] > 0
    assert stats.probs.sum() == pytest.approx(1.0 - stats.tail_mass, abs=1e-12)
    assert rho.is_diagonal()
    # binomial downconversion oracle
    pin = photon_statistics(make_spats(1.0, 1.0, 128)).probs
    pout = np.array([sum(binom.pmf(m, n, 0.5) * pin[n] for n in range(m, 128)) for m in range(128)])
    assert np.allclose(stats.probs, pout, atol=1e-14)
    with pytest.raises(DomainError):
        make_spats(1.0, 1.5, 16)


def test_constructors_are_valid_states():
    for rho in (make_fock(3, 8), make_coherent(1 - 0.5j, 40), make_thermal(2.0, 120), make_spats(0.8, 0.5, 128)):
        assert_valid(rho)


def test_loss_identity_and_single_photon():
    rho = make_coherent(0.4 + 0.3j, 24)
    assert np.allclose(apply_loss(rho, 1.0).elements, rho.elements, atol=1e-14)
    out = apply_loss(make_fock(1, 4), 0.5)
    assert np.allclose(out.elements, np.diag([0.5, 0.5, 0, 0]), atol=1e-15)
    with pytest.raises(DomainError):
        apply_loss(rho, -0.1)


def test_loss_thins_coherent_states():
    alpha, eta = 1.2 - 0.7j, 0.35
    out = apply_loss(make_coherent(alpha, 48), eta)
    assert np.allclose(out.elements, make_coherent(math.sqrt(eta) * alpha, 48).elements, atol=1e-10)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_loss_preserves_trace_and_commutes_with_mixing(eta, lam, mu):
    a, b = make_coherent(0.8j, 30), make_spats(mu, 1.0, 30, tol=1e-3)
    mixed = mix([a, b], [lam, 1 - lam])
    lhs = apply_loss(mixed, eta)
    rhs = mix([apply_loss(a, eta), apply_loss(b, eta)], [lam, 1 - lam])
    assert lhs.trace == pytest.approx(mixed.trace, abs=1e-12)
    assert np.allclose(lhs.elements, rhs.elements, atol=1e-14)


def test_displacement_matrix_matches_expm():
    dim = 80
    alpha = 0.9 - 1.3j
    a = annihilation(dim)
    full = expm(alpha * a.T - np.conj(alpha) * a)
    d = displacement_matrix(alpha, dim)
    # exponentiating the truncated generator is only exact away from the cut
    assert np.max(np.abs(d[:40, :40] - full[:40, :40])) < 1e-12


def test_displace_state():
    rho = make_thermal(0.5, 32)
    assert np.array_equal(displace_state(rho, 0).elements, rho.elements)
    p = photon_statistics(displace_state(make_vacuum(64), 1.5 + 1j)).probs
    assert np.allclose(p, poisson.pmf(np.arange(64), abs(1.5 + 1j) ** 2), atol=1e-10)
    rho = make_spats(0.8, 0.5, 96)
    back = displace_state(displace_state(rho, 0.7 - 0.2j), -0.7 + 0.2j)
    assert np.allclose(back.elements, rho.elements, atol=1e-9)
    with pytest.raises(TruncationError):
        displace_state(make_vacuum(16), 4.0)


@given(points)
def test_displace_state_preserves_spectrum(alpha):
    rho = mix([make_fock(1, 60), make_thermal(0.3, 60)], [0.6, 0.4])
    out = displace_state(rho, alpha)
    assert out.tail_mass < 1e-10
    assert np.allclose(np.linalg.eigvalsh(out.elements), np.linalg.eigvalsh(rho.elements), atol=1e-8)


def test_photon_statistics_clamping():
    m = np.diag([1.0 + 5e-13, -5e-13, 0.0])
    assert photon_statistics(DensityMatrix(m)).probs[1] == 0.0
    with pytest.raises(NumericalNegativityError):
        photon_statistics(DensityMatrix(np.diag([1.0, -1e-9, 0.0])))
    assert np.array_equal(photon_statistics(make_vacuum(4)).probs, [1, 0, 0, 0])
    assert photon_statistics(make_spats(1, 1, 64)).probs[0] == 0


def test_density_matrix_validation():
    with pytest.raises(DimensionError):
        DensityMatrix(np.zeros((2, 3)))
    rho = DensityMatrix(np.array([[0.5, 0.2j], [0.1j, 0.5]]))
    assert rho.elements[0, 1] == np.conj(rho.elements[1, 0])
    with pytest.raises(ValueError):
        rho.elements[0, 0] = 2


def test_char_function_at_origin_and_closed_forms():
    for rho in (make_fock(2, 8), make_spats(0.8, 0.5, 64)):
        assert char_function(rho, 0) == pytest.approx(1.0, abs=1e-14)
    alpha = 0.6 + 0.4j
    coh = make_coherent(alpha, 48)
    th = make_thermal(0.7, 160)
    betas = np.array([0.3, -1.1j, 0.8 + 0.9j, 2.0 - 0.5j])
    assert np.allclose(char_function(coh, betas), np.exp(betas * np.conj(alpha) - np.conj(betas) * alpha), atol=1e-10)
    assert np.allclose(char_function(th, betas), np.exp(-0.7 * np.abs(betas) ** 2), atol=1e-9)


def test_char_function_spats_closed_form():
    nbar, eta = 0.8, 0.5
    rho = make_spats(nbar, eta, 128)
    b = np.linspace(0, 3, 31) * np.exp(0.7j)
    x = np.abs(b) ** 2
    oracle = (1 - eta * (1 + nbar) * x) * np.exp(-eta * nbar * x)
    assert np.allclose(char_function(rho, b), oracle, atol=1e-10)


def test_char_function_range_error():
    with pytest.raises(RangeError) as exc:
        char_function(make_vacuum(4), 50.0)
    assert exc.value.max_usable == pytest.approx(math.sqrt(1418))


@given(points)
def test_char_function_bounds(beta):
    rho = make_spats(0.5, 0.7, 64)
    assert abs(char_function(rho, beta)) <= math.exp(abs(beta) ** 2 / 2) + 1e-12
    assert char_function(rho, -beta) == pytest.approx(np.conj(char_function(rho, beta)), abs=1e-12)
    classical = mix([make_coherent(1.0, 48), make_coherent(-0.5j, 48), make_thermal(0.4, 48)], [0.3, 0.3, 0.4])
    assert abs(char_function(classical, beta)) <= 1 + 1e-10


def test_wigner_reference_values():
    assert wigner(make_vacuum(4), 0) == pytest.approx(2 / math.pi, abs=1e-8)
    assert wigner(make_fock(1, 4), 0) == pytest.approx(-2 / math.pi, abs=1e-6)


def test_wigner_fock_states_on_grid():
    from scipy.special import eval_laguerre

    alphas = np.array([0.0, 0.4, 0.3 + 0.8j, -1.2j, 1.5])
    for n in (1, 2, 4):
        got = wigner_grid(make_fock(n, 12), alphas)
        x = np.abs(alphas) ** 2
        oracle = 2 / math.pi * (-1) ** n * np.exp(-2 * x) * eval_laguerre(n, 4 * x)
        assert np.allclose(got, oracle, atol=1e-8)


def test_spats_wigner_nonnegative():
    axis = np.linspace(-3, 3, 13)
    grid = axis[:, None] + 1j * axis[None, :]
    assert wigner_grid(make_spats(0.8, 0.5, 128), grid).min() >= -1e-6
