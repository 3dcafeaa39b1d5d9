import warnings

import numpy as np
import pytest

from eitent import negativity
from eitent.atom_model import (ModelParams, ResonanceWarning,
                               TwoStateBreakdownError, dressed_product,
                               dressed_states, dressed_width_gamma1,
                               effective_hamiltonian, first_order_interaction,
                               hamiltonian_total, lz_gap, lz_matrix_element,
                               cooling_params, resonance_mismatch,
                               stationary_negativity)

TWO_PI = 2 * np.pi


@pytest.fixture
def cool():
    return cooling_params(0.0, n_max=12)


def closed_form_energies(g1, g2, delta):
    om = np.sqrt(g1 ** 2 + g2 ** 2 + delta ** 2)
    return np.array([(om + delta) / 2, delta, -(om - delta) / 2])


def test_params_from_mhz_and_validation():
    p = ModelParams.from_mhz(1.0, 0.5, 10.0, 0.2, 0.03, 0.1, n_max=5)
    assert p.g1 == pytest.approx(TWO_PI)
    assert p.gamma == pytest.approx(0.2 * TWO_PI)
    with pytest.raises(ValueError):
        ModelParams(1, 1, 0.0, 0, 1, 0.1)
    with pytest.raises(ValueError):
        ModelParams(1, 1, 1.0, -1, 1, 0.1)


def test_hamiltonian_lasers_off_spectrum():
    p = cooling_params(0.0, n_max=6).replace(eta=0.3)
    ev = np.sort(np.linalg.eigvalsh(hamiltonian_total(p, lam=0.0)))
    n = np.arange(7)
    expected = np.sort(np.concatenate([n * p.omega, p.delta + n * p.omega, p.delta + n * p.omega]))
    np.testing.assert_allclose(ev, expected, atol=1e-10)


def test_hamiltonian_eta_zero_matches_dressed_energies(cool):
    p = cool.replace(eta=0.0)
    ev = np.sort(np.linalg.eigvalsh(hamiltonian_total(p)))
    eps = closed_form_energies(p.g1, p.g2, p.delta)
    n = np.arange(p.n_max + 1)
    expected = np.sort((eps[:, None] + n[None, :] * p.omega).ravel())
    np.testing.assert_allclose(ev, expected, atol=1e-10)


@pytest.mark.parametrize("lam", [0.0, 0.4, 1.0, 1.7])
def test_hamiltonian_hermitian(cool, lam):
    h = hamiltonian_total(cool, lam)
    assert np.max(np.abs(h - h.conj().T)) < 1e-12


def test_dressed_states_closed_form_against_eigensolver(rng):
    for _ in range(10):
        g1, g2, delta = rng.uniform(0.1, 5, size=3)
        b = dressed_states(g1, g2, delta)
        h = np.array([[delta, 0, g1 / 2], [0, delta, g2 / 2], [g1 / 2, g2 / 2, 0]])
        np.testing.assert_allclose(np.sort(b.energies)[::-1], np.sort(np.linalg.eigvalsh(h))[::-1],
                                   atol=1e-12)
        np.testing.assert_allclose(h @ b.vectors, b.vectors * b.energies, atol=1e-12)
        np.testing.assert_allclose(b.vectors.conj().T @ b.vectors, np.eye(3), atol=1e-12)
        assert b.energies[0] >= b.energies[1] >= b.energies[2]
        assert b.rabi == pytest.approx(np.sqrt(g1 ** 2 + g2 ** 2 + delta ** 2))


def test_dressed_dark_state_without_weak_laser():
    b = dressed_states(2.0, 0.0, 10.0)
    np.testing.assert_allclose(b.state(2), [0, 1, 0], atol=1e-15)


def test_dressed_phase_convention(rng):
    b = dressed_states(*rng.uniform(0.1, 3, size=3))
    for i in range(3):
        v = b.vectors[:, i]
        k = np.argmax(np.abs(v))
        assert v[k].imag == 0 and v[k].real > 0


def test_dressed_degenerate_case():
    b = dressed_states(0.0, 0.0, 5.0)
    np.testing.assert_array_equal(b.vectors, np.eye(3))
    np.testing.assert_array_equal(b.energies, [5.0, 5.0, 0.0])


def test_resonance_condition_for_cooling_parameters(cool):
    b = dressed_states(cool.g1, cool.g2, cool.delta)
    stark = 0.5 * (b.rabi - cool.delta)
    assert abs(stark - cool.omega) / cool.omega < 0.01


def test_first_order_interaction_vanishes_at_eta_zero(cool):
    assert np.all(first_order_interaction(cool.replace(eta=0.0)) == 0)


def test_first_order_interaction_hermitian(cool):
    h1 = first_order_interaction(cool)
    np.testing.assert_allclose(h1, h1.conj().T, atol=1e-15)
    assert np.max(np.abs(h1 + h1.conj().T)) > 0


def test_first_order_interaction_taylor_remainder(cool):
    p = cool.replace(n_max=10)

    def remainder(eta):
        q = p.replace(eta=eta)
        full = hamiltonian_total(q) - hamiltonian_total(q, 0.0)
        zero = hamiltonian_total(q.replace(eta=0.0)) - hamiltonian_total(q.replace(eta=0.0), 0.0)
        return np.max(np.abs(full - zero - first_order_interaction(q)))

    ratio = remainder(0.02) / remainder(0.01)
    assert 3.8 < ratio < 4.2


@pytest.mark.parametrize("n", [1, 2, 4])
def test_lz_matrix_element_against_approximation(cool, n):
    assert cool.delta >= 10 * (cool.g1 + cool.g2)
    approx = -1j * cool.eta * np.sqrt(n) * cool.g1 * cool.g2 / (2 * cool.delta)
    exact = lz_matrix_element(cool, n)
    assert abs(exact - approx) / abs(approx) < 0.05


def test_lz_gap_perturbative_sqrt_scaling(cool):
    assert lz_gap(cool, 8, "perturbative") / lz_gap(cool, 2, "perturbative") == pytest.approx(2.0)


def test_lz_gap_exact_close_to_perturbative(cool):
    exact = lz_gap(cool, 3, "exact")
    pert = lz_gap(cool, 3, "perturbative")
    assert abs(exact - pert) / pert < 0.10


def test_lz_gap_table_units():
    # reference values in rad/us: perturbative 0.015 at n = 4, exact about 0.0126 at n = 3
    p = cooling_params(0.0, n_max=12)
    assert lz_gap(p, 4) == pytest.approx(0.015, rel=0.01)
    assert lz_gap(p, 3, "exact") == pytest.approx(0.0126, rel=0.05)


def test_lz_gap_exact_converges_on_detuning_ladder():
    base = cooling_params(0.0, n_max=10)
    errors = []
    for k in (1, 4, 16):
        g1, g2, delta = base.g1 * np.sqrt(k), base.g2 * np.sqrt(k), base.delta * k
        omega = 0.5 * (np.sqrt(g1 ** 2 + g2 ** 2 + delta ** 2) - delta)
        p = ModelParams(g1, g2, delta, 0.0, omega, base.eta, base.n_max)
        pert = lz_gap(p, 3)
        errors.append(abs(lz_gap(p, 3, "exact") - pert) / pert)
    assert errors[0] > errors[1] > errors[2]


def test_lz_gap_breakdown_without_detuning_hierarchy():
    # lasers comparable to the detuning and strong recoil: the pair mixes with its neighbours
    g1, g2, delta = 8.0, 6.0, 3.0
    omega = 0.5 * (np.sqrt(g1 ** 2 + g2 ** 2 + delta ** 2) - delta)
    with pytest.raises(TwoStateBreakdownError):
        lz_gap(ModelParams(g1, g2, delta, 0.0, omega, 1.2, 8), 3, "exact")


def test_lz_gap_resonance_warning(cool):
    with pytest.warns(ResonanceWarning):
        lz_gap(cool.replace(omega=2 * cool.omega), 3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        lz_gap(cool, 3)
    assert resonance_mismatch(cool) < 0.05


def test_lz_gap_range(cool):
    with pytest.raises(ValueError):
        lz_gap(cool, 0)
    with pytest.raises(ValueError):
        lz_gap(cool, cool.n_max)


def test_effective_hamiltonian_reduces_without_decay(cool):
    np.testing.assert_array_equal(effective_hamiltonian(cool),
                                  hamiltonian_total(cool.replace(eta=0.0)))


def test_effective_hamiltonian_complex_spectrum():
    p = cooling_params(6.0, n_max=5)
    ev = np.linalg.eigvals(effective_hamiltonian(p))
    g, d, gam = p.g1, p.delta, p.gamma
    root = np.sqrt((d + 0.5j * gam) ** 2 + g ** 2 + p.g2 ** 2)
    eps = [0.5 * (d - 0.5j * gam) + 0.5 * root, d, 0.5 * (d - 0.5j * gam) - 0.5 * root]
    expected = np.array([e + n * p.omega for e in eps for n in range(p.n_max + 1)])
    for e in expected:
        assert np.min(np.abs(ev - e)) < 1e-10
    assert np.all(ev.imag <= 1e-12)
    b = dressed_states(p.g1, p.g2, p.delta, p.gamma)
    np.testing.assert_allclose(b.energies, eps, atol=1e-12)
    h_el = np.array([[d, 0, g / 2], [0, d, p.g2 / 2], [g / 2, p.g2 / 2, -0.5j * gam]])
    np.testing.assert_allclose(h_el @ b.vectors, b.vectors * b.energies, atol=1e-10)


def test_effective_hamiltonian_recoil_variant(cool):
    p = cool.replace(gamma=1.0)
    heff = effective_hamiltonian(p, recoil=True)
    np.testing.assert_allclose(heff.real, hamiltonian_total(p).real)
    assert np.all(np.linalg.eigvals(heff).imag <= 1e-12)


def test_gamma1_formula():
    assert dressed_width_gamma1(cooling_params(0.0)) == 0.0
    # reference half width gamma1/2 at 100 kHz: 0.00063 rad/us
    assert 0.5 * dressed_width_gamma1(cooling_params(0.1)) == pytest.approx(0.00063, rel=0.01)


@pytest.mark.parametrize("gamma_mhz", [0.1, 0.6, 6.0])
def test_gamma1_against_complex_eigenvalue(gamma_mhz):
    p = cooling_params(gamma_mhz, n_max=3)
    b = dressed_states(p.g1, p.g2, p.delta, p.gamma)
    assert -2 * b.energies[0].imag == pytest.approx(dressed_width_gamma1(p), rel=0.05)


def test_stationary_negativity_values():
    assert stationary_negativity(cooling_params()) == pytest.approx(0.01, rel=0.01)
    assert stationary_negativity(cooling_params(eta=0.0)) == 0.0


def test_stationary_negativity_from_explicit_ground_state():
    p = cooling_params(0.0, n_max=4)
    b = dressed_states(p.g1, p.g2, p.delta)
    amp = -1j * p.eta * p.g1 * p.g2 / (2 * p.delta)
    chi = dressed_product(b, 2, 0, p.space) - amp / (2 * p.omega) * dressed_product(b, 1, 1, p.space)
    chi /= np.linalg.norm(chi)
    direct = negativity(np.outer(chi, chi.conj()))
    assert direct == pytest.approx(stationary_negativity(p), rel=0.05)


def test_monotone_in_weak_laser():
    g2s = np.linspace(0.05, 0.4, 8)
    neg = [stationary_negativity(cooling_params(0.6, g1_over_g2=1.34 / g)) for g in g2s]
    width = [dressed_width_gamma1(cooling_params(0.6, g1_over_g2=1.34 / g)) for g in g2s]
    assert np.all(np.diff(neg) > 0) and np.all(np.diff(width) > 0)
