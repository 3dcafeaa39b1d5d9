"""Hamiltonians and dressed states of a trapped Lambda atom under EIT cooling.

All frequencies are angular, in rad/us; time is in us.  Values quoted in
"2 pi MHz" go through :meth:`ModelParams.from_mhz`.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .fockspace import (TruncatedSpace, annihilation_op, displacement_op,
                        el_op, embed, number_op)

TWO_PI = 2 * np.pi
RESONANCE_TOL = 0.05
PAIR_OVERLAP_MIN = 0.5


class ResonanceWarning(UserWarning):
    """The two-photon resonance (Omega - Delta)/2 = omega is badly violated."""


class TwoStateBreakdownError(ValueError):
    """No eigenvector pair of the full Hamiltonian matches the requested LZ pair."""


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the trapped atom (angular units, rad/us).

    Attributes
    ----------
    g1, g2 : float
        Rabi frequencies of the strong and weak laser.
    delta : float
        Common detuning of both lasers, must be positive.
    gamma : float
        Spontaneous emission rate of level |3>.
    omega : float
        Trap frequency.
    eta : float
        Lamb-Dicke parameter.
    n_max : int
        Highest retained vibrational level.
    """

    g1: float
    g2: float
    delta: float
    gamma: float
    omega: float
    eta: float
    n_max: int = 15

    def __post_init__(self):
        for name in ("g1", "g2", "gamma", "omega", "eta"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        TruncatedSpace(self.n_max)

    @classmethod
    def from_mhz(cls, g1, g2, delta, gamma, omega, eta, n_max=15) -> "ModelParams":
        """Build from frequencies given in units of 2 pi MHz."""
        return cls(g1=TWO_PI * g1, g2=TWO_PI * g2, delta=TWO_PI * delta,
                   gamma=TWO_PI * gamma, omega=TWO_PI * omega, eta=eta,
                   n_max=int(n_max))

    @property
    def space(self) -> TruncatedSpace:
        return TruncatedSpace(self.n_max)

    @property
    def rabi(self) -> float:
        """Generalized Rabi frequency sqrt(g1^2 + g2^2 + delta^2)."""
        return float(np.sqrt(self.g1 ** 2 + self.g2 ** 2 + self.delta ** 2))

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def cooling_params(gamma_mhz: float = 0.0, g1_over_g2: float = 10.0,
                   eta: float = 0.1, n_max: int = 15) -> ModelParams:
    """Cooling parameters g1 = 1.34, omega = 0.03, Delta = 15 (2 pi MHz)."""
    return ModelParams.from_mhz(g1=1.34, g2=1.34 / g1_over_g2, delta=15.0,
                                gamma=gamma_mhz, omega=0.03, eta=eta, n_max=n_max)


@dataclass(frozen=True)
class DressedBasis:
    """Eigenbasis of the electronic Hamiltonian including both lasers.

    ``vectors[:, i]`` is |phi_{i+1}> in the bare basis (|1>, |2>, |3>).
    Energies are complex when a decay width is included.
    """

    energies: np.ndarray
    vectors: np.ndarray
    rabi: complex

    def state(self, i: int) -> np.ndarray:
        return self.vectors[:, i - 1]


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = np.argmax(np.abs(v))
    return v * (abs(v[k]) / v[k])


def dressed_states(g1: float, g2: float, delta: float, gamma: float = 0.0) -> DressedBasis:
    """Closed-form dressed states of ``H_el + H_int`` at eta = 0.

    With ``gamma > 0`` the excited level carries the width ``-i gamma/2`` and the
    energies become complex (eigenstates of the effective Hamiltonian).  The
    largest-magnitude component of every vector is made real positive.  For
    ``g1 = g2 = 0`` the bare basis (|1>, |2>, |3>) is returned.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if g1 == 0 and g2 == 0:
        energies = np.array([delta, delta, -0.5j * gamma])
        return DressedBasis(energies, np.eye(3, dtype=complex), complex(delta + 0.5j * gamma))

    g_sq = g1 ** 2 + g2 ** 2
    big = np.sqrt(complex(delta + 0.5j * gamma) ** 2 + g_sq)
    centre = 0.5 * (delta - 0.5j * gamma)
    e1, e3 = centre + 0.5 * big, centre - 0.5 * big
    if gamma == 0:
        e1, e3, big = e1.real, e3.real, big.real

    def bright(e):
        v = np.array([g1, g2, 2 * (e - delta)], dtype=complex)
        return v / np.sqrt(g_sq + 4 * abs(e - delta) ** 2)

    phi2 = np.array([-g2, g1, 0.0], dtype=complex) / np.sqrt(g_sq)
    vectors = np.column_stack([_fix_phase(bright(e1)), _fix_phase(phi2), _fix_phase(bright(e3))])
    energies = np.array([e1, delta, e3], dtype=complex if gamma else float)
    return DressedBasis(energies, vectors, big)


def dressed_product(basis: DressedBasis, i: int, n: int, space: TruncatedSpace) -> np.ndarray:
    """State vector |phi_i, n> on the composite space."""
    return np.kron(basis.state(i), space.fock(n))


@lru_cache(maxsize=32)
def _hamiltonian_parts(params: ModelParams):
    sp = params.space
    a = annihilation_op(sp)
    vib_id = np.eye(sp.dim_vib)
    free = (params.omega * embed(np.eye(3), number_op(sp), sp)
            + params.delta * embed(el_op(1, 1) + el_op(2, 2), vib_id, sp))
    d_plus = displacement_op(params.eta, 1, sp)
    d_minus = displacement_op(params.eta, -1, sp)
    up = (0.5 * params.g1 * embed(el_op(3, 1), d_plus, sp)
          + 0.5 * params.g2 * embed(el_op(3, 2), d_minus, sp))
    coupling = up + up.conj().T
    for m in (free, coupling):
        m.setflags(write=False)
    return free, coupling, a


def hamiltonian_total(params: ModelParams, lam: float = 1.0) -> np.ndarray:
    """``H = omega a^dag a + Delta(|1><1| + |2><2|) + lam * H_int`` with recoil kicks."""
    if lam < 0:
        raise ValueError("lam must be non-negative")
    free, coupling, _ = _hamiltonian_parts(params)
    return free + lam * coupling


def first_order_interaction(params: ModelParams, lam: float = 1.0) -> np.ndarray:
    """Part of the laser coupling linear in eta (Hermitian)."""
    sp = params.space
    a = annihilation_op(sp)
    g1, g2 = lam * params.g1, lam * params.g2
    el = (g1 * el_op(3, 1) - g1 * el_op(1, 3) - g2 * el_op(3, 2) + g2 * el_op(2, 3))
    return 0.5j * params.eta * embed(el, a + a.conj().T, sp)


def resonance_mismatch(params: ModelParams) -> float:
    """Relative violation ``|(Omega - Delta)/2 - omega| / omega``."""
    return abs(0.5 * (params.rabi - params.delta) - params.omega) / params.omega


def lz_matrix_element(params: ModelParams, n: int) -> complex:
    """``<phi_1, n-1| H1 |phi_2, n>`` evaluated exactly on the truncated space."""
    sp = params.space
    basis = dressed_states(params.g1, params.g2, params.delta)
    bra = dressed_product(basis, 1, n - 1, sp)
    ket = dressed_product(basis, 2, n, sp)
    return complex(bra.conj() @ first_order_interaction(params) @ ket)


def lz_gap(params: ModelParams, n: int, method: str = "perturbative") -> float:
    """Energy gap of the avoided crossing between |phi_1, n-1> and |phi_2, n>.

    ``perturbative`` returns ``eta sqrt(n) g1 g2 / Delta``.  ``exact``
    diagonalizes the full Hamiltonian and takes the two eigenvectors carrying
    the largest weight on the pair; each must hold at least half its norm there.
    """
    if not 1 <= n <= params.n_max - 1:
        raise ValueError(f"n must lie in 1..{params.n_max - 1}")
    if resonance_mismatch(params) > RESONANCE_TOL:
        warnings.warn(f"two-photon resonance violated by {resonance_mismatch(params):.1%}",
                      ResonanceWarning, stacklevel=2)
    if method == "perturbative":
        return params.eta * np.sqrt(n) * params.g1 * params.g2 / params.delta
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")

    sp = params.space
    basis = dressed_states(params.g1, params.g2, params.delta)
    pair = np.column_stack([dressed_product(basis, 1, n - 1, sp),
                            dressed_product(basis, 2, n, sp)])
    energies, vecs = np.linalg.eigh(hamiltonian_total(params))
    weight = np.sum(np.abs(pair.conj().T @ vecs) ** 2, axis=0)
    top = np.argsort(weight)[-2:]
    if weight[top].min() < PAIR_OVERLAP_MIN:
        raise TwoStateBreakdownError(
            f"pair (phi1,{n - 1})/(phi2,{n}) not isolated: weights {weight[top].round(3)}")
    return float(abs(energies[top[1]] - energies[top[0]]))


def effective_hamiltonian(params: ModelParams, lam: float = 1.0, recoil: bool = False) -> np.ndarray:
    """Non-Hermitian ``H - i gamma/2 |3><3|``.

    By default the laser coupling is taken at eta = 0; ``recoil=True`` keeps the
    full eta-dependent coupling.
    """
    p = params if recoil else params.replace(eta=0.0)
    sp = params.space
    return hamiltonian_total(p, lam) - 0.5j * params.gamma * embed(el_op(3, 3), np.eye(sp.dim_vib), sp)


def dressed_width_gamma1(params: ModelParams) -> float:
    """Approximate decay width of |phi_1>, (Gamma/4)(g1^2+g2^2)/(Delta^2+(Gamma/2)^2)."""
    p = params
    return 0.25 * p.gamma * (p.g1 ** 2 + p.g2 ** 2) / (p.delta ** 2 + (0.5 * p.gamma) ** 2)


def stationary_negativity(params: ModelParams) -> float:
    """Small-Gamma negativity of the perturbed ground state, eta g1 g2 / (4 omega Delta)."""
    p = params
    if p.omega <= 0:
        raise ValueError("omega must be positive")
    return p.eta * p.g1 * p.g2 / (4 * p.omega * p.delta)
