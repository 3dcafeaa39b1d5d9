"""Truncated Hilbert space of a three-level atom in a harmonic trap.

Composite basis index convention (electronic-major)::

    i = e * dim_vib + n,   e in {0, 1, 2} for levels |1>, |2>, |3>

so a dense operator is a 3 x 3 grid of ``dim_vib x dim_vib`` blocks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIM_EL = 3


@dataclass(frozen=True)
class TruncatedSpace:
    """Three electronic levels times vibrational levels ``0..n_max``."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def dim_el(self) -> int:
        return DIM_EL

    @property
    def dim_vib(self) -> int:
        return self.n_max + 1

    @property
    def dim_total(self) -> int:
        return DIM_EL * self.dim_vib

    def index(self, level: int, n: int) -> int:
        """Composite index of ``|level, n>`` with ``level`` in {1, 2, 3}."""
        if level not in (1, 2, 3):
            raise ValueError(f"electronic level must be 1, 2 or 3, got {level}")
        if not 0 <= n <= self.n_max:
            raise ValueError(f"vibrational level {n} outside 0..{self.n_max}")
        return (level - 1) * self.dim_vib + n

    def label(self, i: int) -> str:
        e, n = divmod(i, self.dim_vib)
        return f"e{e + 1}:n{n}"

    def basis(self, level: int, n: int) -> np.ndarray:
        v = np.zeros(self.dim_total, dtype=complex)
        v[self.index(level, n)] = 1.0
        return v

    def fock(self, n: int) -> np.ndarray:
        if not 0 <= n <= self.n_max:
            raise ValueError(f"vibrational level {n} outside 0..{self.n_max}")
        v = np.zeros(self.dim_vib, dtype=complex)
        v[n] = 1.0
        return v

    @classmethod
    def from_dim(cls, dim_total: int) -> "TruncatedSpace":
        if dim_total % DIM_EL or dim_total < 2 * DIM_EL:
            raise ValueError(f"dimension {dim_total} is not 3*(n_max+1) with n_max >= 1")
        return cls(dim_total // DIM_EL - 1)


def annihilation_op(space: TruncatedSpace) -> np.ndarray:
    """Lowering operator ``a`` on the vibrational factor, <n-1|a|n> = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, space.dim_vib, dtype=float)), k=1).astype(complex)


def number_op(space: TruncatedSpace) -> np.ndarray:
    return np.diag(np.arange(space.dim_vib, dtype=float)).astype(complex)


def displacement_op(eta: float, sign: int, space: TruncatedSpace) -> np.ndarray:
    """``exp(sign * i * eta * (a + a^dagger))`` on the truncated vibrational space.

    Built from the eigendecomposition of the Hermitian generator, so the result
    is exactly unitary as a matrix; only its action near ``n_max`` differs from
    the untruncated operator.
    """
    if eta < 0:
        raise ValueError("eta must be non-negative")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = annihilation_op(space)
    w, v = np.linalg.eigh(a + a.conj().T)
    return (v * np.exp(1j * sign * eta * w)) @ v.conj().T


def el_op(i: int, j: int) -> np.ndarray:
    """Electronic transition operator ``|i><j|`` for levels in {1, 2, 3}."""
    m = np.zeros((DIM_EL, DIM_EL), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


def embed(el: np.ndarray, vib: np.ndarray, space: TruncatedSpace) -> np.ndarray:
    """Tensor product ``el (x) vib`` in the electronic-major convention."""
    el = np.asarray(el)
    vib = np.asarray(vib)
    if el.shape != (DIM_EL, DIM_EL):
        raise ValueError(f"electronic operator must be 3x3, got {el.shape}")
    if vib.shape != (space.dim_vib, space.dim_vib):
        raise ValueError(f"vibrational operator must be {space.dim_vib}x{space.dim_vib}, got {vib.shape}")
    return np.kron(el, vib)


def partial_transpose(rho: np.ndarray, space: TruncatedSpace,
                      subsystem: str = "electronic") -> np.ndarray:
    d = space.dim_total
    rho = np.asarray(rho)
    if rho.shape != (d, d):
        raise ValueError(f"matrix shape {rho.shape} does not match dim_total={d}")
    t = rho.reshape(DIM_EL, space.dim_vib, DIM_EL, space.dim_vib)
    if subsystem == "electronic":
        t = t.transpose(2, 1, 0, 3)
    elif subsystem == "vibrational":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"subsystem must be 'electronic' or 'vibrational', got {subsystem!r}")
    return t.reshape(d, d)
