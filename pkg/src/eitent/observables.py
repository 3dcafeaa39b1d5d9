"""Quantities read off a density matrix or a sampled trajectory."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .atom_model import ModelParams, dressed_product, dressed_states
from .fockspace import TruncatedSpace, partial_transpose

HERMITIAN_TOL = 1e-8

CSV_COLUMNS = ("t_us", "negativity", "mean_n", "emission_rate", "photon_count",
               "fidelity", "trace_drift", "min_eig", "tail_pop")


def _space_of(rho, space):
    return space if space is not None else TruncatedSpace.from_dim(np.shape(rho)[0])


def negativity(rho: np.ndarray, space: TruncatedSpace | None = None,
               subsystem: str = "electronic") -> float:
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose."""
    rho = np.asarray(rho)
    space = _space_of(rho, space)
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    pt = partial_transpose(rho, space, subsystem)
    ev = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(np.abs(ev[ev < 0]).sum())


def mean_n(rho: np.ndarray, space: TruncatedSpace | None = None) -> float:
    space = _space_of(rho, space)
    pops = np.real(np.diagonal(rho)).reshape(3, space.dim_vib).sum(axis=0)
    return float(pops @ np.arange(space.dim_vib))


def excited_population(rho: np.ndarray, space: TruncatedSpace | None = None) -> float:
    space = _space_of(rho, space)
    return float(np.real(np.diagonal(rho)[2 * space.dim_vib:]).sum())


def emission_rate(rho: np.ndarray, params: ModelParams) -> float:
    """Spontaneous photons per us: gamma times the total population of |3>."""
    return params.gamma * excited_population(rho, params.space)


def fidelity_dark(rho: np.ndarray, params: ModelParams) -> float:
    """Overlap with the cooling target |phi_2, 0>."""
    basis = dressed_states(params.g1, params.g2, params.delta)
    psi = dressed_product(basis, 2, 0, params.space)
    return float(np.real(psi.conj() @ rho @ psi))


def tail_population(rho: np.ndarray, space: TruncatedSpace | None = None, levels: int = 3) -> float:
    space = _space_of(rho, space)
    pops = np.real(np.diagonal(rho)).reshape(3, space.dim_vib).sum(axis=0)
    return float(pops[-levels:].sum())


def photon_count(t: np.ndarray, rate: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Accumulated photon number and the times it reaches each integer.

    The integral is trapezoidal; crossing times are linearly interpolated
    between samples.
    """
    t = np.asarray(t, dtype=float)
    count = cumulative_trapezoid(np.asarray(rate, dtype=float), t, initial=0.0)
    crossings = []
    for k in range(1, int(np.floor(count[-1] + 1e-12)) + 1):
        i = int(np.argmax(count >= k - 1e-12))
        if i == 0:
            crossings.append(t[0])
            continue
        c0, c1 = count[i - 1], count[i]
        frac = (k - c0) / (c1 - c0) if c1 > c0 else 1.0
        crossings.append(t[i - 1] + frac * (t[i] - t[i - 1]))
    return count, np.array(crossings)


def _vib_major_order(space: TruncatedSpace) -> np.ndarray:
    return np.array([e * space.dim_vib + n for n in range(space.dim_vib) for e in range(3)])


def heatmap_export(rho: np.ndarray, path, space: TruncatedSpace | None = None) -> Path:
    """Write |rho_ij| as CSV with consecutive 3x3 electronic blocks per vibrational level.

    The first row and column hold labels ``e{level}:n{k}``.
    """
    rho = np.asarray(rho)
    space = _space_of(rho, space)
    order = _vib_major_order(space)
    mags = np.abs(rho)[np.ix_(order, order)]
    labels = [space.label(i) for i in order]
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index"] + labels)
        for lab, row in zip(labels, mags):
            w.writerow([lab] + [repr(float(x)) for x in row])
    return path


def read_heatmap(path) -> np.ndarray:
    """Read a heatmap CSV back into |rho| in the electronic-major index order."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    labels = rows[0][1:]
    mags = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    space = TruncatedSpace.from_dim(len(labels))
    idx = []
    for lab in labels:
        e, n = lab.split(":")
        idx.append(space.index(int(e[1:]), int(n[1:])))
    out = np.empty_like(mags)
    out[np.ix_(idx, idx)] = mags
    return out


@dataclass
class TimeSeries:
    """Observables sampled along one trajectory (times in us)."""

    t: np.ndarray
    negativity: np.ndarray
    mean_n: np.ndarray
    emission_rate: np.ndarray
    fidelity: np.ndarray
    trace_drift: np.ndarray
    min_eig: np.ndarray
    tail_pop: np.ndarray
    extra: dict = field(default_factory=dict)
    snapshots: dict = field(default_factory=dict)
    final_state: np.ndarray | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.ndim != 1 or np.any(np.diff(self.t) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self):
        return len(self.t)

    @property
    def photon_count(self) -> np.ndarray:
        return photon_count(self.t, self.emission_rate)[0]

    @property
    def photon_crossings(self) -> np.ndarray:
        return photon_count(self.t, self.emission_rate)[1]

    def columns(self) -> dict:
        return {"t_us": self.t, "negativity": self.negativity, "mean_n": self.mean_n,
                "emission_rate": self.emission_rate, "photon_count": self.photon_count,
                "fidelity": self.fidelity, "trace_drift": self.trace_drift,
                "min_eig": self.min_eig, "tail_pop": self.tail_pop}

    def last_row(self) -> dict:
        return {k: float(v[-1]) for k, v in self.columns().items()}

    def window(self, t0: float, t1: float) -> "TimeSeries":
        m = (self.t >= t0) & (self.t <= t1)
        return TimeSeries(self.t[m], self.negativity[m], self.mean_n[m], self.emission_rate[m],
                          self.fidelity[m], self.trace_drift[m], self.min_eig[m], self.tail_pop[m],
                          {k: np.asarray(v)[m] for k, v in self.extra.items()})

    def to_csv(self, path) -> Path:
        cols = self.columns()
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for i in range(len(self)):
                w.writerow([repr(float(cols[c][i])) for c in CSV_COLUMNS])
        return path


def read_series_csv(path) -> dict:
    """Column name -> array for a CSV written by :meth:`TimeSeries.to_csv`."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array([[float(x) for x in r] for r in rows[1:]]).reshape(-1, len(rows[0]))
    return {name: data[:, i] for i, name in enumerate(rows[0])}
