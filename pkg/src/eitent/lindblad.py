"""Master-equation propagation for the laser-cooled trapped atom.

The generator is ``-i[H(lam), rho] + L rho`` where the dissipator sends |3>
to |1> or |2> with a recoil kick ``exp(+-i eta (a + a^dag))`` along the trap
axis, each of the four channels at rate gamma/4.  Density matrices are plain
complex ndarrays in the electronic-major index order of :mod:`.fockspace`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .atom_model import (ModelParams, _hamiltonian_parts, dressed_product,
                         dressed_states)
from .fockspace import displacement_op
from .observables import (TimeSeries, emission_rate, fidelity_dark, mean_n,
                          negativity, tail_population)

TAIL_LIMIT = 1e-4
TRACE_DRIFT_LIMIT = 1e-6
STABILITY_LIMIT = 0.3
DEFAULT_PHASE_STEP = 0.25
TRUNCATION_MARGIN = 8


class IntegrationError(RuntimeError):
    pass


class TruncationError(IntegrationError):
    """Population reached the top of the truncated oscillator."""


class TraceDriftError(IntegrationError):
    """Trace of rho drifted; the step is too large."""


@dataclass(frozen=True)
class Schedule:
    """Common scale factor lam(t) of both Rabi frequencies.

    ``mode="ramp"`` keeps lam = 1 until ``t_off`` and then lowers it as
    ``1 - sin^2(pi (t - t_off) / (2 delta_t))`` to zero at ``t_off + delta_t``.
    """

    t_off: float = math.inf
    delta_t: float = 0.0
    mode: str = "constant"

    def __post_init__(self):
        if self.mode not in ("constant", "ramp"):
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if self.mode == "ramp" and (self.delta_t <= 0 or not math.isfinite(self.t_off)):
            raise ValueError("ramp needs a finite t_off and delta_t > 0")

    @classmethod
    def ramp(cls, t_off: float, delta_t: float) -> "Schedule":
        return cls(t_off=t_off, delta_t=delta_t, mode="ramp")

    @property
    def t_done(self) -> float:
        return self.t_off + self.delta_t

    def __call__(self, t: float) -> float:
        if self.mode == "constant" or t <= self.t_off:
            return 1.0
        if t >= self.t_done:
            return 0.0
        return 1.0 - math.sin(0.5 * math.pi * (t - self.t_off) / self.delta_t) ** 2

    def constant_on(self, t0: float, t1: float) -> float | None:
        """lam if it is constant on the whole interval [t0, t1], else None."""
        if self.mode == "constant" or t1 <= self.t_off:
            return 1.0
        if t0 >= self.t_done:
            return 0.0
        return None


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step settings.

    ``dt`` is the RK4 step (us), ``None`` picks ``0.25 / max(Delta, Gamma, Omega)``.
    Observables are sampled every ``sample_every`` steps.  With
    ``method="propagator"`` every constant-lam sample interval is covered by
    one exact application of ``exp(L * dt * sample_every)``; ramps always use RK4.
    """

    dt: float | None = None
    sample_every: int = 1
    method: str = "propagator"

    def __post_init__(self):
        if self.method not in ("rk4", "propagator"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")

    @classmethod
    def for_interval(cls, params: ModelParams, interval: float, method: str = "propagator"):
        """Largest default-accuracy dt that divides ``interval`` evenly."""
        steps = max(1, math.ceil(interval / default_dt(params) - 1e-9))
        return cls(dt=interval / steps, sample_every=steps, method=method)

    def resolved_dt(self, params: ModelParams) -> float:
        dt = default_dt(params) if self.dt is None else self.dt
        fastest = max(params.delta, params.gamma, params.rabi)
        if dt * fastest > STABILITY_LIMIT:
            raise ValueError(f"dt={dt:g} us too large: dt*max(Delta, Gamma, Omega)="
                             f"{dt * fastest:.3f} > {STABILITY_LIMIT}")
        return dt


def default_dt(params: ModelParams) -> float:
    return DEFAULT_PHASE_STEP / max(params.delta, params.gamma, params.rabi)


class _Generator:
    """Precomputed pieces of the master-equation generator for one parameter set."""

    def __init__(self, params: ModelParams):
        sp = params.space
        self.params = params
        self.nv = sp.dim_vib
        free, coupling, _ = _hamiltonian_parts(params)
        # drop the constant Delta * I: same dynamics, smaller spectral radius
        self.h_free = free - params.delta * np.eye(sp.dim_total)
        self.h_coupling = coupling
        self.kicks = [displacement_op(params.eta, s, sp) for s in (1, -1)]
        self.rate = params.gamma / 4
        # sum_jq sigma^dag sigma = |3><3| (x) rate * 2 * sum_q D_q^dag D_q
        decay = 2 * self.rate * sum(d.conj().T @ d for d in self.kicks)
        self.k_sum = np.zeros((sp.dim_total, sp.dim_total), dtype=complex)
        self.k_sum[2 * self.nv:, 2 * self.nv:] = decay

    def hamiltonian(self, lam: float) -> np.ndarray:
        return self.h_free + lam * self.h_coupling

    def jump(self, rho: np.ndarray) -> np.ndarray:
        nv = self.nv
        r33 = rho[2 * nv:, 2 * nv:]
        fed = self.rate * sum(d @ r33 @ d.conj().T for d in self.kicks)
        out = np.zeros_like(rho)
        out[:nv, :nv] = fed
        out[nv:2 * nv, nv:2 * nv] = fed
        return out

    def dissipator(self, rho: np.ndarray) -> np.ndarray:
        anti = self.k_sum @ rho
        return self.jump(rho) - 0.5 * (anti + anti.conj().T)

    def rhs(self, rho: np.ndarray, lam: float) -> np.ndarray:
        h_eff = self.hamiltonian(lam) - 0.5j * self.k_sum
        x = -1j * (h_eff @ rho)
        # -i(H_eff rho - rho H_eff^dag) = x + x^dag for Hermitian rho
        return x + x.conj().T + self.jump(rho)

    def superoperator(self, lam: float) -> np.ndarray:
        """Column-stacked generator: vec(d rho/dt) = S vec(rho)."""
        d = self.h_free.shape[0]
        eye = np.eye(d)
        h_eff = self.hamiltonian(lam) - 0.5j * self.k_sum
        s = -1j * np.kron(eye, h_eff) + 1j * np.kron(h_eff.conj(), eye)
        for kick in self.kicks:
            for j in (0, 1):
                sigma = np.zeros((d, d), dtype=complex)
                sigma[j * self.nv:(j + 1) * self.nv, 2 * self.nv:] = kick
                s += self.rate * np.kron(sigma.conj(), sigma)
        return s


@lru_cache(maxsize=8)
def _generator(params: ModelParams) -> _Generator:
    return _Generator(params)


def dissipator(rho: np.ndarray, params: ModelParams) -> np.ndarray:
    """Spontaneous-emission part of the generator."""
    return _generator(params).dissipator(np.asarray(rho))


def rhs(rho: np.ndarray, t: float, params: ModelParams,
        schedule: Schedule | None = None) -> np.ndarray:
    """``d rho / dt`` at time ``t``.

    Assumes Hermitian ``rho``; the anti-Hermitian part of a non-Hermitian input
    is not propagated correctly.
    """
    lam = 1.0 if schedule is None else schedule(t)
    return _generator(params).rhs(np.asarray(rho), lam)


def liouvillian(params: ModelParams, lam: float = 1.0) -> np.ndarray:
    return _generator(params).superoperator(lam)


@lru_cache(maxsize=4)
def propagator(params: ModelParams, lam: float, h: float) -> np.ndarray:
    """``exp(S h)`` for the column-stacked generator, by Pade scaling and squaring."""
    u = scipy.linalg.expm(liouvillian(params, lam) * h)
    u.setflags(write=False)
    return u


def steady_state(params: ModelParams, lam: float = 1.0) -> np.ndarray:
    """Stationary density matrix from a direct solve of ``S vec(rho) = 0``, tr rho = 1."""
    s = liouvillian(params, lam)
    d = params.space.dim_total
    a = s.copy()
    a[0, :] = np.eye(d).reshape(-1)
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    rho = np.linalg.solve(a, b).reshape(d, d, order="F")
    return 0.5 * (rho + rho.conj().T)


def initial_state(params: ModelParams, n_in: int) -> np.ndarray:
    """Pure state |phi_2, n_in> (dark state times Fock state)."""
    if not 0 <= n_in <= params.n_max:
        raise ValueError(f"n_in={n_in} outside 0..{params.n_max}")
    basis = dressed_states(params.g1, params.g2, params.delta)
    psi = dressed_product(basis, 2, n_in, params.space)
    return np.outer(psi, psi.conj())


def default_n_max(n_in: int) -> int:
    return max(15, n_in + 12)


def _rk4_step(gen: _Generator, rho, t, dt, schedule):
    k1 = gen.rhs(rho, schedule(t))
    k2 = gen.rhs(rho + 0.5 * dt * k1, schedule(t + 0.5 * dt))
    k3 = gen.rhs(rho + 0.5 * dt * k2, schedule(t + 0.5 * dt))
    k4 = gen.rhs(rho + dt * k3, schedule(t + dt))
    return rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _highest_level(rho, nv, floor=1e-10):
    pops = np.real(np.diagonal(rho)).reshape(3, nv).sum(axis=0)
    occupied = np.nonzero(pops > floor)[0]
    return int(occupied[-1]) if occupied.size else 0


def integrate(rho0: np.ndarray, t_end: float, params: ModelParams,
              schedule: Schedule | None = None, config: IntegratorConfig | None = None,
              observers: dict | None = None, snapshot_times=(),
              stationary_tol: float | None = None) -> TimeSeries:
    """Propagate ``rho0`` to ``t_end`` and sample observables along the way.

    ``observers`` maps names to ``f(rho, t) -> float``; they receive a
    read-only copy.  ``snapshot_times`` stores the state at the first sample at
    or after each requested time.  With ``stationary_tol`` the run stops at the
    first sample where ``max|d rho/dt|`` falls below it.

    Raises
    ------
    TruncationError
        Population in the top three vibrational levels exceeds 1e-4.
    TraceDriftError
        ``|tr rho - 1|`` exceeds 1e-6.
    """
    schedule = schedule or Schedule()
    config = config or IntegratorConfig()
    observers = observers or {}
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    sp = params.space
    rho = np.array(rho0, dtype=complex)
    if rho.shape != (sp.dim_total, sp.dim_total):
        raise ValueError(f"rho0 has shape {rho.shape}, expected {(sp.dim_total,) * 2}")
    top = _highest_level(rho, sp.dim_vib)
    if params.n_max < top + TRUNCATION_MARGIN:
        raise ValueError(f"n_max={params.n_max} leaves less than {TRUNCATION_MARGIN} levels "
                         f"above the occupied level {top}; use n_max >= {top + TRUNCATION_MARGIN}")

    dt = config.resolved_dt(params)
    h = dt * config.sample_every
    n_samples = max(1, math.ceil(t_end / h - 1e-9))
    gen = _generator(params)
    pending = sorted(snapshot_times)

    cols = {k: [] for k in ("t", "neg", "n", "rate", "fid", "drift", "mineig", "tail")}
    extra = {k: [] for k in observers}
    snaps = {}

    def sample(rho, t):
        tr = np.trace(rho).real
        tail = tail_population(rho, sp)
        cols["t"].append(t)
        cols["neg"].append(negativity(rho, sp))
        cols["n"].append(mean_n(rho, sp))
        cols["rate"].append(emission_rate(rho, params))
        cols["fid"].append(fidelity_dark(rho, params))
        cols["drift"].append(abs(tr - 1.0))
        cols["mineig"].append(float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]))
        cols["tail"].append(tail)
        if extra:
            view = rho.copy()
            view.setflags(write=False)
            for name, f in observers.items():
                extra[name].append(float(f(view, t)))
        while pending and pending[0] <= t + 1e-9:
            snaps[pending.pop(0)] = rho.copy()
        if tail > TAIL_LIMIT:
            raise TruncationError(
                f"population {tail:.2e} in the top 3 vibrational levels at t={t:g} us; "
                f"increase n_max above {params.n_max}")
        if abs(tr - 1.0) > TRACE_DRIFT_LIMIT:
            raise TraceDriftError(f"trace drift {abs(tr - 1.0):.2e} at t={t:g} us; reduce dt")

    t = 0.0
    sample(rho, t)
    for k in range(n_samples):
        t0, t1 = k * h, (k + 1) * h
        lam = schedule.constant_on(t0, t1)
        if config.method == "propagator" and lam is not None:
            u = propagator(params, lam, h)
            rho = (u @ rho.reshape(-1, order="F")).reshape(rho.shape, order="F")
        else:
            for j in range(config.sample_every):
                rho = _rk4_step(gen, rho, t0 + j * dt, dt, schedule)
        t = t1
        sample(rho, t)
        if stationary_tol is not None and np.max(np.abs(gen.rhs(rho, schedule(t)))) < stationary_tol:
            break

    return TimeSeries(
        t=np.array(cols["t"]), negativity=np.array(cols["neg"]), mean_n=np.array(cols["n"]),
        emission_rate=np.array(cols["rate"]), fidelity=np.array(cols["fid"]),
        trace_drift=np.array(cols["drift"]), min_eig=np.array(cols["mineig"]),
        tail_pop=np.array(cols["tail"]), extra={k: np.array(v) for k, v in extra.items()},
        snapshots=snaps, final_state=rho)
