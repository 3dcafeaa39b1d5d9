"""Two-state Landau-Zener model of the negativity and fits to simulated traces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import find_peaks

from .atom_model import ModelParams

CRITICAL_RTOL = 1e-9
MAX_ITER = 200
STEP_RTOL = 1e-8
FLAT_LEVEL = 1e-10


class FitError(RuntimeError):
    """Least-squares fit did not converge; carries the best point found."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


def negativity_lz(t, delta_e):
    """Undamped pair negativity ``|sin(delta_e t)| / 2``."""
    if delta_e <= 0:
        raise ValueError("delta_e must be positive")
    return 0.5 * np.abs(np.sin(delta_e * np.asarray(t, dtype=float)))


def negativity_lz_damped(t, delta_e, gamma1):
    """Pair negativity with the upper state decaying at rate ``gamma1``.

    ``(dE/2) e^{-g t/2} |sin(nu t)/nu + (g/(2 nu^2))(1 - cos nu t)|`` with
    ``nu^2 = dE^2 - g^2/4``.  For ``g/2 > dE`` the expression is continued to
    imaginary ``nu`` (sin -> sinh, cos -> cosh); at ``g/2 = dE`` the ``nu -> 0``
    limit is used.
    """
    if delta_e <= 0:
        raise ValueError("delta_e must be positive")
    if gamma1 < 0:
        raise ValueError("gamma1 must be non-negative")
    t = np.asarray(t, dtype=float)
    half = 0.5 * gamma1
    nu_sq = delta_e ** 2 - half ** 2
    if abs(nu_sq) <= CRITICAL_RTOL * delta_e ** 2:
        decay = np.exp(-half * t)
        return 0.5 * delta_e * np.abs(decay * (t + 0.5 * half * t ** 2))
    if nu_sq > 0:
        nu = np.sqrt(nu_sq)
        decay = np.exp(-half * t)
        # 1 - cos x = 2 sin^2(x/2), stable for small x
        val = decay * (np.sin(nu * t) / nu + (half / nu_sq) * 2 * np.sin(0.5 * nu * t) ** 2)
        return 0.5 * delta_e * np.abs(val)
    kappa = np.sqrt(-nu_sq)
    grow = np.exp((kappa - half) * t)
    fall = np.exp(-(kappa + half) * t)
    sinh_part = 0.5 * (grow - fall) / kappa
    cosh_minus_one = 0.5 * (grow + fall) - np.exp(-half * t)
    return 0.5 * delta_e * np.abs(sinh_part + (half / kappa ** 2) * cosh_minus_one)


def damping_transition_gamma(params: ModelParams, n: int) -> float:
    """Emission rate where the pair oscillation becomes overdamped: 8 eta sqrt(n) Delta g2/g1."""
    if params.g1 <= 0:
        raise ValueError("g1 must be positive")
    return 8 * params.eta * np.sqrt(n) * params.delta * params.g2 / params.g1


def classify(delta_e: float, gamma1: float, rtol: float = 1e-6) -> str:
    margin = delta_e - 0.5 * gamma1
    if abs(margin) <= rtol * delta_e:
        return "critical"
    return "underdamped" if margin > 0 else "overdamped"


@dataclass(frozen=True)
class LZFit:
    delta_e_fit: float
    gamma1_fit: float
    residual: float
    classification: str
    window: tuple
    iterations: int

    @property
    def half_width(self) -> float:
        """``gamma1_fit / 2``, the decay rate of the upper pair amplitude."""
        return 0.5 * self.gamma1_fit


def initial_guess(t, y) -> tuple[float, float]:
    """Gap from the first maximum, width from the log-decrement of the next one."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.max() <= FLAT_LEVEL:
        raise ValueError("negativity trace is flat")
    peaks, _ = find_peaks(y, prominence=0.05 * max(y.max(), 1e-300))
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(y))])
    t0 = t[peaks[0]] - t[0]
    if t0 <= 0:
        raise ValueError("negativity trace has no rise to fit")
    delta_e = np.pi / (2 * t0)
    if peaks.size >= 2 and y[peaks[1]] > 0:
        ratio = y[peaks[0]] / y[peaks[1]]
        gamma1 = max(2 * np.log(ratio) / (t[peaks[1]] - t[peaks[0]]), 0.0)
    else:
        # a single hump: start on the overdamped side
        gamma1 = 4 * delta_e
    return delta_e, gamma1


def fit_lz(t, negativity, window: tuple | None = None, guess: tuple | None = None) -> LZFit:
    """Least-squares fit of the damped pair model to a negativity trace.

    The default window spans four oscillation periods of the initial guess.
    Uniform weights; bounded trust-region Gauss-Newton with at most 200
    evaluations and a relative step tolerance of 1e-8.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(negativity, dtype=float)
    if guess is None:
        guess = initial_guess(t, y)
    if window is None:
        window = (t[0], t[0] + 4 * np.pi / guess[0])
    m = (t >= window[0]) & (t <= window[1])
    tw, yw = t[m] - window[0], y[m]
    if tw.size < 4:
        raise ValueError("fit window holds fewer than 4 samples")

    def resid(p):
        return negativity_lz_damped(tw, p[0], p[1]) - yw

    x0 = np.array([guess[0], max(guess[1], 0.0)])
    sol = least_squares(resid, x0, bounds=([1e-12 * x0[0], 0.0], [np.inf, np.inf]),
                        method="trf", x_scale=np.array([x0[0], x0[0]]),
                        xtol=STEP_RTOL, ftol=None, gtol=None, max_nfev=MAX_ITER)
    norm = float(np.linalg.norm(sol.fun))
    if sol.status <= 0:
        raise FitError(f"no convergence after {sol.nfev} evaluations", best=tuple(sol.x), residual=norm)
    d_e, g1 = float(sol.x[0]), float(sol.x[1])
    return LZFit(d_e, g1, norm, classify(d_e, g1), (float(window[0]), float(window[1])), int(sol.nfev))
