"""Phase-entangled cat states and collapse-time laws.

A cat here is the normalized superposition

    |Psi> = (|e> (x) |alpha e^{i phi}> + |g> (x) |alpha e^{-i phi}>) / sqrt(2)

with |alpha| = sqrt(n).  The pointer-state separation D = 2 sqrt(n) sin(phi)
controls the collapse time t = 2 T_r / D^2 of the inter-branch
coherence when the oscillator damps on a time scale T_r.  The
cavity-chain variant evaluates
t = T_r / (2 n N sin^2(N n lam0^2 t / Delta)), whose oscillatory factor
is bracketed by sin^2 in [1/2, 1] (time average to maximum) because the
argument is far too large for an instantaneous value to be meaningful.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, CutoffError, FitQualityError
from .lindblad import EvolutionRecord

__all__ = [
    "CatParams",
    "cat_state",
    "coherent_amplitudes",
    "pointer_distance",
    "collapse_time",
    "mt_collapse_time",
    "mt_collapse_window",
    "coherence_decay_fit",
    "branch_coherence",
    "CoherenceFit",
]


@dataclass(frozen=True)
class CatParams:
    """Mean quanta, entanglement phase, damping time, and chain parameters."""

    n: float
    phi: float
    T_r: float
    lambda0: float = 0.0
    Delta: float = 0.0
    N_sys: int = 1
    t: float = 0.0

    def __post_init__(self):
        if self.n < 0:
            raise ConfigurationError("mean quanta n must be >= 0")
        if self.T_r <= 0:
            raise ConfigurationError("T_r must be > 0")


def coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """Truncated coherent-state amplitudes exp(-|a|^2/2) a^k / sqrt(k!)."""
    k = np.arange(n_max + 1)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, n_max + 1)))))
    mag = np.exp(-0.5 * abs(alpha) ** 2 + k * np.log(abs(alpha)) - 0.5 * log_fact) \
        if alpha != 0 else np.where(k == 0, 1.0, 0.0)
    phase = np.exp(1j * k * np.angle(alpha)) if alpha != 0 else np.ones_like(k, dtype=complex)
    return mag * phase


def cat_state(n: float, phi: float, n_max: int) -> np.ndarray:
    """Normalized qubit (x) boson cat with branch amplitudes sqrt(n) e^{+-i phi}.

    Requires n_max >= n + 5 sqrt(n) so the truncated Poisson tails are
    negligible; basis order is [|e>, |g>] (x) [|0>, ..., |n_max>].
    """
    if n < 0:
        raise ConfigurationError("n must be >= 0")
    needed = n + 5.0 * math.sqrt(n)
    if n_max < needed:
        raise CutoffError(
            f"boson cutoff {n_max} below n + 5 sqrt(n) = {needed:.1f}"
        )
    alpha = math.sqrt(n)
    up = coherent_amplitudes(alpha * np.exp(1j * phi), n_max)
    dn = coherent_amplitudes(alpha * np.exp(-1j * phi), n_max)
    psi = np.concatenate([up, dn])
    return psi / np.linalg.norm(psi)


def pointer_distance(
    n: float,
    phi: float | None = None,
    lambda0: float | None = None,
    t: float | None = None,
    Delta: float | None = None,
):
    """Branch separation D = 2 sqrt(n) sin(phi).

    When (lambda0, t, Delta) are supplied instead of phi, the dephasing
    angle phi = n lambda0^2 t / Delta is used and the small-phi form
    D ~ 2 n^{3/2} lambda0^2 t / Delta is returned alongside as
    ``approximate``.  Returns (D, approximate_or_None).
    """
    if phi is None:
        if None in (lambda0, t, Delta) or Delta == 0:
            raise ConfigurationError("need phi, or (lambda0, t, Delta != 0)")
        phi = n * lambda0 ** 2 * t / Delta
    exact = 2.0 * math.sqrt(n) * math.sin(phi)
    approx = None
    if lambda0 is not None and t is not None and Delta:
        approx = 2.0 * n ** 1.5 * lambda0 ** 2 * t / Delta
    return exact, approx


def collapse_time(T_r: float, D: float) -> float:
    """Coherence lifetime 2 T_r / D^2; D = 0 flags an infinite lifetime."""
    if T_r <= 0:
        raise ConfigurationError("T_r must be > 0")
    if D == 0:
        return math.inf
    return 2.0 * T_r / D ** 2


def mt_collapse_time(
    T_r: float,
    n: float,
    N_sys: int,
    lambda0: float | None = None,
    t: float | None = None,
    Delta: float | None = None,
    mode: str = "bounds",
):
    """Cavity-chain collapse time T_r / (2 n N sin^2(N n lam0^2 t / Delta)).

    mode "instantaneous" evaluates the formula at the literal sin
    argument (requires lambda0, t, Delta; a vanishing sin flags
    divergence by returning inf).  mode "bounds" replaces sin^2 by its
    time-average-to-maximum band [1/2, 1] and returns the interval
    (T_r / (2 n N), T_r / (n N)).
    """
    if min(T_r, n) <= 0 or N_sys <= 0:
        raise ConfigurationError("T_r, n and N_sys must be > 0")
    if mode == "bounds":
        return T_r / (2.0 * n * N_sys), T_r / (n * N_sys)
    if mode != "instantaneous":
        raise ConfigurationError(f"unknown mode {mode!r}")
    if None in (lambda0, t, Delta) or Delta == 0:
        raise ConfigurationError("instantaneous mode needs lambda0, t, Delta != 0")
    arg = N_sys * n * lambda0 ** 2 * t / Delta
    s2 = math.sin(arg) ** 2
    if s2 == 0.0:
        return math.inf
    return T_r / (2.0 * n * N_sys * s2)


def mt_collapse_window(T_r: float, n_range: tuple, N_sys: int) -> tuple:
    """Union of the bounds-mode intervals over a range of mean quanta."""
    n_lo, n_hi = min(n_range), max(n_range)
    if n_lo <= 0:
        raise ConfigurationError("mean quanta must be > 0")
    lo, _ = mt_collapse_time(T_r, n_hi, N_sys, mode="bounds")
    _, hi = mt_collapse_time(T_r, n_lo, N_sys, mode="bounds")
    return lo, hi


def branch_coherence(rho: np.ndarray, P_a: np.ndarray, P_b: np.ndarray) -> float:
    """Frobenius magnitude of the inter-branch block P_a rho P_b."""
    return float(np.linalg.norm(P_a @ np.asarray(rho) @ P_b))


@dataclass(frozen=True)
class CoherenceFit:
    rate: float
    r_squared: float
    log_amplitude: float


def coherence_decay_fit(
    record: EvolutionRecord,
    P_a: np.ndarray,
    P_b: np.ndarray,
    min_r_squared: float = 0.99,
) -> CoherenceFit:
    """Least-squares exponential fit of the inter-branch coherence decay.

    Fits log |P_a rho(t) P_b| linearly in t and returns the decay rate
    (positive for decay).  Decays smaller than the numerical floor are
    reported as rate zero with a perfect fit; otherwise r^2 below
    ``min_r_squared`` raises FitQualityError.
    """
    c = np.array([branch_coherence(s, P_a, P_b) for s in record.states])
    mask = c > 1e-14
    if np.count_nonzero(mask) < 3:
        raise FitQualityError("coherence below the numerical floor almost everywhere")
    t = record.times[mask]
    logc = np.log(c[mask])
    if np.ptp(logc) < 1e-9:
        return CoherenceFit(rate=0.0, r_squared=1.0, log_amplitude=float(logc[0]))
    slope, intercept = np.polyfit(t, logc, 1)
    pred = slope * t + intercept
    ss_res = float(np.sum((logc - pred) ** 2))
    ss_tot = float(np.sum((logc - np.mean(logc)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if r2 < min_r_squared:
        raise FitQualityError(f"exponential fit r^2 = {r2:.4f} < {min_r_squared}")
    return CoherenceFit(rate=float(-slope), r_squared=float(r2), log_amplitude=float(intercept))
