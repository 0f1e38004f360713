"""Deterministic master-equation integration.

The right-hand side is applied directly to the density matrix with
matrix-matrix products; an explicit superoperator matrix is only built
on request for small dimensions (eigen-analysis, tests).  Two steppers
are provided: fixed-step classical RK4 and adaptive Dormand-Prince
RK45 with a proportional step controller.

Trace drift above 1e-8 is renormalized with a logged warning rather
than silently; every sampled state can be validated against the density
matrix contract.
"""

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, ModelError, ShapeError, StiffnessError
from .exceptions import CutoffWarning
from .models import LindbladModel
from .qstate import boson_level_populations, validate_density_matrix

__all__ = [
    "IntegratorConfig",
    "EvolutionRecord",
    "lindblad_rhs",
    "evolve",
    "phase_damping_oracle",
    "secular_evolve",
    "liouvillian_matrix",
]

logger = logging.getLogger(__name__)

TRACE_RENORM_THRESHOLD = 1e-8
CUTOFF_POPULATION = 1e-6

# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration window and stepper selection.

    method "rk4" uses fixed step ``dt``; method "rk45" uses the adaptive
    stepper with local ``tolerance`` (both relative and absolute scale).
    ``sample_every`` counts fixed steps between records for rk4; for
    rk45 it is the number of equally spaced record intervals covering
    [0, t_final].  Defaults follow the fastest scale of the model:
    dt = 1 / (50 max(|H|_inf, rates)) and tolerance 1e-8.
    """

    t_final: float
    method: str = "rk45"
    dt: float | None = None
    tolerance: float | None = None
    sample_every: int = 1

    def __post_init__(self):
        if self.t_final <= 0:
            raise ConfigurationError("t_final must be > 0")
        if self.method not in ("rk4", "rk45"):
            raise ConfigurationError(f"unknown method {self.method!r}")
        if self.dt is not None and self.dt <= 0:
            raise ConfigurationError("dt must be > 0")
        if self.tolerance is not None and not (0.0 < self.tolerance < 1e-2):
            raise ConfigurationError("tolerance must lie in (0, 1e-2)")
        if self.sample_every < 1:
            raise ConfigurationError("sample_every must be >= 1")


@dataclass
class EvolutionRecord:
    """Sampled times, states, and named expectation-value series."""

    times: np.ndarray
    states: list
    observables: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if np.any(np.diff(t) <= 0):
            raise ConfigurationError("record times must be strictly increasing")
        if len(self.states) != len(t):
            raise ConfigurationError("one state per time required")
        self.times = t

    def final_state(self) -> np.ndarray:
        return self.states[-1]


def lindblad_rhs(model: LindbladModel, rho: np.ndarray) -> np.ndarray:
    """d(rho)/dt = -i[H, rho] + sum_m r_m (2 L rho L+ - {L+L, rho})."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != model.H.shape:
        raise ShapeError(
            f"state shape {rho.shape} does not match model dim {model.H.shape}"
        )
    out = -1j * (model.H @ rho - rho @ model.H)
    for L, r in model.jumps:
        if r == 0.0:
            continue
        Ld = L.conj().T
        LdL = Ld @ L
        out += r * (2.0 * (L @ rho @ Ld) - LdL @ rho - rho @ LdL)
    return out


def _default_dt(model: LindbladModel) -> float:
    scale = max(np.linalg.norm(model.H, np.inf), model.max_rate, 1e-300)
    return 1.0 / (50.0 * scale)


def _renormalize(rho: np.ndarray, t: float) -> np.ndarray:
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_RENORM_THRESHOLD:
        logger.warning("trace drifted to %.3e at t=%.6g; renormalizing", tr, t)
        rho = rho / tr
    return rho


def _check_cutoff(rho: np.ndarray, space, t: float):
    if space is None:
        return
    pops = boson_level_populations(rho, space)
    top = float(np.sum(pops[-2:]))
    if top > CUTOFF_POPULATION:
        warnings.warn(
            f"top two boson levels hold population {top:.3e} at t={t:.6g}; "
            "increase the cutoff",
            CutoffWarning,
            stacklevel=3,
        )


def _rk4_step(model, rho, h):
    k1 = lindblad_rhs(model, rho)
    k2 = lindblad_rhs(model, rho + 0.5 * h * k1)
    k3 = lindblad_rhs(model, rho + 0.5 * h * k2)
    k4 = lindblad_rhs(model, rho + h * k3)
    return rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _rk45_to(model, rho, t0, t1, tol):
    """Adaptive Dormand-Prince from t0 to t1; returns the state at t1."""
    t = t0
    h = min(t1 - t0, 10.0 * _default_dt(model))
    h_min = max((t1 - t0) * 1e-14, 1e-280)
    k = [None] * 7
    while t < t1:
        h = min(h, t1 - t)
        k[0] = lindblad_rhs(model, rho)
        for i in range(1, 7):
            acc = rho + h * sum(a * k[j] for j, a in enumerate(_DP_A[i]))
            k[i] = lindblad_rhs(model, acc)
        y5 = rho + h * sum(b * ki for b, ki in zip(_DP_B5, k))
        y4 = rho + h * sum(b * ki for b, ki in zip(_DP_B4, k))
        err = np.max(np.abs(y5 - y4))
        scale = tol * (1.0 + np.max(np.abs(y5)))
        ratio = err / scale if scale > 0 else np.inf
        if not np.isfinite(ratio) or ratio > 1.0:
            h *= max(0.2, 0.9 * ratio ** -0.2) if np.isfinite(ratio) else 0.2
            if h < h_min:
                raise StiffnessError(
                    f"adaptive step underflowed (h={h:.3e}) at t={t:.9g}"
                )
            continue
        t += h
        rho = y5
        h *= min(5.0, max(0.2, 0.9 * ratio ** -0.2 if ratio > 0 else 5.0))
    return rho


def evolve(
    model: LindbladModel,
    rho0: np.ndarray,
    cfg: IntegratorConfig,
    observables: dict | None = None,
    validate: bool = True,
) -> EvolutionRecord:
    """Integrate the master equation and sample states and observables.

    ``observables`` maps names to operators; expectation values
    tr(O rho) are recorded at every sample time.  Initial-state defects
    larger than 1e-6 are rejected.
    """
    rho = np.asarray(rho0, dtype=complex).copy()
    diag = validate_density_matrix(rho, tol=1e-6)
    if not diag["ok"]:
        raise ConfigurationError(f"initial state fails validation: {diag}")

    times = [0.0]
    states = [rho.copy()]
    if cfg.method == "rk4":
        dt = cfg.dt if cfg.dt is not None else _default_dt(model)
        n_steps = int(np.ceil(cfg.t_final / dt - 1e-12))
        t = 0.0
        for step in range(1, n_steps + 1):
            h = min(dt, cfg.t_final - t)
            rho = _rk4_step(model, rho, h)
            t += h
            rho = _renormalize(rho, t)
            if step % cfg.sample_every == 0 or step == n_steps:
                times.append(t)
                states.append(rho.copy())
    else:
        tol = cfg.tolerance if cfg.tolerance is not None else 1e-8
        grid = np.linspace(0.0, cfg.t_final, cfg.sample_every + 1)
        for t0, t1 in zip(grid[:-1], grid[1:]):
            rho = _rk45_to(model, rho, t0, t1, tol)
            rho = _renormalize(rho, t1)
            times.append(t1)
            states.append(rho.copy())

    _check_cutoff(states[-1], model.space, times[-1])
    if validate:
        for t, s in zip(times[1:], states[1:]):
            d = validate_density_matrix(s, tol=1e-6)
            if d["trace_defect"] >= 1e-6:
                raise ModelError(
                    f"sampled state at t={t:.6g} has trace defect {d['trace_defect']:.3e}"
                )

    obs = {}
    if observables:
        for name, op in observables.items():
            op = np.asarray(op, dtype=complex)
            obs[name] = np.array(
                [np.trace(op @ s).real for s in states], dtype=float
            )
    return EvolutionRecord(times=np.array(times), states=states, observables=obs)


def phase_damping_oracle(
    rho0: np.ndarray, kappa: float, t: float, omega: float = 0.0
) -> np.ndarray:
    """Exact dephasing map in the number basis.

    rho_nm(t) = exp(-i omega (n-m) t - kappa (n-m)^2 t / 2) rho_nm(0).
    """
    rho0 = np.asarray(rho0, dtype=complex)
    n = np.arange(rho0.shape[0])
    dn = n[:, None] - n[None, :]
    return rho0 * np.exp(-1j * omega * dn * t - kappa * dn ** 2 * t / 2.0)


def secular_evolve(
    eigensystem: tuple[np.ndarray, np.ndarray],
    gammas: np.ndarray,
    rho0: np.ndarray,
    t: float,
) -> np.ndarray:
    """Damped phase rotation of eigenbasis coherences.

    ``eigensystem`` is (energies E_i, column eigenvectors U).  In the
    eigenbasis every element evolves as
    rho_ij(t) = exp(-i (E_i - E_j) t - Gamma_ij t) rho_ij(0); the result
    is transformed back to the original basis.
    """
    energies, U = eigensystem
    energies = np.asarray(energies, dtype=float)
    U = np.asarray(U, dtype=complex)
    G = np.asarray(gammas, dtype=float)
    if G.shape != (energies.size, energies.size):
        raise ModelError("Gamma matrix shape does not match the eigensystem")
    if np.any(G < 0):
        raise ModelError("Gamma entries must be >= 0")
    if np.max(np.abs(G - G.T)) > 1e-12 * max(1.0, np.max(np.abs(G))):
        raise ModelError("Gamma matrix must be symmetric")
    rho_e = U.conj().T @ np.asarray(rho0, dtype=complex) @ U
    w = energies[:, None] - energies[None, :]
    rho_e = rho_e * np.exp(-1j * w * t - G * t)
    return U @ rho_e @ U.conj().T


def liouvillian_matrix(model: LindbladModel) -> np.ndarray:
    """Explicit superoperator on vectorized rho (row-major), dim <= 64 only."""
    d = model.dim
    if d > 64:
        raise ConfigurationError("superoperator matrix limited to dim <= 64")
    eye = np.eye(d, dtype=complex)
    sup = -1j * (np.kron(model.H, eye) - np.kron(eye, model.H.T))
    for L, r in model.jumps:
        Ld = L.conj().T
        LdL = Ld @ L
        sup += r * (
            2.0 * np.kron(L, L.conj())
            - np.kron(LdL, eye)
            - np.kron(eye, LdL.T)
        )
    return sup
