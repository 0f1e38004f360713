"""Stochastic Ito unraveling of the master-equation dynamics.

Each trajectory follows the state-diffusion equation

    |dpsi> = -i H |psi> dt
             + sum_m (<B+>B - B+B/2 - <B+><B>/2) |psi> dt
             + sum_m (B - <B>) |psi> dxi_m

with one scalar complex Wiener increment per channel, E[dxi] = 0 and
E[|dxi|^2] = dt (independent real and imaginary parts of variance
dt/2).  The channel operators are B_m = sqrt(2 r_m) L_m, which makes
the ensemble average reproduce the lindblad module's dissipator
r (2 L rho L+ - {L+L, rho}) exactly.

Steps are Euler-Maruyama followed by renormalization.  Trajectory i
draws its noise from a private generator seeded by (base_seed, i) and
the ensemble reduction runs in trajectory-index order, so results are
bit-reproducible and independent of any internal batching.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, NumericalError, StabilityError
from .models import LindbladModel
from .qstate import normalize

__all__ = [
    "ItoConfig",
    "ChannelProjectors",
    "EnsembleResult",
    "ito_step",
    "run_ensemble",
    "dispersion_entropy",
    "entropy_production_rate",
    "number_channel_projectors",
]

MAX_RATE_DT = 0.05
NORM_FLOOR = 1e-12
OCCUPATION_FLOOR = 1e-15
PROJECTOR_TOL = 1e-10


@dataclass(frozen=True)
class ItoConfig:
    """Step size, step count, ensemble size, seeding, and record cadence."""

    dt: float
    steps: int
    ensemble_size: int
    base_seed: int = 0
    record_every: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError("dt must be > 0")
        if self.steps < 1 or self.ensemble_size < 1 or self.record_every < 1:
            raise ConfigurationError(
                "steps, ensemble_size and record_every must be >= 1"
            )


class ChannelProjectors:
    """Validated orthogonal projector partition of the state space."""

    def __init__(self, projectors):
        mats = [np.asarray(P, dtype=complex) for P in projectors]
        if not mats:
            raise ConfigurationError("need at least one projector")
        d = mats[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for i, P in enumerate(mats):
            if P.shape != (d, d):
                raise ConfigurationError("projectors must share one square shape")
            if np.max(np.abs(P - P.conj().T)) > PROJECTOR_TOL:
                raise ConfigurationError(f"projector {i} is not Hermitian")
            if np.max(np.abs(P @ P - P)) > PROJECTOR_TOL:
                raise ConfigurationError(f"projector {i} is not idempotent")
            total += P
        if np.max(np.abs(total - np.eye(d))) > PROJECTOR_TOL:
            raise ConfigurationError("projectors must sum to the identity")
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if np.max(np.abs(mats[i] @ mats[j])) > PROJECTOR_TOL:
                    raise ConfigurationError(f"projectors {i} and {j} overlap")
        self.matrices = tuple(mats)
        self.dim = d

    def __len__(self):
        return len(self.matrices)


def number_channel_projectors(dim: int) -> ChannelProjectors:
    """One rank-1 projector per basis (number) state."""
    mats = []
    for n in range(dim):
        P = np.zeros((dim, dim), dtype=complex)
        P[n, n] = 1.0
        mats.append(P)
    return ChannelProjectors(mats)


def _channel_operators(model: LindbladModel) -> list[np.ndarray]:
    return [np.sqrt(2.0 * r) * L for L, r in model.jumps if r > 0.0]


def _check_stability(model: LindbladModel, dt: float):
    if model.max_rate * dt >= MAX_RATE_DT:
        raise StabilityError(
            f"dt * max rate = {model.max_rate * dt:.3g} >= {MAX_RATE_DT}; "
            "reduce dt for a stable unraveling"
        )


def _batch_update(psi, H, channels, noise, dt):
    """Raw (un-normalized) Euler-Maruyama update for row-stacked states.

    psi has shape (M, d); operators act on rows via psi @ op.T; noise
    has shape (M, n_channels).
    """
    update = psi + dt * (-1j) * (psi @ H.T)
    for m, B in enumerate(channels):
        Bpsi = psi @ B.T
        eB = np.einsum("ij,ij->i", psi.conj(), Bpsi)
        drift = (
            eB.conj()[:, None] * Bpsi
            - 0.5 * (Bpsi @ B.conj())
            - 0.5 * (np.abs(eB) ** 2)[:, None] * psi
        )
        update += dt * drift + noise[:, m, None] * (Bpsi - eB[:, None] * psi)
    return update


def ito_step(psi, model: LindbladModel, noise, dt: float):
    """One Euler-Maruyama update followed by renormalization.

    Parameters
    ----------
    psi : normalized state vector
    model : LindbladModel
    noise : complex increments, one per jump channel, with E|dxi|^2 = dt
    dt : step size

    Returns
    -------
    (psi_new, renorm_factor) where renorm_factor is the norm of the raw
    update that was divided out.
    """
    psi = np.asarray(psi, dtype=complex)
    channels = _channel_operators(model)
    noise = np.atleast_1d(np.asarray(noise, dtype=complex))
    if noise.size != len(channels):
        raise ConfigurationError(
            f"got {noise.size} noise increments for {len(channels)} channels"
        )
    out = _batch_update(psi[None, :], model.H, channels, noise[None, :], dt)[0]
    nrm = float(np.linalg.norm(out))
    if nrm < NORM_FLOOR:
        raise NumericalError(f"state norm collapsed to {nrm:.3e} in ito_step")
    return out / nrm, nrm


def _channel_occupations(psi_batch, mats):
    """<P_k> for every trajectory row; shape (M, n_channels)."""
    occ = np.empty((psi_batch.shape[0], len(mats)))
    for k, P in enumerate(mats):
        occ[:, k] = np.real(
            np.einsum("mi,ij,mj->m", psi_batch.conj(), P, psi_batch)
        )
    return occ


def _entropy_from_occupations(occ):
    p = np.where(occ > OCCUPATION_FLOOR, occ, 1.0)  # masked terms contribute 0
    return np.maximum(-np.sum(np.where(occ > OCCUPATION_FLOOR, occ * np.log(p), 0.0), axis=1), 0.0)


@dataclass
class EnsembleResult:
    """Ensemble averages and per-trajectory diagnostics."""

    times: np.ndarray
    mean_rho: np.ndarray            # (n_rec, d, d)
    entropy: np.ndarray | None      # (ensemble, n_rec) when projectors given
    localization: dict
    renorm_log_max: float
    failed: list

    def entropy_median(self) -> np.ndarray:
        if self.entropy is None:
            raise ConfigurationError("no projectors were supplied")
        return np.median(self.entropy, axis=0)


def run_ensemble(
    model: LindbladModel,
    psi0: np.ndarray,
    cfg: ItoConfig,
    projectors: ChannelProjectors | None = None,
    chunk_size: int = 256,
) -> EnsembleResult:
    """Propagate an ensemble of Ito trajectories and average the dyads.

    mean_rho(t) is the ensemble mean of |psi_i(t)><psi_i(t)|.
    Per-trajectory norm collapses are recorded with their trajectory
    index and the victims are dropped from subsequent averages; the run
    aborts only when more than 1% of the ensemble fails.
    """
    _check_stability(model, cfg.dt)
    psi0 = normalize(np.asarray(psi0, dtype=complex))
    d = psi0.size
    if model.dim != d:
        raise ConfigurationError("psi0 dimension does not match the model")
    channels = _channel_operators(model)
    n_ch = len(channels)

    rec_idx = np.arange(0, cfg.steps + 1, cfg.record_every)
    if rec_idx[-1] != cfg.steps:
        rec_idx = np.append(rec_idx, cfg.steps)
    times = rec_idx * cfg.dt
    n_rec = rec_idx.size

    mats = projectors.matrices if projectors is not None else None
    mean_rho = np.zeros((n_rec, d, d), dtype=complex)
    counts = np.zeros(n_rec, dtype=np.int64)
    entropy = (
        np.full((cfg.ensemble_size, n_rec), np.nan) if mats is not None else None
    )
    failed = []
    renorm_log_max = 0.0
    sigma = np.sqrt(cfg.dt / 2.0)

    for start in range(0, cfg.ensemble_size, chunk_size):
        stop = min(start + chunk_size, cfg.ensemble_size)
        m = stop - start
        if n_ch:
            noise = np.empty((m, cfg.steps, n_ch), dtype=complex)
            for i in range(m):
                rng = np.random.default_rng((cfg.base_seed, start + i))
                raw = rng.normal(0.0, sigma, size=(cfg.steps, n_ch, 2))
                noise[i] = raw[..., 0] + 1j * raw[..., 1]
        else:
            noise = np.zeros((m, cfg.steps, 0), dtype=complex)

        psi = np.tile(psi0, (m, 1))
        alive = np.ones(m, dtype=bool)

        def record(pos, psi=None, alive=None):
            rows = psi[alive]
            mean_rho[pos] += np.einsum("mi,mj->ij", rows, rows.conj())
            counts[pos] += rows.shape[0]
            if mats is not None and rows.shape[0]:
                K = _entropy_from_occupations(_channel_occupations(rows, mats))
                entropy[np.nonzero(alive)[0] + start, pos] = K

        record(0, psi=psi, alive=alive)
        rec_pos = 1
        for step in range(1, cfg.steps + 1):
            out = _batch_update(psi, model.H, channels, noise[:, step - 1, :], cfg.dt)
            norms = np.linalg.norm(out, axis=1)
            dead = alive & (norms < NORM_FLOOR)
            if np.any(dead):
                failed.extend((np.nonzero(dead)[0] + start).tolist())
                alive = alive & ~dead
            safe = np.where(norms < NORM_FLOOR, 1.0, norms)
            psi = out / safe[:, None]
            if np.any(alive):
                renorm_log_max = max(
                    renorm_log_max, float(np.max(np.abs(np.log(safe[alive]))))
                )
            if rec_pos < n_rec and step == rec_idx[rec_pos]:
                record(rec_pos, psi=psi, alive=alive)
                rec_pos += 1

    if len(failed) > 0.01 * cfg.ensemble_size:
        raise NumericalError(
            f"{len(failed)} of {cfg.ensemble_size} trajectories failed: "
            f"{sorted(failed)}"
        )
    mean_rho /= np.maximum(counts, 1)[:, None, None]

    localization = {}
    if entropy is not None:
        med = np.nanmedian(entropy, axis=0)
        k0 = float(med[0])
        localization = {
            "median_entropy": med,
            "final_median_entropy": float(med[-1]),
            "final_over_initial": float(med[-1] / k0) if k0 > 0 else 0.0,
        }
    return EnsembleResult(
        times=times,
        mean_rho=mean_rho,
        entropy=entropy,
        localization=localization,
        renorm_log_max=renorm_log_max,
        failed=sorted(failed),
    )


def dispersion_entropy(psi: np.ndarray, projectors) -> float:
    """K = -sum_k <P_k> ln <P_k> over the channel occupations of psi.

    Channels with occupation <= 1e-15 contribute zero; the result lies
    in [0, ln(#channels)].
    """
    psi = np.asarray(psi, dtype=complex)
    mats = (
        projectors.matrices
        if isinstance(projectors, ChannelProjectors)
        else projectors
    )
    K = 0.0
    for P in mats:
        p = float(np.real(psi.conj() @ (P @ psi)))
        if p > OCCUPATION_FLOOR:
            K -= p * np.log(p)
    return max(K, 0.0)


def entropy_production_rate(psi: np.ndarray, projectors, jump_ops) -> float:
    """-sum_k ((1 - <P_k>) / <P_k>) R_k with R_k = sum_j |<P_k L_j P_k>|^2.

    Channels with occupation <= 1e-15 are skipped; every summand is
    nonnegative, so the result is <= 0.
    """
    psi = np.asarray(psi, dtype=complex)
    mats = (
        projectors.matrices
        if isinstance(projectors, ChannelProjectors)
        else projectors
    )
    rate = 0.0
    for P in mats:
        Ppsi = P @ psi
        p = float(np.real(psi.conj() @ Ppsi))
        if p <= OCCUPATION_FLOOR:
            continue
        R_k = 0.0
        for L in jump_ops:
            val = psi.conj() @ (P @ (L @ Ppsi))
            R_k += float(np.abs(val) ** 2)
        rate -= (1.0 - p) / p * R_k
    return min(rate, 0.0)
