"""Concrete Hamiltonians and dissipators as LindbladModel containers.

Frequencies are angular (rad/s) with hbar = 1 internally; SI conversion
happens in the estimation pipeline and the CLI only.

Dissipator convention: a jump entry (L, r) contributes

    r * (2 L rho L+ - {L+L, rho})

to d(rho)/dt.  Constructors document how their physical rate maps onto
this convention:

* cavity leakage at rate kappa is the jump (a, kappa), which expands to
  -kappa {a+a, rho} + 2 kappa a rho a+ (photon number decays as
  exp(-2 kappa t)); in the more common GKSL normalization
  r'(L rho L+ - {L+L, rho}/2) the same dissipator reads rate r' = 2 kappa;
* phase damping at rate kappa is the jump (a+a, kappa/2), which expands
  to (kappa/2)(2 n rho n - {n^2, rho}).
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, ModelError
from .qstate import (
    HilbertSpaceSpec,
    boson_annihilation,
    boson_number,
    build_operator_set,
)

__all__ = [
    "LindbladModel",
    "RabiModelParams",
    "PhaseDampingParams",
    "generic_lindblad",
    "tavis_cummings_hamiltonian",
    "cavity_decay_model",
    "phase_damping_model",
    "qubit_amplitude_damping_model",
]

HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class BosonFactor:
    """Minimal factorization descriptor for cutoff bookkeeping."""

    spin_dim: int
    boson_dim: int


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian plus jump operators with nonnegative rates.

    ``space`` optionally records the spin (x) boson factorization so that
    integrators can watch the top boson levels for truncation artifacts.
    """

    H: np.ndarray
    jumps: tuple = ()
    space: object = field(default=None, repr=False)

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ModelError(f"Hamiltonian must be square, got {H.shape}")
        if np.max(np.abs(H - H.conj().T)) > HERMITICITY_TOL * max(1.0, np.max(np.abs(H))):
            raise ModelError("Hamiltonian is not Hermitian within tolerance")
        jumps = []
        for op, rate in self.jumps:
            op = np.asarray(op, dtype=complex)
            if op.shape != H.shape:
                raise ModelError(
                    f"jump operator shape {op.shape} does not match H {H.shape}"
                )
            if rate < 0:
                raise ModelError(f"negative jump rate {rate}")
            jumps.append((op, float(rate)))
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "jumps", tuple(jumps))

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @property
    def max_rate(self) -> float:
        return max((r for _, r in self.jumps), default=0.0)


@dataclass(frozen=True)
class RabiModelParams:
    """Emitter frequency, cavity frequency, coupling, emitter count, leak rate."""

    omega0: float
    omega: float
    lam: float
    n_emitters: int
    kappa: float = 0.0

    def __post_init__(self):
        for name in ("omega0", "omega", "lam", "kappa"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")
        if self.n_emitters < 1:
            raise ConfigurationError("n_emitters must be >= 1")

    @property
    def detuning(self) -> float:
        return self.omega0 - self.omega


@dataclass(frozen=True)
class PhaseDampingParams:
    """Mode frequency and phase-damping rate."""

    omega: float
    kappa_phi: float

    def __post_init__(self):
        if self.omega < 0 or self.kappa_phi < 0:
            raise ConfigurationError("omega and kappa_phi must be >= 0")


def tavis_cummings_hamiltonian(p: RabiModelParams, space: HilbertSpaceSpec) -> np.ndarray:
    """H = omega0 Sz + omega a+a + lam (S+ a + a+ S-) on the composite space."""
    if space.n_emitters != p.n_emitters:
        raise ConfigurationError(
            f"space has N={space.n_emitters} but params have N={p.n_emitters}"
        )
    ops = build_operator_set(space)
    H = (
        p.omega0 * ops.Sz
        + p.omega * (ops.a_dag @ ops.a)
        + p.lam * (ops.Splus @ ops.a + ops.a_dag @ ops.Sminus)
    )
    return 0.5 * (H + H.conj().T)


def cavity_decay_model(p: RabiModelParams, space: HilbertSpaceSpec) -> LindbladModel:
    """Emitter-cavity model with photon leakage.

    The dissipator is -kappa {a+a, rho} + 2 kappa a rho a+, realized here
    as the jump (a, kappa) under the package convention (equivalently
    rate 2 kappa in the GKSL half-normalization); see the module
    docstring for the mapping.
    """
    H = tavis_cummings_hamiltonian(p, space)
    ops = build_operator_set(space)
    jumps = ((ops.a, p.kappa),) if p.kappa > 0 else ()
    return LindbladModel(H=H, jumps=jumps, space=space)


def phase_damping_model(p: PhaseDampingParams, n_max: int) -> LindbladModel:
    """Pure dephasing of a boson mode: jump (a+a, kappa_phi/2).

    Number populations are conserved; coherences obey
    rho_nm(t) = exp(-kappa_phi (n-m)^2 t / 2) rho_nm(0) (up to the
    trivial omega rotation when omega > 0).
    """
    if n_max < 1:
        raise ConfigurationError("n_max must be >= 1")
    n_op = boson_number(n_max)
    H = p.omega * n_op
    jumps = ((n_op, p.kappa_phi / 2.0),) if p.kappa_phi > 0 else ()
    return LindbladModel(H=H, jumps=jumps, space=BosonFactor(1, n_max + 1))


def qubit_amplitude_damping_model(gamma: float, omega0: float = 0.0) -> LindbladModel:
    """Two-level amplitude damping: jump (sigma-, gamma); <sigma_z> relaxes to -1."""
    sz = np.diag([1.0, -1.0]).astype(complex)
    sm = np.array([[0, 0], [1, 0]], dtype=complex)
    return LindbladModel(H=0.5 * omega0 * sz, jumps=((sm, gamma),))


def generic_lindblad(H: np.ndarray, jumps) -> LindbladModel:
    """Validated container for an arbitrary Hamiltonian and jump list."""
    return LindbladModel(H=np.asarray(H, dtype=complex), jumps=tuple(jumps))


def annihilation_for(model: LindbladModel) -> np.ndarray:
    """Composite-space annihilation operator matching the model's factorization."""
    if model.space is None:
        raise ConfigurationError("model does not record a spin/boson factorization")
    ds, db = model.space.spin_dim, model.space.boson_dim
    return np.kron(np.eye(ds, dtype=complex), boson_annihilation(db - 1))
