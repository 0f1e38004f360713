"""Operators and states on a collective-spin (x) truncated-boson space.

The composite space is the Dicke sector S = N/2 of N two-level emitters
tensored with a boson mode truncated at ``n_max`` quanta, ordered
spin-first: basis index = (spin index) * (n_max + 1) + (boson index).
Dicke states are ordered by decreasing magnetic quantum number, so the
spin index i corresponds to m = S - i.

All operators are dense complex numpy arrays; everything is immutable
after construction and safe to share between workers.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidSpaceError, ShapeError

__all__ = [
    "HilbertSpaceSpec",
    "OperatorSet",
    "boson_annihilation",
    "boson_number",
    "collective_spin_ops",
    "build_operator_set",
    "tensor_product",
    "validate_density_matrix",
    "validate_state_vector",
    "normalize",
    "pure_state_density",
    "boson_level_populations",
    "trace_distance",
]

NORM_TOL = 1e-10


@dataclass(frozen=True)
class HilbertSpaceSpec:
    """Composite space of N emitters and one boson mode with cutoff n_max.

    ``spin_sector`` selects the collective S = N/2 Dicke ladder (default,
    dimension (N+1)(n_max+1)) or ``"single"`` for N independent spins
    (dimension 2^N (n_max+1), allowed only for N <= 10).
    """

    n_emitters: int
    boson_cutoff: int
    spin_sector: str = "collective"

    def __post_init__(self):
        if self.n_emitters < 1 or self.boson_cutoff < 1:
            raise InvalidSpaceError(
                f"need n_emitters >= 1 and boson_cutoff >= 1, got "
                f"N={self.n_emitters}, n_max={self.boson_cutoff}"
            )
        if self.spin_sector not in ("collective", "single"):
            raise InvalidSpaceError(f"unknown spin sector {self.spin_sector!r}")
        if self.spin_sector == "single" and self.n_emitters > 10:
            raise InvalidSpaceError("single-spin sector is limited to N <= 10")

    @property
    def spin_dim(self) -> int:
        if self.spin_sector == "collective":
            return self.n_emitters + 1
        return 2 ** self.n_emitters

    @property
    def boson_dim(self) -> int:
        return self.boson_cutoff + 1

    @property
    def dim(self) -> int:
        return self.spin_dim * self.boson_dim


@dataclass(frozen=True)
class OperatorSet:
    """Composite-space operators of the emitter-mode system."""

    a: np.ndarray
    a_dag: np.ndarray
    Sz: np.ndarray
    Splus: np.ndarray
    Sminus: np.ndarray
    identity: np.ndarray
    space: HilbertSpaceSpec = field(repr=False)


def boson_annihilation(n_max: int) -> np.ndarray:
    """Truncated annihilation operator, a|n> = sqrt(n)|n-1>, n <= n_max."""
    if n_max < 1:
        raise InvalidSpaceError("boson cutoff must be >= 1")
    a = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    ns = np.arange(1, n_max + 1)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def boson_number(n_max: int) -> np.ndarray:
    """Number operator diag(0, 1, ..., n_max)."""
    return np.diag(np.arange(n_max + 1, dtype=float)).astype(complex)


def collective_spin_ops(n_emitters: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Sz, S+, S-) in the S = N/2 Dicke ladder, m ordered S, S-1, ..., -S.

    Matrix elements are the standard ladder amplitudes
    sqrt(S(S+1) - m(m +/- 1)).
    """
    S = n_emitters / 2.0
    m = S - np.arange(n_emitters + 1)
    Sz = np.diag(m).astype(complex)
    Splus = np.zeros((n_emitters + 1, n_emitters + 1), dtype=complex)
    # S+|S,m> lands one index earlier (m increases toward index 0)
    amp = np.sqrt(S * (S + 1) - m[1:] * (m[1:] + 1))
    Splus[np.arange(n_emitters), np.arange(1, n_emitters + 1)] = amp
    Sminus = Splus.conj().T
    return Sz, Splus, Sminus


def _single_spin_ops(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Collective operators as sums over N independent spin-1/2 factors."""
    sz = np.diag([0.5, -0.5]).astype(complex)
    sp = np.array([[0, 1], [0, 0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    dim = 2 ** n
    Sz = np.zeros((dim, dim), dtype=complex)
    Splus = np.zeros_like(Sz)
    for i in range(n):
        ops_z = [sz if j == i else eye for j in range(n)]
        ops_p = [sp if j == i else eye for j in range(n)]
        term_z, term_p = ops_z[0], ops_p[0]
        for oz, op in zip(ops_z[1:], ops_p[1:]):
            term_z = np.kron(term_z, oz)
            term_p = np.kron(term_p, op)
        Sz += term_z
        Splus += term_p
    return Sz, Splus, Splus.conj().T


def build_operator_set(space: HilbertSpaceSpec) -> OperatorSet:
    """Build {a, a+, Sz, S+, S-, 1} as matrices on the composite space."""
    if space.spin_sector == "collective":
        Sz_s, Sp_s, Sm_s = collective_spin_ops(space.n_emitters)
    else:
        Sz_s, Sp_s, Sm_s = _single_spin_ops(space.n_emitters)
    a_b = boson_annihilation(space.boson_cutoff)
    eye_s = np.eye(space.spin_dim, dtype=complex)
    eye_b = np.eye(space.boson_dim, dtype=complex)
    a = np.kron(eye_s, a_b)
    return OperatorSet(
        a=a,
        a_dag=a.conj().T,
        Sz=np.kron(Sz_s, eye_b),
        Splus=np.kron(Sp_s, eye_b),
        Sminus=np.kron(Sm_s, eye_b),
        identity=np.eye(space.dim, dtype=complex),
        space=space,
    )


def tensor_product(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product with (A (x) B)(x (x) y) = Ax (x) By."""
    return np.kron(np.asarray(A), np.asarray(B))


def validate_state_vector(psi: np.ndarray, tol: float = NORM_TOL) -> np.ndarray:
    """Check norm within tol of one; returns psi as a complex array."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ShapeError(f"state vector must be 1-D, got shape {psi.shape}")
    nrm = np.linalg.norm(psi)
    if not np.isfinite(nrm) or nrm == 0.0:
        raise ShapeError("state vector has zero or non-finite norm")
    if abs(nrm - 1.0) > tol:
        raise ShapeError(f"state vector norm {nrm} deviates from 1 by more than {tol}")
    return psi


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return psi / np.linalg.norm(psi)


def pure_state_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def validate_density_matrix(rho: np.ndarray, tol: float = 1e-8) -> dict:
    """Diagnostics for a candidate density matrix.

    Returns {hermiticity_defect, trace_defect, min_eigenvalue, ok} where
    ``ok`` is the verdict against ``tol`` (the caller may ignore it and
    judge the defects itself).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ShapeError(f"density matrix must be square, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    trace = np.abs(np.trace(rho) - 1.0)
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    return {
        "hermiticity_defect": float(herm),
        "trace_defect": float(trace),
        "min_eigenvalue": min_eig,
        "ok": bool(herm <= tol and trace <= tol and min_eig >= -tol),
    }


def boson_level_populations(rho: np.ndarray, space) -> np.ndarray:
    """Populations of the boson levels, spin traced out.

    ``space`` needs ``spin_dim`` and ``boson_dim`` attributes (a
    HilbertSpaceSpec or any factorization descriptor).
    """
    rho = np.asarray(rho)
    ds, db = space.spin_dim, space.boson_dim
    if rho.shape != (ds * db, ds * db):
        raise ShapeError(
            f"state of dim {rho.shape} does not match space {ds}x{db}"
        )
    r = rho.reshape(ds, db, ds, db)
    return np.real(np.einsum("anam->nm", r).diagonal())


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(1/2) tr |rho - sigma| for Hermitian arguments."""
    diff = np.asarray(rho) - np.asarray(sigma)
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))
