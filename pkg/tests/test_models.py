import numpy as np
import pytest

from mtcavity import lindblad, models, qstate
from mtcavity.exceptions import ConfigurationError, ModelError

from conftest import random_density


def one_excitation_gap(n_emitters, lam):
    """Eigenvalue gap of the single-excitation block at resonance."""
    space = qstate.HilbertSpaceSpec(n_emitters, 2)
    p = models.RabiModelParams(
        omega0=1.0, omega=1.0, lam=lam, n_emitters=n_emitters
    )
    H = models.tavis_cummings_hamiltonian(p, space)
    db = space.boson_dim
    # |m=-S+1> (x) |0> and |m=-S> (x) |1>
    idx = [(n_emitters - 1) * db, n_emitters * db + 1]
    ev = np.linalg.eigvalsh(H[np.ix_(idx, idx)])
    return ev[1] - ev[0]


def test_decoupled_hamiltonian_is_diagonal():
    space = qstate.HilbertSpaceSpec(2, 2)
    p = models.RabiModelParams(omega0=1.3, omega=0.7, lam=0.0, n_emitters=2)
    H = models.tavis_cummings_hamiltonian(p, space)
    assert np.max(np.abs(H - np.diag(np.diag(H)))) == 0.0
    m = 1.0 - np.arange(3)
    expected = np.add.outer(1.3 * m, 0.7 * np.arange(3)).ravel()
    assert np.allclose(np.real(np.diag(H)), expected, atol=1e-12)


def test_single_emitter_resonant_gap():
    assert one_excitation_gap(1, 0.2) == pytest.approx(0.4, rel=1e-12)


def test_four_emitter_gap_is_double():
    assert one_excitation_gap(4, 0.2) == pytest.approx(0.8, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 4, 9, 16])
def test_sqrt_n_splitting_law(n):
    lam = 0.05
    gap = one_excitation_gap(n, lam)
    assert gap == pytest.approx(2 * lam * np.sqrt(n), rel=1e-8)


def test_space_mismatch_rejected():
    p = models.RabiModelParams(omega0=1.0, omega=1.0, lam=0.1, n_emitters=2)
    with pytest.raises(ConfigurationError):
        models.tavis_cummings_hamiltonian(p, qstate.HilbertSpaceSpec(3, 2))


def test_cavity_decay_photon_number_matches_analytic():
    kappa = 0.5
    space = qstate.HilbertSpaceSpec(1, 5)
    p = models.RabiModelParams(
        omega0=0.0, omega=0.0, lam=0.0, n_emitters=1, kappa=kappa
    )
    model = models.cavity_decay_model(p, space)
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.boson_dim + 3] = 1.0  # spin ground, three photons
    a = models.annihilation_for(model)
    rec = lindblad.evolve(
        model,
        qstate.pure_state_density(psi),
        lindblad.IntegratorConfig(t_final=1.0, tolerance=1e-10, sample_every=5),
        observables={"n": a.conj().T @ a},
    )
    expected = 3.0 * np.exp(-2.0 * kappa * rec.times)
    assert np.max(np.abs(rec.observables["n"] - expected)) < 1e-6


def test_closed_system_purity_constant():
    space = qstate.HilbertSpaceSpec(1, 3)
    p = models.RabiModelParams(omega0=1.0, omega=1.0, lam=0.2, n_emitters=1)
    model = models.cavity_decay_model(p, space)
    assert model.jumps == ()
    psi = np.zeros(space.dim, dtype=complex)
    psi[0] = 1.0  # |e, 0>
    # ten Rabi cycles of the resonant pair
    t_final = 10 * 2 * np.pi / (2 * p.lam)
    rec = lindblad.evolve(
        model,
        qstate.pure_state_density(psi),
        lindblad.IntegratorConfig(t_final=t_final, tolerance=1e-10, sample_every=10),
    )
    purities = [np.real(np.trace(s @ s)) for s in rec.states]
    assert np.max(np.abs(np.array(purities) - 1.0)) < 1e-8


def test_vacuum_is_stationary_under_cavity_decay():
    space = qstate.HilbertSpaceSpec(1, 3)
    p = models.RabiModelParams(
        omega0=0.0, omega=0.0, lam=0.0, n_emitters=1, kappa=1.0
    )
    model = models.cavity_decay_model(p, space)
    vac = np.zeros(space.dim, dtype=complex)
    vac[space.boson_dim] = 1.0  # spin ground, zero photons
    rhs = lindblad.lindblad_rhs(model, qstate.pure_state_density(vac))
    assert np.max(np.abs(rhs)) < 1e-14


def test_phase_damping_populations_conserved():
    model = models.phase_damping_model(
        models.PhaseDampingParams(omega=0.0, kappa_phi=1.0), n_max=4
    )
    rho0 = np.full((5, 5), 0.2, dtype=complex)
    rec = lindblad.evolve(
        model, rho0,
        lindblad.IntegratorConfig(t_final=2.0, tolerance=1e-10, sample_every=4),
        validate=False,
    )
    for s in rec.states:
        assert np.allclose(np.diag(s), np.diag(rho0), atol=1e-8)


def test_phase_damping_coherence_factor():
    # rho_20 shrinks by exp(-kappa * 4 * t / 2) = 1/e at kappa=1, t=0.5
    model = models.phase_damping_model(
        models.PhaseDampingParams(omega=0.0, kappa_phi=1.0), n_max=3
    )
    psi = qstate.normalize(np.array([1.0, 0.0, 1.0, 0.0], dtype=complex))
    rho0 = qstate.pure_state_density(psi)
    rec = lindblad.evolve(
        model, rho0,
        lindblad.IntegratorConfig(t_final=0.5, tolerance=1e-11, sample_every=1),
    )
    ratio = rec.states[-1][2, 0] / rho0[2, 0]
    assert ratio.real == pytest.approx(np.exp(-1.0), rel=1e-6)
    # diagonal entries do not decay
    assert rec.states[-1][0, 0] == pytest.approx(0.5, abs=1e-8)


def test_generic_lindblad_validation():
    eye = np.eye(2, dtype=complex)
    model = models.generic_lindblad(eye, [])
    assert model.jumps == ()
    sm = np.array([[0, 0], [1, 0]], dtype=complex)
    with pytest.raises(ModelError):
        models.generic_lindblad(eye, [(sm, -1.0)])
    with pytest.raises(ModelError):
        models.generic_lindblad(np.array([[0, 1], [0, 0]], dtype=complex), [])


def test_amplitude_damping_relaxes_to_ground():
    gamma = 0.7
    model = models.qubit_amplitude_damping_model(gamma)
    sz = np.diag([1.0, -1.0]).astype(complex)
    rho0 = np.diag([1.0, 0.0]).astype(complex)

    # independent fixed-step integration of the written-out equation
    rho = rho0.copy()
    sm = np.array([[0, 0], [1, 0]], dtype=complex)
    ssd = sm.conj().T @ sm
    dt = 1e-4
    for _ in range(30000):
        rho = rho + dt * gamma * (2 * sm @ rho @ sm.conj().T - ssd @ rho - rho @ ssd)
    t_final = 3.0
    rec = lindblad.evolve(
        model, rho0,
        lindblad.IntegratorConfig(t_final=t_final, tolerance=1e-11, sample_every=1),
    )
    got = np.real(np.trace(sz @ rec.states[-1]))
    brute = np.real(np.trace(sz @ rho))
    assert got == pytest.approx(brute, abs=1e-3)
    assert got == pytest.approx(2 * np.exp(-2 * gamma * t_final) - 1, abs=1e-8)
    # long-time limit
    rec2 = lindblad.evolve(
        model, rho0,
        lindblad.IntegratorConfig(t_final=20.0, tolerance=1e-10, sample_every=1),
    )
    assert np.real(np.trace(sz @ rec2.states[-1])) == pytest.approx(-1.0, abs=1e-8)


def test_generator_preserves_hermiticity_and_trace(rng):
    space = qstate.HilbertSpaceSpec(1, 3)
    p = models.RabiModelParams(
        omega0=1.0, omega=0.9, lam=0.2, n_emitters=1, kappa=0.3
    )
    model = models.cavity_decay_model(p, space)
    for _ in range(20):
        rho = random_density(rng, space.dim)
        out = lindblad.lindblad_rhs(model, rho)
        assert np.max(np.abs(out - out.conj().T)) < 1e-10
        assert abs(np.trace(out)) < 1e-10


def test_param_validation():
    with pytest.raises(ConfigurationError):
        models.RabiModelParams(omega0=-1.0, omega=1.0, lam=0.1, n_emitters=1)
    with pytest.raises(ConfigurationError):
        models.PhaseDampingParams(omega=1.0, kappa_phi=-0.5)
    with pytest.raises(ConfigurationError):
        models.phase_damping_model(
            models.PhaseDampingParams(omega=1.0, kappa_phi=0.5), n_max=0
        )
