import numpy as np
import pytest

from mtcavity import lindblad, models, qstate
from mtcavity.exceptions import ConfigurationError, ModelError, ShapeError, StiffnessError

from conftest import random_density, random_state

pytestmark = pytest.mark.filterwarnings(
    "ignore::mtcavity.exceptions.CutoffWarning"
)


def dephasing(n_max, kappa=1.0, omega=0.0):
    return models.phase_damping_model(
        models.PhaseDampingParams(omega=omega, kappa_phi=kappa), n_max
    )


def test_rhs_zero_for_diagonal_state_under_dephasing():
    model = dephasing(3)
    rho = np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex)
    assert np.max(np.abs(lindblad.lindblad_rhs(model, rho))) < 1e-14


def test_rhs_zero_for_hamiltonian_eigenstate():
    H = np.diag([0.0, 1.0, 2.5]).astype(complex)
    model = models.generic_lindblad(H, [])
    rho = np.zeros((3, 3), dtype=complex)
    rho[1, 1] = 1.0
    assert np.max(np.abs(lindblad.lindblad_rhs(model, rho))) == 0.0


def test_rhs_traceless_and_hermitian(rng):
    H = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    H = 0.5 * (H + H.conj().T)
    L = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    model = models.generic_lindblad(H, [(L, 0.8)])
    rho = random_density(rng, 2)
    out = lindblad.lindblad_rhs(model, rho)
    assert abs(np.trace(out)) <= 1e-12
    assert np.max(np.abs(out - out.conj().T)) <= 1e-12


def test_rhs_dimension_mismatch():
    model = dephasing(3)
    with pytest.raises(ShapeError):
        lindblad.lindblad_rhs(model, np.eye(3, dtype=complex) / 3)


def test_rhs_matches_superoperator_matrix(rng):
    model = models.cavity_decay_model(
        models.RabiModelParams(omega0=1.0, omega=0.8, lam=0.3, n_emitters=1,
                               kappa=0.4),
        qstate.HilbertSpaceSpec(1, 2),
    )
    sup = lindblad.liouvillian_matrix(model)
    rho = random_density(rng, model.dim)
    direct = lindblad.lindblad_rhs(model, rho)
    via_sup = (sup @ rho.reshape(-1)).reshape(rho.shape)
    assert np.max(np.abs(direct - via_sup)) < 1e-12


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_evolve_matches_dephasing_oracle(t, rng):
    model = dephasing(3, kappa=1.0)
    psi = random_state(rng, 4)
    rho0 = qstate.pure_state_density(psi)
    rec = lindblad.evolve(
        model, rho0,
        lindblad.IntegratorConfig(t_final=t, tolerance=1e-10, sample_every=1),
    )
    expected = lindblad.phase_damping_oracle(rho0, 1.0, t)
    # relative error on the decaying 2-0 coherence
    got = rec.states[-1][2, 0]
    assert abs(got - expected[2, 0]) / abs(expected[2, 0]) < 1e-6
    assert abs(got / rho0[2, 0] - np.exp(-2.0 * t)) < 1e-6


def test_evolve_photon_decay_oracle():
    model = models.cavity_decay_model(
        models.RabiModelParams(omega0=0.0, omega=0.0, lam=0.0, n_emitters=1,
                               kappa=0.25),
        qstate.HilbertSpaceSpec(1, 4),
    )
    psi = np.zeros(model.dim, dtype=complex)
    psi[5 + 4] = 1.0  # spin ground, n = 4
    a = models.annihilation_for(model)
    rec = lindblad.evolve(
        model, qstate.pure_state_density(psi),
        lindblad.IntegratorConfig(t_final=2.0, tolerance=1e-10, sample_every=8),
        observables={"n": a.conj().T @ a},
    )
    expected = 4.0 * np.exp(-2 * 0.25 * rec.times)
    assert np.max(np.abs(rec.observables["n"] - expected)) < 1e-5


def test_excitation_number_conserved_without_decay():
    space = qstate.HilbertSpaceSpec(1, 4)
    model = models.cavity_decay_model(
        models.RabiModelParams(omega0=1.0, omega=1.0, lam=0.3, n_emitters=1),
        space,
    )
    ops = qstate.build_operator_set(space)
    C = ops.Sz + ops.a_dag @ ops.a
    psi = np.zeros(space.dim, dtype=complex)
    psi[0] = 1.0  # |e, 0>
    rec = lindblad.evolve(
        model, qstate.pure_state_density(psi),
        lindblad.IntegratorConfig(t_final=20.0, tolerance=1e-10, sample_every=20),
        observables={"C": C},
    )
    drift = np.max(np.abs(rec.observables["C"] - rec.observables["C"][0]))
    assert drift < 1e-8


def test_oracle_identity_at_t0(rng):
    rho0 = random_density(rng, 5)
    assert np.array_equal(lindblad.phase_damping_oracle(rho0, 2.0, 0.0), rho0)


def test_oracle_closed_form_factor():
    rho0 = np.zeros((4, 4), dtype=complex)
    rho0[3, 0] = 1.0
    out = lindblad.phase_damping_oracle(rho0, 2.0, 1.0)
    # (n - m) = 3, kappa = 2, t = 1 -> exp(-9)
    assert out[3, 0] == pytest.approx(np.exp(-9.0), rel=1e-12)
    assert out[3, 0] == pytest.approx(1.2340980408667956e-4, rel=1e-10)


def test_oracle_vs_integrator_full_matrix(rng):
    model = dephasing(5, kappa=1.0)
    rho0 = random_density(rng, 6)
    rec = lindblad.evolve(
        model, rho0,
        lindblad.IntegratorConfig(t_final=0.7, tolerance=1e-10, sample_every=1),
    )
    oracle = lindblad.phase_damping_oracle(rho0, 1.0, 0.7)
    assert np.max(np.abs(rec.states[-1] - oracle)) < 1e-6


def test_secular_pure_rotation(rng):
    energies = np.array([0.0, 1.0, 2.5])
    U = np.eye(3, dtype=complex)
    rho0 = random_density(rng, 3)
    out = lindblad.secular_evolve((energies, U), np.zeros((3, 3)), rho0, 2.0)
    assert np.allclose(np.diag(out), np.diag(rho0), atol=1e-12)
    expected = rho0[0, 1] * np.exp(-1j * (0.0 - 1.0) * 2.0)
    assert out[0, 1] == pytest.approx(expected, rel=1e-12)


def test_secular_damping_factor():
    energies = np.array([1.0, 1.0])
    U = np.eye(2, dtype=complex)
    G = np.array([[0.0, 0.5], [0.5, 0.0]])
    rho0 = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    out = lindblad.secular_evolve((energies, U), G, rho0, 2.0)
    assert out[0, 1] == pytest.approx(0.5 * np.exp(-1.0), rel=1e-12)


def test_secular_matches_dephasing_oracle(rng):
    # Gamma_nm = kappa (n-m)^2 / 2 in the number eigenbasis
    kappa, t = 0.8, 1.3
    n = np.arange(4)
    G = kappa * np.subtract.outer(n, n) ** 2 / 2.0
    rho0 = random_density(rng, 4)
    out = lindblad.secular_evolve(
        (np.zeros(4), np.eye(4, dtype=complex)), G, rho0, t
    )
    oracle = lindblad.phase_damping_oracle(rho0, kappa, t)
    assert np.max(np.abs(out - oracle)) < 1e-8


def test_secular_rejects_bad_gamma(rng):
    rho0 = random_density(rng, 2)
    eig = (np.zeros(2), np.eye(2, dtype=complex))
    with pytest.raises(ModelError):
        lindblad.secular_evolve(eig, np.array([[0.0, 1.0], [0.5, 0.0]]), rho0, 1.0)
    with pytest.raises(ModelError):
        lindblad.secular_evolve(eig, -np.ones((2, 2)), rho0, 1.0)


def test_sampled_states_keep_trace_and_positivity(rng):
    model = models.cavity_decay_model(
        models.RabiModelParams(omega0=1.0, omega=0.9, lam=0.2, n_emitters=2,
                               kappa=0.3),
        qstate.HilbertSpaceSpec(2, 3),
    )
    psi = np.zeros(model.dim, dtype=complex)
    psi[0] = 1.0
    rec = lindblad.evolve(
        model, qstate.pure_state_density(psi),
        lindblad.IntegratorConfig(t_final=5.0, tolerance=1e-9, sample_every=10),
    )
    for s in rec.states:
        d = qstate.validate_density_matrix(s)
        assert d["trace_defect"] < 1e-6
        assert d["min_eigenvalue"] > -1e-6


def test_rk4_convergence_order(rng):
    model = dephasing(3, kappa=1.0)
    psi = random_state(rng, 4)
    rho0 = qstate.pure_state_density(psi)
    oracle = lindblad.phase_damping_oracle(rho0, 1.0, 1.0)

    def err(dt):
        rec = lindblad.evolve(
            model, rho0,
            lindblad.IntegratorConfig(t_final=1.0, method="rk4", dt=dt,
                                      sample_every=10 ** 9),
        )
        return np.max(np.abs(rec.states[-1] - oracle))

    e1, e2 = err(0.02), err(0.01)
    order = np.log2(e1 / e2)
    assert 3.5 <= order <= 4.5


def test_purity_monotone_under_pure_dephasing(rng):
    model = dephasing(4, kappa=0.7)
    psi = random_state(rng, 5)
    rec = lindblad.evolve(
        model, qstate.pure_state_density(psi),
        lindblad.IntegratorConfig(t_final=3.0, method="rk4", dt=0.01,
                                  sample_every=10),
    )
    purity = np.array([np.real(np.trace(s @ s)) for s in rec.states])
    assert np.all(np.diff(purity) <= 1e-8)


def test_adaptive_step_underflow_raises_stiffness_error(rng):
    model = dephasing(3, kappa=1.0)
    rho0 = qstate.pure_state_density(random_state(rng, 4))
    cfg = lindblad.IntegratorConfig(t_final=1.0, tolerance=1e-18, sample_every=1)
    with pytest.raises(StiffnessError, match="t="):
        lindblad.evolve(model, rho0, cfg)


def test_integrator_config_validation():
    with pytest.raises(ConfigurationError):
        lindblad.IntegratorConfig(t_final=0.0)
    with pytest.raises(ConfigurationError):
        lindblad.IntegratorConfig(t_final=1.0, tolerance=0.5)
    with pytest.raises(ConfigurationError):
        lindblad.IntegratorConfig(t_final=1.0, method="euler")
    with pytest.raises(ConfigurationError):
        lindblad.IntegratorConfig(t_final=1.0, dt=-0.1)


def test_evolve_rejects_bad_initial_state():
    model = dephasing(2)
    bad = np.eye(3, dtype=complex)  # trace 3
    with pytest.raises(ConfigurationError):
        lindblad.evolve(
            model, bad, lindblad.IntegratorConfig(t_final=1.0, sample_every=1)
        )


def test_superoperator_size_guard():
    model = dephasing(70)
    with pytest.raises(ConfigurationError):
        lindblad.liouvillian_matrix(model)
