import numpy as np
import pytest

from mtcavity import qstate
from mtcavity.exceptions import InvalidSpaceError, ShapeError

from conftest import random_density, random_state


def test_number_operator_diagonal_on_boson_factor():
    ops = qstate.build_operator_set(qstate.HilbertSpaceSpec(1, 3))
    n = ops.a_dag @ ops.a
    assert np.max(np.abs(n - np.diag(np.diag(n)))) == 0.0
    # sqrt amplitudes square back to the integers up to rounding
    assert np.allclose(np.real(np.diag(n)), np.tile([0.0, 1.0, 2.0, 3.0], 2),
                       atol=1e-12)


def test_sz_eigenvalues_dicke_n2():
    ops = qstate.build_operator_set(qstate.HilbertSpaceSpec(2, 1))
    eigs = sorted(set(np.round(np.real(np.diag(ops.Sz)), 12)))
    assert eigs == [-1.0, 0.0, 1.0]


def test_commutator_canonical_below_cutoff():
    a = qstate.boson_annihilation(8)
    comm = a @ a.conj().T - a.conj().T @ a
    defect = comm - np.eye(9)
    assert np.max(np.abs(defect[:8, :8])) < 1e-14
    # all deviation sits in the cutoff corner
    assert defect[8, 8] == pytest.approx(-9.0)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 6])
def test_ladder_amplitudes(n):
    Sz, Sp, Sm = qstate.collective_spin_ops(n)
    S = n / 2
    m = S - np.arange(n + 1)
    for i in range(1, n + 1):
        expected = np.sqrt(S * (S + 1) - m[i] * (m[i] + 1))
        assert Sp[i - 1, i] == pytest.approx(expected, abs=1e-12)
    assert np.array_equal(Sm, Sp.conj().T)


def test_builtin_operators_exactly_hermitian():
    ops = qstate.build_operator_set(qstate.HilbertSpaceSpec(3, 4))
    for O in (ops.Sz, ops.a_dag @ ops.a):
        assert np.max(np.abs(O - O.conj().T)) == 0.0


def test_invalid_spaces():
    with pytest.raises(InvalidSpaceError):
        qstate.HilbertSpaceSpec(0, 3)
    with pytest.raises(InvalidSpaceError):
        qstate.HilbertSpaceSpec(1, 0)
    with pytest.raises(InvalidSpaceError):
        qstate.HilbertSpaceSpec(11, 1, spin_sector="single")


def test_single_spin_sector_contains_dicke_ladder():
    ops = qstate.build_operator_set(
        qstate.HilbertSpaceSpec(2, 1, spin_sector="single")
    )
    eigs = np.sort(np.real(np.linalg.eigvalsh(ops.Sz)))
    assert np.allclose(sorted(set(np.round(eigs, 10))), [-1.0, 0.0, 1.0])
    assert ops.Sz.shape == (8, 8)


def test_tensor_identities():
    eye2 = np.eye(2)
    assert np.array_equal(qstate.tensor_product(eye2, eye2), np.eye(4))
    got = qstate.tensor_product(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
    assert np.array_equal(got, np.diag([3.0, 4.0, 6.0, 8.0]))


def test_tensor_action_on_product_vectors(rng):
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    x = rng.normal(size=2) + 1j * rng.normal(size=2)
    y = rng.normal(size=2) + 1j * rng.normal(size=2)
    lhs = qstate.tensor_product(A, B) @ np.kron(x, y)
    rhs = np.kron(A @ x, B @ y)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_tensor_associativity(rng):
    mats = [
        rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3)
    ]
    left = qstate.tensor_product(qstate.tensor_product(mats[0], mats[1]), mats[2])
    right = qstate.tensor_product(mats[0], qstate.tensor_product(mats[1], mats[2]))
    assert np.max(np.abs(left - right)) < 1e-12


def test_validate_density_matrix_cases():
    pure = np.zeros((3, 3), dtype=complex)
    pure[0, 0] = 1.0
    d = qstate.validate_density_matrix(pure)
    assert d["hermiticity_defect"] == 0.0
    assert d["trace_defect"] == 0.0
    assert d["min_eigenvalue"] == pytest.approx(0.0, abs=1e-12)

    mixed = np.diag([0.5, 0.5, 0.0]).astype(complex)
    d = qstate.validate_density_matrix(mixed)
    assert d["ok"]
    assert d["min_eigenvalue"] == pytest.approx(0.0, abs=1e-12)
    assert np.linalg.eigvalsh(mixed)[-1] == pytest.approx(0.5)

    with pytest.raises(ShapeError):
        qstate.validate_density_matrix(np.zeros((2, 3)))


def test_trace_distance_orthogonal_states():
    a = np.zeros((2, 2), dtype=complex)
    a[0, 0] = 1.0
    b = np.zeros((2, 2), dtype=complex)
    b[1, 1] = 1.0
    assert qstate.trace_distance(a, b) == pytest.approx(1.0)
    assert qstate.trace_distance(a, a) == pytest.approx(0.0)


def test_boson_level_populations(rng):
    space = qstate.HilbertSpaceSpec(1, 3)
    rho = random_density(rng, space.dim)
    pops = qstate.boson_level_populations(rho, space)
    assert pops.shape == (4,)
    assert np.sum(pops) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ShapeError):
        qstate.boson_level_populations(rho[:3, :3], space)


def test_state_vector_validation(rng):
    psi = random_state(rng, 5)
    qstate.validate_state_vector(psi)
    with pytest.raises(ShapeError):
        qstate.validate_state_vector(psi * 1.5)
    with pytest.raises(ShapeError):
        qstate.validate_state_vector(np.zeros(4))
