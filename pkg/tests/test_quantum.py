import numpy as np
import pytest

from conftest import random_density, random_unitary
from pcoh import quantum
from pcoh.errors import ConditioningError, ValidationError
from pcoh.fixtures import bell_density_matrix

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
P0 = np.outer(KET0, KET0)
P1 = np.outer(KET1, KET1)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


@pytest.fixture
def bell_state():
    return quantum.DensityState(bell_density_matrix(), (2, 2))


@pytest.fixture
def z_basis():
    return quantum.ProjectiveMeasurement((P0, P1))


def bloch_state(theta, phi):
    v = np.array([np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)])
    return quantum.DensityState(np.outer(v, v.conj()), (2,))


class TestDensityState:
    def test_rejects_bad_trace(self):
        with pytest.raises(ValidationError):
            quantum.DensityState(np.eye(2), (2,))

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            quantum.DensityState(np.diag([1.5, -0.5]), (2,))

    def test_dims_default(self):
        s = quantum.DensityState(np.eye(3) / 3.0)
        assert s.dims == (3,)


class TestBornProbabilities:
    def test_maximally_mixed(self, z_basis):
        rho = quantum.DensityState(np.eye(2) / 2.0, (2,))
        assert np.allclose(quantum.born_probabilities(rho, z_basis), [0.5, 0.5], atol=1e-12)

    def test_pure_basis_state(self, z_basis):
        rho = quantum.DensityState(P0, (2,))
        assert np.allclose(quantum.born_probabilities(rho, z_basis), [1.0, 0.0], atol=1e-12)

    def test_bell_local_projector(self, bell_state):
        m = quantum.ProjectiveMeasurement(
            (np.kron(P0, np.eye(2)), np.kron(P1, np.eye(2)))
        )
        p = quantum.born_probabilities(bell_state, m)
        # direct 4x4 trace: the projector overlaps half the Bell support
        want = float(np.trace(np.kron(P0, np.eye(2)) @ bell_state.matrix).real)
        assert abs(p[0] - want) <= 1e-12
        assert abs(p[0] - 0.5) <= 1e-12

    def test_invalid_pvm_rejected(self):
        with pytest.raises(ValidationError):
            quantum.ProjectiveMeasurement((P0, P0))
        with pytest.raises(ValidationError):
            quantum.ProjectiveMeasurement((np.diag([0.5, 0.0]), np.diag([0.5, 1.0])))


class TestLuders:
    def test_qubit_update(self):
        rho = quantum.DensityState(np.eye(2) / 2.0, (2,))
        post, p = quantum.luders_condition(rho, P0)
        assert abs(p - 0.5) <= 1e-12
        assert np.allclose(post.matrix, P0, atol=1e-12)

    def test_identity_projector_is_neutral(self, bell_state):
        post, p = quantum.luders_condition(bell_state, np.eye(4))
        assert abs(p - 1.0) <= 1e-12
        assert np.allclose(post.matrix, bell_state.matrix, atol=1e-12)

    def test_bell_support_projector_fixes_state(self, bell_state):
        pi = np.kron(P0, P0) + np.kron(P1, P1)
        post, p = quantum.luders_condition(bell_state, pi)
        assert abs(p - 1.0) <= 1e-12
        assert np.allclose(post.matrix, bell_state.matrix, atol=1e-12)

    def test_zero_probability_raises(self):
        rho = quantum.DensityState(P0, (2,))
        with pytest.raises(ConditioningError):
            quantum.luders_condition(rho, P1)

    def test_repeatability(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            rho = quantum.DensityState(random_density(rng, 4), (2, 2))
            pi = np.kron(P0, np.eye(2))
            once, _ = quantum.luders_condition(rho, pi)
            twice, p2 = quantum.luders_condition(once, pi)
            assert abs(p2 - 1.0) <= 1e-9
            assert np.linalg.norm(twice.matrix - once.matrix) <= 1e-9


class TestEvolve:
    def test_identity(self, bell_state):
        out = quantum.evolve(bell_state, np.eye(4))
        assert np.allclose(out.matrix, bell_state.matrix, atol=0.0)

    def test_hadamard_on_ground_state(self):
        rho = quantum.DensityState(P0, (2,))
        out = quantum.evolve(rho, HADAMARD)
        assert np.allclose(out.matrix, np.full((2, 2), 0.5), atol=1e-12)

    def test_local_unitaries_preserve_spectrum(self, bell_state):
        rng = np.random.default_rng(21)
        for _ in range(5):
            u = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
            out = quantum.evolve(bell_state, u)
            assert np.allclose(
                np.linalg.eigvalsh(out.matrix),
                np.linalg.eigvalsh(bell_state.matrix),
                atol=1e-10,
            )

    def test_composition(self):
        rng = np.random.default_rng(31)
        rho = quantum.DensityState(random_density(rng, 3), (3,))
        u = random_unitary(rng, 3)
        v = random_unitary(rng, 3)
        chained = quantum.evolve(quantum.evolve(rho, u), v)
        once = quantum.evolve(rho, v @ u)
        assert np.linalg.norm(chained.matrix - once.matrix) <= 1e-10

    def test_rejects_nonunitary(self, bell_state):
        with pytest.raises(ValidationError):
            quantum.evolve(bell_state, np.diag([1.0, 1.0, 1.0, 2.0]))


class TestMarginals:
    def test_bell_marginals(self, bell_state):
        for keep in (0, 1):
            out = quantum.marginal_operator(bell_state, keep)
            assert np.allclose(out, np.eye(2) / 2.0, atol=1e-12)

    def test_product_state(self):
        rng = np.random.default_rng(41)
        ra = random_density(rng, 2)
        rb = random_density(rng, 3)
        joint = quantum.DensityState(np.kron(ra, rb), (2, 3))
        assert np.allclose(quantum.marginal_operator(joint, 0), ra, atol=1e-12)

    def test_unit_trace(self):
        rng = np.random.default_rng(51)
        rho = quantum.DensityState(random_density(rng, 4), (2, 2))
        for keep in (0, 1):
            out = quantum.marginal_operator(rho, keep)
            assert abs(np.trace(out).real - 1.0) <= 1e-12

    def test_commutes_with_local_conditioning(self):
        # conditioning one factor of a product state, then taking that
        # factor's marginal, equals conditioning the marginal directly
        rng = np.random.default_rng(61)
        for _ in range(5):
            ra = random_density(rng, 2)
            rb = random_density(rng, 2)
            joint = quantum.DensityState(np.kron(ra, rb), (2, 2))
            pi = np.kron(P0, np.eye(2))
            post, _ = quantum.luders_condition(joint, pi)
            left = quantum.marginal_operator(post, 0)
            marg = quantum.DensityState(ra, (2,))
            right, _ = quantum.luders_condition(marg, P0)
            assert np.linalg.norm(left - right.matrix) <= 1e-9


class TestSic:
    def test_completeness(self):
        total = sum(quantum.qubit_sic())
        assert np.linalg.norm(total - np.eye(2)) <= 1e-12

    def test_traces(self):
        effects = quantum.qubit_sic()
        for e in effects:
            assert abs(np.trace(e).real - 0.5) <= 1e-12
        for i in range(4):
            for j in range(4):
                if i != j:
                    overlap = float(np.trace(effects[i] @ effects[j]).real)
                    assert abs(overlap - 1.0 / 12.0) <= 1e-12


class TestTotalProbability:
    def test_uniform_conditionals_give_uniform_output(self):
        q = np.full(4, 0.25)
        r = np.full((2, 4), 0.5)
        p = quantum.qbism_total_probability(q, r, 2)
        assert np.allclose(p, [0.5, 0.5], atol=1e-12)

    def test_maximally_mixed_matches_born(self, z_basis):
        rho = quantum.DensityState(np.eye(2) / 2.0, (2,))
        q = quantum.sic_probabilities(rho)
        r = quantum.sic_conditionals(z_basis)
        p = quantum.qbism_total_probability(q, r, 2)
        assert np.allclose(p, quantum.born_probabilities(rho, z_basis), atol=1e-9)

    def test_pure_state_matches_born(self, z_basis):
        rho = quantum.DensityState(P0, (2,))
        q = quantum.sic_probabilities(rho)
        r = quantum.sic_conditionals(z_basis)
        p = quantum.qbism_total_probability(q, r, 2)
        assert np.allclose(p, [1.0, 0.0], atol=1e-9)

    def test_bloch_sample_reproduces_born(self):
        # twenty spread points on the Bloch sphere, random measurement bases
        rng = np.random.default_rng(71)
        thetas = np.arccos(np.linspace(-1.0, 1.0, 20))
        phis = 2.0 * np.pi * np.arange(20) * 0.618
        for theta, phi in zip(thetas, phis):
            rho = bloch_state(theta, phi)
            u = random_unitary(rng, 2)
            basis = quantum.ProjectiveMeasurement(
                (
                    u @ P0 @ u.conj().T,
                    u @ P1 @ u.conj().T,
                )
            )
            q = quantum.sic_probabilities(rho)
            r = quantum.sic_conditionals(basis)
            p = quantum.qbism_total_probability(q, r, 2)
            assert np.allclose(p, quantum.born_probabilities(rho, basis), atol=1e-8)

    def test_malformed_inputs(self):
        with pytest.raises(ValidationError):
            quantum.qbism_total_probability(np.full(4, 0.3), np.full((2, 4), 0.5), 2)
        with pytest.raises(ValidationError):
            quantum.qbism_total_probability(np.full(4, 0.25), np.full((2, 4), 0.4), 2)
