import numpy as np
import pytest

from commutant.algebra import (
    diagonal_algebra,
    full_matrix_algebra,
    generate_algebra,
    hs_conditional_expectation,
    relative_commutant,
    scalar_algebra,
)
from commutant.blocks import (
    BlockStructure,
    block_algebra,
    minimal_central_projections,
    representative_unitary,
    structure_algebra,
    twirl_expectation,
    wedderburn,
)
from commutant.config import InvalidInputError, NumericConfig
from commutant.linalg import (
    haar_unitaries,
    haar_unitary,
    op_norm,
    random_matrix,
    subspace_equal,
)

CFG = NumericConfig()


def random_block_star_algebra(rng, blocks):
    """A conjugated (+) M_s (x) I_m algebra with a Haar change of basis."""
    n = sum(s * m for s, m in blocks)
    return block_algebra(blocks, haar_unitary(rng, n))


class TestCentralProjections:
    def test_full_matrix_algebra_has_identity_only(self):
        projs = minimal_central_projections(full_matrix_algebra(4), CFG)
        assert len(projs) == 1
        np.testing.assert_allclose(projs[0], np.eye(4))

    def test_masa_gives_rank_one_projections(self):
        projs = minimal_central_projections(diagonal_algebra(3), CFG)
        assert len(projs) == 3
        total = sum(projs)
        np.testing.assert_allclose(total, np.eye(3), atol=1e-10)
        for P in projs:
            np.testing.assert_allclose(P @ P, P, atol=1e-10)
            assert np.linalg.matrix_rank(P) == 1

    def test_partition_of_identity_on_random_block_algebras(self):
        rng = np.random.default_rng(40)
        for blocks in [((2, 1), (1, 2)), ((2, 2),), ((1, 1), (1, 1), (2, 1))]:
            A = random_block_star_algebra(rng, blocks)
            projs = minimal_central_projections(A, CFG)
            assert len(projs) == len(blocks)
            np.testing.assert_allclose(sum(projs), np.eye(A.ambient_dim), atol=1e-8)
            ranks = sorted(int(round(np.real(np.trace(P)))) for P in projs)
            assert ranks == sorted(s * m for s, m in blocks)


class TestWedderburn:
    @pytest.mark.parametrize(
        "blocks",
        [((3, 1),), ((1, 1), (1, 1), (1, 1)), ((2, 1), (1, 2)), ((2, 2),), ((2, 2), (1, 3), (3, 1))],
    )
    def test_recovers_planted_block_structure(self, blocks):
        rng = np.random.default_rng(sum(s * 10 + m for s, m in blocks))
        A = random_block_star_algebra(rng, blocks)
        st = wedderburn(A, CFG)
        assert sorted(st.blocks) == sorted(blocks)
        # conjugated basis elements must be exactly block form: rebuild and compare
        assert subspace_equal(structure_algebra(st).space, A.space, CFG)

    def test_blocks_sorted_descending(self):
        rng = np.random.default_rng(41)
        A = random_block_star_algebra(rng, ((1, 2), (3, 1), (2, 1)))
        st = wedderburn(A, CFG)
        assert st.blocks == ((3, 1), (2, 1), (1, 2))

    def test_full_and_scalar_and_masa(self):
        assert wedderburn(full_matrix_algebra(5), CFG).blocks == ((5, 1),)
        assert wedderburn(scalar_algebra(4), CFG).blocks == ((1, 4),)
        assert wedderburn(diagonal_algebra(3), CFG).blocks == ((1, 1), (1, 1), (1, 1))

    def test_unitary_is_unitary(self):
        rng = np.random.default_rng(42)
        A = random_block_star_algebra(rng, ((2, 1), (1, 1)))
        st = wedderburn(A, CFG)
        np.testing.assert_allclose(
            st.unitary @ st.unitary.conj().T, np.eye(3), atol=1e-10
        )

    def test_rejects_non_star_algebra(self):
        A = generate_algebra([np.array([[0, 1.0], [0, 0]])], CFG)
        with pytest.raises(InvalidInputError):
            wedderburn(A, CFG)

    def test_deterministic_given_config(self):
        rng = np.random.default_rng(43)
        A = random_block_star_algebra(rng, ((2, 1), (1, 2)))
        st1 = wedderburn(A, CFG)
        st2 = wedderburn(A, CFG)
        np.testing.assert_array_equal(st1.unitary, st2.unitary)


class TestRepresentativeUnitary:
    def test_lands_in_the_algebra_and_is_unitary(self):
        rng = np.random.default_rng(44)
        A = random_block_star_algebra(rng, ((2, 1), (1, 2)))
        st = wedderburn(A, CFG)
        us = [haar_unitary(rng, s) for s, _ in st.blocks]
        U = representative_unitary(st, us)
        np.testing.assert_allclose(U @ U.conj().T, np.eye(4), atol=1e-10)
        assert A.space.residual(U) < 1e-8


class TestTwirl:
    def test_masa_twirl_is_diagonal_part(self):
        rng = np.random.default_rng(45)
        T = random_matrix(rng, 4)
        E = twirl_expectation(T, diagonal_algebra(4), CFG)
        np.testing.assert_allclose(E, np.diag(np.diag(T)), atol=1e-10)

    def test_scalar_twirl_is_normalized_trace(self):
        rng = np.random.default_rng(46)
        T = random_matrix(rng, 3)
        E = twirl_expectation(T, scalar_algebra(3), CFG)
        np.testing.assert_allclose(E, np.trace(T) / 3.0 * np.eye(3), atol=1e-10)

    def test_matches_monte_carlo_haar_average(self):
        rng = np.random.default_rng(47)
        A = random_block_star_algebra(rng, ((2, 1), (1, 1)))
        T = random_matrix(rng, 3)
        E = twirl_expectation(T, A, CFG)
        # oracle: empirical average of U* T U over Haar unitaries of the
        # commutant, assembled from its own planted block data
        C = relative_commutant(A, full_matrix_algebra(3), CFG)
        st = wedderburn(C, CFG)
        total = np.zeros((3, 3), dtype=complex)
        count = 20000
        samples = [
            haar_unitaries(np.random.default_rng(48 + i), s, count)
            for i, (s, _) in enumerate(st.blocks)
        ]
        for t in range(count):
            U = representative_unitary(st, [samples[i][t] for i in range(len(st.blocks))])
            total += U.conj().T @ T @ U
        np.testing.assert_allclose(E, total / count, atol=2e-2)

    def test_agrees_with_hs_projection_onto_double_commutant(self):
        # independent path: the twirl is the trace-preserving expectation onto
        # the double commutant, which equals the HS projection onto it
        rng = np.random.default_rng(49)
        for blocks in [((2, 1), (1, 2)), ((2, 2),), ((1, 1), (1, 2))]:
            A = random_block_star_algebra(rng, blocks)
            n = A.ambient_dim
            T = random_matrix(rng, n)
            E1 = twirl_expectation(T, A, CFG)
            from commutant.algebra import double_commutant

            D = double_commutant(A, full_matrix_algebra(n), CFG)
            E2 = hs_conditional_expectation(T, D, CFG)
            np.testing.assert_allclose(E1, E2, atol=1e-8)

    def test_channel_properties(self):
        rng = np.random.default_rng(50)
        A = random_block_star_algebra(rng, ((2, 1), (1, 1)))
        T = random_matrix(rng, 3)
        E = twirl_expectation(T, A, CFG)
        np.testing.assert_allclose(
            twirl_expectation(E, A, CFG), E, atol=1e-10
        )  # idempotent
        np.testing.assert_allclose(
            twirl_expectation(np.eye(3), A, CFG), np.eye(3), atol=1e-10
        )  # unital
        assert np.trace(E) == pytest.approx(np.trace(T), abs=1e-10)
        H = T + T.conj().T + 4 * np.eye(3)  # positive definite input
        w = np.linalg.eigvalsh(twirl_expectation(H, A, CFG))
        assert w.min() > -1e-10

    def test_contraction_toward_conjugates(self):
        # ||T - twirl(T)|| is at most the worst commutator norm over sampled
        # commutant unitaries times nothing: it lies in their convex hull
        rng = np.random.default_rng(51)
        A = random_block_star_algebra(rng, ((2, 1), (1, 1)))
        T = random_matrix(rng, 3)
        E = twirl_expectation(T, A, CFG)
        C = relative_commutant(A, full_matrix_algebra(3), CFG)
        st = wedderburn(C, CFG)
        worst = 0.0
        for t in range(200):
            us = [
                haar_unitaries(np.random.default_rng(52 + 7 * t + i), s, 1)[0]
                for i, (s, _) in enumerate(st.blocks)
            ]
            U = representative_unitary(st, us)
            worst = max(worst, op_norm(U @ T - T @ U))
        assert op_norm(T - E) <= worst + 1e-8


class TestBlockStructureValidation:
    def test_size_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            BlockStructure(5, np.eye(5), ((2, 1), (1, 1)))
