import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import symflow as sf
from symflow.errors import (
    DimensionMismatch,
    InvalidGamma,
    NotCoisotropic,
    NotLagrangian,
    UnbalancedEigenspaces,
)
from symflow.verification import planted_anticommuting, random_lagrangian, rng_for


def col(*entries):
    return np.array(entries, dtype=complex).reshape(-1, 1)


class TestStandardSpace:
    def test_gamma_block_form(self):
        sp = sf.standard_space(1)
        np.testing.assert_allclose(sp.gamma, np.array([[0, -1], [1, 0]], dtype=complex))

    def test_plus_eigenvector_n1(self):
        sp = sf.standard_space(1)
        v = sp.basis_plus[:, 0] * np.sqrt(2)
        np.testing.assert_allclose(v, np.array([1, -1j]), atol=1e-14)

    def test_gamma_squares_to_minus_identity(self):
        sp = sf.standard_space(2)
        np.testing.assert_allclose(sp.gamma @ sp.gamma, -np.eye(4), atol=0)

    def test_bases_orthonormal_and_eigen(self):
        sp = sf.standard_space(3)
        b = np.hstack([sp.basis_plus, sp.basis_minus])
        np.testing.assert_allclose(b.conj().T @ b, np.eye(6), atol=1e-14)
        np.testing.assert_allclose(sp.gamma @ sp.basis_plus, 1j * sp.basis_plus, atol=1e-14)
        np.testing.assert_allclose(sp.gamma @ sp.basis_minus, -1j * sp.basis_minus, atol=1e-14)


class TestSpaceFromGamma:
    def test_standard_matrix_accepted(self):
        sp = sf.space_from_gamma(np.array([[0, -1], [1, 0]], dtype=complex))
        assert sp.dim_half == 1

    def test_both_eigenvalues_plus_i_rejected(self):
        with pytest.raises(UnbalancedEigenspaces):
            sf.space_from_gamma(np.diag([1j, 1j]))

    def test_non_skew_rejected(self):
        with pytest.raises(InvalidGamma):
            sf.space_from_gamma(np.eye(2))

    def test_odd_size_rejected(self):
        with pytest.raises(InvalidGamma):
            sf.space_from_gamma(1j * np.eye(3))

    def test_conjugated_structure_round_trips(self):
        rng = rng_for(7, 99)
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        q, _ = np.linalg.qr(z)
        gamma = q @ np.diag([1j, 1j, -1j, -1j]) @ q.conj().T
        sp = sf.space_from_gamma(gamma)
        assert sp.dim_half == 2
        np.testing.assert_allclose(sp.gamma @ sp.gamma, -np.eye(4), atol=1e-12)
        # eigenbases diagonalize gamma again
        np.testing.assert_allclose(sp.gamma @ sp.basis_plus, 1j * sp.basis_plus, atol=1e-10)


class TestLagrangian:
    def test_graph_map_values_of_the_three_standard_lines(self):
        sp = sf.standard_space(1)
        for vec, phi in (((1, 0), 1.0), ((1, 1), -1j), ((0, 1), -1.0)):
            lag = sf.lagrangian_from_frame(sp, col(*vec))
            assert abs(lag.phi[0, 0] - phi) < 1e-12

    def test_gamma_eigenline_is_not_lagrangian(self):
        sp = sf.standard_space(1)
        with pytest.raises(NotLagrangian):
            sf.lagrangian_from_frame(sp, col(1, 1j))

    def test_wrong_dimension_rejected(self):
        sp = sf.standard_space(2)
        with pytest.raises(NotLagrangian):
            sf.lagrangian_from_frame(sp, col(1, 0, 0, 0))

    def test_phi_constructor_inverts_extraction(self):
        sp = sf.standard_space(1)
        lag = sf.lagrangian_from_phi(sp, np.array([[1.0]]))
        assert sf.subspace_distance(lag.frame, col(1, 0)) < 1e-12

    def test_phi_round_trip_on_random_lagrangians(self):
        rng = rng_for(2, 98)
        for _ in range(100):
            n = int(rng.integers(1, 7))
            sp = sf.standard_space(n)
            lag = random_lagrangian(sp, rng)
            again = sf.lagrangian_from_phi(sp, lag.phi)
            assert sf.subspace_distance(lag, again) < 1e-10

    def test_phi_identity_unwinds_to_plus_basis_graph(self):
        sp = sf.standard_space(2)
        lag = sf.lagrangian_from_phi(sp, np.eye(2))
        expected = (sp.basis_plus + sp.basis_minus) / np.sqrt(2)
        assert sf.subspace_distance(lag.frame, expected) < 1e-12


class TestProjection:
    def test_line_projection_matrix(self):
        sp = sf.standard_space(1)
        p = sf.projection_of(sf.lagrangian_from_frame(sp, col(1, 0)))
        np.testing.assert_allclose(p.matrix, np.diag([1.0, 0.0]), atol=1e-14)

    def test_defining_identity_for_random_lagrangians(self):
        rng = rng_for(3, 97)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            sp = sf.standard_space(n)
            p = sf.projection_of(random_lagrangian(sp, rng)).matrix
            lhs = sp.gamma @ p @ sp.gamma.conj().T
            np.testing.assert_allclose(lhs + p, np.eye(2 * n), atol=1e-12)

    def test_transmission_projection_block_form(self):
        # projection onto the complement of the diagonal in H + H
        d = np.vstack([np.eye(2), np.eye(2)]) / np.sqrt(2)
        p_delta = np.eye(4) - d @ d.conj().T
        expected = 0.5 * np.block([[np.eye(2), -np.eye(2)], [-np.eye(2), np.eye(2)]])
        np.testing.assert_allclose(p_delta, expected, atol=1e-14)


class TestIntersection:
    def test_equal_lagrangians(self):
        sp = sf.standard_space(3)
        lag = random_lagrangian(sp, rng_for(4, 96))
        assert sf.intersection_dim(lag, lag) == 3

    def test_transverse_lines(self):
        sp = sf.standard_space(1)
        l1 = sf.lagrangian_from_frame(sp, col(1, 0))
        l2 = sf.lagrangian_from_frame(sp, col(0, 1))
        assert sf.intersection_dim(l1, l2) == 0

    def test_planted_overlap_dimensions(self):
        rng = rng_for(5, 95)
        for _ in range(50):
            n = int(rng.integers(2, 6))
            sp = sf.standard_space(n)
            k = int(rng.integers(0, n + 1))
            l1 = random_lagrangian(sp, rng)
            v = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            q, _ = np.linalg.qr(v)
            d = np.exp(1j * np.concatenate([np.zeros(k), rng.uniform(0.4, 2.7, n - k)]))
            l2 = sf.lagrangian_from_phi(sp, l1.phi @ q @ np.diag(d) @ q.conj().T)
            assert sf.intersection_dim(l1, l2) == k
            assert sf.intersection_dim(l2, l1) == k


class TestSubspaceDistance:
    def test_equal_gives_zero(self):
        f = col(1, 2) / np.sqrt(5)
        assert sf.subspace_distance(f, f) == 0.0

    def test_orthogonal_lines_give_one(self):
        assert abs(sf.subspace_distance(col(1, 0), col(0, 1)) - 1.0) < 1e-14

    @given(st.floats(min_value=-1.5, max_value=1.5))
    @settings(max_examples=40, deadline=None)
    def test_rotated_line_closed_form(self, t):
        f = col(np.cos(t), np.sin(t))
        assert abs(sf.subspace_distance(col(1, 0), f) - abs(np.sin(t))) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            sf.subspace_distance(col(1, 0), np.eye(2))


class TestSymplecticReduce:
    def test_full_space_reduction_is_identity(self):
        sp = sf.standard_space(2)
        lag = random_lagrangian(sp, rng_for(6, 94))
        red = sf.symplectic_reduce(lag, np.eye(4))
        assert red.space.dim == 4
        assert sf.subspace_distance(red.embedded_frame, lag.frame) < 1e-10

    def test_not_coisotropic_rejected(self):
        sp = sf.standard_space(2)
        lag = random_lagrangian(sp, rng_for(7, 93))
        # a Lagrangian plane is isotropic, not coisotropic, in dim 4
        with pytest.raises(NotCoisotropic):
            sf.symplectic_reduce(lag, random_lagrangian(sp, rng_for(8, 92)).frame)

    def test_blockwise_product_reduces_blockwise(self):
        # three-block toy space; reduce by (one block's Lagrangian direction
        # + the other two blocks); the result is the product of the pieces
        sp = sf.standard_space(3)
        rng = rng_for(9, 91)
        lag1 = random_lagrangian(sf.standard_space(1), rng)
        lag2 = random_lagrangian(sf.standard_space(2), rng)
        # embed into the interleaved standard space: block 1 = coords (0, 3),
        # block 2 = coords (1, 2, 4, 5)
        frame = np.zeros((6, 3), dtype=complex)
        frame[[0, 3], 0] = lag1.frame[:, 0]
        frame[[1, 4], 1] = lag2.frame[[0, 2], 0]
        frame[[2, 5], 1] += lag2.frame[[1, 3], 0]
        frame[[1, 4], 2] = lag2.frame[[0, 2], 1]
        frame[[2, 5], 2] += lag2.frame[[1, 3], 1]
        big = sf.lagrangian_from_frame(sp, frame)
        # coisotropic U = (isotropic line inside block 1) + block 2
        iso = np.zeros((6, 1), dtype=complex)
        iso[[0, 3], 0] = lag1.frame[:, 0]
        rest = np.zeros((6, 4), dtype=complex)
        rest[1, 0] = rest[2, 1] = rest[4, 2] = rest[5, 3] = 1.0
        red = sf.symplectic_reduce(big, np.hstack([iso, rest]))
        assert red.space.dim == 4
        # the reduction equals the block-2 factor, embedded
        expect = np.zeros((6, 2), dtype=complex)
        expect[[1, 4], 0] = lag2.frame[[0, 2], 0]
        expect[[2, 5], 0] += lag2.frame[[1, 3], 0]
        expect[[1, 4], 1] = lag2.frame[[0, 2], 1]
        expect[[2, 5], 1] += lag2.frame[[1, 3], 1]
        assert sf.subspace_distance(red.embedded_frame, expect) < 1e-9

    def test_reduction_of_cylinder_cauchy_data_is_kernel_diagonal(self):
        # R_0 of the interval Cauchy data equals the diagonal of the doubled
        # kernel block (the limiting-value Lagrangian)
        from symflow import model_dirac as md

        rng = rng_for(10, 90)
        sp = sf.standard_space(2)
        a = planted_anticommuting(sp, [1.3], rng)
        op = md.build_model(sp, a, md.Interval(0.9))
        dbs = md.double_boundary(op)
        lx = md.cauchy_data(op, dbs)
        vals, vecs = np.linalg.eigh(dbs.a_tilde)
        u_frame = vecs[:, vals <= 1e-9]
        red = sf.symplectic_reduce(lx, u_frame)
        kf = op.kernel.frame
        diag = np.vstack([kf, kf]) / np.sqrt(2)
        assert sf.subspace_distance(red.embedded_frame, diag) < 1e-9


class TestBasisIndependence:
    def test_invariants_stable_under_rebasing(self):
        rng = rng_for(11, 89)
        sp = sf.standard_space(2)
        frames = [random_lagrangian(sp, rng).frame for _ in range(2)]
        base = [sf.lagrangian_from_frame(sp, f) for f in frames]
        d0 = sf.intersection_dim(*base)
        for _ in range(10):
            other = sf.rebased_space(sp, rng)
            moved = [sf.lagrangian_from_frame(other, f) for f in frames]
            assert sf.intersection_dim(*moved) == d0
            # phi itself is allowed to change
            assert moved[0].phi.shape == base[0].phi.shape
