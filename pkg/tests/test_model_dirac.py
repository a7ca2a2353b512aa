import numpy as np
import pytest

import symflow as sf
from symflow import model_dirac as md
from symflow.errors import (
    AnticommutationFailure,
    IncompatibleBoundary,
    NotLagrangian,
    ResonanceViolation,
)
from symflow.model_dirac import (
    _block_root_function,
    _real_line_rep,
    _split_along_blocks,
)
from symflow.verification import (
    planted_anticommuting,
    random_boundary_on_h,
    random_lagrangian,
    random_model,
    random_split_boundary,
    rng_for,
)


def line(sp, angle):
    return sf.lagrangian_from_frame(
        sp, np.array([[np.cos(angle)], [np.sin(angle)]], dtype=complex))


@pytest.fixture(scope="module")
def mu_one_model():
    sp = sf.standard_space(1)
    return md.build_model(sp, np.diag([1.0, -1.0]), md.Interval(1.0))


@pytest.fixture(scope="module")
def zero_mode_model():
    sp = sf.standard_space(1)
    return md.build_model(sp, np.zeros((2, 2)), md.Interval(1.0))


class TestBuildModel:
    def test_single_block(self, mu_one_model):
        op = mu_one_model
        assert [b.mu for b in op.blocks] == [1.0]
        assert op.kernel is None

    def test_zero_tangential_operator_is_all_kernel(self):
        sp = sf.standard_space(2)
        op = md.build_model(sp, np.zeros((4, 4)), md.Interval(1.0))
        assert not op.blocks
        assert op.kernel.frame.shape == (4, 4)

    def test_planted_blocks_recovered(self):
        rng = rng_for(51, 30)
        for _ in range(10):
            n = int(rng.integers(2, 5))
            sp = sf.standard_space(n)
            k = int(rng.integers(1, n + 1))
            mus = sorted(rng.uniform(0.3, 3.0, size=k))
            a = planted_anticommuting(sp, mus, rng)
            op = md.build_model(sp, a, md.Interval(1.0))
            np.testing.assert_allclose([b.mu for b in op.blocks], mus, atol=1e-9)
            ker_dim = 2 * (n - k)
            assert (op.kernel.frame.shape[1] if op.kernel else 0) == ker_dim

    def test_commuting_a_rejected(self):
        sp = sf.standard_space(1)
        with pytest.raises(AnticommutationFailure):
            md.build_model(sp, np.eye(2), md.Interval(1.0))

    def test_in_block_relations(self, mu_one_model):
        op = mu_one_model
        b = op.blocks[0]
        a_block = b.frame.conj().T @ op.a_matrix @ b.frame
        g_block = b.frame.conj().T @ op.space.gamma @ b.frame
        np.testing.assert_allclose(a_block, np.diag([1.0, -1.0]), atol=1e-12)
        np.testing.assert_allclose(g_block, np.array([[0, -1], [1, 0]]), atol=1e-12)


class TestCauchyData:
    def test_zero_tangential_gives_diagonal(self, zero_mode_model):
        dbs = md.double_boundary(zero_mode_model)
        lx = md.cauchy_data(zero_mode_model, dbs)
        assert sf.subspace_distance(lx, md.transmission_lagrangian(dbs)) < 1e-12

    def test_single_block_graph_of_matrix_exponential(self, mu_one_model):
        from scipy.linalg import expm

        dbs = md.double_boundary(mu_one_model)
        lx = md.cauchy_data(mu_one_model, dbs)
        raw = np.vstack([np.eye(2), expm(-mu_one_model.a_matrix)])
        from symflow._linalg import orthonormal_columns

        assert sf.subspace_distance(lx.frame, orthonormal_columns(raw)) < 1e-12

    def test_short_interval_approaches_diagonal(self, mu_one_model):
        dbs = md.double_boundary(mu_one_model)
        delta = md.transmission_lagrangian(dbs)
        dists = [sf.subspace_distance(
            md.cauchy_data(mu_one_model, dbs, length=ell), delta)
            for ell in (0.5, 0.1, 0.01, 0.001)]
        assert all(b < a for a, b in zip(dists, dists[1:]))
        assert dists[-1] < 2e-3

    def test_always_lagrangian(self):
        rng = rng_for(52, 29)
        for _ in range(10):
            op, _ = random_model(rng)
            md.cauchy_data(op)  # raises NotLagrangian on any defect


class TestIntervalSpectrum:
    def test_aligned_kernel_block_is_pi_lattice(self, zero_mode_model):
        sp = zero_mode_model.space
        p = line(sp, 0.0)
        q = sf.gamma_conjugate(p)  # im Q = gamma p = ker P: theta = 0
        lams = md.interval_spectrum(zero_mode_model, p, q, 7.0)
        expected = np.array([-2, -1, 0, 1, 2]) * np.pi
        np.testing.assert_allclose(lams, expected, atol=1e-10)

    def test_rotated_kernel_block_offset(self, zero_mode_model):
        sp = zero_mode_model.space
        p = line(sp, 0.0)
        q = line(sp, 0.3)  # ker P at pi/2, im Q at 0.3: theta = pi/2 - 0.3
        lams = md.interval_spectrum(zero_mode_model, p, q, 7.0)
        theta = (np.pi / 2 - 0.3) % np.pi
        ms = np.arange(-3, 3)
        expected = np.sort([theta + m * np.pi for m in ms
                            if abs(theta + m * np.pi) <= 7.0])
        np.testing.assert_allclose(lams, expected, atol=1e-10)

    def test_dense_grid_scan_oracle(self, mu_one_model):
        op = mu_one_model
        rng = rng_for(53, 28)
        for _ in range(5):
            p = random_boundary_on_h(op, rng)
            q = random_boundary_on_h(op, rng)
            lams = md.interval_spectrum(op, p, q, 12.0)
            tr_p = _split_along_blocks(op, sf.gamma_conjugate(p), 1e-9)
            tr_q = _split_along_blocks(op, q, 1e-9)
            f = _block_root_function(1.0, 1.0, _real_line_rep(tr_p[0]),
                                     _real_line_rep(tr_q[0]))
            grid = np.arange(-12.0, 12.0, 1e-4)
            vals = f(grid)
            brute = grid[:-1][np.sign(vals[:-1]) * np.sign(vals[1:]) < 0] + 5e-5
            assert lams.size == brute.size
            assert np.max(np.abs(lams - brute)) < 1e-4

    def test_spectral_symmetry_seeded(self):
        rng = rng_for(54, 27)
        for _ in range(10):
            op, _ = random_model(rng)
            p = random_boundary_on_h(op, rng)
            q = random_boundary_on_h(op, rng)
            md.model_symmetry_check(op, p, q, window=15.0, tol=1e-8)

    def test_incompatible_boundary_rejected(self):
        rng = rng_for(55, 26)
        sp = sf.standard_space(2)
        a = planted_anticommuting(sp, [0.7, 1.4], rng)
        op = md.build_model(sp, a, md.Interval(1.0))
        # generic Lagrangian mixes the blocks
        bad = random_lagrangian(sp, rng)
        good = random_boundary_on_h(op, rng)
        with pytest.raises(IncompatibleBoundary):
            md.interval_spectrum(op, bad, good, 5.0)

    def test_kernel_dim_matches_root_count(self):
        rng = rng_for(56, 25)
        for _ in range(10):
            op, _ = random_model(rng)
            dbs = md.double_boundary(op)
            p = random_boundary_on_h(op, rng)
            q = random_boundary_on_h(op, rng)
            spec = md.interval_spectrum(op, p, q, 10.0)
            constraint = md.direct_sum_lagrangian(dbs, sf.gamma_conjugate(p), q)
            assert (int(np.sum(np.abs(spec) < 1e-7))
                    == md.interval_kernel_dim(op, constraint, dbs))


class TestCircleSpectrum:
    def test_kernel_block_fourier_lattice(self):
        sp = sf.standard_space(1)
        op = md.build_model(sp, np.zeros((2, 2)), md.Circle(2 * np.pi))
        lams = md.circle_spectrum(op, 3.5)
        expected = np.sort(np.repeat(np.arange(-3, 4), 2)).astype(float)
        np.testing.assert_allclose(lams, expected, atol=1e-12)

    def test_gapped_block_minimum(self):
        sp = sf.standard_space(1)
        op = md.build_model(sp, np.diag([1.0, -1.0]), md.Circle(2.0))
        lams = md.circle_spectrum(op, 10.0)
        assert np.min(np.abs(lams)) == 1.0
        assert np.all(lams != 0)

    def test_symmetric_so_eta_vanishes(self):
        sp = sf.standard_space(1)
        op = md.build_model(sp, np.diag([1.5, -1.5]), md.Circle(1.7))
        lams = md.circle_spectrum(op, 25.0)
        np.testing.assert_allclose(lams, -lams[::-1], atol=1e-12)

    def test_transmission_condition_reproduces_circle(self):
        rng = rng_for(57, 24)
        for _ in range(5):
            n = int(rng.integers(1, 3))
            sp = sf.standard_space(n)
            k = int(rng.integers(0, n + 1))
            mus = sorted(rng.uniform(0.4, 2.0, size=k))
            a = planted_anticommuting(sp, mus, rng)
            c = float(rng.uniform(1.0, 2.5))
            circle = md.build_model(sp, a, md.Circle(c))
            interval = md.build_model(sp, a, md.Interval(c))
            dbs = md.double_boundary(interval)
            got = md.boundary_spectrum(interval, md.transmission_lagrangian(dbs),
                                       9.0, dbs=dbs)
            want = md.circle_spectrum(circle, 9.0)
            assert got.size == want.size
            np.testing.assert_allclose(got, want, atol=1e-8)


class TestEtaTruncated:
    def test_lattice_closed_form_against_hurwitz_zeta(self):
        # eta of {(a + k) d} must match the analytic continuation
        # zeta(s, a) - zeta(s, 1-a) at s = 0
        mp = pytest.importorskip("mpmath")
        for a in (0.1, 0.25, 0.5, 0.8):
            eta, ker = md.eta_lattice(a)
            analytic = float(mp.zeta(0, a) - mp.zeta(0, 1 - a))
            assert abs(eta - analytic) < 1e-12
            assert ker == 0
        assert md.eta_lattice(0.0) == (0.0, 1)

    def test_symmetric_sum_estimator_on_lattices(self):
        for a in (0.1, 0.25, 0.4, 0.8):
            lams = (a + np.arange(-100_000, 100_000)) * 0.37
            est = md.eta_truncated(lams, n_max=100_000)
            assert abs(est.eta - (1 - 2 * a)) < 1e-3
            assert abs(est.eta - (1 - 2 * a)) <= est.bound

    def test_quarter_offset_matches_closed_form(self):
        lams = (0.25 + np.arange(-100_000, 100_000)) * np.pi
        est = md.eta_truncated(lams, n_max=100_000)
        eta_closed, _ = md.eta_lattice(0.25)
        assert abs(est.eta - eta_closed) < 1e-3

    def test_symmetric_spectrum_is_exact_zero(self):
        lams = np.concatenate([np.arange(1, 2000), -np.arange(1, 2000)]) * 0.618
        est = md.eta_truncated(lams)
        assert est.eta == 0.0

    def test_zero_mode_closed_form_mode(self):
        est = md.eta_truncated([0.25, 0.75], mode="zero-mode-closed-form")
        assert est.eta == 0.0 and est.bound == 0.0

    def test_convergence_guard(self):
        lams = (0.3 + np.arange(-40, 40)) * 1.0
        with pytest.raises(sf.errors.ConvergenceTooSlow):
            md.eta_truncated(lams, require_bound=1e-9)

    def test_interval_eta_against_swap_symmetry(self):
        # eta~(D_{P,Q}) + eta~(D_{Q,P}) = dim ker (spectral antisymmetry)
        rng = rng_for(58, 23)
        for _ in range(6):
            op, _ = random_model(rng, n_half_max=2)
            dbs = md.double_boundary(op)
            p = random_boundary_on_h(op, rng)
            q = random_boundary_on_h(op, rng)
            c1 = md.direct_sum_lagrangian(dbs, sf.gamma_conjugate(p), q)
            c2 = md.direct_sum_lagrangian(dbs, sf.gamma_conjugate(q), p)
            e1, b1 = md.interval_eta_tilde(op, c1, dbs=dbs, n_max=4000)
            e2, b2 = md.interval_eta_tilde(op, c2, dbs=dbs, n_max=4000)
            ker = md.interval_kernel_dim(op, c1, dbs)
            assert abs((e1 + e2) - ker) <= b1 + b2 + 1e-9


class TestPTheta:
    def test_endpoints(self):
        rng = rng_for(59, 22)
        sp = sf.standard_space(2)
        p = sf.projection_of(random_lagrangian(sp, rng)).matrix
        d = p.shape[0]
        at0 = md.p_theta(p, 0.0)
        np.testing.assert_allclose(at0[:d, :d], p, atol=1e-14)
        np.testing.assert_allclose(at0[d:, d:], np.eye(d) - p, atol=1e-14)
        np.testing.assert_allclose(at0[:d, d:], 0, atol=1e-14)
        at45 = md.p_theta(p, np.pi / 4)
        expected = 0.5 * np.block([[np.eye(d), -np.eye(d)], [-np.eye(d), np.eye(d)]])
        np.testing.assert_allclose(at45, expected, atol=1e-14)

    def test_projection_laws_along_theta(self):
        rng = rng_for(60, 21)
        sp = sf.standard_space(1)
        p = sf.projection_of(random_lagrangian(sp, rng)).matrix
        for theta in np.linspace(0, np.pi / 4, 20):
            m = md.p_theta(p, float(theta))
            np.testing.assert_allclose(m, m.conj().T, atol=1e-13)
            np.testing.assert_allclose(m @ m, m, atol=1e-13)

    def test_kernel_membership_characterization(self):
        rng = rng_for(61, 20)
        sp = sf.standard_space(2)
        p = sf.projection_of(random_lagrangian(sp, rng)).matrix
        d = p.shape[0]
        for theta in (0.0, 0.3, np.pi / 4):
            m = md.p_theta(p, theta)
            vals, vecs = np.linalg.eigh(m)
            for j in range(len(vals)):
                in_kernel = vals[j] < 0.5
                assert md.p_theta_kernel_membership(p, theta, vecs[:, j]) == in_kernel


class TestCaldconst:
    def test_zero_mode_equal_lengths(self):
        sp = sf.standard_space(1)
        op = md.build_model(sp, np.zeros((2, 2)), md.Interval(np.pi))
        rec = md.caldconst_check(op, op)
        assert rec["target"] == 2  # = dim ker A
        assert all(d == 2 for d in rec["dims"])

    def test_gapped_blocks_have_trivial_intersection(self):
        sp = sf.standard_space(1)
        a = np.diag([1.0, -1.0])
        op_p = md.build_model(sp, a, md.Interval(1.0))
        op_m = md.build_model(sp, a, md.Interval(0.8))
        rec = md.caldconst_check(op_p, op_m)
        assert rec["target"] == 0
        assert all(d == 0 for d in rec["dims"])

    def test_seeded_mixed_models(self):
        rng = rng_for(62, 19)
        for _ in range(5):
            op_p, _ = random_model(rng, n_half_max=2)
            op_m = md.build_model(op_p.space, op_p.a_matrix,
                                  md.Interval(float(rng.uniform(0.5, 1.5))))
            md.caldconst_check(op_p, op_m)


class TestAdiabaticLimit:
    def test_zero_tangential_limit_is_kernel_diagonal(self, zero_mode_model):
        dbs = md.double_boundary(zero_mode_model)
        lim = md.adiabatic_limit(zero_mode_model, nu=0.0, dbs=dbs)
        assert sf.subspace_distance(lim, md.transmission_lagrangian(dbs)) < 1e-10

    def test_single_block_limit_matches_stretched_graph(self, mu_one_model):
        dbs = md.double_boundary(mu_one_model)
        lim = md.adiabatic_limit(mu_one_model, nu=0.0, dbs=dbs)
        far = md.cauchy_data(mu_one_model, dbs, length=50.0)
        assert sf.subspace_distance(far, lim) < 1e-8

    def test_filtered_projections_match_hand_construction(self):
        rng = rng_for(63, 18)
        sp = sf.standard_space(2)
        a = planted_anticommuting(sp, [0.9, 1.7], rng)
        op = md.build_model(sp, a, md.Interval(1.1))
        dbs = md.double_boundary(op)
        lim = md.adiabatic_limit(op, nu=0.0, dbs=dbs)
        # expected: per block, psi at slot 0 and gamma psi at slot 1 (the
        # positive tangential eigenspace of the doubled operator)
        cols = []
        d = sp.dim
        for b in op.blocks:
            c1 = np.zeros(2 * d, dtype=complex)
            c1[:d] = b.frame[:, 0]
            c2 = np.zeros(2 * d, dtype=complex)
            c2[d:] = b.frame[:, 1]
            cols.extend([c1, c2])
        expected = np.array(cols).T
        assert sf.subspace_distance(lim.frame, expected) < 1e-9

    def test_monotone_convergence_seeded(self):
        rng = rng_for(64, 17)
        for _ in range(5):
            op, mus = random_model(rng, n_half_max=2, allow_kernel=False)
            dbs = md.double_boundary(op)
            lim = md.adiabatic_limit(op, nu=0.0, dbs=dbs)
            mu_min = min(mus)
            dists = [sf.subspace_distance(
                md.cauchy_data(op, dbs, length=float(r)), lim)
                for r in np.linspace(2 / mu_min, 50 / mu_min, 6)]
            assert all(b <= a + 1e-12 for a, b in zip(dists, dists[1:]))
            assert dists[-1] < 1e-8

    def test_resonance_detected(self, mu_one_model):
        dbs = md.double_boundary(mu_one_model)
        # the anti-graph {(v, -e^{L A} v)}-style Lagrangian meets F^-:
        # build one that contains the negative tangential directions
        d = mu_one_model.space.dim
        b = mu_one_model.blocks[0]
        frame = np.zeros((2 * d, 2), dtype=complex)
        frame[:d, 0] = b.frame[:, 1]        # gamma psi at slot 0: A~ = -mu
        frame[d:, 1] = b.frame[:, 0]        # psi at slot 1: A~ = -mu
        bad = sf.lagrangian_from_frame(dbs.space, frame)
        with pytest.raises(ResonanceViolation):
            md.adiabatic_limit(mu_one_model, l_x=bad, nu=0.0, dbs=dbs)


class TestGlueVerify:
    def test_zero_mode_closed_forms(self):
        sp = sf.standard_space(1)
        op_p = md.build_model(sp, np.zeros((2, 2)), md.Interval(np.pi))
        op_m = md.build_model(sp, np.zeros((2, 2)), md.Interval(np.pi))
        dbs = md.double_boundary(op_p)
        a, b = 0.9, 0.9 - np.pi / 4
        p = md.direct_sum_lagrangian(dbs, line(sp, a), line(sp, b))
        rec = md.glue_verify(op_p, op_m, p)
        assert rec["tau_mu"] == -1
        assert rec["defect"] <= 1e-12
        assert rec["eta_circle"] == 1.0

    def test_calderon_boundary_condition_splits_additively(self):
        rng = rng_for(65, 16)
        sp = sf.standard_space(1)
        op_p = md.build_model(sp, np.zeros((2, 2)), md.Interval(1.3))
        op_m = md.build_model(sp, np.zeros((2, 2)), md.Interval(0.9))
        dbs = md.double_boundary(op_p)
        lx = md.cauchy_data(op_p, dbs)
        rec = md.glue_verify(op_p, op_m, lx)
        assert rec["tau_mu"] == 0
        assert rec["defect"] <= 1e-12

    def test_mixed_model_within_truncation_bound(self):
        rng = rng_for(66, 15)
        sp = sf.standard_space(1)
        a = np.diag([1.0, -1.0])
        op_p = md.build_model(sp, a, md.Interval(1.0))
        op_m = md.build_model(sp, a, md.Interval(0.7))
        dbs = md.double_boundary(op_p)
        for _ in range(5):
            p = random_split_boundary(op_p, dbs, rng)
            rec = md.glue_verify(op_p, op_m, p, n_max=10_000)
            assert rec["defect"] <= rec["bound"] + 1e-9
            assert rec["bound"] <= 5e-3


class TestNicolaescu:
    def test_rotation_flows(self, zero_mode_model):
        op = zero_mode_model
        dbs = md.double_boundary(op)
        sp = op.space
        qfix = line(sp, 0.0)
        for turns, expected in ((1.0, 1), (-1.0, -1), (2.0, 2)):
            fam = [(float(t), md.direct_sum_lagrangian(
                dbs, line(sp, 0.15 + t * np.pi * turns), qfix))
                for t in np.linspace(0, 1, 33 + 16 * int(abs(turns)))]
            rec = md.nicolaescu_verify(op, fam, window=12.0)
            assert rec["sf"] == rec["maslov"] == expected

    def test_constant_path(self, mu_one_model):
        dbs = md.double_boundary(mu_one_model)
        rng = rng_for(67, 14)
        bnd = random_split_boundary(mu_one_model, dbs, rng)
        fam = [(t, bnd) for t in np.linspace(0, 1, 5)]
        rec = md.nicolaescu_verify(mu_one_model, fam, window=10.0)
        assert rec["sf"] == rec["maslov"] == 0


class TestSwModZ:
    def test_equal_conditions_vanish(self, zero_mode_model):
        dbs = md.double_boundary(zero_mode_model)
        p = md.cauchy_data(zero_mode_model, dbs)
        rec = md.sw_modz_check(zero_mode_model, p, p)
        assert rec["delta_eta"] == 0.0

    def test_rotating_condition_linear_law(self, zero_mode_model):
        op = zero_mode_model
        dbs = md.double_boundary(op)
        sp = op.space
        qfix = line(sp, 0.2)
        angles = np.linspace(0.3, 1.2, 7)  # stays clear of the kernel crossing
        deltas = []
        for ang in angles:
            p = md.direct_sum_lagrangian(dbs, line(sp, ang), qfix)
            rec = md.sw_modz_check(op, p)
            deltas.append(rec["delta_eta"])
        diffs = np.diff(deltas)
        # eta~ changes linearly in the rotation angle with slope -1/pi
        step = angles[1] - angles[0]
        np.testing.assert_allclose(diffs, -step / np.pi, atol=1e-9)

    def test_seeded_zero_mode_multiline(self):
        rng = rng_for(68, 13)
        sp = sf.standard_space(2)
        op = md.build_model(sp, np.zeros((4, 4)), md.Interval(1.2))
        dbs = md.double_boundary(op)
        for _ in range(10):
            p = random_split_boundary(op, dbs, rng)
            md.sw_modz_check(op, p)

    def test_mixed_model_within_bound(self, mu_one_model):
        rng = rng_for(69, 12)
        dbs = md.double_boundary(mu_one_model)
        p = random_split_boundary(mu_one_model, dbs, rng)
        rec = md.sw_modz_check(mu_one_model, p, n_max=4000)
        assert rec["modz_defect"] <= 2 * np.pi * rec["bound"] + 1e-9
