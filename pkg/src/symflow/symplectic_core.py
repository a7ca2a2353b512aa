"""Finite-dimensional Hermitian symplectic spaces and Lagrangian subspaces.

A Hermitian symplectic space is C^{2n} with a unitary gamma satisfying
gamma^2 = -I, gamma* = -gamma and balanced +/-i eigenspaces; the symplectic
form is omega(x, y) = <x, gamma y>.  A Lagrangian subspace L satisfies
gamma(L) = L^perp and is carried here as an orthonormal frame together with
its graph unitary phi(L): E_i -> E_{-i}, expressed in the space's fixed
eigenbases, so that L = { x + phi(L) x : x in E_i }.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import (
    DEFAULT_TOL,
    as_complex_matrix,
    complement_within,
    count_unit_eigenvalues_at_one,
    intersect_subspaces,
    nearest_unitary,
    orthonormal_columns,
    phase_fix_columns,
    principal_angle_sines,
    readonly,
    require_unitary,
    subspace_gap,
)
from .errors import (
    DimensionMismatch,
    InvalidGamma,
    NotCoisotropic,
    NotLagrangian,
    ToleranceAmbiguity,
    UnbalancedEigenspaces,
)

__all__ = [
    "SymplecticSpace",
    "Lagrangian",
    "LagrangianProjection",
    "Reduction",
    "standard_space",
    "space_from_gamma",
    "lagrangian_from_frame",
    "lagrangian_from_phi",
    "projection_of",
    "intersection_dim",
    "symplectic_reduce",
    "subspace_distance",
    "gamma_rotate",
    "rebased_space",
]


@dataclass(frozen=True)
class SymplecticSpace:
    """C^{2n} with complex structure gamma and fixed orthonormal eigenbases.

    ``basis_plus`` spans ker(gamma - i), ``basis_minus`` spans ker(gamma + i);
    their columns are phase-fixed so results are reproducible bit-for-bit.
    """

    dim_half: int
    gamma: np.ndarray
    basis_plus: np.ndarray
    basis_minus: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gamma", readonly(self.gamma))
        object.__setattr__(self, "basis_plus", readonly(self.basis_plus))
        object.__setattr__(self, "basis_minus", readonly(self.basis_minus))

    @property
    def dim(self) -> int:
        return 2 * self.dim_half

    def omega(self, x: np.ndarray, y: np.ndarray) -> complex:
        """Symplectic form <x, gamma y>."""
        return complex(np.vdot(x, self.gamma @ y))

    def same_space(self, other: "SymplecticSpace", tol: float = 1e-12) -> bool:
        return self.dim == other.dim and np.allclose(self.gamma, other.gamma, atol=tol)


@dataclass(frozen=True)
class Lagrangian:
    """Lagrangian subspace: orthonormal frame plus cached graph unitary phi."""

    space: SymplecticSpace
    frame: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frame", readonly(self.frame))
        object.__setattr__(self, "phi", readonly(self.phi))


@dataclass(frozen=True)
class LagrangianProjection:
    """Orthogonal projection P with P = P*, P^2 = P, gamma P gamma* = I - P."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", readonly(self.matrix))


@dataclass(frozen=True)
class Reduction:
    """Result of symplectic reduction.

    ``space`` is the reduced symplectic space in its own coordinates,
    ``embedding`` maps reduced coordinates isometrically into the ambient
    space (columns span U ∩ gamma U), ``lagrangian`` lives in ``space``.
    """

    space: SymplecticSpace
    embedding: np.ndarray
    lagrangian: Lagrangian

    def __post_init__(self):
        object.__setattr__(self, "embedding", readonly(self.embedding))

    @property
    def embedded_frame(self) -> np.ndarray:
        """Frame of the reduced Lagrangian expressed in the ambient space."""
        return self.embedding @ self.lagrangian.frame


def standard_space(n: int) -> SymplecticSpace:
    """The model space C^{2n} with gamma = [[0, -I], [I, 0]] in n x n blocks."""
    if n < 1:
        raise InvalidGamma(f"dim_half must be >= 1, got {n}")
    gamma = np.zeros((2 * n, 2 * n), dtype=complex)
    gamma[:n, n:] = -np.eye(n)
    gamma[n:, :n] = np.eye(n)
    # closed-form eigenvectors: (e_k, -i e_k)/sqrt2 for +i, (e_k, +i e_k)/sqrt2 for -i
    eye = np.eye(n, dtype=complex)
    basis_plus = np.vstack([eye, -1j * eye]) / np.sqrt(2.0)
    basis_minus = np.vstack([eye, 1j * eye]) / np.sqrt(2.0)
    return SymplecticSpace(n, gamma, basis_plus, basis_minus)


def space_from_gamma(gamma, tol: float = DEFAULT_TOL, *, _rng=None) -> SymplecticSpace:
    """Validate a complex structure and build deterministic eigenbases.

    Raises InvalidGamma if gamma is not skew-adjoint with gamma^2 = -I within
    tol, or if its eigenvalues are not within tol of +/-i (no silent repair);
    raises UnbalancedEigenspaces if the two eigenspace dimensions differ.
    """
    gamma = as_complex_matrix(gamma)
    d = gamma.shape[0]
    if gamma.shape[0] != gamma.shape[1] or d % 2 != 0 or d == 0:
        raise InvalidGamma(f"gamma must be square of even size, got {gamma.shape}")
    scale = max(1.0, np.linalg.norm(gamma, 2))
    if np.linalg.norm(gamma + gamma.conj().T, 2) > tol * 10 * scale:
        raise InvalidGamma("gamma is not skew-adjoint within tolerance")
    if np.linalg.norm(gamma @ gamma + np.eye(d), 2) > tol * 10 * scale:
        raise InvalidGamma("gamma^2 != -I within tolerance")
    # -i*gamma is Hermitian with eigenvalues +1 on E_i and -1 on E_{-i}
    vals, vecs = np.linalg.eigh(-1j * gamma)
    if np.any(np.abs(np.abs(vals) - 1.0) > max(tol * 100, 1e-7)):
        raise InvalidGamma("gamma has eigenvalues away from +/-i beyond tolerance")
    n_minus = int(np.sum(vals < 0))
    n_plus = d - n_minus
    if n_plus != n_minus:
        raise UnbalancedEigenspaces(
            f"dim ker(gamma - i) = {n_plus} != {n_minus} = dim ker(gamma + i)"
        )
    n = n_plus
    basis_minus = vecs[:, :n]
    basis_plus = vecs[:, n:]
    if _rng is not None:
        # randomized re-basing hook: invariants must not depend on this choice
        basis_plus = basis_plus @ _random_unitary(_rng, n)
        basis_minus = basis_minus @ _random_unitary(_rng, n)
    basis_plus = phase_fix_columns(orthonormal_columns(basis_plus, tol))
    basis_minus = phase_fix_columns(orthonormal_columns(basis_minus, tol))
    return SymplecticSpace(n, gamma, basis_plus, basis_minus)


def _random_unitary(rng, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rebased_space(space: SymplecticSpace, rng) -> SymplecticSpace:
    """Same gamma, freshly randomized eigenbases (for invariance checks)."""
    return space_from_gamma(space.gamma, _rng=rng)


def lagrangian_from_frame(space: SymplecticSpace, frame, tol: float = DEFAULT_TOL) -> Lagrangian:
    """Orthonormalize a spanning set and verify gamma L = L^perp.

    The graph unitary is recovered from the fixed eigenbases: with
    a_pm = basis_pm* F one has phi = a_minus a_plus^{-1}, and sqrt(2) a_plus
    is unitary whenever L is Lagrangian, so the solve is well conditioned.
    """
    frame = as_complex_matrix(frame)
    if frame.shape[0] != space.dim:
        raise DimensionMismatch(f"frame has {frame.shape[0]} rows, space has dim {space.dim}")
    f = orthonormal_columns(frame, tol)
    if f.shape[1] != frame.shape[1]:
        raise NotLagrangian("frame columns are linearly dependent")
    n = space.dim_half
    if f.shape[1] != n:
        raise NotLagrangian(f"Lagrangian must have dimension {n}, frame spans {f.shape[1]}")
    iso = np.linalg.norm(f.conj().T @ (space.gamma @ f), 2)
    if iso > tol * 100 * max(1, n):
        raise NotLagrangian(f"gamma L is not orthogonal to L (defect {iso:.3e})")
    a_plus = space.basis_plus.conj().T @ f
    a_minus = space.basis_minus.conj().T @ f
    phi = nearest_unitary(a_minus @ np.linalg.inv(a_plus))
    return Lagrangian(space, f, phi)


def lagrangian_from_phi(space: SymplecticSpace, phi, tol: float = DEFAULT_TOL) -> Lagrangian:
    """Lagrangian with the given graph unitary: span of basis_plus + basis_minus phi."""
    phi = require_unitary(phi, tol, what="phi")
    if phi.shape[0] != space.dim_half:
        raise DimensionMismatch(f"phi must be {space.dim_half} x {space.dim_half}")
    raw = (space.basis_plus + space.basis_minus @ phi) / np.sqrt(2.0)
    return Lagrangian(space, orthonormal_columns(raw, tol), nearest_unitary(phi))


def projection_of(lag: Lagrangian) -> LagrangianProjection:
    """Orthogonal projection onto L; satisfies gamma P gamma* = I - P."""
    f = lag.frame
    return LagrangianProjection(f @ f.conj().T)


def intersection_dim(l1: Lagrangian, l2: Lagrangian, tol: float = DEFAULT_TOL) -> int:
    """dim(L1 ∩ L2) = multiplicity of +1 in spec(phi(L1) phi(L2)*).

    Cross-checked against the principal-angle count from the frames; a
    disagreement means the tolerance cannot separate the spectrum and is
    surfaced as ToleranceAmbiguity.
    """
    if not l1.space.same_space(l2.space):
        raise DimensionMismatch("Lagrangians live in different spaces")
    by_phi = count_unit_eigenvalues_at_one(l1.phi @ l2.phi.conj().T, tol)
    # principal angle alpha corresponds to eigenphase 2*alpha of phi1 phi2*;
    # sines computed via sqrt(1 - s^2) resolve zero only to ~sqrt(eps)
    sines = principal_angle_sines(l1.frame, l2.frame)
    by_angles = int(np.sum(sines <= max(tol, 1e-7)))
    if by_phi != by_angles:
        raise ToleranceAmbiguity(
            f"graph-unitary count {by_phi} disagrees with principal-angle "
            f"count {by_angles} at tol {tol:.1e}"
        )
    return by_phi


def subspace_distance(s1, s2) -> float:
    """Sine of the largest principal angle between equal-dimensional subspaces."""
    f1 = s1.frame if isinstance(s1, Lagrangian) else orthonormal_columns(as_complex_matrix(s1))
    f2 = s2.frame if isinstance(s2, Lagrangian) else orthonormal_columns(as_complex_matrix(s2))
    return subspace_gap(f1, f2)


def symplectic_reduce(lag: Lagrangian, u_frame, tol: float = DEFAULT_TOL) -> Reduction:
    """Symplectic reduction of L with respect to a coisotropic subspace U.

    Requires Ann(U) = (gamma U)^perp ⊆ U; the reduced space is U ∩ gamma U
    with the restricted gamma, and the reduced Lagrangian is the orthogonal
    projection of L ∩ U onto it.
    """
    space = lag.space
    u = orthonormal_columns(as_complex_matrix(u_frame), tol)
    if u.shape[0] != space.dim:
        raise DimensionMismatch("U has wrong ambient dimension")
    gamma_u = orthonormal_columns(space.gamma @ u, tol)
    # Ann(U) = orthogonal complement of gamma U in the ambient space
    full = np.eye(space.dim, dtype=complex)
    ann = complement_within(gamma_u, full, tol)
    if ann.shape[1] > 0:
        # containment Ann(U) ⊆ U
        resid = ann - u @ (u.conj().T @ ann)
        if np.linalg.norm(resid, 2) > tol * 100:
            raise NotCoisotropic("Ann(U) is not contained in U")
    # U = Ann(U) ⊥ (U ∩ gamma U), so the reduced space is the complement of Ann in U
    red_frame = complement_within(ann, u, tol)
    m2 = red_frame.shape[1]
    if m2 == 0 or m2 % 2 != 0:
        raise NotCoisotropic(f"U ∩ gamma U has dimension {m2}; not a symplectic subspace")
    gamma_red = red_frame.conj().T @ space.gamma @ red_frame
    red_space = space_from_gamma(gamma_red, tol)
    # L ∩ U, projected into reduced coordinates
    inter = intersect_subspaces([lag.frame, u], tol)
    coords = red_frame.conj().T @ inter
    red_lag_frame = orthonormal_columns(coords, tol)
    if red_lag_frame.shape[1] != m2 // 2:
        raise NotLagrangian(
            f"reduction of L has dimension {red_lag_frame.shape[1]}, expected {m2 // 2}"
        )
    return Reduction(red_space, red_frame, lagrangian_from_frame(red_space, red_lag_frame, tol))


def gamma_rotate(lag: Lagrangian, s: float) -> Lagrangian:
    """The rotated Lagrangian e^{s gamma} L (graph unitary picks up e^{-2is})."""
    rot = np.cos(s) * np.eye(lag.space.dim) + np.sin(s) * lag.space.gamma
    return lagrangian_from_frame(lag.space, rot @ lag.frame)
