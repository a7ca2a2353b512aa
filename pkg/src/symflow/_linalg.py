"""Shared dense linear-algebra helpers.

Everything here operates on plain ndarrays; tolerance policy: singular values
below ``tol * largest`` count as zero, angular classifications use an
undecidable band of width ``AMBIGUITY_FACTOR * tol`` above the threshold.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NonIntegerResult, NotUnitary, ToleranceAmbiguity

DEFAULT_TOL = 1e-9
INT_RESIDUE_TOL = 1e-8
# Values in (tol, AMBIGUITY_FACTOR*tol] are neither clearly zero nor clearly
# nonzero; classification there raises ToleranceAmbiguity instead of guessing.
AMBIGUITY_FACTOR = 10.0


def as_complex_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of ndim {m.ndim}")
    return m


def readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


def phase_fix_columns(m: np.ndarray) -> np.ndarray:
    """Rotate each column so its first entry of largest modulus is real positive."""
    out = np.array(m, dtype=complex)
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        piv = col[i]
        if abs(piv) > 0:
            out[:, j] = col * (piv.conjugate() / abs(piv))
    return out


def orthonormal_columns(m: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column span, rank-revealed by SVD."""
    m = as_complex_matrix(m)
    if m.shape[1] == 0:
        return m
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return m[:, :0]
    rank = int(np.sum(s > tol * s[0]))
    return u[:, :rank]


def check_orthonormal(m: np.ndarray, tol: float = 1e-9) -> bool:
    g = m.conj().T @ m
    return bool(np.linalg.norm(g - np.eye(m.shape[1]), 2) <= max(tol, 10 * tol * max(1, m.shape[1])))


def require_unitary(u: np.ndarray, tol: float = 1e-9, what: str = "matrix") -> np.ndarray:
    u = as_complex_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise NotUnitary(f"{what} is not square: {u.shape}")
    defect = np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2)
    if defect > tol * 10 * max(1, u.shape[0]):
        raise NotUnitary(f"{what} fails unitarity by {defect:.3e}")
    return u


def nearest_unitary(u: np.ndarray) -> np.ndarray:
    """Polar projection onto the unitary group."""
    w, _, vh = np.linalg.svd(u)
    return w @ vh


def eigenphases(u: np.ndarray, snap_tol: float = 1e-12) -> np.ndarray:
    """Sorted eigenphases of a unitary in (-pi, pi], values at -1 snapped to +pi."""
    vals = np.linalg.eigvals(u)
    phases = np.angle(vals)
    phases[np.abs(np.abs(phases) - np.pi) <= snap_tol] = np.pi
    return np.sort(phases)


def wrap_angle(theta):
    """Wrap to (-pi, pi]."""
    out = np.mod(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(out == -np.pi, np.pi, out) if np.ndim(out) else (np.pi if out == -np.pi else float(out))


def branch_log_unitary(u: np.ndarray, tol: float = 1e-9) -> complex:
    """Sum of eigenvalue logs with the branch cut just below -1 (arg in (-pi, pi])."""
    u = as_complex_matrix(u)
    vals = np.linalg.eigvals(u)
    phases = np.angle(vals)
    # eigenvalues within tol of -1 take the +i*pi side of the cut
    phases[np.abs(np.abs(phases) - np.pi) <= tol] = np.pi
    return complex(np.sum(np.log(np.abs(vals))) + 1j * np.sum(phases))


def count_unit_eigenvalues_at_one(u: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Multiplicity of the eigenvalue +1 of a unitary, with an ambiguity guard.

    Eigenphases with |theta| <= tol count; |theta| in (tol, AMBIGUITY_FACTOR*tol]
    raise ToleranceAmbiguity (the decision cannot be made at this tolerance).
    """
    phases = np.angle(np.linalg.eigvals(u))
    dist = np.abs(phases)
    hit = dist <= tol
    murky = (~hit) & (dist <= AMBIGUITY_FACTOR * tol)
    if np.any(murky):
        raise ToleranceAmbiguity(
            f"eigenphase at distance {dist[murky].min():.3e} from +1 is inside the "
            f"ambiguity band (tol={tol:.1e})"
        )
    return int(np.sum(hit))


def principal_angle_sines(f1: np.ndarray, f2: np.ndarray) -> np.ndarray:
    """Sines of principal angles between equal-rank orthonormal frames (ascending)."""
    f1 = as_complex_matrix(f1)
    f2 = as_complex_matrix(f2)
    if f1.shape[0] != f2.shape[0]:
        raise DimensionMismatch(f"ambient dims differ: {f1.shape[0]} vs {f2.shape[0]}")
    if f1.shape[1] != f2.shape[1]:
        raise DimensionMismatch(f"subspace dims differ: {f1.shape[1]} vs {f2.shape[1]}")
    s = np.linalg.svd(f1.conj().T @ f2, compute_uv=False)
    s = np.clip(s, 0.0, 1.0)
    # ascending singular values give descending sines; index 0 = largest angle
    return np.sqrt(1.0 - np.sort(s) ** 2)


def subspace_gap(f1: np.ndarray, f2: np.ndarray) -> float:
    """Sine of the largest principal angle; 0 iff the spans coincide.

    Computed as the residual norm ||(I - P1) F2||_2, which resolves small
    angles to machine precision (sqrt(1 - s^2) floors near ~1e-8).
    """
    if f1.shape[0] != f2.shape[0]:
        raise DimensionMismatch(f"ambient dims differ: {f1.shape[0]} vs {f2.shape[0]}")
    if f1.shape[1] != f2.shape[1]:
        raise DimensionMismatch(f"subspace dims differ: {f1.shape[1]} vs {f2.shape[1]}")
    if f1.shape[1] == 0:
        return 0.0
    r12 = f2 - f1 @ (f1.conj().T @ f2)
    r21 = f1 - f2 @ (f2.conj().T @ f1)
    return float(max(np.linalg.norm(r12, 2), np.linalg.norm(r21, 2)))


def intersect_subspaces(frames: list[np.ndarray], tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal frame of the intersection of the given column spans."""
    if not frames:
        raise DimensionMismatch("need at least one subspace")
    cur = orthonormal_columns(frames[0], tol)
    dim = cur.shape[0]
    eye = np.eye(dim)
    for f in frames[1:]:
        nxt = orthonormal_columns(f, tol)
        if nxt.shape[0] != dim:
            raise DimensionMismatch("ambient dimensions differ")
        if cur.shape[1] == 0 or nxt.shape[1] == 0:
            return np.zeros((dim, 0), dtype=complex)
        # vectors of cur killed by projection onto the complement of nxt
        resid = (eye - nxt @ nxt.conj().T) @ cur
        _, s, vh = np.linalg.svd(resid, full_matrices=False)
        scale = max(1.0, s[0] if s.size else 0.0)
        keep = vh.conj().T[:, s <= tol * scale] if s.size else vh.conj().T
        cur = orthonormal_columns(cur @ keep, tol)
    return cur


def complement_within(sub: np.ndarray, ambient_frame: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal frame of the orthogonal complement of `sub` inside span(ambient_frame).

    Both inputs are orthonormal frames, so true complement directions carry
    singular value ~1; the rank cut is therefore absolute, not relative
    (a numerically zero residual must yield an empty frame).
    """
    amb = orthonormal_columns(ambient_frame, tol)
    if sub.shape[1] == 0:
        return amb
    proj = amb - sub @ (sub.conj().T @ amb)
    if proj.shape[1] == 0:
        return proj
    u, s, _ = np.linalg.svd(proj, full_matrices=False)
    rank = int(np.sum(s > max(10 * tol, 1e-8)))
    return u[:, :rank]


def as_integer(x: float, tol: float = INT_RESIDUE_TOL, what: str = "value") -> int:
    """Round a claimed-integer float, raising NonIntegerResult beyond tolerance."""
    r = round(float(x))
    if abs(x - r) > tol:
        raise NonIntegerResult(f"{what} = {x!r} has residue {abs(x - r):.3e} > {tol:.1e}")
    return int(r)
