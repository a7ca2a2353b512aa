"""Exactly solvable model operator D = gamma(d/dx + A) on intervals and circles.

The boundary space H carries gamma and a Hermitian A with gamma A = -A gamma.
H splits into 2-D mode blocks span(psi, gamma psi) per positive eigenvalue mu
of A (in-block A = diag(mu, -mu), gamma = [[0,-1],[1,0]]) plus a gamma-invariant
kernel block.  An interval [0, L] has the double boundary space H ⊕ H with
gamma~ = gamma ⊕ (-gamma) (the far end is parametrized inward), tangential
operator A~ = A ⊕ (-A), and Cauchy data space {(v, e^{-LA} v)}.

Boundary-condition conventions, fixed here and used by every verifier:

* a "boundary Lagrangian" P is the image of its projection, so the operator
  D_P constrains boundary data to ker proj(P) = gamma~ P;
* slot 0 of the double space is the x=0 end of the interval, slot 1 the x=L
  end; a second piece glued in from the far side has boundary vector
  (e^{-LA} w, w), i.e. its solution graph sits over slot 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from ._linalg import (
    DEFAULT_TOL,
    as_complex_matrix,
    as_integer,
    intersect_subspaces,
    orthonormal_columns,
    phase_fix_columns,
    readonly,
)
from .errors import (
    AnticommutationFailure,
    AsymmetricSpectrum,
    BracketingFailure,
    ConvergenceTooSlow,
    DimensionMismatch,
    GluingViolation,
    IdentityViolation,
    IncompatibleBoundary,
    ResonanceViolation,
    WindowEscape,
)
from .lagrangian_indices import LagrangianPairPath, gamma_conjugate, maslov, tau_mu
from .symplectic_core import (
    Lagrangian,
    SymplecticSpace,
    intersection_dim,
    lagrangian_from_frame,
    space_from_gamma,
    subspace_distance,
    symplectic_reduce,
)
from .unitary_invariants import tr_log

__all__ = [
    "Interval",
    "Circle",
    "ModeBlock",
    "ModelOperator",
    "DoubleBoundarySpace",
    "build_model",
    "double_boundary",
    "transmission_lagrangian",
    "direct_sum_lagrangian",
    "cauchy_data",
    "interval_spectrum",
    "circle_spectrum",
    "boundary_spectrum",
    "interval_kernel_dim",
    "eta_lattice",
    "eta_truncated",
    "EtaEstimate",
    "interval_eta_tilde",
    "p_theta",
    "p_theta_kernel_membership",
    "caldconst_check",
    "adiabatic_limit",
    "glue_verify",
    "nicolaescu_verify",
    "sw_modz_check",
    "model_symmetry_check",
]


@dataclass(frozen=True)
class Interval:
    length: float

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("interval length must be positive")


@dataclass(frozen=True)
class Circle:
    circumference: float

    def __post_init__(self):
        if self.circumference <= 0:
            raise ValueError("circumference must be positive")


@dataclass(frozen=True)
class ModeBlock:
    """2-D block span(psi, gamma psi) for mu > 0, or the kernel block."""

    mu: float
    frame: np.ndarray  # 2n x 2 for mu > 0, 2n x 2m for the kernel block
    block_space: Optional[SymplecticSpace] = None  # kernel block only

    def __post_init__(self):
        object.__setattr__(self, "frame", readonly(self.frame))

    @property
    def is_kernel(self) -> bool:
        return self.mu == 0.0


@dataclass(frozen=True)
class ModelOperator:
    space: SymplecticSpace
    a_matrix: np.ndarray
    geometry: Interval | Circle
    blocks: tuple[ModeBlock, ...]
    kernel: Optional[ModeBlock]

    def __post_init__(self):
        object.__setattr__(self, "a_matrix", readonly(self.a_matrix))

    @property
    def length(self) -> float:
        return self.geometry.length if isinstance(self.geometry, Interval) \
            else self.geometry.circumference

    def min_positive_mu(self) -> float:
        mus = [b.mu for b in self.blocks]
        return min(mus) if mus else np.inf


def build_model(space: SymplecticSpace, a_matrix, geometry,
                tol: float = DEFAULT_TOL) -> ModelOperator:
    """Validate (gamma, A) and decompose H into mode blocks.

    Blocks are sorted by mu ascending with phase-fixed bases; the kernel
    block, when present, carries its own symplectic space in block
    coordinates.
    """
    a = as_complex_matrix(a_matrix)
    if a.shape != (space.dim, space.dim):
        raise DimensionMismatch(f"A must be {space.dim} x {space.dim}")
    scale = max(1.0, np.linalg.norm(a, 2))
    if np.linalg.norm(a - a.conj().T, 2) > tol * 10 * scale:
        raise AnticommutationFailure("A is not Hermitian within tolerance")
    anti = space.gamma @ a + a @ space.gamma
    if np.linalg.norm(anti, 2) > tol * 100 * scale:
        raise AnticommutationFailure(
            f"gamma A + A gamma has norm {np.linalg.norm(anti, 2):.3e}"
        )
    vals, vecs = np.linalg.eigh(a)
    zero_thr = tol * 100 * scale
    pos = vals > zero_thr
    neg = vals < -zero_thr
    pos_vals = np.sort(vals[pos])
    neg_vals = np.sort(-vals[neg])
    if pos_vals.size != neg_vals.size or (
        pos_vals.size and np.max(np.abs(pos_vals - neg_vals)) > zero_thr * 10
    ):
        raise AsymmetricSpectrum("spectrum of A is not symmetric about 0")

    blocks = []
    pos_vecs = phase_fix_columns(vecs[:, pos])
    for j, mu in enumerate(vals[pos]):
        psi = pos_vecs[:, [j]]
        frame = np.hstack([psi, space.gamma @ psi])
        blocks.append(ModeBlock(float(mu), frame))
    blocks.sort(key=lambda b: b.mu)
    kernel = None
    ker_mask = ~(pos | neg)
    if np.any(ker_mask):
        kframe = phase_fix_columns(orthonormal_columns(vecs[:, ker_mask], tol))
        gamma_k = kframe.conj().T @ space.gamma @ kframe
        kernel = ModeBlock(0.0, kframe, space_from_gamma(gamma_k, tol))
    total = sum(b.frame.shape[1] for b in blocks) + (kernel.frame.shape[1] if kernel else 0)
    if total != space.dim:
        raise AsymmetricSpectrum(f"blocks span {total} of {space.dim} dimensions")
    return ModelOperator(space, a, geometry, tuple(blocks), kernel)


# ---------------------------------------------------------------------------
# double boundary space


@dataclass(frozen=True)
class DoubledBlock:
    mu: float
    frame: np.ndarray       # (2 dim H) x (2k) embedding of the doubled block
    space: SymplecticSpace  # the doubled block in its own coordinates
    is_kernel: bool
    kernel_gamma: Optional[np.ndarray] = None  # gamma of the single block (kernel only)

    def __post_init__(self):
        object.__setattr__(self, "frame", readonly(self.frame))
        if self.kernel_gamma is not None:
            object.__setattr__(self, "kernel_gamma", readonly(self.kernel_gamma))


@dataclass(frozen=True)
class DoubleBoundarySpace:
    """H ⊕ H with gamma~ = gamma ⊕ (-gamma) and A~ = A ⊕ (-A)."""

    model_space: SymplecticSpace
    space: SymplecticSpace
    a_tilde: np.ndarray
    blocks: tuple[DoubledBlock, ...]

    def __post_init__(self):
        object.__setattr__(self, "a_tilde", readonly(self.a_tilde))

    @property
    def dim_single(self) -> int:
        return self.model_space.dim


def _doubled_frame(block_frame: np.ndarray, dim: int) -> np.ndarray:
    k = block_frame.shape[1]
    out = np.zeros((2 * dim, 2 * k), dtype=complex)
    out[:dim, :k] = block_frame
    out[dim:, k:] = block_frame
    return out


def double_boundary(op: ModelOperator, tol: float = DEFAULT_TOL) -> DoubleBoundarySpace:
    d = op.space.dim
    gamma = op.space.gamma
    gamma_tilde = np.zeros((2 * d, 2 * d), dtype=complex)
    gamma_tilde[:d, :d] = gamma
    gamma_tilde[d:, d:] = -gamma
    a_tilde = np.zeros((2 * d, 2 * d), dtype=complex)
    a_tilde[:d, :d] = op.a_matrix
    a_tilde[d:, d:] = -op.a_matrix
    space = space_from_gamma(gamma_tilde, tol)
    doubled = []
    for b in op.blocks:
        frame = _doubled_frame(b.frame, d)
        gb = frame.conj().T @ gamma_tilde @ frame
        doubled.append(DoubledBlock(b.mu, frame, space_from_gamma(gb, tol), False))
    if op.kernel is not None:
        frame = _doubled_frame(op.kernel.frame, d)
        gb = frame.conj().T @ gamma_tilde @ frame
        doubled.append(DoubledBlock(0.0, frame, space_from_gamma(gb, tol), True,
                                    op.kernel.block_space.gamma))
    return DoubleBoundarySpace(op.space, space, a_tilde, tuple(doubled))


def transmission_lagrangian(dbs: DoubleBoundarySpace) -> Lagrangian:
    """The diagonal {(f, f)}; re-gluing uses the projection onto its complement."""
    d = dbs.dim_single
    frame = np.vstack([np.eye(d), np.eye(d)]) / np.sqrt(2.0)
    return lagrangian_from_frame(dbs.space, frame)


def direct_sum_lagrangian(dbs: DoubleBoundarySpace, l0: Lagrangian,
                          l1: Lagrangian) -> Lagrangian:
    """L0 at the x=0 slot plus L1 at the far slot (each a Lagrangian on H)."""
    d = dbs.dim_single
    f0, f1 = l0.frame, l1.frame
    frame = np.zeros((2 * d, f0.shape[1] + f1.shape[1]), dtype=complex)
    frame[:d, : f0.shape[1]] = f0
    frame[d:, f0.shape[1]:] = f1
    return lagrangian_from_frame(dbs.space, frame)


def cauchy_data(op: ModelOperator, dbs: Optional[DoubleBoundarySpace] = None,
                side: str = "+", length: Optional[float] = None) -> Lagrangian:
    """Cauchy data space of the interval model inside the double space.

    side '+': {(v, e^{-LA} v)}; side '-': {(e^{-LA} w, w)}.  ``length``
    overrides the model length (used by adiabatic stretching).  The frame is
    assembled blockwise with per-column rescaling, so arbitrarily long
    stretches stay well conditioned.
    """
    if not isinstance(op.geometry, Interval):
        raise ValueError("cauchy_data needs an interval model")
    if dbs is None:
        dbs = double_boundary(op)
    ell = op.geometry.length if length is None else length
    d = op.space.dim
    cols = []

    def graph_col(vec, log_factor):
        # span of (v, e^{log_factor} v), rescaled so entries stay bounded
        c = np.zeros(2 * d, dtype=complex)
        if log_factor <= 0:
            top, bot = vec, np.exp(log_factor) * vec
        else:
            top, bot = np.exp(-log_factor) * vec, vec
        if side == "+":
            c[:d], c[d:] = top, bot
        else:
            c[:d], c[d:] = bot, top
        return c / np.linalg.norm(c)

    for b in op.blocks:
        psi = b.frame[:, 0]
        gpsi = b.frame[:, 1]
        cols.append(graph_col(psi, -ell * b.mu))
        cols.append(graph_col(gpsi, ell * b.mu))
    if op.kernel is not None:
        for j in range(op.kernel.frame.shape[1]):
            cols.append(graph_col(op.kernel.frame[:, j], 0.0))
    frame = orthonormal_columns(np.array(cols).T)
    return lagrangian_from_frame(dbs.space, frame)


# ---------------------------------------------------------------------------
# boundary traces along mode blocks


def _block_trace(frame: np.ndarray, block_frame: np.ndarray, tol: float) -> np.ndarray:
    """Coordinates, in the block basis, of span(frame) ∩ span(block_frame)."""
    inter = intersect_subspaces([frame, block_frame], tol)
    return orthonormal_columns(block_frame.conj().T @ inter, tol)


def _split_along_blocks(op: ModelOperator, lag: Lagrangian, tol: float) -> dict:
    """Per-block traces of a boundary Lagrangian on H, or IncompatibleBoundary."""
    traces = {}
    total = 0
    for i, b in enumerate(op.blocks):
        tr = _block_trace(lag.frame, b.frame, tol)
        if tr.shape[1] != 1:
            raise IncompatibleBoundary(
                f"boundary Lagrangian meets mode block mu={b.mu:.6g} in dimension "
                f"{tr.shape[1]}, expected a line"
            )
        traces[i] = tr
        total += 1
    if op.kernel is not None:
        tr = _block_trace(lag.frame, op.kernel.frame, tol)
        m = op.kernel.frame.shape[1] // 2
        if tr.shape[1] != m:
            raise IncompatibleBoundary(
                f"kernel-block trace has dimension {tr.shape[1]}, expected {m}"
            )
        traces["kernel"] = tr
        total += m
    if total != op.space.dim_half:
        raise IncompatibleBoundary("block traces do not add up to a Lagrangian")
    return traces


def _real_line_rep(vec: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Real unit representative of a Lagrangian line in a 2-D mode block."""
    v = vec.ravel()
    i = int(np.argmax(np.abs(v)))
    v = v * (v[i].conjugate() / abs(v[i]))
    if np.max(np.abs(v.imag)) > tol:
        raise IncompatibleBoundary("block line is not realifiable; not a Lagrangian trace")
    v = v.real
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# interval spectra: real 2x2 transfer calculus plus eigenphase tracking


def _transfer_terms(lam, mu: float, ell: float):
    """cosh(kappa L) and sinh(kappa L)/kappa with kappa^2 = mu^2 - lambda^2."""
    lam = np.asarray(lam, dtype=float)
    kappa = np.sqrt(np.asarray(mu**2 - lam**2, dtype=complex))
    kl = kappa * ell
    c = np.cosh(kl).real
    small = np.abs(kl) < 1e-8
    safe = np.where(np.abs(kappa) < 1e-300, 1.0, kappa)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        s = np.where(small, ell * (1.0 + (kl**2).real / 6.0), (np.sinh(kl) / safe).real)
    return c, s


def _transfer_matrix(lam: float, mu: float, ell: float) -> np.ndarray:
    c, s = _transfer_terms(np.array([lam]), mu, ell)
    m = np.array([[-mu, lam], [-lam, mu]])
    return c[0] * np.eye(2) + s[0] * m


def _block_root_function(mu: float, ell: float, p: np.ndarray, q: np.ndarray) -> Callable:
    """F(lambda) = <q_perp, T_L(lambda) p> for one 2-D block, vectorized.

    p spans the in-block constraint line at x=0, q the constraint line at
    x=L; roots of F are the block's eigenvalues.
    """
    qp = np.array([-q[1], q[0]])
    m_const = -mu * qp[0] * p[0] + mu * qp[1] * p[1]
    m_lin = qp[0] * p[1] - qp[1] * p[0]
    dot = qp[0] * p[0] + qp[1] * p[1]

    def f(lam):
        lam = np.asarray(lam, dtype=float)
        c, s = _transfer_terms(lam, mu, ell)
        return c * dot + s * (m_const + lam * m_lin)

    return f


def _bracketed_roots(f: Callable, window: float, step: float, tol: float) -> np.ndarray:
    """All roots of a scalar function on [-window, window] by scan + bisection."""
    grid = np.arange(-window, window + step, step)
    vals = np.asarray(f(grid), dtype=float)
    scale = max(1.0, float(np.max(np.abs(vals))))
    exact_zero = np.abs(vals) <= 1e-13 * scale
    sgn = np.sign(vals)
    sgn[exact_zero] = 0.0
    sign_change = sgn[:-1] * sgn[1:] < 0
    interior_min = np.zeros(len(grid), dtype=bool)
    interior_min[1:-1] = (
        (np.abs(vals[1:-1]) < np.abs(vals[:-2]))
        & (np.abs(vals[1:-1]) < np.abs(vals[2:]))
        & (np.abs(vals[1:-1]) < 1e-10 * scale)
        & ~exact_zero[1:-1]
    )
    if np.any(interior_min):
        j = int(np.nonzero(interior_min)[0][0])
        if not (sign_change[max(0, j - 1)] or (j < len(sign_change) and sign_change[j])):
            raise BracketingFailure(
                f"|F| minimum {np.abs(vals[j]):.3e} without sign change near "
                f"lambda={grid[j]:.6g}"
            )
    lo = grid[:-1][sign_change].astype(float)
    hi = grid[1:][sign_change].astype(float)
    flo = vals[:-1][sign_change]
    if lo.size:
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            fm = np.asarray(f(mid), dtype=float)
            left = np.sign(fm) == np.sign(flo)
            lo = np.where(left, mid, lo)
            flo = np.where(left, fm, flo)
            hi = np.where(left, hi, mid)
            if float(np.max(hi - lo)) < tol:
                break
        roots = 0.5 * (lo + hi)
    else:
        roots = np.array([])
    hits = grid[exact_zero]
    if hits.size:
        keep = np.ones(hits.size, dtype=bool)
        for i, h in enumerate(hits):
            if roots.size and np.min(np.abs(roots - h)) < max(step * 1e-6, 10 * tol):
                keep[i] = False
        roots = np.concatenate([roots, hits[keep]])
    roots = np.sort(roots)
    return roots[np.abs(roots) <= window + 1e-9]


def _kernel_offsets_split(op: ModelOperator, p_tr: np.ndarray, q_tr: np.ndarray,
                          tol: float) -> np.ndarray:
    """Lattice offsets, in units of pi/L, of a kernel block with split conditions.

    Eigenvalues are lambda = (-beta_j/2 + pi k)/L with e^{i beta_j} the
    spectrum of phi(constraint line at 0) phi(constraint line at L)* inside
    the kernel-block space.
    """
    ksp = op.kernel.block_space
    lp = lagrangian_from_frame(ksp, p_tr, tol)
    lq = lagrangian_from_frame(ksp, q_tr, tol)
    betas = np.angle(np.linalg.eigvals(lp.phi @ lq.phi.conj().T))
    return np.mod(-betas / 2.0, np.pi) / np.pi


def _lattice_in_window(offsets: np.ndarray, spacing: float, window: float) -> np.ndarray:
    out = []
    for a in np.atleast_1d(offsets):
        k0 = int(np.floor(-window / spacing - a)) - 1
        k1 = int(np.ceil(window / spacing - a)) + 1
        lams = (a + np.arange(k0, k1 + 1)) * spacing
        out.append(lams[np.abs(lams) <= window + 1e-12])
    return np.concatenate(out) if out else np.array([])


def interval_spectrum(op: ModelOperator, p: Lagrangian, q: Lagrangian,
                      window: float, tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues in [-window, window] of D_{P,Q} on the interval.

    D_{P,Q} constrains beta(0) to ker proj(P) = gamma P and beta(L) to
    im proj(Q) = Q; both must be block-compatible Lagrangians on H.
    """
    if not isinstance(op.geometry, Interval):
        raise ValueError("interval_spectrum needs an interval model")
    ell = op.geometry.length
    tr_p = _split_along_blocks(op, gamma_conjugate(p), DEFAULT_TOL)
    tr_q = _split_along_blocks(op, q, DEFAULT_TOL)
    out = []
    for i, b in enumerate(op.blocks):
        pv = _real_line_rep(tr_p[i])
        qv = _real_line_rep(tr_q[i])
        f = _block_root_function(b.mu, ell, pv, qv)
        step = min(np.pi / (4.0 * ell), 0.45 / max(b.mu, 1.0))
        out.append(_bracketed_roots(f, window, step, tol))
    if op.kernel is not None:
        offsets = _kernel_offsets_split(op, tr_p["kernel"], tr_q["kernel"], DEFAULT_TOL)
        out.append(_lattice_in_window(offsets, np.pi / ell, window))
    return np.sort(np.concatenate(out)) if out else np.array([])


def circle_spectrum(op: ModelOperator, window: float) -> np.ndarray:
    """Closed-form circle spectrum in [-window, window], with multiplicity.

    Per 2-D block: +/-mu once (k = 0) and +/-sqrt(mu^2 + (2 pi k/C)^2) twice
    for k >= 1; kernel block: the lattice 2 pi k/C with multiplicity dim ker A.
    """
    if not isinstance(op.geometry, Circle):
        raise ValueError("circle_spectrum needs a circle model")
    c = op.geometry.circumference
    xi = 2.0 * np.pi / c
    out = []
    for b in op.blocks:
        if b.mu <= window:
            out.extend([b.mu, -b.mu])
        kmax = int(np.floor(np.sqrt(max(window**2 - b.mu**2, 0.0)) / xi))
        for k in range(1, kmax + 1):
            lam = float(np.hypot(b.mu, xi * k))
            if lam <= window:
                out.extend([lam, lam, -lam, -lam])
    if op.kernel is not None:
        mult = op.kernel.frame.shape[1]
        kmax = int(np.floor(window / xi))
        for k in range(-kmax, kmax + 1):
            out.extend([xi * k] * mult)
    return np.sort(np.array(out))


# -- coupled boundary conditions ---------------------------------------------


def _block_constraint(block: DoubledBlock, lag: Lagrangian, tol: float) -> Lagrangian:
    tr = _block_trace(lag.frame, block.frame, tol)
    k = block.frame.shape[1] // 2
    if tr.shape[1] != k:
        raise IncompatibleBoundary(
            f"constraint meets doubled block mu={block.mu:.6g} in dimension "
            f"{tr.shape[1]}, expected {k}"
        )
    return lagrangian_from_frame(block.space, tr, tol)


def _split_block_constraint(bc: Lagrangian, half: int) -> Optional[tuple]:
    """(line at slot 0, line at slot 1) when a 2-line block constraint splits."""
    frame = bc.frame
    top, bot = frame[:half, :], frame[half:, :]
    out = []
    for part, other in ((top, bot), (bot, top)):
        u, s, vh = np.linalg.svd(other)
        ns = vh.conj().T[:, np.sum(s > 1e-9):]
        if ns.shape[1] != 1:
            return None
        out.append((part @ ns).ravel())
    return out[0], out[1]


def _graph_frame_block(block: DoubledBlock, ell: float, lam: float, side: str) -> np.ndarray:
    """Orthonormal frame of the solution graph inside one doubled block."""
    k = block.frame.shape[1] // 2
    if block.is_kernel:
        t = np.cos(lam * ell) * np.eye(k) - np.sin(lam * ell) * block.kernel_gamma
    else:
        t = _transfer_matrix(lam, block.mu, ell)
    eye = np.eye(k)
    raw = np.vstack([eye, t]) if side == "+" else np.vstack([t, eye])
    return orthonormal_columns(raw)


def _wrap_arr(x):
    return np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) - np.pi


def _phases_grid(block: DoubledBlock, ell: float, bc_phi_h: np.ndarray,
                 lams: np.ndarray, side: str) -> np.ndarray:
    """Eigenphases of phi(graph(lam)) phi(B)* for a batch of lam, shape (G, 2).

    The graph map is A_minus A_plus^{-1} of the unnormalized frame [I; T] (or
    [T; I]), which is exact for any spanning frame, so everything reduces to
    batched 2x2 arithmetic.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    mu = block.mu
    c, s = _transfer_terms(lams, mu, ell)
    t11, t12 = c - mu * s, s * lams
    t21, t22 = -s * lams, c + mu * s
    if side == "+":
        rows = (np.ones_like(lams), np.zeros_like(lams), t11, t21,
                np.zeros_like(lams), np.ones_like(lams), t12, t22)
    else:
        rows = (t11, t21, np.ones_like(lams), np.zeros_like(lams),
                t12, t22, np.zeros_like(lams), np.ones_like(lams))
    f = np.empty((lams.size, 4, 2), dtype=complex)
    f[:, 0, 0], f[:, 1, 0], f[:, 2, 0], f[:, 3, 0] = rows[0], rows[1], rows[2], rows[3]
    f[:, 0, 1], f[:, 1, 1], f[:, 2, 1], f[:, 3, 1] = rows[4], rows[5], rows[6], rows[7]
    bp_h = block.space.basis_plus.conj().T
    bm_h = block.space.basis_minus.conj().T
    a_plus = np.einsum("ij,gjk->gik", bp_h, f)
    a_minus = np.einsum("ij,gjk->gik", bm_h, f)
    det = a_plus[:, 0, 0] * a_plus[:, 1, 1] - a_plus[:, 0, 1] * a_plus[:, 1, 0]
    inv = np.empty_like(a_plus)
    inv[:, 0, 0], inv[:, 1, 1] = a_plus[:, 1, 1], a_plus[:, 0, 0]
    inv[:, 0, 1], inv[:, 1, 0] = -a_plus[:, 0, 1], -a_plus[:, 1, 0]
    inv /= det[:, None, None]
    w = np.einsum("gij,gjk,kl->gil", a_minus, inv, bc_phi_h)
    tr = w[:, 0, 0] + w[:, 1, 1]
    dt = w[:, 0, 0] * w[:, 1, 1] - w[:, 0, 1] * w[:, 1, 0]
    disc = np.sqrt(tr * tr - 4.0 * dt)
    return np.angle(np.stack([(tr + disc) / 2.0, (tr - disc) / 2.0], axis=1))


def _aligned_phase_branches(ph: np.ndarray) -> np.ndarray:
    """Align the 2-phase rows into continuous branches (identity-or-swap)."""
    d_id = np.sum(np.abs(_wrap_arr(ph[1:] - ph[:-1])), axis=1)
    d_sw = np.sum(np.abs(_wrap_arr(ph[1:, ::-1] - ph[:-1])), axis=1)
    flips = d_sw < d_id
    parity = np.concatenate([[False], np.cumsum(flips) % 2 == 1])
    out = ph.copy()
    out[parity] = out[parity][:, ::-1]
    return out


def _tracked_block_roots(block: DoubledBlock, ell: float, bc_phi_h: np.ndarray,
                         side: str, window: float, tol: float) -> np.ndarray:
    """Eigenvalues from one doubled 2-D block by eigenphase tracking.

    The intersection condition is an eigenphase of phi(graph) phi(B)* hitting
    zero; the two branches are aligned along the scan grid and each zero
    crossing is bisected in lambda with batched evaluations.
    """
    step = min(np.pi / (4.0 * ell), 0.45 / max(block.mu, 1.0))
    grid = np.arange(-window, window + step, step)
    ph = _phases_grid(block, ell, bc_phi_h, grid, side)
    for _ in range(6):
        aligned = _aligned_phase_branches(ph)
        arcs = _wrap_arr(aligned[1:] - aligned[:-1])
        if float(np.max(np.abs(arcs))) <= 0.45 * np.pi:
            break
        # densify globally; the transfer terms are cheap and this is rare
        fine = np.empty(2 * grid.size - 1)
        fine[0::2] = grid
        fine[1::2] = 0.5 * (grid[:-1] + grid[1:])
        grid = fine
        ph = _phases_grid(block, ell, bc_phi_h, grid, side)
    else:
        raise BracketingFailure("eigenphase tracking lost after densifying the scan")

    u0 = aligned[:-1]
    u1 = u0 + arcs
    crossing = ((u0 < 0) & (u1 >= 0)) | ((u1 < 0) & (u0 >= 0))
    at_grid = np.abs(aligned) <= 1e-12

    lo_idx, branch = np.nonzero(crossing & ~(np.abs(u0) <= 1e-12))
    lo = grid[lo_idx]
    hi = grid[lo_idx + 1]
    ref = u0[lo_idx, branch]
    flo = ref.copy()
    for _ in range(64):
        if lo.size == 0 or float(np.max(hi - lo)) < tol:
            break
        mid = 0.5 * (lo + hi)
        phm = _phases_grid(block, ell, bc_phi_h, mid, side)
        rel = _wrap_arr(phm - flo[:, None])
        pick = np.argmin(np.abs(rel), axis=1)
        fm = flo + rel[np.arange(lo.size), pick]
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    candidates = list(0.5 * (lo + hi)) + list(grid[np.any(at_grid, axis=1)])
    candidates = sorted(c for c in candidates if abs(c) <= window + 1e-9)
    if not candidates:
        return np.array([])
    clusters = [candidates[0]]
    for r in candidates[1:]:
        if r - clusters[-1] > max(tol * 10, 1e-9):
            clusters.append(r)
    out = []
    for r in clusters:
        mult = int(np.sum(np.abs(_wrap_arr(
            _phases_grid(block, ell, bc_phi_h, np.array([r]), side)[0])) <= 1e-7))
        out.extend([r] * max(mult, 1))
    return np.array(out)


def _kernel_coupled_offsets(block: DoubledBlock, ell: float, bc_phi_h: np.ndarray,
                            side: str) -> tuple[np.ndarray, float]:
    """(base roots, spacing) of the kernel doubled block with any constraint.

    The graph unitary is e^{-+ i lam L} times a constant, so each eigenphase
    branch is exactly linear with slope -L (side '+') or +L (side '-');
    eigenvalues form one lattice of spacing 2 pi / L per branch.
    """
    rate = -ell if side == "+" else ell
    theta0 = np.angle(np.linalg.eigvals(
        lagrangian_from_frame(block.space, _graph_frame_block(block, ell, 0.0, side)).phi
        @ bc_phi_h))
    bases = theta0 / (-rate)
    return bases, 2.0 * np.pi / ell


def boundary_spectrum(op: ModelOperator, constraint: Lagrangian, window: float,
                      side: str = "+", dbs: Optional[DoubleBoundarySpace] = None,
                      tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues of the interval operator whose boundary data is constrained
    to the Lagrangian ``constraint`` of the double space H ⊕ H.

    Split constraints per block reduce to the real transfer calculus; coupled
    ones go through eigenphase tracking; kernel blocks are exact lattices.
    """
    if not isinstance(op.geometry, Interval):
        raise ValueError("boundary_spectrum needs an interval model")
    if dbs is None:
        dbs = double_boundary(op)
    ell = op.geometry.length
    out = []
    for block in dbs.blocks:
        bc = _block_constraint(block, constraint, DEFAULT_TOL)
        if block.is_kernel:
            bases, spacing = _kernel_coupled_offsets(block, ell, bc.phi.conj().T, side)
            frac = np.mod(bases / spacing, 1.0)
            out.append(_lattice_in_window(frac, spacing, window))
            continue
        split = _split_block_constraint(bc, 2)
        if split is not None:
            s0, s1 = split
            p, q = (s0, s1) if side == "+" else (s1, s0)
            f = _block_root_function(block.mu, ell, _real_line_rep(p), _real_line_rep(q))
            step = min(np.pi / (4.0 * ell), 0.45 / max(block.mu, 1.0))
            out.append(_bracketed_roots(f, window, step, tol))
        else:
            out.append(_tracked_block_roots(block, ell, bc.phi.conj().T, side, window, tol))
    return np.sort(np.concatenate(out)) if out else np.array([])


def interval_kernel_dim(op: ModelOperator, constraint: Lagrangian,
                        dbs: Optional[DoubleBoundarySpace] = None,
                        side: str = "+", tol: float = DEFAULT_TOL) -> int:
    """dim ker of the interval operator = dim(Cauchy data ∩ constraint)."""
    if dbs is None:
        dbs = double_boundary(op)
    return intersection_dim(cauchy_data(op, dbs, side=side), constraint, tol)


# ---------------------------------------------------------------------------
# truncated eta


@dataclass(frozen=True)
class EtaEstimate:
    eta: float
    bound: float
    n_used: int


def eta_lattice(offset: float) -> tuple[float, int]:
    """(eta, dim ker) of the arithmetic progression {(offset + k) * spacing}.

    For offset in (0, 1) the regularized signature sum is 1 - 2*offset;
    offset 0 puts one eigenvalue at zero.
    """
    a = offset % 1.0
    if a < 1e-11 or a > 1 - 1e-11:
        return 0.0, 1
    return 1.0 - 2.0 * a, 0


def eta_truncated(eigenvalues, n_max: Optional[int] = None,
                  mode: str = "symmetric-sum", zero_tol: float = 1e-9,
                  require_bound: Optional[float] = None) -> EtaEstimate:
    """Estimate eta = "sum" of sign(lambda) from a window-complete spectrum.

    mode 'symmetric-sum': prefix sums over the |lambda|-sorted spectrum are
    pair-averaged; the reported bound is the observed oscillation plus drift
    of the averaged tail.  mode 'zero-mode-closed-form': ``eigenvalues``
    holds lattice offsets (fractions of the spacing); exact, bound 0.
    """
    if mode == "zero-mode-closed-form":
        eta = 0.0
        offs = np.atleast_1d(np.asarray(eigenvalues, dtype=float))
        for a in offs:
            e, _ = eta_lattice(float(a))
            eta += e
        return EtaEstimate(eta, 0.0, offs.size)
    if mode != "symmetric-sum":
        raise ValueError(f"unknown mode {mode!r}")
    lams = np.asarray(eigenvalues, dtype=float)
    lams = lams[np.abs(lams) > zero_tol]
    mags = np.sort(np.abs(lams))
    order = np.argsort(np.abs(lams))
    signs = np.sign(lams[order])
    if n_max is not None:
        signs = signs[: 2 * n_max]
        mags = mags[: 2 * n_max]
    if signs.size == 0:
        return EtaEstimate(0.0, 0.0, 0)
    # S(window) = sum of signs over |lambda| <= window is piecewise constant;
    # its window-length-weighted average over a trailing stretch converges to
    # the regularized eta (exactly 1 - 2a on an offset lattice), unlike the
    # count-weighted average of partial sums
    prefix = np.cumsum(signs)

    def trailing_average(frac: float) -> float:
        r_hi = mags[-1]
        r_lo = frac * r_hi
        i0 = int(np.searchsorted(mags, r_lo))
        if i0 >= mags.size - 1:
            return float(prefix[-1])
        knots = np.concatenate([[r_lo], mags[i0:], [r_hi]])
        values = np.concatenate([[prefix[i0 - 1] if i0 > 0 else 0.0], prefix[i0:]])
        widths = np.diff(knots)
        total = float(np.sum(values[: widths.size] * widths))
        return total / max(r_hi - r_lo, 1e-300)

    a_half = trailing_average(0.5)
    a_quarter = trailing_average(0.75)
    est = a_quarter
    spacing = float(np.median(np.diff(mags))) if mags.size > 4 else float(mags[-1])
    edge = 4.0 * spacing / max(mags[-1] - 0.75 * mags[-1], 1e-300)
    bound = 2.0 * abs(a_half - a_quarter) + edge + 1e-12
    if require_bound is not None and bound > require_bound:
        raise ConvergenceTooSlow(
            f"eta bound {bound:.3e} exceeds requested {require_bound:.3e} "
            f"at {signs.size} eigenvalues"
        )
    return EtaEstimate(est, bound, int(signs.size))


def interval_eta_tilde(op: ModelOperator, constraint: Lagrangian, side: str = "+",
                       dbs: Optional[DoubleBoundarySpace] = None,
                       n_max: int = 2000, tol: float = 1e-10) -> tuple[float, float]:
    """(reduced eta, truncation bound) of the constrained interval operator.

    Kernel-block branches use the exact lattice form (bound 0); each 2-D mode
    block is summed symmetrically over a window holding about n_max roots.
    The kernel dimension entering reduced eta is exact (Cauchy data).
    """
    if dbs is None:
        dbs = double_boundary(op)
    ell = op.geometry.length
    eta = 0.0
    bound = 0.0
    for block in dbs.blocks:
        bc = _block_constraint(block, constraint, DEFAULT_TOL)
        if block.is_kernel:
            bases, spacing = _kernel_coupled_offsets(block, ell, bc.phi.conj().T, side)
            for base in bases:
                e, _ = eta_lattice(float(np.mod(base / spacing, 1.0)))
                eta += e
            continue
        window = (n_max / 2.0) * np.pi / ell + 5.0 * block.mu + 5.0
        bc_phi_h = bc.phi.conj().T
        split = _split_block_constraint(bc, 2)
        if split is not None:
            s0, s1 = split
            p, q = (s0, s1) if side == "+" else (s1, s0)
            f = _block_root_function(block.mu, ell, _real_line_rep(p), _real_line_rep(q))
            step = min(np.pi / (4.0 * ell), 0.45 / max(block.mu, 1.0))
            roots = _bracketed_roots(f, window, step, tol)
        else:
            roots = _tracked_block_roots(block, ell, bc_phi_h, side, window, tol)
        est = eta_truncated(roots, n_max=n_max)
        eta += est.eta
        bound += est.bound
    dim_ker = intersection_dim(cauchy_data(op, dbs, side=side), constraint, DEFAULT_TOL)
    return 0.5 * (eta + dim_ker), 0.5 * bound


# ---------------------------------------------------------------------------
# the P(theta, P) family and the constancy of the glued kernel


def p_theta(p_matrix, theta: float) -> np.ndarray:
    """The interpolation between P ⊕ (I-P) and the transmission projection.

    Block form over (first copy, second copy):
    [[cos^2 P + sin^2 (I-P), -cos sin I], [-cos sin I, cos^2 (I-P) + sin^2 P]].
    """
    p = as_complex_matrix(p_matrix)
    d = p.shape[0]
    eye = np.eye(d)
    c2, s2, cs = np.cos(theta) ** 2, np.sin(theta) ** 2, np.cos(theta) * np.sin(theta)
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = c2 * p + s2 * (eye - p)
    out[d:, d:] = c2 * (eye - p) + s2 * p
    out[:d, d:] = -cs * eye
    out[d:, :d] = -cs * eye
    return out


def p_theta_kernel_membership(p_matrix, theta: float, xi: np.ndarray,
                              tol: float = 1e-9) -> bool:
    """Membership test for ker P(theta, P): cos(t) P xi_+ = sin(t) P xi_- and
    sin(t) (I-P) xi_+ = cos(t) (I-P) xi_-."""
    p = as_complex_matrix(p_matrix)
    d = p.shape[0]
    xi = np.asarray(xi, dtype=complex).ravel()
    xp, xm = xi[:d], xi[d:]
    eye = np.eye(d)
    r1 = np.cos(theta) * (p @ xp) - np.sin(theta) * (p @ xm)
    r2 = np.sin(theta) * ((eye - p) @ xp) - np.cos(theta) * ((eye - p) @ xm)
    scale = max(1.0, float(np.linalg.norm(xi)))
    return float(np.linalg.norm(r1) + np.linalg.norm(r2)) <= tol * 10 * scale


def _null_space(m: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    u, s, vh = np.linalg.svd(m)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    return vh.conj().T[:, np.sum(s > tol * scale):]


def caldconst_check(op_plus: ModelOperator, op_minus: ModelOperator,
                    thetas: Optional[Sequence[float]] = None,
                    tol: float = DEFAULT_TOL) -> dict:
    """Constancy of dim(ker P(theta, P_+) ∩ (L_+ ⊕ L_-)) over theta in [0, pi/4]
    and its equality with dim(L_+ ∩ L_-), for the two Cauchy data spaces.

    Raises IdentityViolation if the dimension moves or misses the target.
    """
    if not op_plus.space.same_space(op_minus.space):
        raise DimensionMismatch("models must share the boundary space")
    dbs = double_boundary(op_plus)
    l_plus = cauchy_data(op_plus, dbs, side="+")
    l_minus = cauchy_data(op_minus, dbs, side="-")
    target = intersection_dim(l_plus, l_minus, tol)
    p_proj = l_plus.frame @ l_plus.frame.conj().T
    d2 = dbs.space.dim
    cut_image = np.zeros((2 * d2, l_plus.frame.shape[1] + l_minus.frame.shape[1]),
                         dtype=complex)
    cut_image[:d2, : l_plus.frame.shape[1]] = l_plus.frame
    cut_image[d2:, l_plus.frame.shape[1]:] = l_minus.frame
    if thetas is None:
        thetas = np.linspace(0.0, np.pi / 4.0, 9)
    dims = []
    for th in thetas:
        ker = _null_space(p_theta(p_proj, float(th)), tol)
        dims.append(intersect_subspaces([ker, cut_image], tol).shape[1])
    if any(d != target for d in dims):
        raise IdentityViolation(
            f"kernel dimension along theta = {dims}, expected constant {target}"
        )
    return {"dims": dims, "target": target, "thetas": list(map(float, thetas))}


# ---------------------------------------------------------------------------
# adiabatic limit


def _eigenspaces(a: np.ndarray, tol: float = 1e-9):
    vals, vecs = np.linalg.eigh(a)
    groups = []
    i = 0
    scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
    while i < len(vals):
        j = i
        while j + 1 < len(vals) and vals[j + 1] - vals[i] <= tol * 100 * scale:
            j += 1
        groups.append((float(np.mean(vals[i: j + 1])), vecs[:, i: j + 1]))
        i = j + 1
    return groups


def adiabatic_limit(op: ModelOperator, l_x: Optional[Lagrangian] = None,
                    nu: float = 0.0, dbs: Optional[DoubleBoundarySpace] = None,
                    tol: float = DEFAULT_TOL) -> Lagrangian:
    """Limit of the stretched Cauchy data spaces in the double boundary space.

    Computes the symplectic reduction of L_X by F^-_nu ⊕ (middle band), then
    the filtered per-eigenvalue projections, and assembles
    (⊕_i L_{mu_i}) ⊕ F^+_nu.  Requires the non-resonance condition
    L_X ∩ F^-_nu = 0.
    """
    if dbs is None:
        dbs = double_boundary(op)
    if l_x is None:
        l_x = cauchy_data(op, dbs, side="+")
    groups = _eigenspaces(dbs.a_tilde, tol)
    thr = tol * 100 * max(1.0, np.linalg.norm(dbs.a_tilde, 2))
    f_minus = [v for mu, v in groups if mu < -nu - thr]
    middle = [(mu, v) for mu, v in groups if mu <= nu + thr and mu >= -nu - thr]
    f_plus = [v for mu, v in groups if mu > nu + thr]
    if f_minus:
        fm = np.hstack(f_minus)
        if intersect_subspaces([l_x.frame, fm], tol).shape[1] != 0:
            raise ResonanceViolation(
                f"L_X meets F^-_nu at nu={nu}; raise the non-resonance level"
            )
    parts = []
    if middle:
        u_frame = np.hstack(f_minus + [v for _, v in middle]) if f_minus \
            else np.hstack([v for _, v in middle])
        red = symplectic_reduce(l_x, u_frame, tol)
        r_frame = red.embedded_frame
        cumulative = []
        for mu, v in middle:
            cumulative.append(v)
            cum = np.hstack(cumulative)
            inter = intersect_subspaces([r_frame, cum], tol)
            if inter.shape[1]:
                proj = v @ (v.conj().T @ inter)
                piece = orthonormal_columns(proj, tol)
                if piece.shape[1]:
                    parts.append(piece)
    if f_plus:
        parts.append(np.hstack(f_plus))
    if not parts:
        raise ResonanceViolation("empty adiabatic limit; degenerate model")
    frame = orthonormal_columns(np.hstack(parts), tol)
    return lagrangian_from_frame(dbs.space, frame)


# ---------------------------------------------------------------------------
# assembled verifiers


def _constraint_of(boundary: Lagrangian) -> Lagrangian:
    """Boundary-data constraint of the condition 'project to boundary Lagrangian
    P and require zero': ker proj(P) = gamma P."""
    return gamma_conjugate(boundary)


def glue_verify(op_plus: ModelOperator, op_minus: ModelOperator, p: Lagrangian,
                window: float = 20.0, n_max: int = 10_000,
                eta_tol: float = 1e-9, dbs: Optional[DoubleBoundarySpace] = None) -> dict:
    """Verify the eta gluing identity on the circle glued from two intervals.

    eta~(circle) = eta~(D_P, M+) + eta~(D_{I-P}, M-) - tau_mu(I - P_-, P, P_+)
    with P a boundary Lagrangian of the double space, P_± the Cauchy data
    projections.  The circle side is exact; interval mode blocks carry a
    truncation bound, kernel blocks are exact.  The identity must close
    within the bound and the integer part must equal the triple index
    exactly, else GluingViolation.
    """
    if not op_plus.space.same_space(op_minus.space):
        raise DimensionMismatch("models must share the boundary space")
    if dbs is None:
        dbs = double_boundary(op_plus)
    if p.space.dim != dbs.space.dim:
        raise DimensionMismatch("boundary Lagrangian must live in the double space")
    l_plus = cauchy_data(op_plus, dbs, side="+")
    l_minus = cauchy_data(op_minus, dbs, side="-")

    # closed manifold: symmetric spectrum, kernel = ker A at the zero Fourier mode
    dim_ker_a = op_plus.kernel.frame.shape[1] if op_plus.kernel is not None else 0
    eta_circle = 0.5 * dim_ker_a

    eta_p, bound_p = interval_eta_tilde(op_plus, _constraint_of(p), side="+",
                                        dbs=dbs, n_max=n_max)
    # the minus piece carries the condition I - proj(P): constraint is im P itself
    eta_m, bound_m = interval_eta_tilde(op_minus, p, side="-", dbs=dbs, n_max=n_max)
    triple = tau_mu(gamma_conjugate(l_minus), p, l_plus)
    bound = bound_p + bound_m
    delta = eta_circle - eta_p - eta_m
    nearest = round(delta)
    residue = abs(delta - nearest)
    report = {
        "eta_circle": eta_circle,
        "eta_plus": eta_p,
        "eta_minus": eta_m,
        "tau_mu": triple,
        "bound": bound,
        "delta": delta,
        "mod_z_residue": residue,
        "defect": abs(delta + triple),
    }
    if residue > bound + eta_tol:
        raise GluingViolation(
            f"eta~(M) - eta~+ - eta~- = {delta} is {residue:.3e} from an integer, "
            f"beyond bound {bound:.3e}"
        )
    if nearest != -triple:
        raise GluingViolation(
            f"integer part {nearest} != -tau_mu = {-triple}"
        )
    return report


def nicolaescu_verify(op: ModelOperator, family: Sequence[tuple[float, Lagrangian]],
                      window: float = 12.0,
                      dbs: Optional[DoubleBoundarySpace] = None,
                      tol: float = 1e-10) -> dict:
    """Spectral flow along a boundary-condition path equals the Maslov index
    of (P(t), Cauchy data), both as exact integers.

    ``family`` samples t -> boundary Lagrangian in the double space; the
    interval spectra are tracked inside the window with the (-eps,-eps)
    counting rule; eigenvalues entering the outer 20% margin raise
    WindowEscape.
    """
    if dbs is None:
        dbs = double_boundary(op)
    l_x = cauchy_data(op, dbs, side="+")
    spectra = [boundary_spectrum(op, _constraint_of(bnd), window, side="+", dbs=dbs, tol=tol)
               for _, bnd in family]
    sf = 0
    zero_thr = 1e-8
    for a, b in zip(spectra[:-1], spectra[1:]):
        # per-step symmetric cut placed in the widest spectral gap of the
        # outer band, so both samples hold the same eigenvalues inside
        mags = np.sort(np.abs(np.concatenate([a, b])))
        lo_edge, hi_edge = 0.5 * window, 0.97 * window
        band = np.concatenate([[lo_edge], mags[(mags > lo_edge) & (mags < hi_edge)],
                               [hi_edge]])
        gaps = np.diff(band)
        k = int(np.argmax(gaps))
        cut = 0.5 * (band[k] + band[k + 1])
        if gaps[k] < 1e-6:
            raise WindowEscape(
                f"no clear spectral gap in [{lo_edge:.3g}, {hi_edge:.3g}]; "
                "enlarge the window"
            )
        aa = a[np.abs(a) <= cut]
        bb = b[np.abs(b) <= cut]
        if aa.size != bb.size:
            raise WindowEscape(
                f"an eigenvalue crossed the cut level {cut:.4g} within one step; "
                "sample the family more densely or enlarge the window"
            )
        ca = np.where(np.abs(aa) <= zero_thr, 0, np.sign(aa)).astype(int)
        cb = np.where(np.abs(bb) <= zero_thr, 0, np.sign(bb)).astype(int)
        sf += int(np.sum((ca < 0) & (cb >= 0))) - int(np.sum((ca >= 0) & (cb < 0)))
    pp = LagrangianPairPath([(t, bnd, l_x) for t, bnd in family])
    mas = maslov(pp, 1e-9).value
    if sf != mas:
        raise IdentityViolation(f"spectral flow {sf} != Maslov index {mas}")
    return {"sf": sf, "maslov": mas, "samples": len(family)}


def sw_modz_check(op: ModelOperator, p: Lagrangian, q: Optional[Lagrangian] = None,
                  n_max: int = 2000, dbs: Optional[DoubleBoundarySpace] = None,
                  tol: float = 1e-9) -> dict:
    """Boundary dependence of reduced eta against the boundary trace-log.

    Always checks the mod-Z form exp(2 pi i (eta~_P - eta~_Q)) =
    det(phi(P) phi(Q)*); with Q omitted the Calderon projector is used and
    the strengthened exact form eta~_P - eta~_X = tr log(phi(P) phi(X)*)/2 pi i
    is required (exact on zero-mode models, within the truncation bound
    otherwise).
    """
    if dbs is None:
        dbs = double_boundary(op)
    exact = op.kernel is not None and len(op.blocks) == 0
    l_x = cauchy_data(op, dbs, side="+")
    strengthened = q is None
    q_eff = l_x if q is None else q
    eta_p, bound_p = interval_eta_tilde(op, _constraint_of(p), side="+", dbs=dbs, n_max=n_max)
    eta_q, bound_q = interval_eta_tilde(op, _constraint_of(q_eff), side="+", dbs=dbs, n_max=n_max)
    delta = eta_p - eta_q
    det = complex(np.linalg.det(p.phi @ q_eff.phi.conj().T))
    modz_defect = abs(np.exp(2j * np.pi * delta) - det)
    bound = bound_p + bound_q
    allowed = tol if exact else 2.0 * np.pi * bound + tol
    report = {"delta_eta": delta, "det": det, "modz_defect": modz_defect,
              "bound": bound, "exact_mode": exact}
    if modz_defect > allowed:
        raise IdentityViolation(
            f"mod-Z defect {modz_defect:.3e} beyond allowance {allowed:.3e}"
        )
    if strengthened:
        rhs = (tr_log(p.phi @ l_x.phi.conj().T) / (2j * np.pi)).real
        report["tr_log_side"] = rhs
        if abs(delta - rhs) > (tol if exact else bound + tol):
            raise IdentityViolation(
                f"eta~_P - eta~_X = {delta} != tr-log side {rhs}"
            )
    return report


def model_symmetry_check(op: ModelOperator, p: Lagrangian, q: Lagrangian,
                         window: float, tol: float = 1e-8) -> dict:
    """spec D_{P,Q} = -spec D_{Q,P} elementwise within tol."""
    s1 = interval_spectrum(op, p, q, window)
    s2 = interval_spectrum(op, q, p, window)
    if s1.size != s2.size:
        raise IdentityViolation(
            f"spectra sizes differ: {s1.size} vs {s2.size} in window {window}"
        )
    defect = float(np.max(np.abs(s1 + s2[::-1]))) if s1.size else 0.0
    if defect > tol:
        raise IdentityViolation(f"spectral symmetry defect {defect:.3e} > {tol:.1e}")
    return {"count": int(s1.size), "defect": defect}
