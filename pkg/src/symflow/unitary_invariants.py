"""Winding number of unitary paths, the branch-fixed trace log, and the
double index tau_w.

Conventions, fixed once and used everywhere:

* the branch of log is cut just below -1: log(r e^{it}) = ln r + it with
  t in (-pi, pi], so eigenvalues at -1 take log = +i*pi;
* the winding number counts signed crossings of eigenphases through -1,
  counterclockwise positive;
* for a path whose endpoint spectra contain -1, the whole path is first
  multiplied by e^{-i*eps} with eps half the smallest nonzero circular
  distance of the endpoint eigenphases to pi (pi/2 when none exists).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._linalg import as_complex_matrix, as_integer, branch_log_unitary, require_unitary
from .errors import MethodDisagreement, NonIntegerResult, RefinementExhausted

__all__ = [
    "UnitaryPath",
    "Crossing",
    "CrossingLog",
    "WindResult",
    "tr_log",
    "wind",
    "tau_w",
    "wind_plus_inverse_check",
]

# step invariant: consecutive samples closer than sqrt(2) in operator norm,
# so no eigenphase can move by pi/2 or more within one step
STEP_NORM_BOUND = np.sqrt(2.0) * 0.95
MAX_ARC = 0.5 * np.pi * 0.98


@dataclass(frozen=True)
class Crossing:
    t: float
    direction: int
    phase_before: float
    phase_after: float


@dataclass(frozen=True)
class CrossingLog:
    crossings: tuple[Crossing, ...] = ()

    @property
    def total(self) -> int:
        return sum(c.direction for c in self.crossings)


@dataclass(frozen=True)
class WindResult:
    value: int
    log: CrossingLog
    eps_shift: float

    def __int__(self) -> int:
        return self.value


class UnitaryPath:
    """Sampled path of unitary matrices, optionally generator-backed.

    ``samples`` is a list of (t, U) with t increasing in [0, 1] (any real
    interval is accepted and rescaled internally).  If ``generator`` is given
    it must be a pure function t -> unitary agreeing with the samples.
    """

    def __init__(self, samples: Sequence[tuple[float, np.ndarray]],
                 generator: Optional[Callable[[float], np.ndarray]] = None,
                 refine_limit: int = 24, unitarity_tol: float = 1e-9):
        if len(samples) < 2:
            raise ValueError("a path needs at least two samples")
        ts = [float(t) for t, _ in samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("sample times must be strictly increasing")
        mats = [require_unitary(u, unitarity_tol, what=f"sample at t={t}") for t, u in samples]
        k = mats[0].shape[0]
        if any(m.shape[0] != k for m in mats):
            raise ValueError("all samples must have the same size")
        self.times = ts
        self.mats = mats
        self.generator = generator
        self.refine_limit = refine_limit
        self.size = k

    @classmethod
    def from_generator(cls, generator: Callable[[float], np.ndarray],
                       t0: float = 0.0, t1: float = 1.0, initial_samples: int = 9,
                       refine_limit: int = 24) -> "UnitaryPath":
        ts = np.linspace(t0, t1, initial_samples)
        return cls([(float(t), generator(float(t))) for t in ts], generator, refine_limit)

    def reversed(self) -> "UnitaryPath":
        t0, t1 = self.times[0], self.times[-1]
        gen = None
        if self.generator is not None:
            g = self.generator
            gen = lambda t: g(t0 + t1 - t)
        rev = [(t0 + t1 - t, u) for t, u in zip(self.times[::-1], self.mats[::-1])]
        return UnitaryPath(rev, gen, self.refine_limit)

    def pointwise_inverse(self) -> "UnitaryPath":
        gen = None
        if self.generator is not None:
            g = self.generator
            gen = lambda t: g(t).conj().T
        return UnitaryPath([(t, u.conj().T) for t, u in zip(self.times, self.mats)],
                           gen, self.refine_limit)

    def refined(self) -> "UnitaryPath":
        """Insert generator midpoints until the step invariant holds."""
        out_times = [self.times[0]]
        out_mats = [self.mats[0]]

        def push(ta, ua, tb, ub, depth):
            if np.linalg.norm(ub - ua, 2) < STEP_NORM_BOUND:
                out_times.append(tb)
                out_mats.append(ub)
                return
            if self.generator is None:
                raise RefinementExhausted(
                    f"samples at t={ta:.6g}, {tb:.6g} violate the step invariant and no "
                    "generator is available (interpolation would invent data)"
                )
            if depth >= self.refine_limit:
                raise RefinementExhausted(
                    f"step invariant unreachable after {depth} bisections near t={ta:.6g}"
                )
            tm = 0.5 * (ta + tb)
            um = require_unitary(self.generator(tm), what=f"generator at t={tm}")
            push(ta, ua, tm, um, depth + 1)
            push(tm, um, tb, ub, depth + 1)

        for i in range(len(self.times) - 1):
            push(self.times[i], self.mats[i], self.times[i + 1], self.mats[i + 1], 0)
        if len(out_times) == len(self.times):
            return self
        return UnitaryPath(list(zip(out_times, out_mats)), self.generator, self.refine_limit)


def tr_log(u, tol: float = 1e-9) -> complex:
    """Trace of log(U) with the branch cut just below -1."""
    u = require_unitary(u, tol, what="tr_log argument")
    return branch_log_unitary(u, tol)


def _wrap(x: np.ndarray) -> np.ndarray:
    return np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) - np.pi


def _endpoint_shift(u0: np.ndarray, u1: np.ndarray, atol: float = 1e-11) -> float:
    """eps for the endpoint convention wind(f) := wind(f e^{-i eps})."""
    phases = np.concatenate([np.angle(np.linalg.eigvals(u0)),
                             np.angle(np.linalg.eigvals(u1))])
    dist = np.abs(_wrap(phases - np.pi))
    nonzero = dist[dist > atol]
    if nonzero.size == 0:
        return 0.5 * np.pi
    return 0.5 * float(np.min(nonzero))


def _match_phases(prev: np.ndarray, cur: np.ndarray) -> np.ndarray:
    """Permutation matching phases of consecutive samples on the circle."""
    diff = _wrap(cur[None, :] - prev[:, None])
    _, cols = linear_sum_assignment(np.abs(diff))
    return cols


def _crossing_count(u_prev: float, u_cur: float) -> int:
    """Signed crossing of -1 for one matched eigenphase arc.

    Positions are measured relative to pi (u = 0 means the eigenvalue sits at
    -1); a value exactly at -1 counts as already on the counterclockwise side.
    """
    if u_prev < 0.0 <= u_cur:
        return 1
    if u_cur < 0.0 <= u_prev:
        return -1
    return 0


def wind(path: UnitaryPath, tol: float = 1e-9) -> WindResult:
    """Winding number of a unitary path, computed two ways that must agree.

    (a) accumulated det-phase of step-relative unitaries, corrected by the
        endpoint branch logs; (b) per-step matched-eigenphase crossings of -1.
    The integer from (b) is returned with its crossing log; a disagreement
    raises MethodDisagreement (numerical breakdown, never silently resolved).
    """
    p = path.refined()
    eps = _endpoint_shift(p.mats[0], p.mats[-1])
    shift = np.exp(-1j * eps)
    mats = [u * shift for u in p.mats]
    times = p.times

    # method (b): eigenphase transport
    crossings: list[Crossing] = []
    phases_prev = np.sort(np.angle(np.linalg.eigvals(mats[0])))
    for j in range(1, len(mats)):
        phases_cur = np.angle(np.linalg.eigvals(mats[j]))
        perm = _match_phases(phases_prev, phases_cur)
        matched = phases_cur[perm]
        arcs = _wrap(matched - phases_prev)
        if np.any(np.abs(arcs) > MAX_ARC):
            raise RefinementExhausted(
                f"eigenphase moved by {np.max(np.abs(arcs)):.3f} rad in one refined step "
                f"near t={times[j - 1]:.6g}; transport ambiguous"
            )
        u_prev = _wrap(phases_prev - np.pi)
        u_prev[np.abs(u_prev) <= 1e-9] = 0.0
        u_cur = u_prev + arcs
        u_cur[np.abs(u_cur) <= 1e-9] = 0.0
        for a, b, th0, th1 in zip(u_prev, u_cur, phases_prev, matched):
            d = _crossing_count(a, b)
            if d != 0:
                frac = abs(a) / max(abs(b - a), 1e-300)
                tc = times[j - 1] + frac * (times[j] - times[j - 1])
                crossings.append(Crossing(float(tc), d, float(th0), float(th1)))
        phases_prev = np.sort(phases_cur)
    log = CrossingLog(tuple(sorted(crossings, key=lambda c: c.t)))
    by_counting = log.total

    # method (a): continuous arg det minus endpoint branch corrections
    arg_det = 0.0
    for j in range(1, len(mats)):
        rel = mats[j] @ mats[j - 1].conj().T
        arg_det += float(np.sum(np.angle(np.linalg.eigvals(rel))))
    by_det = (arg_det - branch_log_unitary(mats[-1], tol).imag
              + branch_log_unitary(mats[0], tol).imag) / (2.0 * np.pi)
    try:
        by_det_int = as_integer(by_det, 1e-6, what="winding (det method)")
    except NonIntegerResult as exc:
        raise MethodDisagreement(str(exc)) from exc
    if by_det_int != by_counting:
        raise MethodDisagreement(
            f"det-phase method gives {by_det_int}, crossing count gives {by_counting}"
        )
    return WindResult(by_counting, log, eps)


def _principal_log_matrix(u: np.ndarray) -> np.ndarray:
    """Matrix log of a unitary with the (-pi, pi] branch (eigendecomposition)."""
    vals, vecs = np.linalg.eig(u)
    phases = np.angle(vals)
    phases[np.abs(np.abs(phases) - np.pi) <= 1e-12] = np.pi
    return (vecs * (1j * phases)) @ np.linalg.inv(vecs)


def tau_w(u, v, tol: float = 1e-9, cross_check: bool = False) -> int:
    """Double index tau_w(U, V): the winding-additivity defect of (U, V).

    Evaluated by the closed trace-log formula
    (tr log UV - tr log U - tr log V) / (2 pi i); with ``cross_check`` the
    path definition wind(f) + wind(g) - wind(fg) along f = exp(s log U),
    g = exp(s log V) is computed as well and must agree.
    """
    u = require_unitary(u, tol, what="U")
    v = require_unitary(v, tol, what="V")
    raw = (branch_log_unitary(u @ v, tol) - branch_log_unitary(u, tol)
           - branch_log_unitary(v, tol)) / (2j * np.pi)
    value = as_integer(raw.real, 1e-8, what="tau_w")
    if abs(raw.imag) > 1e-8:
        raise NonIntegerResult(f"tau_w has imaginary residue {raw.imag:.3e}")
    if cross_check:
        lu = _principal_log_matrix(u)
        lv = _principal_log_matrix(v)
        from scipy.linalg import expm

        f = UnitaryPath.from_generator(lambda s: expm(s * lu), initial_samples=17)
        g = UnitaryPath.from_generator(lambda s: expm(s * lv), initial_samples=17)
        fg = UnitaryPath.from_generator(lambda s: expm(s * lu) @ expm(s * lv),
                                        initial_samples=17)
        by_path = wind(f).value + wind(g).value - wind(fg).value
        if by_path != value:
            raise MethodDisagreement(
                f"tau_w trace-log formula gives {value}, path definition gives {by_path}"
            )
    return value


def wind_plus_inverse_check(path: UnitaryPath, tol: float = 1e-9):
    """wind(f) + wind(f^{-1}) = dim ker(f(0)+I) - dim ker(f(1)+I), asserted.

    Returns (wind(f), wind(f^{-1}), kernel dim at start, kernel dim at end).
    """
    from .errors import IdentityViolation

    wf = wind(path, tol).value
    wi = wind(path.pointwise_inverse(), tol).value

    def ker_dim(u):
        return int(np.sum(np.abs(np.abs(np.angle(np.linalg.eigvals(u))) - np.pi) <= 1e-9))

    d0 = ker_dim(path.mats[0])
    d1 = ker_dim(path.mats[-1])
    if wf + wi != d0 - d1:
        raise IdentityViolation(
            f"wind(f) + wind(f^-1) = {wf + wi} != {d0 - d1} = dim ker(f(0)+I) - dim ker(f(1)+I)"
        )
    return wf, wi, d0, d1
