"""Spectral flow of Hermitian matrix paths and the finite eta invariants.

The (-eps,-eps) convention is used throughout: the flow counts eigenvalues
moving from negative to nonnegative minus those moving from nonnegative to
negative, with zero eigenvalues belonging to the nonnegative side.  The zero
threshold |lambda| <= tol * ||H|| is shared between the flow and eta so the
two can never classify an eigenvalue differently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import IdentityViolation, RefinementExhausted
from .unitary_invariants import Crossing, CrossingLog

__all__ = [
    "HermitianPath",
    "SpectralFlowResult",
    "spectral_flow",
    "eta_finite",
    "sf_eta_consistency",
]

ZERO_TOL = 1e-9


def _require_hermitian(h: np.ndarray, tol: float, what: str) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"{what} must be a square matrix")
    scale = max(1.0, np.linalg.norm(h, 2))
    if np.linalg.norm(h - h.conj().T, 2) > tol * 10 * scale:
        raise ValueError(f"{what} is not Hermitian within tolerance")
    return 0.5 * (h + h.conj().T)


class HermitianPath:
    """Sampled path of Hermitian matrices, optionally generator-backed."""

    def __init__(self, samples: Sequence[tuple[float, np.ndarray]],
                 generator: Optional[Callable[[float], np.ndarray]] = None,
                 refine_limit: int = 24, hermiticity_tol: float = 1e-9,
                 zero_tol: float = ZERO_TOL):
        if len(samples) < 2:
            raise ValueError("a path needs at least two samples")
        ts = [float(t) for t, _ in samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("sample times must be strictly increasing")
        mats = [_require_hermitian(h, hermiticity_tol, f"sample at t={t}") for t, h in samples]
        k = mats[0].shape[0]
        if any(m.shape[0] != k for m in mats):
            raise ValueError("all samples must have the same size")
        self.times = ts
        self.mats = mats
        self.generator = generator
        self.refine_limit = refine_limit
        self.size = k
        self.zero_tol = zero_tol

    @classmethod
    def from_generator(cls, generator, t0: float = 0.0, t1: float = 1.0,
                       initial_samples: int = 9, refine_limit: int = 24):
        ts = np.linspace(t0, t1, initial_samples)
        return cls([(float(t), generator(float(t))) for t in ts], generator, refine_limit)

    def reversed(self) -> "HermitianPath":
        t0, t1 = self.times[0], self.times[-1]
        gen = None
        if self.generator is not None:
            g = self.generator
            gen = lambda t: g(t0 + t1 - t)
        rev = [(t0 + t1 - t, h) for t, h in zip(self.times[::-1], self.mats[::-1])]
        return HermitianPath(rev, gen, self.refine_limit, zero_tol=self.zero_tol)

    def _zero_threshold(self, h: np.ndarray) -> float:
        return self.zero_tol * max(1.0, np.linalg.norm(h, 2))

    def _crossing_window(self, norm: float) -> float:
        # eigenvalues inside this band are treated as "currently crossing";
        # refinement localizes them to this resolution instead of chasing the
        # vanishing gap at the crossing itself
        return max(4.0 * self.zero_tol * max(1.0, norm), 1e-4 * max(1.0, norm))

    def refined(self) -> "HermitianPath":
        """Refine until each step moves eigenvalues less than half the local gap."""

        def info(h):
            vals = np.linalg.eigvalsh(h)
            norm = float(np.max(np.abs(vals))) if vals.size else 0.0
            window = self._crossing_window(norm)
            outside = np.abs(vals)[np.abs(vals) > window]
            gap = float(outside.min()) if outside.size else np.inf
            return window, gap

        out_t = [self.times[0]]
        out_m = [self.mats[0]]

        def bound(ia, ib):
            w = max(ia[0], ib[0])
            g = min(ia[1], ib[1])
            return max(0.5 * g, w) if np.isfinite(g) else np.inf

        def push(ta, ha, ia, tb, hb, ib, depth):
            # Weyl: each eigenvalue moves at most ||hb - ha||
            if np.linalg.norm(hb - ha, 2) < bound(ia, ib):
                out_t.append(tb)
                out_m.append(hb)
                return
            if self.generator is None:
                raise RefinementExhausted(
                    f"samples at t={ta:.6g}, {tb:.6g} move eigenvalues across the spectral "
                    "gap and no generator is available"
                )
            if depth >= self.refine_limit:
                raise RefinementExhausted(
                    f"step invariant unreachable after {depth} bisections near t={ta:.6g}"
                )
            tm = 0.5 * (ta + tb)
            hm = _require_hermitian(self.generator(tm), 1e-9, f"generator at t={tm}")
            im = info(hm)
            push(ta, ha, ia, tm, hm, im, depth + 1)
            push(tm, hm, im, tb, hb, ib, depth + 1)

        infos = [info(h) for h in self.mats]
        for i in range(len(self.times) - 1):
            push(self.times[i], self.mats[i], infos[i],
                 self.times[i + 1], self.mats[i + 1], infos[i + 1], 0)
        if len(out_t) == len(self.times):
            return self
        return HermitianPath(list(zip(out_t, out_m)), self.generator,
                             self.refine_limit, zero_tol=self.zero_tol)


@dataclass(frozen=True)
class SpectralFlowResult:
    value: int
    log: CrossingLog

    def __int__(self) -> int:
        return self.value


def _classify(vals: np.ndarray, threshold: float) -> np.ndarray:
    """-1 / 0 / +1 per eigenvalue with the shared kernel threshold."""
    cls = np.sign(vals).astype(int)
    cls[np.abs(vals) <= threshold] = 0
    return cls


def spectral_flow(path: HermitianPath) -> SpectralFlowResult:
    """(-eps,-eps) spectral flow of a Hermitian path, with a crossing log.

    Counted per refined step from sorted-order matched eigenvalues: +1 when a
    matched eigenvalue moves from the negative class to the nonnegative one,
    -1 for the reverse.  Eigenvalues inside |lambda| <= tol*||H|| belong to
    the nonnegative side (zero class).
    """
    p = path.refined()
    crossings: list[Crossing] = []
    vals_prev = np.linalg.eigvalsh(p.mats[0])
    cls_prev = _classify(vals_prev, p._zero_threshold(p.mats[0]))
    for j in range(1, len(p.mats)):
        vals_cur = np.linalg.eigvalsh(p.mats[j])
        cls_cur = _classify(vals_cur, p._zero_threshold(p.mats[j]))
        # sorted-order matching is optimal for Hermitian spectra under small steps
        for a, b, ca, cb in zip(vals_prev, vals_cur, cls_prev, cls_cur):
            d = 0
            if ca < 0 <= cb:
                d = 1
            elif cb < 0 <= ca:
                d = -1
            if d != 0:
                frac = abs(a) / max(abs(b - a), 1e-300)
                tc = p.times[j - 1] + min(frac, 1.0) * (p.times[j] - p.times[j - 1])
                crossings.append(Crossing(float(tc), d, float(a), float(b)))
        vals_prev, cls_prev = vals_cur, cls_cur
    log = CrossingLog(tuple(sorted(crossings, key=lambda c: c.t)))
    return SpectralFlowResult(log.total, log)


def eta_finite(h, tol: float = ZERO_TOL) -> tuple[int, int, float]:
    """(eta, dim ker, reduced eta) of a Hermitian matrix.

    eta = sum of sign(lambda) over nonzero eigenvalues, reduced eta =
    (eta + dim ker)/2; the kernel is |lambda| <= tol * ||H||.
    """
    h = _require_hermitian(h, 1e-9, "eta_finite argument")
    vals = np.linalg.eigvalsh(h)
    threshold = tol * max(1.0, np.linalg.norm(h, 2))
    cls = _classify(vals, threshold)
    eta = int(np.sum(cls))
    dim_ker = int(np.sum(cls == 0))
    return eta, dim_ker, 0.5 * (eta + dim_ker)


def sf_eta_consistency(path: HermitianPath) -> dict:
    """Assert the finite-rank eta/flow identity along a path.

    For finite Hermitian families the derivative term of the continuous
    theory vanishes, so reduced eta at the endpoints must satisfy
    eta~(1) - eta~(0) = SF exactly.
    """
    sf = spectral_flow(path).value
    _, _, eta0 = eta_finite(path.mats[0], path.zero_tol)
    _, _, eta1 = eta_finite(path.mats[-1], path.zero_tol)
    delta = eta1 - eta0
    if abs(delta - sf) > 1e-12:
        raise IdentityViolation(f"eta~(1) - eta~(0) = {delta} != SF = {sf}")
    return {"sf": sf, "eta_tilde_start": eta0, "eta_tilde_end": eta1, "delta": delta}
