"""One-dimensional projections of the capture field and their coupling bounds.

``q`` is the column sum of the exact field.  ``w`` and ``z`` are cheaper
recursions that were proposed as pointwise lower bounds on ``q``; ``z``
drops the extra unit added next to the survivor and has neighbouring
values that differ by at most 4.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .dp import ProbField, iter_fields
from .strategy import Strategy, trajectory

KINDS = ("q", "w", "z")


@dataclass(frozen=True)
class ProjProfile:
    M: int
    values: np.ndarray  # indexed [x + M]
    kind: str
    round: int

    def at(self, x: int) -> float:
        if abs(x) > self.M:
            return 0.0
        return float(self.values[x + self.M])


def project(f: ProbField) -> ProjProfile:
    return ProjProfile(f.M, f.values.sum(axis=1), "q", f.round)


def _terminal(M: int) -> np.ndarray:
    v = np.zeros(2 * M + 1)
    v[M - 1 : M + 2] = (1.0, 3.0, 1.0)
    return v


def coupling_step(old: np.ndarray, M: int, center: int, bonus: float) -> np.ndarray:
    """One backward step of the w (bonus=1) or z (bonus=0) recursion.

    Cells at offset j != 0 from ``center`` average the old values at offsets
    j and j - sign(j); values outside [-M, M] count as zero.
    """
    c = center + M
    W = 2 * M + 1
    padded = np.concatenate(([0.0], old, [0.0]))  # padded[k + 1] == old[k]
    idx = np.arange(W)
    inner = np.where(idx > c, idx - 1, np.where(idx < c, idx + 1, idx))
    new = 0.5 * (padded[idx + 1] + padded[inner + 1])
    new[c] = old[c] + 2.0
    if bonus:
        for k in (c - 1, c + 1):
            if 0 <= k < W:
                new[k] += bonus
    return new


def _coupling_history(s: Strategy, kind: str) -> list[ProjProfile]:
    if kind not in ("w", "z"):
        raise ValueError(f"kind must be 'w' or 'z', got {kind!r}")
    if not s.normalized:
        raise ValueError("strategy must end at the origin")
    M = s.M
    xs = [p.x for p in trajectory(s).positions]
    bonus = 1.0 if kind == "w" else 0.0
    v = _terminal(M)
    out = [ProjProfile(M, v, kind, M)]
    for i in range(M, 1, -1):
        v = coupling_step(v, M, xs[i - 1], bonus)
        out.append(ProjProfile(M, v, kind, i - 1))
    return out


def w_history(s: Strategy) -> list[ProjProfile]:
    return _coupling_history(s, "w")


def z_history(s: Strategy) -> list[ProjProfile]:
    return _coupling_history(s, "z")


def w_profile(s: Strategy) -> ProjProfile:
    return w_history(s)[-1]


def z_profile(s: Strategy) -> ProjProfile:
    return z_history(s)[-1]


@dataclass
class DominationReport:
    min_q_minus_w: float
    argmin_q_minus_w: tuple[int, int]  # (round, x)
    min_w_minus_z: float
    argmin_w_minus_z: tuple[int, int]
    min_q_minus_z: float
    max_z_jump: float
    q_below_w: list[tuple[int, int, float, float]] = field(default_factory=list)

    def q_dominates_w(self, tol: float = 1e-9) -> bool:
        return self.min_q_minus_w >= -tol

    def w_dominates_z(self, tol: float = 1e-9) -> bool:
        return self.min_w_minus_z >= -tol


def check_domination(s: Strategy, tol: float = 1e-9, keep: int = 20) -> DominationReport:
    """Compare q, w and z over every round and offset.

    Cells where q < w - tol are collected (up to ``keep``) as
    ``(round, x, q, w)`` counterexamples.
    """
    ws = w_history(s)
    zs = z_history(s)
    M = s.M
    best_qw = (np.inf, (0, 0))
    best_wz = (np.inf, (0, 0))
    min_qz = np.inf
    max_jump = 0.0
    found: list[tuple[int, int, float, float]] = []
    for f, w, z in zip(iter_fields(s), ws, zs):
        q = project(f).values
        d_qw = q - w.values
        d_wz = w.values - z.values
        k = int(np.argmin(d_qw))
        if d_qw[k] < best_qw[0]:
            best_qw = (float(d_qw[k]), (f.round, k - M))
        k = int(np.argmin(d_wz))
        if d_wz[k] < best_wz[0]:
            best_wz = (float(d_wz[k]), (f.round, k - M))
        min_qz = min(min_qz, float(np.min(q - z.values)))
        max_jump = max(max_jump, float(np.max(np.abs(np.diff(z.values)))))
        for k in np.nonzero(d_qw < -tol)[0]:
            if len(found) < keep:
                found.append((f.round, int(k) - M, float(q[k]), float(w.values[k])))
    return DominationReport(best_qw[0], best_qw[1], best_wz[0], best_wz[1], min_qz, max_jump, found)


def export_profile_csv(p: ProjProfile) -> bytes:
    buf = io.StringIO(newline="")
    buf.write("x,value\n")
    for k, v in enumerate(p.values.tolist()):
        buf.write(f"{k - p.M},{v:.12g}\n")
    return buf.getvalue().encode("utf-8")
