"""Backward dynamic program for a single zombie's capture probability.

``capture_field(s)`` returns the round-1 field: the probability that a
zombie starting at displacement (x, y) from the survivor's terminal vertex
eats a survivor who follows ``s`` during the first M rounds.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ._backend import kernels
from .strategy import Strategy, trajectory


@dataclass(frozen=True)
class ProbField:
    M: int
    values: np.ndarray  # indexed [x + M, y + M]
    round: int

    def __post_init__(self):
        W = 2 * self.M + 1
        if self.values.shape != (W, W):
            raise ValueError(f"field shape {self.values.shape} does not match M={self.M}")

    def at(self, x: int, y: int) -> float:
        if abs(x) > self.M or abs(y) > self.M:
            return 0.0
        return float(self.values[x + self.M, y + self.M])

    def total(self) -> float:
        return float(self.values.sum())


@dataclass(frozen=True)
class WeightSummary:
    n: int
    t: float

    @property
    def t_scaled_sq(self) -> float:
        return self.t / (self.n**2 / 8)

    @property
    def t_scaled_32(self) -> float:
        return self.t / self.n**1.5


def diamond_size(M: int) -> int:
    return 2 * M * M + 2 * M + 1


def terminal_field(M: int) -> ProbField:
    if M < 1:
        raise ValueError(f"horizon must be positive, got {M}")
    W = 2 * M + 1
    v = np.zeros((W, W))
    for dx, dy in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)):
        v[M + dx, M + dy] = 1.0
    return ProbField(M, v, M)


def step_back(field: ProbField, survivor_pos: tuple[int, int]) -> ProbField:
    """Field for round ``i - 1`` from the field for round ``i``.

    ``survivor_pos`` is where the survivor stands while zombies make the
    round ``i - 1`` move.
    """
    if field.round < 2:
        raise ValueError("cannot step back past round 1")
    sx, sy = survivor_pos
    if abs(sx) + abs(sy) > field.M:
        raise ValueError(f"survivor position {survivor_pos} outside the diamond of radius {field.M}")
    values = kernels.step_back(field.values, field.M, int(sx), int(sy))
    return ProbField(field.M, values, field.round - 1)


def iter_fields(s: Strategy) -> Iterator[ProbField]:
    """Yield the fields for rounds M, M-1, ..., 1 in turn."""
    _require_normalized(s)
    pos = trajectory(s).positions
    f = terminal_field(s.M)
    yield f
    for i in range(s.M - 1, 0, -1):
        f = step_back(f, pos[i])
        yield f


def field_history(s: Strategy) -> list[ProbField]:
    return list(iter_fields(s))


def capture_field(s: Strategy) -> ProbField:
    _require_normalized(s)
    xs, ys = trajectory(s).as_arrays()
    return ProbField(s.M, kernels.capture_field(xs, ys, s.M), 1)


def weight(s: Strategy) -> WeightSummary:
    return WeightSummary(s.n, capture_field(s).total())


def _require_normalized(s: Strategy):
    if not s.normalized:
        raise ValueError("strategy must end at the origin")


def export_csv(field: ProbField) -> bytes:
    M = field.M
    buf = io.StringIO(newline="")
    buf.write("x,y,p\n")
    a, b = np.nonzero(field.values > 0)
    for i, j in zip(a.tolist(), b.tolist()):
        buf.write(f"{i - M},{j - M},{field.values[i, j]:.12g}\n")
    return buf.getvalue().encode("utf-8")


def field_to_pixels(field: ProbField) -> np.ndarray:
    """8-bit grayscale image, dark where capture is likely; row 0 is y = +M."""
    p = np.clip(field.values, 0.0, 1.0)
    pix = np.floor(255.0 * (1.0 - p) + 0.5).astype(np.uint8)
    return pix.T[::-1, :]


def export_pgm(field: ProbField, binary: bool = True) -> bytes:
    pix = field_to_pixels(field)
    h, w = pix.shape
    if binary:
        return f"P5\n{w} {h}\n255\n".encode("ascii") + pix.tobytes()
    rows = "\n".join(" ".join(str(v) for v in row) for row in pix.tolist())
    return f"P2\n{w} {h}\n255\n{rows}\n".encode("ascii")


def export_field(field: ProbField, fmt: str, binary: bool = True) -> bytes:
    if fmt == "csv":
        return export_csv(field)
    if fmt == "pgm":
        return export_pgm(field, binary=binary)
    raise ValueError(f"unknown field format {fmt!r}")
