"""Coordinates and geodesics on the toroidal grid C_n x C_n.

Axis convention: ``Up`` is +y, ``Right`` is +x.  Grid size ``n`` is passed to
each operation rather than stored on the points.
"""
from __future__ import annotations

from enum import Enum
from typing import NamedTuple


class Move(Enum):
    UP = "U"
    DOWN = "D"
    LEFT = "L"
    RIGHT = "R"
    STAY = "S"

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTAS[self]

    @classmethod
    def from_char(cls, ch: str) -> "Move":
        try:
            return cls(ch)
        except ValueError:
            raise ValueError(f"illegal move character {ch!r}") from None


_DELTAS = {
    Move.UP: (0, 1),
    Move.DOWN: (0, -1),
    Move.LEFT: (-1, 0),
    Move.RIGHT: (1, 0),
    Move.STAY: (0, 0),
}

# Zombies never stay put.
ZOMBIE_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


class TorusPoint(NamedTuple):
    x: int
    y: int

    @classmethod
    def wrap(cls, x: int, y: int, n: int) -> "TorusPoint":
        return cls(x % n, y % n)


class PlanePoint(NamedTuple):
    """Unwrapped lattice point, used inside the M-round window."""

    x: int
    y: int


def _cycle_dist(a: int, b: int, n: int) -> int:
    d = abs(a - b) % n
    return min(d, n - d)


def torus_distance(a: tuple[int, int], b: tuple[int, int], n: int) -> int:
    """Graph distance between two vertices of the n x n torus."""
    return _cycle_dist(a[0], b[0], n) + _cycle_dist(a[1], b[1], n)


def neighbors(p: tuple[int, int], n: int) -> list[TorusPoint]:
    return [TorusPoint.wrap(p[0] + dx, p[1] + dy, n) for dx, dy in ZOMBIE_STEPS]


def zombie_move_options(z: tuple[int, int], s: tuple[int, int], n: int) -> set[TorusPoint]:
    """Neighbours of ``z`` strictly closer to ``s``.

    At an antipodal coordinate (offset exactly n/2) both directions along
    that cycle qualify, so the set has between one and four members.
    """
    d = torus_distance(z, s, n)
    if d == 0:
        raise ValueError(f"zombie at {tuple(z)} already occupies the survivor's vertex")
    return {u for u in neighbors(z, n) if torus_distance(u, s, n) < d}


def apply_move(p, m: Move, n: int | None = None):
    """Shift ``p`` by the unit vector of ``m``.

    With ``n`` given the result is a wrapped :class:`TorusPoint`; otherwise
    the point type of ``p`` is kept (plane coordinates are never wrapped).
    """
    dx, dy = m.delta
    if n is not None:
        return TorusPoint.wrap(p[0] + dx, p[1] + dy, n)
    if isinstance(p, TorusPoint):
        raise ValueError("grid size n is required to move a TorusPoint")
    return PlanePoint(p[0] + dx, p[1] + dy)
