"""Scripted survivor walks of length M = floor(n/4)."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .torus import Move, PlanePoint

_ALPHABET = "DLRSU"  # sorted, so enumeration order is lexicographic
MAX_ENUM_HORIZON = 9
SQUARE_COUNTS = (1, 2, 3, 8)
BUILTIN_NAMES = ("stay", "random_walk", "go_down", "diagonal", "square")


def horizon(n: int) -> int:
    return n // 4


def _net(moves: str) -> tuple[int, int]:
    dx = moves.count("R") - moves.count("L")
    dy = moves.count("U") - moves.count("D")
    return dx, dy


@dataclass(frozen=True)
class Strategy:
    """A survivor script: a start displacement and ``M`` moves.

    ``moves`` is a string over ``UDLRS``.  The start is expressed relative
    to the terminal vertex, so a normalized strategy finishes at (0, 0).
    """

    n: int
    start: PlanePoint
    moves: str

    def __post_init__(self):
        object.__setattr__(self, "start", PlanePoint(*self.start))
        bad = set(self.moves) - set(_ALPHABET)
        if bad:
            raise ValueError(f"illegal move characters: {''.join(sorted(bad))}")
        if len(self.moves) != self.M:
            raise ValueError(f"expected {self.M} moves for n={self.n}, got {len(self.moves)}")

    @property
    def M(self) -> int:
        return horizon(self.n)

    @property
    def normalized(self) -> bool:
        return self.end == (0, 0)

    @property
    def end(self) -> PlanePoint:
        dx, dy = _net(self.moves)
        return PlanePoint(self.start.x + dx, self.start.y + dy)

    @classmethod
    def from_moves(cls, n: int, moves: str) -> "Strategy":
        """Build the normalized strategy with the given moves."""
        dx, dy = _net(moves)
        return cls(n, PlanePoint(-dx, -dy), moves)

    def move_list(self) -> list[Move]:
        return [Move(c) for c in self.moves]


@dataclass(frozen=True)
class SurvivorTrajectory:
    positions: tuple[PlanePoint, ...]

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.fromiter((p.x for p in self.positions), dtype=np.int64, count=len(self.positions))
        ys = np.fromiter((p.y for p in self.positions), dtype=np.int64, count=len(self.positions))
        return xs, ys


def trajectory(s: Strategy) -> SurvivorTrajectory:
    x, y = s.start
    pos = [PlanePoint(x, y)]
    for m in s.move_list():
        dx, dy = m.delta
        x, y = x + dx, y + dy
        pos.append(PlanePoint(x, y))
    return SurvivorTrajectory(tuple(pos))


def _square_moves(M: int, k: int) -> str:
    side = M // (4 * k)
    if side < 1:
        raise ValueError(f"horizon M={M} too short for {k} square(s) (side would be 0)")
    loop = "R" * side + "U" * side + "L" * side + "D" * side
    body = loop * k
    return body + "S" * (M - len(body))


def builtin(name: str, n: int, *, seed: int | None = None, k: int | None = None) -> Strategy:
    """One of the named strategies (a)-(h).

    ``name`` is ``stay``, ``random_walk`` (needs ``seed``), ``go_down``,
    ``diagonal`` or ``square`` (needs ``k`` in 1, 2, 3, 8).
    """
    if n < 8:
        raise ValueError(f"builtin strategies need n >= 8, got n={n}")
    M = horizon(n)
    if name == "stay":
        moves = "S" * M
    elif name == "random_walk":
        if seed is None:
            raise ValueError("random_walk needs a seed")
        rng = np.random.default_rng(seed)
        moves = "".join("UDLRS"[i] for i in rng.integers(0, 5, size=M))
    elif name == "go_down":
        moves = "D" * M
    elif name == "diagonal":
        moves = "".join("D" if i % 2 == 0 else "L" for i in range(M))
    elif name == "square":
        if k not in SQUARE_COUNTS:
            raise ValueError(f"square count must be one of {SQUARE_COUNTS}, got {k}")
        moves = _square_moves(M, k)
    else:
        raise ValueError(f"unknown strategy {name!r}")
    return Strategy.from_moves(n, moves)


def builtin_from_spec(spec: str, n: int) -> Strategy:
    """Parse ``name`` or ``name:arg`` (e.g. ``square:2``, ``random_walk:7``)."""
    name, _, arg = spec.partition(":")
    if name == "square":
        if not arg.isdigit():
            raise ValueError(f"square needs an integer count, got {spec!r}")
        return builtin(name, n, k=int(arg))
    if name == "random_walk":
        if not arg.isdigit():
            raise ValueError(f"random_walk needs an integer seed, got {spec!r}")
        return builtin(name, n, seed=int(arg))
    if arg:
        raise ValueError(f"strategy {name!r} takes no argument")
    return builtin(name, n)


_HEADER = re.compile(r"^n=(\d+)\s+start=(-?\d+),(-?\d+)$")


def format_strategy(s: Strategy) -> str:
    return f"n={s.n} start={s.start.x},{s.start.y}\n{s.moves}\n"


def parse_strategy(text: str) -> Strategy:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty strategy text")
    m = _HEADER.match(lines[0].strip())
    if m is None:
        raise ValueError(f"malformed strategy header: {lines[0]!r}")
    n, sx, sy = (int(g) for g in m.groups())
    moves = lines[1].strip() if len(lines) > 1 else ""
    if any(line.strip() for line in lines[2:]):
        raise ValueError("unexpected content after the move line")
    return Strategy(n, PlanePoint(sx, sy), moves)


def enumerate_F0(M: int) -> Iterator[Strategy]:
    """All 5**M normalized strategies, in lexicographic order of moves."""
    if M < 1 or M > MAX_ENUM_HORIZON:
        raise ValueError(f"enumeration limited to 1 <= M <= {MAX_ENUM_HORIZON}, got {M}")
    n = 4 * M
    for combo in itertools.product(_ALPHABET, repeat=M):
        yield Strategy.from_moves(n, "".join(combo))


_DIHEDRAL = [
    {"U": "U", "D": "D", "L": "L", "R": "R"},
    {"U": "L", "L": "D", "D": "R", "R": "U"},
    {"U": "D", "D": "U", "L": "R", "R": "L"},
    {"U": "R", "R": "D", "D": "L", "L": "U"},
    {"U": "U", "D": "D", "L": "R", "R": "L"},
    {"U": "D", "D": "U", "L": "L", "R": "R"},
    {"U": "R", "R": "U", "D": "L", "L": "D"},
    {"U": "L", "L": "U", "D": "R", "R": "D"},
]


def dihedral_images(s: Strategy) -> list[Strategy]:
    """The strategy under each of the 8 symmetries of the square lattice."""
    out = []
    for table in _DIHEDRAL:
        moves = "".join(table.get(c, c) for c in s.moves)
        out.append(Strategy.from_moves(s.n, moves))
    return out
