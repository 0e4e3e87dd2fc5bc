"""Monte Carlo simulation of the full game on the n x n torus.

Trials are vectorised: the engine advances a batch of independent games at
once, with zombie positions stored as ``(trials, k)`` arrays.  All
randomness comes from :mod:`zombie_torus.rng`, keyed by trial, zombie and
round, so outcomes do not depend on batching or worker count, and zombie
``i`` behaves identically whether the game has ``k`` or ``k' > k`` zombies.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import rng
from .strategy import Strategy, trajectory
from .torus import Move, TorusPoint, zombie_move_options

Z95 = 1.959963984540054
_CELLS_PER_BATCH = 1 << 20
_FLEE_ORDER = (Move.UP, Move.DOWN, Move.LEFT, Move.RIGHT, Move.STAY)
ADAPTIVE_RULES = ("stay", "diagonal", "flee")


@dataclass(frozen=True)
class Scripted:
    strategy: Strategy
    anchor: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class Adaptive:
    """``stay``, ``diagonal`` (Down, Left, Down, ... forever) or ``flee``.

    ``flee`` steps to maximise the distance to the nearest zombie, breaking
    ties by the summed distance and then by the order U, D, L, R, S.
    """

    rule: str

    def __post_init__(self):
        if self.rule not in ADAPTIVE_RULES:
            raise ValueError(f"unknown adaptive rule {self.rule!r}; expected one of {ADAPTIVE_RULES}")


SurvivorPolicy = Union[Scripted, Adaptive]


@dataclass
class GameState:
    n: int
    survivor: TorusPoint
    zombies: list[TorusPoint]
    round: int = 0
    alive: bool = True


@dataclass(frozen=True)
class TrialOutcome:
    captured: bool
    capture_round: int | None
    seed: int
    trial: int = 0


@dataclass(frozen=True)
class CaptureEstimate:
    p: float
    halfwidth: float
    trials: int
    captured: int
    seed: int


def _halfwidth(p: float, trials: int) -> float:
    return Z95 * math.sqrt(max(p * (1 - p), 0.0) / trials)


def _survivor_start(policy: SurvivorPolicy, n: int) -> tuple[int, int]:
    if isinstance(policy, Scripted):
        ax, ay = policy.anchor
        st = policy.strategy.start
        return (ax + st.x) % n, (ay + st.y) % n
    return 0, 0


def _cyc(d, n):
    d = d % n
    return np.minimum(d, n - d)


def _distances(zx, zy, sx, sy, n):
    return _cyc(zx - sx[:, None], n) + _cyc(zy - sy[:, None], n)


def _axis_options(diff, n):
    """Per-axis option count and preferred direction for offset ``diff = s - z``."""
    d = diff % n
    count = np.where(d == 0, 0, np.where(2 * d == n, 2, 1))
    direction = np.where(2 * d < n, 1, -1)
    return count, direction


def _zombie_step(zx, zy, sx, sy, n, seed, trial_ids, zombie_ids, rnd):
    hc, hd = _axis_options(sx[:, None] - zx, n)
    vc, vd = _axis_options(sy[:, None] - zy, n)
    total = hc + vc
    done = total == 0
    pick = rng.below(np.where(done, 1, total), seed, trial_ids[:, None], zombie_ids[None, :], rnd, rng.ZOMBIE_MOVE)
    horiz = pick < hc
    hstep = np.where(hc == 2, np.where(pick == 0, 1, -1), hd)
    q = pick - hc
    vstep = np.where(vc == 2, np.where(q == 0, 1, -1), vd)
    mx = np.where(done, 0, np.where(horiz, hstep, 0))
    my = np.where(done, 0, np.where(horiz, 0, vstep))
    return (zx + mx) % n, (zy + my) % n


def _flee_step(sx, sy, zx, zy, n):
    k = zx.shape[1]
    keys = np.empty((sx.shape[0], len(_FLEE_ORDER)), dtype=np.int64)
    for c, m in enumerate(_FLEE_ORDER):
        dx, dy = m.delta
        d = _distances(zx, zy, (sx + dx) % n, (sy + dy) % n, n)
        keys[:, c] = d.min(axis=1) * (k * n + 1) + d.sum(axis=1)
    best = keys.argmax(axis=1)
    deltas = np.array([m.delta for m in _FLEE_ORDER])
    return (sx + deltas[best, 0]) % n, (sy + deltas[best, 1]) % n


def _survivor_step(policy, r, sx, sy, zx, zy, n, script):
    if isinstance(policy, Scripted):
        if r <= len(script):
            dx, dy = script[r - 1]
            return (sx + dx) % n, (sy + dy) % n
        return sx, sy
    if policy.rule == "stay":
        return sx, sy
    if policy.rule == "diagonal":
        dx, dy = (0, -1) if r % 2 == 1 else (-1, 0)
        return (sx + dx) % n, (sy + dy) % n
    return _flee_step(sx, sy, zx, zy, n)


def place_zombies(n: int, k: int, seed: int, trial_ids) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(trial_ids, dtype=np.int64)[:, None]
    z = np.arange(k, dtype=np.int64)[None, :]
    return rng.below(n, seed, t, z, rng.PLACE_X), rng.below(n, seed, t, z, rng.PLACE_Y)


def run_batch(n, k, policy, horizon, seed, trial_ids, zombies=None, log=None):
    """Play one game per trial id; returns ``(captured, capture_round)``.

    ``capture_round`` is -1 for survivors.  ``zombies`` overrides the random
    placement with an explicit ``(k, 2)`` array shared by every trial.
    ``log``, if a list, receives ``round,sx,sy,z0x,z0y,...`` lines for the
    first trial.
    """
    trial_ids = np.asarray(trial_ids, dtype=np.int64)
    T = trial_ids.shape[0]
    if zombies is not None:
        zs = np.asarray(zombies, dtype=np.int64).reshape(-1, 2) % n
        k = zs.shape[0]
        zx = np.broadcast_to(zs[:, 0], (T, k)).copy()
        zy = np.broadcast_to(zs[:, 1], (T, k)).copy()
    else:
        zx, zy = place_zombies(n, k, seed, trial_ids)
    zombie_ids = np.arange(k, dtype=np.int64)
    x0, y0 = _survivor_start(policy, n)
    sx = np.full(T, x0, dtype=np.int64)
    sy = np.full(T, y0, dtype=np.int64)
    script = [m.delta for m in policy.strategy.move_list()] if isinstance(policy, Scripted) else []

    def hit(zx, zy, sx, sy):
        return ((zx == sx[:, None]) & (zy == sy[:, None])).any(axis=1)

    def record(r):
        if log is not None and T:
            cells = [r, sx[0], sy[0]] + [v for pair in zip(zx[0].tolist(), zy[0].tolist()) for v in pair]
            log.append(",".join(str(int(c)) for c in cells))

    cap_round = np.full(T, -1, dtype=np.int64)
    if k == 0:
        return cap_round >= 0, cap_round
    cap_round[hit(zx, zy, sx, sy)] = 0
    record(0)
    for r in range(1, horizon + 1):
        live = np.nonzero(cap_round < 0)[0]
        if live.size == 0:
            break
        lzx, lzy, lsx, lsy = zx[live], zy[live], sx[live], sy[live]
        before = _distances(lzx, lzy, lsx, lsy, n)
        lzx, lzy = _zombie_step(lzx, lzy, lsx, lsy, n, seed, trial_ids[live], zombie_ids, r)
        after = _distances(lzx, lzy, lsx, lsy, n)
        assert (after == before - 1).all(), "zombie failed to close in"
        caught = hit(lzx, lzy, lsx, lsy)
        cap_round[live[caught]] = r
        lsx, lsy = _survivor_step(policy, r, lsx, lsy, lzx, lzy, n, script)
        caught |= hit(lzx, lzy, lsx, lsy)
        cap_round[live[caught & (cap_round[live] < 0)]] = r
        zx[live], zy[live], sx[live], sy[live] = lzx, lzy, lsx, lsy
        record(r)
    return cap_round >= 0, cap_round


def play(n, k, policy: SurvivorPolicy, horizon: int, seed: int, trial: int = 0, zombies=None, log=None) -> TrialOutcome:
    """One seeded game; see :func:`run_batch` for the meaning of the extras."""
    _check_game_args(n, k, horizon)
    captured, rounds = run_batch(n, k, policy, horizon, seed, [trial], zombies=zombies, log=log)
    c = bool(captured[0])
    return TrialOutcome(c, int(rounds[0]) if c else None, seed, trial)


def initial_state(n, k, policy: SurvivorPolicy, seed: int, trial: int = 0) -> GameState:
    zx, zy = place_zombies(n, k, seed, [trial])
    zs = [TorusPoint(int(x), int(y)) for x, y in zip(zx[0], zy[0])]
    s = TorusPoint(*_survivor_start(policy, n))
    return GameState(n, s, zs, 0, s not in zs)


def _check_game_args(n, k, horizon):
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if horizon < 1:
        raise ValueError(f"horizon must be positive, got {horizon}")


def _batch_size(k: int) -> int:
    return max(1, _CELLS_PER_BATCH // max(k, 1))


def _count_chunk(args):
    n, k, policy, horizon, seed, lo, hi = args
    captured, _ = run_batch(n, k, policy, horizon, seed, np.arange(lo, hi))
    return int(captured.sum())


def _map(fn, jobs, workers):
    if workers is None or workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def count_captures(n, k, policy, horizon, trials, seed, workers=1) -> int:
    step = _batch_size(k)
    jobs = [(n, k, policy, horizon, seed, lo, min(lo + step, trials)) for lo in range(0, trials, step)]
    return sum(_map(_count_chunk, jobs, workers))


def estimate_capture_prob(n, k, policy, horizon, trials, seed, workers=1) -> CaptureEstimate:
    """Fraction of captured trials with a 95% normal-approximation half-width.

    The policy is not survivor-optimal, so this estimates an upper bound on
    the capture probability the zombies achieve against optimal play.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    _check_game_args(n, k, horizon)
    c = count_captures(n, k, policy, horizon, trials, seed, workers)
    p = c / trials
    return CaptureEstimate(p, _halfwidth(p, trials), trials, c, seed)


class SearchExhausted(RuntimeError):
    pass


@dataclass
class ZombieBracket:
    k_lo: int
    k_hi: int
    k_half: int
    k_max: int
    estimates: dict[int, CaptureEstimate] = field(default_factory=dict)


def trivial_zombie_bound(n: int) -> int:
    return math.ceil(3 * n * n * math.log(n))


def bracket_zombie_number(n, policy, trials, seed, horizon=None, workers=1, k_max=None) -> ZombieBracket:
    """Bracket the k at which the capture estimate crosses 1/2.

    Every k is evaluated with the same seed, so for zombie-blind policies
    the estimates are exactly monotone in k.  ``k_half`` is the smallest k
    with estimate >= 1/2; ``[k_lo, k_hi]`` spans the k whose confidence
    interval still contains 1/2.  The search covers ``[1, k_max]``, by
    default up to 3 n^2 ln n where every vertex is almost surely occupied.
    """
    if trials < 200:
        raise ValueError(f"bracketing needs at least 200 trials, got {trials}")
    horizon = n if horizon is None else horizon
    k_max = trivial_zombie_bound(n) if k_max is None else k_max
    cache: dict[int, CaptureEstimate] = {}

    def est(k):
        if k not in cache:
            cache[k] = estimate_capture_prob(n, k, policy, horizon, trials, seed, workers)
        return cache[k]

    def smallest(pred):
        if not pred(est(k_max)):
            return None
        lo, hi = 1, k_max
        while lo < hi:
            mid = (lo + hi) // 2
            if pred(est(mid)):
                hi = mid
            else:
                lo = mid + 1
        return lo

    k_half = smallest(lambda e: e.p >= 0.5)
    if k_half is None:
        raise SearchExhausted(f"capture estimate stays below 1/2 up to k={k_max}")
    k_lo = smallest(lambda e: e.p + e.halfwidth >= 0.5)
    k_hi = smallest(lambda e: e.p - e.halfwidth >= 0.5)
    return ZombieBracket(min(k_lo, k_half), k_max if k_hi is None else max(k_hi, k_half), k_half, k_max, dict(sorted(cache.items())))


# ---------------------------------------------------------------------------
# Coupled boards: one shared coin sequence drives every board.


class CoinStream:
    """Lazily materialised Bernoulli(1/2) sequence X_1, X_2, ..."""

    def __init__(self, seed: int, block: int = 4096):
        self._gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(1,))))
        self._bits = np.empty(0, dtype=np.int8)
        self._block = block

    def __getitem__(self, i: int) -> int:
        while i >= self._bits.size:
            self._bits = np.concatenate([self._bits, self._gen.integers(0, 2, self._block, dtype=np.int8)])
        return int(self._bits[i])


@dataclass
class BoardOutcome:
    moves: str
    captured: bool
    capture_round: int | None
    coins_used: int


@dataclass
class CoupledReport:
    n: int
    k: int
    seed: int
    boards: list[BoardOutcome]


def _coin_choice(z, s, n, coins, pos):
    """Pick a zombie move from the shared coins; returns (target, coins consumed)."""
    opts = zombie_move_options(z, s, n)
    if len(opts) == 1:
        return next(iter(opts)), 0
    horiz = sorted((o for o in opts if o.y == z.y), key=lambda o: (o.x - z.x) % n)
    vert = sorted((o for o in opts if o.x == z.x), key=lambda o: (o.y - z.y) % n)
    if len(horiz) == 1 and len(vert) == 1:
        return (horiz[0] if coins[pos] == 0 else vert[0]), 1
    if not vert or not horiz:
        axis = horiz or vert
        return axis[coins[pos]], 1
    if len(horiz) == 2 and len(vert) == 2:
        axis = horiz if coins[pos] == 0 else vert
        return axis[coins[pos + 1]], 2
    # three options: two coins, rejecting the fourth outcome
    ordered = horiz + vert
    used = 0
    while True:
        v = 2 * coins[pos + used] + coins[pos + used + 1]
        used += 2
        if v < 3:
            return ordered[v], used


def coupled_boards_check(n, strategies, k, seed, anchor=(0, 0), horizon=None) -> CoupledReport:
    """Replay one zombie placement and one coin sequence against each strategy.

    A zombie with a choice consumes the next unread coin of its board's copy
    of the shared sequence (0 = horizontal).  Zombies that reach the survivor
    walk with him until the horizon (default M) so every board plays every
    round.
    """
    if not strategies:
        raise ValueError("need at least one strategy")
    Ms = {s.M for s in strategies}
    if len(Ms) != 1:
        raise ValueError(f"strategies disagree on the horizon: {sorted(Ms)}")
    M = Ms.pop()
    horizon = M if horizon is None else horizon
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(0,))))
    start_z = [TorusPoint(int(a), int(b)) for a, b in gen.integers(0, n, size=(k, 2))]
    coins = CoinStream(seed)
    boards = []
    for s in strategies:
        pos = trajectory(s).positions
        ax, ay = anchor
        surv = TorusPoint.wrap(ax + pos[0].x, ay + pos[0].y, n)
        zs = list(start_z)
        attached = [z == surv for z in zs]
        first = 0 if any(attached) else None
        ptr = 0
        for r in range(1, horizon + 1):
            for i, z in enumerate(zs):
                if attached[i]:
                    continue
                target, used = _coin_choice(z, surv, n, coins, ptr)
                ptr += used
                zs[i] = target
                if target == surv:
                    attached[i] = True
                    first = r if first is None else first
            if r <= M:
                nxt = TorusPoint.wrap(ax + pos[r].x, ay + pos[r].y, n)
            else:
                nxt = surv
            for i in range(len(zs)):
                if attached[i]:
                    zs[i] = nxt
                elif zs[i] == nxt:
                    attached[i] = True
                    first = r if first is None else first
            surv = nxt
        boards.append(BoardOutcome(s.moves, first is not None, first, ptr))
    return CoupledReport(n, k, seed, boards)


# ---------------------------------------------------------------------------
# Region-R3 lazy chain and the diagonal lower-bound experiment.

_R3_CHUNK = 10_000


@dataclass(frozen=True)
class R3Estimate:
    y: int
    p: float
    stderr: float
    trials: int
    seed: int


def _r3_chunk(args):
    steps, seed, c, size = args
    g = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(c,))))
    z = np.zeros(size, dtype=np.int64)
    for _ in range(steps):
        u = g.random(size)
        pos = z > 0
        z += np.where(pos, np.where(u < 0.25, 1, np.where(u < 0.5, -1, 0)), np.where(u < 0.5, 1, 0))
    return int((z == 0).sum())


def r3_return_probability(y: int, trials: int, seed: int, workers=1) -> R3Estimate:
    """Monte Carlo estimate of P(Z_{y/2} = 0) for the lazy offset chain.

    From Z > 0 the chain moves +1 or -1 with probability 1/4 each and holds
    otherwise; from 0 it moves to 1 or stays with probability 1/2 each.
    """
    if y < 2 or y % 2:
        raise ValueError(f"y must be an even integer >= 2, got {y}")
    if trials < 1:
        raise ValueError("need at least one trial")
    jobs = [(y // 2, seed, c, min(_R3_CHUNK, trials - lo)) for c, lo in enumerate(range(0, trials, _R3_CHUNK))]
    hits = sum(_map(_r3_chunk, jobs, workers))
    p = hits / trials
    return R3Estimate(y, p, math.sqrt(p * (1 - p) / trials), trials, seed)


@dataclass(frozen=True)
class SurvivalEstimate:
    n: int
    k: int
    horizon: int
    survival_frac: float
    halfwidth: float
    trials: int
    seed: int


def lowerbound_k(n: int, omega: float) -> int:
    return int(math.floor(math.sqrt(n) / omega))


def diagonal_survival_experiment(n, omega, trials, seed, workers=1, horizon=None) -> SurvivalEstimate:
    """Survival frequency of the endless diagonal walker against sqrt(n)/omega zombies."""
    if n < 100:
        raise ValueError(f"the experiment needs n >= 100, got {n}")
    if trials < 1:
        raise ValueError("need at least one trial")
    k = lowerbound_k(n, omega)
    horizon = 10 * n if horizon is None else horizon
    if k == 0:
        return SurvivalEstimate(n, 0, horizon, 1.0, 0.0, trials, seed)
    c = count_captures(n, k, Adaptive("diagonal"), horizon, trials, seed, workers)
    s = 1 - c / trials
    return SurvivalEstimate(n, k, horizon, s, _halfwidth(s, trials), trials, seed)
