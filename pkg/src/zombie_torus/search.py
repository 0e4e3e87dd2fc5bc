"""Minimising the strategy weight t(S) over normalized survivor scripts."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dp import weight
from .strategy import MAX_ENUM_HORIZON, Strategy, builtin_from_spec, enumerate_F0

_MOVES = "DLRSU"


@dataclass
class SearchReport:
    best_strategy: Strategy
    best_t: float
    evaluations: int
    history: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    ns: tuple[int, ...]
    ts: tuple[float, ...]


def _t(args) -> float:
    n, moves = args
    return weight(Strategy.from_moves(n, moves)).t


def _better(t, moves, best_t, best_moves) -> bool:
    return t < best_t or (t == best_t and moves < best_moves)


def exact_tn(M: int) -> SearchReport:
    """Exhaustive minimum of t over all 5**M normalized strategies."""
    if M > MAX_ENUM_HORIZON:
        raise ValueError(f"exhaustive search limited to M <= {MAX_ENUM_HORIZON}, got {M}")
    best = None
    best_t = np.inf
    count = 0
    for s in enumerate_F0(M):
        t = weight(s).t
        count += 1
        if t < best_t:  # enumeration is lexicographic, so the first minimiser wins ties
            best, best_t = s, t
    return SearchReport(best, best_t, count)


class _Evaluator:
    def __init__(self, n, workers):
        self.n = n
        self.workers = workers
        self.cache: dict[str, float] = {}
        self.fresh = 0
        self._pool = ProcessPoolExecutor(workers) if workers and workers > 1 else None

    def __call__(self, batch: list[str]) -> list[float]:
        todo = [m for m in dict.fromkeys(batch) if m not in self.cache]
        jobs = [(self.n, m) for m in todo]
        vals = list(self._pool.map(_t, jobs)) if self._pool else [_t(j) for j in jobs]
        self.cache.update(zip(todo, vals))
        self.fresh += len(todo)
        return [self.cache[m] for m in batch]

    def close(self):
        if self._pool:
            self._pool.shutdown()


def _neighbours(moves: str) -> list[str]:
    out = []
    for i, c in enumerate(moves):
        for m in _MOVES:
            if m != c:
                out.append(moves[:i] + m + moves[i + 1 :])
    return out


def local_search(n: int, init: Strategy, budget: int, seed: int, workers: int = 1) -> SearchReport:
    """Best-improvement hill climbing with random restarts.

    A neighbour changes one move; the walk is re-translated to end at the
    origin.  ``budget`` caps the number of fresh t evaluations; the initial
    strategy is evaluated for free.
    """
    if not init.normalized:
        raise ValueError("initial strategy must end at the origin")
    if init.n != n:
        raise ValueError(f"initial strategy has n={init.n}, expected {n}")
    rng = np.random.default_rng(seed)
    ev = _Evaluator(n, workers)
    try:
        cur = init.moves
        cur_t = ev([cur])[0]
        ev.fresh = 0
        best, best_t = cur, cur_t
        history = [cur_t]
        stalled = 0
        while ev.fresh < budget and stalled < 50:
            before = ev.fresh
            nbrs = _neighbours(cur)
            rng.shuffle(nbrs)
            pending = [m for m in nbrs if m not in ev.cache]
            room = budget - ev.fresh
            if len(pending) > room:
                keep = set(pending[:room])
                nbrs = [m for m in nbrs if m in ev.cache or m in keep]
            ts = ev(nbrs)
            cand_t, cand = min(zip(ts, nbrs))
            if cand_t < cur_t:
                cur, cur_t = cand, cand_t
            elif len(pending) <= room and ev.fresh < budget:
                cur = "".join(rng.choice(list(_MOVES), size=len(cur)))
                cur_t = ev([cur])[0]
            if _better(cur_t, cur, best_t, best):
                best, best_t = cur, cur_t
            history.append(best_t)
            stalled = stalled + 1 if ev.fresh == before else 0
        return SearchReport(Strategy.from_moves(n, best), best_t, ev.fresh, history)
    finally:
        ev.close()


def scaling_sweep(strategy_name: str, n_list, workers: int = 1) -> ExponentFit:
    """Least-squares slope of log t against log n."""
    ns = tuple(int(n) for n in n_list)
    if len(ns) < 3:
        raise ValueError("need at least three sizes for a slope fit")
    ev = _Evaluator(0, workers)
    try:
        jobs = [(n, builtin_from_spec(strategy_name, n).moves) for n in ns]
        ts = tuple(ev._pool.map(_t, jobs)) if ev._pool else tuple(_t(j) for j in jobs)
    finally:
        ev.close()
    slope, intercept = np.polyfit(np.log(ns), np.log(ts), 1)
    return ExponentFit(float(slope), float(intercept), ns, ts)
