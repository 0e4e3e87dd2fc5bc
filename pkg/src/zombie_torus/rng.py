"""Counter-based random streams.

Every draw is a pure function of ``(seed, counter...)`` built from the
SplitMix64 finaliser, so a trial's randomness does not depend on which
worker runs it or on how many other trials or zombies exist.
"""
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31 = np.uint64(30), np.uint64(27), np.uint64(31)
_INV53 = 1.0 / (1 << 53)

# stream tags
PLACE_X = 1
PLACE_Y = 2
ZOMBIE_MOVE = 3


def mix64(x):
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = (x ^ (x >> _S30)) * _M1
        x = (x ^ (x >> _S27)) * _M2
    return x ^ (x >> _S31)


def counter_hash(seed, *counters):
    """64-bit hash of ``seed`` and the (broadcast) counters."""
    h = mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ _GOLDEN)
    with np.errstate(over="ignore"):
        for c in counters:
            c = np.asarray(c).astype(np.uint64)
            h = mix64(h + _GOLDEN + c * _M2)
    return h


def uniform(seed, *counters):
    """Floats in [0, 1) with 53 random bits."""
    return (counter_hash(seed, *counters) >> np.uint64(11)).astype(np.float64) * _INV53


def below(bound, seed, *counters):
    """Integers uniform in ``[0, bound)``; ``bound`` may be an array."""
    b = np.asarray(bound)
    return np.minimum((uniform(seed, *counters) * b).astype(np.int64), b - 1)
