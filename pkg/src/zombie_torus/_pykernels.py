"""Pure numpy implementation of the backward capture recursion.

Fields are ``(2M+1, 2M+1)`` float64 arrays indexed ``[x + M, y + M]``.
"""
import numpy as np

NAME = "numpy"


def clamp_cross(field, M, sx, sy):
    W = field.shape[0]
    for dx, dy in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)):
        a, b = sx + dx + M, sy + dy + M
        if 0 <= a < W and 0 <= b < W:
            field[a, b] = 1.0


def _toward(arr, c, axis):
    # Value at the neighbour one step closer to index c along axis.
    out = np.empty_like(arr)
    if axis == 0:
        out[:c] = arr[1 : c + 1]
        out[c + 1 :] = arr[c:-1]
        out[c] = arr[c]
    else:
        out[:, :c] = arr[:, 1 : c + 1]
        out[:, c + 1 :] = arr[:, c:-1]
        out[:, c] = arr[:, c]
    return out


def step_back(old, M, sx, sy, out=None):
    a, b = sx + M, sy + M
    W = old.shape[0]
    if not (0 <= a < W and 0 <= b < W):
        raise ValueError(f"survivor position ({sx}, {sy}) outside the window of radius {M}")
    h = _toward(old, a, 0)
    v = _toward(old, b, 1)
    if out is None:
        out = np.empty_like(old)
    np.add(h, v, out=out)
    out *= 0.5
    out[a, :] = v[a, :]
    out[:, b] = h[:, b]
    clamp_cross(out, M, sx, sy)
    return out


def capture_field(xs, ys, M):
    W = 2 * M + 1
    cur = np.zeros((W, W))
    clamp_cross(cur, M, int(xs[M]), int(ys[M]))
    nxt = np.empty_like(cur)
    for i in range(M - 1, 0, -1):
        step_back(cur, M, int(xs[i]), int(ys[i]), out=nxt)
        cur, nxt = nxt, cur
    return cur
