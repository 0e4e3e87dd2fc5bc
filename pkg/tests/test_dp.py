from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import enumerate_field
from zombie_torus import _pykernels
from zombie_torus._backend import kernels
from zombie_torus.dp import (
    ProbField,
    capture_field,
    diamond_size,
    export_csv,
    export_pgm,
    field_history,
    field_to_pixels,
    step_back,
    terminal_field,
    weight,
)
from zombie_torus.strategy import Strategy, builtin, builtin_from_spec, enumerate_F0, trajectory

# Reference fields for "UUU" at rounds M-1 and M-2, top row (y = +3) first, x = -3..3.
UUU_M_MINUS_1 = [
    [0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0],
    [0, 0, 1, 1, 1, 0, 0],
    [0, 0.5, 0.5, 1, 0.5, 0.5, 0],
    [0, 0, 1, 1, 1, 0, 0],
    [0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0],
]
UUU_M_MINUS_2 = [
    [0, 0, 0, 1, 0, 0, 0],
    [0, 0, 1, 1, 1, 0, 0],
    [0, 0.75, 0.75, 1, 0.75, 0.75, 0],
    [0.25, 0.25, 1, 1, 1, 0.25, 0.25],
    [0, 0.5, 0.5, 1, 0.5, 0.5, 0],
    [0, 0, 1, 1, 1, 0, 0],
    [0, 0, 0, 1, 0, 0, 0],
]


def window(field, r=3):
    """Rows y = r..-r, columns x = -r..r, top row first."""
    M = field.M
    return np.array([[field.at(x, y) for x in range(-r, r + 1)] for y in range(r, -r - 1, -1)])


def test_terminal_field():
    f = terminal_field(2)
    assert f.total() == 5
    assert f.at(1, 1) == 0 and f.at(0, 0) == 1 and f.at(0, -1) == 1
    assert terminal_field(7).at(0, 0) == 1


def test_stay_put_sums_by_round():
    sums = [f.total() for f in field_history(builtin("stay", 12))]
    assert sums == [5.0, 13.0, 25.0]


def test_go_straight_up_cells():
    s = Strategy.from_moves(12, "UUU")
    hist = field_history(s)
    assert np.array_equal(window(hist[1]), np.array(UUU_M_MINUS_1))
    assert np.array_equal(window(hist[2]), np.array(UUU_M_MINUS_2))
    assert [f.total() for f in hist] == [5.0, 11.0, 19.0]
    vals = Counter(v for v in hist[2].values.ravel().tolist() if v > 0)
    assert vals == {1.0: 13, 0.75: 4, 0.5: 4, 0.25: 4}


def test_step_back_rejects_outside_survivor():
    with pytest.raises(ValueError):
        step_back(terminal_field(3), (3, 1))


@pytest.mark.parametrize("M", [1, 2, 5, 40])
def test_stay_put_closed_form(M):
    f = capture_field(builtin("stay", 4 * M)) if M >= 2 else capture_field(Strategy.from_moves(4, "S"))
    x, y = np.meshgrid(np.arange(-M, M + 1), np.arange(-M, M + 1), indexing="ij")
    assert np.array_equal(f.values, (np.abs(x) + np.abs(y) <= M).astype(float))
    assert f.total() == diamond_size(M)


def test_stay_put_weight_n1000():
    assert weight(builtin("stay", 1000)).t == 125501


def test_go_down_scaled_weight():
    w = weight(builtin("go_down", 1000))
    assert w.t_scaled_sq == pytest.approx(0.506009, rel=2e-2)


def test_diagonal_scaled_weight():
    w = weight(builtin("diagonal", 1000))
    assert w.t_scaled_sq == pytest.approx(0.124296, rel=2e-2)
    assert w.t_scaled_32 == pytest.approx(0.491322, rel=2e-2)


def _oracle_array(s):
    pos = trajectory(s).positions
    ref = enumerate_field(pos, s.M)
    M = s.M
    out = np.zeros((2 * M + 1, 2 * M + 1))
    for (x, y), p in ref.items():
        out[x + M, y + M] = float(p)
    return out


def test_diagonal_matches_enumeration():
    s = builtin("diagonal", 16)
    assert np.max(np.abs(capture_field(s).values - _oracle_array(s))) <= 1e-12


@pytest.mark.parametrize("M", [1, 2, 3])
def test_all_small_strategies_match_enumeration(M):
    for s in enumerate_F0(M):
        assert np.max(np.abs(capture_field(s).values - _oracle_array(s))) <= 1e-12, s.moves


moves_strategy = st.integers(2, 30).flatmap(lambda M: st.text(alphabet="UDLRS", min_size=M, max_size=M))


@settings(max_examples=60, deadline=None)
@given(moves_strategy)
def test_step_invariants(moves):
    s = Strategy.from_moves(4 * len(moves), moves)
    hist = field_history(s)
    M = s.M
    x, y = np.meshgrid(np.arange(-M, M + 1), np.arange(-M, M + 1), indexing="ij")
    diamond = np.abs(x) + np.abs(y) <= M
    for old, new in zip(hist, hist[1:]):
        assert new.total() >= old.total() + 4
        assert new.values.min() >= 0 and new.values.max() <= 1
        assert not new.values[~diamond].any()
    t = hist[-1].total()
    assert 4 * M <= t <= diamond_size(M)
    assert np.array_equal(hist[-1].values, capture_field(s).values)


@pytest.mark.parametrize("spec", ["stay", "go_down"])
def test_mirror_symmetry(spec):
    v = capture_field(builtin_from_spec(spec, 200)).values
    assert np.array_equal(v, v[::-1, :])


@pytest.mark.parametrize("spec", ["stay", "go_down", "diagonal", "random_walk:1", "square:1", "square:8"])
@pytest.mark.parametrize("n", [100, 1000])
def test_weight_lower_bound_builtins(spec, n):
    try:
        s = builtin_from_spec(spec, n)
    except ValueError:
        pytest.skip("square side is zero at this n")
    w = weight(s)
    assert 4 * s.M <= w.t <= diamond_size(s.M)


@settings(max_examples=40, deadline=None)
@given(moves_strategy)
def test_backends_agree(moves):
    s = Strategy.from_moves(4 * len(moves), moves)
    xs, ys = trajectory(s).as_arrays()
    a = _pykernels.capture_field(xs, ys, s.M)
    b = kernels.capture_field(xs, ys, s.M)
    assert np.array_equal(a, b)


def test_backends_agree_on_single_step():
    rng = np.random.default_rng(0)
    old = rng.random((21, 21))
    a = _pykernels.step_back(old, 10, 3, -4)
    b = kernels.step_back(old, 10, 3, -4)
    assert np.array_equal(a, b)


def test_export_csv():
    text = export_csv(terminal_field(1)).decode()
    lines = text.splitlines()
    assert lines[0] == "x,y,p" and len(lines) == 6
    assert "0,0,1" in lines


def test_csv_precision():
    f = capture_field(builtin("diagonal", 40))
    rows = export_csv(f).decode().splitlines()[1:]
    for row in rows:
        x, y, p = row.split(",")
        assert float(p) == pytest.approx(f.at(int(x), int(y)), rel=1e-11)


def test_export_pgm_blank_and_diamond():
    blank = ProbField(2, np.zeros((5, 5)), 1)
    data = export_pgm(blank)
    assert data.startswith(b"P5\n5 5\n255\n") and set(data[len(b"P5\n5 5\n255\n"):]) == {255}
    f = capture_field(builtin("stay", 100))
    pix = field_to_pixels(f)
    M = f.M
    r, c = np.meshgrid(np.arange(2 * M + 1), np.arange(2 * M + 1), indexing="ij")
    inside = np.abs(c - M) + np.abs(r - M) <= M
    assert (pix[inside] == 0).all() and (pix[~inside] == 255).all()
    ascii_ = export_pgm(f, binary=False).decode().split()
    assert ascii_[:4] == ["P2", str(2 * M + 1), str(2 * M + 1), "255"]
    assert len(ascii_) == 4 + (2 * M + 1) ** 2


def test_pgm_orientation_top_row_is_positive_y():
    s = Strategy.from_moves(12, "UUU")
    f = field_history(s)[2]  # (-1, 1) holds 0.75 and (-1, -1) holds 0.5
    pix = field_to_pixels(f)
    M = f.M
    assert pix[M - 1, M - 1] == 64 and pix[M + 1, M - 1] == 128


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("0", None)])
def test_backend_switch(flag, expected):
    import os
    import subprocess
    import sys

    env = dict(os.environ, ZOMBIE_TORUS_PURE=flag)
    code = "import zombie_torus as z; print(z.BACKEND, z.weight(z.builtin('diagonal', 40)).t)"
    r = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
    name, t = r.stdout.split()
    assert name == (expected or kernels.NAME)
    assert float(t) == weight(builtin("diagonal", 40)).t
