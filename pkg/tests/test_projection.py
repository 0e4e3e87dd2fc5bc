import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zombie_torus.dp import ProbField, capture_field, field_history, terminal_field
from zombie_torus.projection import (
    check_domination,
    coupling_step,
    export_profile_csv,
    project,
    w_history,
    w_profile,
    z_history,
    z_profile,
)
from zombie_torus.strategy import Strategy, builtin, builtin_from_spec, trajectory

BUILTINS = ["stay", "go_down", "diagonal", "random_walk:1", "square:1", "square:2", "square:3", "square:8"]


def test_project_examples():
    q = project(terminal_field(4)).values
    assert q.tolist() == [0, 0, 0, 1, 3, 1, 0, 0, 0]
    assert project(capture_field(builtin("stay", 8))).values.tolist() == [1, 3, 5, 3, 1]
    assert not project(ProbField(3, np.zeros((7, 7)), 1)).values.any()


def test_base_case():
    s = builtin("stay", 40)
    assert z_history(s)[0].values[s.M - 1 : s.M + 2].tolist() == [1, 3, 1]
    assert w_history(s)[0].values.sum() == 5


def test_one_step_by_hand():
    base = np.zeros(9)
    base[3:6] = (1, 3, 1)
    z = coupling_step(base, 4, 0, 0.0)
    w = coupling_step(base, 4, 0, 1.0)
    assert z.tolist() == [0, 0, 0.5, 2, 5, 2, 0.5, 0, 0]
    assert w.tolist() == [0, 0, 0.5, 3, 5, 3, 0.5, 0, 0]


def test_off_center_step_by_hand():
    base = np.array([0, 1, 3, 1, 0.0])  # M = 2, x = -2..2
    z = coupling_step(base, 2, 1, 0.0)
    # x=1: 1 + 2; x=2: (1 + 0)/2; x=0: (1 + 3)/2; x=-1: (3 + 1)/2; x=-2: (1 + 0)/2
    assert z.tolist() == [0.5, 2, 2, 3, 0.5]


def test_go_down_m2_hand_table():
    # M = 2, round 1: the field is the straight-walk p^(M-1) panel.
    s = builtin("go_down", 8)
    q1 = project(capture_field(s)).values
    assert q1.tolist() == [0.5, 2.5, 5, 2.5, 0.5]
    assert w_profile(s).values.tolist() == [0.5, 3, 5, 3, 0.5]
    assert z_profile(s).values.tolist() == [0.5, 2, 5, 2, 0.5]
    r = check_domination(s)
    assert r.min_q_minus_w == -0.5
    assert sorted(r.q_below_w) == [(1, -1, 2.5, 3.0), (1, 1, 2.5, 3.0)]
    assert r.min_q_minus_z == 0 and r.min_w_minus_z == 0


@pytest.mark.parametrize("spec", ["stay", "diagonal"])
def test_stay_and_diagonal_domination_m20(spec):
    r = check_domination(builtin_from_spec(spec, 80))
    assert r.w_dominates_z()
    assert r.min_q_minus_z >= -1e-9
    if spec == "stay":
        assert r.q_dominates_w()


moves_strategy = st.integers(2, 40).flatmap(lambda M: st.text(alphabet="UDLRS", min_size=M, max_size=M))


@settings(max_examples=80, deadline=None)
@given(moves_strategy)
def test_z_invariants(moves):
    s = Strategy.from_moves(4 * len(moves), moves)
    zs = z_history(s)
    ws = w_history(s)
    xs = [p.x for p in trajectory(s).positions]
    M = s.M
    for zp, wp in zip(zs, ws):
        assert (zp.values >= 0).all()
        assert np.max(np.abs(np.diff(zp.values))) <= 4 + 1e-12
        assert (wp.values >= zp.values - 1e-12).all()
    for old, new in zip(zs, zs[1:]):
        i = old.round
        assert new.values.sum() >= old.values.sum() - 1e-9
        drift = new.at(xs[i - 1]) - old.at(xs[i])
        if xs[i - 1] == xs[i]:
            assert drift == pytest.approx(2.0)
        else:
            assert drift >= -2 - 1e-12


@settings(max_examples=40, deadline=None)
@given(moves_strategy)
def test_q_dominates_z(moves):
    s = Strategy.from_moves(4 * len(moves), moves)
    assert check_domination(s).min_q_minus_z >= -1e-9


def test_profile_csv():
    text = export_profile_csv(z_profile(builtin("stay", 8))).decode().splitlines()
    assert text[0] == "x,value" and len(text) == 6
    assert text[3] == "0,5"


def test_requires_normalized():
    with pytest.raises(ValueError):
        w_history(Strategy(8, (0, 0), "UU"))
