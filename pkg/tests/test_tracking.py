import pytest

from hystlwr import (HState, frontset_at, init_fronts, sample, track, velocity)
from hystlwr.scenarios import state_at_velocity


def test_init_counts_and_order(fam):
    fast = HState(3.2, fam.hA(3.2))
    slow = HState(1.5, 1.5)
    fs, events = init_fronts(fam, [-1.0, 0.0], [fast, slow, fast])
    assert len(events) == 2
    assert [f.kind for f in fs.fronts] == ["ScDS", "ScAS"]
    xs = [f.x for f in fs.fronts]
    assert xs == sorted(xs)
    # adjacency: each front's right state is the next front's left state
    assert fs.fronts[0].right.u == pytest.approx(fs.fronts[1].left.u, abs=1e-9)
    assert fs.fronts[0].right.h == pytest.approx(fs.fronts[1].left.h, abs=1e-9)


def test_identical_segment_skipped(fam):
    s = HState(2.5, 2.0)
    fs, events = init_fronts(fam, [0.0], [s, s])
    assert not fs.fronts
    assert not events


def test_rarefaction_discretization(fam):
    left = HState(1.8, 1.8)
    right = HState(2.05, 2.05)
    # acceleration spreads into piecewise-constant fan fronts
    fs, _ = init_fronts(fam, [0.0], [left, right], delta_v=1e-2)
    dv = [abs(velocity(fam, f.right) - velocity(fam, f.left))
          for f in fs.fronts if f.kind in ("ScR", "AR")]
    assert dv and max(dv) <= 1e-2 + 1e-12


def test_stationary_profile(fam):
    states = [state_at_velocity(fam, u, 0.55) for u in (2.4, 2.6, 2.8)]
    sol = track(fam, [-1.0, 0.0], states, 5.0)
    got = sample(sol, 5.0, [-1.5, -0.5, 0.5])
    assert [s.u for s in got] == [2.4, 2.6, 2.8]


def test_collision_resolved(fam):
    """Jam wall meets outflow shock and both are replaced."""
    background = HState(2.0, 1.9)
    slow = state_at_velocity(fam, 2.0, 0.2)
    sol = track(fam, [-1.0, 0.0], [background, slow, background], 40.0)
    inter = [e for e in sol.events if e.t > 0.0]
    assert len(inter) == 1
    t1 = inter[0].t
    # outflow shock reaching the standing wave left over from the braking fan
    assert t1 == pytest.approx(1.0 / 0.3621297277623052, rel=1e-6)
    before = frontset_at(sol, t1 - 0.01)
    after = frontset_at(sol, t1 + 0.01)
    assert len(after.fronts) < len(before.fronts)


def test_event_numbers_continue_from_datum(fam):
    background = HState(2.0, 1.9)
    slow = state_at_velocity(fam, 2.0, 0.2)
    sol = track(fam, [-1.0, 0.0], [background, slow, background], 40.0)
    nums = [e.number for e in sol.events]
    assert nums == sorted(nums)
    assert nums[0] == 0
    assert len(set(nums)) == len(nums)


def test_ring_wrap(fam):
    background = HState(2.0, 1.9)
    slow = state_at_velocity(fam, 2.0, 0.2)
    sol = track(fam, [-1.0, 0.0], [slow, background], 80.0,
                topology="ring", period=20.0)
    fs = sol.final()
    assert all(-10.0 <= f.x < 10.0 for f in fs.fronts)
    inter = [e for e in sol.events if e.t > 0.0]
    assert len(inter) == 2


def test_truncation_flag(fam):
    background = HState(2.0, 1.9)
    slow = state_at_velocity(fam, 2.0, 0.2)
    sol = track(fam, [-1.0, 0.0], [background, slow, background], 40.0,
                max_events=0)
    assert sol.truncated


def test_sample_between_checkpoints(fam):
    fast = HState(3.2, fam.hA(3.2))
    slow = HState(1.5, 1.5)
    sol = track(fam, [-1.0, 0.0], [fast, slow, fast], 10.0)
    s = sample(sol, 7.3, [-10.0, 0.5])[0]
    assert s.u == pytest.approx(fast.u, abs=1e-9)
    # inside the translating jam
    jam_x = -1.0 + sol.initial.fronts[0].speed * 7.3 + 0.5
    assert sample(sol, 7.3, [jam_x])[0].u == pytest.approx(slow.u, abs=1e-9)
