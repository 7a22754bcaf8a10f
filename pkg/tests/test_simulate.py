import numpy as np
import pytest

from mjpstein.engine import build_chain, transient_distribution, tv_distance
from mjpstein.process import build_elementary, geometry_of, immigration_death
from mjpstein.simulate import (
    coupling_times,
    hitting_time_samples,
    sample_states_at,
    simulate,
    simulate_coupled,
    substream,
)


@pytest.fixture(scope="module")
def small():
    e = build_elementary([3.0, 1.5], np.diag([-1.0, -2.0]), [[6.0, 2.0], [2.0, 6.0]], n=8)
    return e.spec, e.geom, build_chain(e.spec, e.geom, 0.5)


def test_substreams_are_independent_and_reproducible():
    a = substream(7, 0).random(5)
    assert np.array_equal(a, substream(7, 0).random(5))
    assert not np.array_equal(a, substream(7, 1).random(5))
    assert not np.array_equal(a, substream(8, 0).random(5))


def test_trajectory_determinism(small):
    spec, geom, ch = small
    x0 = ch.states[0]
    a = simulate(spec, geom, 0.5, x0, 3.0, seed=11, chain=ch)
    b = simulate(spec, geom, 0.5, x0, 3.0, seed=11, chain=ch)
    assert np.array_equal(a.times, b.times) and np.array_equal(a.states, b.states)
    c = simulate(spec, geom, 0.5, x0, 3.0, seed=12, chain=ch)
    assert not (len(a.times) == len(c.times) and np.array_equal(a.states, c.states))


def test_trajectory_shape(small):
    spec, geom, ch = small
    tr = simulate(spec, geom, 0.5, ch.states[5], 2.0, seed=1, chain=ch)
    assert tr.times[0] == 0.0 and np.all(np.diff(tr.times) > 0) and tr.times[-1] <= 2.0
    assert np.all(ch.lookup(tr.states) >= 0)
    steps = np.diff(tr.states, axis=0)
    allowed = {tuple(J) for J in spec.jumps}
    assert all(tuple(s) in allowed for s in steps)
    assert tr.occupation(ch, 2.0).sum() == pytest.approx(1.0)


def test_zero_horizon(small):
    spec, geom, ch = small
    tr = simulate(spec, geom, 0.5, ch.states[2], 0.0, seed=3, chain=ch)
    assert len(tr.times) == 1 and np.array_equal(tr.states[0], ch.states[2])


def test_coupled_identical_starts(small):
    spec, geom, ch = small
    ct = simulate_coupled(spec, geom, 0.5, ch.states[4], ch.states[4], 5.0, seed=2, chain=ch)
    assert ct.coupling_time == 0.0 and not ct.censored
    s = coupling_times(ch, ch.states[4], ch.states[4], 5.0, 20, seed=2)
    assert np.all(s.times == 0.0)


def test_coupled_paths_meet_and_stay_in_ball(small):
    spec, geom, ch = small
    ct = simulate_coupled(spec, geom, 0.5, ch.states[0], ch.states[-1], 100.0, seed=4, chain=ch)
    assert not ct.censored
    assert np.array_equal(ct.first[-1], ct.second[-1])
    assert np.all(ch.lookup(ct.first) >= 0) and np.all(ch.lookup(ct.second) >= 0)


def test_one_step_marginal_matches_transient_law():
    s = immigration_death(mu=1.0, n=10, delta0=0.5)
    g = geometry_of(s)
    ch = build_chain(s, g, 0.5)
    x0 = ch.states[0]
    idx = sample_states_at(ch, x0, 0.4, 20000, seed=99)
    emp = np.bincount(idx, minlength=ch.size) / idx.size
    exact = transient_distribution(ch, x0, 0.4).probs
    # 4-sigma band per state
    band = 4 * np.sqrt(exact * (1 - exact) / idx.size) + 1e-4
    assert np.all(np.abs(emp - exact) <= band)


def test_coupling_inequality(small):
    spec, geom, ch = small
    x1, x2 = ch.states[0], ch.states[-1]
    s = coupling_times(ch, x1, x2, 20.0, 3000, seed=5)
    for t in (0.25, 0.5, 1.0, 2.0):
        tv = tv_distance(transient_distribution(ch, x1, t), transient_distribution(ch, x2, t))
        assert tv <= s.survival(t) + 4 * np.sqrt(0.25 / 3000)


def test_hitting_times(small):
    spec, geom, ch = small
    centre = np.round(ch.center).astype(int)
    s = hitting_time_samples(spec, geom, 0.5, centre, 0.25, "enter", 50, seed=1, chain=ch)
    assert np.all(s.times == 0.0) and not s.censored.any()
    s = hitting_time_samples(spec, geom, 0.5, centre, 0.25, "exit", 200, seed=1, chain=ch)
    assert np.all(s.times > 0) and s.survival(0.0) == 1.0
    assert 0.0 <= s.survival(1.0) <= 1.0
    with pytest.raises(ValueError):
        hitting_time_samples(spec, geom, 0.5, centre, 0.6, "exit", 5, seed=1, chain=ch)
    with pytest.raises(ValueError):
        hitting_time_samples(spec, geom, 0.5, centre, 0.2, "sideways", 5, seed=1, chain=ch)
