"""Seeded Gillespie simulation of the truncated chain and of the coupled pair.

Every replicate draws from its own Philox stream keyed by ``(seed, rep)``, so
results do not depend on how replicates are scheduled.  Paths are simulated
on the precomputed jump tables of a :class:`~mjpstein.engine.TruncatedChain`.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .engine import TruncatedChain, build_chain
from .spectral import sigma_norm_sq_rows

UNIFORM_BATCH = 256


def substream(seed, rep) -> np.random.Generator:
    """Independent Philox generator for replicate ``rep``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(rep)])))


class _Uniforms:
    """Batched uniforms in (0, 1] from one generator."""

    def __init__(self, rng):
        self.rng = rng
        self.buf = []
        self.pos = 0

    def __call__(self):
        if self.pos == len(self.buf):
            self.buf = (1.0 - self.rng.random(UNIFORM_BATCH)).tolist()
            self.pos = 0
        u = self.buf[self.pos]
        self.pos += 1
        return u


class _Tables:
    def __init__(self, chain: TruncatedChain):
        self.chain = chain
        rates = chain.rates
        self.cum = np.cumsum(rates, axis=1).tolist()
        self.total = rates.sum(axis=1).tolist()
        self.targets = chain.targets.tolist()
        self.rates = rates.tolist()
        self.K = rates.shape[1]

    def step(self, i, u):
        row = self.cum[i]
        k = bisect.bisect_right(row, u * self.total[i])
        k = min(k, self.K - 1)
        while self.rates[i][k] == 0.0:
            k -= 1
        return self.targets[i][k]


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    seed: int
    absorbed: bool = False

    def occupation(self, chain: TruncatedChain, horizon) -> np.ndarray:
        """Fraction of ``[0, horizon]`` spent in each state."""
        idx = chain.lookup(self.states)
        ends = np.append(self.times[1:], horizon)
        occ = np.zeros(chain.size)
        np.add.at(occ, idx, np.clip(ends, None, horizon) - self.times)
        return occ / horizon


@dataclass
class CoupledTrajectory:
    times: np.ndarray
    first: np.ndarray
    second: np.ndarray
    coupling_time: float
    censored: bool
    seed: int


@dataclass
class HittingSamples:
    times: np.ndarray
    censored: np.ndarray
    horizon: float

    def survival(self, t) -> float:
        """Empirical ``P[tau > t]``; censored samples count as exceeding ``t < horizon``."""
        return float(np.mean(self.times > t))


def _chain(spec, geom, delta, chain):
    return chain if chain is not None else build_chain(spec, geom, delta)


def _run(tab: _Tables, i, horizon, unif, record=False):
    t = 0.0
    path = [(0.0, i)] if record else None
    while True:
        lam = tab.total[i]
        if lam == 0.0:
            return i, path, True
        t -= math.log(unif()) / lam
        if t > horizon:
            return i, path, False
        i = tab.step(i, unif())
        if record:
            path.append((t, i))


def simulate(spec, geom, delta, x0, horizon, seed, chain: TruncatedChain = None, rep=0) -> Trajectory:
    """Exact SSA path of the truncated chain on ``[0, horizon]``."""
    chain = _chain(spec, geom, delta, chain)
    tab = _Tables(chain)
    i0 = chain.index_of(x0)
    _, path, absorbed = _run(tab, i0, float(horizon), _Uniforms(substream(seed, rep)), record=True)
    times = np.array([p[0] for p in path])
    states = chain.states[[p[1] for p in path]]
    return Trajectory(times, states, int(seed), absorbed)


def sample_states_at(chain: TruncatedChain, x0, t, reps, seed) -> np.ndarray:
    """State indices at time ``t`` for ``reps`` independent replicates."""
    tab = _Tables(chain)
    i0 = chain.index_of(x0)
    out = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        out[r] = _run(tab, i0, float(t), _Uniforms(substream(seed, r)))[0]
    return out


def _coupled_run(tab: _Tables, i1, i2, horizon, unif, record=False):
    t = 0.0
    path = [(0.0, i1, i2)] if record else None
    K = tab.K
    while i1 != i2:
        r1, r2 = tab.rates[i1], tab.rates[i2]
        events = []
        total = 0.0
        for k in range(K):
            a, b = r1[k], r2[k]
            m = a if a < b else b
            if m > 0:
                total += m
                events.append((total, 0, k))
            if a > m:
                total += a - m
                events.append((total, 1, k))
            if b > m:
                total += b - m
                events.append((total, 2, k))
        if total == 0.0:
            return t, True, path
        t -= math.log(unif()) / total
        if t > horizon:
            return horizon, True, path
        u = unif() * total
        pos = bisect.bisect_right([e[0] for e in events], u)
        _, who, k = events[min(pos, len(events) - 1)]
        if who != 2:
            i1 = tab.targets[i1][k]
        if who != 1:
            i2 = tab.targets[i2][k]
        if record:
            path.append((t, i1, i2))
    return t, False, path


def simulate_coupled(spec, geom, delta, x1, x2, horizon, seed, chain: TruncatedChain = None, rep=0) -> CoupledTrajectory:
    """Synchronous coupling: shared jumps at the smaller rate, solo jumps at the excess.

    The pair is followed until the paths meet; afterwards they coincide.
    """
    chain = _chain(spec, geom, delta, chain)
    tab = _Tables(chain)
    i1, i2 = chain.index_of(x1), chain.index_of(x2)
    tau, censored, path = _coupled_run(tab, i1, i2, float(horizon), _Uniforms(substream(seed, rep)), record=True)
    times = np.array([p[0] for p in path])
    return CoupledTrajectory(
        times,
        chain.states[[p[1] for p in path]],
        chain.states[[p[2] for p in path]],
        float(tau),
        bool(censored),
        int(seed),
    )


def coupling_times(chain: TruncatedChain, x1, x2, horizon, reps, seed) -> HittingSamples:
    tab = _Tables(chain)
    i1, i2 = chain.index_of(x1), chain.index_of(x2)
    times = np.empty(reps)
    cens = np.zeros(reps, dtype=bool)
    for r in range(reps):
        times[r], cens[r], _ = _coupled_run(tab, i1, i2, float(horizon), _Uniforms(substream(seed, r)))
    return HittingSamples(times, cens, float(horizon))


def hitting_time_samples(spec, geom, delta, x0, eta, direction, reps, seed, horizon=None, chain: TruncatedChain = None) -> HittingSamples:
    """Entry time into (``enter``) or exit time from (``exit``) the ``n eta`` Sigma-ball.

    Samples are censored at ``horizon`` (default ``50 / alpha1``) and flagged.
    """
    if eta > delta:
        raise ValueError("eta must not exceed delta")
    if direction not in ("enter", "exit"):
        raise ValueError("direction must be 'enter' or 'exit'")
    chain = _chain(spec, geom, delta, chain)
    horizon = 50.0 / geom.alpha1 if horizon is None else float(horizon)
    tab = _Tables(chain)
    q = sigma_norm_sq_rows(geom.SigmaInv, chain.states - chain.center)
    inside = (q <= (spec.n * eta) ** 2 * (1 + 1e-12)).tolist()
    stop = inside if direction == "enter" else [not v for v in inside]
    i0 = chain.index_of(x0)
    times = np.empty(reps)
    cens = np.zeros(reps, dtype=bool)
    for r in range(reps):
        unif = _Uniforms(substream(seed, r))
        i, t = i0, 0.0
        while not stop[i]:
            lam = tab.total[i]
            if lam == 0.0:
                t = horizon
                cens[r] = True
                break
            t -= math.log(unif()) / lam
            if t > horizon:
                t = horizon
                cens[r] = True
                break
            i = tab.step(i, unif())
        times[r] = t
    return HittingSamples(times, cens, horizon)
