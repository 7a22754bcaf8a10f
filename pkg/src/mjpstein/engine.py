"""Exact analysis of the truncated chain on the Sigma-ball.

The truncated process lives on the integer points ``X`` with
``||X - nc||_Sigma <= n delta``; a jump is allowed only when both endpoints
lie in that set.  Everything here works on the resulting finite generator:
stationary law, Stein solutions, transient laws by uniformization and the
distances built from them.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu
from scipy.special import gammaln
from scipy.stats import poisson

from .exceptions import (
    AssumptionError,
    ConvergenceError,
    IrreducibilityError,
    ModelError,
    NumericalError,
    ScaleError,
)
from .process import BALL_RTOL, ProcessSpec, constants_ledger
from .spectral import GeometrySolution, sigma_norm_sq_rows

log = logging.getLogger(__name__)

MAX_STATES = 2_000_000
POISSON_TAIL = 1e-13
UNIFORM_SLACK = 1.05
STATIONARY_RTOL = 1e-12
STEIN_ATOL = 1e-10
REFINE_STEPS = 4


@dataclass
class TruncatedChain:
    """Finite CTMC of the truncated process.

    Attributes
    ----------
    states : ndarray (N, d) of int64
        Lattice points of the ball, in lexicographic order.
    targets : ndarray (N, K) of int
        Index of ``X + J_k`` or -1 when that jump is truncated.
    rates : ndarray (N, K)
        Truncated rates ``n g^J(X/n)``; zero where ``targets == -1``.
    Q : scipy.sparse.csr_matrix
        Generator, diagonal equal to minus the row sums.
    """

    spec: ProcessSpec
    geom: GeometrySolution
    delta: float
    states: np.ndarray
    box_lo: np.ndarray
    box_index: np.ndarray
    targets: np.ndarray = None
    rates: np.ndarray = None
    Q: sp.csr_matrix = None
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.states.shape[0]

    @property
    def center(self) -> np.ndarray:
        return self.spec.n * self.spec.c

    @property
    def radius(self) -> float:
        return self.spec.n * self.delta

    @property
    def exit_rates(self) -> np.ndarray:
        return self.rates.sum(axis=1)

    @property
    def uniformization_rate(self) -> float:
        return float(self.exit_rates.max()) if self.size else 0.0

    def lookup(self, X) -> np.ndarray:
        """Positions of the rows of ``X`` (-1 if not a state)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        rel = X - self.box_lo
        shape = np.array(self.box_index.shape)
        ok = np.all((rel >= 0) & (rel < shape), axis=1)
        out = np.full(X.shape[0], -1, dtype=np.int64)
        if np.any(ok):
            out[ok] = self.box_index[tuple(rel[ok].T)]
        return out

    def index_of(self, X) -> int:
        i = int(self.lookup(X)[0])
        if i < 0:
            raise KeyError(f"{tuple(np.asarray(X).tolist())} is not a state of the chain")
        return i

    def indicator(self, B) -> np.ndarray:
        """Boolean mask over states from a mask, index list or list of states."""
        B = np.asarray(B)
        if B.dtype == bool:
            if B.shape != (self.size,):
                raise ValueError("mask length must equal the number of states")
            return B.copy()
        mask = np.zeros(self.size, dtype=bool)
        if B.size == 0:
            return mask
        if B.ndim == 2:
            idx = self.lookup(B)
            if np.any(idx < 0):
                raise KeyError("target set contains points outside the chain")
            mask[idx] = True
        else:
            mask[B.astype(np.int64)] = True
        return mask

    def in_ball(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        q = sigma_norm_sq_rows(self.geom.SigmaInv, X - self.center)
        return q <= self.radius**2 * (1 + BALL_RTOL)

    def metadata(self) -> dict:
        out = {
            "process": self.spec.name,
            "n": self.spec.n,
            "delta": self.delta,
            "states": self.size,
            "uniformization_rate": self.uniformization_rate,
        }
        out.update(self.meta)
        return out


@dataclass
class DiscreteDistribution:
    states: np.ndarray
    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        neg = p < 0
        if np.any(p < -1e-14):
            raise NumericalError(f"probability {p.min():.3g} below clamp tolerance")
        if np.any(neg):
            log.debug("clamped %d negative round-off probabilities (total %.3g)", neg.sum(), p[neg].sum())
            p = np.where(neg, 0.0, p)
        s = p.sum()
        if abs(s - 1.0) > 1e-9:
            raise NumericalError(f"probabilities sum to {s!r}")
        self.probs = p / s

    def mean(self) -> np.ndarray:
        return self.probs @ self.states

    def covariance(self) -> np.ndarray:
        m = self.mean()
        y = self.states - m
        return (y * self.probs[:, None]).T @ y

    def as_dict(self) -> dict:
        return {tuple(int(v) for v in X): float(p) for X, p in zip(self.states, self.probs)}


@dataclass
class SteinSolution:
    values: np.ndarray
    target_set: np.ndarray
    pi_B: float
    residual: float = 0.0


# ---------------------------------------------------------------------------
# enumeration and assembly


def ellipsoid_volume(geom: GeometrySolution, radius: float) -> float:
    d = geom.d
    logv = 0.5 * d * math.log(math.pi) - gammaln(0.5 * d + 1) + d * math.log(max(radius, 1e-300))
    return math.exp(logv) * math.sqrt(np.linalg.det(geom.Sigma))


def enumerate_ball(spec: ProcessSpec, geom: GeometrySolution, delta: float, max_states=MAX_STATES) -> TruncatedChain:
    """Lattice points of the Sigma-ball of radius ``n delta`` around ``nc``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    d, R = spec.d, spec.n * delta
    nc = spec.n * spec.c
    est = ellipsoid_volume(geom, R)
    if est > max_states:
        raise ScaleError(f"estimated {est:.3g} states exceeds the limit {max_states}")
    half = R * np.sqrt(np.diag(geom.Sigma))
    lo = np.floor(nc - half).astype(np.int64)
    hi = np.ceil(nc + half).astype(np.int64)
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    q = sigma_norm_sq_rows(geom.SigmaInv, grid - nc)
    states = grid[q <= R * R * (1 + BALL_RTOL)]
    # meshgrid with ij indexing already yields lexicographic order
    box_index = np.full(tuple(hi - lo + 1), -1, dtype=np.int64)
    if states.shape[0]:
        box_index[tuple((states - lo).T)] = np.arange(states.shape[0])
    return TruncatedChain(spec, geom, float(delta), states, lo, box_index)


def assemble_generator(chain: TruncatedChain) -> TruncatedChain:
    """Fill in the truncated transition rates and the sparse generator."""
    spec = chain.spec
    N, Js = chain.size, spec.jump_array
    K = Js.shape[0]
    targets = np.full((N, K), -1, dtype=np.int64)
    rates = np.zeros((N, K))
    x = chain.states / spec.n
    for k, (J, g) in enumerate(zip(Js, spec.rates)):
        tgt = chain.lookup(chain.states + J)
        r = spec.n * np.asarray(g(x), dtype=float)
        live = tgt >= 0
        if np.any(r[live] < -1e-12 * max(1.0, spec.n)):
            bad = chain.states[live][np.argmin(r[live])]
            raise ModelError(f"negative rate for jump {tuple(J)} at state {tuple(bad)}")
        targets[:, k] = tgt
        rates[:, k] = np.where(live, np.maximum(r, 0.0), 0.0)
    rows = np.repeat(np.arange(N), K)
    cols = targets.ravel()
    vals = rates.ravel()
    keep = (cols >= 0) & (vals > 0)
    off = sp.csr_matrix((vals[keep], (rows[keep], cols[keep])), shape=(N, N))
    Q = (off - sp.diags(np.asarray(off.sum(axis=1)).ravel())).tocsr()
    chain.targets, chain.rates, chain.Q = targets, rates, Q
    return chain


def build_chain(spec: ProcessSpec, geom: GeometrySolution, delta: float, max_states=MAX_STATES) -> TruncatedChain:
    return assemble_generator(enumerate_ball(spec, geom, delta, max_states))


def irreducibility_check(chain: TruncatedChain):
    """``(irreducible, classes)`` from the strong components of the jump graph."""
    if chain.size <= 1:
        return True, [list(range(chain.size))]
    off = chain.Q - sp.diags(chain.Q.diagonal())
    off.eliminate_zeros()
    ncomp, labels = connected_components(off, directed=True, connection="strong")
    classes = [np.flatnonzero(labels == k).tolist() for k in range(ncomp)]
    return ncomp == 1, classes


# ---------------------------------------------------------------------------
# stationary law and Stein equation


def stationary_distribution(chain: TruncatedChain, check=True) -> DiscreteDistribution:
    """Solve ``pi^T Q = 0``, ``sum pi = 1`` with the last equation replaced by normalization."""
    N = chain.size
    if N == 0:
        raise ValueError("empty chain")
    if N == 1:
        return DiscreteDistribution(chain.states, np.ones(1))
    if check:
        ok, classes = irreducibility_check(chain)
        if not ok:
            raise IrreducibilityError(f"chain has {len(classes)} communicating classes", classes)
    M = chain.Q.T.tolil()
    M[N - 1, :] = np.ones(N)
    lu = splu(M.tocsc())
    b = np.zeros(N)
    b[-1] = 1.0
    pi = lu.solve(b)
    # one step of iterative refinement
    r = b - M.tocsr() @ pi
    pi = pi + lu.solve(r)
    res = float(np.max(np.abs(chain.Q.T @ pi)))
    tol = STATIONARY_RTOL * max(chain.uniformization_rate, 1.0)
    chain.meta["stationary_residual"] = res
    if res > tol:
        raise NumericalError(f"stationary residual {res:.3g} above {tol:.3g}")
    return DiscreteDistribution(chain.states, pi)


class SteinSolver:
    """Reusable factorization for ``Q h = 1_B - pi(B)``, ``pi^T h = 0``.

    The singular generator is bordered by a column of ones and the row
    ``pi^T``.  The bordered matrix is nonsingular for an irreducible chain;
    the extra unknown absorbs the round-off inconsistency of the right-hand
    side so the residual stays spread evenly over all rows.
    """

    def __init__(self, chain: TruncatedChain, pi: DiscreteDistribution):
        self.chain = chain
        self.pi = np.asarray(pi.probs)
        N = chain.size
        ones = np.ones((N, 1))
        M = sp.bmat([[chain.Q, sp.csr_matrix(ones)], [sp.csr_matrix(self.pi[None, :]), None]], format="csc")
        self._M = M
        self._lu = splu(M)

    def solve(self, B) -> SteinSolution:
        chain = self.chain
        mask = chain.indicator(B)
        piB = float(self.pi[mask].sum())
        f = mask.astype(float) - piB
        N = chain.size
        rhs = np.append(f, 0.0)
        z = self._lu.solve(rhs)
        for _ in range(REFINE_STEPS):
            r = rhs - self._M @ z
            if np.max(np.abs(r)) <= 0.01 * STEIN_ATOL:
                break
            z += self._lu.solve(r)
        h = z[:N]
        h -= self.pi @ h
        res = float(np.max(np.abs(chain.Q @ h - f)))
        if res > STEIN_ATOL:
            raise NumericalError(f"Stein residual {res:.3g} above {STEIN_ATOL}")
        return SteinSolution(h, mask, piB, res)


def solve_stein(chain: TruncatedChain, pi: DiscreteDistribution, B) -> SteinSolution:
    return SteinSolver(chain, pi).solve(B)


def _kernel(chain: TruncatedChain):
    lam = UNIFORM_SLACK * chain.uniformization_rate
    if lam == 0:
        return sp.identity(chain.size, format="csr"), 1.0
    P = sp.identity(chain.size, format="csr") + chain.Q / lam
    return P.tocsr(), lam


def stein_via_transient(chain: TruncatedChain, pi: DiscreteDistribution, B, tol=1e-11, max_terms=2_000_000) -> SteinSolution:
    """``h_B(X) = -int_0^inf (P_X[X(t) in B] - pi(B)) dt`` by uniformization.

    With ``P = I + Q / lam`` each Poisson weight integrates to ``1 / lam`` over
    time, so the integral equals ``-(1/lam) sum_k P^k f`` exactly.  The series
    is stopped once the geometric tail estimate drops below ``tol``.
    """
    mask = chain.indicator(B)
    p = np.asarray(pi.probs)
    piB = float(p[mask].sum())
    f = mask.astype(float) - piB
    P, lam = _kernel(chain)
    acc = np.zeros_like(f)
    v = f.copy()
    window, prev = 50, None
    for k in range(max_terms):
        acc += v
        nv = float(np.max(np.abs(v)))
        if nv == 0.0:
            break
        if k % window == 0:
            # pi-mean is zero in exact arithmetic; drop the round-off part P keeps
            v -= p @ v
            nv = float(np.max(np.abs(v)))
            if prev is not None and prev > 0:
                ratio = (nv / prev) ** (1.0 / window)
                if ratio < 1 and nv / (1 - ratio) / lam < tol:
                    break
            prev = nv
        v = P @ v
    else:
        raise ConvergenceError("time integral did not converge within max_terms")
    h = -acc / lam
    h -= p @ h
    res = float(np.max(np.abs(chain.Q @ h - f)))
    return SteinSolution(h, mask, piB, res)


# ---------------------------------------------------------------------------
# transient laws


def _poisson_window(mean):
    if mean == 0:
        return 0, 0
    right = int(poisson.isf(POISSON_TAIL, mean)) + 1
    left = int(poisson.ppf(POISSON_TAIL, mean))
    return max(left, 0), right


def transient_distributions(chain: TruncatedChain, x0, times, initial=None) -> np.ndarray:
    """Rows of ``exp(Qt)`` from ``x0`` (or from ``initial``) at every time in ``times``."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    if initial is None:
        v = np.zeros(chain.size)
        v[chain.index_of(x0)] = 1.0
    else:
        v = np.asarray(initial, dtype=float).copy()
    P, lam = _kernel(chain)
    PT = P.T.tocsr()
    windows = [_poisson_window(lam * t) for t in times]
    kmax = max(w[1] for w in windows) if len(windows) else 0
    out = np.zeros((times.size, chain.size))
    for k in range(kmax + 1):
        for i, t in enumerate(times):
            a, b = windows[i]
            if a <= k <= b:
                out[i] += poisson.pmf(k, lam * t) * v
        v = PT @ v
    out = np.where(out < 0, 0.0, out)
    out /= out.sum(axis=1, keepdims=True)
    return out


def transient_distribution(chain: TruncatedChain, x0, t) -> DiscreteDistribution:
    return DiscreteDistribution(chain.states, transient_distributions(chain, x0, [t])[0])


# ---------------------------------------------------------------------------
# distances and moments


def _probs(p):
    return np.asarray(p.probs if isinstance(p, DiscreteDistribution) else p, dtype=float)


def tv_distance(p, q) -> float:
    """Half the L1 distance; distributions on different state lists are aligned first."""
    if isinstance(p, DiscreteDistribution) and isinstance(q, DiscreteDistribution):
        if p.states.shape == q.states.shape and np.array_equal(p.states, q.states):
            return 0.5 * float(np.abs(p.probs - q.probs).sum())
        a, b = p.as_dict(), q.as_dict()
        return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in set(a) | set(b))
    return 0.5 * float(np.abs(_probs(p) - _probs(q)).sum())


def shift_tv(pi: DiscreteDistribution, j: int) -> float:
    """``d_TV(pi, pi * delta_{e_j})`` where the convolution moves all mass by ``e_j``."""
    a = pi.as_dict()
    total = 0.0
    seen = set()
    for X, p in a.items():
        Y = list(X)
        Y[j] += 1
        Y = tuple(Y)
        total += abs(a.get(Y, 0.0) - p)
        seen.add(Y)
    total += sum(p for X, p in a.items() if X not in seen)
    return 0.5 * total


def sigma_moment(pi: DiscreteDistribution, geom: GeometrySolution, nc, power=2) -> float:
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    q = sigma_norm_sq_rows(geom.SigmaInv, pi.states - np.asarray(nc, dtype=float))
    return float(pi.probs @ (q if power == 2 else np.sqrt(q)))


def concentration_bound(ledger, n, eta) -> float:
    d = ledger.d
    return eta**-2 * d**2 * ledger.K_Sigma * math.exp(-n * ledger.theta1 * eta**2)


def concentration_tail(pi: DiscreteDistribution, geom: GeometrySolution, nc, n, eta, ledger=None, spec=None):
    """Measured ``pi{||X - nc||_Sigma > n eta}`` and the exponential tail bound.

    ``eta`` must exceed ``K_drift sqrt(d/n)``.
    """
    if ledger is None:
        if spec is None:
            raise ValueError("a constants ledger or a spec is required")
        ledger = constants_ledger(spec, geom)
    thr = ledger.K_drift * math.sqrt(ledger.d / n)
    if eta <= thr:
        raise AssumptionError(f"eta={eta:.4g} is not above the threshold {thr:.4g}")
    q = sigma_norm_sq_rows(geom.SigmaInv, pi.states - np.asarray(nc, dtype=float))
    measured = float(pi.probs[q > (n * eta) ** 2 * (1 + BALL_RTOL)].sum())
    return measured, concentration_bound(ledger, n, eta)


def decay_profile(chain: TruncatedChain, x1, x2, t_grid):
    """``[(t, d_TV(law from x1, law from x2))]``; monotonicity recorded in ``chain.meta``."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.array_equal(np.asarray(x1), np.asarray(x2)):
        return [(float(t), 0.0) for t in t_grid]
    p1 = transient_distributions(chain, x1, t_grid)
    p2 = transient_distributions(chain, x2, t_grid)
    tv = 0.5 * np.abs(p1 - p2).sum(axis=1)
    order = np.argsort(t_grid)
    chain.meta["decay_monotone"] = bool(np.all(np.diff(tv[order]) <= 1e-12))
    return [(float(t), float(v)) for t, v in zip(t_grid, tv)]


# ---------------------------------------------------------------------------
# export


def write_state_csv(path, states, values, value_name="value"):
    states = np.asarray(states)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i + 1}" for i in range(states.shape[1])] + [value_name])
        for X, v in zip(states, values):
            w.writerow([int(c) for c in X] + [repr(float(v))])


def write_chain_json(path, chain: TruncatedChain):
    with open(path, "w") as fh:
        json.dump(chain.metadata(), fh, indent=2, sort_keys=True)
