"""Integer dyad factorization of a covariance matrix.

A positive definite ``sigma2`` is written as ``sum_J w(J) J J^T`` over a
finite, sign-symmetric set of integer vectors containing every coordinate
vector.  Half the smallest eigenvalue is split off onto the coordinate
vectors first, which guarantees ``w(e_i) >= lambda_min / 4``; the remainder
is factorized either in closed form (diagonally dominant case) or by a
linear program over a bounded box of integer vectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from ._validation import check_symmetric
from .exceptions import FactorizationError, ScaleError
from .spectral import spectral_summary

MAX_DIM = 4
RECONSTRUCTION_RTOL = 1e-10


@dataclass(frozen=True)
class WeightedJumpSet:
    """Integer jump vectors with nonnegative weights.

    ``entries`` holds ``(J, weight)`` pairs with ``J`` a tuple of ints, sorted
    lexicographically.
    """

    d: int
    entries: tuple = field(default_factory=tuple)

    @property
    def jumps(self) -> np.ndarray:
        return np.array([J for J, _ in self.entries], dtype=np.int64).reshape(-1, self.d)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.entries], dtype=float)

    def weight(self, J) -> float:
        J = tuple(int(v) for v in J)
        for K, w in self.entries:
            if K == J:
                return w
        return 0.0

    def as_dict(self):
        return {J: w for J, w in self.entries}

    def matrix(self) -> np.ndarray:
        Js = self.jumps.astype(float)
        return np.einsum("k,ki,kj->ij", self.weights, Js, Js)

    def scaled(self, factor):
        return WeightedJumpSet(self.d, tuple((J, factor * w) for J, w in self.entries))

    def __len__(self):
        return len(self.entries)


def coordinate_bound(sigma2) -> float:
    """Bound ``1 + sqrt(2 (d-1) rho(sigma2)) / 2`` on the jump coordinates."""
    sigma2 = check_symmetric(sigma2, "sigma2")
    d = sigma2.shape[0]
    rho = spectral_summary(sigma2).rho
    return 1.0 + 0.5 * math.sqrt(2.0 * (d - 1) * rho)


def verify_factorization(ws: WeightedJumpSet, sigma2) -> float:
    sigma2 = np.asarray(sigma2, dtype=float)
    if sigma2.shape != (ws.d, ws.d):
        raise ValueError("dimension mismatch between jump set and sigma2")
    return float(np.max(np.abs(ws.matrix() - sigma2)))


def _canonical(v):
    v = tuple(int(x) for x in v)
    for x in v:
        if x != 0:
            return v if x > 0 else tuple(-y for y in v)
    raise ValueError("zero vector has no canonical sign")


def _is_diagonally_dominant(M, tol):
    off = np.sum(np.abs(M), axis=1) - np.abs(np.diag(M))
    return bool(np.all(np.diag(M) - off >= -tol))


def _dominant_dyads(M, tol):
    d = M.shape[0]
    out = {}
    for i in range(d):
        for j in range(i + 1, d):
            if M[i, j] != 0.0:
                u = [0] * d
                u[i] = 1
                u[j] = 1 if M[i, j] > 0 else -1
                out[_canonical(u)] = abs(M[i, j])
    for i in range(d):
        rem = M[i, i] - (np.sum(np.abs(M[i])) - abs(M[i, i]))
        if rem > tol:
            e = [0] * d
            e[i] = 1
            out[tuple(e)] = out.get(tuple(e), 0.0) + rem
    return out


def _box_candidates(d, bound):
    rng = range(-bound, bound + 1)
    seen = []
    for v in itertools.product(rng, repeat=d):
        if any(v) and _canonical(v) == v:
            seen.append(v)
    return sorted(seen)


def _upper(d):
    return [(i, j) for i in range(d) for j in range(i, d)]


def _lp_dyads(M, bound):
    d = M.shape[0]
    cands = _box_candidates(d, bound)
    idx = _upper(d)
    V = np.array(cands, dtype=float)
    A_eq = np.array([V[:, i] * V[:, j] for i, j in idx])
    b_eq = np.array([M[i, j] for i, j in idx])
    cost = np.linalg.norm(V, axis=1) ** 3
    res = linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        raise FactorizationError(f"no nonnegative integer-dyad factorization in box |J_i| <= {bound}: {res.message}")
    w = np.asarray(res.x)
    support = np.flatnonzero(w > 1e-14 * max(1.0, np.max(np.abs(M))))
    # re-solve on the basis columns to remove the LP feasibility tolerance
    sub = A_eq[:, support]
    polished, *_ = np.linalg.lstsq(sub, b_eq, rcond=None)
    if np.all(polished >= 0) and np.max(np.abs(sub @ polished - b_eq)) <= np.max(np.abs(A_eq @ w - b_eq)):
        w = np.zeros_like(w)
        w[support] = polished
    return {cands[k]: float(w[k]) for k in np.flatnonzero(w > 0)}


def factorize(sigma2) -> WeightedJumpSet:
    """Write ``sigma2`` as a sign-symmetric weighted sum of integer dyads.

    Parameters
    ----------
    sigma2 : array_like (d, d)
        Symmetric positive definite, ``d <= 4``.

    Returns
    -------
    WeightedJumpSet
        Contains ``+-e_i`` for every axis, ``w(J) == w(-J)``, coordinates
        bounded by :func:`coordinate_bound`, and reconstructs ``sigma2`` to
        ``1e-10 * max|sigma2|``.
    """
    sigma2 = check_symmetric(sigma2, "sigma2")
    d = sigma2.shape[0]
    if d > MAX_DIM:
        raise ScaleError(f"factorization supports d <= {MAX_DIM}, got d={d}")
    summ = spectral_summary(sigma2)
    scale = float(np.max(np.abs(sigma2)))
    tol = 1e-14 * scale

    lam0 = 0.5 * summ.lambda_min
    M = sigma2 - lam0 * np.eye(d)
    if _is_diagonally_dominant(M, tol):
        dyads = _dominant_dyads(M, tol)
    else:
        bound = int(math.floor(coordinate_bound(sigma2) + 1e-12))
        dyads = _lp_dyads(M, bound)

    for i in range(d):
        e = [0] * d
        e[i] = 1
        dyads[tuple(e)] = dyads.get(tuple(e), 0.0) + lam0

    entries = {}
    for J, w in dyads.items():
        entries[J] = 0.5 * float(w)
        entries[tuple(-x for x in J)] = 0.5 * float(w)
    ws = WeightedJumpSet(d, tuple(sorted(entries.items())))

    residual = verify_factorization(ws, sigma2)
    if residual > RECONSTRUCTION_RTOL * scale:
        raise FactorizationError(f"reconstruction residual {residual:.3g} above tolerance", residual)
    return ws
