"""Density dependent jump processes on the integer lattice.

A :class:`ProcessSpec` lists jump vectors ``J`` with rate functions ``g^J``;
the process at scale ``n`` jumps ``X -> X + J`` at rate ``n g^J(X / n)``.
This module evaluates the deterministic drift and its linearization,
checks the standing assumptions, builds elementary processes for a given
``(c, A, sigma2)`` and computes the explicit constants that the bounds use.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from ._validation import check_int_vector, check_square, check_symmetric, check_vector
from .exceptions import AssumptionError, DimensionError, DomainError
from .factorize import WeightedJumpSet, factorize
from .rates import AffineRate, ClosedFormRate, ConstantRate, RateFunction
from .spectral import GeometrySolution, check_hurwitz, solve_lyapunov, spectral_summary

BALL_RTOL = 1e-12
FD_STEP = 1e-5
KAPPA0 = 1536.0


@dataclass(frozen=True)
class ProcessSpec:
    """Jump set, rates, scale and equilibrium of a density dependent process."""

    d: int
    jumps: tuple
    rates: tuple
    n: int
    c: np.ndarray
    delta0: float
    name: str = "process"

    def __post_init__(self):
        if len(self.jumps) != len(self.rates):
            raise DimensionError("one rate function is needed per jump")
        if len(set(self.jumps)) != len(self.jumps):
            raise ValueError("duplicate jump vectors")
        for J in self.jumps:
            if len(J) != self.d:
                raise DimensionError(f"jump {J} has wrong dimension")
            if not any(J):
                raise ValueError("the zero vector is not a jump")
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if self.delta0 <= 0:
            raise ValueError("delta0 must be positive")

    @classmethod
    def create(cls, jumps, rates, n, c, delta0, name="process"):
        c = check_vector(c, name="c")
        d = c.shape[0]
        js = tuple(tuple(int(v) for v in check_int_vector(J, d, "jump")) for J in jumps)
        return cls(d, js, tuple(rates), int(n), c, float(delta0), name)

    @property
    def jump_array(self) -> np.ndarray:
        return np.array(self.jumps, dtype=np.int64).reshape(-1, self.d)

    def with_n(self, n):
        return replace(self, n=int(n))

    def rate_matrix(self, x) -> np.ndarray:
        """Rates ``g^J(x)`` stacked along the last axis, shape ``x.shape[:-1] + (|J|,)``."""
        x = np.asarray(x, dtype=float)
        return np.stack([g(x) for g in self.rates], axis=-1)

    def to_dict(self):
        return {
            "name": self.name,
            "d": self.d,
            "n": self.n,
            "c": self.c.tolist(),
            "delta0": self.delta0,
            "jumps": [{"jump": list(J), "rate": g.to_dict()} for J, g in zip(self.jumps, self.rates)],
        }


@dataclass(frozen=True)
class ElementaryProcess:
    spec: ProcessSpec
    geom: GeometrySolution
    source: WeightedJumpSet


# ---------------------------------------------------------------------------
# drift, linearization, local covariance


def drift_field(spec: ProcessSpec, x) -> np.ndarray:
    """``F(x) = sum_J J g^J(x)``."""
    x = check_vector(x, spec.d, "x")
    if np.linalg.norm(x - spec.c) > spec.delta0 * (1 + 1e-9):
        warnings.warn("drift evaluated outside the delta0-ball around c", RuntimeWarning, stacklevel=2)
    return spec.rate_matrix(x) @ spec.jump_array.astype(float)


def _rate_gradient(g: RateFunction, x):
    if isinstance(g, (ConstantRate, AffineRate)):
        return g.gradient(x)
    if isinstance(g, ClosedFormRate) and g._grad is not None:
        return g.gradient(x)
    # central differences with one Richardson extrapolation
    d = x.shape[0]
    out = np.empty(d)
    for i in range(d):
        e = np.zeros(d)
        e[i] = FD_STEP
        d1 = (g(x + e) - g(x - e)) / (2 * FD_STEP)
        d2 = (g(x + 2 * e) - g(x - 2 * e)) / (4 * FD_STEP)
        out[i] = (4 * d1 - d2) / 3
    return out


def jacobian_at_equilibrium(spec: ProcessSpec) -> np.ndarray:
    """``A = DF(c)``; exact for constant and affine rates."""
    Js = spec.jump_array.astype(float)
    G = np.array([_rate_gradient(g, spec.c) for g in spec.rates])
    return Js.T @ G


def local_covariance(spec: ProcessSpec, x) -> np.ndarray:
    """``sigma2(x) = sum_J J J^T g^J(x)``."""
    x = check_vector(x, spec.d, "x")
    Js = spec.jump_array.astype(float)
    return np.einsum("k,ki,kj->ij", spec.rate_matrix(x), Js, Js)


def geometry_of(spec: ProcessSpec) -> GeometrySolution:
    return solve_lyapunov(jacobian_at_equilibrium(spec), local_covariance(spec, spec.c))


# ---------------------------------------------------------------------------
# assumptions


@dataclass
class AssumptionReport:
    G0: bool
    drift_at_c: float
    G1: bool
    G2: bool
    G2_note: str
    G3: bool
    epsilon0: float
    G4: bool
    witnesses: dict
    S2: bool
    S3: bool
    S4: bool
    sigma2_pd: bool

    @property
    def general(self) -> bool:
        return self.G0 and self.G1 and self.G2 and self.G3 and self.G4

    @property
    def elementary(self) -> bool:
        return self.G0 and self.G1 and self.S2 and self.S3 and self.S4

    def rows(self):
        out = []
        for key in ("G0", "G1", "G2", "G3", "G4", "S2", "S3", "S4"):
            out.append((key, bool(getattr(self, key))))
        return out


def _g4_witnesses(jumps, d, max_depth):
    targets = {tuple(int(i == j) for i in range(d)): j for j in range(d)}
    found = {}
    bound = max_depth * max(max(abs(v) for v in J) for J in jumps)
    parent = {tuple([0] * d): None}
    frontier = deque([(tuple([0] * d), 0)])
    while frontier and len(found) < d:
        v, depth = frontier.popleft()
        if depth == max_depth:
            continue
        for J in jumps:
            w = tuple(a + b for a, b in zip(v, J))
            if w in parent or max(abs(a) for a in w) > bound:
                continue
            parent[w] = (v, J)
            if w in targets and targets[w] not in found:
                path = []
                u = w
                while parent[u] is not None:
                    u, K = parent[u]
                    path.append(K)
                found[targets[w]] = list(reversed(path))
            frontier.append((w, depth + 1))
    return found


def check_assumptions(spec: ProcessSpec) -> AssumptionReport:
    """Per-assumption verdicts; never raises on a failed assumption."""
    d, c, r = spec.d, spec.c, spec.delta0
    F = spec.rate_matrix(c) @ spec.jump_array.astype(float)
    drift = float(np.max(np.abs(F)))
    G0 = drift <= 1e-10

    A = jacobian_at_equilibrium(spec)
    G1 = check_hurwitz(A)

    smooth = all(isinstance(g, (ConstantRate, AffineRate)) for g in spec.rates)
    G2 = True
    G2_note = "constant/affine rates" if smooth else "closed-form rates: C2 declared by caller"

    gc = spec.rate_matrix(c)
    if np.any(gc <= 0):
        eps0 = 0.0
    else:
        eps0 = min(g.inf_on_ball(c, r) / gc[k] for k, g in enumerate(spec.rates))
    G3 = eps0 > 0

    wit = _g4_witnesses(list(spec.jumps), d, 2 * d)
    G4 = len(wit) == d

    units = [tuple(int(i == j) for i in range(d)) for j in range(d)]
    jset = set(spec.jumps)
    S2 = all(e in jset and tuple(-v for v in e) in jset for e in units)
    S3 = all(isinstance(g, ConstantRate) for J, g in zip(spec.jumps, spec.rates) if J not in units)
    S4 = True
    for J, g in zip(spec.jumps, spec.rates):
        if J in units:
            if not isinstance(g, (ConstantRate, AffineRate)):
                S4 = False
            elif g.inf_on_ball(c, r) < 0.5 * float(g(c)) - 1e-12 * abs(float(g(c))):
                S4 = False
    S4 = S4 and S2

    try:
        sigma2_pd = spectral_summary(local_covariance(spec, c)).lambda_min > 0
    except Exception:
        sigma2_pd = False
    return AssumptionReport(G0, drift, G1, G2, G2_note, G3, float(eps0), G4, wit, S2, S3, S4, sigma2_pd)


# ---------------------------------------------------------------------------
# elementary processes


def build_elementary(c, A, sigma2, n=1, name="elementary") -> ElementaryProcess:
    """Elementary process with ``F(c) = 0``, ``DF(c) = A`` and covariance ``sigma2`` at ``c``.

    Rates are the factorization weights, except on the positive coordinate
    jumps where ``g^{e_i}(x) = w(e_i) + (A (x - c))_i``.  The locality radius
    is ``lambda_min(sigma2) / (8 ||A||)``.
    """
    A = check_square(A, "A")
    sigma2 = check_symmetric(sigma2, "sigma2")
    c = check_vector(c, A.shape[0], "c")
    d = c.shape[0]
    geom = solve_lyapunov(A, sigma2)
    ws = factorize(sigma2)
    units = {tuple(int(i == j) for i in range(d)): j for j in range(d)}
    jumps, rates = [], []
    for J, w in ws.entries:
        jumps.append(J)
        if J in units:
            i = units[J]
            rates.append(AffineRate.through(w, A[i], c))
        else:
            rates.append(ConstantRate(w))
    delta0 = spectral_summary(sigma2).lambda_min / (8.0 * np.linalg.norm(A, 2))
    spec = ProcessSpec.create(jumps, rates, n, c, delta0, name)
    return ElementaryProcess(spec, geom, ws)


# ---------------------------------------------------------------------------
# truncation and generators


def in_ball(geom: GeometrySolution, center, radius, X) -> bool:
    y = np.asarray(X, dtype=float) - np.asarray(center, dtype=float)
    return bool(y @ geom.SigmaInv @ y <= radius * radius * (1 + BALL_RTOL))


def truncated_rate(spec: ProcessSpec, geom: GeometrySolution, delta, J, X) -> float:
    """``n g^J(X/n)`` if ``X`` and ``X + J`` both lie in the ``n delta`` Sigma-ball, else 0."""
    J = tuple(int(v) for v in J)
    try:
        k = spec.jumps.index(J)
    except ValueError:
        return 0.0
    X = check_int_vector(X, spec.d, "X")
    nc, R = spec.n * spec.c, spec.n * delta
    if not (in_ball(geom, nc, R, X) and in_ball(geom, nc, R, X + np.array(J))):
        return 0.0
    return spec.n * float(spec.rates[k](X / spec.n))


def _lookup(h, X):
    key = tuple(int(v) for v in X)
    if callable(h):
        return h(np.array(key))
    try:
        return h[key]
    except KeyError:
        raise DomainError(f"h is not defined at {key}") from None


def apply_generator(spec: ProcessSpec, geom: GeometrySolution, delta, h, X) -> float:
    """``sum_J rate_J(X) (h(X + J) - h(X))`` for the truncated process."""
    X = check_int_vector(X, spec.d, "X")
    total = 0.0
    hX = None
    for J in spec.jumps:
        rate = truncated_rate(spec, geom, delta, J, X)
        if rate == 0.0:
            continue
        if hX is None:
            hX = _lookup(h, X)
        total += rate * (_lookup(h, X + np.array(J)) - hX)
    return total


def h0_function(spec: ProcessSpec, geom: GeometrySolution) -> Callable:
    nc = spec.n * spec.c

    def h0(X):
        y = np.asarray(X, dtype=float) - nc
        return float(y @ geom.SigmaInv @ y)

    return h0


def h0_generator_closed_form(spec: ProcessSpec, geom: GeometrySolution, X) -> float:
    """``n (F^T S^-1 y + y^T S^-1 F + Tr(S^-1 sigma2(x)))`` with ``y = X - nc``, untruncated."""
    X = np.asarray(X, dtype=float)
    x = X / spec.n
    y = X - spec.n * spec.c
    Fx = spec.rate_matrix(x) @ spec.jump_array.astype(float)
    Js = spec.jump_array.astype(float)
    s2x = np.einsum("k,ki,kj->ij", spec.rate_matrix(x), Js, Js)
    S = geom.SigmaInv
    return spec.n * float(Fx @ S @ y + y @ S @ Fx + np.trace(S @ s2x))


def forward_difference(h, w, j):
    w = np.asarray(w, dtype=np.int64)
    e = np.zeros_like(w)
    e[j] = 1
    return _lookup(h, w + e) - _lookup(h, w)


def second_difference(h, w, j, k):
    w = np.asarray(w, dtype=np.int64)
    ej = np.zeros_like(w)
    ej[j] = 1
    ek = np.zeros_like(w)
    ek[k] = 1
    return _lookup(h, w + ej + ek) - _lookup(h, w + ej) - _lookup(h, w + ek) + _lookup(h, w)


def difference_gradient(h, w):
    d = len(w)
    return [forward_difference(h, w, j) for j in range(d)]


def difference_hessian(h, w):
    d = len(w)
    return [[second_difference(h, w, j, k) for k in range(d)] for j in range(d)]


def apply_reduced_generator(geom: GeometrySolution, A, c, n, h, w) -> float:
    """``(n/2) Tr(sigma2 D2 h(w)) + Dh(w)^T A (w - nc)`` with forward differences."""
    A = geom.A if A is None else np.asarray(A, dtype=float)
    w = check_int_vector(w, geom.d, "w")
    D1 = np.array(difference_gradient(h, w), dtype=float)
    D2 = np.array(difference_hessian(h, w), dtype=float)
    y = w - n * np.asarray(c, dtype=float)
    return 0.5 * n * float(np.trace(geom.sigma2 @ D2)) + float(D1 @ A @ y)


def newton_remainder_E2(h, W, J):
    """``h(W+J) - h(W) - Dh(W).J - J^T D2h(W) J / 2 + sum_j J_j D2_jj h(W) / 2``.

    Arithmetic follows the values returned by ``h``: integer-valued ``h``
    gives an exact rational result (returned as a ``Fraction``).  ``J`` may
    also be an ``(m, d)`` array of jumps, in which case a list of ``m``
    remainders is returned and the differences at ``W`` are evaluated once.
    """
    from fractions import Fraction

    W = [int(v) for v in W]
    d = len(W)
    Jarr = np.asarray(J, dtype=np.int64)
    batch = Jarr.ndim == 2
    jumps = Jarr.reshape(-1, d).tolist()
    cache = {}

    def at(*steps):
        # h at W plus the given unit steps, each point evaluated once
        key = tuple(sorted(steps))
        if key not in cache:
            p = list(W)
            for j in steps:
                p[j] += 1
            cache[key] = _lookup(h, p)
        return cache[key]

    hW = at()
    D1 = [at(j) - hW for j in range(d)]
    D2 = [[at(j, k) - at(j) - at(k) + hW for k in range(d)] for j in range(d)]
    out = []
    for Jv in jumps:
        first = sum(D1[j] * Jv[j] for j in range(d))
        quad = sum(Jv[j] * D2[j][k] * Jv[k] for j in range(d) for k in range(d))
        diag = sum(Jv[j] * D2[j][j] for j in range(d))
        hWJ = _lookup(h, [w + j for w, j in zip(W, Jv)])
        if all(isinstance(v, (int, np.integer, Fraction)) for v in (hWJ, hW, first, quad, diag)):
            out.append(Fraction(int(hWJ) - int(hW) - int(first)) - Fraction(int(quad), 2) + Fraction(int(diag), 2))
        else:
            out.append(hWJ - hW - first - 0.5 * quad + 0.5 * diag)
    return out if batch else out[0]


# ---------------------------------------------------------------------------
# constants


@dataclass
class ConstantsLedger:
    """Explicit constants of the bounds, each tagged with its defining formula."""

    L0: float
    L1: float
    L2: float
    Lambda: float
    gamma: float
    J_max: float
    J_Sigma_max: float
    alpha1: float
    Lambda_bar: float
    gamma_bar: float
    mu_star: float
    epsilon0: float
    K_drift: float
    delta_drift: float
    delta_drift_d: float
    theta1: float
    theta1_terms: tuple
    psi_of_n: float
    n: int
    d: int
    K_2_4: float
    K_Sigma: float
    n_2_2: float
    alpha2: float
    kappa0: float
    K_coupling: float
    rho_sigma2: float
    rho_Sigma: float
    g_lower: tuple = None
    G_upper: tuple = None
    g_star: float = None
    unavailable: tuple = field(default_factory=tuple)

    @property
    def delta_max(self) -> float:
        return min(self.delta_drift, self.delta_drift_d)

    def psi(self, n) -> float:
        return psi_function(n, self.d * self.theta1)

    def rows(self):
        cite = {
            "L0": "max_J sup|g^J| / g^J(c) over B_delta0(c)",
            "L1": "max_J sup|Dg^J| / g^J(c) over B_delta0(c)",
            "L2": "max_J sup||D2 g^J|| / g^J(c) over B_delta0(c)",
            "Lambda": "sum_J g^J(c) |J|^2 = Tr(sigma2)",
            "gamma": "sum_J g^J(c) |J|^3",
            "J_max": "max_J |J|",
            "J_Sigma_max": "max_J |Sigma^-1/2 J|",
            "alpha1": "lambda_min(sigma2_Sigma) / 2",
            "Lambda_bar": "Lambda / d",
            "gamma_bar": "d^-3/2 gamma",
            "mu_star": "min_J epsilon0 g^J(c)",
            "epsilon0": "min_J inf_{B_delta0(c)} g^J / g^J(c)",
            "K_drift": "sqrt(2 L0 Tr(sigma2_Sigma) / (d alpha1))",
            "delta_drift": "delta0 / sqrt(lambda_max(Sigma))",
            "delta_drift_d": "alpha1 sqrt(lambda_min(Sigma)) / (4 d Lambda_bar L2 lambda_max(Sigma))",
            "theta1": "d theta1 = min{1/(3 J/d delta_drift), 1/(64 L0 rho(sigma2) rho(Sigma)), 1/(4 (J/d)^2)}",
            "psi_of_n": "4 sqrt(log n / (d theta1 n^(3/4)))",
            "K_2_4": "L0 exp(theta1 (K_drift + J_Sigma_max/d)^2)",
            "K_Sigma": "2 Lambda_bar K_2_4 / (d theta1 alpha1)",
            "n_2_2": "(J_Sigma_max / (d delta_drift))^(4/3)",
            "alpha2": "alpha1 / 128",
            "kappa0": "|h_B| <= kappa0 log n / alpha1",
            "K_coupling": "max{1, L1 (Lambda_bar/alpha1) sqrt(rho(Sigma)/lambda_min(Sigma))}",
            "g_star": "min_j min(g^{-e_j}(c), sum_{i: A_ij != 0} g^{e_i}(c))",
        }
        out = []
        for key, formula in cite.items():
            val = getattr(self, key)
            if val is None:
                continue
            out.append((key, float(val), formula))
        return out


def psi_function(n, d_theta1):
    n = np.asarray(n, dtype=float)
    return 4.0 * np.sqrt(np.log(n) / (d_theta1 * n**0.75))


def _theta1_terms(d, J_Sigma_max, delta_drift, L0, rho_s2, rho_S):
    Jd = J_Sigma_max / d
    t1 = 1.0 / (3.0 * Jd * delta_drift)
    t2 = 1.0 / (64.0 * L0 * rho_s2 * rho_S)
    t3 = 1.0 / (4.0 * Jd**2)
    return (float(t1), float(t2), float(t3))


def constants_ledger(spec: ProcessSpec, geom: GeometrySolution = None, report: AssumptionReport = None) -> ConstantsLedger:
    """Evaluate every constant that has an explicit formula."""
    if geom is None:
        geom = geometry_of(spec)
    if report is None:
        report = check_assumptions(spec)
    if not report.G3:
        raise AssumptionError("G3 fails: mu_star and the constants depending on it are undefined")
    d, c, r0 = spec.d, spec.c, spec.delta0
    gc = spec.rate_matrix(c)
    Js = spec.jump_array.astype(float)
    norms = np.linalg.norm(Js, axis=1)

    L0 = max(g.sup_abs_on_ball(c, r0) / gc[k] for k, g in enumerate(spec.rates))
    L1 = max(g.sup_grad_on_ball(c, r0) / gc[k] for k, g in enumerate(spec.rates))
    L2 = max(g.sup_hessian_on_ball(c, r0) / gc[k] for k, g in enumerate(spec.rates))
    Lambda = float(gc @ norms**2)
    gamma = float(gc @ norms**3)
    J_max = float(np.max(norms))
    J_Sigma_max = float(np.max(np.linalg.norm(Js @ geom.SigmaInvSqrt, axis=1)))
    eps0 = report.epsilon0
    mu_star = float(np.min(eps0 * gc))
    Lambda_bar = Lambda / d
    gamma_bar = gamma * d**-1.5

    sS = spectral_summary(geom.Sigma)
    rho_s2 = spectral_summary(geom.sigma2).rho
    alpha1 = geom.alpha1
    trace_s2S = float(np.trace(geom.sigma2_Sigma))
    K_drift = math.sqrt(2.0 * L0 * trace_s2S / (d * alpha1))
    delta_drift = r0 / math.sqrt(sS.lambda_max)
    if L2 == 0:
        delta_drift_d = math.inf
    else:
        delta_drift_d = alpha1 * math.sqrt(sS.lambda_min) / (d * 4.0 * Lambda_bar * L2 * sS.lambda_max)
    terms = _theta1_terms(d, J_Sigma_max, delta_drift, L0, rho_s2, sS.rho)
    theta1 = min(terms) / d
    psi_n = float(psi_function(spec.n, d * theta1)) if spec.n > 1 else math.inf

    K24 = L0 * math.exp(theta1 * (K_drift + J_Sigma_max / d) ** 2)
    K_Sigma = 2.0 * Lambda_bar * K24 / (d * theta1 * alpha1)
    n22 = (J_Sigma_max / d / delta_drift) ** (4.0 / 3.0)
    K_coup = max(1.0, L1 * (Lambda_bar / alpha1) * math.sqrt(sS.rho / sS.lambda_min))

    g_lower = G_upper = g_star = None
    if report.S2:
        units = [tuple(int(i == j) for i in range(d)) for j in range(d)]
        A = geom.A
        idx = {J: k for k, J in enumerate(spec.jumps)}
        g_lower = tuple(float(gc[idx[tuple(-v for v in e)]]) for e in units)
        G_upper = tuple(
            float(sum(gc[idx[units[i]]] for i in range(d) if A[i, j] != 0)) for j in range(d)
        )
        g_star = float(min(min(a, b) for a, b in zip(g_lower, G_upper)))

    unavailable = ("K^j (initial displacement)", "n_2.1 (needs k_*)", "n_3.5", "kappa1", "kappa2")
    return ConstantsLedger(
        L0=L0, L1=L1, L2=L2, Lambda=Lambda, gamma=gamma, J_max=J_max, J_Sigma_max=J_Sigma_max,
        alpha1=alpha1, Lambda_bar=Lambda_bar, gamma_bar=gamma_bar, mu_star=mu_star, epsilon0=eps0,
        K_drift=K_drift, delta_drift=delta_drift, delta_drift_d=delta_drift_d, theta1=theta1,
        theta1_terms=terms, psi_of_n=psi_n, n=spec.n, d=d, K_2_4=K24, K_Sigma=K_Sigma, n_2_2=n22,
        alpha2=alpha1 / 128.0, kappa0=KAPPA0, K_coupling=K_coup, rho_sigma2=rho_s2, rho_Sigma=sS.rho,
        g_lower=g_lower, G_upper=G_upper, g_star=g_star, unavailable=unavailable,
    )


# ---------------------------------------------------------------------------
# ready-made processes


def immigration_death(mu=1.0, n=1, delta0=None) -> ProcessSpec:
    """One-dimensional immigration-death: ``+1`` at rate ``mu``, ``-1`` at rate ``x``."""
    mu = float(mu)
    delta0 = mu / 2 if delta0 is None else delta0
    return ProcessSpec.create(
        [(1,), (-1,)], [ConstantRate(mu), AffineRate(0.0, [1.0])], n, [mu], delta0, "immigration-death"
    )


def bivariate_equilibrium_center(alpha1, alpha2, alpha12, mu1, mu2):
    return np.array([(alpha1 + alpha12) / mu1, (alpha2 + alpha12) / mu2])


def bivariate_immigration_death(alpha1, alpha2, alpha12, mu1, mu2, n, a=(1.0, 1.0), delta0=None) -> ProcessSpec:
    """Two-type immigration-death with paired immigration, translated by ``floor(n a)``.

    Immigration of single type-1, single type-2 and pairs at rates
    ``n alpha1``, ``n alpha2``, ``n alpha12``; per-capita death rates
    ``mu1``, ``mu2``.  The death rates are affine in ``x`` with an
    ``n``-dependent offset, so the ``ProcessSpec`` depends on ``n``.
    """
    a = np.asarray(a, dtype=float)
    chat = bivariate_equilibrium_center(alpha1, alpha2, alpha12, mu1, mu2)
    shift = np.floor(n * a)
    c = a + chat
    if delta0 is None:
        delta0 = 2.0 * float(np.min(chat)) / 3.0
    jumps = [(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1)]
    rates = [
        ConstantRate(alpha1),
        ConstantRate(alpha2),
        ConstantRate(alpha12),
        AffineRate(-mu1 * shift[0] / n, [mu1, 0.0]),
        AffineRate(-mu2 * shift[1] / n, [0.0, mu2]),
    ]
    return ProcessSpec.create(jumps, rates, n, c, delta0, "bivariate-immigration-death")


def bivariate_target(alpha1, alpha2, alpha12, mu1, mu2, a=(1.0, 1.0)):
    """``(c, A, sigma2)`` shared by the bivariate process and its elementary twin."""
    c = np.asarray(a, dtype=float) + bivariate_equilibrium_center(alpha1, alpha2, alpha12, mu1, mu2)
    A = np.diag([-float(mu1), -float(mu2)])
    sigma2 = np.array([[2.0 * (alpha1 + alpha12), alpha12], [alpha12, 2.0 * (alpha2 + alpha12)]])
    return c, A, sigma2


def as_mapping(values: Mapping):
    return dict(values)
