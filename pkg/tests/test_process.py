from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hurwitz, random_spd
from mjpstein.exceptions import DomainError
from mjpstein.process import (
    ProcessSpec,
    apply_generator,
    apply_reduced_generator,
    bivariate_immigration_death,
    build_elementary,
    check_assumptions,
    constants_ledger,
    drift_field,
    geometry_of,
    h0_function,
    h0_generator_closed_form,
    immigration_death,
    jacobian_at_equilibrium,
    local_covariance,
    newton_remainder_E2,
    psi_function,
    truncated_rate,
)
from mjpstein.rates import AffineRate, ConstantRate, logistic
from mjpstein.spectral import solve_lyapunov


def test_drift_immigration_death():
    s = immigration_death(mu=2.0, n=1)
    assert drift_field(s, [2.0]) == pytest.approx([0.0])
    assert drift_field(s, [1.5]) == pytest.approx([0.5])


def test_drift_warns_outside_ball():
    s = immigration_death(mu=1.0, n=1, delta0=0.5)
    with pytest.warns(RuntimeWarning):
        drift_field(s, [3.0])


def test_bivariate_process_linearization():
    s = bivariate_immigration_death(1, 1, 2, 1, 2, n=20)
    assert drift_field(s, s.c) == pytest.approx([0, 0], abs=1e-12)
    np.testing.assert_allclose(jacobian_at_equilibrium(s), np.diag([-1.0, -2.0]), atol=1e-14)
    np.testing.assert_allclose(local_covariance(s, s.c), [[6, 2], [2, 6]], atol=1e-13)


def test_jacobian_finite_differences_for_closed_form_rate():
    # logistic birth r x (1 - x/K) against linear death m x; equilibrium K (1 - m/r)
    r, K, m = 2.0, 10.0, 1.0
    birth = logistic(r, K, 0, 1)
    birth._grad = None
    c = K * (1 - m / r)
    s = ProcessSpec.create([(1,), (-1,)], [birth, AffineRate(0.0, [m])], 5, [c], 1.0)
    assert jacobian_at_equilibrium(s)[0, 0] == pytest.approx(r - 2 * r * c / K - m, abs=1e-8)


def test_local_covariance_immigration_death():
    s = immigration_death(mu=1.7)
    assert local_covariance(s, [1.7])[0, 0] == pytest.approx(3.4)


def test_assumptions_immigration_death():
    rep = check_assumptions(immigration_death(mu=1.0, delta0=0.5))
    assert rep.G0 and rep.G1 and rep.G3 and rep.G4
    assert rep.epsilon0 == pytest.approx(0.5)


def test_g4_fails_for_even_jumps():
    s = ProcessSpec.create([(2,), (-2,)], [ConstantRate(1.0), AffineRate(0.0, [1.0])], 1, [1.0], 0.5)
    rep = check_assumptions(s)
    assert not rep.G4
    assert not rep.general


def test_g4_witnesses_sum_to_unit_vectors():
    e = build_elementary([0.0, 0.0], [[-1.0, 0.3], [0.0, -1.0]], [[5.0, 4.5], [4.5, 5.0]])
    rep = check_assumptions(e.spec)
    assert rep.G4
    for j, seq in rep.witnesses.items():
        total = np.sum(np.array(seq), axis=0)
        assert tuple(total) == tuple(int(i == j) for i in range(2))


def test_build_elementary_scalar():
    e = build_elementary([0.0], [[-1.0]], [[2.0]])
    assert e.spec.jumps == ((-1,), (1,))
    up = e.spec.rates[1]
    assert float(up(np.array([0.3]))) == pytest.approx(0.7)
    assert float(e.spec.rates[0](np.array([0.3]))) == pytest.approx(1.0)
    assert e.spec.delta0 == pytest.approx(0.25)


def test_build_elementary_bivariate_target():
    A = np.diag([-1.0, -2.0])
    s2 = np.array([[6.0, 2.0], [2.0, 6.0]])
    e = build_elementary([3.0, 1.5], A, s2)
    np.testing.assert_allclose(jacobian_at_equilibrium(e.spec), A, atol=1e-10)
    np.testing.assert_allclose(local_covariance(e.spec, e.spec.c), s2, atol=1e-10)
    rep = check_assumptions(e.spec)
    assert rep.elementary and rep.epsilon0 >= 0.5
    for (J, w), g in zip(e.source.entries, e.spec.rates):
        assert float(g(e.spec.c)) == pytest.approx(w)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_elementary_round_trip(d, seed):
    rng = np.random.default_rng(seed)
    A, s2 = random_hurwitz(rng, d), random_spd(rng, d)
    c = rng.normal(size=d)
    e = build_elementary(c, A, s2)
    np.testing.assert_allclose(jacobian_at_equilibrium(e.spec), A, atol=1e-10)
    np.testing.assert_allclose(local_covariance(e.spec, c), s2, atol=1e-10 * np.abs(s2).max())
    rep = check_assumptions(e.spec)
    assert rep.G0 and rep.G1 and rep.S2 and rep.S3 and rep.S4
    assert rep.epsilon0 >= 0.5 - 1e-12


def _elem(n=20):
    e = build_elementary([3.0, 1.5], np.diag([-1.0, -2.0]), [[6.0, 2.0], [2.0, 6.0]], n=n)
    return e.spec, e.geom


def test_truncated_rate_cases():
    spec, geom = _elem(20)
    center = np.round(spec.n * spec.c).astype(int)
    k = spec.jumps.index((1, 1))
    assert truncated_rate(spec, geom, 0.5, (1, 1), center) == pytest.approx(spec.n * float(spec.rates[k](center / spec.n)))
    far = center + np.array([40, 0])
    assert truncated_rate(spec, geom, 0.2, (1, 0), far) == 0.0
    # walk to the last inside point along e1; its outward jump is cut
    X = center.copy()
    while geom.norm(X + np.array([1, 0]) - spec.n * spec.c) <= spec.n * 0.2:
        X = X + np.array([1, 0])
    assert truncated_rate(spec, geom, 0.2, (1, 0), X) == 0.0
    assert truncated_rate(spec, geom, 0.2, (-1, 0), X) > 0.0
    assert truncated_rate(spec, geom, 0.2, (5, 5), X) == 0.0


def test_generator_constant_and_missing_value():
    spec, geom = _elem(20)
    X = np.round(spec.n * spec.c).astype(int)
    assert apply_generator(spec, geom, 0.5, lambda Y: 3.0, X) == 0.0
    with pytest.raises(DomainError):
        apply_generator(spec, geom, 0.5, {tuple(X): 0.0}, X)


def test_generator_on_h0_matches_expansion(rng):
    spec, geom = _elem(50)
    h0 = h0_function(spec, geom)
    nc = spec.n * spec.c
    for _ in range(20):
        X = np.round(nc + rng.normal(size=2) * 3).astype(int)
        a = apply_generator(spec, geom, 0.5, h0, X)
        b = h0_generator_closed_form(spec, geom, X)
        assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


def test_reduced_generator_examples():
    geom = solve_lyapunov([[-1.0]], [[2.0]])
    n, c, mu = 10, np.array([1.0]), 1.0
    assert apply_reduced_generator(geom, None, c, n, lambda w: 7.0, [12]) == 0.0
    assert apply_reduced_generator(geom, None, c, n, lambda w: float(w[0]), [10]) == 0.0
    for w in (7, 10, 14):
        got = apply_reduced_generator(geom, [[-1.0]], c, n, lambda v: float((v[0] - 10) ** 2), [w])
        y = w - 10
        assert got == pytest.approx(2 * n * mu + (2 * y + 1) * (-y))


def _e2_oracle(h, W, J):
    """The defining formula, term by term, in exact rational arithmetic."""
    d = len(W)
    W, J = list(W), list(J)

    def at(*shifts):
        p = list(W)
        for s in shifts:
            for i in range(d):
                p[i] += s[i]
        return Fraction(h(np.array(p)))

    unit = [[int(i == j) for i in range(d)] for j in range(d)]
    first = sum(J[j] * (at(unit[j]) - at()) for j in range(d))
    second = [[at(unit[j], unit[k]) - at(unit[j]) - at(unit[k]) + at() for k in range(d)] for j in range(d)]
    quad = sum(J[j] * second[j][k] * J[k] for j in range(d) for k in range(d))
    diag = sum(J[j] * second[j][j] for j in range(d))
    return at(J) - at() - first - quad / 2 + diag / 2


def test_e2_linear_and_cubic():
    assert newton_remainder_E2(lambda w: int(3 * w[0] - 2 * w[1] + 5), [1, -2], [3, 1]) == 0
    cubic = lambda w: int(w[0]) ** 3  # noqa: E731
    assert newton_remainder_E2(cubic, [0], [2]) == _e2_oracle(cubic, [0], [2]) == 0
    assert newton_remainder_E2(cubic, [1], [3]) == _e2_oracle(cubic, [1], [3])
    assert newton_remainder_E2(cubic, [1], [3]) != 0


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 3),
    st.lists(st.integers(-4, 4), min_size=9, max_size=9),
    st.lists(st.integers(-3, 3), min_size=3, max_size=3),
    st.lists(st.integers(-3, 3), min_size=3, max_size=3),
)
def test_e2_vanishes_on_quadratics(d, m, W, J):
    M = np.array(m).reshape(3, 3)[:d, :d]
    M = M + M.T
    h = lambda w: int(w @ M @ w)  # noqa: E731
    assert newton_remainder_E2(h, W[:d], J[:d]) == 0
    assert _e2_oracle(h, W[:d], J[:d]) == 0


def test_constants_immigration_death():
    s = immigration_death(mu=1.0, n=100, delta0=0.5)
    L = constants_ledger(s)
    assert (L.L0, L.L1, L.L2, L.Lambda) == pytest.approx((1.5, 1.0, 0.0, 2.0))
    assert geometry_of(s).sigma2_Sigma[0, 0] == pytest.approx(2.0)
    assert L.alpha1 == pytest.approx(1.0)
    assert L.epsilon0 == pytest.approx(0.5)
    assert L.mu_star == pytest.approx(0.5)
    assert L.K_drift**2 == pytest.approx(2 * 1.5 * 2.0 / 1.0)
    assert L.psi_of_n == pytest.approx(4 * np.sqrt(np.log(100) / (L.theta1 * 100**0.75)))


def test_constants_elementary():
    spec, geom = _elem(40)
    L = constants_ledger(spec, geom)
    assert L.L2 == 0.0
    assert L.L0 <= 1.5
    assert L.theta1 == pytest.approx(min(L.theta1_terms) / spec.d)
    assert L.K_drift**2 == pytest.approx(2 * L.L0 * np.trace(geom.sigma2_Sigma) / (spec.d * L.alpha1))
    assert L.g_star == pytest.approx(min(min(a, b) for a, b in zip(L.g_lower, L.G_upper)))
    assert L.g_star <= L.Lambda
    assert psi_function(40, spec.d * L.theta1) == pytest.approx(L.psi_of_n)
    for key, val, _ in L.rows():
        assert val >= 0


def test_e2_batch_matches_single_calls():
    cubic = lambda w: int(w[0]) ** 3 - 2 * int(w[0] * w[1])  # noqa: E731
    jumps = np.array([[1, 0], [3, -2], [-1, 2]])
    batch = newton_remainder_E2(cubic, [1, 2], jumps)
    assert batch == [newton_remainder_E2(cubic, [1, 2], J) for J in jumps]
    assert batch == [_e2_oracle(cubic, [1, 2], list(J)) for J in jumps]
