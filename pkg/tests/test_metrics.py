import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcbundle import metrics as mt


def two_point(c: float):
    """Functions on two points; L(x) = c |x_1 - x_2|."""
    span = mt.OperatorSystemSpan([np.array([1.0, 1.0]), np.array([1.0, -1.0])])
    L = mt.HermitianSlipNorm([[np.array([0.0]), np.array([2.0 * c])]])
    mu = mt.state_values(span, mt.StateSpec.point(2, 0))
    nu = mt.state_values(span, mt.StateSpec.point(2, 1))
    return span, L, mu, nu


def test_span_validation():
    with pytest.raises(ValueError):
        mt.OperatorSystemSpan([np.array([[0, 1j], [0, 0]])])
    with pytest.raises(ValueError):
        mt.OperatorSystemSpan([np.array([1.0, -1.0])])
    span = mt.OperatorSystemSpan([np.eye(2), np.diag([1.0, -1.0])])
    assert np.allclose(span.identity_coeffs, [1, 0])


def test_state_validation():
    with pytest.raises(ValueError):
        mt.StateSpec(vector=np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        mt.StateSpec(density=np.diag([1.0, 1.0]))
    with pytest.raises(ValueError):
        mt.StateSpec()
    rho = mt.StateSpec(density=np.diag([0.25, 0.75]))
    assert math.isclose(rho(np.diag([1.0, 3.0])), 2.5)


def test_equal_states_have_zero_distance():
    _, L, mu, _ = two_point(1.0)
    res = mt.mk_distance(mu, mu, L)
    assert res.bound == 0 and not res.infinite


@pytest.mark.parametrize("c", [0.25, 1.0, 3.0])
def test_two_point_distance(c):
    _, L, mu, nu = two_point(c)
    res = mt.mk_distance(mu, nu, L)
    assert abs(res.bound - 1 / c) < 1e-9
    w = np.array(res.witness)
    assert L(w) <= 1 + 1e-12


def test_infinite_flag_when_seminorm_misses_direction():
    span = mt.OperatorSystemSpan([np.ones(3), np.array([1.0, 0, 0]), np.array([0, 1.0, 0])])
    # L ignores the second basis element entirely
    L = mt.HermitianSlipNorm([[np.zeros(1), np.ones(1), np.zeros(1)]])
    mu = mt.state_values(span, mt.StateSpec.point(3, 1))
    nu = mt.state_values(span, mt.StateSpec.point(3, 2))
    res = mt.mk_distance(mu, nu, L)
    assert res.infinite and res.bound == math.inf


def test_scaling_covariance():
    _, L, mu, nu = two_point(1.0)
    base = mt.mk_distance(mu, nu, L).bound
    assert math.isclose(mt.mk_distance(mu, nu, L.scaled(4.0)).bound, base / 4, rel_tol=1e-9)


def _three_state_setup():
    rng = np.random.default_rng(5)
    n = 4
    mats = [np.eye(n)]
    for _ in range(4):
        a = rng.normal(size=(n, n))
        mats.append(a + a.T)
    d = np.diag(np.arange(n, dtype=float))
    L = mt.HermitianSlipNorm.from_operators([d @ m - m @ d for m in mats])
    span = mt.OperatorSystemSpan(mats)
    states = [mt.state_values(span, mt.StateSpec.point(n, k)) for k in range(3)]
    return L, states


def test_symmetry_and_triangle_inequality():
    L, (a, b, c) = _three_state_setup()
    dab = mt.mk_distance(a, b, L).bound
    dba = mt.mk_distance(b, a, L).bound
    assert math.isclose(dab, dba, rel_tol=1e-6)
    dbc = mt.mk_distance(b, c, L).bound
    dac = mt.mk_distance(a, c, L).bound
    # lower bounds from an optimizer; allow a small optimization slack
    assert dac <= (dab + dbc) * (1 + 1e-3)


def test_witness_certifies_bound():
    L, (a, b, _) = _three_state_setup()
    res = mt.mk_distance(a, b, L)
    w = np.array(res.witness)
    assert L(w) <= 1 + 1e-12
    assert math.isclose(abs((a - b) @ w), res.bound, rel_tol=1e-12)


def test_kernel_of_slip_norm():
    _, L, _, _ = two_point(2.0)
    ker = L.kernel()
    assert ker.shape == (2, 1)
    assert np.allclose(np.abs(ker[:, 0]), [1, 0])


def test_subgradient_matches_finite_difference():
    L, _ = _three_state_setup()
    c = np.array([0.3, -1.0, 0.5, 0.2, 0.7])
    g = L.subgradient(c)
    h = 1e-7
    fd = np.array([(L(c + h * e) - L(c - h * e)) / (2 * h) for e in np.eye(5)])
    assert np.allclose(g, fd, atol=1e-5)


def test_callable_slip_norm_agrees():
    L, (a, b, _) = _three_state_setup()
    wrapped = mt.CallableSlipNorm(L, L.dim)
    c = np.array([0.1, 0.4, -0.3, 0.9, 0.2])
    assert math.isclose(wrapped(c), L(c))
    assert mt.mk_distance(a, b, wrapped).bound <= mt.mk_distance(a, b, L).bound * (1 + 1e-3) + 1e-9


def test_circle_distance_against_lp_oracle():
    _, L, point = mt.circle_trig_span(6, grid=1024)
    d = mt.mk_distance(point(0.0), point(math.pi / 2), L).bound
    oracle = mt.circle_lp_oracle(6, 0.0, math.pi / 2, grid=1024)
    assert d <= oracle + 1e-6
    assert d >= 0.98 * oracle


# total boundedness diagnostic ---------------------------------------------------


def test_net_for_scalars_only():
    rep = mt.ball_total_boundedness([np.eye(2)], lambda x: 0.0, 0.1)
    assert rep.net_size == 1 and rep.max_distance == 0 and not rep.unbounded
    assert "not a proof" in rep.label


@pytest.mark.parametrize("c,eps", [(1.0, 0.1), (2.0, 0.05), (0.5, 0.25)])
def test_two_point_net_size(c, eps):
    span, _, _, _ = two_point(c)
    mats = [np.diag(b) for b in span.basis]
    rep = mt.ball_total_boundedness(mats, lambda x: c * abs(x[0, 0] - x[1, 1]), eps, sample_budget=2000)
    # the ball modulo scalars is a segment of operator-norm length 1/c
    assert math.floor(1 / (2 * c * eps)) <= rep.net_size <= math.ceil(1 / (c * eps)) + 1
    assert rep.max_distance <= eps


def test_net_flags_unbounded_ball():
    rep = mt.ball_total_boundedness([np.eye(2), np.diag([1.0, -1.0])], lambda x: 0.0, 0.1, sample_budget=10)
    assert rep.unbounded


def test_net_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        mt.ball_total_boundedness([np.eye(2)], lambda x: 0.0, 0.0)


def test_li_estimate_check():
    d = np.diag([0.0, 1.0, 2.0])
    L = lambda x: np.linalg.norm(d @ x - x @ d, 2)
    comps = {1: np.diag([1.0, 1.0], 1), -1: np.diag([2.0, 0.5], -1), 0: np.diag([1.0, 2.0, 3.0])}
    rep = mt.li_estimate_check(comps, L)
    assert rep.passed
    assert rep.components[0] == 0
    assert rep.to_dict()["full"] == rep.full


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-5, 5), st.floats(-5, 5))
def test_two_point_distance_property(c, x, y):
    _, L, mu, nu = two_point(c)
    # mixtures p delta_0 + (1-p) delta_1 lie at distance |p - p'| / c
    p, pp = 1 / (1 + math.exp(-x)), 1 / (1 + math.exp(-y))
    a, b = p * mu + (1 - p) * nu, pp * mu + (1 - pp) * nu
    res = mt.mk_distance(a, b, L, restarts=1, iterations=50)
    assert abs(res.bound - abs(p - pp) / c) < 1e-9 * max(1.0, 1 / c)
