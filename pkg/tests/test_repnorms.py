import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcbundle import repnorms as rn
from qcbundle import sphere as sph


@pytest.fixture(scope="module")
def rep():
    return rn.build_sphere_rep(1, 0.5, 20)


def test_relations_hold_on_interior(rep):
    v = rep.validate()
    assert v["max_residual"] < 1e-10
    assert set(v["residuals"]) >= {"unit"}


def test_parameter_validation():
    with pytest.raises(ValueError):
        rn.build_sphere_rep(1, 1.2, 20)
    with pytest.raises(ValueError):
        rn.build_sphere_rep(1, 0.5, 2)


def test_rank_two_representation_builds():
    r2 = rn.build_sphere_rep(2, 0.5, 8)
    assert r2.fiber_dim == 64
    assert r2.validate()["max_residual"] < 1e-10


def test_unit_and_generators_have_norm_one(rep):
    p = sph.sphere_presentation(1)
    assert math.isclose(rn.op_norm(p.one(), rep).value, 1.0, rel_tol=1e-12)
    for i in (1, 2):
        assert math.isclose(rn.op_norm(sph.z(1, i), rep).value, 1.0, rel_tol=1e-10)
    assert rn.op_norm(p.zero(), rep).value == 0


def test_unit_relation_is_represented_exactly(rep):
    # sum z_j z_j* = 1 as an algebra identity, so its representative is the identity
    s = sph.z(1, 1) * sph.zs(1, 1) + sph.z(1, 2) * sph.zs(1, 2)
    assert math.isclose(rn.op_norm(s, rep).value, 1.0, rel_tol=1e-12)


def test_element_from_other_sphere_rejected(rep):
    with pytest.raises(ValueError):
        rep.fourier_parts(sph.z(2, 1))


@pytest.mark.parametrize("q", [0.3, 0.8])
def test_cstar_identity(q):
    rr = rn.build_sphere_rep(1, q, 20)
    rng = random.Random(3)
    for _ in range(5):
        a = sph.random_sphere_element(1, rng, max_degree=2, n_terms=3)
        if a.is_zero():
            continue
        n = rn.op_norm(a, rr, check=False).value
        n2 = rn.op_norm(a.star() * a, rr, check=False).value
        assert abs(n2 - n * n) <= 1e-8 * n * n


def test_vertical_seminorm_of_generators(rep):
    for i in (1, 2):
        assert math.isclose(rn.seminorm_ver(sph.z(1, i), rep).value, 1.0, rel_tol=1e-10)
        assert math.isclose(rn.seminorm_ver(sph.z(1, i) ** 2, rep).value,
                            2 * rn.op_norm(sph.z(1, i) ** 2, rep).value, rel_tol=1e-10)
    assert rn.seminorm_ver(sph.z(1, 1) * sph.zs(1, 1), rep).value == 0


def test_vertical_element_is_exact():
    a = sph.z(1, 1) ** 2 + sph.zs(1, 2) + sph.z(1, 1) * sph.zs(1, 1)
    expected = (sph.z(1, 1) ** 2).scale(2) - sph.zs(1, 2)
    assert rn.vertical_element(a) == expected


def test_horizontal_seminorm_of_scalars_vanishes(rep):
    p = sph.sphere_presentation(1)
    assert rn.seminorm_hor(p.scalar(3), rep).value == 0
    assert rn.seminorm_tot(p.one(), rep).value == 0


def test_generators_are_holomorphic():
    # the derivation from the lowering direction kills the generators z_k
    for k in (1, 2):
        hol, anti = rn._legs(sph.z(1, k))
        assert anti.is_zero() or hol.is_zero()
        assert not (anti.is_zero() and hol.is_zero())


def test_horizontal_seminorm_of_generator(rep):
    v = rn.seminorm_hor(sph.z(1, 1), rep)
    assert v.converged
    assert "surrogate" in v.label
    assert v.value > 0


def test_twisted_leibniz_inequality(rep):
    rng = random.Random(11)
    for _ in range(6):
        a = sph.random_sphere_element(1, rng, max_degree=2, n_terms=2)
        b = sph.random_sphere_element(1, rng, max_degree=2, n_terms=2)
        lab = rn.seminorm_hor(a * b, rep, check=False).value
        rhs = (rn.seminorm_hor(a, rep, check=False).value * rn.op_norm(sph.beta(b, 1), rep, check=False).value
               + rn.op_norm(sph.beta(a, -1), rep, check=False).value * rn.seminorm_hor(b, rep, check=False).value)
        assert lab <= rhs + 1e-8


def test_legs_shift_circle_degree_uniformly():
    rng = random.Random(8)
    for n in (-2, -1, 0, 1, 2):
        a = sph.random_homogeneous_monomial(1, rng, n)
        hol, anti = rn._legs(a)
        assert set(sph.graded_components(hol)) <= {n + 2}
        assert set(sph.graded_components(anti)) <= {n - 2}


def test_horizontal_seminorm_circle_invariant(rep):
    a = sph.z(1, 1) * sph.zs(1, 2) + sph.z(1, 2) ** 2 + sph.zs(1, 1)
    base = rn.seminorm_hor(a, rep, check=False).value
    for t in np.linspace(0, 2 * math.pi, 16, endpoint=False):
        rot = rn.seminorm_hor(a, rep, check=False, lam=complex(math.cos(t), math.sin(t))).value
        assert abs(rot - base) <= 1e-8 * max(1.0, base)


def test_total_seminorm_circle_invariant(rep):
    a = sph.z(1, 2) ** 2 + sph.zs(1, 1)
    base = rn.seminorm_tot(a, rep, check=False).value
    for t in (0.3, 4.0):
        rot = rn.seminorm_tot(a, rep, check=False, lam=complex(math.cos(t), math.sin(t))).value
        assert abs(rot - base) <= 1e-8 * max(1.0, base)


def test_total_seminorm_star_invariant_and_positive_on_generators(rep):
    rng = random.Random(5)
    for _ in range(4):
        a = sph.random_sphere_element(1, rng, max_degree=2, n_terms=2)
        t1 = rn.seminorm_tot(a, rep, check=False).value
        t2 = rn.seminorm_tot(a.star(), rep, check=False).value
        assert abs(t1 - t2) <= 1e-8 * max(1.0, t1)
    assert rn.seminorm_tot(sph.z(1, 1), rep).value >= rn.seminorm_ver(sph.z(1, 1), rep).value - 1e-10


def test_circle_quotient_close_to_vertical(rep):
    for a in (sph.z(1, 1), sph.z(1, 2) ** 2 + sph.zs(1, 1)):
        exact = rn.seminorm_ver(a, rep, check=False).value
        quot = rn.circle_quotient_sup(a, rep)
        assert quot <= exact * (1 + 1e-9)
        assert quot >= 0.98 * exact


def test_cutoff_stability(rep):
    a = sph.z(1, 1) * sph.zs(1, 2) + sph.z(1, 2)
    v = rn.seminorm_tot(a, rep)
    lo, hi = v.values
    assert v.converged and abs(lo - hi) <= 0.01 * hi


def test_unsupported_rank_for_horizontal():
    r2 = rn.build_sphere_rep(2, 0.5, 8)
    with pytest.raises(rn.UnsupportedRank):
        rn.seminorm_hor(sph.z(2, 1), r2)
    with pytest.raises(rn.UnsupportedRank):
        rn.seminorm_tot(sph.z(2, 1), r2)


def test_rank_two_vertical_seminorm():
    r2 = rn.build_sphere_rep(2, 0.5, 8)
    assert math.isclose(rn.seminorm_ver(sph.z(2, 3), r2, check=False).value, 1.0, rel_tol=1e-10)


def test_seminorm_value_serializes(rep):
    d = rn.op_norm(sph.z(1, 1), rep).to_dict()
    assert d["kind"] == "norm" and len(d["cutoffs"]) == 2


def test_fourier_parts_match_generator_matrices(rep):
    parts = rep.fourier_parts(sph.z(1, 2))
    assert set(parts) == {0}
    assert np.allclose(parts[0], rep.fiber_generators[1])


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_projection_contraction_property(seed):
    rr = rn.build_sphere_rep(1, 0.5, 16)
    a = sph.random_sphere_element(1, random.Random(seed), max_degree=2, n_terms=3)
    full = rn.seminorm_ver(a, rr, check=False).value
    for x in sph.graded_components(a).values():
        assert rn.seminorm_ver(x, rr, check=False).value <= full + 1e-8
