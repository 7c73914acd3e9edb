import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcbundle.scalars import ONE, Q, Scalar
from qcbundle.sphere import (
    beta,
    canonical_map,
    canonical_map_check,
    canonical_preimage,
    frame_for_degree,
    graded_components,
    li_projection_contraction_data,
    random_sphere_element,
    spectral_projection,
    sphere_presentation,
    verify_frame,
    verify_frame_vanishing,
    z,
    zs,
)

from .strategies import raw_polynomials


def test_spectral_projection_examples():
    r = 1
    p = sphere_presentation(r)
    z1, z2 = z(r, 1), z(r, 2)
    assert spectral_projection(z1 + z1 * zs(r, 2), 1) == z1
    assert spectral_projection(p.one(), 0) == p.one()
    a = z1 * zs(r, 2) + (z2 * zs(r, 1)).scale(Q)
    assert spectral_projection(a, 0) == a


def test_contraction_data_components():
    r = 1
    p = sphere_presentation(r)
    assert li_projection_contraction_data(z(r, 1) + zs(r, 1)).support() == [-1, 1]
    assert li_projection_contraction_data(p.one()).support() == [0]
    g = li_projection_contraction_data(z(r, 1) * zs(r, 2) + z(r, 2))
    assert g.support() == [0, 1]
    assert g.reassemble() == z(r, 1) * zs(r, 2) + z(r, 2)


def test_small_frames():
    for r in (1, 2):
        p = sphere_presentation(r)
        assert frame_for_degree(r, 0).elements == [p.one()]
        assert frame_for_degree(r, 1).elements == [z(r, j) for j in range(1, r + 2)]
        assert frame_for_degree(r, -1).elements == [zs(r, j).scale(Q ** (r + 1 - j)) for j in range(1, r + 2)]
    f = frame_for_degree(1, 2)
    assert f.indices == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert f.elements == [z(1, i) * z(1, j) for i, j in f.indices]
    assert verify_frame(f)


@pytest.mark.parametrize("r", [1, 2, 3])
@pytest.mark.parametrize("n", [-4, -3, -2, -1, 0, 1, 2, 3, 4])
def test_frames_sum_to_one(r, n):
    f = frame_for_degree(r, n)
    assert len(f) == (r + 1) ** abs(n)
    assert verify_frame(f)


def test_left_frame_identity():
    for r in (1, 2, 3):
        p = sphere_presentation(r)
        total = sum((zs(r, j) * z(r, j)).scale(Q ** (2 * (r + 1 - j))) for j in range(1, r + 2))
        assert total == p.one()


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("n", [-2, -1, 1, 2])
def test_frame_vanishing(r, n):
    assert verify_frame_vanishing(frame_for_degree(r, n))


def test_broken_frame_detected():
    f = frame_for_degree(1, 1)
    f2 = type(f)(1, 1, f.indices, [f.elements[0], f.elements[1].scale(Q)])
    assert not verify_frame(f2)
    assert not verify_frame_vanishing(type(f)(1, 1, f.indices[:1], f.elements[:1]))


def test_beta_examples():
    r = 2
    p = sphere_presentation(r)
    assert beta(z(r, 2), 1) == z(r, 2).scale(Scalar.v_power(1))
    a = z(r, 1) * zs(r, 3)
    assert beta(a, 1) == a
    assert beta(zs(r, 1), -1) == zs(r, 1).scale(Scalar.v_power(1))
    assert beta(p.one(), 5) == p.one()


P2 = sphere_presentation(2)


@settings(max_examples=100, deadline=None)
@given(raw_polynomials(P2, 3, 3), raw_polynomials(P2, 3, 3), st.integers(-3, 3))
def test_grading_is_multiplicative(a, b, n):
    a, b = P2.element(a), P2.element(b)
    lhs = spectral_projection(a * b, n)
    rhs = P2.zero()
    for k, ak in graded_components(a).items():
        rhs = rhs + ak * spectral_projection(b, n - k)
    assert lhs == rhs
    assert spectral_projection(spectral_projection(a, n), n) == spectral_projection(a, n)
    total = sum(graded_components(a).values(), P2.zero())
    assert total == a


@settings(max_examples=100, deadline=None)
@given(raw_polynomials(P2, 3, 3), raw_polynomials(P2, 3, 3), st.integers(-2, 2))
def test_beta_is_automorphism_and_star_compatible(a, b, k):
    a, b = P2.element(a), P2.element(b)
    assert beta(a * b, k) == beta(a, k) * beta(b, k)
    assert beta(a, 0) == a
    assert beta(a, k).star() == beta(a.star(), -k)


def test_canonical_map_examples():
    r = 1
    p = sphere_presentation(r)
    one = p.one()
    assert canonical_preimage(one, 0, r) == [(one, one)]
    assert canonical_map(canonical_preimage(one, 0, r)) == {0: one}
    pre = canonical_preimage(one, 1, r)
    assert [y for _, y in pre] == [zs(r, 1), zs(r, 2)]
    assert canonical_map(pre) == {-1: one}
    assert canonical_map_check(r, [(z(r, 1), 2)]).passed


def test_canonical_map_random():
    rng = random.Random(11)
    for r in (1, 2):
        samples = [(random_sphere_element(r, rng, max_degree=2), rng.randint(-3, 3)) for _ in range(15)]
        assert canonical_map_check(r, samples).passed


def test_canonical_map_detects_wrong_preimage():
    r = 1
    pre = canonical_preimage(sphere_presentation(r).one(), 1, r)[:1]
    assert canonical_map(pre) != {-1: sphere_presentation(r).one()}


def test_generator_index_range():
    with pytest.raises(IndexError):
        z(1, 3)
    with pytest.raises(ValueError):
        sphere_presentation(0)


def test_random_element_is_reduced():
    rng = random.Random(2)
    a = random_sphere_element(2, rng)
    assert a == P2.element(a.terms)
    assert ONE
