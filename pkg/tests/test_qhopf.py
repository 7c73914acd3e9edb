import itertools
import random

import pytest

from qcbundle.qhopf import (
    act,
    antipode,
    antipode_sides,
    apply_form_operator,
    basis_vector,
    coassociativity_sides,
    context,
    coproduct,
    coproduct_raw,
    counit,
    counit_sides,
    delta_twisted,
    dolbeault,
    dolbeault_dagger,
    eps_q,
    eps_q_star,
    exterior_basis,
    form_add,
    l_element,
    m_element,
    random_form,
    random_uq_element,
    uq_presentation,
)
from qcbundle.scalars import ONE, ZERO, Q, Scalar
from qcbundle.sphere import random_homogeneous_monomial, random_sphere_element, z, zs

QI = Q.inverse()


def g(r, name):
    return uq_presentation(r).gen(name)


def w(p, *names):
    return p.word(names)


def test_coproduct_of_generators():
    p = uq_presentation(2)
    assert coproduct(g(2, "E1")) == {(w(p, "E1"), w(p, "K1")): ONE, (w(p, "K1^-1"), w(p, "E1")): ONE}
    kk = g(2, "K1") * g(2, "K2")
    assert coproduct(kk) == {(w(p, "K1", "K2"), w(p, "K1", "K2")): ONE}


def test_coproduct_of_m1_satisfies_axioms():
    m1 = m_element(2, 1)
    left, right = coassociativity_sides(m1)
    assert left == right
    a, b = counit_sides(m1)
    assert a == m1 == b


def test_antipode_and_counit_examples():
    p = uq_presentation(2)
    assert antipode(g(2, "F1")) == g(2, "F1").scale(-QI)
    assert antipode(g(2, "K1")) == g(2, "K1^-1")
    assert counit(g(2, "K1")) == ONE
    assert counit(g(2, "E1")) == ZERO
    assert antipode(g(2, "E1") * g(2, "E2")) == (g(2, "E2") * g(2, "E1")).scale(Q * Q)
    assert g(2, "K1") * g(2, "K1^-1") == p.one()


def test_m_and_l_elements():
    assert m_element(2, 2) == g(2, "E2")
    assert m_element(2, 1) == g(2, "E1") * g(2, "E2") - (g(2, "E2") * g(2, "E1")).scale(QI)
    assert l_element(3, 3) == g(3, "K3")
    assert l_element(3, 2) == g(3, "K2") * g(3, "K3")
    with pytest.raises(IndexError):
        m_element(2, 3)
    with pytest.raises(IndexError):
        l_element(2, 0)


@pytest.mark.parametrize("r", [1, 2])
def test_hopf_axioms_on_generators(r):
    for name in uq_presentation(r).letters:
        x = g(r, name)
        left, right = coassociativity_sides(x)
        assert left == right
        assert counit_sides(x) == (x, x)
        e = uq_presentation(r).scalar(counit(x))
        assert antipode_sides(x) == (e, e)


@pytest.mark.parametrize("r", [1, 2])
def test_hopf_axioms_random(r):
    rng = random.Random(100 + r)
    p = uq_presentation(r)
    for _ in range(25):
        x, raw = random_uq_element(r, rng)
        left, right = coassociativity_sides(x)
        assert left == right
        assert counit_sides(x) == (x, x)
        e = p.scalar(counit(x))
        assert antipode_sides(x) == (e, e)
        assert coproduct_raw(p, raw) == coproduct(x)


@pytest.mark.parametrize("r", [1, 2])
def test_antipode_is_anti_homomorphism_and_counit_multiplicative(r):
    rng = random.Random(7)
    for _ in range(15):
        x, _ = random_uq_element(r, rng, max_degree=2)
        y, _ = random_uq_element(r, rng, max_degree=2)
        assert antipode(x * y) == antipode(y) * antipode(x)
        assert counit(x * y) == counit(x) * counit(y)


def test_action_on_generators():
    for r in (1, 2):
        ctx = context(r)
        P = ctx.suq
        for j in range(1, r + 2):
            assert act(g(r, f"K{r}"), z(r, j)) == P.u(r + 1, j).scale(Scalar.v_power(-1))
            assert act(g(r, f"E{r}"), z(r, j)) == P.u(r, j).scale(-QI)
            assert act(g(r, f"F{r}"), z(r, j)).is_zero()


@pytest.mark.parametrize("r", [1, 2])
def test_highest_weight_vanishing(r):
    ctx = context(r)
    for i in range(1, r + 1):
        for j in range(1, r + 2):
            assert act(g(r, f"F{i}"), z(r, j)).is_zero()
            assert act(g(r, f"E{i}"), zs(r, j)).is_zero()
            assert ctx.dj(i, z(r, j)).is_zero()
            assert ctx.dj_dagger(i, zs(r, j)).is_zero()


def test_dj_on_conjugate_generators_r1():
    ctx = context(1)
    P = ctx.suq
    # d_1 = d_{K_1 F_1}: F_1 moves row 1 to row 2
    for k in (1, 2):
        got = ctx.dj(1, zs(1, k))
        assert not got.is_zero()
        assert got == act(g(1, "K1") * g(1, "F1"), ctx.embed(zs(1, k)))
    # by hand: z1* = -q^-1 u12, z2* = u11, d_{F1}(u1j) = -q u2j, K1 scales row 2 by q^-1/2
    assert ctx.dj(1, zs(1, 1)) == P.u(2, 2).scale(Scalar.v_power(-1))
    assert ctx.dj(1, zs(1, 2)) == P.u(2, 1).scale(-Scalar.v_power(1))


@pytest.mark.parametrize("r", [1, 2])
def test_action_respects_relations(r):
    ctx = context(r)
    rng = random.Random(r)
    P = ctx.suq
    for _ in range(100):
        word = tuple(rng.randrange(len(P.letters)) for _ in range(rng.randint(0, 4)))
        for letter in range(len(ctx.uq.letters)):
            eta = ctx.uq.element({(letter,): ONE})
            assert ctx.act_letter_word(letter, word) == ctx.act_terms(eta, P.nf_word(word))


@pytest.mark.parametrize("r", [1, 2])
def test_action_star_compatibility(r):
    ctx = context(r)
    P = ctx.suq
    rng = random.Random(9)
    for _ in range(20):
        eta, _ = random_uq_element(r, rng, max_degree=2, n_terms=2)
        x = P.element({tuple(rng.randrange(len(P.letters)) for _ in range(rng.randint(0, 2))): ONE})
        assert ctx.act(eta, x.star()) == ctx.act(antipode(eta.star()), x).star()


@pytest.mark.parametrize("r", [1, 2])
def test_action_is_module_and_unital(r):
    ctx = context(r)
    P = ctx.suq
    rng = random.Random(4)
    for _ in range(20):
        a, _ = random_uq_element(r, rng, max_degree=2, n_terms=2)
        b, _ = random_uq_element(r, rng, max_degree=2, n_terms=2)
        x = P.element({tuple(rng.randrange(len(P.letters)) for _ in range(3)): ONE})
        assert ctx.act(a * b, x) == ctx.act(a, ctx.act(b, x))
        assert ctx.act(a, P.one()) == P.scalar(counit(a))


def test_exterior_examples():
    assert eps_q(1, basis_vector()) == basis_vector(1)
    assert eps_q(2, basis_vector(1)) == {frozenset({1, 2}): (-Q).inverse()}
    assert eps_q(1, basis_vector(1)) == {}
    with pytest.raises(IndexError):
        eps_q(3, basis_vector(), r=2)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_exterior_commutation_and_adjoint(r):
    basis = exterior_basis(r)
    for i, j in itertools.combinations(range(1, r + 1), 2):
        for I in basis:
            e = {I: ONE}
            lhs = eps_q(i, eps_q(j, e))
            rhs = {k: -Q * c for k, c in eps_q(j, eps_q(i, e)).items()}
            assert lhs == rhs
    for j in range(1, r + 1):
        for I, J in itertools.product(basis, repeat=2):
            assert eps_q(j, {I: ONE}).get(J, ZERO) == eps_q_star(j, {J: ONE}).get(I, ZERO)


def test_dolbeault_of_unit_vanishes():
    ctx = context(2)
    one = {frozenset(): ctx.suq.one()}
    assert dolbeault(one, ctx) == {}
    assert dolbeault_dagger(one, ctx) == {}


@pytest.mark.parametrize("r", [1, 2])
def test_dolbeault_squares_to_zero(r):
    ctx = context(r)
    rng = random.Random(31 + r)
    for _ in range(20):
        form = random_form(ctx, rng)
        assert dolbeault(dolbeault(form, ctx), ctx) == {}
        assert dolbeault_dagger(dolbeault_dagger(form, ctx), ctx) == {}


def test_delta_of_generators_only_antiholomorphic():
    for r in (1, 2):
        ctx = context(r)
        for k in range(1, r + 2):
            legs = delta_twisted(z(r, k), ctx)
            assert all(legs[(j, "hol")].is_zero() for j in range(1, r + 1))
            assert any(not legs[(j, "anti")].is_zero() for j in range(1, r + 1))


@pytest.mark.parametrize("r", [1, 2])
def test_twisted_leibniz(r):
    ctx = context(r)
    P = ctx.suq
    rng = random.Random(40 + r)
    for _ in range(30):
        n = rng.randint(-2, 2)
        x = ctx.embed(random_homogeneous_monomial(r, rng, n))
        y = P.element({tuple(rng.randrange(len(P.letters)) for _ in range(rng.randint(0, 2))): ONE})
        twist = Q ** (-n)
        for j in range(1, r + 1):
            assert ctx.dj(j, x * y) == (x * ctx.dj(j, y)).scale(twist) + ctx.dj(j, x) * y
            assert ctx.dj_dagger(j, x * y) == (x * ctx.dj_dagger(j, y)).scale(twist) + ctx.dj_dagger(j, x) * y


@pytest.mark.parametrize("r", [1, 2])
def test_delta_twisted_product_rule(r):
    ctx = context(r)
    rng = random.Random(50 + r)
    for _ in range(15):
        n = rng.randint(-2, 2)
        a = random_homogeneous_monomial(r, rng, n)
        b = random_sphere_element(r, rng, max_degree=2)
        lhs = delta_twisted(a * b, ctx)
        da, db = delta_twisted(a, ctx), delta_twisted(b, ctx)
        pa, pb = ctx.embed(a), ctx.embed(b)
        for leg in lhs:
            assert lhs[leg] == da[leg] * pb + (pa * db[leg]).scale(Q ** (-n))


@pytest.mark.parametrize("r", [1, 2])
def test_spectral_subspace_eigenvalue(r):
    ctx = context(r)
    k = g(r, f"K{r}")
    letters = range(2 * (r + 1))
    for d in range(4):
        for word in itertools.product(letters, repeat=d):
            a = ctx.sphere.element({word: ONE})
            if a.is_zero():
                continue
            n = ctx.sphere.word_degree(word)
            assert ctx.act(k, a) == ctx.embed(a).scale(Scalar.v_power(-n))


@pytest.mark.parametrize("r", [1, 2])
def test_frame_vanishing_of_generators(r):
    ctx = context(r)
    right, left = {}, {}
    for j in range(1, r + 2):
        for leg, val in delta_twisted(zs(r, j), ctx).items():
            t = ctx.embed(z(r, j)) * val
            right[leg] = right[leg] + t if leg in right else t
        for leg, val in delta_twisted(z(r, j), ctx).items():
            t = (ctx.embed(zs(r, j)) * val).scale(Q ** (2 * (r + 1 - j)))
            left[leg] = left[leg] + t if leg in left else t
    assert all(v.is_zero() for v in right.values())
    assert all(v.is_zero() for v in left.values())


def test_form_operator_application():
    ctx = context(1)
    ops = delta_twisted(z(1, 1), ctx)
    form = {frozenset({1}): ctx.suq.one()}
    out = apply_form_operator(ops, form)
    assert set(out) == {frozenset()}
    assert form_add(out, {I: -x for I, x in out.items()}) == {}


def test_to_sphere_inverts_embedding():
    ctx = context(1)
    rng = random.Random(3)
    for _ in range(10):
        a = random_sphere_element(1, rng)
        assert ctx.to_sphere(ctx.embed(a)) == a
