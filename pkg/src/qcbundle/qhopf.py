"""Quantized enveloping algebra of su(r+1), its action on SU_q(r+1), and q-Dolbeault operators.

Conventions:

* ``Delta(K) = K (x) K``, ``Delta(E) = E (x) K + K^-1 (x) E``, ``Delta(F) = F (x) K + K^-1 (x) F``;
* ``S(K) = K^-1``, ``S(E) = -q E``, ``S(F) = -q^-1 F``, ``eps(E) = eps(F) = 0``;
* ``E_i* = F_i`` and ``K_i* = K_i``;
* the action on the coordinate algebra satisfies ``d_{ab} = d_a d_b`` and
  ``d_eta(xy) = d_{eta(2)}(x) d_{eta(1)}(y)``.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cache

from .ncalg import (
    AlgebraElement,
    InconclusiveError,
    RewritingPresentation,
    Terms,
    Word,
    _scaled_into,
    add_terms,
    check_local_confluence,
)
from .scalars import ONE, ZERO, Q, Scalar
from .sphere import sphere_presentation
from .suq import SUqPresentation, suq_presentation

Tensor = dict[tuple[Word, ...], Scalar]
Subset = frozenset[int]
ExteriorVector = dict[Subset, Scalar]

DEFAULT_UQ_BOUND = 6


# ---------------------------------------------------------------------------
# presentation


class UqPresentation(RewritingPresentation):
    """U_q(su(r+1)); letters F1..Fr < K1^-1 < K1 < ... < Kr^-1 < Kr < E1..Er."""

    r: int

    def word_str(self, w: Word) -> str:
        if not w:
            return "1"
        parts = []
        for x, grp in itertools.groupby(w):
            k = len(list(grp))
            name = self.letters[x]
            if name.endswith("^-1"):
                base = name[:-3]
                parts.append(f"{base}^-{k}")
            else:
                parts.append(name if k == 1 else f"{name}^{k}")
        return " ".join(parts)


def _cartan(i: int, j: int) -> int:
    if i == j:
        return 2
    if abs(i - j) == 1:
        return -1
    return 0


def uq_letters(r: int) -> tuple[list[str], dict[str, int]]:
    names = [f"F{i}" for i in range(1, r + 1)]
    for i in range(1, r + 1):
        names += [f"K{i}^-1", f"K{i}"]
    names += [f"E{i}" for i in range(1, r + 1)]
    return names, {s: k for k, s in enumerate(names)}


def uq_rules(r: int) -> dict[Word, dict[Word, Scalar]]:
    names, ix = uq_letters(r)
    E = lambda i: ix[f"E{i}"]
    F = lambda i: ix[f"F{i}"]
    K = lambda i: ix[f"K{i}"]
    Ki = lambda i: ix[f"K{i}^-1"]
    v = Scalar.v_power
    qq = Q + Q.inverse()
    rules: dict[Word, dict[Word, Scalar]] = {}
    idx = range(1, r + 1)
    for i in idx:
        rules[(K(i), Ki(i))] = {(): ONE}
        rules[(Ki(i), K(i))] = {(): ONE}
    ks = [x for i in idx for x in (Ki(i), K(i))]
    for a in ks:
        for b in ks:
            if a > b and (a, b) not in rules:
                rules[(a, b)] = {(b, a): ONE}
    for i in idx:
        for j in idx:
            c = _cartan(i, j)
            rules[(E(j), K(i))] = {(K(i), E(j)): v(-c)}
            rules[(E(j), Ki(i))] = {(Ki(i), E(j)): v(c)}
            rules[(K(i), F(j))] = {(F(j), K(i)): v(-c)}
            rules[(Ki(i), F(j))] = {(F(j), Ki(i)): v(c)}
            rhs = {(F(j), E(i)): ONE}
            if i == j:
                inv = (Q - Q.inverse()).inverse()
                rhs[(K(i), K(i))] = inv
                rhs[(Ki(i), Ki(i))] = -inv
            rules[(E(i), F(j))] = rhs
    for i in idx:
        for j in idx:
            if j > i + 1:
                rules[(E(j), E(i))] = {(E(i), E(j)): ONE}
                rules[(F(j), F(i))] = {(F(i), F(j)): ONE}
            elif j == i + 1:
                for X in (E, F):
                    rules[(X(j), X(i), X(i))] = {(X(i), X(j), X(i)): qq, (X(i), X(i), X(j)): -ONE}
                    rules[(X(j), X(j), X(i))] = {(X(j), X(i), X(j)): qq, (X(i), X(j), X(j)): -ONE}
    return rules


@cache
def uq_presentation(r: int, bound: int = DEFAULT_UQ_BOUND) -> UqPresentation:
    names, ix = uq_letters(r)
    star = []
    for s in names:
        if s.startswith("E"):
            star.append(ix["F" + s[1:]])
        elif s.startswith("F"):
            star.append(ix["E" + s[1:]])
        else:
            star.append(ix[s])
    p = UqPresentation(f"U_q(su({r + 1}))", names, star, uq_rules(r))
    p.r = r
    report = check_local_confluence(p, bound, complete=True)
    if not report.confluent:  # pragma: no cover
        raise RuntimeError(f"U_q completion did not close at degree {bound}: {report.unresolved[:5]}")
    p.completion_report = report
    return p


def _kind(p: UqPresentation, x: int) -> tuple[str, int]:
    s = p.letters[x]
    if s.endswith("^-1"):
        return "Kinv", int(s[1:-3])
    return s[0], int(s[1:])


# ---------------------------------------------------------------------------
# Hopf structure


def _letter_coproduct(p: UqPresentation, x: int) -> Tensor:
    kind, i = _kind(p, x)
    if kind in ("K", "Kinv"):
        return {((x,), (x,)): ONE}
    k = p.letter(f"K{i}")
    ki = p.letter(f"K{i}^-1")
    return {((x,), (k,)): ONE, ((ki,), (x,)): ONE}


def tensor_add(acc: Tensor, t: Mapping[tuple[Word, ...], Scalar], c: Scalar = ONE) -> None:
    for k, v in t.items():
        add_terms(acc, k, v * c)


def tensor_mul(p: RewritingPresentation, a: Tensor, b: Tensor) -> Tensor:
    out: Tensor = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            legs = [p.multiply_words(x, y) for x, y in zip(ka, kb)]
            c0 = ca * cb
            for combo in itertools.product(*(leg.items() for leg in legs)):
                c = c0
                for _, s in combo:
                    c = c * s
                add_terms(out, tuple(w for w, _ in combo), c)
    return out


def _coproduct_word(p: UqPresentation, w: Word) -> Tensor:
    cache = p.__dict__.setdefault("_copro_cache", {})
    hit = cache.get(w)
    if hit is not None:
        return hit
    if not w:
        out: Tensor = {((), ()): ONE}
    else:
        out = tensor_mul(p, _coproduct_word(p, w[:-1]), _letter_coproduct(p, w[-1]))
    cache[w] = out
    return out


def coproduct(eta: AlgebraElement) -> Tensor:
    p = eta.presentation
    out: Tensor = {}
    for w, c in eta.terms.items():
        tensor_add(out, _coproduct_word(p, w), c)
    return out


def coproduct_raw(p: UqPresentation, raw: Mapping[Word, Scalar]) -> Tensor:
    """Coproduct of an unreduced polynomial computed letter by letter."""
    out: Tensor = {}
    for w, c in raw.items():
        t: Tensor = {((), ()): ONE}
        for x in w:
            t = tensor_mul(p, t, _letter_coproduct(p, x))
        tensor_add(out, t, c)
    return out


def _counit_word(p: UqPresentation, w: Word) -> Scalar:
    for x in w:
        if _kind(p, x)[0] in ("E", "F"):
            return ZERO
    return ONE


def counit(eta: AlgebraElement) -> Scalar:
    p = eta.presentation
    out = ZERO
    for w, c in eta.terms.items():
        out = out + c * _counit_word(p, w)
    return out


def _letter_antipode(p: UqPresentation, x: int) -> Terms:
    kind, i = _kind(p, x)
    if kind == "K":
        return {(p.letter(f"K{i}^-1"),): ONE}
    if kind == "Kinv":
        return {(p.letter(f"K{i}"),): ONE}
    if kind == "E":
        return {(x,): -Q}
    return {(x,): -Q.inverse()}


def _antipode_word(p: UqPresentation, w: Word) -> Terms:
    out: Terms = {(): ONE}
    for x in w:
        # S(w x) = S(x) S(w)
        out = p.multiply_terms(_letter_antipode(p, x), out)
    return out


def antipode(eta: AlgebraElement) -> AlgebraElement:
    p = eta.presentation
    out: Terms = {}
    for w, c in eta.terms.items():
        _scaled_into(out, _antipode_word(p, w), c)
    return AlgebraElement(p, out, eta.raw_degree)


def tensor_map(p: UqPresentation, t: Tensor, leg: int, f) -> Tensor:
    """Apply a linear map ``word -> Terms`` on one leg."""
    out: Tensor = {}
    for key, c in t.items():
        for w, s in f(key[leg]).items():
            add_terms(out, key[:leg] + (w,) + key[leg + 1 :], c * s)
    return out


def coassociativity_sides(eta: AlgebraElement) -> tuple[Tensor, Tensor]:
    p = eta.presentation
    d = coproduct(eta)
    left: Tensor = {}
    right: Tensor = {}
    for (a, b), c in d.items():
        for (a1, a2), s in _coproduct_word(p, a).items():
            add_terms(left, (a1, a2, b), c * s)
        for (b1, b2), s in _coproduct_word(p, b).items():
            add_terms(right, (a, b1, b2), c * s)
    return left, right


def counit_sides(eta: AlgebraElement) -> tuple[AlgebraElement, AlgebraElement]:
    p = eta.presentation
    left: Terms = {}
    right: Terms = {}
    for (a, b), c in coproduct(eta).items():
        add_terms(left, b, c * _counit_word(p, a))
        add_terms(right, a, c * _counit_word(p, b))
    return AlgebraElement(p, left), AlgebraElement(p, right)


def antipode_sides(eta: AlgebraElement) -> tuple[AlgebraElement, AlgebraElement]:
    """m(S (x) id)Delta(eta) and m(id (x) S)Delta(eta)."""
    p = eta.presentation
    left: Terms = {}
    right: Terms = {}
    for (a, b), c in coproduct(eta).items():
        _scaled_into(left, p.multiply_terms(_antipode_word(p, a), {b: ONE}), c)
        _scaled_into(right, p.multiply_terms({a: ONE}, _antipode_word(p, b)), c)
    return AlgebraElement(p, left), AlgebraElement(p, right)


# ---------------------------------------------------------------------------
# distinguished elements


def _gen(p: UqPresentation, name: str) -> AlgebraElement:
    return p.element({(p.letter(name),): ONE})


def m_element(r: int, j: int) -> AlgebraElement:
    if not 1 <= j <= r:
        raise IndexError(f"M_{j} undefined for r={r}")
    p = uq_presentation(r)
    m = _gen(p, f"E{r}")
    for k in range(r - 1, j - 1, -1):
        e = _gen(p, f"E{k}")
        m = e * m - (m * e).scale(Q.inverse())
    return m


def l_element(r: int, j: int) -> AlgebraElement:
    if not 1 <= j <= r:
        raise IndexError(f"L_{j} undefined for r={r}")
    p = uq_presentation(r)
    out = p.one()
    for k in range(j, r + 1):
        out = out * _gen(p, f"K{k}")
    return out


def random_uq_element(r: int, rng: random.Random, max_degree: int = 3, n_terms: int = 3) -> tuple[AlgebraElement, dict]:
    """Random element of U_q together with the raw polynomial it was reduced from."""
    p = uq_presentation(r)
    raw: dict[Word, Scalar] = {}
    for _ in range(n_terms):
        d = rng.randint(0, max_degree)
        w = tuple(rng.randrange(len(p.letters)) for _ in range(d))
        add_terms(raw, w, Scalar.laurent({rng.randint(-2, 2): rng.choice([-2, -1, 1, 2, 3])}))
    return p.element(raw), raw


# ---------------------------------------------------------------------------
# action on the coordinate algebra


class ActionContext:
    """Caches for the action of U_q(su(r+1)) on SU_q(r+1) and the sphere embedding."""

    def __init__(self, r: int):
        self.r = r
        self.n = r + 1
        self.uq = uq_presentation(r)
        self.suq: SUqPresentation = suq_presentation(r + 1)
        self.sphere = sphere_presentation(r)
        self._letter_cache: dict[tuple[int, Word], Terms] = {}
        self._embed_cache: dict[Word, Terms] = {}
        self._dj_eta: dict[tuple[int, bool], AlgebraElement] = {}
        kinds = [_kind(self.uq, x) for x in range(len(self.uq.letters))]
        self._kinds = kinds

    # generator action on letters of SU_q
    def _k_scalar(self, s: int, x: int, inverse: bool) -> Scalar:
        i, _ = self.suq.rc(x)
        e = (1 if i == s else 0) - (1 if i == s + 1 else 0)
        return Scalar.v_power(-e if inverse else e)

    def _letter_on_letter(self, g: int, x: int) -> Terms:
        kind, s = self._kinds[g]
        i, j = self.suq.rc(x)
        if kind == "K":
            return {(x,): self._k_scalar(s, x, False)}
        if kind == "Kinv":
            return {(x,): self._k_scalar(s, x, True)}
        if kind == "E":
            return {(self.suq.idx(s, j),): -Q.inverse()} if i == s + 1 else {}
        return {(self.suq.idx(s + 1, j),): -Q} if i == s else {}

    def _diag_scalar(self, s: int, w: Word, inverse: bool) -> Scalar:
        c = ONE
        for x in w:
            c = c * self._k_scalar(s, x, inverse)
        return c

    def act_letter_word(self, g: int, w: Word) -> Terms:
        """d_g on a (not necessarily normal) word of SU_q, result in normal form."""
        key = (g, w)
        hit = self._letter_cache.get(key)
        if hit is not None:
            return hit
        kind, s = self._kinds[g]
        P = self.suq
        if kind in ("K", "Kinv"):
            out = {ww: c * self._diag_scalar(s, w, kind == "Kinv") for ww, c in P.nf_word(w).items()}
        else:
            out = {}
            for i, x in enumerate(w):
                img = self._letter_on_letter(g, x)
                if not img:
                    continue
                c = self._diag_scalar(s, w[:i], False) * self._diag_scalar(s, w[i + 1 :], True)
                for y, cy in img.items():
                    _scaled_into(out, P.nf_word(w[:i] + y + w[i + 1 :]), c * cy)
        self._letter_cache[key] = out
        return out

    def act_terms(self, eta: AlgebraElement, terms: Mapping[Word, Scalar]) -> Terms:
        out: Terms = {}
        for ew, ec in eta.terms.items():
            cur: Terms = dict(terms)
            for g in reversed(ew):
                nxt: Terms = {}
                for w, c in cur.items():
                    _scaled_into(nxt, self.act_letter_word(g, w), c)
                cur = nxt
            _scaled_into(out, cur, ec)
        return out

    def act(self, eta: AlgebraElement, x: AlgebraElement) -> AlgebraElement:
        if x.presentation is self.sphere:
            x = self.embed(x)
        if x.raw_degree > self.suq.certified_degree:
            raise InconclusiveError("degree exceeds certified bound of the coordinate algebra")
        return AlgebraElement(self.suq, self.act_terms(eta, x.terms), x.raw_degree)

    # sphere embedding
    def _embed_word(self, w: Word) -> Terms:
        hit = self._embed_cache.get(w)
        if hit is not None:
            return hit
        if not w:
            out: Terms = {(): ONE}
        else:
            n = self.n
            x = w[-1]
            if x < n:
                img: Terms = {(self.suq.idx(n, x + 1),): ONE}
            else:
                i = 2 * n - x
                img = dict(self.suq.star_word((self.suq.idx(n, i),)))
            out = self.suq.multiply_terms(self._embed_word(w[:-1]), img)
        self._embed_cache[w] = out
        return out

    def embed(self, a: AlgebraElement) -> AlgebraElement:
        """Image of a sphere element under z_i -> u_{r+1,i}."""
        out: Terms = {}
        for w, c in a.terms.items():
            _scaled_into(out, self._embed_word(w), c)
        return AlgebraElement(self.suq, out, 2 * a.raw_degree)

    def to_sphere(self, x: AlgebraElement) -> AlgebraElement:
        """Inverse of the embedding for r = 1, where the sphere is all of SU_q(2)."""
        if self.r != 1:
            raise ValueError("the coordinate algebra equals the sphere only for r = 1")
        S = self.sphere
        z1, z2 = S.element({(0,): ONE}), S.element({(1,): ONE})
        img = {0: z2.star(), 1: z1.star().scale(-Q), 2: z1, 3: z2}  # u11, u12, u21, u22
        out = S.zero()
        for w, c in x.terms.items():
            t = S.scalar(c)
            for l in w:
                t = t * img[l]
            out = out + t
        return out

    # d_j and its adjoint
    def dj_eta(self, j: int, dagger: bool) -> AlgebraElement:
        key = (j, dagger)
        if key not in self._dj_eta:
            L = l_element(self.r, j)
            M = m_element(self.r, j)
            self._dj_eta[key] = M * L if dagger else L * M.star()
        return self._dj_eta[key]

    def dj(self, j: int, x: AlgebraElement) -> AlgebraElement:
        return self.act(self.dj_eta(j, False), x)

    def dj_dagger(self, j: int, x: AlgebraElement) -> AlgebraElement:
        return self.act(self.dj_eta(j, True), x)


@cache
def context(r: int) -> ActionContext:
    return ActionContext(r)


def act(eta: AlgebraElement, x: AlgebraElement) -> AlgebraElement:
    return context(eta.presentation.r).act(eta, x)


def dj(r: int, j: int, x: AlgebraElement) -> AlgebraElement:
    return context(r).dj(j, x)


def dj_dagger(r: int, j: int, x: AlgebraElement) -> AlgebraElement:
    return context(r).dj_dagger(j, x)


# ---------------------------------------------------------------------------
# q-exterior algebra


def _check_index(r: int, j: int) -> None:
    if not 1 <= j <= r:
        raise IndexError(f"exterior index {j} out of range 1..{r}")


def basis_vector(*indices: int) -> ExteriorVector:
    return {frozenset(indices): ONE}


def eps_q(j: int, w: ExteriorVector, r: int | None = None) -> ExteriorVector:
    if r is not None:
        _check_index(r, j)
    out: ExteriorVector = {}
    for I, c in w.items():
        if j in I:
            continue
        k = sum(1 for i in I if i <= j)
        add_terms(out, I | {j}, c * (-Q) ** (-k))
    return out


def eps_q_star(j: int, w: ExteriorVector, r: int | None = None) -> ExteriorVector:
    if r is not None:
        _check_index(r, j)
    out: ExteriorVector = {}
    for I, c in w.items():
        if j not in I:
            continue
        J = I - {j}
        k = sum(1 for i in J if i <= j)
        add_terms(out, J, c * (-Q) ** (-k))
    return out


def exterior_basis(r: int) -> list[Subset]:
    return [frozenset(c) for k in range(r + 1) for c in itertools.combinations(range(1, r + 1), k)]


# ---------------------------------------------------------------------------
# forms and Dolbeault operators

Form = dict[Subset, AlgebraElement]  # exterior basis label -> coordinate-algebra coefficient


def form_add(a: Form, b: Form) -> Form:
    out = dict(a)
    for I, x in b.items():
        out[I] = out[I] + x if I in out else x
    return {I: x for I, x in out.items() if not x.is_zero()}


def _apply_dolbeault(ctx: ActionContext, w: Form, dagger: bool) -> Form:
    out: Form = {}
    for j in range(1, ctx.r + 1):
        for I, x in w.items():
            y = ctx.dj_dagger(j, x) if dagger else ctx.dj(j, x)
            if y.is_zero():
                continue
            ext = (eps_q_star if dagger else eps_q)(j, {I: ONE})
            for J, c in ext.items():
                out = form_add(out, {J: y.scale(c)})
    return out


def dolbeault(w: Form, ctx: ActionContext) -> Form:
    return _apply_dolbeault(ctx, w, False)


def dolbeault_dagger(w: Form, ctx: ActionContext) -> Form:
    return _apply_dolbeault(ctx, w, True)


Leg = tuple[int, str]  # (j, "hol") for d_j (x) eps_j, (j, "anti") for d_j^dagger (x) eps_j^*


def delta_twisted(x: AlgebraElement, ctx: ActionContext) -> dict[Leg, AlgebraElement]:
    """delta(x) = sum_j d_j(x) (x) eps_j + d_j^dagger(x) (x) eps_j^*, as a family of legs."""
    phi = ctx.embed(x) if x.presentation is ctx.sphere else x
    out: dict[Leg, AlgebraElement] = {}
    for j in range(1, ctx.r + 1):
        out[(j, "hol")] = ctx.dj(j, phi)
        out[(j, "anti")] = ctx.dj_dagger(j, phi)
    return out


def apply_form_operator(ops: Mapping[Leg, AlgebraElement], w: Form) -> Form:
    """Apply a family of legs (left multiplication (x) exterior action) to a form."""
    out: Form = {}
    for (j, kind), a in ops.items():
        if a.is_zero():
            continue
        for I, y in w.items():
            ext = (eps_q if kind == "hol" else eps_q_star)(j, {I: ONE})
            for J, c in ext.items():
                out = form_add(out, {J: (a * y).scale(c)})
    return out


def random_form(ctx: ActionContext, rng: random.Random, max_degree: int = 3, n_terms: int = 3) -> Form:
    P = ctx.suq
    w: Form = {}
    basis = exterior_basis(ctx.r)
    for _ in range(n_terms):
        d = rng.randint(0, max_degree)
        word = tuple(rng.randrange(len(P.letters)) for _ in range(d))
        c = Scalar.laurent({rng.randint(-2, 2): rng.choice([-2, -1, 1, 2])})
        w = form_add(w, {rng.choice(basis): P.element({word: c})})
    return w


@dataclass
class IdentityResult:
    identity: str
    r: int
    degree: int
    seed: int
    status: str
    counterexample: str | None = None

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "parameters": {"r": self.r, "degree": self.degree, "seed": self.seed},
            "status": self.status,
            "counterexample": self.counterexample,
        }


__all__ = [
    "ActionContext",
    "Form",
    "IdentityResult",
    "UqPresentation",
    "act",
    "antipode",
    "antipode_sides",
    "apply_form_operator",
    "basis_vector",
    "coassociativity_sides",
    "context",
    "coproduct",
    "coproduct_raw",
    "counit",
    "counit_sides",
    "delta_twisted",
    "dj",
    "dj_dagger",
    "dolbeault",
    "dolbeault_dagger",
    "eps_q",
    "eps_q_star",
    "exterior_basis",
    "form_add",
    "l_element",
    "m_element",
    "random_form",
    "random_uq_element",
    "tensor_mul",
    "uq_presentation",
]
