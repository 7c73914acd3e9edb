"""The odd quantum sphere algebra, its circle grading, frames and canonical map."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cache

from .ncalg import (
    AlgebraElement,
    RewritingPresentation,
    Word,
    add_terms,
    check_local_confluence,
)
from .scalars import ONE, Q, Scalar

__all__ = [
    "Frame",
    "GradedElement",
    "beta",
    "canonical_map",
    "canonical_map_check",
    "canonical_preimage",
    "frame_for_degree",
    "graded_components",
    "li_projection_contraction_data",
    "random_sphere_element",
    "spectral_projection",
    "sphere_presentation",
    "verify_frame",
    "verify_frame_vanishing",
    "z",
    "zs",
]


def _z_index(r: int, i: int) -> int:
    return i - 1


def _zs_index(r: int, i: int) -> int:
    return 2 * (r + 1) - i


def sphere_rules(r: int, *, mutate: bool = False) -> dict[Word, dict[Word, Scalar]]:
    """Oriented relations of the sphere with letters z1 < ... < z{r+1} < z{r+1}' < ... < z1'.

    ``mutate`` drops the q factor of the z*z commutation rules, producing a
    deliberately inconsistent system for negative tests.
    """
    zi = lambda i: _z_index(r, i)
    si = lambda i: _zs_index(r, i)
    qinv = Q.inverse()
    rules: dict[Word, dict[Word, Scalar]] = {}
    m = r + 1
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            rules[(zi(j), zi(i))] = {(zi(i), zi(j)): qinv}
            rules[(si(i), si(j))] = {(si(j), si(i)): qinv}
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            if i != j:
                rules[(si(i), zi(j))] = {(zi(j), si(i)): ONE if mutate else Q}
    one_minus_q2 = ONE - Q * Q
    for i in range(1, m + 1):
        rhs: dict[Word, Scalar] = {(zi(i), si(i)): ONE}
        for j in range(1, i):
            rhs[(zi(j), si(j))] = one_minus_q2
        rules[(si(i), zi(i))] = rhs
    unit: dict[Word, Scalar] = {(): ONE}
    for j in range(1, m):
        unit[(zi(j), si(j))] = -ONE
    rules[(zi(m), si(m))] = unit
    return rules


@cache
def sphere_presentation(r: int) -> RewritingPresentation:
    """Confluence-certified presentation of the quantum sphere of dimension 2r+1."""
    if r < 1:
        raise ValueError("r must be at least 1")
    p = _build(r, mutate=False)
    report = check_local_confluence(p, 6)
    if not report.confluent:  # pragma: no cover - guarded by tests
        raise RuntimeError(f"sphere rewriting system not confluent: {report.unresolved}")
    return p


def _build(r: int, mutate: bool) -> RewritingPresentation:
    m = r + 1
    letters = [f"z{i}" for i in range(1, m + 1)] + [f"z{i}'" for i in range(m, 0, -1)]
    star_of = [2 * m - 1 - k for k in range(2 * m)]
    grading = [1] * m + [-1] * m
    name = f"S_q^{2 * r + 1}" + ("-mutated" if mutate else "")
    return RewritingPresentation(name, letters, star_of, sphere_rules(r, mutate=mutate), grading=grading)


def mutated_sphere_presentation(r: int) -> RewritingPresentation:
    """Sphere presentation with the q factor of z_i* z_j dropped (not confluent)."""
    return _build(r, mutate=True)


def z(r: int, i: int) -> AlgebraElement:
    p = sphere_presentation(r)
    if not 1 <= i <= r + 1:
        raise IndexError(f"z{i} out of range for r={r}")
    return p.element({(_z_index(r, i),): ONE})


def zs(r: int, i: int) -> AlgebraElement:
    return z(r, i).star()


# grading ----------------------------------------------------------------------


@dataclass
class GradedElement:
    components: dict[int, AlgebraElement]

    def reassemble(self) -> AlgebraElement:
        it = iter(self.components.values())
        out = next(it)
        for a in it:
            out = out + a
        return out

    def support(self) -> list[int]:
        return sorted(self.components)


def spectral_projection(a: AlgebraElement, n: int) -> AlgebraElement:
    p = a.presentation
    terms = {w: c for w, c in a.terms.items() if p.word_degree(w) == n}
    return AlgebraElement(p, terms, a.raw_degree)


def graded_components(a: AlgebraElement) -> dict[int, AlgebraElement]:
    p = a.presentation
    out: dict[int, dict[Word, Scalar]] = {}
    for w, c in a.terms.items():
        out.setdefault(p.word_degree(w), {})[w] = c
    return {n: AlgebraElement(p, t, a.raw_degree) for n, t in sorted(out.items())}


def li_projection_contraction_data(a: AlgebraElement) -> GradedElement:
    comps = graded_components(a)
    if not comps:
        comps = {0: a}
    return GradedElement(comps)


def beta(a: AlgebraElement, k: int) -> AlgebraElement:
    """Multiply the degree-n part by q^{kn/2}."""
    p = a.presentation
    terms = {}
    for w, c in a.terms.items():
        terms[w] = c * Scalar.v_power(k * p.word_degree(w))
    return AlgebraElement(p, terms, a.raw_degree)


def is_homogeneous(a: AlgebraElement) -> bool:
    return len(graded_components(a)) <= 1


# frames -----------------------------------------------------------------------


@dataclass
class Frame:
    r: int
    degree: int
    indices: list[tuple[int, ...]]
    elements: list[AlgebraElement] = field(repr=False)

    def __len__(self) -> int:
        return len(self.elements)


@cache
def _seed(r: int, sign: int) -> tuple[AlgebraElement, ...]:
    if sign > 0:
        return tuple(z(r, j) for j in range(1, r + 2))
    return tuple(zs(r, j).scale(Q ** (r + 1 - j)) for j in range(1, r + 2))


@cache
def frame_for_degree(r: int, n: int) -> Frame:
    """Frame of the degree-n spectral subspace built by right multiplication by seed frames."""
    p = sphere_presentation(r)
    if n == 0:
        return Frame(r, 0, [()], [p.one()])
    prev = frame_for_degree(r, n - 1 if n > 0 else n + 1)
    seed = _seed(r, 1 if n > 0 else -1)
    idx, els = [], []
    for t, zeta in zip(prev.indices, prev.elements):
        for j, s in enumerate(seed, start=1):
            idx.append(t + (j,))
            els.append(zeta * s)
    return Frame(r, n, idx, els)


def verify_frame(f: Frame) -> bool:
    p = sphere_presentation(f.r)
    total = p.zero()
    for zeta in f.elements:
        if spectral_projection(zeta, f.degree) != zeta:
            return False
        total = total + zeta * zeta.star()
    return total == p.one()


def verify_frame_vanishing(f: Frame) -> bool:
    """Exact check of sum_j phi(zeta_j) delta(zeta_j*) = 0 on every form leg."""
    from . import qhopf

    ctx = qhopf.context(f.r)
    acc: dict = {}
    for zeta in f.elements:
        left = ctx.embed(zeta)
        for leg, val in qhopf.delta_twisted(zeta.star(), ctx).items():
            prod = left * val
            acc[leg] = acc[leg] + prod if leg in acc else prod
    return all(v.is_zero() for v in acc.values())


# canonical map ----------------------------------------------------------------

Tensor = dict[int, AlgebraElement]  # A (x) O(S^1): circle degree m -> left leg times z^m


def canonical_map(pairs: list[tuple[AlgebraElement, AlgebraElement]]) -> Tensor:
    """can(sum x (x) y) = sum_n x P_n(y) (x) z^n."""
    out: Tensor = {}
    for x, y in pairs:
        for n, yn in graded_components(y).items():
            t = x * yn
            out[n] = out[n] + t if n in out else t
    return {n: a for n, a in out.items() if not a.is_zero()}


def canonical_preimage(x: AlgebraElement, n: int, r: int) -> list[tuple[AlgebraElement, AlgebraElement]]:
    """Preimage of x (x) z^{-n} under the canonical map."""
    f = frame_for_degree(r, n)
    return [(x * zeta, zeta.star()) for zeta in f.elements]


@dataclass
class CanonicalMapSample:
    x: str
    n: int
    passed: bool


@dataclass
class CanonicalMapReport:
    r: int
    samples: list[CanonicalMapSample]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.samples)


def canonical_map_check(r: int, samples: list[tuple[AlgebraElement, int]]) -> CanonicalMapReport:
    out = []
    for x, n in samples:
        image = canonical_map(canonical_preimage(x, n, r))
        target = {-n: x} if not x.is_zero() else {}
        ok = set(image) == set(target) and all(image[k] == target[k] for k in target)
        out.append(CanonicalMapSample(str(x), n, ok))
    return CanonicalMapReport(r, out)


# sampling ---------------------------------------------------------------------


def random_sphere_element(
    r: int, rng: random.Random, *, max_degree: int = 3, n_terms: int = 3, coeff_range: int = 3
) -> AlgebraElement:
    """Random element built from random words in the generators (then reduced)."""
    p = sphere_presentation(r)
    raw: dict[Word, Scalar] = {}
    nl = len(p.letters)
    for _ in range(n_terms):
        d = rng.randint(0, max_degree)
        w = tuple(rng.randrange(nl) for _ in range(d))
        c = Scalar.laurent({rng.randint(-2, 2): rng.choice([i for i in range(-coeff_range, coeff_range + 1) if i])})
        add_terms(raw, w, c)
    return p.element(raw)


def random_homogeneous_monomial(r: int, rng: random.Random, n: int, extra: int = 1) -> AlgebraElement:
    """Random reduced word of circle degree n with up to ``extra`` cancelling pairs."""
    p = sphere_presentation(r)
    m = r + 1
    k = rng.randint(0, extra)
    plus = abs(n) + k if n >= 0 else k
    minus = k if n >= 0 else abs(n) + k
    letters = [rng.randrange(m) for _ in range(plus)] + [m + rng.randrange(m) for _ in range(minus)]
    rng.shuffle(letters)
    return p.element({tuple(letters): ONE})


def all_words(r: int, max_len: int):
    p = sphere_presentation(r)
    for L in range(max_len + 1):
        yield from itertools.product(range(len(p.letters)), repeat=L)
