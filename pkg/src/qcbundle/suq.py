"""Coordinate algebra of SU_q(n) with a PBW normal form.

Monomials are nondecreasing tuples of letters u_ij (row-major index).  The
FRT commutation relations sort any word; the relation det_q = 1 is imposed by
eliminating the diagonal monomial u_11 u_22 ... u_nn, the leading monomial of
the central element det_q for the weight w(u_ij) = i*j.

Correctness of sorting is certified by checking the overlap (diamond)
conditions on every letter triple; det_q is central, so the single relation
det_q - 1 needs no further completion.
"""

from __future__ import annotations

import itertools
import math
from functools import cache

from .ncalg import AlgebraElement, Presentation, Terms, Word, _scaled_into, add_terms
from .scalars import ONE, Q, Scalar

__all__ = ["SUqPresentation", "perm_length", "suq_presentation"]


def perm_length(p: tuple[int, ...]) -> int:
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


class SUqPresentation(Presentation):
    def __init__(self, n: int):
        if n < 2:
            raise ValueError("n must be at least 2")
        self.n = n
        letters = [f"u{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
        weights = [i * j for i in range(1, n + 1) for j in range(1, n + 1)]
        super().__init__(f"SU_q({n})", letters, list(range(n * n)), weights=weights)
        self._qmq = Q - Q.inverse()
        self._qinv = Q.inverse()
        self._mul_cache: dict[tuple[Word, int], Terms] = {}
        self._det_cache: dict[Word, Terms] = {}
        self._nf_cache: dict[Word, Terms] = {}
        self._prod_cache: dict[tuple[Word, Word], Terms] = {}
        self.diagonal: Word = tuple(self.idx(i, i) for i in range(1, n + 1))
        self.det_terms: Terms = self.quantum_minor(tuple(range(1, n + 1)), tuple(range(1, n + 1)))
        self.certified_degree = math.inf if self.diamond_check() == [] else 0

    def idx(self, i: int, j: int) -> int:
        return (i - 1) * self.n + (j - 1)

    def rc(self, x: int) -> tuple[int, int]:
        return divmod(x, self.n)[0] + 1, x % self.n + 1

    # sorting in the matrix bialgebra ---------------------------------------------
    def swap(self, y: int, x: int) -> list[tuple[Scalar, int, int]]:
        """Rewrite y x (y > x) as a combination of sorted pairs."""
        j, l = self.rc(y)
        i, k = self.rc(x)
        if j == i:
            return [(self._qinv, x, y)]
        if l == k:
            return [(self._qinv, x, y)]
        if l < k:
            return [(ONE, x, y)]
        return [(ONE, x, y), (-self._qmq, self.idx(i, l), self.idx(j, k))]

    def _mul_letter(self, m: Word, x: int) -> Terms:
        """Sorted-monomial m times letter x, without the determinant relation."""
        if not m or m[-1] <= x:
            return {m + (x,): ONE}
        key = (m, x)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        head, y = m[:-1], m[-1]
        out: Terms = {}
        for c, a, b in self.swap(y, x):
            for w1, c1 in self._mul_letter(head, a).items():
                _scaled_into(out, self._mul_letter(w1, b), c * c1)
        self._mul_cache[key] = out
        return out

    def _mul_word_raw(self, m: Word, w: Word) -> Terms:
        cur: Terms = {m: ONE}
        for x in w:
            nxt: Terms = {}
            for mm, c in cur.items():
                _scaled_into(nxt, self._mul_letter(mm, x), c)
            cur = nxt
        return cur

    def diamond_check(self) -> list[tuple[int, int, int]]:
        """Letter triples z > y > x where (zy)x and z(yx) sort differently."""
        bad = []
        for x, y, zz in itertools.combinations(range(self.n * self.n), 3):
            left: Terms = {}
            for c, a, b in self.swap(zz, y):
                _scaled_into(left, self._mul_word_raw((a, b), (x,)), c)
            right: Terms = {}
            for c, a, b in self.swap(y, x):
                _scaled_into(right, self._sort_slow((zz, a, b)), c)
            if left != right:
                bad.append((x, y, zz))
        return bad

    def _sort_slow(self, w: Word) -> Terms:
        """Sort by rewriting the rightmost inversion first (independent of _mul_letter)."""
        terms: Terms = {w: ONE}
        done: Terms = {}
        while terms:
            word, c = terms.popitem()
            pos = next((i for i in range(len(word) - 2, -1, -1) if word[i] > word[i + 1]), None)
            if pos is None:
                add_terms(done, word, c)
                continue
            for d, a, b in self.swap(word[pos], word[pos + 1]):
                add_terms(terms, word[:pos] + (a, b) + word[pos + 2 :], c * d)
        return done

    # determinant ----------------------------------------------------------------
    def quantum_minor(self, rows: tuple[int, ...], cols: tuple[int, ...]) -> Terms:
        out: Terms = {}
        for perm in itertools.permutations(range(len(cols))):
            w = tuple(self.idx(rows[a], cols[perm[a]]) for a in range(len(rows)))
            coeff = (-Q) ** perm_length(perm)
            for ww, c in self._mul_word_raw((), w).items():
                add_terms(out, ww, c * coeff)
        return out

    def _diag_divisible(self, m: Word) -> bool:
        return all(d in m for d in self.diagonal)

    def _det_reduce(self, m: Word) -> Terms:
        if not self._diag_divisible(m):
            return {m: ONE}
        hit = self._det_cache.get(m)
        if hit is not None:
            return hit
        rest = list(m)
        for d in self.diagonal:
            rest.remove(d)
        base = tuple(rest)
        prod: Terms = {}
        for w, c in self.det_terms.items():
            _scaled_into(prod, self._mul_word_raw(base, w), c)
        lead = prod.pop(m)
        inv = lead.inverse()
        # m = lead^{-1} (base * det - others) and det = 1
        out: Terms = {}
        _scaled_into(out, self._det_reduce(base), inv)
        for w, c in prod.items():
            _scaled_into(out, self._det_reduce(w), -c * inv)
        self._det_cache[m] = out
        return out

    def _reduce_raw(self, terms: Terms) -> Terms:
        out: Terms = {}
        for w, c in terms.items():
            _scaled_into(out, self._det_reduce(w), c)
        return out

    # Presentation interface ---------------------------------------------------------
    def nf_word(self, w: Word) -> Terms:
        hit = self._nf_cache.get(w)
        if hit is None:
            hit = self.multiply_words((), w)
            self._nf_cache[w] = hit
        return hit

    def multiply_words(self, a: Word, b: Word) -> Terms:
        key = (a, b)
        hit = self._prod_cache.get(key)
        if hit is not None:
            return hit
        cur: Terms = {a: ONE}
        for x in b:
            nxt: Terms = {}
            for mm, c in cur.items():
                _scaled_into(nxt, self._reduce_raw(self._mul_letter(mm, x)), c)
            cur = nxt
        self._prod_cache[key] = cur
        return cur

    def star_word(self, w: Word) -> Terms:
        hit = self._star_cache.get(w)
        if hit is not None:
            return hit
        if not w:
            out: Terms = {(): ONE}
        elif len(w) == 1:
            out = self._star_letter(w[0])
        else:
            # (w' x)* = x* w'*
            out = self.multiply_terms(self._star_letter(w[-1]), self.star_word(w[:-1]))
        self._star_cache[w] = out
        return out

    @cache
    def _star_letter(self, x: int) -> Terms:
        i, j = self.rc(x)
        rows = tuple(a for a in range(1, self.n + 1) if a != i)
        cols = tuple(b for b in range(1, self.n + 1) if b != j)
        minor = self._reduce_raw(self.quantum_minor(rows, cols)) if rows else {(): ONE}
        c = (-Q) ** (j - i)
        return {w: v * c for w, v in minor.items()}

    def u(self, i: int, j: int) -> AlgebraElement:
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(f"u{i}{j} out of range for n={self.n}")
        return self.element({(self.idx(i, j),): ONE})

    def det(self) -> AlgebraElement:
        """det_q evaluated in the quotient (equals 1 there)."""
        return AlgebraElement(self, self._reduce_raw(self.det_terms), self.n)


@cache
def suq_presentation(n: int) -> SUqPresentation:
    return SUqPresentation(n)
