"""Free *-algebras over :class:`~qcbundle.scalars.Scalar` modulo oriented rewriting rules.

Words are tuples of letter indices.  The letter index doubles as its precedence
rank, so a word order is the tuple ``(length, weight, letters)`` compared
lexicographically, where ``weight`` is the sum of optional per-letter weights.
This order is admissible (compatible with concatenation), so every rule whose
left side is larger than all words on its right side gives a terminating
rewriting system.

Two concrete presentation kinds are supported:

* :class:`RewritingPresentation` stores explicit rules and reduces by
  leftmost rewriting with memoised word normal forms;
* subclasses may replace the word reducer entirely (see ``suq``) while keeping
  the same element type.
"""

from __future__ import annotations

import json
import math
import random
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field

from .scalars import ONE, ZERO, Scalar, ScalarLike, as_scalar

Word = tuple[int, ...]
Terms = dict[Word, Scalar]

__all__ = [
    "AlgebraElement",
    "CompletionFailure",
    "ConfluenceReport",
    "CriticalPair",
    "InconclusiveError",
    "Letter",
    "Presentation",
    "PresentationMismatch",
    "RewritingPresentation",
    "Terms",
    "Word",
    "add_terms",
    "check_local_confluence",
    "equal",
    "multiply",
    "reduce",
    "star",
]


class PresentationMismatch(ValueError):
    """Unknown letter, or elements from different presentations combined."""


class CompletionFailure(RuntimeError):
    """An unresolved critical pair could not be oriented."""

    def __init__(self, message: str, pair: CriticalPair | None = None):
        super().__init__(message)
        self.pair = pair


class InconclusiveError(RuntimeError):
    """Equality requested above the degree at which normal forms are certified."""


@dataclass(frozen=True)
class Letter:
    name: str
    starred: bool = False


def add_terms(acc: Terms, word: Word, coeff: Scalar) -> None:
    """In-place ``acc[word] += coeff`` dropping zeros."""
    old = acc.get(word)
    if old is None:
        if coeff:
            acc[word] = coeff
        return
    new = old + coeff
    if new:
        acc[word] = new
    else:
        del acc[word]


def _scaled_into(acc: Terms, src: Mapping[Word, Scalar], c: Scalar) -> None:
    if c == ONE:
        for w, x in src.items():
            add_terms(acc, w, x)
    else:
        for w, x in src.items():
            add_terms(acc, w, x * c)


class Presentation:
    """Generators, involution and word reduction of a presented *-algebra."""

    def __init__(
        self,
        name: str,
        letters: Sequence[str],
        star_of: Sequence[int],
        *,
        weights: Sequence[int] | None = None,
        grading: Sequence[int] | None = None,
    ):
        if len(star_of) != len(letters):
            raise ValueError("star_of must list one partner per letter")
        for i, j in enumerate(star_of):
            if star_of[j] != i:
                raise ValueError("star must be an involution on letters")
        self.name = name
        self.letters = list(letters)
        self.star_of = list(star_of)
        self.weights = list(weights) if weights is not None else [0] * len(letters)
        self.grading = list(grading) if grading is not None else [0] * len(letters)
        self._index = {s: i for i, s in enumerate(self.letters)}
        self.certified_degree: float = 0
        self._star_cache: dict[Word, Terms] = {}

    # letters ---------------------------------------------------------------
    def letter(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise PresentationMismatch(f"letter {name!r} not in presentation {self.name}") from None

    def word(self, names: Iterable[str]) -> Word:
        return tuple(self.letter(s) for s in names)

    def order_key(self, w: Word) -> tuple:
        return (len(w), sum(self.weights[x] for x in w), w)

    def word_degree(self, w: Word) -> int:
        return sum(self.grading[x] for x in w)

    def word_str(self, w: Word) -> str:
        if not w:
            return "1"
        parts: list[str] = []
        i = 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            name = self.letters[w[i]]
            parts.append(name if j - i == 1 else f"{name}^{j - i}")
            i = j
        return " ".join(parts)

    # reduction --------------------------------------------------------------
    def nf_word(self, w: Word) -> Mapping[Word, Scalar]:
        raise NotImplementedError

    def reduce_terms(self, raw: Mapping[Word, ScalarLike]) -> Terms:
        out: Terms = {}
        for w, c in raw.items():
            c = as_scalar(c)
            if not c:
                continue
            self._check_word(w)
            _scaled_into(out, self.nf_word(tuple(w)), c)
        return out

    def multiply_terms(self, a: Mapping[Word, Scalar], b: Mapping[Word, Scalar]) -> Terms:
        out: Terms = {}
        for wa, ca in a.items():
            for wb, cb in b.items():
                _scaled_into(out, self.multiply_words(wa, wb), ca * cb)
        return out

    def multiply_words(self, a: Word, b: Word) -> Mapping[Word, Scalar]:
        return self.nf_word(a + b)

    def star_word(self, w: Word) -> Mapping[Word, Scalar]:
        cached = self._star_cache.get(w)
        if cached is None:
            cached = self.nf_word(tuple(self.star_of[x] for x in reversed(w)))
            self._star_cache[w] = dict(cached)
        return cached

    def _check_word(self, w: Word) -> None:
        n = len(self.letters)
        for x in w:
            if not (isinstance(x, int) and 0 <= x < n):
                raise PresentationMismatch(f"letter index {x!r} not in presentation {self.name}")

    # elements ---------------------------------------------------------------
    def element(self, raw: Mapping[Word, ScalarLike] | None = None, *, degree: int | None = None) -> AlgebraElement:
        raw = raw or {}
        terms = self.reduce_terms(raw)
        d = degree if degree is not None else max((len(w) for w in raw), default=0)
        return AlgebraElement(self, terms, d)

    def gen(self, name: str) -> AlgebraElement:
        return self.element({(self.letter(name),): ONE})

    def one(self) -> AlgebraElement:
        return AlgebraElement(self, {(): ONE}, 0)

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, {}, 0)

    def scalar(self, c: ScalarLike) -> AlgebraElement:
        c = as_scalar(c)
        return AlgebraElement(self, {(): c} if c else {}, 0)


class RewritingPresentation(Presentation):
    """Presentation whose relations are oriented rules ``lhs -> rhs``."""

    def __init__(
        self,
        name: str,
        letters: Sequence[str],
        star_of: Sequence[int],
        rules: Mapping[Word, Mapping[Word, ScalarLike]],
        *,
        weights: Sequence[int] | None = None,
        grading: Sequence[int] | None = None,
    ):
        super().__init__(name, letters, star_of, weights=weights, grading=grading)
        self.rules: dict[Word, Terms] = {}
        for lhs, rhs in rules.items():
            self.add_rule(tuple(lhs), {tuple(w): as_scalar(c) for w, c in rhs.items()})

    def add_rule(self, lhs: Word, rhs: Mapping[Word, Scalar]) -> None:
        self._check_word(lhs)
        key = self.order_key(lhs)
        clean: Terms = {}
        for w, c in rhs.items():
            self._check_word(w)
            if not self.order_key(w) < key:
                raise CompletionFailure(
                    f"rule {self.word_str(lhs)} -> {self.word_str(w)} does not decrease the order"
                )
            add_terms(clean, w, c)
        self.rules[lhs] = clean
        self._rebuild()

    def _rebuild(self) -> None:
        self._by_first: dict[int, list[Word]] = {}
        for lhs in self.rules:
            self._by_first.setdefault(lhs[0], []).append(lhs)
        for v in self._by_first.values():
            v.sort()
        self._nf_cache: dict[Word, Terms] = {}
        self._star_cache = {}

    def copy(self) -> RewritingPresentation:
        p = RewritingPresentation(
            self.name, self.letters, self.star_of, self.rules, weights=self.weights, grading=self.grading
        )
        p.certified_degree = self.certified_degree
        return p

    # reduction --------------------------------------------------------------
    def find_redex(self, w: Word, start: int = 0) -> tuple[int, Word] | None:
        by_first = self._by_first
        n = len(w)
        for i in range(start, n):
            cands = by_first.get(w[i])
            if cands:
                for lhs in cands:
                    m = len(lhs)
                    if i + m <= n and w[i : i + m] == lhs:
                        return i, lhs
        return None

    def all_redexes(self, w: Word) -> list[tuple[int, Word]]:
        out = []
        n = len(w)
        for i in range(n):
            for lhs in self._by_first.get(w[i], ()):
                m = len(lhs)
                if i + m <= n and w[i : i + m] == lhs:
                    out.append((i, lhs))
        return out

    def rewrite_at(self, w: Word, pos: int, lhs: Word) -> Terms:
        pre, post = w[:pos], w[pos + len(lhs) :]
        return {pre + r + post: c for r, c in self.rules[lhs].items()}

    def nf_word(self, w: Word) -> Mapping[Word, Scalar]:
        cache = self._nf_cache
        hit = cache.get(w)
        if hit is not None:
            return hit
        red = self.find_redex(w)
        if red is None:
            out = {w: ONE}
        else:
            out = {}
            for nw, c in self.rewrite_at(w, *red).items():
                _scaled_into(out, self.nf_word(nw), c)
        cache[w] = out
        return out

    def multiply_words(self, a: Word, b: Word) -> Mapping[Word, Scalar]:
        if not a:
            return {b: ONE} if self.find_redex(b) is None else self.nf_word(b)
        return self.nf_word(a + b)

    def reduce_random(self, raw: Mapping[Word, ScalarLike], rng: random.Random) -> Terms:
        """Reduce by rewriting randomly chosen redexes in randomly chosen terms.

        Deliberately avoids the memoised normal forms so that it is an
        independent strategy.
        """
        terms: Terms = {}
        for w, c in raw.items():
            add_terms(terms, tuple(w), as_scalar(c))
        while True:
            reducible = [w for w in terms if self.all_redexes(w)]
            if not reducible:
                return terms
            w = rng.choice(sorted(reducible))
            c = terms.pop(w)
            pos, lhs = rng.choice(self.all_redexes(w))
            for nw, d in self.rewrite_at(w, pos, lhs).items():
                add_terms(terms, nw, c * d)

    def is_normal(self, w: Word) -> bool:
        return self.find_redex(w) is None

    # serialisation ----------------------------------------------------------
    def to_json(self) -> str:
        def sc(s: Scalar) -> dict:
            return {"shift": s.shift, "num": list(s.numerator), "den": list(s.denominator)}

        data = {
            "name": self.name,
            "generators": self.letters,
            "star": self.star_of,
            "weights": self.weights,
            "grading": self.grading,
            "rules": [
                {
                    "lhs": list(lhs),
                    "rhs": [{"word": list(w), "coeff": sc(c)} for w, c in sorted(rhs.items())],
                }
                for lhs, rhs in sorted(self.rules.items())
            ],
        }
        return json.dumps(data, indent=1, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> RewritingPresentation:
        data = json.loads(text)
        rules = {}
        for r in data["rules"]:
            rhs = {}
            for t in r["rhs"]:
                c = t["coeff"]
                rhs[tuple(t["word"])] = Scalar(c["shift"], tuple(c["num"]), tuple(c["den"]))
            rules[tuple(r["lhs"])] = rhs
        return RewritingPresentation(
            data["name"],
            data["generators"],
            data["star"],
            rules,
            weights=data.get("weights"),
            grading=data.get("grading"),
        )


class AlgebraElement:
    """Normal-form element of a presented algebra.

    ``raw_degree`` records the largest word length fed to the reducer while
    producing the element; equality refuses to answer above the certified
    degree of the presentation.
    """

    __slots__ = ("presentation", "raw_degree", "terms")

    def __init__(self, presentation: Presentation, terms: Terms, raw_degree: int = 0):
        self.presentation = presentation
        self.terms = terms
        self.raw_degree = raw_degree

    def _same(self, other: AlgebraElement) -> None:
        if other.presentation is not self.presentation:
            raise PresentationMismatch(
                f"cannot combine elements of {self.presentation.name} and {other.presentation.name}"
            )

    def _coerce(self, other) -> AlgebraElement:
        if isinstance(other, AlgebraElement):
            self._same(other)
            return other
        return self.presentation.scalar(other)

    def __add__(self, other) -> AlgebraElement:
        other = self._coerce(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            add_terms(out, w, c)
        return AlgebraElement(self.presentation, out, max(self.raw_degree, other.raw_degree))

    __radd__ = __add__

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(self.presentation, {w: -c for w, c in self.terms.items()}, self.raw_degree)

    def __sub__(self, other) -> AlgebraElement:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> AlgebraElement:
        return self._coerce(other) - self

    def scale(self, c: ScalarLike) -> AlgebraElement:
        c = as_scalar(c)
        if not c:
            return AlgebraElement(self.presentation, {}, self.raw_degree)
        return AlgebraElement(self.presentation, {w: x * c for w, x in self.terms.items()}, self.raw_degree)

    def __mul__(self, other) -> AlgebraElement:
        if isinstance(other, AlgebraElement):
            self._same(other)
            terms = self.presentation.multiply_terms(self.terms, other.terms)
            return AlgebraElement(self.presentation, terms, self.raw_degree + other.raw_degree)
        return self.scale(other)

    def __rmul__(self, other) -> AlgebraElement:
        return self.scale(other)

    def __pow__(self, k: int) -> AlgebraElement:
        if k < 0:
            raise ValueError("negative powers are not defined for algebra elements")
        out = self.presentation.one()
        for _ in range(k):
            out = out * self
        return out

    def star(self) -> AlgebraElement:
        p = self.presentation
        out: Terms = {}
        for w, c in self.terms.items():
            # coefficients are real rational functions of q, hence fixed by conjugation
            _scaled_into(out, p.star_word(w), c)
        return AlgebraElement(p, out, self.raw_degree)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Largest word length in the normal form."""
        return max((len(w) for w in self.terms), default=0)

    def coefficient(self, w: Word) -> Scalar:
        return self.terms.get(w, ZERO)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, AlgebraElement):
            return self.presentation is other.presentation and self.terms == other.terms
        if isinstance(other, (int, Scalar)):
            return self.terms == self.presentation.scalar(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self) -> list[tuple[Word, Scalar]]:
        key = self.presentation.order_key
        return sorted(self.terms.items(), key=lambda t: key(t[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        p = self.presentation
        out = ""
        for k, (w, c) in enumerate(self.sorted_terms()):
            negative = all(x <= 0 for x in c.numerator)
            if negative:
                c = -c
            if c == ONE:
                body = p.word_str(w) if w else "1"
            else:
                body = f"({c}) {p.word_str(w)}" if w else f"({c})"
            if k == 0:
                out = f"-{body}" if negative else body
            else:
                out += f" - {body}" if negative else f" + {body}"
        return out

    def __repr__(self) -> str:
        return f"<{self.presentation.name}: {self}>"


# module-level operations ------------------------------------------------------


def reduce(raw: Mapping[Word, ScalarLike], presentation: Presentation) -> AlgebraElement:
    """Normal form of a raw noncommutative polynomial ``{word: coefficient}``."""
    return presentation.element(raw)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b


def star(a: AlgebraElement) -> AlgebraElement:
    return a.star()


def equal(a: AlgebraElement, b: AlgebraElement) -> bool:
    """Exact equality of normal forms, refused above the certified degree."""
    a._same(b)
    bound = a.presentation.certified_degree
    d = max(a.raw_degree, b.raw_degree)
    if d > bound:
        raise InconclusiveError(
            f"degree {d} exceeds certified degree {bound} of {a.presentation.name}; raise the bound"
        )
    return a.terms == b.terms


# confluence -------------------------------------------------------------------


@dataclass
class CriticalPair:
    word: Word
    kind: str  # "overlap" or "inclusion"
    left: Terms
    right: Terms

    def describe(self, p: Presentation) -> str:
        return f"{self.kind} at {p.word_str(self.word)}"


@dataclass
class ConfluenceReport:
    presentation: str
    degree_bound: int
    pairs_checked: int
    unresolved: list[str] = field(default_factory=list)
    added_rules: list[str] = field(default_factory=list)
    max_pair_length: int = 0
    closed: bool = True
    certified_degree: float = 0

    @property
    def confluent(self) -> bool:
        return not self.unresolved

    def to_dict(self) -> dict:
        cert = self.certified_degree
        return {
            "presentation": self.presentation,
            "degree_bound": self.degree_bound,
            "pairs_checked": self.pairs_checked,
            "unresolved": list(self.unresolved),
            "added_rules": list(self.added_rules),
            "max_pair_length": self.max_pair_length,
            "closed": self.closed,
            "certified_degree": "unbounded" if cert == math.inf else cert,
        }


def critical_pairs(p: RewritingPresentation, bound: int | None = None) -> Iterator[CriticalPair]:
    lhss = sorted(p.rules, key=p.order_key)
    for l1 in lhss:
        for l2 in lhss:
            # suffix of l1 equals prefix of l2
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    w = l1 + l2[k:]
                    if bound is not None and len(w) > bound:
                        continue
                    yield CriticalPair(w, "overlap", p.rewrite_at(w, 0, l1), p.rewrite_at(w, len(l1) - k, l2))
            if l1 != l2 and len(l2) < len(l1):
                for i in range(len(l1) - len(l2) + 1):
                    if l1[i : i + len(l2)] == l2:
                        if bound is not None and len(l1) > bound:
                            continue
                        yield CriticalPair(l1, "inclusion", p.rewrite_at(l1, 0, l1), p.rewrite_at(l1, i, l2))


def _max_pair_length(p: RewritingPresentation) -> int:
    return max((len(cp.word) for cp in critical_pairs(p)), default=0)


def _difference(p: RewritingPresentation, cp: CriticalPair) -> Terms:
    left = p.reduce_terms(cp.left)
    right = p.reduce_terms(cp.right)
    for w, c in right.items():
        add_terms(left, w, -c)
    return left


def check_local_confluence(
    p: RewritingPresentation,
    degree_bound: int,
    *,
    complete: bool = False,
    max_rounds: int = 50,
) -> ConfluenceReport:
    """Reduce every critical pair of length at most ``degree_bound`` both ways.

    With ``complete=True`` unresolved pairs are oriented into new rules and the
    check is repeated until no new rules appear or ``max_rounds`` is reached
    (bounded Knuth-Bendix / Bergman completion).  The presentation is
    modified in place and its ``certified_degree`` updated: unbounded when all
    critical pairs, of any length, resolve; ``degree_bound`` when only the
    bounded ones were examined and resolved; 0 otherwise.
    """
    max_rule = max((len(l) for l in p.rules), default=0)
    if degree_bound < max_rule:
        raise ValueError(f"degree bound {degree_bound} below maximal rule length {max_rule}")
    report = ConfluenceReport(p.name, degree_bound, 0)
    rounds = 0
    while True:
        rounds += 1
        unresolved: list[tuple[CriticalPair, Terms]] = []
        checked = 0
        for cp in critical_pairs(p, degree_bound):
            checked += 1
            diff = _difference(p, cp)
            if diff:
                unresolved.append((cp, diff))
        report.pairs_checked += checked
        if not unresolved or not complete:
            report.unresolved = [cp.describe(p) for cp, _ in unresolved]
            report.closed = not unresolved
            break
        added = 0
        for cp, _ in unresolved:
            diff = _difference(p, cp)  # earlier additions may already resolve it
            if not diff:
                continue
            lead = max(diff, key=p.order_key)
            if lead == ():
                raise CompletionFailure(f"critical pair {cp.describe(p)} reduces to a nonzero constant", cp)
            c = diff.pop(lead)
            inv = -(c.inverse())
            rhs = {w: x * inv for w, x in diff.items()}
            p.add_rule(lead, rhs)
            report.added_rules.append(p.word_str(lead))
            added += 1
        if added == 0 or rounds >= max_rounds:
            leftover = [cp.describe(p) for cp in critical_pairs(p, degree_bound) if _difference(p, cp)]
            report.unresolved = leftover
            report.closed = not leftover
            break
    report.max_pair_length = _max_pair_length(p)
    if report.closed:
        report.certified_degree = math.inf if report.max_pair_length <= degree_bound else degree_bound
    else:
        report.certified_degree = 0
    p.certified_degree = report.certified_degree
    return report


def word_from_names(p: Presentation, names: Iterable[str]) -> Word:
    return p.word(names)


def random_raw_element(
    p: Presentation, rng: random.Random, *, max_degree: int, n_terms: int, coeff: Callable[[random.Random], Scalar]
) -> dict[Word, Scalar]:
    """Random linear combination of random (not necessarily normal) words."""
    raw: dict[Word, Scalar] = {}
    n = len(p.letters)
    for _ in range(n_terms):
        d = rng.randint(0, max_degree)
        w = tuple(rng.randrange(n) for _ in range(d))
        raw[w] = raw.get(w, ZERO) + coeff(rng)
    return raw
