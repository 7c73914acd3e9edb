"""Truncated weighted-shift representations of the quantum sphere and numeric seminorms.

Representation space: ``l2(N)^{(x) r} (x) l2(Z)``.  The generator z_1 is the
normal one in our relation convention, so it carries the bilateral shift U:

    z_1     = q^{E_1 . N} (x) U
    z_i     = q^{E_i . N} * W_{i-1}          (i >= 2, W a weighted raising shift)

The exponent vectors E_i are found by a small search and the shift weights are
solved from sum_j z_j z_j* = 1; every relation is then verified on interior
vectors and a failure raises :class:`AnsatzError`.

Since only z_1 touches the Z factor, Fourier transform in that factor splits
every pi(x) into fibers pi_theta(x) on l2(N)^{(x) r}.  Norms are sup over theta
of the fiber norms (grid plus bounded refinement), maxed with the character
z_1 -> 0, z_{r+1} -> e^{i phi} that governs the behaviour far from the origin.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np
import scipy.optimize as so
import scipy.sparse as sp

from .ncalg import AlgebraElement, Word
from .sphere import beta, graded_components, sphere_presentation

__all__ = [
    "AnsatzError",
    "SeminormValue",
    "TruncatedRep",
    "UnsupportedRank",
    "build_sphere_rep",
    "circle_quotient_sup",
    "op_norm",
    "op_norm_at",
    "seminorm_hor",
    "seminorm_tot",
    "seminorm_ver",
    "vertical_element",
]


class AnsatzError(RuntimeError):
    pass


class UnsupportedRank(ValueError):
    pass


def _raising(n: int, weights: np.ndarray) -> np.ndarray:
    m = np.zeros((n, n))
    for k in range(n - 1):
        m[k + 1, k] = weights[k]
    return m


def _kron_all(mats: list[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1))
    for m in mats:
        out = np.kron(out, m)
    return out


@dataclass
class _Ansatz:
    exponents: list[tuple[int, ...]]  # E_i for i = 1..r+1
    weights: list[np.ndarray]  # per unilateral factor s (shift of z_{s+2})


class TruncatedRep:
    def __init__(self, r: int, q: float, cutoff: int, window: int | None = None, _ansatz: _Ansatz | None = None):
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        if cutoff < 4:
            raise ValueError("cutoff must be at least 4")
        self.r, self.q, self.cutoff = r, q, cutoff
        self.window = cutoff // 2 if window is None else window
        self.presentation = sphere_presentation(r)
        self.ansatz = _ansatz if _ansatz is not None else _solve_ansatz(r, q, cutoff)
        self._word_cache: dict[Word, tuple[np.ndarray, int]] = {}
        self.validation = self.validate()
        if self.validation["max_residual"] > 1e-10:
            raise AnsatzError(f"relations fail on interior vectors: {self.validation}")

    # fiber generators ------------------------------------------------------------
    @property
    def fiber_dim(self) -> int:
        return self.cutoff**self.r

    @cached_property
    def _diag_n(self) -> list[np.ndarray]:
        n = np.arange(self.cutoff)
        eye = np.ones(self.cutoff)
        return [_kron_all([np.diag(n if t == s else eye) for t in range(self.r)]).diagonal() for s in range(self.r)]

    def _weight_diag(self, e: tuple[int, ...]) -> np.ndarray:
        expo = sum(ei * ns for ei, ns in zip(e, self._diag_n))
        return self.q ** np.asarray(expo, dtype=float)

    @cached_property
    def fiber_generators(self) -> list[np.ndarray]:
        """pi_theta(z_i) at theta = 0 (z_1 picks up e^{i theta})."""
        out = [np.diag(self._weight_diag(self.ansatz.exponents[0]))]
        for i in range(2, self.r + 2):
            s = i - 2
            shift = _kron_all(
                [_raising(self.cutoff, self.ansatz.weights[s]) if t == s else np.eye(self.cutoff) for t in range(self.r)]
            )
            out.append(np.diag(self._weight_diag(self.ansatz.exponents[i - 1])) @ shift)
        return out

    def interior(self, depth: int | None = None) -> np.ndarray:
        """Indicator of fiber basis vectors whose quantum numbers are all below the interior bound."""
        bound = self.cutoff // 2 if depth is None else self.cutoff - depth
        ok = np.ones(self.fiber_dim, dtype=bool)
        for ns in self._diag_n:
            ok &= ns < bound
        return ok

    # full matrices (with a finite window in the Z factor) ----------------------------
    def generator(self, i: int) -> sp.csr_matrix:
        """pi(z_i) on the truncated space, Z factor restricted to [-window, window]."""
        m = 2 * self.window + 1
        u = sp.eye(m, k=-1, format="csr")
        f = sp.csr_matrix(self.fiber_generators[i - 1])
        if i == 1:
            return sp.kron(f, u, format="csr")
        return sp.kron(f, sp.eye(m), format="csr")

    def full_interior(self) -> np.ndarray:
        m = 2 * self.window + 1
        zmask = np.abs(np.arange(m) - self.window) <= self.window // 2
        return np.kron(self.interior(), zmask).astype(bool)

    def relation_residuals(self) -> dict[str, float]:
        """Residuals of each relation family on interior vectors of the full truncated space."""
        r1 = self.r + 1
        z = [self.generator(i) for i in range(1, r1 + 1)]
        zs = [m.conj().T.tocsr() for m in z]
        cols = np.flatnonzero(self.full_interior())

        def res(m) -> float:
            block = m[:, cols]
            return float(abs(block).max()) if block.nnz else 0.0

        out = {"zz": 0.0, "z*z*": 0.0, "z*z": 0.0, "normal": 0.0, "unit": 0.0}
        q = self.q
        for i in range(r1):
            for j in range(i + 1, r1):
                out["zz"] = max(out["zz"], res(z[i] @ z[j] - q * z[j] @ z[i]))
                out["z*z*"] = max(out["z*z*"], res(zs[j] @ zs[i] - q * zs[i] @ zs[j]))
            for j in range(r1):
                if i != j:
                    out["z*z"] = max(out["z*z"], res(zs[i] @ z[j] - q * z[j] @ zs[i]))
            rhs = z[i] @ zs[i]
            for j in range(i):
                rhs = rhs + (1 - q * q) * z[j] @ zs[j]
            out["normal"] = max(out["normal"], res(zs[i] @ z[i] - rhs))
        total = sum(z[i] @ zs[i] for i in range(r1))
        out["unit"] = res(total - sp.eye(total.shape[0]))
        return out

    def grown(self, factor: int) -> TruncatedRep:
        """Same representation with the fiber truncation multiplied by ``factor`` (cached)."""
        cache = self.__dict__.setdefault("_grown", {})
        if factor not in cache:
            cache[factor] = TruncatedRep(self.r, self.q, self.cutoff * factor, self.window, _ansatz=_extend(self.ansatz, self.q, self.cutoff * factor))
        return cache[factor]

    def validate(self) -> dict:
        res = self.relation_residuals()
        return {"residuals": res, "max_residual": max(res.values()), "exponents": self.ansatz.exponents}

    # elements ---------------------------------------------------------------------
    def _word(self, w: Word) -> tuple[np.ndarray, int]:
        """(fiber matrix at theta = 0, power of e^{i theta}) of a word in the letters."""
        hit = self._word_cache.get(w)
        if hit is not None:
            return hit
        if not w:
            out = (np.eye(self.fiber_dim), 0)
        else:
            head, tail = self._word(w[:-1])
            m, p = self._letter(w[-1])
            out = (head @ m, tail + p)
        self._word_cache[w] = out
        return out

    def _letter(self, x: int) -> tuple[np.ndarray, int]:
        r1 = self.r + 1
        if x < r1:
            return self.fiber_generators[x].astype(complex), 1 if x == 0 else 0
        i = 2 * r1 - 1 - x  # z_{i+1}*
        return self.fiber_generators[i].T.astype(complex), -1 if i == 0 else 0

    def fourier_parts(self, a: AlgebraElement) -> dict[int, np.ndarray]:
        """pi_theta(a) = sum_m e^{i m theta} parts[m]."""
        if a.presentation is not self.presentation:
            raise ValueError("element does not belong to this sphere")
        parts: dict[int, np.ndarray] = {}
        for w, c in a.terms.items():
            m, p = self._word(w)
            parts[p] = parts.get(p, 0) + c.evaluate(self.q) * m
        return parts

    def symbol(self, a: AlgebraElement):
        """Function phi -> value of the character z_1 -> 0, z_{r+1} -> e^{i phi} (others -> 0)."""
        r1 = self.r + 1
        coeffs: dict[int, complex] = {}
        for w, c in a.terms.items():
            if all(x in (r1 - 1, r1) for x in w):
                p = sum(1 if x == r1 - 1 else -1 for x in w)
                coeffs[p] = coeffs.get(p, 0) + c.evaluate(self.q)
        return coeffs

    def max_word_length(self, a: AlgebraElement) -> int:
        return max((len(w) for w in a.terms), default=0)


def _solve_ansatz(r: int, q: float, cutoff: int) -> _Ansatz:
    """Search exponent vectors, solve shift weights, and keep the first consistent choice."""
    small = max(8, min(cutoff, 10))
    for e1 in itertools.product((0, 1), repeat=r):
        weights = []
        ok = True
        for s in range(r):
            k = np.arange(max(small, cutoff))
            w2 = 1 - q ** (2 * e1[s] * (k + 1))
            if np.any(w2 < -1e-15):
                ok = False
                break
            weights.append(np.sqrt(np.clip(w2, 0, None)))
        if not ok or not all(np.all(w[: cutoff - 1] > 0) for w in weights):
            continue
        choices = [[e for e in itertools.product((0, 1), repeat=r) if e[i - 2] == 0] for i in range(2, r + 2)]
        for rest in itertools.product(*choices):
            ans = _Ansatz([e1, *rest], weights)
            try:
                trial = TruncatedRep.__new__(TruncatedRep)
                trial.r, trial.q, trial.cutoff = r, q, small
                trial.window = small // 2
                trial.presentation = sphere_presentation(r)
                trial.ansatz = _Ansatz([e1, *rest], [w[:small] for w in weights])
                trial._word_cache = {}
                if max(trial.relation_residuals().values()) < 1e-10:
                    return ans
            except (ValueError, IndexError):
                continue
    raise AnsatzError(f"no weighted-shift assignment satisfies the sphere relations for r={r}")


def _extend(ans: _Ansatz, q: float, cutoff: int) -> _Ansatz:
    """Recompute the solved shift weights at a larger cutoff."""
    k = np.arange(cutoff)
    weights = [np.sqrt(np.clip(1 - q ** (2 * ans.exponents[0][s] * (k + 1)), 0, None)) for s in range(len(ans.weights))]
    return _Ansatz(ans.exponents, weights)


def build_sphere_rep(r: int, q: float, cutoff: int = 40, window: int | None = None) -> TruncatedRep:
    return TruncatedRep(r, q, cutoff, window)


# ---------------------------------------------------------------------------
# norms


def _fiber_sup(parts_list: list[dict[int, np.ndarray]], layout, cols: np.ndarray, n_grid: int) -> float:
    """sup_theta ||assembled fiber matrix restricted to the given columns||."""

    def value(theta: float) -> float:
        blocks = [sum(np.exp(1j * m * theta) * mat for m, mat in parts.items()) if parts else None for parts in parts_list]
        mat = layout(blocks)
        return float(np.linalg.norm(mat[:, cols], 2)) if mat.size else 0.0

    if len({m for p in parts_list for m in p}) <= 1:
        # a single Fourier mode: theta only contributes a global phase
        return value(0.0)
    grid = np.linspace(0, 2 * math.pi, n_grid, endpoint=False)
    vals = np.array([value(t) for t in grid])
    k = int(np.argmax(vals))
    h = 2 * math.pi / n_grid
    res = so.minimize_scalar(lambda t: -value(t), bounds=(grid[k] - h, grid[k] + h), method="bounded",
                             options={"xatol": 1e-10})
    return max(float(vals.max()), -float(res.fun))


def _trig_sup(coeffs: dict[int, complex], n_grid: int = 256) -> float:
    if not coeffs:
        return 0.0
    if len(coeffs) == 1:
        return abs(next(iter(coeffs.values())))

    def f(t):
        return abs(sum(c * np.exp(1j * p * t) for p, c in coeffs.items()))

    grid = np.linspace(0, 2 * math.pi, n_grid, endpoint=False)
    vals = np.array([f(t) for t in grid])
    k = int(np.argmax(vals))
    h = 2 * math.pi / n_grid
    res = so.minimize_scalar(lambda t: -f(t), bounds=(grid[k] - h, grid[k] + h), method="bounded",
                             options={"xatol": 1e-12})
    return max(float(vals.max()), -float(res.fun))


def _columns(rep: TruncatedRep, depth: int) -> np.ndarray:
    return np.flatnonzero(rep.interior(min(rep.cutoff // 2, depth)))


def _fixed_norm(a: AlgebraElement, rep: TruncatedRep, n_grid: int = 48) -> float:
    if a.is_zero():
        return 0.0
    cols = _columns(rep, rep.max_word_length(a))
    parts = rep.fourier_parts(a)
    fib = _fiber_sup([parts], lambda b: b[0], cols, n_grid)
    return max(fib, _trig_sup(rep.symbol(a)))


MAX_FIBER_DIM = 4096


def refined(fn, rep: TruncatedRep, tol: float = 1e-12, max_factor: int = 16) -> float:
    """Evaluate fn on rep, doubling the fiber truncation until two values agree to tol (relative).

    Norm maximizers that sit close to the essential spectrum decay slowly in
    the unilateral factor, so a fixed truncation converges slowly for q near 1.
    """
    v = fn(rep)
    factor = 1
    cur = rep
    while factor < max_factor:
        factor *= 2
        if (rep.cutoff * factor) ** rep.r > MAX_FIBER_DIM:
            break
        cur = rep.grown(factor)
        w = fn(cur)
        if abs(w - v) <= tol * max(abs(w), 1e-300):
            return w
        v = w
    return v


def op_norm_at(a: AlgebraElement, rep: TruncatedRep, n_grid: int = 48) -> float:
    """Norm of pi(a) on vectors untouched by truncation, maxed with the character bound."""
    return refined(lambda rr: _fixed_norm(a, rr, n_grid), rep)


@dataclass
class SeminormValue:
    value: float
    kind: str
    cutoffs: tuple[int, int]
    converged: bool
    values: tuple[float, float] = (0.0, 0.0)
    label: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _larger(rep: TruncatedRep) -> TruncatedRep:
    return TruncatedRep(rep.r, rep.q, math.ceil(rep.cutoff * 1.5), rep.window)


_LARGER: dict[tuple[int, float, int], TruncatedRep] = {}


def _companion(rep: TruncatedRep) -> TruncatedRep:
    key = (rep.r, rep.q, rep.cutoff)
    if key not in _LARGER:
        _LARGER[key] = _larger(rep)
    return _LARGER[key]


def _with_convergence(fn, kind: str, rep: TruncatedRep, label: str = "", check: bool = True) -> SeminormValue:
    v1 = fn(rep)
    if not check:
        return SeminormValue(v1, kind, (rep.cutoff, rep.cutoff), True, (v1, v1), label)
    big = _companion(rep)
    v2 = fn(big)
    conv = abs(v1 - v2) <= 0.01 * max(abs(v1), abs(v2), 1e-300) or max(v1, v2) < 1e-12
    return SeminormValue(v2, kind, (rep.cutoff, big.cutoff), conv, (v1, v2), label)


def op_norm(a: AlgebraElement, rep: TruncatedRep, check: bool = True) -> SeminormValue:
    return _with_convergence(lambda rr: op_norm_at(a, rr), "norm", rep, check=check)


def vertical_element(a: AlgebraElement) -> AlgebraElement:
    """sum_n n P_n(a), computed exactly."""
    out = a.presentation.zero()
    for n, x in graded_components(a).items():
        if n:
            out = out + x.scale(n)
    return out


def seminorm_ver(a: AlgebraElement, rep: TruncatedRep, check: bool = True) -> SeminormValue:
    x = vertical_element(a)
    return _with_convergence(lambda rr: op_norm_at(x, rr), "ver", rep, check=check)


# horizontal and total -------------------------------------------------------------


def _legs(a: AlgebraElement):
    """(d(beta a), d^dagger(beta a)) mapped back to the sphere, with beta a = sum q^{n/2} a_n."""
    from . import qhopf

    ctx = qhopf.context(1)
    b = beta(a, 1)
    legs = qhopf.delta_twisted(b, ctx)
    return ctx.to_sphere(legs[(1, "hol")]), ctx.to_sphere(legs[(1, "anti")])


def _phased_legs(a: AlgebraElement, lam: complex | None) -> tuple[Phased, Phased, Phased]:
    """(hol, anti, vertical) entries for sigma_lam(a); lam = None means the identity."""
    if lam is None:
        hol, anti = _legs(a)
        return [(hol, 1)], [(anti, 1)], [(vertical_element(a), 1)]
    hol, anti, ver = [], [], []
    for n, x in graded_components(a).items():
        c = lam**n
        h, an = _legs(x)
        hol.append((h, c))
        anti.append((an, c))
        ver.append((x.scale(n), c))
    return hol, anti, ver


def _check_rank(rep: TruncatedRep) -> None:
    if rep.r != 1:
        raise UnsupportedRank("numeric horizontal seminorm is implemented for r = 1 only")


Phased = list[tuple[AlgebraElement, complex]]


def _phased_parts(rep: TruncatedRep, entry: Phased) -> dict[int, np.ndarray]:
    out: dict[int, np.ndarray] = {}
    for e, c in entry:
        if not e.is_zero():
            for m, mat in rep.fourier_parts(e).items():
                out[m] = out.get(m, 0) + c * mat
    return out


def _phased_symbol(rep: TruncatedRep, entry: Phased) -> dict[int, complex]:
    out: dict[int, complex] = {}
    for e, c in entry:
        for p, v in rep.symbol(e).items():
            out[p] = out.get(p, 0) + c * v
    return out


def _two_by_two(rep: TruncatedRep, tl: Phased, tr: Phased, bl: Phased, br: Phased, n_grid: int = 48) -> float:
    """Norm of [[tl, tr], [bl, br]] on interior columns; each entry is a sum of phased sphere elements."""
    elems = [tl, tr, bl, br]
    depth = max((rep.max_word_length(e) for entry in elems for e, _ in entry), default=0)
    cols = _columns(rep, depth)
    nd = rep.fiber_dim
    cols2 = np.concatenate([cols, cols + nd])
    parts = [_phased_parts(rep, e) for e in elems]

    def layout(blocks):
        z = np.zeros((nd, nd), dtype=complex)
        b = [z if (isinstance(x, int) or x is None) else x for x in blocks]
        return np.block([[b[0], b[1]], [b[2], b[3]]])

    fib = _fiber_sup(parts, layout, cols2, n_grid)
    # character bound: 2x2 scalar matrix of symbols
    syms = [_phased_symbol(rep, e) for e in elems]
    powers = sorted({p for s in syms for p in s})
    if not powers:
        return fib

    def sym_norm(t: float) -> float:
        m = np.array([sum(c * np.exp(1j * p * t) for p, c in s.items()) for s in syms]).reshape(2, 2)
        return float(np.linalg.norm(m, 2))

    grid = np.linspace(0, 2 * math.pi, 256, endpoint=False)
    return max(fib, max(sym_norm(t) for t in grid))


def seminorm_hor(a: AlgebraElement, rep: TruncatedRep, check: bool = True, lam: complex | None = None) -> SeminormValue:
    """Upper-bound surrogate for the horizontal seminorm (full form space, r = 1).

    With ``lam`` (unimodular) the value is computed for sigma_lam(a): the legs
    of each graded component a_n are multiplied by lam^n.
    """
    _check_rank(rep)
    hol, anti, _ = _phased_legs(a, lam)

    def fn(rr):
        return refined(lambda r2: _two_by_two(r2, [], anti, hol, []), rr)

    return _with_convergence(fn, "hor", rep, "surrogate (>= restriction sup)", check)


def seminorm_tot(a: AlgebraElement, rep: TruncatedRep, check: bool = True, lam: complex | None = None) -> SeminormValue:
    _check_rank(rep)
    hol, anti, ver = _phased_legs(a, lam)
    neg = [(x, -c) for x, c in ver]

    def fn(rr):
        return refined(lambda r2: _two_by_two(r2, ver, anti, hol, neg), rr)

    return _with_convergence(fn, "tot", rep, "surrogate (>= restriction sup)", check)


def circle_quotient_sup(a: AlgebraElement, rep: TruncatedRep, n_grid: int = 64) -> float:
    """max over a grid of ||sigma_{e^{it}}(a) - a|| / |t|, |t| <= pi."""
    comps = graded_components(a)
    ts = [t for t in np.linspace(-math.pi, math.pi, n_grid + 1)[1:] if abs(t) > 1e-12]
    depth = max((len(w) for w in a.terms), default=0)

    def at(t: float, rr: TruncatedRep) -> float:
        # sigma_lambda(a) - a = sum (lambda^n - 1) a_n
        parts: dict[int, np.ndarray] = {}
        sym: dict[int, complex] = {}
        for n, x in comps.items():
            fac = complex(math.cos(n * t) - 1, math.sin(n * t))
            for m, mat in rr.fourier_parts(x).items():
                parts[m] = parts.get(m, 0) + fac * mat
            for p, c in rr.symbol(x).items():
                sym[p] = sym.get(p, 0) + fac * c
        if not parts:
            return 0.0
        cols = _columns(rr, depth)
        return max(_fiber_sup([parts], lambda b: b[0], cols, 48), _trig_sup(sym))

    best_t = max(ts, key=lambda t: at(t, rep) / abs(t))
    return refined(lambda rr: at(best_t, rr), rep) / abs(best_t)
