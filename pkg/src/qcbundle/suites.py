"""Identity suites shared by the command line and the test-suite.

Each suite returns a list of :class:`Row`; a row names the identity, gives a
short anchor (the formula being checked), the parameters and a status, plus a
counterexample when the check fails.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Callable
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fdbundle as fd
from . import qhopf
from .ncalg import CompletionFailure, check_local_confluence
from .scalars import ONE, Q, Scalar
from .sphere import (
    beta,
    canonical_map_check,
    frame_for_degree,
    graded_components,
    mutated_sphere_presentation,
    random_homogeneous_monomial,
    random_sphere_element,
    sphere_presentation,
    verify_frame,
    verify_frame_vanishing,
    z,
    zs,
)


@dataclass
class Row:
    identity: str
    anchor: str
    parameters: dict
    status: str
    counterexample: str | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return asdict(self)


def _row(identity, anchor, params, failures: list[str], details=None) -> Row:
    return Row(identity, anchor, params, "fail" if failures else "pass", failures[0] if failures else None, details or {})


def _coeff(rng: random.Random) -> Scalar:
    return Scalar.laurent({rng.randint(-2, 2): rng.choice([-3, -2, -1, 1, 2, 3])})


# ---------------------------------------------------------------------------


def confluence_suite(r: int, *, degree: int = 6, mutated: bool = False, **_) -> list[Row]:
    p = mutated_sphere_presentation(r) if mutated else sphere_presentation(r)
    params = {"r": r, "degree": degree, "mutated": mutated}
    try:
        rep = check_local_confluence(p, degree)
        fails = list(rep.unresolved)
        details = {"pairs_checked": rep.pairs_checked}
    except CompletionFailure as exc:
        fails = [str(exc)]
        details = {}
    return [_row("critical pairs resolve", "every overlap and inclusion of rule left sides reduces to a common normal form",
                 params, fails, details)]


def sphere_identities_suite(r: int, *, seed: int = 0, samples: int = 100, **_) -> list[Row]:
    rng = random.Random(seed)
    p = sphere_presentation(r)
    params = {"r": r, "seed": seed, "samples": samples}
    rows = confluence_suite(r)

    fails = []
    for _ in range(samples):
        raw = {}
        for _ in range(rng.randint(1, 4)):
            w = tuple(rng.randrange(len(p.letters)) for _ in range(rng.randint(0, 4)))
            raw[w] = raw.get(w, Scalar.from_int(0)) + _coeff(rng)
        if p.element(raw).terms != p.reduce_random(raw, rng):
            fails.append(str(raw))
    rows.append(_row("normal form independent of rewriting strategy", "leftmost-first reduction = random-redex reduction",
                     params, fails))

    total = p.zero()
    for j in range(1, r + 2):
        total = total + z(r, j) * zs(r, j)
    rows.append(_row("unit sphere relation", "sum_j z_j z_j* = 1", {"r": r}, [] if total == p.one() else [str(total)]))

    fails = []
    for _ in range(samples // 4):
        a = random_sphere_element(r, rng, max_degree=2)
        b = random_sphere_element(r, rng, max_degree=2)
        if (a * b).star() != b.star() * a.star() or a.star().star() != a:
            fails.append(f"a={a}; b={b}")
    rows.append(_row("star is an involutive anti-homomorphism", "(ab)* = b* a*, a** = a", params, fails))

    fails = []
    for _ in range(samples // 4):
        a = random_sphere_element(r, rng, max_degree=3)
        k = rng.randint(-2, 2)
        if beta(a, k).star() != beta(a.star(), -k):
            fails.append(f"a={a}; k={k}")
        comps = graded_components(a)
        back = p.zero()
        for x in comps.values():
            back = back + x
        if back != a:
            fails.append(f"reassembly a={a}")
    rows.append(_row("grading compatibilities", "beta_k(a)* = beta_-k(a*); sum_n P_n(a) = a", params, fails))
    return rows


def frame_suite(r: int, *, max_degree: int = 3, vanishing_degree: int | None = None, **_) -> list[Row]:
    vanishing_degree = max_degree if vanishing_degree is None else vanishing_degree
    rows = []
    fails = []
    for n in range(-max_degree, max_degree + 1):
        f = frame_for_degree(r, n)
        if len(f) != (r + 1) ** abs(n) or not verify_frame(f):
            fails.append(f"n={n}")
    rows.append(_row("frames of spectral subspaces", "sum_J zeta_J zeta_J* = 1 with (r+1)^|n| elements of degree n",
                     {"r": r, "max_degree": max_degree}, fails))
    fails = [f"n={n}" for n in range(-vanishing_degree, vanishing_degree + 1)
             if not verify_frame_vanishing(frame_for_degree(r, n))]
    rows.append(_row("frame vanishing", "sum_J phi(zeta_J) delta(zeta_J*) = 0",
                     {"r": r, "max_degree": vanishing_degree}, fails))
    return rows


def twisted_derivation_suite(r: int, *, seed: int = 0, samples: int = 200, max_degree: int = 3, **_) -> list[Row]:
    ctx = qhopf.context(r)
    P = ctx.suq
    rng = random.Random(seed)
    params = {"r": r, "seed": seed, "samples": samples}
    rows = []

    fails = []
    for _ in range(samples):
        n = rng.randint(-2, 2)
        x = ctx.embed(random_homogeneous_monomial(r, rng, n))
        y = P.element({tuple(rng.randrange(len(P.letters)) for _ in range(rng.randint(0, 2))): _coeff(rng)})
        twist = Q ** (-n)
        for j in range(1, r + 1):
            if ctx.dj(j, x * y) != (x * ctx.dj(j, y)).scale(twist) + ctx.dj(j, x) * y:
                fails.append(f"d_{j}: x={x}; y={y}")
            if ctx.dj_dagger(j, x * y) != (x * ctx.dj_dagger(j, y)).scale(twist) + ctx.dj_dagger(j, x) * y:
                fails.append(f"d_{j}^dagger: x={x}; y={y}")
    rows.append(_row("twisted Leibniz rule of d_j", "d_j(xy) = q^-n x d_j(y) + d_j(x) y for x of degree n", params, fails))

    fails = []
    for _ in range(max(1, samples // 4)):
        n = rng.randint(-2, 2)
        a = random_homogeneous_monomial(r, rng, n)
        b = random_sphere_element(r, rng, max_degree=2)
        lhs = qhopf.delta_twisted(a * b, ctx)
        da, db = qhopf.delta_twisted(a, ctx), qhopf.delta_twisted(b, ctx)
        pa, pb = ctx.embed(a), ctx.embed(b)
        for leg in lhs:
            if lhs[leg] != da[leg] * pb + (pa * db[leg]).scale(Q ** (-n)):
                fails.append(f"leg={leg}: a={a}; b={b}")
    rows.append(_row("product rule of delta with mu = q^-1", "delta(ab) = delta(a) phi(b) + mu^n phi(a) delta(b)",
                     params, fails))

    k = qhopf.uq_presentation(r).element({(qhopf.uq_presentation(r).letters.index(f"K{r}"),): ONE})
    fails = []
    S = ctx.sphere
    for d in range(max_degree + 1):
        for word in itertools.product(range(len(S.letters)), repeat=d):
            a = S.element({word: ONE})
            if a.is_zero():
                continue
            n = S.word_degree(word)
            if ctx.act(k, a) != ctx.embed(a).scale(Scalar.v_power(-n)):
                fails.append(str(a))
    rows.append(_row("K_r eigenvalue on spectral subspaces", "d_{K_r}(a) = q^{-n/2} a for a of degree n",
                     {"r": r, "max_degree": max_degree}, fails))

    fails = []
    for _ in range(samples):
        form = qhopf.random_form(ctx, rng)
        if qhopf.dolbeault(qhopf.dolbeault(form, ctx), ctx) or qhopf.dolbeault_dagger(qhopf.dolbeault_dagger(form, ctx), ctx):
            fails.append(str({tuple(sorted(I)): str(x) for I, x in form.items()}))
    rows.append(_row("Dolbeault operators square to zero", "dbar^2 = 0 = (dbar^dagger)^2", params, fails))

    fails = []
    uq = qhopf.uq_presentation(r)
    for i in range(1, r + 1):
        fi = uq.element({(uq.letters.index(f"F{i}"),): ONE})
        ei = uq.element({(uq.letters.index(f"E{i}"),): ONE})
        for j in range(1, r + 2):
            if not ctx.act(fi, z(r, j)).is_zero() or not ctx.act(ei, zs(r, j)).is_zero():
                fails.append(f"i={i}, j={j}")
    rows.append(_row("highest weight vanishing", "d_{F_i}(z_j) = 0 = d_{E_i}(z_j*)", {"r": r}, fails))
    return rows


def hopf_suite(r: int, *, seed: int = 0, samples: int = 200, **_) -> list[Row]:
    p = qhopf.uq_presentation(r)
    rng = random.Random(seed)
    elements = [(p.element({(i,): ONE}), f"generator {name}") for i, name in enumerate(p.letters)]
    for _ in range(samples):
        x, _ = qhopf.random_uq_element(r, rng)
        elements.append((x, str(x)))
    fails = {"coassociativity": [], "counit": [], "antipode": []}
    for x, label in elements:
        left, right = qhopf.coassociativity_sides(x)
        if left != right:
            fails["coassociativity"].append(label)
        if qhopf.counit_sides(x) != (x, x):
            fails["counit"].append(label)
        e = p.scalar(qhopf.counit(x))
        if qhopf.antipode_sides(x) != (e, e):
            fails["antipode"].append(label)
    params = {"r": r, "seed": seed, "samples": samples}
    return [
        _row("coassociativity", "(Delta (x) id) Delta = (id (x) Delta) Delta", params, fails["coassociativity"]),
        _row("counit law", "(eps (x) id) Delta = id = (id (x) eps) Delta", params, fails["counit"]),
        _row("antipode law", "m (S (x) id) Delta = eps 1 = m (id (x) S) Delta", params, fails["antipode"]),
    ]


def canonical_map_suite(r: int, *, seed: int = 0, samples: int = 100, max_degree: int = 3, **_) -> list[Row]:
    rng = random.Random(seed)
    pairs = []
    for _ in range(samples):
        n = rng.randint(-max_degree, max_degree)
        pairs.append((random_sphere_element(r, rng, max_degree=2, n_terms=2), n))
    rep = canonical_map_check(r, pairs)
    fails = [f"x={s.x}; n={s.n}" for s in rep.samples if not s.passed]
    return [_row("canonical map preimages", "can(sum_J x zeta_J (x) zeta_J*) = x (x) z^-n",
                 {"r": r, "seed": seed, "samples": samples}, fails)]


def fdbundle_suite(r: int = 0, *, seed: int = 0, samples: int = 20, **_) -> list[Row]:
    """Structural identities on random finite-dimensional bundle data."""
    rng = np.random.default_rng(seed)
    worst: dict[str, float] = {}
    fails: dict[str, list[str]] = {}

    def record(name: str, value: float, bad: bool, label: str) -> None:
        worst[name] = max(worst.get(name, 0.0), value)
        if bad:
            fails.setdefault(name, []).append(label)

    for i in range(samples):
        graded = i % 2 == 0
        d = fd.random_datum(rng, w=3 if graded else 6, graded=graded, levels=8)
        label = f"datum {i} (graded={graded}, dim={d.dim})"
        dg = fd.modular_lift(d)
        for n in (1, -1, 2):
            frame = [c for c in fd.degree_frame(d, n)]
            conn = fd.grassmann_connection(frame, d.d0)
            x1 = fd.random_element(d, rng, [0])[0]
            x2 = fd.random_element(d, rng, [0])[0]
            a0 = fd.random_element(d, rng, [0])[0]
            res = max(conn.leibniz_residual(x1, a0), conn.hermitian_residual(x1, x2))
            record("hermitian connection", res, res >= 1e-12, label)
            lift = fd.horizontal_lift(frame, d.d0)
            sa = fd.opnorm(lift - lift.conj().T)
            record("horizontal lift self-adjoint", sa, sa >= 1e-13, label)
        a = fd.random_element(d, rng, [-2, -1, 0, 1, 2])
        res = fd.modular_lift_formula_residual(d, a, dg)
        record("modular lift formula", res, res >= 1e-12, label)
        res = fd.twisted_delta_residual(d, a, dg)
        record("twisted commutator formula", res, res >= 1e-12, label)
        rb = fd.resolvent_bound_check(d, 8)
        excess = max(v["norm"] / v["bound"] - 1 for v in rb.details["blocks"].values())
        record("resolvent bound", max(excess, 0.0), not rb.passed, label)
        kc = fd.kucerovsky_check(d, rng)
        record("kucerovsky positivity", max(-kc.details["min_value"], 0.0), not kc.passed, label)
        if d.graded:
            g = fd.full_gamma(d)
            ac = fd.opnorm(g @ dg + dg @ g)
            record("grading anticommutation", ac, ac >= 1e-13, label)

    anchors = {
        "hermitian connection": "nabla(xa) = nabla(x)a + x delta_0(a); delta_0(x1* x2) = x1* nabla x2 - (x2* nabla x1)*",
        "horizontal lift self-adjoint": "sum_j zeta_j D_0 zeta_j* is self-adjoint",
        "modular lift formula": "D_G phi(a) xi = delta(a) xi + mu^n phi(a) D_0 xi",
        "twisted commutator formula": "delta_hor(a) = mu^{-n/2} delta(a) blockwise",
        "resolvent bound": "||(i + n gamma + (D_G)_n)^-1|| <= (1 + n^2)^{-1/2}",
        "kucerovsky positivity": "<P xi, N gamma xi> + <N gamma xi, P xi> >= 0",
        "grading anticommutation": "gamma D_G = -D_G gamma",
    }
    params = {"seed": seed, "samples": samples}
    return [
        _row(name, anchor, params, fails.get(name, []), {"worst": worst.get(name, 0.0)})
        for name, anchor in anchors.items()
    ]


SUITES: dict[str, Callable[..., list[Row]]] = {
    "confluence": confluence_suite,
    "sphere-identities": sphere_identities_suite,
    "frame-vanishing": frame_suite,
    "twisted-derivations": twisted_derivation_suite,
    "hopf": hopf_suite,
    "canonical-map": canonical_map_suite,
    "fdbundle": fdbundle_suite,
}

__all__ = ["Row", "SUITES"] + [f.__name__ for f in SUITES.values()]
