"""Finite-dimensional circle-bundle toy models.

The total space is ``H = l2(levels) (x) H_0`` with levels ``-K..K``.  Level k
plays the role of the k-th spectral subspace H_k.  Homogeneous elements of
degree n are ``S^n (x) b`` where ``S`` shifts levels and ``b`` acts on
``H_0 = C^w (x) C^s`` as ``b0 (x) 1``.

Frames of degree one are ``S (x) c_j`` with ``c_j = g_j(T) (x) 1`` for a
self-adjoint ``T`` commuting with ``D_0^2``, and ``sum_j g_j^2 = 1``.  The
reference twisted derivation is ``delta(a) = D~ a - mu^n a D~`` with
``D~ = diag(mu^k D_0)``; the modular lift is built independently from frames
and Grassmann connections, so identities between the two are genuine checks.

Elements are passed around as ``{degree: matrix on H_0}``; ``embed`` turns
them into matrices on H.  Residuals are relative to the size of the terms.
"""

from __future__ import annotations

import itertools
import json
import math
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla

Components = dict[int, np.ndarray]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class InvalidFrame(ValueError):
    pass


class StructureError(ValueError):
    pass


def opnorm(x: np.ndarray) -> float:
    if x.size == 0:
        return 0.0
    return float(np.linalg.norm(x, 2))


def rel_residual(diff: np.ndarray, *scales: np.ndarray) -> float:
    s = max([1.0] + [opnorm(x) for x in scales])
    return opnorm(diff) / s


# ---------------------------------------------------------------------------
# data


@dataclass
class BundleDatum:
    w: int
    s: int
    levels: int
    mu: float
    d0: np.ndarray
    gamma0: np.ndarray | None
    frame: list[np.ndarray]
    beta_mu: float | None = None

    @property
    def graded(self) -> bool:
        return self.gamma0 is not None

    @property
    def base_dim(self) -> int:
        return self.w * self.s

    @property
    def n_levels(self) -> int:
        return 2 * self.levels + 1

    @property
    def dim(self) -> int:
        return self.n_levels * self.base_dim

    def level_range(self) -> range:
        return range(-self.levels, self.levels + 1)

    def twist(self) -> float:
        """mu used by the declared beta automorphisms."""
        return self.mu if self.beta_mu is None else self.beta_mu

    def to_json(self) -> str:
        def enc(m):
            return None if m is None else [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]

        data = {
            "w": self.w,
            "s": self.s,
            "levels": self.levels,
            "mu": self.mu,
            "beta_mu": self.beta_mu,
            "d0": enc(self.d0),
            "gamma0": enc(self.gamma0),
            "frame": [enc(c) for c in self.frame],
        }
        return json.dumps(data)

    @staticmethod
    def from_json(text: str) -> BundleDatum:
        data = json.loads(text)

        def dec(m):
            return None if m is None else np.array([[complex(a, b) for a, b in row] for row in m])

        return BundleDatum(
            data["w"],
            data["s"],
            data["levels"],
            data["mu"],
            dec(data["d0"]),
            dec(data["gamma0"]),
            [dec(c) for c in data["frame"]],
            data.get("beta_mu"),
        )


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_datum(
    rng: np.random.Generator,
    *,
    w: int = 3,
    graded: bool = True,
    levels: int = 4,
    mu: float | None = None,
    n_frame: int = 2,
) -> BundleDatum:
    """Random toy datum; D_0 and the frame coefficients are built from a common eigenbasis."""
    u = _random_unitary(rng, w)
    d = rng.normal(size=w)
    e = rng.normal(size=w)
    t = d**2 + e**2 if graded else d
    h = rng.uniform(0.2, 1.0, size=(n_frame, w)) * (1.0 + np.cos(np.outer(np.arange(1, n_frame + 1), t)) ** 2)
    g = h / np.sqrt((h**2).sum(axis=0))
    dw = u @ np.diag(d) @ u.conj().T
    if graded:
        ew = u @ np.diag(e) @ u.conj().T
        d0 = np.kron(dw, SIGMA_X) + np.kron(ew, SIGMA_Y)
        gamma0 = np.kron(np.eye(w), SIGMA_Z)
        s = 2
    else:
        d0 = dw
        gamma0 = None
        s = 1
    frame = [np.kron(u @ np.diag(gj) @ u.conj().T, np.eye(s)) for gj in g]
    if mu is None:
        mu = float(rng.uniform(0.6, 1.6))
    return BundleDatum(w, s, levels, mu, d0, gamma0, frame)


def trivial_datum(w: int = 1) -> BundleDatum:
    """Grading concentrated in degree 0 (with w = 1 the base algebra is just the scalars)."""
    d0 = np.diag(np.arange(w, dtype=float)).astype(complex)
    return BundleDatum(w, 1, 0, 1.0, d0, None, [np.eye(w, dtype=complex)])


def random_element(
    datum: BundleDatum, rng: np.random.Generator, degrees: Sequence[int], scale: float = 1.0
) -> Components:
    out: Components = {}
    for n in degrees:
        b = rng.normal(size=(datum.w, datum.w)) + 1j * rng.normal(size=(datum.w, datum.w))
        out[n] = np.kron(b * scale / math.sqrt(datum.w), np.eye(datum.s))
    return out


def shift(datum: BundleDatum, n: int) -> np.ndarray:
    m = datum.n_levels
    return np.eye(m, k=-n)


def embed(datum: BundleDatum, a: Components) -> np.ndarray:
    out = np.zeros((datum.dim, datum.dim), dtype=complex)
    for n, b in a.items():
        out += np.kron(shift(datum, n), b)
    return out


def level_diag(datum: BundleDatum, f: Callable[[int], complex]) -> np.ndarray:
    return np.kron(np.diag([f(k) for k in datum.level_range()]), np.eye(datum.base_dim))


def level_block(datum: BundleDatum, x: np.ndarray, k_to: int, k_from: int) -> np.ndarray:
    b = datum.base_dim
    i = (k_to + datum.levels) * b
    j = (k_from + datum.levels) * b
    return x[i : i + b, j : j + b]


def level_projection(datum: BundleDatum, k: int) -> np.ndarray:
    return level_diag(datum, lambda m: 1.0 if m == k else 0.0)


def star(a: Components) -> Components:
    return {-n: b.conj().T for n, b in a.items()}


def multiply(a: Components, b: Components) -> Components:
    out: Components = {}
    for n, x in a.items():
        for m, y in b.items():
            out[n + m] = out.get(n + m, 0) + x @ y
    return out


# ---------------------------------------------------------------------------
# frames, Grassmann connections, horizontal lifts


def check_frame(frame: Sequence[np.ndarray], tol: float = 1e-12) -> np.ndarray:
    """Return p = sum zeta zeta*, verifying it is a projection fixing every frame element."""
    p = sum(z @ z.conj().T for z in frame)
    scale = max(1.0, opnorm(p))
    if opnorm(p @ p - p) > tol * scale or opnorm(p - p.conj().T) > tol * scale:
        raise InvalidFrame("sum of zeta zeta* is not a projection")
    for z in frame:
        if opnorm(p @ z - z) > tol * max(1.0, opnorm(z)):
            raise InvalidFrame("frame element outside the module")
    return p


@dataclass
class ConnectionData:
    """Grassmann connection x -> sum_j zeta_j delta_0(<zeta_j, x>) as operators H_0 -> K."""

    frame: list[np.ndarray]
    d0: np.ndarray

    def delta0(self, a: np.ndarray) -> np.ndarray:
        return self.d0 @ a - a @ self.d0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return sum(z @ self.delta0(z.conj().T @ x) for z in self.frame)

    def leibniz_residual(self, x: np.ndarray, a: np.ndarray) -> float:
        diff = self(x @ a) - self(x) @ a - x @ self.delta0(a)
        return rel_residual(diff, self(x @ a), self(x) @ a, x @ self.delta0(a))

    def hermitian_residual(self, x1: np.ndarray, x2: np.ndarray) -> float:
        lhs = self.delta0(x1.conj().T @ x2)
        rhs = x1.conj().T @ self(x2) - (x2.conj().T @ self(x1)).conj().T
        return rel_residual(lhs - rhs, lhs, rhs)


def grassmann_connection(frame: Sequence[np.ndarray], d0: np.ndarray, tol: float = 1e-12) -> ConnectionData:
    check_frame(frame, tol)
    return ConnectionData(list(frame), d0)


def horizontal_lift(frame: Sequence[np.ndarray], d0: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Lift sum_j zeta_j D_0 zeta_j* acting on the module's Hilbert space."""
    check_frame(frame, tol)
    return sum(z @ d0 @ z.conj().T for z in frame)


def horizontal_lift_frame_picture(frame: Sequence[np.ndarray], d0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(P D_0^{(+)N} P, U) with P_ij = zeta_i* zeta_j and U = [zeta_1 ... zeta_N]."""
    u = np.hstack(list(frame))
    p = u.conj().T @ u
    dn = np.kron(np.eye(len(frame)), d0)
    return p @ dn @ p, u


def degree_frame(datum: BundleDatum, n: int) -> list[np.ndarray]:
    """Coefficients c_J of the degree-n frame S^n c_J obtained by repeated products."""
    if n == 0:
        return [np.eye(datum.base_dim, dtype=complex)]
    seed = datum.frame if n > 0 else [c.conj().T for c in datum.frame]
    out = []
    for idx in itertools.product(range(len(seed)), repeat=abs(n)):
        m = np.eye(datum.base_dim, dtype=complex)
        for j in idx:
            m = m @ seed[j]
        out.append(m)
    return out


def level_lifts(datum: BundleDatum) -> dict[int, np.ndarray]:
    return {k: horizontal_lift(degree_frame(datum, k), datum.d0) for k in datum.level_range()}


def horizontal_operator(datum: BundleDatum) -> np.ndarray:
    """Direct sum of the untwisted horizontal lifts on all levels."""
    lifts = level_lifts(datum)
    return sla.block_diag(*[lifts[k] for k in datum.level_range()])


def modular_lift(datum: BundleDatum, lifts: dict[int, np.ndarray] | None = None) -> np.ndarray:
    lifts = lifts if lifts is not None else level_lifts(datum)
    return sla.block_diag(*[datum.mu**k * lifts[k] for k in datum.level_range()])


def reference_dirac(datum: BundleDatum) -> np.ndarray:
    return np.kron(np.diag([datum.mu**k for k in datum.level_range()]), datum.d0)


def twisted_derivation(datum: BundleDatum, a: Components) -> np.ndarray:
    """delta(a) = D~ a - mu^n a D~ summed over homogeneous parts."""
    d = reference_dirac(datum)
    out = np.zeros((datum.dim, datum.dim), dtype=complex)
    for n, b in a.items():
        x = embed(datum, {n: b})
        out += d @ x - datum.mu**n * x @ d
    return out


# ---------------------------------------------------------------------------
# beta, derivations and slip-norms


def gamma_operator(datum: BundleDatum, mu: float | None = None) -> np.ndarray:
    mu = datum.mu if mu is None else mu
    return level_diag(datum, lambda k: mu ** (k / 2))


def beta_i(datum: BundleDatum, a: Components, mu: float | None = None) -> np.ndarray:
    mu = datum.mu if mu is None else mu
    return embed(datum, {n: mu ** (-n / 2) * b for n, b in a.items()})


def beta_minus_i(datum: BundleDatum, a: Components, mu: float | None = None) -> np.ndarray:
    mu = datum.mu if mu is None else mu
    return embed(datum, {n: mu ** (n / 2) * b for n, b in a.items()})


def number_operator(datum: BundleDatum) -> np.ndarray:
    return level_diag(datum, float)


def full_gamma(datum: BundleDatum) -> np.ndarray:
    if datum.gamma0 is None:
        raise StructureError("ungraded datum has no grading operator")
    return np.kron(np.eye(datum.n_levels), datum.gamma0)


def delta_ver(datum: BundleDatum, a: Components) -> np.ndarray:
    return embed(datum, {n: n * b for n, b in a.items()})


def delta_hor(datum: BundleDatum, a: Components, dg: np.ndarray | None = None) -> np.ndarray:
    dg = modular_lift(datum) if dg is None else dg
    return dg @ beta_i(datum, a) - beta_minus_i(datum, a) @ dg


def l_ver(datum: BundleDatum, a: Components) -> float:
    return opnorm(delta_ver(datum, a))


def l_hor(datum: BundleDatum, a: Components, dg: np.ndarray | None = None) -> float:
    return opnorm(delta_hor(datum, a, dg))


def l_tot(datum: BundleDatum, a: Components, dg: np.ndarray | None = None, sign: int = 1) -> float:
    v = delta_ver(datum, a)
    h = delta_hor(datum, a, dg)
    if datum.graded:
        return opnorm(full_gamma(datum) @ v + sign * h)
    return max(opnorm(v + 1j * h), opnorm(v - 1j * h))


def sigma(datum: BundleDatum, a: Components, lam: complex) -> Components:
    return {n: lam**n * b for n, b in a.items()}


# ---------------------------------------------------------------------------
# structural residuals


def modular_lift_formula_residual(datum: BundleDatum, a: Components, dg: np.ndarray | None = None) -> float:
    """D_G phi(a) xi - (delta(a) xi + mu^n phi(a) D_0 xi) on level-0 vectors."""
    dg = modular_lift(datum) if dg is None else dg
    p0 = level_projection(datum, 0)
    d0full = np.kron(np.eye(datum.n_levels), datum.d0)
    worst = 0.0
    for n, b in a.items():
        if abs(n) > datum.levels:
            continue
        x = embed(datum, {n: b})
        lhs = dg @ x @ p0
        rhs = twisted_derivation(datum, {n: b}) @ p0 + datum.mu**n * x @ d0full @ p0
        worst = max(worst, rel_residual(lhs - rhs, lhs, rhs))
    return worst


def twisted_delta_residual(datum: BundleDatum, a: Components, dg: np.ndarray | None = None) -> float:
    """delta_hor(a) = mu^{-n/2} delta(a) for each homogeneous part, on all blocks."""
    dg = modular_lift(datum) if dg is None else dg
    worst = 0.0
    for n, b in a.items():
        lhs = delta_hor(datum, {n: b}, dg)
        rhs = datum.mu ** (-n / 2) * twisted_derivation(datum, {n: b})
        worst = max(worst, rel_residual(lhs - rhs, lhs, rhs))
    return worst


def horizontal_commutator_residual(datum: BundleDatum, a: Components) -> float:
    """[untwisted lift, a] on level m equals mu^{-n-m} delta(a) on level m."""
    h = horizontal_operator(datum)
    worst = 0.0
    for n, b in a.items():
        x = embed(datum, {n: b})
        comm = h @ x - x @ h
        dl = twisted_derivation(datum, {n: b})
        for m in datum.level_range():
            if abs(m + n) > datum.levels:
                continue
            lhs = level_block(datum, comm, m + n, m)
            rhs = datum.mu ** (-n - m) * level_block(datum, dl, m + n, m)
            worst = max(worst, rel_residual(lhs - rhs, lhs, rhs))
    return worst


def twisted_leibniz_residual(datum: BundleDatum, a: Components, b: Components, dg: np.ndarray | None = None,
                             mu_beta: float | None = None) -> float:
    """delta_hor(ab) - delta_hor(a) beta_i(b) - beta_{-i}(a) delta_hor(b) with a chosen twist."""
    dg = modular_lift(datum) if dg is None else dg
    mb = datum.twist() if mu_beta is None else mu_beta
    lhs = delta_hor(datum, multiply(a, b), dg)
    t1 = delta_hor(datum, a, dg) @ beta_i(datum, b, mb)
    t2 = beta_minus_i(datum, a, mb) @ delta_hor(datum, b, dg)
    # products of truncated shifts lose the top levels; compare on vectors that stay inside
    keep = _interior(datum, a, b)
    return rel_residual(keep @ (lhs - t1 - t2) @ keep, lhs, t1, t2)


def _interior(datum: BundleDatum, *elements: Components) -> np.ndarray:
    reach = sum(max((abs(n) for n in e), default=0) for e in elements)
    return level_diag(datum, lambda k: 1.0 if abs(k) + reach <= datum.levels else 0.0)


def fixed_part_block_residual(datum: BundleDatum, a: Components, dg: np.ndarray | None = None) -> float:
    """delta_hor(P_0 a) Q_n = Q_n delta_hor(a) Q_n for all level projections Q_n."""
    dg = modular_lift(datum) if dg is None else dg
    full = delta_hor(datum, a, dg)
    fixed = delta_hor(datum, {0: a[0]} if 0 in a else {}, dg)
    worst = 0.0
    for n in datum.level_range():
        q = level_projection(datum, n)
        worst = max(worst, rel_residual(fixed @ q - q @ full @ q, fixed, full))
    return worst


def base_commutator_gap(datum: BundleDatum, b0: np.ndarray, dg: np.ndarray | None = None) -> tuple[float, float]:
    """(||[D_0, b]||, ||delta_hor(b)||) for a degree-0 element b."""
    comm = datum.d0 @ b0 - b0 @ datum.d0
    return opnorm(comm), l_hor(datum, {0: b0}, dg)


def circle_quotient_sup(datum: BundleDatum, a: Components, n_grid: int = 256) -> float:
    """sup over a circle grid of ||sigma_lambda(a) - a|| / |t| with lambda = e^{it}."""
    x = embed(datum, a)
    best = 0.0
    for t in np.linspace(-math.pi, math.pi, n_grid + 1)[1:]:
        if abs(t) < 1e-15:
            continue
        y = embed(datum, sigma(datum, a, complex(math.cos(t), math.sin(t))))
        best = max(best, opnorm(y - x) / abs(t))
    return best


# ---------------------------------------------------------------------------
# product operator, resolvent bound, Kucerovsky conditions


def vertical_horizontal_pair(datum: BundleDatum, dg: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(V, Hh) with product operator V + Hh; V and Hh anticommute."""
    dg = modular_lift(datum) if dg is None else dg
    n = number_operator(datum)
    if datum.graded:
        return n @ full_gamma(datum), dg
    z = np.zeros_like(dg)
    v = np.block([[z, n], [n, z]])
    h = np.block([[z, -1j * dg], [1j * dg, z]])
    return v, h


def check_anticommutation(datum: BundleDatum, dg: np.ndarray | None = None, tol: float = 1e-13) -> float:
    dg = modular_lift(datum) if dg is None else dg
    if not datum.graded:
        return 0.0
    g = full_gamma(datum)
    res = rel_residual(g @ dg + dg @ g, dg)
    if res > tol:
        raise StructureError(f"modular lift does not anticommute with the grading (residual {res:.2e})")
    return res


def product_operator(datum: BundleDatum, dg: np.ndarray | None = None) -> np.ndarray:
    check_anticommutation(datum, dg)
    v, h = vertical_horizontal_pair(datum, dg)
    return v + h


@dataclass
class Report:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def resolvent_bound_check(datum: BundleDatum, max_block: int | None = None, tol: float = 1e-12) -> Report:
    dg = modular_lift(datum)
    check_anticommutation(datum, dg)
    max_block = datum.levels if max_block is None else min(max_block, datum.levels)
    rows = {}
    ok = True
    for n in range(-max_block, max_block + 1):
        d = level_block(datum, dg, n, n)
        if datum.graded:
            t = n * datum.gamma0 + d
        else:
            z = np.zeros_like(d)
            eye = n * np.eye(d.shape[0])
            t = np.block([[z, eye - 1j * d], [eye + 1j * d, z]])
        r = np.linalg.inv(1j * np.eye(t.shape[0]) + t)
        val = opnorm(r)
        bound = (1 + n * n) ** -0.5
        rows[n] = {"norm": val, "bound": bound}
        ok &= val <= bound * (1 + tol)
    return Report("resolvent bound", ok, {"blocks": rows})


def kucerovsky_check(datum: BundleDatum, rng: np.random.Generator, n_vectors: int = 100, tol: float = 1e-12) -> Report:
    """<P xi, V xi> + <V xi, P xi> >= 0 and equals 2 ||V xi||^2 (V the vertical part)."""
    dg = modular_lift(datum)
    check_anticommutation(datum, dg)
    v, h = vertical_horizontal_pair(datum, dg)
    p = v + h
    worst_pos = math.inf
    worst_eq = 0.0
    for _ in range(n_vectors):
        xi = rng.normal(size=p.shape[0]) + 1j * rng.normal(size=p.shape[0])
        xi /= np.linalg.norm(xi)
        val = 2 * np.vdot(p @ xi, v @ xi).real
        nv = np.linalg.norm(v @ xi) ** 2
        worst_pos = min(worst_pos, val)
        worst_eq = max(worst_eq, abs(val - 2 * nv) / max(1.0, nv))
    return Report(
        "kucerovsky positivity",
        worst_pos >= -tol and worst_eq <= 1e-10,
        {"min_value": worst_pos, "max_rel_gap_to_2_norm_sq": worst_eq},
    )


# ---------------------------------------------------------------------------
# Christensen's characterization


def christensen_check(t: np.ndarray, d: np.ndarray, grid: Sequence[float], tol: float = 1e-10) -> Report:
    """Compare ||[D,T]|| with max over the grid of ||e^{itD} T e^{-itD} - T|| / |t|."""
    comm = opnorm(d @ t - t @ d)
    w, u = np.linalg.eigh(d)
    tt = u.conj().T @ t @ u
    quotients = {}
    for s in grid:
        if s == 0:
            raise ValueError("grid points must be nonzero")
        ph = np.exp(1j * s * w)
        moved = ph[:, None] * tt * ph.conj()[None, :]
        quotients[float(s)] = opnorm(moved - tt) / abs(s)
    sup = max(quotients.values())
    small = min(quotients, key=abs)
    gap = (comm - quotients[small]) / comm if comm > 0 else 0.0
    return Report(
        "christensen",
        sup <= comm + tol,
        {"commutator_norm": comm, "grid_sup": sup, "smallest_t": small, "relative_gap_at_smallest_t": gap},
    )


# ---------------------------------------------------------------------------
# hypothesis checks for the compactness theorem


def li_hypotheses_check(
    datum: BundleDatum,
    L: Callable[[Components], float],
    L_beta: Callable[[Components], float],
    rng: np.random.Generator,
    *,
    n_samples: int = 10,
    n_lambda: int = 8,
    tol: float = 1e-10,
    epsilon: float = 0.25,
) -> dict:
    """Finite-dimensional evidence for each hypothesis; the compactness item is a diagnostic only."""
    from .metrics import ball_total_boundedness

    dg = modular_lift(datum)
    deg = [n for n in (-1, 0, 1) if abs(n) <= datum.levels]
    samples = [random_element(datum, rng, deg) for _ in range(n_samples)]
    out: dict = {}

    # (1) invariance of the algebra under the circle action
    lam = np.exp(1j * rng.uniform(0, 2 * math.pi))
    inv_ok = all(set(sigma(datum, a, lam)) == set(a) for a in samples)
    out["1_circle_invariance"] = {"status": "pass" if inv_ok else "fail"}

    # (2) frames in degree +-1 on levels unaffected by truncation
    inner = [k for k in datum.level_range() if abs(k) < datum.levels] or [0]
    right = sum(c @ c.conj().T for c in datum.frame) if datum.levels else np.eye(datum.base_dim)
    left = sum(c.conj().T @ c for c in datum.frame) if datum.levels else np.eye(datum.base_dim)
    eye = np.eye(datum.base_dim)
    res2 = max(opnorm(right - eye), opnorm(left - eye))
    out["2_frames"] = {"status": "pass" if res2 < 1e-12 else "fail", "residual": res2, "levels_checked": inner}

    # (3) domination constants
    c_ell = c_beta = 0.0
    for a in samples:
        la = L(a)
        if la > tol:
            c_ell = max(c_ell, l_ver(datum, a) / la)
            c_beta = max(c_beta, L_beta(a) / la)
    out["3_domination"] = {"status": "pass", "C_vertical": c_ell, "C_beta": c_beta}

    # (4) twisted Leibniz with the declared twist, and beta on degree 0 is the identity
    mb = datum.twist()
    worst, witness = 0.0, None
    viol, vwit = 0.0, None
    for a, b in zip(samples, samples[1:] + samples[:1]):
        r = twisted_leibniz_residual(datum, a, b, dg, mu_beta=mb)
        if r > worst:
            worst, witness = r, (sorted(a), sorted(b))
        keep = _interior(datum, a, b)
        lhs = opnorm(keep @ delta_hor(datum, multiply(a, b), dg) @ keep)
        rhs = L_beta(a) * opnorm(beta_i(datum, b, mb)) + opnorm(beta_minus_i(datum, a, mb)) * L_beta(b)
        if lhs - rhs > viol:
            viol, vwit = lhs - rhs, (sorted(a), sorted(b))
    b0 = samples[0].get(0, np.eye(datum.base_dim))
    hom = opnorm(beta_i(datum, {0: b0}, mb) - embed(datum, {0: b0}))
    ok4 = worst < 1e-12 and viol <= tol and hom < 1e-12
    out["4_twisted_leibniz"] = {
        "status": "pass" if ok4 else "fail",
        "identity_residual": worst,
        "inequality_violation": viol,
        "witness_degrees": witness if worst >= 1e-12 else vwit,
    }

    # (5) invariance of L_beta under the circle action
    worst5 = 0.0
    for a in samples[:3]:
        base = L_beta(a)
        for t in np.linspace(0, 2 * math.pi, n_lambda, endpoint=False):
            worst5 = max(worst5, abs(L_beta(sigma(datum, a, np.exp(1j * t))) - base))
    out["5_circle_invariance_of_L_beta"] = {"status": "pass" if worst5 <= tol else "fail", "max_gap": worst5}

    # (6) compactness: finite-dimensional diagnostic only
    basis = _degree_zero_selfadjoint_basis(datum)
    net = ball_total_boundedness(
        basis, lambda x: L_beta({0: x}), epsilon, sample_budget=200, rng=rng
    )
    out["6_compactness"] = {
        "status": "diagnostic, not proof",
        "net_size": net.net_size,
        "max_uncovered_distance": net.max_distance,
    }

    # projection contraction spot checks
    worst_pc = 0.0
    for a in samples:
        full = L(a)
        for n, b in a.items():
            worst_pc = max(worst_pc, L({n: b}) - full)
    out["projection_contraction"] = {"status": "pass" if worst_pc <= tol else "fail", "max_excess": worst_pc}
    return out


def _degree_zero_selfadjoint_basis(datum: BundleDatum) -> list[np.ndarray]:
    w = datum.w
    out = [np.eye(datum.base_dim, dtype=complex)]
    for i in range(w):
        for j in range(i, w):
            e = np.zeros((w, w), dtype=complex)
            if i == j:
                e[i, i] = 1
                if i == 0:
                    continue
                out.append(np.kron(e, np.eye(datum.s)))
            else:
                e[i, j] = e[j, i] = 1
                out.append(np.kron(e, np.eye(datum.s)))
                f = np.zeros((w, w), dtype=complex)
                f[i, j], f[j, i] = -1j, 1j
                out.append(np.kron(f, np.eye(datum.s)))
    return out


__all__ = [
    "BundleDatum",
    "ConnectionData",
    "InvalidFrame",
    "Report",
    "StructureError",
    "base_commutator_gap",
    "beta_i",
    "beta_minus_i",
    "check_anticommutation",
    "check_frame",
    "christensen_check",
    "circle_quotient_sup",
    "degree_frame",
    "delta_hor",
    "delta_ver",
    "embed",
    "fixed_part_block_residual",
    "full_gamma",
    "gamma_operator",
    "grassmann_connection",
    "horizontal_commutator_residual",
    "horizontal_lift",
    "horizontal_lift_frame_picture",
    "horizontal_operator",
    "kucerovsky_check",
    "l_hor",
    "l_tot",
    "l_ver",
    "level_lifts",
    "li_hypotheses_check",
    "modular_lift",
    "modular_lift_formula_residual",
    "multiply",
    "number_operator",
    "opnorm",
    "product_operator",
    "random_datum",
    "random_element",
    "reference_dirac",
    "resolvent_bound_check",
    "sigma",
    "star",
    "trivial_datum",
    "twisted_delta_residual",
    "twisted_derivation",
    "twisted_leibniz_residual",
    "vertical_horizontal_pair",
]
