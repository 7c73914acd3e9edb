"""Monge-Kantorovich distance lower bounds and total-boundedness diagnostics.

A slip-norm is described on coefficient vectors ``c`` of a finite span.  The
main implementation, :class:`HermitianSlipNorm`, covers everything of the form

    L(c) = max over blocks of || sum_i c_i H_i ||

with Hermitian images ``H_i`` (operator-valued slip-norms become Hermitian via
the dilation [[0, T], [T*, 0]]).  Diagonal images may be given as 1-d arrays.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.optimize as so
from scipy.special import logsumexp, softmax

# ---------------------------------------------------------------------------
# spans and states


@dataclass
class OperatorSystemSpan:
    """Real span of self-adjoint matrices containing the identity."""

    basis: list[np.ndarray]

    def __post_init__(self):
        if not self.basis:
            raise ValueError("empty span")
        for b in self.basis:
            if b.ndim == 2 and not np.allclose(b, b.conj().T, atol=1e-12):
                raise ValueError("span basis must consist of self-adjoint matrices")
        eye = _as_matrix(self.basis[0]) * 0 + np.eye(_as_matrix(self.basis[0]).shape[0])
        stack = np.array([_as_matrix(b).ravel() for b in self.basis]).T
        coef, *_ = np.linalg.lstsq(stack, eye.ravel(), rcond=None)
        if np.linalg.norm(stack @ coef - eye.ravel()) > 1e-9:
            raise ValueError("identity is not in the span")
        self.identity_coeffs = coef.real

    def __len__(self) -> int:
        return len(self.basis)

    def combine(self, c: np.ndarray) -> np.ndarray:
        return sum(ci * _as_matrix(b) for ci, b in zip(c, self.basis))


def _as_matrix(b: np.ndarray) -> np.ndarray:
    return np.diag(b) if b.ndim == 1 else b


@dataclass
class StateSpec:
    """A state given by a density matrix or a unit vector."""

    density: np.ndarray | None = None
    vector: np.ndarray | None = None

    def __post_init__(self):
        if (self.density is None) == (self.vector is None):
            raise ValueError("give exactly one of density or vector")
        if self.vector is not None:
            n = np.linalg.norm(self.vector)
            if abs(n - 1) > 1e-9:
                raise ValueError("state vector must have unit norm")
        else:
            d = self.density
            if abs(np.trace(d) - 1) > 1e-9 or np.linalg.eigvalsh((d + d.conj().T) / 2).min() < -1e-12:
                raise ValueError("density must be positive with unit trace")

    def __call__(self, x: np.ndarray) -> float:
        if x.ndim == 1:
            x = np.diag(x)
        if self.vector is not None:
            return float(np.vdot(self.vector, x @ self.vector).real)
        return float(np.trace(self.density @ x).real)

    @staticmethod
    def point(n: int, k: int) -> StateSpec:
        v = np.zeros(n, dtype=complex)
        v[k] = 1
        return StateSpec(vector=v)


def state_values(span: OperatorSystemSpan, state: Callable[[np.ndarray], float]) -> np.ndarray:
    return np.array([state(b) for b in span.basis], dtype=float)


# ---------------------------------------------------------------------------
# slip-norms on coefficient vectors


class HermitianSlipNorm:
    def __init__(self, blocks: Sequence[Sequence[np.ndarray]], scale: float = 1.0):
        """``blocks[b][i]`` is the Hermitian image of basis element i in block b."""
        self.blocks = [np.array([np.asarray(h) for h in imgs]) for imgs in blocks]
        self.scale = scale
        self.dim = len(blocks[0])

    @staticmethod
    def from_operators(images: Sequence[np.ndarray], scale: float = 1.0) -> HermitianSlipNorm:
        """Slip-norm ||sum c_i T_i|| for arbitrary (not necessarily Hermitian) T_i."""
        return HermitianSlipNorm([[dilation(t) for t in images]], scale)

    def scaled(self, c: float) -> HermitianSlipNorm:
        out = HermitianSlipNorm.__new__(HermitianSlipNorm)
        out.blocks, out.scale, out.dim = self.blocks, self.scale * c, self.dim
        return out

    def _spectra(self, c: np.ndarray):
        for imgs in self.blocks:
            h = np.tensordot(c, imgs, axes=1)
            if h.ndim == 1:
                yield imgs, h, None
            else:
                lam, u = np.linalg.eigh(h)
                yield imgs, lam, u

    def __call__(self, c: np.ndarray) -> float:
        best = 0.0
        for _, lam, _ in self._spectra(c):
            if lam.size:
                best = max(best, float(np.abs(lam).max()))
        return self.scale * best

    def subgradient(self, c: np.ndarray) -> np.ndarray:
        """Gradient of the top eigenvalue in absolute value; ties go to the first index."""
        best, grad = -1.0, np.zeros(self.dim)
        for imgs, lam, u in self._spectra(c):
            k = int(np.argmax(np.abs(lam)))
            if abs(lam[k]) > best:
                best = abs(lam[k])
                sign = math.copysign(1.0, lam[k])
                if u is None:
                    grad = sign * imgs[:, k].real
                else:
                    vec = u[:, k]
                    grad = sign * np.einsum("i,nij,j->n", vec.conj(), imgs, vec).real
        return self.scale * grad

    def smooth(self, c: np.ndarray, tau: float) -> tuple[float, np.ndarray]:
        """Log-sum-exp upper smoothing of L and its gradient."""
        vals, grads = [], []
        for imgs, lam, u in self._spectra(c):
            both = np.concatenate([lam, -lam])
            vals.append(both)
            if u is None:
                diag_terms = imgs.real
            else:
                diag_terms = np.einsum("ik,nij,jk->nk", u.conj(), imgs, u).real
            grads.append(np.concatenate([diag_terms, -diag_terms], axis=1))
        allv = np.concatenate(vals)
        allg = np.concatenate(grads, axis=1)
        val = tau * logsumexp(allv / tau)
        w = softmax(allv / tau)
        return self.scale * val, self.scale * (allg @ w)

    def kernel(self, tol: float = 1e-10) -> np.ndarray:
        """Orthonormal basis (columns) of coefficient vectors with L = 0."""
        gram = np.zeros((self.dim, self.dim))
        for imgs in self.blocks:
            flat = imgs.reshape(self.dim, -1)
            gram += (flat.conj() @ flat.T).real
        w, u = np.linalg.eigh(gram)
        scale = max(1.0, float(w.max()) if w.size else 1.0)
        return u[:, w <= tol * scale]


class CallableSlipNorm:
    """Slip-norm given only as a function; derivatives by central differences."""

    def __init__(self, fn: Callable[[np.ndarray], float], dim: int, h: float = 1e-6):
        self.fn, self.dim, self.h = fn, dim, h

    def __call__(self, c: np.ndarray) -> float:
        return float(self.fn(c))

    def subgradient(self, c: np.ndarray) -> np.ndarray:
        g = np.zeros(self.dim)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = self.h
            g[i] = (self.fn(c + e) - self.fn(c - e)) / (2 * self.h)
        return g

    def smooth(self, c: np.ndarray, tau: float) -> tuple[float, np.ndarray]:
        return self(c), self.subgradient(c)

    def kernel(self, tol: float = 1e-10) -> np.ndarray:
        cols = [np.eye(self.dim)[:, i] for i in range(self.dim) if self.fn(np.eye(self.dim)[:, i]) <= tol]
        return np.array(cols).T if cols else np.zeros((self.dim, 0))


def dilation(t: np.ndarray) -> np.ndarray:
    z = np.zeros_like(t)
    return np.block([[z, t], [t.conj().T, z]])


# ---------------------------------------------------------------------------
# Monge-Kantorovich lower bounds


@dataclass
class DistanceResult:
    bound: float
    witness: list[float]
    infinite: bool
    iterations: int
    seed: int
    restarts: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def mk_distance(
    mu: np.ndarray,
    nu: np.ndarray,
    L: HermitianSlipNorm | CallableSlipNorm,
    *,
    restarts: int = 3,
    iterations: int = 300,
    seed: int = 0,
    polish: bool = True,
) -> DistanceResult:
    """Certified lower bound for sup{|mu(x) - nu(x)| : L(x) <= 1}.

    ``mu`` and ``nu`` are the state values on the span basis.  Each restart runs
    subgradient ascent on the ratio |g.c| / L(c) with the iterate rescaled to
    L = 1, then (optionally) a smoothed-max quasi-Newton polish.  The witness is
    always rescaled by the exact L, so the bound is sound regardless of how the
    optimizer behaves.
    """
    g = np.asarray(mu, dtype=float) - np.asarray(nu, dtype=float)
    dim = g.size
    if not np.any(np.abs(g) > 1e-15):
        return DistanceResult(0.0, [0.0] * dim, False, 0, seed)
    ker = L.kernel()
    if ker.size and np.abs(g @ ker).max() > 1e-10:
        k = int(np.argmax(np.abs(g @ ker)))
        return DistanceResult(math.inf, ker[:, k].tolist(), True, 0, seed)
    # constants are invisible to both sides; work orthogonally to the kernel
    proj = np.eye(dim) - ker @ ker.T if ker.size else np.eye(dim)
    g_eff = proj @ g

    rng = np.random.default_rng(seed)
    best_val, best_c = -1.0, None
    per_start = []
    total_iter = 0
    for s in range(restarts):
        c = g_eff.copy() if s == 0 else proj @ rng.normal(size=dim)
        c = _normalize(c, L)
        local_best, local_c = abs(g @ c), c
        for it in range(1, iterations + 1):
            ratio = g @ c
            sgn = 1.0 if ratio >= 0 else -1.0
            grad = proj @ (sgn * g - abs(ratio) * L.subgradient(c))
            nrm = np.linalg.norm(grad)
            if nrm < 1e-14:
                break
            c = _normalize(c + (0.5 / math.sqrt(it)) * np.linalg.norm(c) * grad / nrm, L)
            total_iter += 1
            val = abs(g @ c)
            if val > local_best:
                local_best, local_c = val, c
        if polish:
            local_c = _polish(g, local_c, L, proj)
            local_best = max(local_best, abs(g @ local_c))
        per_start.append(local_best)
        if local_best > best_val:
            best_val, best_c = local_best, local_c
    lval = L(best_c)
    witness = best_c / lval
    bound = abs(float(g @ witness))
    return DistanceResult(bound, witness.tolist(), False, total_iter, seed, per_start)


def _normalize(c: np.ndarray, L) -> np.ndarray:
    val = L(c)
    if val <= 0:
        raise ZeroDivisionError("slip-norm vanishes on the iterate")
    return c / val


def _polish(g: np.ndarray, c: np.ndarray, L, proj: np.ndarray) -> np.ndarray:
    sgn = 1.0 if g @ c >= 0 else -1.0
    best = c
    cur = c
    for tau in (1e-1, 1e-2, 1e-3, 1e-4):

        def f(x):
            val, dl = L.smooth(x, tau)
            num = sgn * (g @ x)
            return -num / val, -(proj @ (sgn * g / val - num * dl / val**2))

        try:
            res = so.minimize(f, cur, jac=True, method="L-BFGS-B", options={"maxiter": 500})
        except (ValueError, FloatingPointError, ZeroDivisionError):
            break
        if not np.all(np.isfinite(res.x)) or L(res.x) <= 0:
            break
        cur = _normalize(proj @ res.x, L)
        if abs(g @ cur) > abs(g @ best):
            best = cur
    return best


# ---------------------------------------------------------------------------
# total boundedness diagnostic


@dataclass
class NetReport:
    net_size: int
    max_distance: float
    samples: int
    epsilon: float
    unbounded: bool = False
    label: str = "diagnostic at finite dimension, not a proof of compactness"

    def to_dict(self) -> dict:
        return asdict(self)


def ball_total_boundedness(
    span: OperatorSystemSpan | Sequence[np.ndarray],
    L: Callable[[np.ndarray], float],
    epsilon: float,
    *,
    sample_budget: int = 500,
    rng: np.random.Generator | None = None,
) -> NetReport:
    """Greedy epsilon-net of samples from {L <= 1} modulo scalars, in operator norm.

    ``L`` is evaluated on matrices of the span.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not isinstance(span, OperatorSystemSpan):
        span = OperatorSystemSpan(list(span))
    rng = np.random.default_rng(0) if rng is None else rng
    n = span.combine(np.ones(len(span))).shape[0]
    points = []
    unbounded = False
    for _ in range(sample_budget):
        c = rng.normal(size=len(span))
        x = span.combine(c)
        x = x - (np.trace(x).real / n) * np.eye(n)
        if np.linalg.norm(x, 2) < 1e-12:
            points.append(np.zeros_like(x))
            continue
        val = L(x)
        if val <= 1e-12:
            unbounded = True
            continue
        # include interior points of the ball, not only its boundary
        points.append(x * rng.uniform() / val)
    net: list[np.ndarray] = []
    worst = 0.0
    for p in points:
        dists = [np.linalg.norm(p - y, 2) for y in net]
        d = min(dists) if dists else math.inf
        if d > epsilon:
            net.append(p)
        else:
            worst = max(worst, d)
    return NetReport(len(net), worst, len(points), epsilon, unbounded)


# ---------------------------------------------------------------------------
# spectral-projection contraction


@dataclass
class EstimateReport:
    passed: bool
    full: float
    components: dict[int, float]
    tol: float

    def to_dict(self) -> dict:
        return asdict(self)


def li_estimate_check(components: dict[int, object], L: Callable[[object], float],
                      combine: Callable[[dict[int, object]], object] | None = None,
                      tol: float = 1e-8) -> EstimateReport:
    """Check L(P_n a) <= L(a) + tol for each homogeneous component of a.

    ``components`` maps degrees to homogeneous parts; ``combine`` reassembles them
    (default: sum).
    """
    parts = list(components.values())
    if combine is not None:
        whole = combine(components)
    else:
        whole = parts[0]
        for p in parts[1:]:
            whole = whole + p
    full = L(whole)
    comp = {n: L(x) for n, x in components.items()}
    return EstimateReport(all(v <= full + tol for v in comp.values()), full, comp, tol)


# ---------------------------------------------------------------------------
# classical circle, used as an independent oracle target


def circle_trig_span(degree: int, grid: int = 4096) -> tuple[np.ndarray, HermitianSlipNorm, Callable[[float], np.ndarray]]:
    """Trig polynomials of the given degree on a grid; returns (angles, Lipschitz slip-norm, evaluation map).

    Basis order: 1, cos(k t), sin(k t) for k = 1..degree.  The slip-norm is the
    sup of |f'| over the grid, a diagonal Hermitian slip-norm.
    """
    th = np.linspace(0, 2 * math.pi, grid, endpoint=False)
    ks = np.arange(1, degree + 1)
    deriv = np.hstack([np.zeros((grid, 1)), -ks * np.sin(np.outer(th, ks)), ks * np.cos(np.outer(th, ks))])
    L = HermitianSlipNorm([list(deriv.T)])

    def point(t: float) -> np.ndarray:
        return np.concatenate([[1.0], np.cos(ks * t), np.sin(ks * t)])

    return th, L, point


def circle_lp_oracle(degree: int, s: float, t: float, grid: int = 2048) -> float:
    """max f(s) - f(t) over trig polynomials with |f'| <= 1 on a grid, by linear programming."""
    th = np.linspace(0, 2 * math.pi, grid, endpoint=False)
    ks = np.arange(1, degree + 1)
    deriv = np.hstack([np.zeros((grid, 1)), -ks * np.sin(np.outer(th, ks)), ks * np.cos(np.outer(th, ks))])

    def ev(x):
        return np.concatenate([[1.0], np.cos(ks * x), np.sin(ks * x)])

    g = ev(s) - ev(t)
    res = so.linprog(
        -g,
        A_ub=np.vstack([deriv, -deriv]),
        b_ub=np.ones(2 * grid),
        bounds=[(None, None)] * g.size,
        method="highs",
    )
    if not res.success:  # pragma: no cover
        raise RuntimeError(res.message)
    return float(-res.fun)


__all__ = [
    "CallableSlipNorm",
    "DistanceResult",
    "EstimateReport",
    "HermitianSlipNorm",
    "NetReport",
    "OperatorSystemSpan",
    "StateSpec",
    "ball_total_boundedness",
    "circle_lp_oracle",
    "circle_trig_span",
    "dilation",
    "li_estimate_check",
    "mk_distance",
    "state_values",
]
