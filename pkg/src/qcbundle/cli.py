"""Command-line interface: element parser, identity suites, seminorms and metrics.

Exit codes: 0 success, 1 mathematical failure, 2 usage or configuration error.
Every flag can be defaulted through an environment variable ``QCB_<FLAG>``
(for example ``QCB_R=2`` or ``QCB_SEED=7``).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import re
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ncalg import AlgebraElement, Presentation
from .scalars import ONE, Q, Scalar, V

# ---------------------------------------------------------------------------
# expression language


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line, self.column = line, col


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Param:
    name: str  # "q" or "v"


@dataclass(frozen=True)
class Gen:
    family: str  # z, u, E, F, K
    index: tuple[int, ...]
    pos: int


@dataclass(frozen=True)
class Star:
    arg: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<gen>z\d+|u\d\d|[EFK]\d+)|(?P<param>[qv])(?![A-Za-z0-9])|(?P<op>[-+*/^()'])|(?P<bad>\S))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        kind = m.lastgroup
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group(kind)!r}", text, m.start(kind))
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value: str | None = None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", self.text, 0)
        node = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", self.text, pos)
        return node

    def sum(self):
        node = self.unary()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Neg(self.unary())
        return self.product()

    def _starts_atom(self) -> bool:
        kind, val, _ = self.peek()
        return kind in ("num", "gen", "param") or val == "("

    def product(self):
        node = self.power()
        while True:
            kind, val, _ = self.peek()
            if val in ("*", "/") and kind == "op":
                self.take()
                node = BinOp(val, node, self.power())
            elif self._starts_atom():
                node = BinOp("*", node, self.power())
            else:
                return node

    def power(self):
        node = self.atom()
        while True:
            _, val, _ = self.peek()
            if val == "'":
                self.take()
                node = Star(node)
            elif val == "^":
                self.take()
                sign = 1
                if self.peek()[1] == "-":
                    self.take()
                    sign = -1
                k, v, p = self.take()
                if k != "num":
                    raise ParseError("expected an integer exponent", self.text, p)
                node = Pow(node, sign * int(v))
            else:
                return node

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(Fraction(int(val)))
        if kind == "param":
            return Param(val)
        if kind == "gen":
            fam = val[0]
            digits = val[1:]
            idx = (int(digits[0]), int(digits[1])) if fam == "u" else (int(digits),)
            return Gen(fam, idx, pos)
        if val == "(":
            node = self.sum()
            self.take(")")
            return node
        raise ParseError(f"unexpected {val or 'end of input'!r}", self.text, pos)


def parse(text: str):
    """Parse an element expression into an AST."""
    return _Parser(text).parse()


def _families(node, acc: set) -> set:
    if isinstance(node, Gen):
        acc.add("uq" if node.family in "EFK" else node.family)
    for attr in ("arg", "base", "left", "right"):
        if hasattr(node, attr):
            _families(getattr(node, attr), acc)
    return acc


def algebra_for(node, r: int) -> Presentation:
    from . import qhopf
    from .sphere import sphere_presentation
    from .suq import suq_presentation

    fams = _families(node, set())
    if len(fams) > 1:
        raise ValueError(f"expression mixes generator families {sorted(fams)}")
    fam = fams.pop() if fams else "z"
    if fam == "z":
        return sphere_presentation(r)
    if fam == "u":
        return suq_presentation(r + 1)
    return qhopf.uq_presentation(r)


def evaluate(node, r: int, presentation: Presentation | None = None):
    """Evaluate an AST to an AlgebraElement (scalars are promoted to multiples of 1)."""
    p = presentation or algebra_for(node, r)
    val = _eval(node, p, r, node)
    return p.scalar(val) if isinstance(val, Scalar) else val


def _gen_element(node: Gen, p: Presentation, r: int) -> AlgebraElement:
    fam, idx = node.family, node.index
    if fam == "z":
        if not 1 <= idx[0] <= r + 1:
            raise IndexError(f"z{idx[0]} out of range for r={r}")
        return p.element({(idx[0] - 1,): ONE})
    if fam == "u":
        return p.u(*idx)
    if not 1 <= idx[0] <= r:
        raise IndexError(f"{fam}{idx[0]} out of range for r={r}")
    return p.element({(p.letters.index(f"{fam}{idx[0]}"),): ONE})


def _eval(node, p: Presentation, r: int, root):
    if isinstance(node, Num):
        return Scalar.from_fraction(node.value)
    if isinstance(node, Param):
        return Q if node.name == "q" else V
    if isinstance(node, Gen):
        return _gen_element(node, p, r)
    if isinstance(node, Star):
        val = _eval(node.arg, p, r, root)
        return val if isinstance(val, Scalar) else val.star()
    if isinstance(node, Neg):
        val = _eval(node.arg, p, r, root)
        return -val
    if isinstance(node, Pow):
        if node.exp < 0 and isinstance(node.base, Gen) and node.base.family == "K":
            kinv = p.element({(p.letters.index(f"K{node.base.index[0]}^-1"),): ONE})
            return kinv ** (-node.exp) if node.exp != -1 else kinv
        val = _eval(node.base, p, r, root)
        if isinstance(val, Scalar):
            return val**node.exp
        if node.exp < 0:
            raise ValueError("negative powers are only defined for scalars and K generators")
        return val**node.exp if node.exp else p.one()
    if isinstance(node, BinOp):
        a = _eval(node.left, p, r, root)
        b = _eval(node.right, p, r, root)
        if node.op == "/":
            if not isinstance(b, Scalar):
                raise ValueError("division is only defined by scalars")
            return a / b if isinstance(a, Scalar) else a.scale(b.inverse())
        if node.op == "*":
            if isinstance(a, Scalar) and isinstance(b, Scalar):
                return a * b
            if isinstance(a, Scalar):
                return b.scale(a)
            if isinstance(b, Scalar):
                return a.scale(b)
            return a * b
        if isinstance(a, Scalar) and isinstance(b, Scalar):
            return a + b if node.op == "+" else a - b
        a = p.scalar(a) if isinstance(a, Scalar) else a
        b = p.scalar(b) if isinstance(b, Scalar) else b
        return a + b if node.op == "+" else a - b
    raise TypeError(f"unknown node {node!r}")


def parse_element(text: str, r: int, presentation: Presentation | None = None) -> AlgebraElement:
    return evaluate(parse(text), r, presentation)


# ---------------------------------------------------------------------------
# configuration and output


def _env_default(name: str, cast, fallback):
    raw = os.environ.get(f"QCB_{name.upper().replace('-', '_')}")
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for QCB_{name.upper()}: {raw!r}") from exc


def _emit(payload: dict, args, rows_csv: list[dict] | None = None) -> None:
    if args.format == "csv" and rows_csv is not None:
        buf = io.StringIO()
        if rows_csv:
            w = csv.DictWriter(buf, fieldnames=list(rows_csv[0]))
            w.writeheader()
            w.writerows(rows_csv)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return str(x)


def _meta(args) -> dict:
    return {"generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat()} if args.timestamp else {}


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    from .suites import SUITES

    names = list(SUITES) if args.suite == "all" else [args.suite]
    rows = []
    for name in names:
        kwargs = {"seed": args.seed, "max_degree": args.max_degree}
        if args.samples is not None:
            kwargs["samples"] = args.samples
        if name == "confluence":
            kwargs = {"mutated": args.mutated, "degree": max(args.max_degree, 6)}
        elif name == "frame-vanishing":
            kwargs = {"max_degree": args.max_degree}
        for row in SUITES[name](args.r, **kwargs):
            d = row.to_dict()
            d["suite"] = name
            rows.append(d)
    ok = all(r["status"] == "pass" for r in rows)
    _emit({"command": "verify", "r": args.r, "seed": args.seed, "passed": ok, "rows": rows, "meta": _meta(args)}, args)
    return 0 if ok else 1


def cmd_confluence(args) -> int:
    from .suites import confluence_suite

    rows = [r.to_dict() for r in confluence_suite(args.r, degree=max(args.max_degree, 6), mutated=args.mutated)]
    ok = all(r["status"] == "pass" for r in rows)
    _emit({"command": "confluence", "r": args.r, "passed": ok, "rows": rows, "meta": _meta(args)}, args)
    return 0 if ok else 1


def cmd_frames(args) -> int:
    from .sphere import frame_for_degree, verify_frame

    rows = []
    for n in range(-args.max_degree, args.max_degree + 1):
        f = frame_for_degree(args.r, n)
        rows.append({"degree": n, "size": len(f), "verified": verify_frame(f),
                     "elements": [str(x) for x in f.elements] if args.show else None})
    ok = all(r["verified"] for r in rows)
    _emit({"command": "frames", "r": args.r, "passed": ok, "rows": rows, "meta": _meta(args)}, args,
          [{k: v for k, v in r.items() if k != "elements"} for r in rows])
    return 0 if ok else 1


def _rep(args):
    from .repnorms import build_sphere_rep

    cutoff = args.cutoff if args.cutoff is not None else (40 if args.r == 1 else 10)
    return build_sphere_rep(args.r, args.q, cutoff)


def cmd_rep(args) -> int:
    rep = _rep(args)
    payload = {"command": "rep", "r": args.r, "q": args.q, "cutoff": rep.cutoff, "validation": rep.validation,
               "meta": _meta(args)}
    _emit(payload, args)
    return 0


def cmd_seminorm(args) -> int:
    from .repnorms import UnsupportedRank, seminorm_hor, seminorm_tot, seminorm_ver

    rep = _rep(args)
    rows = []
    ok = True
    for text in args.exprs:
        a = parse_element(text, args.r)
        if a.presentation is not rep.presentation:
            raise ConfigError(f"{text!r} is not a sphere element")
        for kind, fn in (("ver", seminorm_ver), ("hor", seminorm_hor), ("tot", seminorm_tot)):
            try:
                val = fn(a, rep)
                ok &= val.converged
                rows.append({"element": str(a), "kind": kind, "value": val.value,
                             "cutoffs": f"{val.cutoffs[0]}/{val.cutoffs[1]}", "converged": val.converged,
                             "note": val.label})
            except UnsupportedRank:
                rows.append({"element": str(a), "kind": kind, "value": "UNSUPPORTED", "cutoffs": "",
                             "converged": "", "note": "numeric horizontal seminorm needs r = 1"})
    _emit({"command": "seminorm", "r": args.r, "q": args.q, "rows": rows, "meta": _meta(args)}, args, rows)
    return 0 if ok else 1


def cmd_metric(args) -> int:
    from .metrics import HermitianSlipNorm, mk_distance
    from .repnorms import _columns, _legs, vertical_element

    rep = _rep(args)
    if args.r != 1:
        raise ConfigError("metric runs use the numeric total seminorm, available for r = 1")
    S = rep.presentation
    words = sorted({w for d in range(args.span_degree + 1) for w in _normal_words(S, d)}, key=S.order_key)
    basis_elems = []
    for w in words:
        x = S.element({w: ONE})
        if not w:
            basis_elems.append((x, 1.0 + 0j))
            continue
        basis_elems.append((x, 0.5 + 0j))  # (x + x*)/2 built below
        basis_elems.append((x, -0.5j))  # (x - x*)/(2i)
    thetas = np.linspace(0, 2 * math.pi, args.theta_grid, endpoint=False)
    cols = _columns(rep, args.span_degree + 2)
    nd = rep.fiber_dim
    cols2 = np.concatenate([cols, cols + nd])

    def fiber(parts, t):
        return sum(np.exp(1j * m * t) * mat for m, mat in parts.items()) if parts else np.zeros((nd, nd))

    def block(a, t):
        hol, anti = _legs(a)
        x = vertical_element(a)
        px, ph, pa = rep.fourier_parts(x), rep.fourier_parts(hol), rep.fourier_parts(anti)
        X = fiber(px, t)
        return np.block([[X, fiber(pa, t)], [fiber(ph, t), -X]])[:, cols2]

    images = [[] for _ in thetas]
    state_rows = []
    states = [s.strip() for s in args.states.split(",")]
    for x, c in basis_elems:
        for k, t in enumerate(thetas):
            if c == 1.0:
                m = block(x, t)
            else:
                m = c * block(x, t) + np.conj(c) * block(x.star(), t)
            z = np.zeros((m.shape[0], m.shape[0]), dtype=complex)
            images[k].append(np.block([[np.zeros((m.shape[1], m.shape[1])), m.conj().T], [m, z]]))
        vals = []
        for s in states:
            k = _state_index(s)
            m0 = rep.fourier_parts(x).get(0)
            ex = complex(m0[k, k]) if m0 is not None else 0.0
            vals.append((c * ex + np.conj(c) * np.conj(ex)).real if c != 1.0 else ex.real)
        state_rows.append(vals)
    L = HermitianSlipNorm(images)
    vals = np.array(state_rows)
    res = mk_distance(vals[:, 0], vals[:, 1], L, seed=args.seed, restarts=args.restarts, iterations=args.iterations)
    payload = {"command": "metric", "r": args.r, "q": args.q, "states": states, "span_degree": args.span_degree,
               "bound": res.bound, "infinite": res.infinite, "witness": res.witness, "iterations": res.iterations,
               "seed": args.seed, "note": "lower bound; slip-norm evaluated on a grid of Fourier fibers",
               "meta": _meta(args)}
    _emit(payload, args)
    return 0


def _normal_words(S, d: int):
    import itertools

    for w in itertools.product(range(len(S.letters)), repeat=d):
        if S.is_normal(w):
            yield w


def _state_index(name: str) -> int:
    if name == "vac":
        return 0
    m = re.fullmatch(r"shift(\d+)", name)
    if m:
        return int(m.group(1))
    raise ConfigError(f"unknown state {name!r} (use vac or shiftK)")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=int, default=_env_default("r", int, 1))
    common.add_argument("--q", type=float, default=_env_default("q", float, 0.5))
    common.add_argument("--max-degree", type=int, default=_env_default("max_degree", int, 3))
    common.add_argument("--cutoff", type=int, default=_env_default("cutoff", int, None))
    common.add_argument("--seed", type=int, default=_env_default("seed", int, 0))
    common.add_argument("--tol", type=float, default=_env_default("tol", float, 1e-12))
    common.add_argument("--out", default=_env_default("out", str, None))
    common.add_argument("--format", choices=["json", "csv"], default=_env_default("format", str, "json"))
    common.add_argument("--timestamp", action="store_true", help="add a generation timestamp under 'meta'")

    parser = argparse.ArgumentParser(prog="qcb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run identity suites")
    p.add_argument("--suite", default="all",
                   choices=["all", "confluence", "sphere-identities", "frame-vanishing", "twisted-derivations",
                            "hopf", "canonical-map", "fdbundle"])
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--mutated", action="store_true", help="use the deliberately broken sphere relations")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("confluence", parents=[common], help="critical-pair report for the sphere relations")
    p.add_argument("--mutated", action="store_true")
    p.set_defaults(func=cmd_confluence)

    p = sub.add_parser("frames", parents=[common], help="frames of the spectral subspaces")
    p.add_argument("--show", action="store_true", help="print the frame elements")
    p.set_defaults(func=cmd_frames)

    p = sub.add_parser("rep", parents=[common], help="build and validate a truncated representation")
    p.set_defaults(func=cmd_rep)

    p = sub.add_parser("seminorm", parents=[common], help="vertical, horizontal and total seminorms")
    p.add_argument("exprs", nargs="+")
    p.set_defaults(func=cmd_seminorm)

    p = sub.add_parser("metric", parents=[common], help="Monge-Kantorovich lower bound between vector states")
    p.add_argument("--span-degree", type=int, default=1)
    p.add_argument("--states", default="vac,shift1")
    p.add_argument("--theta-grid", type=int, default=8)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--iterations", type=int, default=100)
    p.set_defaults(func=cmd_metric)
    return parser


def _validate(args) -> None:
    if args.r < 1:
        raise ConfigError("--r must be at least 1")
    if not 0 < args.q < 1:
        raise ConfigError("--q must lie in (0, 1)")
    if args.max_degree < 0:
        raise ConfigError("--max-degree must be nonnegative")
    if args.cutoff is not None and args.cutoff < 4:
        raise ConfigError("--cutoff must be at least 4")
    if args.tol <= 0:
        raise ConfigError("--tol must be positive")


def main(argv: Sequence[str] | None = None) -> int:
    try:
        parser = build_parser()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(args)
        return args.func(args)
    except (ConfigError, ParseError, IndexError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


__all__ = ["ConfigError", "ParseError", "build_parser", "evaluate", "main", "parse", "parse_element"]
