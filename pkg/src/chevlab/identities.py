"""Symbolic identity bank: word identities certified over Z[a, b, c].

Each entry binds role names (alpha, beta, gamma, ...) to roots written over
the fundamental roots a1, a2 of a rank-2 system, and gives two word
expressions. Word syntax is a Python expression:

    x(root, p)        root unipotent
    y(root, p, q)     [x_root(p), x_-root(q)]
    z(root, p, q)     x_-root(q) x_root(p) x_-root(-q)
    conj(g, h)        g h g^-1
    inv(g)            g^-1
    [g, h]            g h g^-1 h^-1
    g * h, g ** n     products and integer powers

Root arguments are integer combinations of roles; parameters are integer
polynomials in the free variables.
"""

from __future__ import annotations

import ast
import random
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .chevrep import (
    ChevRep,
    GroupElem,
    commutator,
    conjugate,
    identity,
    unipotent,
    y_symbol,
    z_generator,
)
from .polynomials import MultiPoly, poly_eval
from .rings import FiniteRing, RingElem
from .rootsys import Root, root_expr

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class BankEntry:
    name: str
    system: str
    roles: dict[str, str]
    lhs: str
    rhs: str
    note: str = ""
    expect: str = "pass"

    @property
    def variables(self) -> tuple[str, ...]:
        names: set[str] = set()
        for expr in (self.lhs, self.rhs):
            names |= _poly_names(ast.parse(expr, mode="eval").body)
        return tuple(sorted(names))


@dataclass(frozen=True)
class Mismatch:
    row: int
    col: int
    lhs: object
    rhs: object

    def __str__(self) -> str:
        return f"entry ({self.row},{self.col}): lhs {self.lhs} != rhs {self.rhs}"


@dataclass
class IdentityResult:
    entry: BankEntry
    holds: bool
    witness: Mismatch | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        """True when the outcome matches the entry's expectation."""
        return self.holds == (self.entry.expect == "pass")


def load_bank(path: str | Path | None = None) -> list[BankEntry]:
    if path is None:
        text = resources.files("chevlab.data").joinpath("identity_bank.toml").read_text()
    else:
        text = Path(path).read_text()
    data = tomllib.loads(text)
    out = []
    for raw in data.get("identity", []):
        out.append(
            BankEntry(
                name=raw["name"],
                system=raw["system"],
                roles=dict(raw.get("roles", {})),
                lhs=raw["lhs"],
                rhs=raw["rhs"],
                note=raw.get("note", ""),
                expect=raw.get("expect", "pass"),
            )
        )
    names = [e.name for e in out]
    if len(set(names)) != len(names):
        raise ValueError("duplicate identity names in bank")
    return out


def resolve_roles(rep: ChevRep, roles: Mapping[str, str]) -> dict[str, Root]:
    """Turn role expressions over a1, a2, ... into roots of rep's system."""
    base = {f"a{i + 1}": f.coords for i, f in enumerate(rep.system.fundamental)}
    out: dict[str, Root] = {}
    for name, expr in roles.items():
        coords = root_expr(ast.parse(expr, mode="eval").body, base)
        out[name] = rep.root(coords)
    return out


class _Evaluator:
    def __init__(self, rep: ChevRep, roles: dict[str, Root], ring: FiniteRing | None, assignment):
        self.rep = rep
        self.roles = {k: v.coords for k, v in roles.items()}
        self.ring = ring
        self.assignment = assignment

    def scalar(self, node: ast.AST):
        p = _poly_expr(node)
        if self.ring is None:
            return p
        return poly_eval(p, self.assignment, self.ring)

    def root(self, node: ast.AST) -> tuple[int, ...]:
        return self.rep.root(root_expr(node, self.roles)).coords

    def group(self, node: ast.AST) -> GroupElem:
        if isinstance(node, ast.List):
            if len(node.elts) != 2:
                raise SyntaxError("a commutator [g, h] needs exactly two entries")
            return commutator(self.group(node.elts[0]), self.group(node.elts[1]))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Mult):
            return self.group(node.left) * self.group(node.right)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            n = _int_const(node.right)
            return self.group(node.left) ** n
        if isinstance(node, ast.Constant) and node.value == 1:
            return identity(self.rep, self.ring)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            f, args = node.func.id, node.args
            if f == "x" and len(args) == 2:
                return unipotent(self.rep, self.root(args[0]), self.scalar(args[1]), self.ring)
            if f == "y" and len(args) == 3:
                return y_symbol(self.rep, self.root(args[0]), self.scalar(args[1]), self.scalar(args[2]), self.ring)
            if f == "z" and len(args) == 3:
                return z_generator(self.rep, self.root(args[0]), self.scalar(args[1]), self.scalar(args[2]), self.ring)
            if f == "conj" and len(args) == 2:
                return conjugate(self.group(args[0]), self.group(args[1]))
            if f == "inv" and len(args) == 1:
                return self.group(args[0]).inverse()
        raise SyntaxError(f"not a word expression: {ast.unparse(node)}")


def evaluate_word(
    rep: ChevRep,
    expr: str,
    roles: Mapping[str, Root] | None = None,
    ring: FiniteRing | None = None,
    assignment: Mapping[str, RingElem | int] | None = None,
) -> GroupElem:
    """Evaluate a word expression symbolically, or directly over ``ring``."""
    ev = _Evaluator(rep, dict(roles or {}), ring, dict(assignment or {}))
    return ev.group(ast.parse(expr, mode="eval").body)


def first_mismatch(g: GroupElem, h: GroupElem) -> Mismatch | None:
    d = g.rep.dimension
    for i in range(d):
        for j in range(d):
            u, v = g.entry(i, j), h.entry(i, j)
            if u != v:
                return Mismatch(i, j, u, v)
    return None


def verify_identity(rep: ChevRep, entry: BankEntry) -> IdentityResult:
    """Expand both sides over Z[vars] and compare entry-wise."""
    if rep.label != entry.system:
        raise ValueError(f"entry {entry.name} is for {entry.system}, not {rep.label}")
    try:
        roles = resolve_roles(rep, entry.roles)
        lhs = evaluate_word(rep, entry.lhs, roles)
        rhs = evaluate_word(rep, entry.rhs, roles)
    except (SyntaxError, ValueError, KeyError) as exc:
        return IdentityResult(entry, False, None, f"malformed entry: {exc}")
    mm = first_mismatch(lhs, rhs)
    return IdentityResult(entry, mm is None, mm)


def verify_identity_over_ring(
    rep: ChevRep, entry: BankEntry, ring: FiniteRing, samples: int, seed: int
) -> IdentityResult:
    """Re-check an entry over ``ring`` on random assignments, building words directly there."""
    roles = resolve_roles(rep, entry.roles)
    rng = random.Random(seed)
    elems = list(ring.elements())
    for _ in range(samples):
        assignment = {v: rng.choice(elems) for v in entry.variables}
        lhs = evaluate_word(rep, entry.lhs, roles, ring, assignment)
        rhs = evaluate_word(rep, entry.rhs, roles, ring, assignment)
        mm = first_mismatch(lhs, rhs)
        if mm is not None:
            return IdentityResult(entry, False, mm, f"at {assignment}")
    return IdentityResult(entry, True)


# expression helpers


def _int_const(node: ast.AST) -> int:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_int_const(node.operand)
    raise SyntaxError(f"expected an integer, got {ast.unparse(node)}")


def _poly_expr(node: ast.AST) -> MultiPoly:
    if isinstance(node, ast.Name):
        return MultiPoly.var(node.id)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return MultiPoly.const(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_poly_expr(node.operand)
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            return _poly_expr(node.left) ** _int_const(node.right)
        u, v = _poly_expr(node.left), _poly_expr(node.right)
        if isinstance(node.op, ast.Add):
            return u + v
        if isinstance(node.op, ast.Sub):
            return u - v
        if isinstance(node.op, ast.Mult):
            return u * v
    raise SyntaxError(f"not a polynomial expression: {ast.unparse(node)}")


def _poly_names(node: ast.AST) -> set[str]:
    """Variables used as scalar parameters anywhere in a word expression."""
    out: set[str] = set()
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        f = node.func.id
        args = node.args
        if f in ("x", "y", "z"):
            for a in args[1:]:
                out |= {n.id for n in ast.walk(a) if isinstance(n, ast.Name)}
            return out
        for a in args:
            out |= _poly_names(a)
        return out
    for child in ast.iter_child_nodes(node):
        out |= _poly_names(child)
    return out
