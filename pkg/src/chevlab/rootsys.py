"""Root systems of types A_l, C_l and G2 in integer coordinates.

Coordinates:

* A_l: e_i - e_j in Z^(l+1);
* C_l: +-e_i +- e_j (short) and +-2e_i (long) in Z^l;
* G2: the sum-zero sublattice of Z^3, short roots e_i - e_j and long
  roots +-(2e_i - e_j - e_k).

The standard dot product on coordinates is a Weyl-invariant inner product in
each case, so lengths and reflections are integer-exact.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

SUPPORTED = "A_l (l>=2), C_l (l>=2), G2"

# names used for the two fundamental roots of a rank-2 system: for C2
# alpha is long and beta short, for G2 alpha is short and beta long
RANK2_NAMES = {
    "A2": {"alpha": (1, -1, 0), "beta": (0, 1, -1)},
    "C2": {"alpha": (0, 2), "beta": (1, -1)},
    "G2": {"alpha": (1, -1, 0), "beta": (-2, 1, 1)},
}


def parse_type_label(label: str) -> tuple[str, int]:
    """Split a label such as ``"C3"`` or ``"A_2"`` into (family, rank)."""
    m = re.fullmatch(r"\s*([A-Ga-g])_?(\d+)\s*", str(label))
    if not m:
        raise ValueError(f"cannot parse root system label {label!r}")
    family, rank = m.group(1).upper(), int(m.group(2))
    if family == "A" and rank >= 2:
        return family, rank
    if family == "C" and rank >= 2:
        return family, rank
    if family == "G" and rank == 2:
        return family, rank
    raise ValueError(
        f"root system {label!r} is not modelled; supported: {SUPPORTED}. "
        "Every argument in this workbench reduces to rank-2 subsystems of "
        "types A2, C2 and G2, which these families realise."
    )


@dataclass(frozen=True)
class Root:
    coords: tuple[int, ...]
    length: str = field(compare=False, default="long")

    def __neg__(self) -> Root:
        return Root(tuple(-x for x in self.coords), self.length)

    @property
    def is_long(self) -> bool:
        return self.length == "long"

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.coords)) + ")" + ("L" if self.is_long else "S")

    __repr__ = __str__


@dataclass(frozen=True)
class Parabolic:
    """Root sets of the rank-1 elementary parabolic attached to a fundamental root."""

    index: int
    unipotent: tuple[Root, ...]
    opposite: tuple[Root, ...]
    levi: tuple[Root, Root]


@dataclass(frozen=True)
class Rank2Embedding:
    """The rank-2 subsystem generated by two roots, identified with a standard one.

    ``base`` is a simple system of the subsystem in the ambient coordinates
    (ordered like the standard fundamentals of ``type_label``), and
    ``images`` are the two input roots as roots of the standard system.
    """

    type_label: str
    roots: frozenset[Root]
    base: tuple[Root, Root]
    images: tuple[Root, Root]
    standard: RootSystem | None

    def to_standard(self, root: Root) -> Root:
        s, t = _solve2(self.base[0].coords, self.base[1].coords, root.coords)
        if self.standard is None:
            raise ValueError("decomposable subsystems have no standard model")
        f1, f2 = self.standard.fundamental
        return self.standard.root(tuple(s * x + t * y for x, y in zip(f1.coords, f2.coords)))

    def from_standard(self, root: Root) -> Root:
        assert self.standard is not None
        s, t = self.standard.fundamental_coefficients(root)
        b1, b2 = self.base
        return Root(tuple(s * x + t * y for x, y in zip(b1.coords, b2.coords)), root.length)


class RootSystem:
    def __init__(self, family: str, rank: int):
        self.family = family
        self.rank = rank
        coords, fundamental = _construct(family, rank)
        norms = {sum(x * x for x in c) for c in coords}
        long_norm = max(norms)
        self._roots = tuple(
            Root(c, "long" if sum(x * x for x in c) == long_norm else "short") for c in coords
        )
        self._by_coords = {r.coords: r for r in self._roots}
        self.fundamental = tuple(self._by_coords[c] for c in fundamental)
        self._fund_matrix = np.array([f.coords for f in self.fundamental], dtype=float).T
        self._coeffs = {r.coords: self._solve_coefficients(r.coords) for r in self._roots}
        self.positives = tuple(r for r in self._roots if sum(self._coeffs[r.coords]) > 0)
        self.negatives = tuple(r for r in self._roots if sum(self._coeffs[r.coords]) < 0)

    # basic access

    @property
    def label(self) -> str:
        return f"{self.family}{self.rank}"

    @property
    def roots(self) -> tuple[Root, ...]:
        return self._roots

    def __len__(self) -> int:
        return len(self._roots)

    def __iter__(self):
        return iter(self._roots)

    def __contains__(self, r: object) -> bool:
        if isinstance(r, Root):
            return r.coords in self._by_coords
        return tuple(r) in self._by_coords  # type: ignore[arg-type]

    def __repr__(self) -> str:
        return f"RootSystem({self.label})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RootSystem) and self.label == other.label

    def __hash__(self) -> int:
        return hash(self.label)

    def parse_root(self, expr: str, names: dict[str, Sequence[int]] | None = None) -> Root:
        """Root from an expression like ``"3*alpha + beta"`` or ``"-a1 + a2"``.

        Names default to :attr:`names`; a custom mapping may bind other labels.
        """
        table = {k: v.coords for k, v in self.names.items()} if names is None else names
        return self.root(root_expr(ast.parse(expr, mode="eval").body, table))

    def root(self, coords: Sequence[int] | Root) -> Root:
        if isinstance(coords, Root):
            coords = coords.coords
        key = tuple(int(x) for x in coords)
        try:
            return self._by_coords[key]
        except KeyError:
            raise ValueError(f"{key} is not a root of {self.label}") from None

    @cached_property
    def is_simply_laced(self) -> bool:
        return self.family == "A"

    @property
    def long_roots(self) -> tuple[Root, ...]:
        return tuple(r for r in self._roots if r.is_long)

    @property
    def short_roots(self) -> tuple[Root, ...]:
        return tuple(r for r in self._roots if not r.is_long)

    @property
    def names(self) -> dict[str, Root]:
        """Named roots alpha, beta for rank-2 systems, plus a1..al for fundamentals."""
        out = {f"a{i + 1}": f for i, f in enumerate(self.fundamental)}
        for name, c in RANK2_NAMES.get(self.label, {}).items():
            out[name] = self._by_coords[c]
        return out

    # arithmetic

    def inner(self, u: Root | Sequence[int], v: Root | Sequence[int]) -> int:
        cu = u.coords if isinstance(u, Root) else u
        cv = v.coords if isinstance(v, Root) else v
        return sum(x * y for x, y in zip(cu, cv))

    def _solve_coefficients(self, coords: Sequence[int]) -> tuple[int, ...]:
        sol, *_ = np.linalg.lstsq(self._fund_matrix, np.array(coords, dtype=float), rcond=None)
        coeffs = tuple(int(round(x)) for x in sol)
        back = tuple(
            sum(c * f.coords[k] for c, f in zip(coeffs, self.fundamental))
            for k in range(len(coords))
        )
        if back != tuple(coords):
            raise ValueError(f"{tuple(coords)} is not in the root lattice of {self.label}")
        return coeffs

    def fundamental_coefficients(self, r: Root | Sequence[int]) -> tuple[int, ...]:
        c = r.coords if isinstance(r, Root) else tuple(r)
        if c in self._coeffs:
            return self._coeffs[c]
        return self._solve_coefficients(c)

    def height(self, r: Root) -> int:
        return sum(self.fundamental_coefficients(r))

    def is_positive(self, r: Root) -> bool:
        return self.height(r) > 0

    def combine(self, terms: Iterable[tuple[int, Root]]) -> tuple[int, ...]:
        n = len(self._roots[0].coords)
        out = [0] * n
        for k, r in terms:
            for i, x in enumerate(r.coords):
                out[i] += k * x
        return tuple(out)

    def add(self, a: Root, b: Root) -> Root | None:
        c = tuple(x + y for x, y in zip(a.coords, b.coords))
        return self._by_coords.get(c)

    def root_string(self, a: Root, b: Root) -> list[tuple[int, int, Root]]:
        """All (i, j, i*a + j*b) with i, j >= 1 landing in the system.

        Ordered by i + j, then by decreasing i; this is the factor order of the
        commutator formula used throughout the package.
        """
        a, b = self.root(a), self.root(b)
        if a == b or a == -b:
            raise ValueError("root_string needs two roots that are not proportional")
        out = []
        for i in range(1, 4):
            for j in range(1, 4):
                c = tuple(i * x + j * y for x, y in zip(a.coords, b.coords))
                if c in self._by_coords:
                    out.append((i, j, self._by_coords[c]))
        out.sort(key=lambda t: (t[0] + t[1], -t[0]))
        return out

    def reflect(self, a: Root, r: int) -> Root:
        """Image of ``a`` under the reflection in the fundamental root number r (1-based)."""
        if not 1 <= r <= self.rank:
            raise ValueError(f"fundamental index {r} out of range 1..{self.rank}")
        f = self.fundamental[r - 1]
        k = 2 * self.inner(a, f) // self.inner(f, f)
        return self.root(tuple(x - k * y for x, y in zip(a.coords, f.coords)))

    def weyl_orbit(self, a: Root) -> dict[Root, tuple[int, ...]]:
        """Orbit of ``a`` under fundamental reflections, with a reflection word reaching each root."""
        a = self.root(a)
        orbit = {a: ()}
        frontier = [a]
        while frontier:
            nxt = []
            for b in frontier:
                for r in range(1, self.rank + 1):
                    c = self.reflect(b, r)
                    if c not in orbit:
                        orbit[c] = (r,) + orbit[b]
                        nxt.append(c)
            frontier = nxt
        return orbit

    def conjugate_to_fundamental(self, a: Root) -> tuple[Root, tuple[int, ...]]:
        """A fundamental root in the Weyl orbit of ``a`` and a reflection word sending ``a`` to it.

        The word lists reflection indices applied left to right to ``a``.
        """
        a = self.root(a)
        # BFS from a so the word is read in application order
        seen = {a: ()}
        frontier = [a]
        while frontier:
            nxt = []
            for b in frontier:
                if b in self.fundamental:
                    return b, seen[b]
                for r in range(1, self.rank + 1):
                    c = self.reflect(b, r)
                    if c not in seen:
                        seen[c] = seen[b] + (r,)
                        nxt.append(c)
            frontier = nxt
        raise AssertionError(f"{a} is not conjugate to a fundamental root")

    def parabolic(self, r: int) -> Parabolic:
        if not 1 <= r <= self.rank:
            raise ValueError(f"fundamental index {r} out of range 1..{self.rank}")
        ar = self.fundamental[r - 1]
        return Parabolic(
            index=r,
            unipotent=tuple(x for x in self.positives if x != ar),
            opposite=tuple(x for x in self.negatives if x != -ar),
            levi=(ar, -ar),
        )

    def embed_rank2(self, a: Root, b: Root) -> Rank2Embedding:
        """Rank-2 subsystem of roots in Z*a + Z*b, identified with A2, C2, G2 or A1xA1."""
        a, b = self.root(a), self.root(b)
        if a == b or a == -b:
            raise ValueError("embed_rank2 needs two non-proportional roots")
        sub = []
        for r in self._roots:
            try:
                _solve2(a.coords, b.coords, r.coords)
            except ValueError:
                continue
            sub.append(r)
        sub_set = frozenset(sub)
        kind = {4: "A1xA1", 6: "A2", 8: "C2", 12: "G2"}[len(sub)]
        # simple system: indecomposable roots of the subsystem that are positive here
        pos = [r for r in sub if self.is_positive(r)]
        simple = [
            r
            for r in pos
            if not any(
                tuple(x + y for x, y in zip(p.coords, q.coords)) == r.coords
                for p in pos
                for q in pos
            )
        ]
        assert len(simple) == 2
        if kind == "A1xA1":
            base = (simple[0], simple[1])
            return Rank2Embedding(kind, sub_set, base, (a, b), None)
        std = build_root_system(kind)
        s0, s1 = simple
        # standard C2 and G2 list the short fundamental first
        base = (s1, s0) if s0.is_long and not s1.is_long else (s0, s1)
        emb = Rank2Embedding(kind, sub_set, base, (a, b), std)
        return Rank2Embedding(kind, sub_set, base, (emb.to_standard(a), emb.to_standard(b)), std)


def root_expr(node: ast.AST, names: dict[str, Sequence[int]]) -> tuple[int, ...]:
    """Evaluate an integer combination of named vectors from a parsed expression."""
    if isinstance(node, ast.Name):
        if node.id not in names:
            raise KeyError(f"unknown root name {node.id!r}")
        return tuple(names[node.id])
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return tuple(-x for x in root_expr(node.operand, names))
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, (ast.Add, ast.Sub)):
            u, v = root_expr(node.left, names), root_expr(node.right, names)
            sgn = 1 if isinstance(node.op, ast.Add) else -1
            return tuple(x + sgn * y for x, y in zip(u, v))
        if isinstance(node.op, ast.Mult):
            k = node.left
            sign = 1
            if isinstance(k, ast.UnaryOp) and isinstance(k.op, ast.USub):
                k, sign = k.operand, -1
            if isinstance(k, ast.Constant) and isinstance(k.value, int):
                return tuple(sign * k.value * x for x in root_expr(node.right, names))
    raise SyntaxError(f"not a root expression: {ast.unparse(node)}")


def _solve2(u: Sequence[int], v: Sequence[int], w: Sequence[int]) -> tuple[int, int]:
    """Integers (s, t) with s*u + t*v == w; raises ValueError if there are none."""
    # 2x2 minors give Cramer's rule on some pair of coordinates
    n = len(u)
    for i in range(n):
        for j in range(i + 1, n):
            det = u[i] * v[j] - u[j] * v[i]
            if det:
                sn = w[i] * v[j] - w[j] * v[i]
                tn = u[i] * w[j] - u[j] * w[i]
                if sn % det or tn % det:
                    raise ValueError("not an integer combination")
                s, t = sn // det, tn // det
                if any(s * x + t * y != z for x, y, z in zip(u, v, w)):
                    raise ValueError("not in the span")
                return s, t
    raise ValueError("degenerate pair")


def _construct(family: str, rank: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    if family == "A":
        n = rank + 1
        roots = []
        for i in range(n):
            for j in range(n):
                if i != j:
                    c = [0] * n
                    c[i], c[j] = 1, -1
                    roots.append(tuple(c))
        fund = []
        for i in range(rank):
            c = [0] * n
            c[i], c[i + 1] = 1, -1
            fund.append(tuple(c))
        return roots, fund
    if family == "C":
        n = rank
        roots = []
        for i in range(n):
            for j in range(i + 1, n):
                for si in (1, -1):
                    for sj in (1, -1):
                        c = [0] * n
                        c[i], c[j] = si, sj
                        roots.append(tuple(c))
            for s in (2, -2):
                c = [0] * n
                c[i] = s
                roots.append(tuple(c))
        fund = []
        for i in range(n - 1):
            c = [0] * n
            c[i], c[i + 1] = 1, -1
            fund.append(tuple(c))
        c = [0] * n
        c[n - 1] = 2
        fund.append(tuple(c))
        return roots, fund
    if family == "G":
        roots = []
        for i in range(3):
            for j in range(3):
                if i != j:
                    c = [0, 0, 0]
                    c[i], c[j] = 1, -1
                    roots.append(tuple(c))
        for i in range(3):
            for s in (1, -1):
                c = [-s, -s, -s]
                c[i] = 2 * s
                roots.append(tuple(c))
        return roots, [(1, -1, 0), (-2, 1, 1)]
    raise ValueError(family)


_CACHE: dict[str, RootSystem] = {}


def build_root_system(label: str) -> RootSystem:
    family, rank = parse_type_label(label)
    key = f"{family}{rank}"
    if key not in _CACHE:
        _CACHE[key] = RootSystem(family, rank)
    return _CACHE[key]


def add_roots(system: RootSystem, a: Root, b: Root) -> Root | None:
    return system.add(a, b)


def root_string(system: RootSystem, a: Root, b: Root) -> list[tuple[int, int, Root]]:
    return system.root_string(a, b)


def embed_rank2(system: RootSystem, a: Root, b: Root) -> Rank2Embedding:
    return system.embed_rank2(a, b)


def reflect_root(system: RootSystem, a: Root, r: int) -> Root:
    return system.reflect(a, r)


def parabolic_data(system: RootSystem, r: int) -> Parabolic:
    return system.parabolic(r)
