"""Matrix realisations of the elementary root unipotents x_alpha(t).

Type A_l acts on the standard module of SL(l+1), type C_l on the standard
module of Sp(2l) and G2 on its 7-dimensional module. Each root alpha gets an
integral nilpotent matrix e_alpha (up to a frozen sign eps_alpha) and

    x_alpha(t) = sum_k t^k (eps_alpha e_alpha)^k / k!,

which is an integral polynomial in t. Group elements carry either a matrix of
MultiPoly entries (the symbolic domain) or an int64 array of shape (k, d, d)
holding residues modulo the k moduli of a FiniteRing.

Conventions: [x, y] = x y x^-1 y^-1 and conj(x, y) = x y x^-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np
import sympy

from .polynomials import ONE, ZERO, MultiPoly, poly_eval
from .rings import FiniteRing, RingElem
from .rootsys import Root, RootSystem, build_root_system

Scalar = Union[MultiPoly, RingElem, int]

# Frozen sign tables, keyed by root coordinates. They were produced by
# tools/tune_signs.py; tests/test_signs.py re-runs the certificate.
SIGNS: dict[str, dict[tuple[int, ...], int]] = {
    "C2": {(0, 2): -1, (0, -2): -1},
    "G2": {(2, -1, -1): -1},
}

# Commutator formulas the sign tables must reproduce verbatim: pairs named
# over the rank-2 names alpha, beta, with {(i, j): N_ij}.
REFERENCE_FORMULAS: dict[str, list[tuple[str, str, dict[tuple[int, int], int]]]] = {
    "C2": [("alpha", "beta", {(1, 1): 1, (1, 2): 1})],
    "G2": [
        ("alpha", "beta", {(1, 1): 1, (2, 1): 1, (3, 1): 1, (3, 2): 2}),
        ("alpha", "alpha + beta", {(1, 1): 2, (2, 1): 3, (1, 2): -3}),
        ("alpha", "2*alpha + beta", {(1, 1): 3}),
        ("beta", "3*alpha + beta", {(1, 1): 1}),
        ("alpha + beta", "2*alpha + beta", {(1, 1): -3}),
    ],
}

# G2: weights of the 7-dimensional module in fundamental coefficients, and
# the action of the simple root vectors (source weight -> target weight: coefficient)
_G2_WEIGHTS = [(2, 1), (1, 1), (1, 0), (0, 0), (-1, 0), (-1, -1), (-2, -1)]
_G2_SIMPLE = {
    (1, 0): {((-2, -1), (-1, -1)): 1, ((-1, 0), (0, 0)): 1, ((0, 0), (1, 0)): 2, ((1, 1), (2, 1)): 1},
    (0, 1): {((-1, -1), (-1, 0)): 1, ((1, 0), (1, 1)): 1},
    (-1, 0): {((-1, -1), (-2, -1)): 1, ((0, 0), (-1, 0)): 2, ((1, 0), (0, 0)): 1, ((2, 1), (1, 1)): 1},
    (0, -1): {((-1, 0), (-1, -1)): 1, ((1, 1), (1, 0)): 1},
}
# brackets that produce the remaining root vectors: [e_a, e_b] / (r + 1)
_G2_CHAINS = [((1, 0), (0, 1)), ((1, 0), (1, 1)), ((1, 0), (2, 1)), ((0, 1), (3, 1))]


class ChevRep:
    """A faithful matrix representation of the simply connected group of a root system."""

    def __init__(self, system: RootSystem, signs: dict[tuple[int, ...], int] | None = None):
        self.system = system
        if system.family == "A":
            base = _patterns_sl(system)
        elif system.family == "C":
            base = _patterns_sp(system)
        else:
            base = _patterns_g2(system)
        self.dimension = next(iter(base.values())).shape[0]
        if signs is None:
            signs = SIGNS.get(system.label, {})
        self.signs = {r.coords: int(signs.get(r.coords, 1)) for r in system.roots}
        if any(s not in (1, -1) for s in self.signs.values()):
            raise ValueError("signs must be +1 or -1")
        self.patterns = {c: self.signs[c] * m for c, m in base.items()}
        # divided powers e^k / k!, all integral
        self.powers: dict[tuple[int, ...], list[np.ndarray]] = {}
        for c, e in self.patterns.items():
            seq = [np.eye(self.dimension, dtype=np.int64)]
            m = np.eye(self.dimension, dtype=np.int64)
            k = 0
            while True:
                k += 1
                m = m @ e
                if not m.any():
                    break
                fact = math.factorial(k)
                if (m % fact).any():
                    raise ArithmeticError(f"e^{k}/{k}! is not integral for root {c}")
                seq.append(m // fact)
            self.powers[c] = seq
        self._sym_cache: dict[tuple[int, ...], list] = {}

    @property
    def label(self) -> str:
        return self.system.label

    def __repr__(self) -> str:
        return f"ChevRep({self.label}, dim={self.dimension})"

    def root(self, r: Root | Sequence[int]) -> Root:
        return self.system.root(r)

    def nilpotency_index(self, r: Root) -> int:
        return len(self.powers[self.root(r).coords])

    def invariant_form(self) -> np.ndarray | None:
        """The bilinear form preserved by the group, or None for SL."""
        if self.system.family == "A":
            return None
        if not hasattr(self, "_form"):
            self._form = _invariant_form(list(self.patterns.values()), self.system.family == "C")
        return self._form


_REPS: dict[str, ChevRep] = {}


def build_rep(label: str | RootSystem) -> ChevRep:
    """The representation with the frozen sign table (cached)."""
    system = label if isinstance(label, RootSystem) else build_root_system(label)
    if system.label not in _REPS:
        _REPS[system.label] = ChevRep(system)
    return _REPS[system.label]


# group elements


@dataclass(frozen=True)
class Token:
    """One generator x_root(param) in a word."""

    root: tuple[int, ...]
    param: Scalar

    def inverse(self) -> Token:
        return Token(self.root, -self.param)


@dataclass(frozen=True, eq=False)
class GroupElem:
    rep: ChevRep
    ring: FiniteRing | None  # None means the symbolic domain
    matrix: object = field(repr=False)  # tuple of tuples of MultiPoly, or int64 ndarray (k, d, d)
    word: tuple[Token, ...] | None = None

    @property
    def symbolic(self) -> bool:
        return self.ring is None

    def _check(self, other: GroupElem) -> None:
        if self.rep is not other.rep and self.rep.label != other.rep.label:
            raise ValueError(f"representation mismatch: {self.rep.label} vs {other.rep.label}")
        if self.ring != other.ring:
            raise ValueError(f"domain mismatch: {self.ring or 'Z[vars]'} vs {other.ring or 'Z[vars]'}")

    def __mul__(self, other: GroupElem) -> GroupElem:
        if not isinstance(other, GroupElem):
            return NotImplemented
        self._check(other)
        if self.symbolic:
            m = _poly_matmul(self.matrix, other.matrix)
        else:
            m = _ring_matmul(self.matrix, other.matrix, self.ring)
        word = self.word + other.word if self.word is not None and other.word is not None else None
        return GroupElem(self.rep, self.ring, m, word)

    def __pow__(self, n: int) -> GroupElem:
        base = self if n >= 0 else self.inverse()
        out = identity(self.rep, self.ring)
        for _ in range(abs(n)):
            out = out * base
        return out

    def inverse(self) -> GroupElem:
        if self.word is None:
            if self.symbolic:
                raise ValueError("symbolic elements without a word cannot be inverted")
            return GroupElem(self.rep, self.ring, _ring_inverse(self.matrix, self.ring), None)
        return from_word(self.rep, tuple(t.inverse() for t in reversed(self.word)), self.ring)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupElem):
            return NotImplemented
        if self.ring != other.ring or self.rep.label != other.rep.label:
            return False
        if self.symbolic:
            return self.matrix == other.matrix
        return bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self) -> int:
        if self.symbolic:
            return hash(self.matrix)
        return hash(self.matrix.tobytes())

    def is_identity(self) -> bool:
        return self == identity(self.rep, self.ring)

    def entry(self, i: int, j: int):
        if self.symbolic:
            return self.matrix[i][j]
        return self.ring(tuple(int(v) for v in self.matrix[:, i, j]))

    def specialize(self, assignment: dict[str, RingElem | int], ring: FiniteRing) -> GroupElem:
        """Image under Z[vars] -> ring, applied to the matrix entries."""
        if not self.symbolic:
            raise ValueError("element is already over a finite ring")
        d = self.rep.dimension
        arr = np.zeros((len(ring.moduli), d, d), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                p = self.matrix[i][j]
                if p:
                    arr[:, i, j] = poly_eval(p, assignment, ring).residues
        word = None
        if self.word is not None:
            word = tuple(Token(t.root, poly_eval(t.param, assignment, ring)) for t in self.word)
        return GroupElem(self.rep, ring, arr, word)

    def to_sympy(self) -> sympy.Matrix:
        if self.symbolic:
            return sympy.Matrix([[sympy.sympify(str(p).replace("^", "**")) for p in row] for row in self.matrix])
        if len(self.ring.moduli) != 1:
            raise ValueError("only single-modulus rings convert to a sympy matrix")
        return sympy.Matrix(self.matrix[0].tolist())

    def render(self) -> str:
        if self.symbolic:
            rows = [[str(p) for p in row] for row in self.matrix]
        else:
            if len(self.ring.moduli) == 1:
                rows = [[str(int(v)) for v in row] for row in self.matrix[0]]
            else:
                d = self.rep.dimension
                rows = [
                    ["(" + ",".join(str(int(v)) for v in self.matrix[:, i, j]) + ")" for j in range(d)]
                    for i in range(d)
                ]
        width = max(len(s) for row in rows for s in row)
        return "\n".join("[" + " ".join(s.rjust(width) for s in row) + "]" for row in rows)


def render_word(word: Iterable[Token] | None) -> str:
    if word is None:
        return "<no word>"
    parts = [f"x{t.root}({t.param})" for t in word]
    return " ".join(parts) if parts else "1"


def identity(rep: ChevRep, ring: FiniteRing | None = None) -> GroupElem:
    d = rep.dimension
    if ring is None:
        m = tuple(tuple(ONE if i == j else ZERO for j in range(d)) for i in range(d))
    else:
        m = np.broadcast_to(np.eye(d, dtype=np.int64), (len(ring.moduli), d, d)).copy()
    return GroupElem(rep, ring, m, ())


def _domain_of(t: Scalar, ring: FiniteRing | None) -> tuple[FiniteRing | None, Scalar]:
    if isinstance(t, RingElem):
        if ring is not None and t.ring != ring:
            raise ValueError(f"scalar from {t.ring} used over {ring}")
        return t.ring, t
    if ring is not None:
        if isinstance(t, MultiPoly):
            return ring, ring(t.constant_value())
        return ring, ring(int(t))
    return None, MultiPoly.coerce(t)


def unipotent(rep: ChevRep, root: Root | Sequence[int], t: Scalar, ring: FiniteRing | None = None) -> GroupElem:
    """x_root(t) = exp(t e_root); symbolic unless t is a RingElem or ``ring`` is given."""
    r = rep.root(root)
    ring, t = _domain_of(t, ring)
    powers = rep.powers[r.coords]
    d = rep.dimension
    if ring is None:
        key = r.coords
        if key not in rep._sym_cache:
            rep._sym_cache[key] = [
                [(i, j, int(p[i, j])) for i, j in zip(*np.nonzero(p))] for p in powers
            ]
        entries: list[list[MultiPoly]] = [[ONE if i == j else ZERO for j in range(d)] for i in range(d)]
        tk = ONE
        for k, nz in enumerate(rep._sym_cache[key]):
            if k == 0:
                continue
            tk = tk * t
            for i, j, c in nz:
                entries[i][j] = entries[i][j] + tk * c
        m = tuple(tuple(row) for row in entries)
    else:
        mods = np.array(ring.moduli, dtype=np.int64)
        m = np.zeros((len(mods), d, d), dtype=np.int64)
        for comp, (res, mod) in enumerate(zip(t.residues, ring.moduli)):
            acc = np.zeros((d, d), dtype=np.int64)
            for k, p in enumerate(powers):
                acc += pow(res, k, mod) * p
            m[comp] = acc % mod
    return GroupElem(rep, ring, m, (Token(r.coords, t),))


def from_word(rep: ChevRep, word: Sequence[Token], ring: FiniteRing | None = None) -> GroupElem:
    out = identity(rep, ring)
    for tok in word:
        out = out * unipotent(rep, tok.root, tok.param, ring)
    return out


def inverse(g: GroupElem) -> GroupElem:
    return g.inverse()


def commutator(g: GroupElem, h: GroupElem) -> GroupElem:
    """[g, h] = g h g^-1 h^-1."""
    g._check(h)
    return g * h * g.inverse() * h.inverse()


def conjugate(g: GroupElem, h: GroupElem) -> GroupElem:
    """g h g^-1."""
    g._check(h)
    return g * h * g.inverse()


def y_symbol(rep: ChevRep, root: Root | Sequence[int], a: Scalar, b: Scalar, ring: FiniteRing | None = None) -> GroupElem:
    """y_alpha(a, b) = [x_alpha(a), x_-alpha(b)]."""
    r = rep.root(root)
    return commutator(unipotent(rep, r, a, ring), unipotent(rep, -r, b, ring))


def z_generator(rep: ChevRep, root: Root | Sequence[int], a: Scalar, c: Scalar, ring: FiniteRing | None = None) -> GroupElem:
    """z_alpha(a, c) = x_-alpha(c) x_alpha(a) x_-alpha(-c)."""
    r = rep.root(root)
    return conjugate(unipotent(rep, -r, c, ring), unipotent(rep, r, a, ring))


# structure constants


def peel(
    rep: ChevRep, g: GroupElem, order: Sequence[Root], level: dict[Root, int] | None = None
) -> list[tuple[Root, MultiPoly]]:
    """Write a symbolic g as x_r1(t1) x_r2(t2) ... with the roots in ``order``.

    ``level`` must be additive and positive on the roots involved (it
    defaults to the absolute height). The entry of a product at the position
    of e_r only sees t_r and factors of lower level, so coefficients are
    fixed one level at a time, whatever the order of the factors.
    Raises ValueError if g is not such a product.
    """
    if not g.symbolic:
        raise ValueError("peel works on symbolic elements")
    order = [rep.root(r) for r in order]
    if level is None:
        level = {r: abs(rep.system.height(r)) for r in order}
    coeffs = {r: ZERO for r in order}
    by_level = sorted(order, key=lambda r: level[r])
    for _ in range(len(order) + 1):
        prod = from_word(rep, [Token(r.coords, coeffs[r]) for r in order])
        for r in by_level:
            e = rep.patterns[r.coords]
            i, j = next(zip(*np.nonzero(e)))
            diff = g.matrix[i][j] - prod.matrix[i][j]
            if diff:
                try:
                    coeffs[r] = coeffs[r] + diff.exact_div(int(e[i, j]))
                except ArithmeticError as exc:
                    raise ValueError(f"cannot peel x_{r}: {exc}") from None
                break
        else:
            if prod == g:
                return [(r, coeffs[r]) for r in order]
            break
    raise ValueError("element is not a product over the given roots")


@dataclass(frozen=True)
class CommutatorFormula:
    alpha: Root
    beta: Root
    factors: tuple[tuple[int, int, Root, int], ...]  # (i, j, root, N_ij)

    def coefficient(self, i: int, j: int) -> int:
        for fi, fj, _, n in self.factors:
            if (fi, fj) == (i, j):
                return n
        return 0

    def __str__(self) -> str:
        if not self.factors:
            return f"[x{self.alpha}(a), x{self.beta}(b)] = 1"
        parts = []
        for i, j, r, n in self.factors:
            mono = "*".join(s for s in (_pow("a", i), _pow("b", j)) if s)
            coef = "" if n == 1 else ("-" if n == -1 else f"{n}*")
            parts.append(f"x{r}({coef}{mono})")
        return f"[x{self.alpha}(a), x{self.beta}(b)] = " + " ".join(parts)


def _pow(v: str, k: int) -> str:
    return "" if k == 0 else (v if k == 1 else f"{v}^{k}")


_A, _B = MultiPoly.var("a"), MultiPoly.var("b")


def commutator_formula(rep: ChevRep, alpha: Root, beta: Root) -> CommutatorFormula:
    """Extract the N_{alpha beta i j} by peeling [x_alpha(a), x_beta(b)] in root-string order."""
    alpha, beta = rep.root(alpha), rep.root(beta)
    string = rep.system.root_string(alpha, beta)
    g = commutator(unipotent(rep, alpha, _A), unipotent(rep, beta, _B))
    peeled = peel(rep, g, [r for _, _, r in string], {r: i + j for i, j, r in string})
    factors = []
    for (i, j, r), (_, t) in zip(string, peeled):
        mono = _A**i * _B**j
        n = 0
        if t:
            if len(t.terms) != 1 or t != mono * next(iter(t.terms.values())):
                raise ValueError(f"coefficient of x_{r} is {t}, not a multiple of a^{i} b^{j}")
            n = next(iter(t.terms.values()))
        factors.append((i, j, r, n))
    return CommutatorFormula(alpha, beta, tuple(factors))


def reference_mismatches(rep: ChevRep) -> list[str]:
    """Differences between extracted formulas and REFERENCE_FORMULAS (empty when all match)."""
    out = []
    for a, b, expected in REFERENCE_FORMULAS.get(rep.label, []):
        f = commutator_formula(rep, rep.system.parse_root(a), rep.system.parse_root(b))
        got = {(i, j): n for i, j, _, n in f.factors if n}
        if got != expected:
            out.append(f"[x_{a}, x_{b}]: expected {expected}, extracted {got}")
    return out


def structure_constants(rep: ChevRep) -> dict[tuple[Root, Root], CommutatorFormula]:
    """Commutator formulas for all ordered pairs alpha != +-beta."""
    table = {}
    for a in rep.system.roots:
        for b in rep.system.roots:
            if a != b and a != -b:
                table[(a, b)] = commutator_formula(rep, a, b)
    return table


def chevalley_expand(rep: ChevRep, alpha: Root, beta: Root, a: Scalar, b: Scalar, ring: FiniteRing | None = None) -> GroupElem:
    """Right-hand side of the commutator formula as a word, evaluated at (a, b)."""
    f = commutator_formula(rep, alpha, beta)
    ring, a = _domain_of(a, ring)
    _, b = _domain_of(b, ring)
    word = tuple(Token(r.coords, n * a**i * b**j) for i, j, r, n in f.factors if n)
    return from_word(rep, word, ring)


# matrix plumbing


def _poly_matmul(A, B):
    d = len(A)
    out = [[ZERO] * d for _ in range(d)]
    for i in range(d):
        row = out[i]
        for k, a in enumerate(A[i]):
            if not a:
                continue
            for j, b in enumerate(B[k]):
                if b:
                    row[j] = row[j] + a * b
    return tuple(tuple(r) for r in out)


def _ring_matmul(A: np.ndarray, B: np.ndarray, ring: FiniteRing) -> np.ndarray:
    mods = np.array(ring.moduli, dtype=np.int64).reshape(-1, 1, 1)
    return (A @ B) % mods


def _ring_inverse(A: np.ndarray, ring: FiniteRing) -> np.ndarray:
    out = np.empty_like(A)
    for c, m in enumerate(ring.moduli):
        out[c] = _inverse_mod(A[c], m)
    return out


def _inverse_mod(A: np.ndarray, m: int) -> np.ndarray:
    """Inverse over Z/m: Gauss-Jordan over each local factor Z/p^k, glued by CRT."""
    result = np.zeros_like(A)
    for p, k in sympy.factorint(m).items():
        q = p**k
        inv_q = _inverse_local(A % q, p, q)
        # CRT: result = inv_q mod q and unchanged mod m/q
        rest = m // q
        lift = rest * pow(rest, -1, q) % m
        result = (result + inv_q * lift) % m
    return result


def _inverse_local(A: np.ndarray, p: int, q: int) -> np.ndarray:
    n = A.shape[0]
    M = np.concatenate([A.astype(np.int64), np.eye(n, dtype=np.int64)], axis=1) % q
    for col in range(n):
        units = [r for r in range(col, n) if M[r, col] % p]
        if not units:
            raise ValueError("matrix is not invertible over the ring")
        r = units[0]
        M[[col, r]] = M[[r, col]]
        M[col] = M[col] * pow(int(M[col, col]), -1, q) % q
        for r in range(n):
            if r != col and M[r, col]:
                M[r] = (M[r] - M[r, col] * M[col]) % q
    return M[:, n:]


# pattern construction


def _patterns_sl(system: RootSystem) -> dict[tuple[int, ...], np.ndarray]:
    n = system.rank + 1
    out = {}
    for r in system.roots:
        i, j = r.coords.index(1), r.coords.index(-1)
        m = np.zeros((n, n), dtype=np.int64)
        m[i, j] = 1
        out[r.coords] = m
    return out


def symplectic_form(l: int) -> np.ndarray:
    """Antidiagonal form on the basis e_1..e_l, e_-l..e_-1."""
    n = 2 * l
    omega = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        omega[i, n - 1 - i] = 1 if i < l else -1
    return omega


def _sp_weights(l: int) -> list[tuple[int, ...]]:
    out = []
    for p in range(2 * l):
        w = [0] * l
        if p < l:
            w[p] = 1
        else:
            w[2 * l - 1 - p] = -1
        out.append(tuple(w))
    return out


def _patterns_sp(system: RootSystem) -> dict[tuple[int, ...], np.ndarray]:
    l = system.rank
    n = 2 * l
    omega = sympy.Matrix(symplectic_form(l).tolist())
    weights = _sp_weights(l)
    out = {}
    for r in system.roots:
        support = [
            (i, j)
            for i in range(n)
            for j in range(n)
            if tuple(x - y for x, y in zip(weights[i], weights[j])) == r.coords
        ]
        syms = sympy.symbols(f"u0:{len(support)}")
        X = sympy.zeros(n, n)
        for s, (i, j) in zip(syms, support):
            X[i, j] = s
        eqs = [e for e in (X.T * omega + omega * X) if e != 0]
        (vec,) = sympy.linsolve(eqs, syms) if eqs else [syms]
        free = sorted(set().union(*(sympy.sympify(v).free_symbols for v in vec)), key=str)
        if len(free) != 1:
            raise AssertionError(f"root space of {r} is not one-dimensional")
        vals = [sympy.sympify(v).subs(free[0], 1) for v in vec]
        fracs = [Fraction(str(v)) for v in vals]
        den = math.lcm(*[f.denominator for f in fracs])
        ints = [int(f * den) for f in fracs]
        g = math.gcd(*ints)
        ints = [v // g for v in ints]
        if next(v for v in ints if v) < 0:
            ints = [-v for v in ints]
        m = np.zeros((n, n), dtype=np.int64)
        for v, (i, j) in zip(ints, support):
            m[i, j] = v
        out[r.coords] = m
    return out


def _patterns_g2(system: RootSystem) -> dict[tuple[int, ...], np.ndarray]:
    idx = {w: i for i, w in enumerate(_G2_WEIGHTS)}

    def matrix(entries):
        m = np.zeros((7, 7), dtype=np.int64)
        for (src, dst), v in entries.items():
            m[idx[dst], idx[src]] = v
        return m

    fund = {k: matrix(v) for k, v in _G2_SIMPLE.items()}
    roots = {system.fundamental_coefficients(r) for r in system.roots}

    def chain_length(a, b):
        r = 0
        while (b[0] - (r + 1) * a[0], b[1] - (r + 1) * a[1]) in roots:
            r += 1
        return r

    for sign in (1, -1):
        for a, b in _G2_CHAINS:
            a_ = (sign * a[0], sign * a[1])
            b_ = (sign * b[0], sign * b[1])
            m = fund[a_] @ fund[b_] - fund[b_] @ fund[a_]
            k = chain_length(a_, b_) + 1
            if (m % k).any():
                raise ArithmeticError("G2 root vector is not integral")
            fund[(a_[0] + b_[0], a_[1] + b_[1])] = m // k
    out = {}
    f1, f2 = system.fundamental
    for (i, j), m in fund.items():
        coords = tuple(i * x + j * y for x, y in zip(f1.coords, f2.coords))
        out[system.root(coords).coords] = m
    return out


def _invariant_form(patterns: list[np.ndarray], skew: bool) -> np.ndarray:
    n = patterns[0].shape[0]
    syms = sympy.symbols(f"f0:{n * n}")
    F = sympy.Matrix(n, n, syms)
    eqs = []
    for e in patterns:
        E = sympy.Matrix(e.tolist())
        eqs.extend(x for x in (E.T * F + F * E) if x != 0)
    eqs.extend(x for x in (F.T + F if skew else F.T - F) if x != 0)
    (vec,) = sympy.linsolve(eqs, syms)
    free = sorted(set().union(*(sympy.sympify(v).free_symbols for v in vec)), key=str)
    if len(free) != 1:
        raise AssertionError("invariant form is not unique up to scalar")
    vals = [Fraction(str(sympy.sympify(v).subs(free[0], 1))) for v in vec]
    den = math.lcm(*[v.denominator for v in vals])
    ints = [int(v * den) for v in vals]
    g = math.gcd(*ints)
    return np.array([v // g for v in ints], dtype=np.int64).reshape(n, n)


def preserves_form(g: GroupElem) -> bool:
    """g^T F g == F for the rep's invariant form (always true for SL)."""
    F = g.rep.invariant_form()
    if F is None:
        return True
    if g.symbolic:
        d = g.rep.dimension
        Fp = tuple(tuple(MultiPoly.const(int(v)) for v in row) for row in F)
        gt = tuple(tuple(g.matrix[j][i] for j in range(d)) for i in range(d))
        return _poly_matmul(_poly_matmul(gt, Fp), g.matrix) == Fp
    mods = np.array(g.ring.moduli, dtype=np.int64).reshape(-1, 1, 1)
    gt = np.transpose(g.matrix, (0, 2, 1))
    return bool(np.array_equal((gt @ F @ g.matrix) % mods, np.broadcast_to(F, g.matrix.shape) % mods))
