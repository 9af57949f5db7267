"""Exact multivariate polynomials with integer coefficients.

A polynomial is a map from exponent vectors to nonzero Python ints over a
sorted tuple of variable names. Variables that do not occur are pruned, so
equal polynomials always have identical representations.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .rings import FiniteRing, RingElem

Monomial = tuple[int, ...]


class MultiPoly:
    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None, variables: Iterable[str] = ()):
        variables = tuple(variables)
        terms = {m: int(c) for m, c in (terms or {}).items() if c}
        if list(variables) != sorted(set(variables)):
            order = sorted(range(len(variables)), key=lambda i: variables[i])
            if len(set(variables)) != len(variables):
                raise ValueError(f"repeated variable names: {variables}")
            variables = tuple(variables[i] for i in order)
            terms = {tuple(m[i] for i in order): c for m, c in terms.items()}
        # prune variables that never occur
        used = [i for i in range(len(variables)) if any(m[i] for m in terms)]
        if len(used) != len(variables):
            variables = tuple(variables[i] for i in used)
            terms = {tuple(m[i] for i in used): c for m, c in terms.items()}
        self.variables: tuple[str, ...] = variables
        self.terms: dict[Monomial, int] = terms
        self._hash: int | None = None

    # constructors

    @classmethod
    def var(cls, name: str) -> MultiPoly:
        return cls({(1,): 1}, (name,))

    @classmethod
    def const(cls, c: int) -> MultiPoly:
        return cls({(): int(c)}, ())

    @classmethod
    def coerce(cls, x: MultiPoly | int) -> MultiPoly:
        if isinstance(x, MultiPoly):
            return x
        if isinstance(x, int) or hasattr(x, "__index__"):
            return cls.const(int(x))
        raise TypeError(f"cannot make a polynomial from {type(x).__name__}")

    # structure

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.variables

    def constant_value(self) -> int:
        if self.variables:
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), 0)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def _aligned(self, other: MultiPoly):
        if self.variables == other.variables:
            return self.variables, self.terms, other.terms
        variables = tuple(sorted(set(self.variables) | set(other.variables)))
        return variables, _lift(self, variables), _lift(other, variables)

    # arithmetic

    def __add__(self, other: MultiPoly | int) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            try:
                other = MultiPoly.coerce(other)
            except TypeError:
                return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        variables, s, o = self._aligned(other)
        out = dict(s)
        for m, c in o.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return MultiPoly(out, variables)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        p = MultiPoly.__new__(MultiPoly)
        p.variables = self.variables
        p.terms = {m: -c for m, c in self.terms.items()}
        p._hash = None
        return p

    def __sub__(self, other: MultiPoly | int) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            try:
                other = MultiPoly.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other: MultiPoly | int) -> MultiPoly:
        return (-self) + other

    def __mul__(self, other: MultiPoly | int) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            if isinstance(other, int):
                if other == 0:
                    return ZERO
                p = MultiPoly.__new__(MultiPoly)
                p.variables = self.variables
                p.terms = {m: c * other for m, c in self.terms.items()}
                p._hash = None
                return p
            return NotImplemented
        if not self.terms or not other.terms:
            return ZERO
        variables, s, o = self._aligned(other)
        out: dict[Monomial, int] = {}
        for m1, c1 in s.items():
            for m2, c2 in o.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return MultiPoly(out, variables)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> MultiPoly:
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exact_div(self, k: int) -> MultiPoly:
        """Divide every coefficient by the integer ``k``; raises if inexact."""
        out = {}
        for m, c in self.terms.items():
            q, r = divmod(c, k)
            if r:
                raise ArithmeticError(f"{self} is not divisible by {k}")
            out[m] = q
        return MultiPoly(out, self.variables)

    # comparison

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    # rendering and evaluation

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        """Terms in graded lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, m) if e
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"MultiPoly({self})"

    def evaluate(self, assignment: Mapping[str, object], zero=0, one=1):
        """Substitute values from ``assignment``; values need + and *."""
        missing = [v for v in self.variables if v not in assignment]
        if missing:
            raise KeyError(f"unassigned variables: {missing}")
        vals = [assignment[v] for v in self.variables]
        total = zero
        for m, c in self.terms.items():
            term = one * c
            for v, e in zip(vals, m):
                if e:
                    term = term * (v**e)
            total = total + term
        return total


def _lift(p: MultiPoly, variables: tuple[str, ...]) -> dict[Monomial, int]:
    pos = [variables.index(v) for v in p.variables]
    out = {}
    n = len(variables)
    for m, c in p.terms.items():
        full = [0] * n
        for i, e in zip(pos, m):
            full[i] = e
        out[tuple(full)] = c
    return out


ZERO = MultiPoly()
ONE = MultiPoly.const(1)


def variables(*names: str) -> tuple[MultiPoly, ...]:
    return tuple(MultiPoly.var(n) for n in names)


def poly_add(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p + q


def poly_sub(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p - q


def poly_mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p * q


def poly_neg(p: MultiPoly) -> MultiPoly:
    return -p


def poly_eval(p: MultiPoly | int, assignment: Mapping[str, RingElem | int], ring: FiniteRing) -> RingElem:
    """Image of ``p`` under the homomorphism Z[vars] -> ring fixed by ``assignment``."""
    p = MultiPoly.coerce(p)
    values = {k: ring(v) for k, v in assignment.items() if k in p.variables}
    return p.evaluate(values, zero=ring.zero, one=ring.one)
