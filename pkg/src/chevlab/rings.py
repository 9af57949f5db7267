"""Finite commutative rings Z/m1 x ... x Z/mk, their ideals, and condition (*).

Everything here is small and enumerated eagerly: a ring of a few hundred
elements, an ideal stored as the full set of its elements.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True)
class FiniteRing:
    """Direct product of the cyclic rings Z/m for m in ``moduli``."""

    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        moduli = tuple(int(m) for m in self.moduli)
        if not moduli:
            raise ValueError("a ring needs at least one modulus")
        if any(m < 2 for m in moduli):
            raise ValueError(f"every modulus must be >= 2, got {moduli}")
        object.__setattr__(self, "moduli", moduli)

    @property
    def size(self) -> int:
        return math.prod(self.moduli)

    def __len__(self) -> int:
        return self.size

    def __str__(self) -> str:
        return " x ".join(f"Z/{m}" for m in self.moduli)

    @property
    def zero(self) -> RingElem:
        return RingElem(self, (0,) * len(self.moduli))

    @property
    def one(self) -> RingElem:
        return RingElem(self, (1,) * len(self.moduli))

    def __call__(self, value: int | Sequence[int] | RingElem) -> RingElem:
        """Coerce an integer (diagonally) or a residue tuple into the ring."""
        if isinstance(value, RingElem):
            if value.ring != self:
                raise ValueError(f"element of {value.ring} is not in {self}")
            return value
        if isinstance(value, (int,)) or hasattr(value, "__index__"):
            v = int(value)
            return RingElem(self, tuple(v % m for m in self.moduli))
        residues = tuple(int(v) for v in value)
        if len(residues) != len(self.moduli):
            raise ValueError(
                f"expected {len(self.moduli)} residues for {self}, got {residues}"
            )
        return RingElem(self, tuple(v % m for v, m in zip(residues, self.moduli)))

    def elements(self) -> Iterator[RingElem]:
        for residues in itertools.product(*(range(m) for m in self.moduli)):
            yield RingElem(self, residues)

    def residue_characteristics(self) -> list[int]:
        """Sorted primes p for which Z/p is a residue field of the ring."""
        primes: set[int] = set()
        for m in self.moduli:
            primes.update(_prime_factors(m))
        return sorted(primes)

    def whole(self) -> Ideal:
        return ideal_from_generators(self, [self.one])

    def zero_ideal(self) -> Ideal:
        return ideal_from_generators(self, [])


@dataclass(frozen=True)
class RingElem:
    ring: FiniteRing
    residues: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.residues) != len(self.ring.moduli):
            raise ValueError("residue list length must match the ring's moduli")
        for r, m in zip(self.residues, self.ring.moduli):
            if not 0 <= r < m:
                raise ValueError(f"residue {r} out of range for Z/{m}")

    def _coerce(self, other: object) -> RingElem:
        if isinstance(other, RingElem):
            if other.ring != self.ring:
                raise ValueError(f"cannot combine elements of {self.ring} and {other.ring}")
            return other
        if isinstance(other, int):
            return self.ring(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> RingElem:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RingElem(
            self.ring,
            tuple((x + y) % m for x, y, m in zip(self.residues, o.residues, self.ring.moduli)),
        )

    __radd__ = __add__

    def __mul__(self, other: object) -> RingElem:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RingElem(
            self.ring,
            tuple((x * y) % m for x, y, m in zip(self.residues, o.residues, self.ring.moduli)),
        )

    __rmul__ = __mul__

    def __neg__(self) -> RingElem:
        return RingElem(self.ring, tuple((-x) % m for x, m in zip(self.residues, self.ring.moduli)))

    def __sub__(self, other: object) -> RingElem:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> RingElem:
        return (-self) + other

    def __pow__(self, n: int) -> RingElem:
        if n < 0:
            raise ValueError("negative powers are not defined in a general ring")
        return RingElem(
            self.ring, tuple(pow(x, n, m) for x, m in zip(self.residues, self.ring.moduli))
        )

    def __bool__(self) -> bool:
        return any(self.residues)

    def __repr__(self) -> str:
        if len(self.residues) == 1:
            return str(self.residues[0])
        return "(" + ",".join(map(str, self.residues)) + ")"

    def sort_key(self) -> tuple[int, ...]:
        return self.residues


@dataclass(frozen=True)
class Ideal:
    ring: FiniteRing
    generators: tuple[RingElem, ...]
    elements: frozenset[RingElem] = field(repr=False)

    def __contains__(self, x: object) -> bool:
        return x in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[RingElem]:
        return iter(self.sorted_elements())

    def sorted_elements(self) -> list[RingElem]:
        return sorted(self.elements, key=RingElem.sort_key)

    def nonzero(self) -> list[RingElem]:
        return [x for x in self.sorted_elements() if x]

    @property
    def is_zero(self) -> bool:
        return len(self.elements) == 1

    @property
    def is_whole(self) -> bool:
        return len(self.elements) == self.ring.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.elements == other.elements

    def __hash__(self) -> int:
        return hash((self.ring, self.elements))

    def __le__(self, other: Ideal) -> bool:
        return self.ring == other.ring and self.elements <= other.elements

    def __str__(self) -> str:
        gens = ", ".join(repr(g) for g in self.generators) or "0"
        return f"({gens}) in {self.ring}"


def ideal_from_generators(ring: FiniteRing, gens: Iterable[RingElem | int | Sequence[int]]) -> Ideal:
    """Smallest ideal of ``ring`` containing ``gens``, enumerated by closure.

    An empty ``gens`` gives the zero ideal.
    """
    generators = tuple(ring(g) for g in gens)
    ring_elems = list(ring.elements())
    # every multiple r*g, then close under addition
    multiples = {r * g for g in generators for r in ring_elems}
    elements = {ring.zero}
    frontier = [ring.zero]
    while frontier:
        new = []
        for s in frontier:
            for t in multiples:
                u = s + t
                if u not in elements:
                    elements.add(u)
                    new.append(u)
        if len(elements) > ring.size:
            raise RuntimeError("ideal closure exceeded the ring size")
        frontier = new
    return Ideal(ring, generators, frozenset(elements))


def ideal_product(A: Ideal, B: Ideal) -> Ideal:
    """Ideal generated by all products ab with a in A, b in B."""
    if A.ring != B.ring:
        raise ValueError(f"ideals live in different rings: {A.ring} and {B.ring}")
    products = {a * b for a in A.elements for b in B.elements}
    products.discard(A.ring.zero)
    gens = sorted(products, key=RingElem.sort_key)
    ideal = ideal_from_generators(A.ring, gens)
    # product ideals are reported with the short generator list of A*B
    short = tuple(a * b for a in A.generators for b in B.generators if a * b)
    return Ideal(A.ring, short, ideal.elements)


@dataclass(frozen=True)
class ConditionCheck:
    """Outcome of the condition (*) check; truthy iff the condition holds."""

    holds: bool
    diagnostic: str

    def __bool__(self) -> bool:
        return self.holds


def check_condition_star(ring: FiniteRing, phi_type: str) -> ConditionCheck:
    """Check condition (*) for the root system type ``phi_type`` over ``ring``.

    For C_l and G2 the ring may not have the two-element residue field; for
    C_l every c must in addition lie in c^2 R + 2c R. A_l imposes nothing.
    Quantification is exhaustive over ring elements.
    """
    from .rootsys import parse_type_label

    family, rank = parse_type_label(phi_type)
    if family == "A":
        return ConditionCheck(True, f"{phi_type}: no condition for simply laced type A")
    if 2 in ring.residue_characteristics():
        return ConditionCheck(False, f"{phi_type} over {ring}: residue field of two elements")
    if family == "C":
        for c in ring.elements():
            if c not in ideal_from_generators(ring, [c * c, c * 2]):
                return ConditionCheck(
                    False, f"{phi_type} over {ring}: c={c!r} is not in c^2R + 2cR"
                )
        return ConditionCheck(
            True, f"{phi_type} over {ring}: no F2 residue field and c in c^2R+2cR for all c"
        )
    return ConditionCheck(True, f"{phi_type} over {ring}: no F2 residue field")


def parse_ideal(ring: FiniteRing, spec: Sequence) -> Ideal:
    """Ideal from a config list of generators; ints or residue tuples."""
    gens = []
    for g in spec:
        gens.append(ring(g if isinstance(g, int) else tuple(g)))
    return ideal_from_generators(ring, gens)


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out
