"""Exhaustive subgroup enumeration over finite rings.

Elements are int64 arrays of shape (k, d, d), one residue matrix per
modulus of the ring. A subgroup is held as a set of canonical encodings:
the full entry tuple packed into a fixed-width byte string, so distinct
matrices never collide.

The closure engine grows a group one generator at a time. A generator that
is already a member is skipped, so the active generating set stays small
and a breadth-first pass costs |G| times a handful of matrix products.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .chevrep import ChevRep, GroupElem, Token, build_rep, commutator, from_word, identity, unipotent, z_generator
from .rings import FiniteRing, Ideal, RingElem

DEFAULT_BUDGET = 1 << 24
CACHE_MAGIC = "chevlab-subgroup-cache v1"


class IncompleteSubgroupError(RuntimeError):
    """A partial enumeration was asked to certify something."""


class KernelEscapeError(RuntimeError):
    """An element left the congruence kernel that must contain the subgroup."""


@dataclass(frozen=True)
class Ambient:
    """A representation over a finite ring: the matrix group all subgroups live in."""

    rep: ChevRep
    ring: FiniteRing

    @property
    def dim(self) -> int:
        return self.rep.dimension

    @property
    def mods(self) -> np.ndarray:
        return np.array(self.ring.moduli, dtype=np.int64).reshape(-1, 1, 1)

    @property
    def dtype(self):
        return np.uint8 if max(self.ring.moduli) <= 256 else np.uint16

    @property
    def width(self) -> int:
        return len(self.ring.moduli) * self.dim * self.dim * np.dtype(self.dtype).itemsize

    def descriptor(self) -> str:
        return f"{self.rep.label} over {self.ring}"

    def identity_array(self) -> np.ndarray:
        return identity(self.rep, self.ring).matrix

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a @ b) % self.mods

    def encode(self, batch: np.ndarray) -> list[bytes]:
        """Encodings of a batch of shape (n, k, d, d)."""
        raw = np.ascontiguousarray(batch.astype(self.dtype)).tobytes()
        w = self.width
        return [raw[i : i + w] for i in range(0, len(raw), w)]

    def encode_one(self, m: np.ndarray) -> bytes:
        return np.ascontiguousarray(m.astype(self.dtype)).tobytes()

    def decode(self, encs: Sequence[bytes]) -> np.ndarray:
        k, d = len(self.ring.moduli), self.dim
        if not encs:
            return np.zeros((0, k, d, d), dtype=np.int64)
        flat = np.frombuffer(b"".join(encs), dtype=self.dtype)
        return flat.reshape(len(encs), k, d, d).astype(np.int64)

    def elem(self, m: np.ndarray, word: tuple[Token, ...] | None = None) -> GroupElem:
        return GroupElem(self.rep, self.ring, np.array(m, dtype=np.int64), word)

    def check(self, g: GroupElem) -> None:
        if g.ring != self.ring or g.rep.label != self.rep.label:
            raise ValueError(f"element of {g.rep.label} over {g.ring} is not in {self.descriptor()}")


def make_ambient(label: str, ring: FiniteRing) -> Ambient:
    return Ambient(build_rep(label), ring)


@dataclass(frozen=True)
class CongruenceLevel:
    """Reduction R -> R/I. Ideals of a product of Z/m are products of d_i Z/m_i."""

    ideal: Ideal
    divisors: tuple[int, ...]

    @classmethod
    def of(cls, ideal: Ideal) -> CongruenceLevel:
        ring = ideal.ring
        divs = []
        for i, m in enumerate(ring.moduli):
            d = m
            for x in ideal.elements:
                d = math.gcd(d, x.residues[i])
            divs.append(d)
        expected = math.prod(m // d for m, d in zip(ring.moduli, divs))
        if expected != len(ideal):
            raise AssertionError("ideal is not a product of principal component ideals")
        return cls(ideal, tuple(divs))

    def reduce(self, batch: np.ndarray) -> np.ndarray:
        divs = np.array(self.divisors, dtype=np.int64).reshape(-1, 1, 1)
        return batch % divs

    def contains(self, batch: np.ndarray) -> np.ndarray:
        """Boolean mask: which matrices of a batch (n, k, d, d) reduce to the identity."""
        d = batch.shape[-1]
        eye = self.reduce(np.broadcast_to(np.eye(d, dtype=np.int64), batch.shape[-3:]))
        red = self.reduce(batch)
        return (red == eye).reshape(batch.shape[0], -1).all(axis=1)


def congruence_kernel_member(g: GroupElem, level: CongruenceLevel | Ideal) -> bool:
    """True iff g reduces to the identity modulo the level's ideal."""
    if isinstance(level, Ideal):
        level = CongruenceLevel.of(level)
    return bool(level.contains(g.matrix[None])[0])


@dataclass
class EnumeratedSubgroup:
    ambient: Ambient
    generators: list[GroupElem]
    elements: set[bytes] = field(repr=False)
    complete: bool
    budget_used: dict[str, int] = field(default_factory=dict)
    label: str = ""
    active: list[np.ndarray] = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def require_complete(self) -> None:
        if not self.complete:
            raise IncompleteSubgroupError(f"{self.label or 'subgroup'} is partial ({len(self)} elements)")

    def __contains__(self, g: GroupElem | bytes) -> bool:
        return member(self, g)

    def sorted_encodings(self) -> list[bytes]:
        # elements never change after construction, so the sort is done once
        cached = self.__dict__.get("_sorted")
        if cached is None or len(cached) != len(self.elements):
            cached = self.__dict__["_sorted"] = sorted(self.elements)
        return cached

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for e in self.sorted_encodings():
            h.update(e)
        return h.hexdigest()

    def array(self) -> np.ndarray:
        return self.ambient.decode(self.sorted_encodings())

    def issubset(self, other: EnumeratedSubgroup) -> bool:
        self.require_complete()
        other.require_complete()
        return self.elements <= other.elements

    def same_set(self, other: EnumeratedSubgroup) -> bool:
        self.require_complete()
        other.require_complete()
        return self.elements == other.elements

    def random_element(self, rng: random.Random) -> GroupElem:
        encs = self.sorted_encodings()
        return self.ambient.elem(self.ambient.decode([rng.choice(encs)])[0])

    def all_in_kernel(self, level: CongruenceLevel, chunk: int = 1 << 16) -> bool:
        encs = self.sorted_encodings()
        for i in range(0, len(encs), chunk):
            if not level.contains(self.ambient.decode(encs[i : i + chunk])).all():
                return False
        return True


@dataclass
class GeneratedSubgroup:
    """A subgroup known only by generators; elements are sampled as random words."""

    ambient: Ambient
    generators: list[GroupElem]
    label: str = ""

    def random_element(self, rng: random.Random, length: int = 12) -> GroupElem:
        g = identity(self.ambient.rep, self.ambient.ring)
        for _ in range(length):
            h = rng.choice(self.generators)
            g = g * (h if rng.random() < 0.5 else h.inverse())
        return g


Subgroup = EnumeratedSubgroup | GeneratedSubgroup


def member(S: EnumeratedSubgroup, g: GroupElem | bytes) -> bool:
    """Exact membership; partial subgroups are refused."""
    S.require_complete()
    if isinstance(g, bytes):
        return g in S.elements
    S.ambient.check(g)
    return S.ambient.encode_one(g.matrix) in S.elements


def congruent(x: GroupElem, y: GroupElem, N: EnumeratedSubgroup) -> bool:
    """x == y modulo N, i.e. x y^-1 in N."""
    N.ambient.check(x)
    return bool(congruent_arrays(N.ambient, x.matrix[None], y.inverse().matrix[None], N)[0])


# closure engine


class _Closure:
    def __init__(self, ambient: Ambient, budget: int, kernel: CongruenceLevel | None):
        self.amb = ambient
        self.budget = budget
        self.kernel = kernel
        ident = ambient.identity_array()
        self.elements: set[bytes] = {ambient.encode_one(ident)}
        self.encs: list[bytes] = [ambient.encode_one(ident)]
        self.active: list[np.ndarray] = []
        self.complete = True
        self.products = 0

    def _expand(self, encs: list[bytes], gens: np.ndarray) -> None:
        """Right-multiply a batch of members by ``gens``; record new products."""
        prods = self.amb.mul(self.amb.decode(encs)[:, None], gens[None]).reshape(-1, *gens.shape[1:])
        self.products += len(prods)
        seen = self.elements
        new_idx = []
        for i, e in enumerate(self.amb.encode(prods)):
            if e not in seen:
                seen.add(e)
                self.encs.append(e)
                new_idx.append(i)
        if new_idx and self.kernel is not None and not self.kernel.contains(prods[new_idx]).all():
            raise KernelEscapeError(f"closure left the level-{self.kernel.divisors} kernel")

    def _chunk(self, ngens: int) -> int:
        # keep each product batch near 2^22 int64 entries
        per = ngens * self.amb.dim**2 * len(self.amb.ring.moduli)
        return max(1, (1 << 22) // per)

    def add(self, g: np.ndarray) -> bool:
        """Extend by one generator; returns False if it was already a member.

        Old members are already closed under the old generators, so they
        only need multiplying by g; members found from here on need every
        active generator.
        """
        if not self.complete:
            return False
        e = self.amb.encode_one(g)
        if e in self.elements:
            return False
        if self.kernel is not None and not self.kernel.contains(g[None]).all():
            raise KernelEscapeError("generator lies outside the expected congruence kernel")
        self.active.append(g)
        old = len(self.encs)
        step = self._chunk(1)
        for i in range(0, old, step):
            self._expand(self.encs[i : min(i + step, old)], g[None])
            if len(self.elements) > self.budget:
                self.complete = False
                return True
        gens = np.stack(self.active)
        step = self._chunk(len(gens))
        i = old
        while i < len(self.encs):
            chunk = self.encs[i : i + step]
            i += len(chunk)
            self._expand(chunk, gens)
            if len(self.elements) > self.budget:
                self.complete = False
                return True
        return True


def _as_arrays(gens: Iterable[GroupElem], ambient: Ambient) -> list[np.ndarray]:
    out = []
    for g in gens:
        ambient.check(g)
        out.append(g.matrix)
    return out


def _finish(c: _Closure, gens: list[GroupElem], label: str, extra: dict[str, int] | None = None) -> EnumeratedSubgroup:
    used = {"products": c.products, "active_generators": len(c.active)}
    if extra:
        used.update(extra)
    return EnumeratedSubgroup(c.amb, gens, c.elements, c.complete, used, label, list(c.active))


def closure(
    ambient: Ambient,
    gens: Sequence[GroupElem],
    budget: int = DEFAULT_BUDGET,
    kernel: CongruenceLevel | None = None,
    label: str = "",
) -> EnumeratedSubgroup:
    """The subgroup generated by ``gens``; complete=False if the budget ran out."""
    c = _Closure(ambient, budget, kernel)
    for g in _as_arrays(gens, ambient):
        c.add(g)
        if not c.complete:
            break
    return _finish(c, list(gens), label)


def normal_closure(
    ambient: Ambient,
    gens: Sequence[GroupElem],
    conjugators: Sequence[GroupElem],
    budget: int = DEFAULT_BUDGET,
    kernel: CongruenceLevel | None = None,
    label: str = "",
) -> EnumeratedSubgroup:
    """Smallest subgroup containing ``gens`` and stable under conjugation by ``conjugators``.

    In a finite group H^x <= H already forces H^x = H, so only conjugation
    by the listed elements (not their inverses) has to be closed.
    """
    c = _Closure(ambient, budget, kernel)
    for g in _as_arrays(gens, ambient):
        c.add(g)
    if not c.complete:
        return _finish(c, list(gens), label)
    xs = np.stack(_as_arrays(conjugators, ambient)) if conjugators else None
    xinv = np.stack([x.inverse().matrix for x in conjugators]) if conjugators else None
    checked = 0
    rounds = 0
    while xs is not None and checked < len(c.active):
        rounds += 1
        g = c.active[checked]
        checked += 1
        conj = ambient.mul(ambient.mul(xs, g[None]), xinv)
        for m in conj:
            c.add(m)
            if not c.complete:
                return _finish(c, _active_elems(ambient, c, gens), label, {"conjugation_rounds": rounds})
    return _finish(c, _active_elems(ambient, c, gens), label, {"conjugation_rounds": rounds})


def _active_elems(ambient: Ambient, c: _Closure, gens: Sequence[GroupElem]) -> list[GroupElem]:
    """The active generators as elements, keeping words where the input had them."""
    by_enc = {ambient.encode_one(g.matrix): g for g in gens}
    return [by_enc.get(ambient.encode_one(a)) or ambient.elem(a) for a in c.active]


# named subgroups


def ring_additive_generators(ring: FiniteRing) -> list[RingElem]:
    out = []
    for i in range(len(ring.moduli)):
        r = [0] * len(ring.moduli)
        r[i] = 1
        out.append(ring(tuple(r)))
    return out


def ideal_additive_generators(ideal: Ideal) -> list[RingElem]:
    """d_i e_i for the nonzero components of I = prod d_i Z/m_i."""
    level = CongruenceLevel.of(ideal)
    ring = ideal.ring
    out = []
    for i, (d, m) in enumerate(zip(level.divisors, ring.moduli)):
        if d % m:
            r = [0] * len(ring.moduli)
            r[i] = d
            out.append(ring(tuple(r)))
    return out


def elementary_generators(ambient: Ambient, ideal: Ideal, roots=None) -> list[GroupElem]:
    """x_alpha(a) for alpha in ``roots`` (default all) and a over additive generators of I."""
    roots = ambient.rep.system.roots if roots is None else roots
    return [unipotent(ambient.rep, r, a, ambient.ring) for r in roots for a in ideal_additive_generators(ideal)]


def absolute_generators(ambient: Ambient) -> list[GroupElem]:
    return elementary_generators(ambient, ambient.ring.whole())


def elementary_subgroup(ambient: Ambient, ideal: Ideal, budget: int = DEFAULT_BUDGET) -> EnumeratedSubgroup:
    """E(Phi, I): generated by x_alpha(a), a in I."""
    return closure(
        ambient, elementary_generators(ambient, ideal), budget, CongruenceLevel.of(ideal), label=f"E({_ideal_label(ideal)})"
    )


def z_generators(
    ambient: Ambient, ideal: Ideal, c_values: Sequence[RingElem] | None = None
) -> list[GroupElem]:
    """z_alpha(a, c) for all roots, a over additive generators of I and c in ``c_values`` (default: all of R)."""
    cs = list(ambient.ring.elements()) if c_values is None else list(c_values)
    return [
        z_generator(ambient.rep, r, a, c, ambient.ring)
        for r in ambient.rep.system.roots
        for a in ideal_additive_generators(ideal)
        for c in cs
    ]


@dataclass
class RelativeElementary:
    by_normal_closure: EnumeratedSubgroup
    by_z_generators: EnumeratedSubgroup

    @property
    def group(self) -> EnumeratedSubgroup:
        return self.by_normal_closure


class ConstructionMismatchError(RuntimeError):
    pass


def relative_elementary(
    ambient: Ambient,
    ideal: Ideal,
    budget: int = DEFAULT_BUDGET,
    c_sample: int | None = None,
    seed: int = 0,
) -> RelativeElementary:
    """E(Phi, R, I) built twice: as the normal closure of E(Phi, I) under the
    absolute generators, and from the z_alpha(a, c).

    With ``c_sample`` the z-route seeds with that many random c and is then
    closed under conjugation; otherwise every c in R is used and no
    conjugation step is taken. Disagreement raises ConstructionMismatchError.
    """
    level = CongruenceLevel.of(ideal)
    lab = _ideal_label(ideal)
    absolute = absolute_generators(ambient)
    first = normal_closure(ambient, elementary_generators(ambient, ideal), absolute, budget, level, f"E(R,{lab})")
    if c_sample is None:
        second = closure(ambient, z_generators(ambient, ideal), budget, level, f"<z({lab},c)>")
    else:
        rng = random.Random(seed)
        elems = list(ambient.ring.elements())
        cs = sorted(rng.sample(elems, min(c_sample, len(elems))), key=RingElem.sort_key)
        second = normal_closure(ambient, z_generators(ambient, ideal, cs), absolute, budget, level, f"<z({lab},c)>^E")
    if first.complete and second.complete and not first.same_set(second):
        raise ConstructionMismatchError(
            f"E(R,{lab}) has {len(first)} elements by normal closure but {len(second)} from z-generators"
        )
    return RelativeElementary(first, second)


def mixed_commutator(
    X: Subgroup,
    Y: Subgroup,
    budget: int = DEFAULT_BUDGET,
    kernel: CongruenceLevel | None = None,
    samples: int = 50,
    seed: int = 0,
    label: str = "",
) -> EnumeratedSubgroup:
    """[X, Y] as the normal closure in <X, Y> of the commutators of generators.

    X and Y may be enumerated or known only by generators. Afterwards
    ``samples`` commutators [x, y] of random elements are checked for
    membership; a miss raises AssertionError.
    """
    if X.ambient != Y.ambient:
        raise ValueError("X and Y live in different ambient groups")
    amb = X.ambient
    if isinstance(X, EnumeratedSubgroup):
        X.require_complete()
    if isinstance(Y, EnumeratedSubgroup):
        Y.require_complete()
    xg, yg = _dedupe(amb, X.generators), _dedupe(amb, Y.generators)
    label = label or f"[{X.label}, {Y.label}]"
    if not xg or not yg:
        return closure(amb, [], budget, kernel, label)
    comms = _commutator_table(amb, xg, yg)
    S = normal_closure(amb, [amb.elem(m) for m in comms], xg + yg, budget, kernel, label)
    if S.complete and samples:
        rng = random.Random(seed)
        for _ in range(samples):
            x, y = X.random_element(rng), Y.random_element(rng)
            if not member(S, commutator(x, y)):
                raise AssertionError(f"sampled commutator escaped {label}")
    return S


def _commutator_table(amb: Ambient, xg: list[GroupElem], yg: list[GroupElem]) -> np.ndarray:
    """All [x, y] for x in xg, y in yg, deduplicated, identity dropped."""
    X = np.stack([g.matrix for g in xg])
    Xi = np.stack([g.inverse().matrix for g in xg])
    Y = np.stack([g.matrix for g in yg])
    Yi = np.stack([g.inverse().matrix for g in yg])
    xy = amb.mul(X[:, None], Y[None])
    xiyi = amb.mul(Xi[:, None], Yi[None])
    flat = amb.mul(xy, xiyi).reshape(-1, *X.shape[1:])
    ident = amb.encode_one(amb.identity_array())
    keep, seen = [], set()
    for i, e in enumerate(amb.encode(flat)):
        if e != ident and e not in seen:
            seen.add(e)
            keep.append(i)
    return flat[keep]


def _dedupe(amb: Ambient, gens: Sequence[GroupElem]) -> list[GroupElem]:
    seen = set()
    out = []
    ident = amb.encode_one(amb.identity_array())
    for g in gens:
        e = amb.encode_one(g.matrix)
        if e not in seen and e != ident:
            seen.add(e)
            out.append(g)
    return out


def _ideal_label(ideal: Ideal) -> str:
    return ",".join(repr(g) for g in ideal.generators) or "0"


# cache files


def cache_bytes(S: EnumeratedSubgroup) -> bytes:
    """Header lines then the sorted encodings, concatenated."""
    gen_hash = hashlib.sha256()
    for e in sorted(S.ambient.encode_one(g.matrix) for g in S.generators):
        gen_hash.update(e)
    header = "\n".join(
        [
            CACHE_MAGIC,
            f"ambient: {S.ambient.rep.label} {' '.join(map(str, S.ambient.ring.moduli))}",
            f"label: {S.label}",
            f"generators: {gen_hash.hexdigest()}",
            f"complete: {'true' if S.complete else 'false'}",
            f"count: {len(S)}",
            f"width: {S.ambient.width}",
        ]
    )
    return header.encode() + b"\n\n" + b"".join(S.sorted_encodings())


def write_cache(S: EnumeratedSubgroup, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(cache_bytes(S))
    return path


def read_cache(path: str | Path) -> EnumeratedSubgroup:
    from .rings import FiniteRing as _FR

    data = Path(path).read_bytes()
    head, _, body = data.partition(b"\n\n")
    lines = head.decode().split("\n")
    if lines[0] != CACHE_MAGIC:
        raise ValueError(f"{path} is not a subgroup cache")
    fields = dict(line.split(": ", 1) for line in lines[1:])
    label, *mods = fields["ambient"].split()
    amb = Ambient(build_rep(label), _FR(tuple(int(m) for m in mods)))
    width, count = int(fields["width"]), int(fields["count"])
    if width != amb.width or len(body) != width * count:
        raise ValueError(f"{path}: body size does not match header")
    encs = [body[i : i + width] for i in range(0, len(body), width)]
    return EnumeratedSubgroup(
        amb, [], set(encs), fields["complete"] == "true", {"from_cache": 1}, fields.get("label", "")
    )


# congruences


def congruent_arrays(amb: Ambient, lhs: np.ndarray, rhs_inv: np.ndarray, N: EnumeratedSubgroup) -> np.ndarray:
    """Batched congruence: mask of lhs[i] * rhs_inv[i] in N.

    ``rhs_inv`` holds the inverses of the right-hand sides, so this is the
    same test as ``congruent`` applied row by row.
    """
    N.require_complete()
    prods = amb.mul(lhs, rhs_inv)
    return np.fromiter((e in N.elements for e in amb.encode(prods)), dtype=bool, count=len(prods))
