import random

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from chevlab.chevrep import commutator, identity, unipotent
from chevlab.grouplab import (
    CongruenceLevel,
    IncompleteSubgroupError,
    KernelEscapeError,
    absolute_generators,
    cache_bytes,
    closure,
    congruence_kernel_member,
    congruent,
    elementary_generators,
    elementary_subgroup,
    make_ambient,
    member,
    mixed_commutator,
    normal_closure,
    read_cache,
    relative_elementary,
    write_cache,
)
from chevlab.rings import FiniteRing, ideal_from_generators, ideal_product

A2_ROOT = (1, -1, 0)


def sl_order(n, p, k):
    """|SL_n(Z/p^k)| from the standard formula, independent of any enumeration."""
    gl = 1
    for i in range(n):
        gl *= p**n - p**i
    return gl // (p - 1) * p ** ((k - 1) * (n * n - 1))


def sp4_order(p, k):
    return p**4 * (p**2 - 1) * (p**4 - 1) * p ** ((k - 1) * 10)


@pytest.fixture(scope="module")
def sl3z4():
    return make_ambient("A2", FiniteRing((4,)))


@pytest.fixture(scope="module")
def whole_sl3z4(sl3z4):
    return elementary_subgroup(sl3z4, sl3z4.ring.whole())


def test_trivial_subgroup(sl3z4):
    S = closure(sl3z4, [])
    assert len(S) == 1 and identity(sl3z4.rep, sl3z4.ring) in S
    assert len(elementary_subgroup(sl3z4, sl3z4.ring.zero_ideal())) == 1


@pytest.mark.parametrize("label,m,order", [("A2", 2, sl_order(3, 2, 1)), ("A2", 3, sl_order(3, 3, 1)), ("C2", 3, sp4_order(3, 1))])
def test_orders_over_fields(label, m, order):
    amb = make_ambient(label, FiniteRing((m,)))
    assert len(elementary_subgroup(amb, amb.ring.whole())) == order


def test_sl3_z4_order(whole_sl3z4):
    assert whole_sl3z4.complete
    assert len(whole_sl3z4) == sl_order(3, 2, 2) == 43008


def test_cyclic_root_subgroup(sl3z4):
    g = unipotent(sl3z4.rep, A2_ROOT, sl3z4.ring(1), sl3z4.ring)
    S = closure(sl3z4, [g])
    assert len(S) == 4
    E2 = elementary_subgroup(sl3z4, ideal_from_generators(sl3z4.ring, [2]))
    assert g not in E2 and g * g in E2


def test_kernel_members(sl3z4):
    R = sl3z4.ring
    I = ideal_from_generators(R, [2])
    assert congruence_kernel_member(unipotent(sl3z4.rep, A2_ROOT, R(2), R), I)
    assert not congruence_kernel_member(unipotent(sl3z4.rep, A2_ROOT, R(1), R), I)
    assert congruence_kernel_member(identity(sl3z4.rep, R), R.zero_ideal())
    assert CongruenceLevel.of(I).divisors == (2,)


def test_congruent_trivial_cases(sl3z4, whole_sl3z4):
    rng = random.Random(3)
    trivial = closure(sl3z4, [])
    for _ in range(5):
        x, y = whole_sl3z4.random_element(rng), whole_sl3z4.random_element(rng)
        assert congruent(x, x, trivial)
        assert congruent(x, y, whole_sl3z4)
        assert congruent(x, y, trivial) == (x == y)


def test_lagrange_and_subgroup_chain(sl3z4, whole_sl3z4):
    R = sl3z4.ring
    E2 = elementary_subgroup(sl3z4, ideal_from_generators(R, [2]))
    ER2 = relative_elementary(sl3z4, ideal_from_generators(R, [2])).group
    assert E2.issubset(ER2) and ER2.issubset(whole_sl3z4)
    assert len(whole_sl3z4) % len(ER2) == 0 and len(ER2) % len(E2) == 0
    # level-2 kernel of SL3(Z/4) has 2^8 elements, and E(R,(2)) fills it
    assert len(ER2) == 2**8


@settings(max_examples=25)
@given(st.randoms(use_true_random=False))
def test_closure_is_closed(rnd):
    amb = make_ambient("A2", FiniteRing((4,)))
    S = elementary_subgroup(amb, ideal_from_generators(amb.ring, [2]))
    arr = S.array()
    i, j = rnd.randrange(len(arr)), rnd.randrange(len(arr))
    prod = amb.mul(arr[i : i + 1], arr[j : j + 1])
    assert amb.encode(prod)[0] in S.elements


def test_encoding_is_injective_and_roundtrips():
    amb = make_ambient("G2", FiniteRing((9,)))
    rng = np.random.default_rng(0)
    batch = rng.integers(0, 9, size=(50, 1, 7, 7))
    encs = amb.encode(batch)
    assert np.array_equal(amb.decode(encs), batch)
    assert len(set(encs)) == len({b.tobytes() for b in batch})
    wide = make_ambient("A2", FiniteRing((257,)))
    assert wide.width == 2 * 9


def test_mixed_commutator_symmetry(sl3z4):
    R = sl3z4.ring
    A = elementary_subgroup(sl3z4, ideal_from_generators(R, [2]))
    B = elementary_subgroup(sl3z4, R.whole())
    AB = mixed_commutator(A, B)
    BA = mixed_commutator(B, A)
    assert AB.same_set(BA)
    g = commutator(A.random_element(random.Random(1)), B.random_element(random.Random(2)))
    assert g in AB


def test_budget_partial_is_refused(sl3z4):
    S = elementary_subgroup(sl3z4, sl3z4.ring.whole(), budget=1000)
    assert not S.complete
    with pytest.raises(IncompleteSubgroupError):
        member(S, identity(sl3z4.rep, sl3z4.ring))
    x = identity(sl3z4.rep, sl3z4.ring)
    with pytest.raises(IncompleteSubgroupError):
        congruent(x, x, S)


def test_kernel_escape(sl3z4):
    R = sl3z4.ring
    level = CongruenceLevel.of(ideal_from_generators(R, [2]))
    with pytest.raises(KernelEscapeError):
        closure(sl3z4, [unipotent(sl3z4.rep, A2_ROOT, R(1), R)], kernel=level)


def test_normal_closure_matches_conjugate_generation(sl3z4):
    R = sl3z4.ring
    g = unipotent(sl3z4.rep, A2_ROOT, R(2), R)
    N = normal_closure(sl3z4, [g], absolute_generators(sl3z4))
    # oracle: close all conjugates of g by every element of the whole group
    whole = elementary_subgroup(sl3z4, R.whole())
    conj = []
    rng = random.Random(0)
    for _ in range(200):
        h = whole.random_element(rng)
        conj.append(h * g * h.inverse())
    assert closure(sl3z4, conj + [g]).issubset(N)
    assert len(N) == 2**8


@pytest.mark.parametrize("seeds", [(0, 1), (5, 11)])
def test_c_sample_seeds_agree(seeds):
    amb = make_ambient("A2", FiniteRing((8,)))
    I = ideal_from_generators(amb.ring, [4])
    full = relative_elementary(amb, I)
    for s in seeds:
        re = relative_elementary(amb, I, c_sample=2, seed=s)
        assert re.by_z_generators.same_set(full.by_z_generators)
        assert re.by_normal_closure.fingerprint() == full.by_normal_closure.fingerprint()


def test_cache_roundtrip_byte_identical(tmp_path, sl3z4):
    S = elementary_subgroup(sl3z4, ideal_from_generators(sl3z4.ring, [2]))
    p = write_cache(S, tmp_path / "e2.bin")
    back = read_cache(p)
    assert back.elements == S.elements and back.complete
    write_cache(back, tmp_path / "again.bin")
    assert p.read_bytes() == cache_bytes(S)
    body = p.read_bytes().partition(b"\n\n")[2]
    assert body == (tmp_path / "again.bin").read_bytes().partition(b"\n\n")[2]


def test_corrupt_cache_rejected(tmp_path, sl3z4):
    S = closure(sl3z4, [])
    p = write_cache(S, tmp_path / "c.bin")
    p.write_bytes(p.read_bytes()[:-1])
    with pytest.raises(ValueError):
        read_cache(p)
    p.write_bytes(b"junk\n\n")
    with pytest.raises(ValueError):
        read_cache(p)


def test_negative_control_sl3_z8():
    amb = make_ambient("A2", FiniteRing((8,)))
    R = amb.ring
    AB = ideal_product(ideal_from_generators(R, [2]), ideal_from_generators(R, [2]))
    N = relative_elementary(amb, AB).group
    assert len(N) == 2**8
    assert unipotent(amb.rep, A2_ROOT, R(2), R) not in N
    assert unipotent(amb.rep, A2_ROOT, R(4), R) in N
    assert elementary_generators(amb, R.whole())[0] not in N


def test_elementary_generators_are_unimodular():
    amb = make_ambient("C2", FiniteRing((27,)))
    for g in elementary_generators(amb, amb.ring.whole()):
        assert sympy.Matrix(g.matrix[0].tolist()).det() % 27 == 1


def test_relative_elementary_extremes(sl3z4, whole_sl3z4):
    R = sl3z4.ring
    assert len(relative_elementary(sl3z4, R.zero_ideal()).group) == 1
    assert relative_elementary(sl3z4, R.whole()).group.same_set(whole_sl3z4)


def test_mixed_commutator_trivial_and_abelian(sl3z4):
    R = sl3z4.ring
    X = elementary_subgroup(sl3z4, ideal_from_generators(R, [2]))
    assert len(mixed_commutator(X, closure(sl3z4, []))) == 1
    U = closure(sl3z4, [unipotent(sl3z4.rep, A2_ROOT, R(1), R)])
    assert len(mixed_commutator(U, U)) == 1


def test_mixed_commutator_relative_equals_plain_sl3_z4(sl3z4):
    R = sl3z4.ring
    I = ideal_from_generators(R, [2])
    ER = relative_elementary(sl3z4, I).group
    E = elementary_subgroup(sl3z4, I)
    assert mixed_commutator(ER, ER).same_set(mixed_commutator(E, E))
