import itertools
import random

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from chevlab.chevrep import (
    Token,
    build_rep,
    chevalley_expand,
    commutator,
    commutator_formula,
    conjugate,
    from_word,
    identity,
    inverse,
    preserves_form,
    structure_constants,
    symplectic_form,
    unipotent,
    y_symbol,
    z_generator,
)
from chevlab.polynomials import variables
from chevlab.rings import FiniteRing

a, b, c = variables("a", "b", "c")


def test_unipotent_a2_entry():
    rep = build_rep("A2")
    g = unipotent(rep, (1, -1, 0), a)
    for i, j in itertools.product(range(3), repeat=2):
        want = a if (i, j) == (0, 1) else (1 if i == j else 0)
        assert g.entry(i, j) == want


@pytest.mark.parametrize("label", ["A2", "A3", "C2", "C3", "G2"])
def test_unipotent_zero_and_additivity(label):
    rep = build_rep(label)
    for r in rep.system.roots:
        assert unipotent(rep, r, 0).is_identity()
        assert unipotent(rep, r, a) * unipotent(rep, r, b) == unipotent(rep, r, a + b)
        assert inverse(unipotent(rep, r, a)) == unipotent(rep, r, -a)


@pytest.mark.parametrize("label", ["A2", "C2", "G2"])
def test_nilpotency(label):
    rep = build_rep(label)
    for r in rep.system.roots:
        e = rep.patterns[r.coords]
        k = rep.nilpotency_index(r)
        assert not np.linalg.matrix_power(e, k).any()
        assert np.linalg.matrix_power(e, k - 1).any()
        expected = 3 if (label == "G2" and not r.is_long) else 2
        assert k == expected


def test_symplectic_form_matches_invariant_form():
    for l in (2, 3):
        F = build_rep(f"C{l}").invariant_form()
        Omega = symplectic_form(l)
        ratio = {F[i, j] * Omega.max() // Omega[i, j] for i, j in zip(*np.nonzero(Omega))}
        assert len(ratio) == 1 and not (F[Omega == 0]).any()


def random_word(rep, ring, rng, n=8):
    elems = list(ring.elements())
    return from_word(rep, [Token(rng.choice(rep.system.roots).coords, rng.choice(elems)) for _ in range(n)], ring)


@pytest.mark.parametrize("label,m", [("A2", 8), ("C2", 27), ("C3", 9), ("G2", 27), ("G2", 9)])
def test_words_preserve_form_and_det(label, m):
    rep, ring, rng = build_rep(label), FiniteRing((m,)), random.Random(label)
    for _ in range(20):
        g = random_word(rep, ring, rng)
        assert preserves_form(g)
        assert sympy.Matrix(g.matrix[0].tolist()).det() % m == 1


@pytest.mark.parametrize("label", ["C2", "G2"])
def test_symbolic_generators_preserve_form(label):
    rep = build_rep(label)
    for r in rep.system.roots:
        assert preserves_form(unipotent(rep, r, a))


@pytest.mark.parametrize("label,m", [("A2", 4), ("C2", 9), ("G2", 9)])
def test_inverse_rules(label, m):
    rep, ring, rng = build_rep(label), FiniteRing((m,)), random.Random(m)
    one = identity(rep, ring)
    assert one.inverse() == one
    for _ in range(10):
        g, h = random_word(rep, ring, rng), random_word(rep, ring, rng)
        assert (g * h).inverse() == h.inverse() * g.inverse()
        assert (g * g.inverse()).is_identity()
        # word-free inverse by modular elimination agrees with the word route
        bare = type(g)(rep, ring, g.matrix, None)
        assert bare.inverse() == g.inverse()


@pytest.mark.parametrize("label,m", [("A2", 8), ("C2", 27), ("G2", 9)])
def test_commutator_and_conjugation_rules(label, m):
    rep, ring, rng = build_rep(label), FiniteRing((m,)), random.Random(label)
    one = identity(rep, ring)
    for _ in range(10):
        g, h, x = (random_word(rep, ring, rng) for _ in range(3))
        assert commutator(g, one).is_identity()
        assert conjugate(x, commutator(g, h)) == commutator(conjugate(x, g), conjugate(x, h))
        assert commutator(g, h) == g * h * g.inverse() * h.inverse()
    for r in rep.system.roots:
        s, t = ring(rng.randrange(m)), ring(rng.randrange(m))
        assert commutator(unipotent(rep, r, s, ring), unipotent(rep, r, t, ring)).is_identity()


def test_domain_mismatch():
    rep = build_rep("A2")
    with pytest.raises(ValueError):
        unipotent(rep, (1, -1, 0), 1, FiniteRing((4,))) * unipotent(rep, (1, -1, 0), 1, FiniteRing((8,)))
    with pytest.raises(ValueError):
        unipotent(rep, (1, 1, -2), a)


def test_y_symbol_examples():
    rep = build_rep("A2")
    r = (1, -1, 0)
    assert y_symbol(rep, r, 0, b).is_identity()
    assert y_symbol(rep, r, a, 0).is_identity()
    # oracle: the 2x2 block [[1,a],[0,1]] and [[1,0],[b,1]] expanded by sympy
    sa, sb = sympy.symbols("a b")
    X, Y = sympy.Matrix([[1, sa], [0, 1]]), sympy.Matrix([[1, 0], [sb, 1]])
    block = (X * Y * X.inv() * Y.inv()).applyfunc(sympy.expand)
    R = FiniteRing((4,))
    g = y_symbol(rep, r, R(2), R(2))
    want = np.eye(3, dtype=np.int64)
    want[:2, :2] = np.array(block.subs({sa: 2, sb: 2}).tolist(), dtype=np.int64) % 4
    assert np.array_equal(g.matrix[0], want)
    sym = y_symbol(rep, r, a, b).to_sympy()
    assert (sym[:2, :2] - block).applyfunc(sympy.expand) == sympy.zeros(2)


def test_z_generator_examples():
    for label in ("A2", "C2", "G2"):
        rep = build_rep(label)
        for r in rep.system.roots:
            assert z_generator(rep, r, a, 0) == unipotent(rep, r, a)
            assert z_generator(rep, r, 0, c).is_identity()
            assert z_generator(rep, r, a, c) == conjugate(unipotent(rep, -r, c), unipotent(rep, r, a))


def test_reference_structure_constants():
    C2 = build_rep("C2")
    S = C2.system
    f = commutator_formula(C2, S.names["alpha"], S.names["beta"])
    assert [(i, j, n) for i, j, _, n in f.factors] == [(1, 1, 1), (1, 2, 1)]
    G2 = build_rep("G2")
    S = G2.system

    def coeffs(x, y):
        return {(i, j): n for i, j, _, n in commutator_formula(G2, S.parse_root(x), S.parse_root(y)).factors if n}

    assert coeffs("alpha", "beta") == {(1, 1): 1, (2, 1): 1, (3, 1): 1, (3, 2): 2}
    assert coeffs("alpha", "2*alpha + beta") == {(1, 1): 3}
    assert coeffs("alpha + beta", "2*alpha + beta") == {(1, 1): -3}
    assert coeffs("beta", "3*alpha + beta") == {(1, 1): 1}
    assert coeffs("alpha", "alpha + beta") == {(1, 1): 2, (2, 1): 3, (1, 2): -3}


def test_a2_fundamental_formula_single_factor():
    A2 = build_rep("A2")
    f = commutator_formula(A2, *A2.system.fundamental)
    assert len(f.factors) == 1 and abs(f.factors[0][3]) == 1


@pytest.mark.parametrize("label", ["A2", "C2", "G2"])
def test_chevalley_formula_all_pairs(label):
    rep = build_rep(label)
    table = structure_constants(rep)
    n = len(rep.system.roots)
    assert len(table) == n * (n - 2)
    for (x, y), f in table.items():
        lhs = commutator(unipotent(rep, x, a), unipotent(rep, y, b))
        assert lhs == chevalley_expand(rep, x, y, a, b)
        # the formula's roots are exactly the root string
        assert [r for _, _, r, _ in f.factors] == [r for _, _, r in rep.system.root_string(x, y)]


@given(st.integers(0, 26), st.integers(0, 26), st.integers(0, 26))
def test_specialisation_is_a_homomorphism(x, y, z):
    rep, ring = build_rep("G2"), FiniteRing((27,))
    S = rep.system
    al, be = S.names["alpha"], S.names["beta"]
    sym = commutator(unipotent(rep, al, a * c), unipotent(rep, -be, b + c)) * y_symbol(rep, al, a, b)
    env = {"a": ring(x), "b": ring(y), "c": ring(z)}
    direct = commutator(unipotent(rep, al, ring(x * z), ring), unipotent(rep, -be, ring(y + z), ring)) * y_symbol(
        rep, al, ring(x), ring(y), ring
    )
    assert sym.specialize(env, ring) == direct
