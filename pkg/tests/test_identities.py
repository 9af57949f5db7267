import pytest
import sympy

from chevlab.chevrep import build_rep
from chevlab.identities import (
    evaluate_word,
    load_bank,
    resolve_roles,
    verify_identity,
    verify_identity_over_ring,
)
from chevlab.rings import FiniteRing

BANK = load_bank()
BY_NAME = {e.name: e for e in BANK}


def test_bank_contents():
    assert {"a", "b", "c", "d", "e", "f", "g", "h", "i", "negative-control"} <= set(BY_NAME)
    assert [e.name for e in BANK if e.expect == "fail"] == ["negative-control"]


@pytest.mark.parametrize("entry", BANK, ids=lambda e: e.name)
def test_symbolic_certificate(entry):
    res = verify_identity(build_rep(entry.system), entry)
    assert res.ok, f"{entry.name}: {res.witness} {res.detail}"
    if entry.expect == "fail":
        assert res.witness is not None


@pytest.mark.parametrize("entry", BANK, ids=lambda e: e.name)
@pytest.mark.parametrize("moduli", [(27,), (8,), (4, 9)])
def test_ring_route_agrees(entry, moduli):
    # words rebuilt directly over the ring, independent of the symbolic expansion
    res = verify_identity_over_ring(build_rep(entry.system), entry, FiniteRing(moduli), 25, seed=1)
    assert res.ok


def test_entry_a_against_sympy_matrices():
    t = sympy.symbols("c")

    def E(i, j, s):
        m = sympy.eye(3)
        m[i, j] = s
        return m

    X, Y = E(0, 1, 1), E(1, 2, t)
    oracle = (X * Y * X.inv() * Y.inv()).applyfunc(sympy.expand)
    assert oracle == E(0, 2, t)
    rep = build_rep("A2")
    roles = resolve_roles(rep, BY_NAME["a"].roles)
    g = evaluate_word(rep, BY_NAME["a"].rhs, roles)
    assert (g.to_sympy() - oracle).applyfunc(sympy.expand) == sympy.zeros(3)


def test_malformed_entries_are_reported(tmp_path):
    bank = tmp_path / "bank.toml"
    bank.write_text(
        '[[identity]]\nname = "bad-root"\nsystem = "A2"\nroles = { r = "2*a1" }\nlhs = "x(r, a)"\nrhs = "x(r, a)"\n\n'
        '[[identity]]\nname = "bad-word"\nsystem = "A2"\nroles = { r = "a1" }\nlhs = "x(r, a) + 1"\nrhs = "x(r, a)"\n'
    )
    rep = build_rep("A2")
    for entry in load_bank(bank):
        res = verify_identity(rep, entry)
        assert not res.holds and "malformed" in res.detail


def test_duplicate_names_rejected(tmp_path):
    bank = tmp_path / "bank.toml"
    one = '[[identity]]\nname = "x"\nsystem = "A2"\nlhs = "x(a1, a)"\nrhs = "x(a1, a)"\n'
    bank.write_text(one + "\n" + one)
    with pytest.raises(ValueError):
        load_bank(bank)


def test_wrong_system_rejected():
    with pytest.raises(ValueError):
        verify_identity(build_rep("A2"), BY_NAME["c"])


def test_word_syntax():
    rep = build_rep("C2")
    roles = resolve_roles(rep, {"r": "a1", "s": "a2"})
    g = evaluate_word(rep, "x(r, a) ** 3", roles)
    assert g == evaluate_word(rep, "x(r, 3*a)", roles)
    assert evaluate_word(rep, "x(r, a) * inv(x(r, a))", roles).is_identity()
    assert evaluate_word(rep, "conj(x(s, b), x(r, a))", roles) == evaluate_word(
        rep, "x(s, b) * x(r, a) * x(s, -b)", roles
    )
    assert evaluate_word(rep, "y(r, a, b)", roles) == evaluate_word(rep, "[x(r, a), x(-r, b)]", roles)
    assert evaluate_word(rep, "z(r, a, b)", roles) == evaluate_word(rep, "x(-r, b) * x(r, a) * x(-r, -b)", roles)
