"""Sort injection tables: declaration, embedding, projection, composition."""

import pytest

from srctrans.injections import (
    DuplicateInjection,
    IllTypedPath,
    InjectionDecl,
    InjectionTable,
    MissingEdge,
    NoInjection,
    Step,
)
from srctrans.terms import Atom, NodeKind, mk_term

A, B, C = Atom("A"), Atom("B"), Atom("C")
MKA = NodeKind("MkA", ("Int",), (), A)
WRAP_AB = NodeKind("WrapAB", (), (A,), B)
WRAP_BC = NodeKind("WrapBC", (), (B,), C)
PAD = NodeKind("Pad", (), (A, A), B)  # needs a fill for the spare slot


def table():
    t = InjectionTable()
    t.declare(InjectionDecl(A, B, (Step(WRAP_AB, 0),)))
    t.declare(InjectionDecl(B, C, (Step(WRAP_BC, 0),)))
    return t


def a(n=1):
    return mk_term(MKA, (n,))


def test_inj_proj_identity():
    t = table()
    term = a(5)
    up = t.inj(term, B)
    assert up.kind == WRAP_AB
    assert t.proj(up, A) == term


def test_proj_mismatch_returns_none():
    t = table()
    # a B-term built through a different kind does not unwrap
    other = mk_term(PAD, (), (a(1), a(2)))
    assert t.proj(other, A) is None
    # a C-term wrapping a B-chain does not project all the way from A
    up = t.inj(t.inj(a(), B), C)
    assert t.proj(up, B) is not None


def test_missing_edge():
    t = table()
    with pytest.raises(NoInjection):
        t.inj(a(), Atom("Z"))


def test_compose():
    t = table()
    t.compose(A, B, C)
    term = a(9)
    direct = t.inj(term, C)
    assert direct == t.inj(t.inj(term, B), C)
    assert t.proj(direct, A) == term
    assert t.lookup(A, C).derived


def test_compose_requires_edges():
    t = table()
    with pytest.raises(MissingEdge):
        t.compose(B, A, C)


def test_fill_positions_checked():
    t = InjectionTable()
    with pytest.raises(IllTypedPath):
        t.declare(InjectionDecl(A, B, (Step(PAD, 0),)))  # slot 1 unfilled
    t.declare(InjectionDecl(A, B, (Step(PAD, 0, (), ((1, a(0)),)),)))
    up = t.inj(a(3), B)
    assert up.children[1] == a(0)
    # a differently-filled term does not project
    other = mk_term(PAD, (), (a(3), a(7)))
    assert t.proj(other, A) is None


def test_ill_typed_chain_rejected():
    t = InjectionTable()
    with pytest.raises(IllTypedPath):
        t.declare(InjectionDecl(B, C, (Step(WRAP_AB, 0),)))


def test_duplicate_derived_paths_conflict():
    t = table()
    t.compose(A, B, C)
    with pytest.raises(DuplicateInjection):
        # a second, different derived path for the same edge
        t.declare(
            InjectionDecl(
                A, C, (Step(PAD, 0, (), ((1, a(0)),)), Step(WRAP_BC, 0)),
                derived=True,
            )
        )


def test_declared_beats_derived():
    t = table()
    t.declare(InjectionDecl(A, C, (Step(WRAP_AB, 0), Step(WRAP_BC, 0))))
    # a later derived edge for the same pair is silently ignored
    t.compose(A, B, C)
    assert not t.lookup(A, C).derived
    # but an explicit redeclaration is an error
    with pytest.raises(DuplicateInjection):
        t.declare(InjectionDecl(A, C, (Step(WRAP_AB, 0), Step(WRAP_BC, 0))))


def test_dump_deterministic_and_sorted():
    t = table()
    t.compose(A, B, C)
    d = t.dump()
    assert d == t.dump()
    lines = d.strip().split("\n")
    assert lines == sorted(lines)
    assert any("(derived)" in line for line in lines)
