"""Generic traversal combinators over sorted terms."""

import pytest

from srctrans.terms import Atom, NodeKind, mk_term
from srctrans.traversal import (
    SortViolation,
    all_children,
    get_at,
    once_top_down,
    query_collect,
    replace_at,
    seq,
    transform_bottom_up,
    try_,
)

E = Atom("E")
F = Atom("F")
LIT = NodeKind("Lit", ("Int",), (), E)
ADD = NodeKind("Add", (), (E, E), E)
OTHER = NodeKind("Other", (), (), F)


def lit(n):
    return mk_term(LIT, (n,))


def add(a, b):
    return mk_term(ADD, (), (a, b))


def bump(t):
    if t.kind == LIT:
        return mk_term(LIT, (t.payload_values[0] + 1,))
    return None


def test_bottom_up_rewrites_everywhere():
    t = add(lit(1), add(lit(2), lit(3)))
    out = transform_bottom_up(bump, t)
    assert query_collect(
        lambda x: [x.payload_values[0]] if x.kind == LIT else [], out
    ) == [2, 3, 4]


def test_bottom_up_sees_rewritten_children():
    def sum_adds(t):
        if t.kind == ADD and all(c.kind == LIT for c in t.children):
            return lit(sum(c.payload_values[0] for c in t.children))
        return None

    assert transform_bottom_up(sum_adds, add(lit(1), add(lit(2), lit(3)))) == lit(6)


def test_rewrite_must_preserve_sort():
    def to_other(t):
        return mk_term(OTHER) if t.kind == LIT else None

    with pytest.raises(SortViolation):
        transform_bottom_up(to_other, add(lit(1), lit(2)))


def test_query_collect_preorder():
    t = add(lit(1), add(lit(2), lit(3)))
    kinds = query_collect(lambda x: [x.kind.name], t)
    assert kinds == ["Add", "Lit", "Add", "Lit", "Lit"]


def test_once_top_down_stops_after_first():
    r = once_top_down(bump)
    out = r(add(lit(1), lit(2)))
    vals = query_collect(
        lambda x: [x.payload_values[0]] if x.kind == LIT else [], out
    )
    assert vals == [2, 2]  # only the first literal bumped


def test_try_and_seq():
    assert try_(bump)(mk_term(OTHER)) == mk_term(OTHER)
    two_bumps = seq(bump, bump)
    assert two_bumps(lit(0)) == lit(2)
    assert all_children(try_(bump))(add(lit(1), lit(2))) == add(lit(2), lit(3))


def test_paths():
    t = add(lit(1), add(lit(2), lit(3)))
    assert get_at(t, (1, 0)) == lit(2)
    out = replace_at(t, (1, 0), lit(9))
    assert get_at(out, (1, 0)) == lit(9)
    assert get_at(out, (0,)) == lit(1)
