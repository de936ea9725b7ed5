"""Sorted terms: the uniform tree representation all languages share.

A term is a node kind applied to primitive payloads and sorted children.
Sorts are runtime tags checked at construction time, so an ill-sorted tree
can never be built through this module's constructors.  List, pair and
option values are embedded as ordinary terms via the built-in container
kinds (ConsF/NilF, PairF, JustF/NothingF), which exist at every element
sort.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Union

PRIM_TYPES = ("Int", "Bool", "String")


class TermError(Exception):
    """Base class for term construction and inspection failures."""


class UnknownKind(TermError):
    pass


class ArityMismatch(TermError):
    pass


class SortMismatch(TermError):
    def __init__(self, position, expected, actual):
        super().__init__(
            f"child {position}: expected sort {sort_name(expected)}, "
            f"got {sort_name(actual)}"
        )
        self.position = position
        self.expected = expected
        self.actual = actual


class PayloadMismatch(TermError):
    pass


class NotAListTerm(TermError):
    pass


@dataclass(frozen=True)
class Atom:
    """A nominal sort label."""

    name: str


@dataclass(frozen=True)
class ListOf:
    elem: "Sort"


@dataclass(frozen=True)
class PairOf:
    first: "Sort"
    second: "Sort"


@dataclass(frozen=True)
class OptionOf:
    elem: "Sort"


Sort = Union[Atom, ListOf, PairOf, OptionOf]


def sort_name(sort: Sort) -> str:
    if isinstance(sort, Atom):
        return sort.name
    if isinstance(sort, ListOf):
        return f"[{sort_name(sort.elem)}]"
    if isinstance(sort, PairOf):
        return f"({sort_name(sort.first)}, {sort_name(sort.second)})"
    if isinstance(sort, OptionOf):
        return f"{sort_name(sort.elem)}?"
    raise TypeError(f"not a sort: {sort!r}")


@dataclass(frozen=True)
class NodeKind:
    """A constructor descriptor: payload slots, child sorts, produced sort."""

    name: str
    payloads: tuple[str, ...]
    child_sorts: tuple[Sort, ...]
    produced: Sort

    def __post_init__(self):
        for p in self.payloads:
            if p not in PRIM_TYPES:
                raise ValueError(f"{self.name}: bad payload type {p!r}")

    def __repr__(self):
        return f"NodeKind({self.name})"


@dataclass(frozen=True)
class Term:
    """An immutable sorted tree node.  Build through mk_term only."""

    kind: NodeKind
    payload_values: tuple
    children: tuple["Term", ...]

    @property
    def sort(self) -> Sort:
        return self.kind.produced


_PY_PRIM = {"Int": int, "Bool": bool, "String": str}


def _check_payload(kind: NodeKind, values) -> tuple:
    if len(values) != len(kind.payloads):
        raise ArityMismatch(
            f"{kind.name}: expected {len(kind.payloads)} payloads, "
            f"got {len(values)}"
        )
    for i, (ty, v) in enumerate(zip(kind.payloads, values)):
        py = _PY_PRIM[ty]
        # bool is a subclass of int; keep Int and Bool slots distinct.
        if ty == "Int" and isinstance(v, bool):
            raise PayloadMismatch(f"{kind.name} payload {i}: expected Int, got Bool")
        if not isinstance(v, py):
            raise PayloadMismatch(
                f"{kind.name} payload {i}: expected {ty}, got {type(v).__name__}"
            )
    return tuple(values)


def mk_term(kind: NodeKind, payloads: Iterable = (), children: Iterable[Term] = ()) -> Term:
    """Construct a well-sorted term, rejecting arity and sort mismatches."""
    if not isinstance(kind, NodeKind):
        raise UnknownKind(f"not a node kind: {kind!r}")
    payloads = _check_payload(kind, tuple(payloads))
    children = tuple(children)
    if len(children) != len(kind.child_sorts):
        raise ArityMismatch(
            f"{kind.name}: expected {len(kind.child_sorts)} children, "
            f"got {len(children)}"
        )
    for i, (want, child) in enumerate(zip(kind.child_sorts, children)):
        if not isinstance(child, Term):
            raise SortMismatch(i, want, None)
        if child.sort != want:
            raise SortMismatch(i, want, child.sort)
    return Term(kind, payloads, children)


def project(term: Term, kind: NodeKind) -> Optional[tuple[tuple, tuple[Term, ...]]]:
    """Return (payloads, children) iff term was built with kind."""
    if term.kind == kind:
        return term.payload_values, term.children
    return None


# ---------------------------------------------------------------------------
# Container kinds.  These are built-in and instantiable at every element
# sort; they belong to every signature.

def nil_kind(elem: Sort) -> NodeKind:
    return NodeKind("NilF", (), (), ListOf(elem))


def cons_kind(elem: Sort) -> NodeKind:
    return NodeKind("ConsF", (), (elem, ListOf(elem)), ListOf(elem))


def pair_kind(first: Sort, second: Sort) -> NodeKind:
    return NodeKind("PairF", (), (first, second), PairOf(first, second))


def just_kind(elem: Sort) -> NodeKind:
    return NodeKind("JustF", (), (elem,), OptionOf(elem))


def nothing_kind(elem: Sort) -> NodeKind:
    return NodeKind("NothingF", (), (), OptionOf(elem))


CONTAINER_KIND_NAMES = frozenset({"NilF", "ConsF", "PairF", "JustF", "NothingF"})


def is_container_kind(kind: NodeKind) -> bool:
    return kind.name in CONTAINER_KIND_NAMES


def build_list(elem_sort: Sort, items: Iterable[Term]) -> Term:
    """Right-nested ConsF chain over items, ending in NilF."""
    items = list(items)
    out = mk_term(nil_kind(elem_sort))
    ck = cons_kind(elem_sort)
    for item in reversed(items):
        out = mk_term(ck, (), (item, out))
    return out


def extract_list(term: Term) -> list[Term]:
    """Flatten a ConsF/NilF spine back into a Python list."""
    if not isinstance(term.sort, ListOf):
        raise NotAListTerm(f"term of sort {sort_name(term.sort)} is not a list")
    out = []
    while True:
        if term.kind.name == "NilF":
            return out
        if term.kind.name == "ConsF":
            out.append(term.children[0])
            term = term.children[1]
            continue
        raise NotAListTerm(f"unexpected kind {term.kind.name} in list spine")


def map_list(f: Callable[[Term], Term], term: Term) -> Term:
    """Apply a sort-preserving function to every element of a list term."""
    if not isinstance(term.sort, ListOf):
        raise NotAListTerm(f"term of sort {sort_name(term.sort)} is not a list")
    return build_list(term.sort.elem, [f(x) for x in extract_list(term)])


def build_pair(first: Term, second: Term) -> Term:
    return mk_term(pair_kind(first.sort, second.sort), (), (first, second))


def build_option(elem_sort: Sort, item: Optional[Term]) -> Term:
    if item is None:
        return mk_term(nothing_kind(elem_sort))
    return mk_term(just_kind(elem_sort), (), (item,))


# ---------------------------------------------------------------------------
# Signatures

@dataclass(frozen=True)
class Signature:
    """A finite set of node kinds naming one language representation.

    Container kinds are implicit members of every signature and are not
    listed.  Sorts referenced by some kind but produced by none are the
    signature's frontier.
    """

    name: str
    kinds: tuple[NodeKind, ...]
    _by_name: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        seen = {}
        for k in self.kinds:
            if k.name in seen:
                raise ValueError(f"duplicate kind name {k.name!r} in {self.name}")
            seen[k.name] = k
        self._by_name.update(seen)

    def kind(self, name: str) -> NodeKind:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownKind(f"{self.name} has no kind {name!r}") from None

    def has_kind(self, name: str) -> bool:
        return name in self._by_name

    def contains(self, kind: NodeKind) -> bool:
        if is_container_kind(kind):
            return True
        return self._by_name.get(kind.name) == kind

    def produced_sorts(self) -> set[Sort]:
        return {k.produced for k in self.kinds}

    def frontier_sorts(self) -> set[Sort]:
        """Atomic sorts referenced as children but produced by no kind."""
        produced = self.produced_sorts()
        out = set()

        def visit(sort: Sort):
            if isinstance(sort, Atom):
                if sort not in produced:
                    out.add(sort)
            elif isinstance(sort, (ListOf, OptionOf)):
                visit(sort.elem)
            elif isinstance(sort, PairOf):
                visit(sort.first)
                visit(sort.second)

        for k in self.kinds:
            for s in k.child_sorts:
                visit(s)
        return out


def check_term(term: Term, signature: Optional[Signature] = None) -> None:
    """Exhaustively re-verify well-sortedness of a whole tree.

    Test support: asserts the construction-time invariant really holds on
    every reachable node, and optionally that all kinds belong to the
    signature.
    """
    stack = [term]
    while stack:
        t = stack.pop()
        if signature is not None and not signature.contains(t.kind):
            raise UnknownKind(f"kind {t.kind.name} not in signature {signature.name}")
        _check_payload(t.kind, t.payload_values)
        if len(t.children) != len(t.kind.child_sorts):
            raise ArityMismatch(t.kind.name)
        for i, (want, child) in enumerate(zip(t.kind.child_sorts, t.children)):
            if child.sort != want:
                raise SortMismatch(i, want, child.sort)
            stack.append(child)


# ---------------------------------------------------------------------------
# Debug serialization

def to_sexpr(term: Term) -> str:
    """Parenthesized dump `(KindName payload* child*)`, strings quoted."""
    parts = [term.kind.name]
    for ty, v in zip(term.kind.payloads, term.payload_values):
        if ty == "String":
            parts.append('"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"')
        elif ty == "Bool":
            parts.append("true" if v else "false")
        else:
            parts.append(str(v))
    for child in term.children:
        parts.append(to_sexpr(child))
    return "(" + " ".join(parts) + ")"


def iter_subterms(term: Term) -> Iterator[Term]:
    """Pre-order iteration over all nodes of a term."""
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        stack.extend(reversed(t.children))
