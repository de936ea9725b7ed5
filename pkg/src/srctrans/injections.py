"""Sort injections: declared embeddings of one sort's terms at another sort.

An injection is realized by a chain of wrapper kinds, innermost first.
Each step names the kind, the child position the embedded term occupies,
and default terms for the wrapper's remaining positions.  Projection
deterministically unwraps the same chain, returning None when shapes do
not match.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .terms import NodeKind, Signature, Sort, Term, mk_term, project, sort_name


class InjectionError(Exception):
    pass


class IllTypedPath(InjectionError):
    pass


class DuplicateInjection(InjectionError):
    pass


class NoInjection(InjectionError):
    pass


class MissingEdge(InjectionError):
    pass


@dataclass(frozen=True)
class Step:
    """One wrapper in an injection chain."""

    kind: NodeKind
    child_index: int
    payloads: tuple = ()
    fill: tuple[tuple[int, Term], ...] = ()  # other child positions

    def filled_children(self, inner: Term) -> tuple[Term, ...]:
        children: list[Optional[Term]] = [None] * len(self.kind.child_sorts)
        children[self.child_index] = inner
        for idx, term in self.fill:
            children[idx] = term
        if any(c is None for c in children):
            raise IllTypedPath(f"{self.kind.name}: unfilled child positions")
        return tuple(children)  # type: ignore[return-value]


@dataclass(frozen=True)
class InjectionDecl:
    from_sort: Sort
    to_sort: Sort
    path: tuple[Step, ...]  # innermost first
    derived: bool = False


def _check_path(decl: InjectionDecl, signature: Optional[Signature]) -> None:
    current = decl.from_sort
    for step in decl.path:
        kind = step.kind
        if signature is not None and not signature.contains(kind):
            raise IllTypedPath(f"kind {kind.name} not in signature")
        if not (0 <= step.child_index < len(kind.child_sorts)):
            raise IllTypedPath(f"{kind.name}: child index {step.child_index} out of range")
        if kind.child_sorts[step.child_index] != current:
            raise IllTypedPath(
                f"{kind.name} child {step.child_index} expects "
                f"{sort_name(kind.child_sorts[step.child_index])}, "
                f"chain carries {sort_name(current)}"
            )
        fill_idx = {i for i, _ in step.fill}
        for i, term in step.fill:
            if i == step.child_index or not (0 <= i < len(kind.child_sorts)):
                raise IllTypedPath(f"{kind.name}: bad fill position {i}")
            if term.sort != kind.child_sorts[i]:
                raise IllTypedPath(
                    f"{kind.name}: fill at {i} has sort {sort_name(term.sort)}"
                )
        expected_fill = set(range(len(kind.child_sorts))) - {step.child_index}
        if fill_idx != expected_fill:
            raise IllTypedPath(f"{kind.name}: fill positions {fill_idx} != {expected_fill}")
        current = kind.produced
    if current != decl.to_sort:
        raise IllTypedPath(
            f"chain produces {sort_name(current)}, declared {sort_name(decl.to_sort)}"
        )


@dataclass
class InjectionTable:
    """Per-language registry of sort injections, immutable once built."""

    signature: Optional[Signature] = None
    _edges: dict[tuple[Sort, Sort], InjectionDecl] = field(default_factory=dict)

    def declare(self, decl: InjectionDecl) -> None:
        key = (decl.from_sort, decl.to_sort)
        existing = self._edges.get(key)
        if existing is not None:
            if decl.derived and not existing.derived:
                return  # declared edges win over derived ones
            if decl.derived and existing.derived and existing.path != decl.path:
                raise DuplicateInjection(
                    f"two distinct derived paths for "
                    f"{sort_name(decl.from_sort)} -> {sort_name(decl.to_sort)}"
                )
            if not decl.derived:
                raise DuplicateInjection(
                    f"{sort_name(decl.from_sort)} -> {sort_name(decl.to_sort)} "
                    "already declared"
                )
            return
        _check_path(decl, self.signature)
        self._edges[key] = decl

    def lookup(self, from_sort: Sort, to_sort: Sort) -> InjectionDecl:
        try:
            return self._edges[(from_sort, to_sort)]
        except KeyError:
            raise NoInjection(
                f"no injection {sort_name(from_sort)} -> {sort_name(to_sort)}"
            ) from None

    def has(self, from_sort: Sort, to_sort: Sort) -> bool:
        return (from_sort, to_sort) in self._edges

    def edges(self) -> list[InjectionDecl]:
        return [self._edges[k] for k in sorted(self._edges, key=_edge_key)]

    def inj(self, term: Term, target: Sort) -> Term:
        """Embed term at the target sort through the registered chain."""
        if term.sort == target and not self.has(term.sort, target):
            return term
        decl = self.lookup(term.sort, target)
        out = term
        for step in decl.path:
            out = mk_term(step.kind, step.payloads, step.filled_children(out))
        return out

    def proj(self, term: Term, source: Sort) -> Optional[Term]:
        """Recover an embedded term of the source sort, or None."""
        decl = self.lookup(source, term.sort)
        out = term
        for step in reversed(decl.path):
            got = project(out, step.kind)
            if got is None:
                return None
            payloads, children = got
            if payloads != step.payloads:
                return None
            for idx, fill_term in step.fill:
                if children[idx] != fill_term:
                    return None
            out = children[step.child_index]
        return out

    def compose(self, a: Sort, b: Sort, c: Sort) -> None:
        """Register the derived edge a -> c from a -> b and b -> c."""
        if not self.has(a, b) or not self.has(b, c):
            raise MissingEdge(
                f"compose needs {sort_name(a)} -> {sort_name(b)} and "
                f"{sort_name(b)} -> {sort_name(c)}"
            )
        first = self.lookup(a, b)
        second = self.lookup(b, c)
        self.declare(InjectionDecl(a, c, first.path + second.path, derived=True))

    def dump(self) -> str:
        lines = []
        for decl in self.edges():
            chain = " -> ".join(f"{s.kind.name}[{s.child_index}]" for s in decl.path)
            tag = " (derived)" if decl.derived else ""
            lines.append(
                f"{sort_name(decl.from_sort)} => {sort_name(decl.to_sort)}: "
                f"{chain}{tag}"
            )
        return "\n".join(lines) + "\n"


def _edge_key(key: tuple[Sort, Sort]) -> tuple[str, str]:
    return sort_name(key[0]), sort_name(key[1])
