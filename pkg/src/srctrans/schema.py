"""Mechanical modularization of mutually recursive ADT definitions.

A Schema is a family of named types, each a list of constructors whose
arguments are primitives, other type names, or List/Pair containers over
such.  Modularization produces one fresh sort per type name and one node
kind per constructor, together with bidirectional translations between
neutral constructor-applied values (GenericValue) and sorted terms.

Schemas can also be read from a small line-oriented text format:

    # comment
    type Arith = Add Atom Atom
    type Atom = Var String | Const Lit
    type Lit = Lit Int

Argument types are Int, Bool, String, a type name, [t] for lists, and
(t, t) for pairs.  The first defined type is the root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .terms import (
    Atom,
    ListOf,
    NodeKind,
    PairOf,
    Signature,
    Sort,
    Term,
    build_list,
    build_pair,
    extract_list,
    mk_term,
    sort_name,
)

PRIM_NAMES = ("Int", "Bool", "String")


class SchemaError(Exception):
    pass


class InvalidSchema(SchemaError):
    pass


class NonConformingValue(SchemaError):
    pass


class ForeignKind(SchemaError):
    pass


class DuplicateKind(SchemaError):
    pass


class RemovedKindNotPresent(SchemaError):
    pass


@dataclass(frozen=True)
class Prim:
    name: str  # Int | Bool | String


@dataclass(frozen=True)
class Named:
    name: str


@dataclass(frozen=True)
class ListT:
    elem: "SchemaType"


@dataclass(frozen=True)
class PairT:
    first: "SchemaType"
    second: "SchemaType"


SchemaType = Union[Prim, Named, ListT, PairT]


@dataclass(frozen=True)
class ConstructorDecl:
    name: str
    args: tuple[SchemaType, ...]


@dataclass(frozen=True)
class Schema:
    name: str
    type_defs: tuple[tuple[str, tuple[ConstructorDecl, ...]], ...]
    root_type: str

    def types(self) -> dict[str, tuple[ConstructorDecl, ...]]:
        return dict(self.type_defs)

    def constructor(self, name: str) -> Optional[tuple[str, ConstructorDecl]]:
        for tname, ctors in self.type_defs:
            for c in ctors:
                if c.name == name:
                    return tname, c
        return None


@dataclass(frozen=True)
class GenericValue:
    """A neutral constructor-applied value conforming to some schema.

    Arguments are primitives, nested GenericValues, tuples (for list
    types), or 2-element PairV wrappers (for pair types).
    """

    ctor: str
    args: tuple = ()


@dataclass(frozen=True)
class PairV:
    first: object
    second: object


GV = GenericValue


# ---------------------------------------------------------------------------
# Validation (kinding)

@dataclass
class ValidationReport:
    errors: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def add(self, rule: str, message: str):
        self.errors.append((rule, message))

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(f"{rule}: {msg}" for rule, msg in self.errors)


def validate_schema(schema: Schema) -> ValidationReport:
    """Check every constructor argument kinds to a value type.

    Reports UnknownTypeName for unresolved names, BadArity for misapplied
    containers (encoded structurally: ListT always has one argument and
    PairT two, so BadArity only arises from hand-built malformed types),
    and PrimitiveApplied is precluded structurally.
    """
    report = ValidationReport()
    type_names = {t for t, _ in schema.type_defs}
    seen_types = set()
    for tname, _ in schema.type_defs:
        if tname in seen_types:
            report.add("DuplicateType", f"type {tname} defined twice")
        seen_types.add(tname)
    if tname_dups := (set(PRIM_NAMES) & type_names):
        report.add("PrimitiveShadowed", f"types shadow primitives: {sorted(tname_dups)}")
    if schema.root_type not in type_names:
        report.add("UnknownTypeName", f"root type {schema.root_type} undefined")

    seen_ctors = set()

    def check(ty: SchemaType, where: str):
        if isinstance(ty, Prim):
            if ty.name not in PRIM_NAMES:
                report.add("Prim", f"{where}: unknown primitive {ty.name}")
        elif isinstance(ty, Named):
            if ty.name not in type_names:
                report.add("UnknownTypeName", f"{where}: {ty.name} is not defined")
        elif isinstance(ty, ListT):
            check(ty.elem, where)
        elif isinstance(ty, PairT):
            check(ty.first, where)
            check(ty.second, where)
        else:
            report.add("BadArity", f"{where}: malformed type {ty!r}")

    for tname, ctors in schema.type_defs:
        for ctor in ctors:
            if ctor.name in seen_ctors:
                report.add("DuplicateConstructor", f"{ctor.name} declared twice")
            seen_ctors.add(ctor.name)
            for i, arg in enumerate(ctor.args):
                check(arg, f"{ctor.name} argument {i}")
    return report


# ---------------------------------------------------------------------------
# Modularization

# Built-in leaf kinds used when a primitive occurs inside a container,
# where elements must be terms.  Like the container kinds they belong to
# every signature and are not counted as generated kinds.
PRIM_SORTS = {p: Atom(f"#{p}") for p in PRIM_NAMES}
PRIM_BOX_KINDS = {
    p: NodeKind(f"{p}Box", (p,), (), PRIM_SORTS[p]) for p in PRIM_NAMES
}


@dataclass(frozen=True)
class ModularizedLanguage:
    schema: Schema
    signature: Signature
    sort_of: tuple[tuple[str, Atom], ...]  # type name -> sort
    fragment_of: tuple[tuple[str, tuple[NodeKind, ...]], ...]

    def sort_for(self, type_name: str) -> Atom:
        for n, s in self.sort_of:
            if n == type_name:
                return s
        raise KeyError(type_name)

    @property
    def root_sort(self) -> Atom:
        return self.sort_for(self.schema.root_type)


def _translate_sort(lang_name: str, ty: SchemaType) -> Sort:
    if isinstance(ty, Prim):
        return PRIM_SORTS[ty.name]
    if isinstance(ty, Named):
        return Atom(f"{lang_name}.{ty.name}L")
    if isinstance(ty, ListT):
        return ListOf(_translate_sort(lang_name, ty.elem))
    if isinstance(ty, PairT):
        return PairOf(
            _translate_sort(lang_name, ty.first),
            _translate_sort(lang_name, ty.second),
        )
    raise InvalidSchema(f"malformed type {ty!r}")


def modularize_schema(schema: Schema) -> ModularizedLanguage:
    """One fresh sort per type name, one kind per constructor."""
    report = validate_schema(schema)
    if not report.ok:
        raise InvalidSchema(str(report))
    sort_of = tuple(
        (tname, Atom(f"{schema.name}.{tname}L")) for tname, _ in schema.type_defs
    )
    sorts = dict(sort_of)
    kinds = []
    fragments = []
    for tname, ctors in schema.type_defs:
        frag = []
        for ctor in ctors:
            payloads = []
            child_sorts = []
            for arg in ctor.args:
                # Top-level primitive arguments become payload slots; all
                # other arguments become sorted children.
                if isinstance(arg, Prim):
                    payloads.append(arg.name)
                else:
                    child_sorts.append(_translate_sort(schema.name, arg))
            kind = NodeKind(
                f"{schema.name}.{ctor.name}",
                tuple(payloads),
                tuple(child_sorts),
                sorts[tname],
            )
            kinds.append(kind)
            frag.append(kind)
        fragments.append((tname, tuple(frag)))
    signature = Signature(schema.name, tuple(kinds))
    return ModularizedLanguage(schema, signature, sort_of, tuple(fragments))


def _arg_to_term(lang: ModularizedLanguage, ty: SchemaType, value) -> Term:
    name = lang.schema.name
    if isinstance(ty, Prim):
        # Only reached inside containers; box the primitive as a leaf term.
        if not _prim_matches(ty.name, value):
            raise NonConformingValue(f"expected {ty.name}, got {value!r}")
        return mk_term(PRIM_BOX_KINDS[ty.name], (value,))
    if isinstance(ty, Named):
        if not isinstance(value, GenericValue):
            raise NonConformingValue(f"expected {ty.name} value, got {value!r}")
        return to_modular(lang, value)
    if isinstance(ty, ListT):
        if not isinstance(value, tuple):
            raise NonConformingValue(f"expected tuple for list, got {value!r}")
        elem_sort = _translate_sort(name, ty.elem)
        return build_list(elem_sort, [_arg_to_term(lang, ty.elem, v) for v in value])
    if isinstance(ty, PairT):
        if not isinstance(value, PairV):
            raise NonConformingValue(f"expected PairV, got {value!r}")
        return build_pair(
            _arg_to_term(lang, ty.first, value.first),
            _arg_to_term(lang, ty.second, value.second),
        )
    raise InvalidSchema(f"malformed type {ty!r}")


def _prim_matches(prim: str, value) -> bool:
    if prim == "Int":
        return isinstance(value, int) and not isinstance(value, bool)
    if prim == "Bool":
        return isinstance(value, bool)
    return isinstance(value, str)


def to_modular(lang: ModularizedLanguage, value: GenericValue) -> Term:
    """Encode a schema-conforming value as a sorted term."""
    if not isinstance(value, GenericValue):
        raise NonConformingValue(f"not a constructor value: {value!r}")
    found = lang.schema.constructor(value.ctor)
    if found is None:
        raise NonConformingValue(f"unknown constructor {value.ctor}")
    _, ctor = found
    if len(value.args) != len(ctor.args):
        raise NonConformingValue(
            f"{value.ctor}: expected {len(ctor.args)} arguments, got {len(value.args)}"
        )
    payloads = []
    children = []
    for ty, v in zip(ctor.args, value.args):
        if isinstance(ty, Prim):
            if not _prim_matches(ty.name, v):
                raise NonConformingValue(f"{value.ctor}: expected {ty.name}, got {v!r}")
            payloads.append(v)
        else:
            children.append(_arg_to_term(lang, ty, v))
    return mk_term(lang.signature.kind(f"{lang.schema.name}.{value.ctor}"), payloads, children)


def _arg_from_term(lang: ModularizedLanguage, ty: SchemaType, term: Term):
    if isinstance(ty, Prim):
        if term.kind != PRIM_BOX_KINDS[ty.name]:
            raise ForeignKind(f"expected boxed {ty.name}, got {term.kind.name}")
        return term.payload_values[0]
    if isinstance(ty, Named):
        return from_modular(lang, term)
    if isinstance(ty, ListT):
        return tuple(_arg_from_term(lang, ty.elem, t) for t in extract_list(term))
    if isinstance(ty, PairT):
        return PairV(
            _arg_from_term(lang, ty.first, term.children[0]),
            _arg_from_term(lang, ty.second, term.children[1]),
        )
    raise InvalidSchema(f"malformed type {ty!r}")


def from_modular(lang: ModularizedLanguage, term: Term) -> GenericValue:
    """Decode a term of this language's signature back into a value."""
    prefix = lang.schema.name + "."
    if not term.kind.name.startswith(prefix) or not lang.signature.contains(term.kind):
        raise ForeignKind(f"kind {term.kind.name} is not part of {lang.schema.name}")
    ctor_name = term.kind.name[len(prefix):]
    _, ctor = lang.schema.constructor(ctor_name)
    payloads = list(term.payload_values)
    children = list(term.children)
    args = []
    for ty in ctor.args:
        if isinstance(ty, Prim):
            args.append(payloads.pop(0))
        else:
            args.append(_arg_from_term(lang, ty, children.pop(0)))
    return GenericValue(ctor_name, tuple(args))


# ---------------------------------------------------------------------------
# Signature summing

def sum_signatures(
    name: str,
    parts: list[Signature],
    minus: list[str] = (),
    plus: list[NodeKind] = (),
) -> Signature:
    """Union of the parts' kinds, with `minus` removed and `plus` added."""
    kinds: dict[str, NodeKind] = {}
    for part in parts:
        for k in part.kinds:
            if k.name in kinds and kinds[k.name] != k:
                raise DuplicateKind(f"conflicting kind {k.name} while summing {name}")
            kinds[k.name] = k
    for removed in minus:
        if removed not in kinds:
            raise RemovedKindNotPresent(f"{removed} not present in sum {name}")
        del kinds[removed]
    for k in plus:
        if k.name in kinds:
            raise DuplicateKind(f"kind {k.name} already present in sum {name}")
        kinds[k.name] = k
    return Signature(name, tuple(kinds.values()))


# ---------------------------------------------------------------------------
# Text format

def parse_schema_text(text: str, name: str = "Schema") -> Schema:
    """Parse the line-oriented `type X = Ctor arg* | ...` format."""
    # Strip comments, join continuation of a definition on one line each.
    defs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.startswith("type "):
            raise InvalidSchema(f"line {lineno}: expected 'type', got {line!r}")
        body = line[len("type "):]
        if "=" not in body:
            raise InvalidSchema(f"line {lineno}: missing '='")
        tname, rhs = body.split("=", 1)
        tname = tname.strip()
        if not tname.isidentifier():
            raise InvalidSchema(f"line {lineno}: bad type name {tname!r}")
        ctors = []
        for alt in rhs.split("|"):
            toks = _tokenize_type(alt)
            if not toks:
                raise InvalidSchema(f"line {lineno}: empty constructor alternative")
            cname = toks[0]
            if not cname.isidentifier():
                raise InvalidSchema(f"line {lineno}: bad constructor name {cname!r}")
            args, rest = _parse_args(toks[1:], lineno)
            if rest:
                raise InvalidSchema(f"line {lineno}: trailing tokens {rest!r}")
            ctors.append(ConstructorDecl(cname, tuple(args)))
        defs.append((tname, tuple(ctors)))
    if not defs:
        raise InvalidSchema("no type definitions")
    return Schema(name, tuple(defs), defs[0][0])


def _tokenize_type(text: str) -> list[str]:
    toks = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "[](),":
            toks.append(c)
            i += 1
        else:
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            if j == i:
                raise InvalidSchema(f"bad character {c!r} in type")
            toks.append(text[i:j])
            i = j
    return toks


def _parse_args(toks: list[str], lineno: int) -> tuple[list[SchemaType], list[str]]:
    args = []
    while toks:
        ty, toks = _parse_one_type(toks, lineno)
        args.append(ty)
    return args, toks


def _parse_one_type(toks: list[str], lineno: int) -> tuple[SchemaType, list[str]]:
    if not toks:
        raise InvalidSchema(f"line {lineno}: expected a type")
    head, rest = toks[0], toks[1:]
    if head == "[":
        ty, rest = _parse_one_type(rest, lineno)
        if not rest or rest[0] != "]":
            raise InvalidSchema(f"line {lineno}: missing ']'")
        return ListT(ty), rest[1:]
    if head == "(":
        first, rest = _parse_one_type(rest, lineno)
        if not rest or rest[0] != ",":
            raise InvalidSchema(f"line {lineno}: missing ',' in pair type")
        second, rest = _parse_one_type(rest[1:], lineno)
        if not rest or rest[0] != ")":
            raise InvalidSchema(f"line {lineno}: missing ')'")
        return PairT(first, second), rest[1:]
    if head in PRIM_NAMES:
        return Prim(head), rest
    if head.isidentifier():
        return Named(head), rest
    raise InvalidSchema(f"line {lineno}: unexpected token {head!r}")


def _fmt_type(ty: SchemaType) -> str:
    if isinstance(ty, Prim):
        return ty.name
    if isinstance(ty, Named):
        return ty.name
    if isinstance(ty, ListT):
        return f"[{_fmt_type(ty.elem)}]"
    if isinstance(ty, PairT):
        return f"({_fmt_type(ty.first)},{_fmt_type(ty.second)})"
    raise InvalidSchema(f"malformed type {ty!r}")


def dump_modularized(lang: ModularizedLanguage) -> str:
    """Deterministic textual dump of the generated sorts and kinds."""
    lines = [f"language {lang.schema.name}", f"root {sort_name(lang.root_sort)}"]
    for tname, sort in lang.sort_of:
        lines.append(f"sort {sort_name(sort)}")
    for tname, frag in lang.fragment_of:
        for kind in frag:
            args = [p for p in kind.payloads] + [sort_name(s) for s in kind.child_sorts]
            sig = " ".join(args) if args else "()"
            lines.append(f"kind {kind.name} : {sig} -> {sort_name(kind.produced)}")
    return "\n".join(lines) + "\n"
