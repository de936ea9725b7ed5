"""Declaration hoisting: move declarations to the top of each block.

Initializers are stripped and replaced in place by plain assignments, so
the result resembles C89-style code.  The elementary variant rearranges
every block unconditionally; the full variant additionally skips any
declaration whose hoisting would change which binding some identifier
occurrence resolves to, and so also handles parallel Lua declarations.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..fragments import (
    ASSIGN,
    ASSIGN_L,
    BLOCK,
    BLOCK_ITEM_L,
    IDENT,
    JUST_INIT,
    MULTI_DECL,
    MULTI_DECL_L,
    NO_INIT,
    SINGLE_DECL_L,
    assign,
    binder_names,
)
from ..langs.base import LanguageDef, block_items, with_block_items
from ..terms import Term, build_list, extract_list, mk_term
from ..traversal import query_collect, transform_bottom_up


class RequirementMissing(Exception):
    """The language lacks something a pass needs; names the gap."""


@dataclass(frozen=True)
class PassRequirements:
    """What a pass demands of a language before it will run."""

    kinds: tuple = ()
    injections: tuple = ()  # (from sort, to sort) pairs
    ops: tuple = ()  # LanguageOps attribute names

    def check(self, lang: LanguageDef, pass_name: str) -> None:
        for kind in self.kinds:
            if not lang.ips.contains(kind):
                raise RequirementMissing(
                    f"{pass_name} on {lang.name}: signature lacks kind {kind.name}"
                )
        for frm, to in self.injections:
            if not lang.injections.has(frm, to):
                raise RequirementMissing(
                    f"{pass_name} on {lang.name}: no injection "
                    f"{frm.name} -> {to.name}"
                )
        for op in self.ops:
            if getattr(lang.ops, op, None) is None:
                raise RequirementMissing(
                    f"{pass_name} on {lang.name}: LanguageOps lacks {op}"
                )


CAN_HOIST = PassRequirements(
    kinds=(MULTI_DECL, ASSIGN, BLOCK, IDENT),
    injections=((ASSIGN_L, BLOCK_ITEM_L), (MULTI_DECL_L, BLOCK_ITEM_L)),
    ops=("var_init_to_rhs", "var_decl_binder_to_lhs"),
)


def _as_decl(item: Term, lang: LanguageDef):
    """The MultiLocalVarDecl under a block item, or None."""
    return lang.injections.proj(item, MULTI_DECL_L)


def _remove_init(single: Term) -> Term:
    attrs, binder, _ = single.children
    return mk_term(single.kind, (), (attrs, binder, mk_term(NO_INIT)))


def _decl_to_assigns(decl: Term, lang: LanguageDef) -> list[Term]:
    """One assignment per initialized declarator, in declarator order."""
    mattrs, singles = decl.children
    out = []
    for single in extract_list(singles):
        lattrs, binder, opt = single.children
        if opt.kind != JUST_INIT:
            continue
        lhs = lang.ops.var_decl_binder_to_lhs(binder)
        rhs = lang.ops.var_init_to_rhs(mattrs, lattrs, opt.children[0])
        out.append(lang.injections.inj(assign(lhs, rhs), BLOCK_ITEM_L))
    return out


def _split_decl(item: Term, lang: LanguageDef) -> tuple[list[Term], list[Term]]:
    decl = _as_decl(item, lang)
    if decl is None:
        return [], [item]
    mattrs, singles = decl.children
    stripped = build_list(
        SINGLE_DECL_L, [_remove_init(s) for s in extract_list(singles)]
    )
    hoisted = lang.injections.inj(
        mk_term(MULTI_DECL, (), (mattrs, stripped)), BLOCK_ITEM_L
    )
    return [hoisted], _decl_to_assigns(decl, lang)


def _hoist_block_items(items: list[Term], lang: LanguageDef) -> list[Term]:
    split = [_split_decl(item, lang) for item in items]
    return [d for ds, _ in split for d in ds] + [s for _, ss in split for s in ss]


def elementary_hoist(term: Term, lang: LanguageDef) -> Term:
    """Rearrange every block, ignoring name capture."""
    CAN_HOIST.check(lang, "elementary_hoist")

    def rw(t: Term):
        if t.kind != BLOCK:
            return None
        return with_block_items(t, _hoist_block_items(block_items(t), lang))

    return transform_bottom_up(rw, term)


# ---------------------------------------------------------------------------
# Full hoist: skip shadow-sensitive declarations.


def _ident_names(term: Term) -> set[str]:
    return set(
        query_collect(
            lambda t: [t.payload_values[0]] if t.kind == IDENT else [], term
        )
    )


def shadow_unsafe(items: list[Term], index: int, lang: LanguageDef) -> bool:
    """Would hoisting the declaration at `index` to the block top change
    what some identifier occurrence resolves to?

    True when a bound name already occurs anywhere in an earlier item of
    the block (that occurrence currently resolves outside and would be
    captured), or in the declaration's own initializer for languages whose
    binder is not in scope there.
    """
    decl = _as_decl(items[index], lang)
    if decl is None:
        raise ValueError("item is not a declaration")
    bound = set()
    for single in extract_list(decl.children[1]):
        bound.update(binder_names(single.children[1]))
    for earlier in items[:index]:
        if bound & _ident_names(earlier):
            return True
    if not lang.ops.binder_in_scope_in_init:
        for single in extract_list(decl.children[1]):
            opt = single.children[2]
            if opt.kind == JUST_INIT and bound & _ident_names(opt.children[0]):
                return True
    return False


def hoist(term: Term, lang: LanguageDef) -> Term:
    """As elementary_hoist, but leave shadow-sensitive declarations alone."""
    CAN_HOIST.check(lang, "hoist")

    def rw(t: Term):
        if t.kind != BLOCK:
            return None
        items = block_items(t)
        decls: list[Term] = []
        rest: list[Term] = []
        for i, item in enumerate(items):
            if _as_decl(item, lang) is None:
                rest.append(item)
                continue
            if shadow_unsafe(items, i, lang):
                rest.append(item)
                continue
            ds, ss = _split_decl(item, lang)
            decls.extend(ds)
            rest.extend(ss)
        return with_block_items(t, decls + rest)

    return transform_bottom_up(rw, term)


def postcondition_violations(term: Term, lang: LanguageDef) -> list[str]:
    """Scan a hoisted output for blocks violating the hoist contract.

    A declaration may follow a non-declaration or keep its initializer
    only if it is shadow-unsafe at its output position (the full hoist
    deliberately leaves those in place).
    """
    problems: list[str] = []

    def q(t: Term) -> list:
        if t.kind != BLOCK:
            return []
        items = block_items(t)
        seen_stmt = False
        out = []
        for i, item in enumerate(items):
            decl = _as_decl(item, lang)
            if decl is None:
                seen_stmt = True
                continue
            unsafe = shadow_unsafe(items, i, lang)
            if seen_stmt and not unsafe:
                out.append(f"hoistable declaration after statement at item {i}")
            has_init = any(
                s.children[2].kind == JUST_INIT
                for s in extract_list(decl.children[1])
            )
            if has_init and not unsafe:
                out.append(f"hoistable declaration keeps initializer at item {i}")
        return out

    problems.extend(query_collect(q, term))
    return problems
