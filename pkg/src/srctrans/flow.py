"""Control-flow graphs over genericized terms and flow-directed insertion.

The graph is statement-level: one node per block item, with extra
expression-level nodes only for loop conditions and short-circuit
operands.  Items are addressed by view paths: alternating (item index,
slot) steps through the structural views an adapter exposes, so positions
survive frontends that synthesize blocks around bare statement bodies.
Insertion rebuilds every touched block through the views, which lets a
frontend brace a body exactly when it stops being a single statement.

CFGs are immutable snapshots of one term value; any rewrite invalidates
them and callers must rebuild.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .fragments import BLOCK
from .langs.base import (
    BreakView,
    ContinueView,
    ForNumView,
    ForView,
    IfView,
    LanguageDef,
    NestedBlockView,
    ReturnView,
    UnrepresentableTerm,
    WhileView,
    block_items,
    with_block_items,
)
from .terms import Term
from .traversal import get_at, replace_at

# A block is addressed by a tuple of (item index, slot) pairs descending
# from a body root; slots are "then", "else", "body" and "block".
BlockPath = tuple
NodeId = tuple


class InvalidPath(Exception):
    pass


@dataclass(frozen=True)
class BeforeStmt:
    """Insert immediately before the item at `index` of a block."""

    body: int
    block: BlockPath
    index: int


@dataclass(frozen=True)
class BlockEntry:
    """Insert at the start of a block."""

    body: int
    block: BlockPath


@dataclass(frozen=True)
class BeforeLoopCondition:
    """Insert before every evaluation of the condition of the loop item
    at `index`: before the loop, at body end, and before each continue."""

    body: int
    block: BlockPath
    index: int


InsertionPoint = BeforeStmt | BlockEntry | BeforeLoopCondition

_SHORT_CIRCUIT_OPS = frozenset({"&&", "||", "and", "or"})


# ---------------------------------------------------------------------------
# Graph construction


@dataclass(frozen=True)
class BasicBlock:
    """Maximal straight-line run of statement nodes."""

    id: int
    body: int
    stmts: tuple
    leader: InsertionPoint


class CFG:
    """Immutable control-flow snapshot of one term."""

    def __init__(self, term: Term, bodies, nodes, edges, stmt_order, unreachable):
        self.term = term
        self.bodies = tuple(bodies)
        self.nodes = tuple(nodes)
        self.edges = tuple(edges)
        self.stmt_order = tuple(stmt_order)
        self.unreachable = frozenset(unreachable)
        self.succs: dict[NodeId, tuple] = {n: () for n in self.nodes}
        self.preds: dict[NodeId, tuple] = {n: () for n in self.nodes}
        for a, b in self.edges:
            self.succs[a] += (b,)
            self.preds[b] += (a,)

    def entry(self, body: int) -> NodeId:
        return ("entry", body)

    def exit(self, body: int) -> NodeId:
        return ("exit", body)


class _Ctx:
    """Per-loop targets while walking a body."""

    def __init__(self, cont_target: Optional[NodeId], breaks: Optional[list]):
        self.cont_target = cont_target
        self.breaks = breaks


class _Builder:
    def __init__(self, lang: LanguageDef):
        self.lang = lang
        self.nodes: list[NodeId] = []
        self.edges: list[tuple] = []
        self.stmt_order: list[NodeId] = []

    def add(self, node: NodeId) -> NodeId:
        self.nodes.append(node)
        if node[0] == "stmt":
            self.stmt_order.append(node)
        return node

    def link(self, frontier, node: NodeId) -> None:
        for src in frontier:
            self.edges.append((src, node))

    def body(self, b: int, block: Term) -> None:
        entry = self.add(("entry", b))
        exit_ = self.add(("exit", b))
        frontier = self.walk_block(block, b, (), [entry], _Ctx(None, None), exit_)
        self.link(frontier, exit_)

    def walk_block(self, block, b, bpath, frontier, ctx, exit_):
        for i, item in enumerate(block_items(block)):
            node = self.add(("stmt", b, bpath, i))
            self.link(frontier, node)
            view = self.lang.adapter.item_view(item)
            frontier = self.after_item(view, node, b, bpath, i, ctx, exit_)
        return frontier

    def sc_frontier(self, owner: NodeId, cond: Optional[Term]) -> list:
        """The owner plus one node per short-circuit right operand."""
        frontier = [owner]
        if cond is None:
            return frontier
        k = 0
        stack = [cond]
        while stack:
            t = stack.pop()
            if (
                len(t.children) == 2
                and any(v in _SHORT_CIRCUIT_OPS for v in t.payload_values)
            ):
                node = self.add(("sc", owner, k))
                self.edges.append((frontier[-1], node))
                frontier.append(node)
                k += 1
            stack.extend(reversed(t.children))
        return frontier

    def after_item(self, view, node, b, bpath, i, ctx, exit_):
        if isinstance(view, ReturnView):
            self.edges.append((node, exit_))
            return []
        if isinstance(view, BreakView):
            if ctx.breaks is None:
                raise UnrepresentableTerm("break outside a loop")
            ctx.breaks.append(node)
            return []
        if isinstance(view, ContinueView):
            if ctx.cont_target is None:
                raise UnrepresentableTerm("continue outside a loop")
            self.edges.append((node, ctx.cont_target))
            return []
        if isinstance(view, IfView):
            cf = self.sc_frontier(node, view.cond)
            tf = self.walk_block(
                view.then_block, b, bpath + ((i, "then"),), cf, ctx, exit_
            )
            if view.else_block is None:
                return tf + cf
            ef = self.walk_block(
                view.else_block, b, bpath + ((i, "else"),), cf, ctx, exit_
            )
            return tf + ef
        if isinstance(view, (WhileView, ForView, ForNumView)):
            cond_node = self.add(("cond", b, bpath, i))
            self.edges.append((node, cond_node))
            cond = view.cond if not isinstance(view, ForNumView) else None
            cf = self.sc_frontier(cond_node, cond)
            breaks: list = []
            inner = _Ctx(cond_node, breaks)
            bf = self.walk_block(
                view.body, b, bpath + ((i, "body"),), cf, inner, exit_
            )
            self.link(bf, cond_node)
            falls_out = not (isinstance(view, ForView) and view.cond is None)
            return (cf if falls_out else []) + breaks
        if isinstance(view, NestedBlockView):
            return self.walk_block(
                view.block, b, bpath + ((i, "block"),), [node], ctx, exit_
            )
        return [node]


def body_blocks(term: Term, lang: LanguageDef) -> list[Term]:
    """The generic body Blocks covered by analyses, in source order."""
    if term.kind == BLOCK:
        return [term]
    return [get_at(term, p) for p in lang.adapter.body_paths(term)]


def build_cfg(term: Term, lang: LanguageDef) -> CFG:
    builder = _Builder(lang)
    bodies = body_blocks(term, lang)
    for b, block in enumerate(bodies):
        builder.body(b, block)
    succs: dict[NodeId, list] = {n: [] for n in builder.nodes}
    for a, bb in builder.edges:
        succs[a].append(bb)
    reached = set()
    stack = [("entry", b) for b in range(len(bodies))]
    while stack:
        n = stack.pop()
        if n in reached:
            continue
        reached.add(n)
        stack.extend(succs[n])
    unreachable = [n for n in builder.nodes if n not in reached]
    return CFG(term, bodies, builder.nodes, builder.edges, builder.stmt_order, unreachable)


def basic_blocks(cfg: CFG) -> list[BasicBlock]:
    """Partition statement nodes into maximal straight-line runs.

    Ids are dense, assigned in pre-order of block leaders across bodies;
    an empty body still contributes one (empty) block.
    """
    blocks: list[BasicBlock] = []
    per_body: dict[int, list] = {b: [] for b in range(len(cfg.bodies))}
    for n in cfg.stmt_order:
        per_body[n[1]].append(n)
    for b in range(len(cfg.bodies)):
        stmts = per_body[b]
        if not stmts:
            blocks.append(BasicBlock(len(blocks), b, (), BlockEntry(b, ())))
            continue
        current: list = []
        for n in stmts:
            if current and not _is_leader(cfg, n):
                current.append(n)
                continue
            if current:
                blocks.append(_close(blocks, b, current))
            current = [n]
        blocks.append(_close(blocks, b, current))
    return blocks


def _close(blocks: list, b: int, stmts: list) -> BasicBlock:
    _, _, bpath, index = stmts[0]
    return BasicBlock(len(blocks), b, tuple(stmts), BeforeStmt(b, bpath, index))


def _is_leader(cfg: CFG, node: NodeId) -> bool:
    preds = cfg.preds[node]
    if len(preds) != 1:
        return True
    p = preds[0]
    if p[0] != "stmt":
        return True
    return len(cfg.succs[p]) > 1


def block_graph(cfg: CFG) -> dict[int, tuple]:
    """Successor block ids per block id, contracting non-statement nodes."""
    blocks = basic_blocks(cfg)
    of_stmt = {n: blk.id for blk in blocks for n in blk.stmts}
    out: dict[int, tuple] = {}
    for blk in blocks:
        if not blk.stmts:
            out[blk.id] = ()
            continue
        found: list[int] = []
        seen = set()
        stack = list(cfg.succs[blk.stmts[-1]])
        while stack:
            n = stack.pop(0)
            if n in seen:
                continue
            seen.add(n)
            if n[0] == "stmt":
                if of_stmt[n] not in found:
                    found.append(of_stmt[n])
                continue
            stack.extend(cfg.succs[n])
        out[blk.id] = tuple(found)
    return out


def dump_dot(cfg: CFG) -> str:
    """Deterministic graph text: one node and one edge per line."""
    blocks = basic_blocks(cfg)
    graph = block_graph(cfg)
    lines = ["digraph cfg {"]
    for blk in blocks:
        lines.append(f'  n{blk.id} [label="body{blk.body} stmts={len(blk.stmts)}"]')
    for blk in blocks:
        for succ in graph[blk.id]:
            lines.append(f"  n{blk.id} -> n{succ}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Insertion


def _view_blocks(view) -> list[tuple]:
    if isinstance(view, IfView):
        out = [("then", view.then_block)]
        if view.else_block is not None:
            out.append(("else", view.else_block))
        return out
    if isinstance(view, (WhileView, ForView, ForNumView)):
        return [("body", view.body)]
    if isinstance(view, NestedBlockView):
        return [("block", view.block)]
    return []


def _rebuild_with(view, slot_blocks: dict):
    if isinstance(view, IfView):
        return view.rebuild(
            view.cond,
            slot_blocks.get("then", view.then_block),
            slot_blocks.get("else", view.else_block),
        )
    if isinstance(view, WhileView):
        return view.rebuild(view.cond, slot_blocks["body"])
    if isinstance(view, ForView):
        return view.rebuild(view.init, view.cond, view.step, slot_blocks["body"])
    if isinstance(view, ForNumView):
        return view.rebuild(view.low, view.high, view.step, slot_blocks["body"])
    if isinstance(view, NestedBlockView):
        return view.rebuild(slot_blocks["block"])
    raise InvalidPath("item has no nested blocks")


def _insert_into_body(block: Term, lang: LanguageDef, edits: dict) -> Term:
    """Apply {block path: {index: [items]}} edits under one body root."""

    def go(blk: Term, bpath: BlockPath) -> Term:
        items = block_items(blk)
        new_items = list(items)
        prefix = bpath
        for i, item in enumerate(items):
            view = lang.adapter.item_view(item)
            subs = _view_blocks(view)
            if not subs:
                continue
            replaced = {}
            changed = False
            for slot, sub in subs:
                sub2 = go(sub, prefix + ((i, slot),))
                replaced[slot] = sub2
                changed = changed or sub2 is not sub
            if changed:
                new_items[i] = _rebuild_with(view, replaced)
        here = edits.get(bpath)
        if here is None and new_items == list(items):
            return blk
        if here:
            if any(idx < 0 or idx > len(items) for idx in here):
                raise InvalidPath(f"index out of range in block {bpath}")
            out: list[Term] = []
            for i, item in enumerate(new_items):
                out.extend(here.get(i, ()))
                out.append(item)
            out.extend(here.get(len(new_items), ()))
            new_items = out
        return with_block_items(blk, new_items)

    changed = go(block, ())
    touched = set(edits)

    def known(bpath: BlockPath, blk: Term) -> None:
        touched.discard(bpath)
        for i, item in enumerate(block_items(blk)):
            for slot, sub in _view_blocks(lang.adapter.item_view(item)):
                known(bpath + ((i, slot),), sub)

    if touched:
        known((), block)
        if touched:
            raise InvalidPath(f"no such block: {sorted(touched)[0]}")
    return changed


def _loop_sites(term, lang, point: BeforeLoopCondition, include_preloop: bool):
    """Concrete (body, block path, index) sites for a loop condition."""
    bodies = body_blocks(term, lang)
    try:
        body = bodies[point.body]
    except IndexError:
        raise InvalidPath(f"no body {point.body}") from None
    blk = _resolve_block(body, lang, point.block)
    items = block_items(blk)
    if point.index >= len(items):
        raise InvalidPath(f"no item {point.index} in block {point.block}")
    view = lang.adapter.item_view(items[point.index])
    if not isinstance(view, (WhileView, ForView, ForNumView)):
        raise InvalidPath("BeforeLoopCondition target is not a loop")
    sites = []
    if include_preloop:
        sites.append((point.body, point.block, point.index))
    body_path = point.block + ((point.index, "body"),)
    sites.append((point.body, body_path, len(block_items(view.body))))
    if not isinstance(view, ForNumView):
        sites.extend(
            (point.body, body_path + bp, idx)
            for bp, idx in continue_sites(view.body, lang)
        )
    return sites


def _resolve_block(body: Term, lang: LanguageDef, bpath: BlockPath) -> Term:
    blk = body
    for i, slot in bpath:
        items = block_items(blk)
        if i >= len(items):
            raise InvalidPath(f"no item {i} on the way to {bpath}")
        subs = dict(_view_blocks(lang.adapter.item_view(items[i])))
        if slot not in subs:
            raise InvalidPath(f"item {i} has no {slot!r} block")
        blk = subs[slot]
    return blk


def continue_sites(body: Term, lang: LanguageDef) -> list[tuple]:
    """(block path, index) of each continue targeting the enclosing loop.

    Nested loops capture their own continues and are not descended into.
    """
    out: list[tuple] = []

    def go(blk: Term, bpath: BlockPath) -> None:
        for i, item in enumerate(block_items(blk)):
            view = lang.adapter.item_view(item)
            if isinstance(view, ContinueView):
                out.append((bpath, i))
            elif isinstance(view, IfView):
                go(view.then_block, bpath + ((i, "then"),))
                if view.else_block is not None:
                    go(view.else_block, bpath + ((i, "else"),))
            elif isinstance(view, NestedBlockView):
                go(view.block, bpath + ((i, "block"),))
    go(body, ())
    return out


def insert_many(term: Term, lang: LanguageDef, requests: list) -> Term:
    """Apply many (InsertionPoint, [block items]) insertions in one pass.

    Positions refer to the input term; within one block, items land before
    the original index in request order.
    """
    concrete: list[tuple] = []
    for point, stmts in requests:
        if isinstance(point, BlockEntry):
            concrete.append(((point.body, point.block, 0), stmts))
        elif isinstance(point, BeforeStmt):
            concrete.append(((point.body, point.block, point.index), stmts))
        elif isinstance(point, BeforeLoopCondition):
            for site in _loop_sites(term, lang, point, include_preloop=True):
                concrete.append((site, stmts))
        else:
            raise InvalidPath(f"unknown insertion point {point!r}")
    per_body: dict[int, dict] = {}
    for (b, bpath, idx), stmts in concrete:
        per_body.setdefault(b, {}).setdefault(bpath, {}).setdefault(idx, []).extend(stmts)
    if term.kind == BLOCK:
        if set(per_body) - {0}:
            raise InvalidPath("single-body term has only body 0")
        return _insert_into_body(term, lang, per_body.get(0, {}))
    out = term
    for b, edits in sorted(per_body.items()):
        paths = lang.adapter.body_paths(out)
        try:
            path = paths[b]
        except IndexError:
            raise InvalidPath(f"no body {b}") from None
        out = replace_at(out, path, _insert_into_body(get_at(out, path), lang, edits))
    return out


def insert_at(term: Term, point: InsertionPoint, stmts: list, lang: LanguageDef) -> Term:
    return insert_many(term, lang, [(point, stmts)])
