"""MiniJS: a dynamically typed JavaScript subset frontend.

Functions, `var` declarations with multiple declarators, directive
prologues (the only place string literals may appear), array literals,
member access, assignment as an expression, and value-returning
short-circuit `&&`/`||`.  Statement bodies always require braces.
Assignment to an undeclared name creates a global; reading one traps.
"""

from __future__ import annotations

from typing import Callable, Optional

from ..fragments import (
    ASSIGN_L,
    BINDER_L,
    BLOCK_ITEM_L,
    BLOCK_L,
    EMPTY_COMMON_ATTRS,
    EMPTY_DECL_ATTRS,
    IDENT_IS_BINDER,
    IDENT_L,
    JUST_INIT,
    LHS_L,
    LOCAL_VAR_INIT_L,
    MULTI_DECL,
    MULTI_DECL_IS_ITEM,
    MULTI_DECL_L,
    NO_INIT,
    RHS_L,
    SINGLE_DECL_L,
    assign,
    binder_names,
    generic_signature,
    ident,
)
from ..injections import InjectionDecl, InjectionTable, Step
from ..runtime import (
    BreakEx,
    ContinueEx,
    ReturnEx,
    RunResult,
    Trap,
    external_value,
    trunc_div,
    trunc_mod,
)
from ..schema import (
    GV,
    GenericValue,
    modularize_schema,
    parse_schema_text,
    sum_signatures,
)
from ..terms import ListOf, NodeKind, Term, build_list, extract_list, mk_term
from ..traversal import Path
from .base import (
    BreakView,
    ContinueView,
    ExprStmtView,
    ForView,
    IfView,
    ItemView,
    LanguageDef,
    NestedBlockView,
    PlainView,
    ReturnView,
    UnrepresentableTerm,
    WhileView,
    block_items,
    generic_block,
    make_translator,
    register,
)
from .common import PrettyPrinter, TokenStream, tokenize

SCHEMA_TEXT = """
type Program = Program [FuncDef]
type FuncDef = FuncDef Ident [Ident] Block
type Ident = Ident String
type Block = Block [Directive] Stmts
type Directive = Directive String
type Stmts = Stmts [Stmt]
type Stmt = ExprStmt Expr | VarStmt [VarDtor] | IfStmt Expr Block OptElse | WhileStmt Expr Block | ForStmt OptExpr OptExpr OptExpr Block | ReturnStmt OptExpr | BreakStmt | ContinueStmt | BlockStmt Block
type OptElse = SomeElse Block | NoElse
type VarDtor = VarDtor Ident OptInit
type OptInit = SomeInit Expr | NoInit
type OptExpr = SomeExpr Expr | NoExpr
type Expr = NumLit Int | BoolLit Bool | UndefLit | VarE Ident | IndexE Expr Expr | MemberE Expr String | CallE Ident [Expr] | ArrayE [Expr] | UnaryE String Expr | BinE String Expr Expr | AssignE Expr Expr
"""

SCHEMA = parse_schema_text(SCHEMA_TEXT, name="MiniJS")
MOD = modularize_schema(SCHEMA)
S = MOD.sort_for


def _mk(ctor: str):
    kind = MOD.signature.kind(f"MiniJS.{ctor}")

    def build(*args):
        payloads = args[: len(kind.payloads)]
        children = args[len(kind.payloads):]
        return mk_term(kind, payloads, children)

    return build


# ---------------------------------------------------------------------------
# Parsing

_OPS = [
    "<=", ">=", "==", "!=", "&&", "||",
    "+", "-", "*", "/", "%", "<", ">", "=", "!",
    "(", ")", "{", "}", "[", "]", ",", ";", ".",
]
_KEYWORDS = frozenset(
    {"function", "var", "if", "else", "while", "for", "return",
     "break", "continue", "true", "false", "undefined"}
)
_BIN_TIERS = [["||"], ["&&"], ["==", "!="], ["<", "<=", ">", ">="],
              ["+", "-"], ["*", "/", "%"]]


def parse(text: str) -> GenericValue:
    ts = TokenStream(
        tokenize(text, _OPS, line_comment="//", strings=True), _KEYWORDS
    )
    funcs = []
    while ts.peek().kind != "eof":
        funcs.append(_parse_func(ts))
    ts.expect_eof()
    return GV("Program", (tuple(funcs),))


def _parse_func(ts: TokenStream) -> GenericValue:
    ts.expect_kw("function")
    name = ts.expect_name()
    ts.expect_op("(")
    params = []
    if not ts.at_op(")"):
        while True:
            params.append(GV("Ident", (ts.expect_name(),)))
            if not ts.accept_op(","):
                break
    ts.expect_op(")")
    return GV("FuncDef", (GV("Ident", (name,)), tuple(params), _parse_block(ts)))


def _parse_block(ts: TokenStream) -> GenericValue:
    ts.expect_op("{")
    directives = []
    while ts.peek().kind == "string":
        directives.append(GV("Directive", (ts.next().value,)))
        ts.expect_op(";")
    stmts = []
    while not ts.at_op("}"):
        stmts.append(_parse_stmt(ts))
    ts.expect_op("}")
    return GV("Block", (tuple(directives), GV("Stmts", (tuple(stmts),))))


def _parse_stmt(ts: TokenStream) -> GenericValue:
    if ts.accept_kw("var"):
        dtors = []
        while True:
            name = ts.expect_name()
            if ts.accept_op("="):
                opt = GV("SomeInit", (_parse_expr(ts),))
            else:
                opt = GV("NoInit")
            dtors.append(GV("VarDtor", (GV("Ident", (name,)), opt)))
            if not ts.accept_op(","):
                break
        ts.expect_op(";")
        return GV("VarStmt", (tuple(dtors),))
    if ts.accept_kw("if"):
        ts.expect_op("(")
        cond = _parse_expr(ts)
        ts.expect_op(")")
        then = _parse_block(ts)
        els = GV("SomeElse", (_parse_block(ts),)) if ts.accept_kw("else") else GV("NoElse")
        return GV("IfStmt", (cond, then, els))
    if ts.accept_kw("while"):
        ts.expect_op("(")
        cond = _parse_expr(ts)
        ts.expect_op(")")
        return GV("WhileStmt", (cond, _parse_block(ts)))
    if ts.accept_kw("for"):
        ts.expect_op("(")
        if ts.at_kw("var"):
            raise ts.error("declarations are not allowed in a for header")
        init = _parse_opt_expr(ts, ";")
        ts.expect_op(";")
        cond = _parse_opt_expr(ts, ";")
        ts.expect_op(";")
        step = _parse_opt_expr(ts, ")")
        ts.expect_op(")")
        return GV("ForStmt", (init, cond, step, _parse_block(ts)))
    if ts.accept_kw("return"):
        opt = _parse_opt_expr(ts, ";")
        ts.expect_op(";")
        return GV("ReturnStmt", (opt,))
    if ts.accept_kw("break"):
        ts.expect_op(";")
        return GV("BreakStmt")
    if ts.accept_kw("continue"):
        ts.expect_op(";")
        return GV("ContinueStmt")
    if ts.at_op("{"):
        return GV("BlockStmt", (_parse_block(ts),))
    expr = _parse_expr(ts)
    ts.expect_op(";")
    return GV("ExprStmt", (expr,))


def _parse_opt_expr(ts: TokenStream, closer: str) -> GenericValue:
    if ts.at_op(closer):
        return GV("NoExpr")
    return GV("SomeExpr", (_parse_expr(ts),))


def _parse_expr(ts: TokenStream) -> GenericValue:
    lhs = _parse_binary(ts, 0)
    if ts.at_op("="):
        if lhs.ctor not in ("VarE", "IndexE", "MemberE"):
            raise ts.error("assignment target must be a variable, index or member")
        ts.next()
        return GV("AssignE", (lhs, _parse_expr(ts)))
    return lhs


def _parse_binary(ts: TokenStream, tier: int) -> GenericValue:
    if tier >= len(_BIN_TIERS):
        return _parse_unary(ts)
    lhs = _parse_binary(ts, tier + 1)
    while ts.peek().kind == "op" and ts.peek().value in _BIN_TIERS[tier]:
        op = ts.next().value
        lhs = GV("BinE", (op, lhs, _parse_binary(ts, tier + 1)))
    return lhs


def _parse_unary(ts: TokenStream) -> GenericValue:
    if ts.at_op("!") or ts.at_op("-"):
        op = ts.next().value
        return GV("UnaryE", (op, _parse_unary(ts)))
    return _parse_postfix(ts)


def _parse_postfix(ts: TokenStream) -> GenericValue:
    expr = _parse_primary(ts)
    while True:
        if ts.at_op("["):
            ts.next()
            idx = _parse_expr(ts)
            ts.expect_op("]")
            expr = GV("IndexE", (expr, idx))
        elif ts.at_op("."):
            ts.next()
            expr = GV("MemberE", (expr, ts.expect_name()))
        else:
            return expr


def _parse_primary(ts: TokenStream) -> GenericValue:
    tok = ts.peek()
    if tok.kind == "num":
        ts.next()
        return GV("NumLit", (int(tok.value),))
    if ts.accept_kw("true"):
        return GV("BoolLit", (True,))
    if ts.accept_kw("false"):
        return GV("BoolLit", (False,))
    if ts.accept_kw("undefined"):
        return GV("UndefLit")
    if tok.kind == "name":
        name = ts.expect_name()
        if ts.accept_op("("):
            args = []
            if not ts.at_op(")"):
                while True:
                    args.append(_parse_expr(ts))
                    if not ts.accept_op(","):
                        break
            ts.expect_op(")")
            return GV("CallE", (GV("Ident", (name,)), tuple(args)))
        return GV("VarE", (GV("Ident", (name,)),))
    if ts.accept_op("("):
        expr = _parse_expr(ts)
        ts.expect_op(")")
        return expr
    if ts.accept_op("["):
        elems = []
        if not ts.at_op("]"):
            while True:
                elems.append(_parse_expr(ts))
                if not ts.accept_op(","):
                    break
        ts.expect_op("]")
        return GV("ArrayE", (tuple(elems),))
    raise ts.error(f"expected an expression, got {tok.value!r}")


# ---------------------------------------------------------------------------
# Pretty-printing

_PREC = {"=": 1, "||": 2, "&&": 3, "==": 4, "!=": 4, "<": 5, "<=": 5,
         ">": 5, ">=": 5, "+": 6, "-": 6, "*": 7, "/": 7, "%": 7}


def _expr_str(e: GenericValue, ctx: int = 0) -> str:
    c = e.ctor
    if c == "NumLit":
        return str(e.args[0])
    if c == "BoolLit":
        return "true" if e.args[0] else "false"
    if c == "UndefLit":
        return "undefined"
    if c == "VarE":
        return e.args[0].args[0]
    if c == "IndexE":
        return f"{_expr_str(e.args[0], 9)}[{_expr_str(e.args[1])}]"
    if c == "MemberE":
        return f"{_expr_str(e.args[0], 9)}.{e.args[1]}"
    if c == "CallE":
        args = ", ".join(_expr_str(a) for a in e.args[1])
        return f"{e.args[0].args[0]}({args})"
    if c == "ArrayE":
        return "[" + ", ".join(_expr_str(a) for a in e.args[0]) + "]"
    if c == "UnaryE":
        out = f"{e.args[0]}{_expr_str(e.args[1], 8)}"
        return f"({out})" if ctx > 8 else out
    if c == "BinE":
        op = e.args[0]
        prec = _PREC[op]
        out = f"{_expr_str(e.args[1], prec)} {op} {_expr_str(e.args[2], prec + 1)}"
        return f"({out})" if ctx > prec else out
    if c == "AssignE":
        out = f"{_expr_str(e.args[0], 9)} = {_expr_str(e.args[1], 1)}"
        return f"({out})" if ctx > 1 else out
    raise ValueError(f"not a MiniJS expression: {c}")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _print_block(pp: PrettyPrinter, block: GenericValue, opener: str,
                 closer: str = "}") -> None:
    pp.line(opener)
    pp.push()
    for d in block.args[0]:
        pp.line(_quote(d.args[0]) + ";")
    for s in block.args[1].args[0]:
        _print_stmt(pp, s)
    pp.pop()
    pp.line(closer)


def _print_stmt(pp: PrettyPrinter, s: GenericValue) -> None:
    c = s.ctor
    if c == "ExprStmt":
        pp.line(_expr_str(s.args[0]) + ";")
    elif c == "VarStmt":
        parts = []
        for dtor in s.args[0]:
            name = dtor.args[0].args[0]
            opt = dtor.args[1]
            if opt.ctor == "SomeInit":
                parts.append(f"{name} = {_expr_str(opt.args[0], 1)}")
            else:
                parts.append(name)
        pp.line(f"var {', '.join(parts)};")
    elif c == "IfStmt":
        cond, then, els = s.args
        if els.ctor == "SomeElse":
            _print_block(pp, then, f"if ({_expr_str(cond)}) {{", "} else {")
            # reuse the block printer body for the else arm
            pp.push()
            for d in els.args[0].args[0]:
                pp.line(_quote(d.args[0]) + ";")
            for st in els.args[0].args[1].args[0]:
                _print_stmt(pp, st)
            pp.pop()
            pp.line("}")
        else:
            _print_block(pp, then, f"if ({_expr_str(cond)}) {{")
    elif c == "WhileStmt":
        _print_block(pp, s.args[1], f"while ({_expr_str(s.args[0])}) {{")
    elif c == "ForStmt":
        init, cond, step, body = s.args
        clauses = "; ".join(
            _expr_str(o.args[0]) if o.ctor == "SomeExpr" else ""
            for o in (init, cond, step)
        )
        _print_block(pp, body, f"for ({clauses}) {{")
    elif c == "ReturnStmt":
        opt = s.args[0]
        if opt.ctor == "SomeExpr":
            pp.line(f"return {_expr_str(opt.args[0])};")
        else:
            pp.line("return;")
    elif c == "BreakStmt":
        pp.line("break;")
    elif c == "ContinueStmt":
        pp.line("continue;")
    elif c == "BlockStmt":
        _print_block(pp, s.args[0], "{")
    else:
        raise ValueError(f"not a MiniJS statement: {c}")


def pretty(ast: GenericValue) -> str:
    pp = PrettyPrinter()
    for i, func in enumerate(ast.args[0]):
        if i:
            pp.line("")
        name, params, block = func.args
        plist = ", ".join(p.args[0] for p in params)
        _print_block(pp, block, f"function {name.args[0]}({plist}) {{")
    return pp.render()


# ---------------------------------------------------------------------------
# Genericized signature and injections

IDENT_IS_MINIJS = NodeKind("IdentIsMiniJSIdent", (), (IDENT_L,), S("Ident"))
ASSIGN_IS_EXPR = NodeKind("AssignIsMiniJSExpr", (), (ASSIGN_L,), S("Expr"))
EXPR_IS_LHS = NodeKind("MiniJSExprIsLhs", (), (S("Expr"),), LHS_L)
EXPR_IS_RHS = NodeKind("MiniJSExprIsRhs", (), (S("Expr"),), RHS_L)
EXPR_IS_INIT = NodeKind("MiniJSExprIsLocalVarInit", (), (S("Expr"),), LOCAL_VAR_INIT_L)
STMT_IS_ITEM = NodeKind("MiniJSStmtIsBlockItem", (), (S("Stmt"),), BLOCK_ITEM_L)
BLOCK_IS_STMTS = NodeKind("GenericBlockIsMiniJSStmts", (), (BLOCK_L,), S("Stmts"))

_REMOVED = [
    "MiniJS.Ident", "MiniJS.Stmts", "MiniJS.VarStmt", "MiniJS.VarDtor",
    "MiniJS.SomeInit", "MiniJS.NoInit", "MiniJS.AssignE",
]
_INJECTION_KINDS = [
    IDENT_IS_MINIJS, ASSIGN_IS_EXPR, EXPR_IS_LHS, EXPR_IS_RHS,
    EXPR_IS_INIT, STMT_IS_ITEM, BLOCK_IS_STMTS,
    IDENT_IS_BINDER, MULTI_DECL_IS_ITEM,
]

IPS = sum_signatures(
    "MiniJS+Generic",
    [MOD.signature, generic_signature()],
    minus=_REMOVED,
    plus=_INJECTION_KINDS,
)

TABLE = InjectionTable(IPS)
for _frm, _to, _kind in [
    (IDENT_L, S("Ident"), IDENT_IS_MINIJS),
    (ASSIGN_L, S("Expr"), ASSIGN_IS_EXPR),
    (S("Expr"), LHS_L, EXPR_IS_LHS),
    (S("Expr"), RHS_L, EXPR_IS_RHS),
    (S("Expr"), LOCAL_VAR_INIT_L, EXPR_IS_INIT),
    (IDENT_L, BINDER_L, IDENT_IS_BINDER),
    (S("Stmt"), BLOCK_ITEM_L, STMT_IS_ITEM),
    (BLOCK_L, S("Stmts"), BLOCK_IS_STMTS),
    (MULTI_DECL_L, BLOCK_ITEM_L, MULTI_DECL_IS_ITEM),
    (S("Expr"), S("Stmt"), IPS.kind("MiniJS.ExprStmt")),
]:
    TABLE.declare(InjectionDecl(_frm, _to, (Step(_kind, 0),)))
TABLE.compose(ASSIGN_L, S("Expr"), S("Stmt"))
TABLE.compose(ASSIGN_L, S("Stmt"), BLOCK_ITEM_L)


def _wrap(kind: NodeKind, inner: Term) -> Term:
    return mk_term(kind, (), (inner,))


def _ident_term(name: str) -> Term:
    return _wrap(IDENT_IS_MINIJS, ident(name))


def _tr_ident(t: Term, tr) -> Term:
    return _ident_term(t.payload_values[0])


def _tr_assign(t: Term, tr) -> Term:
    lhs, rhs = t.children
    return _wrap(
        ASSIGN_IS_EXPR,
        assign(_wrap(EXPR_IS_LHS, tr(lhs)), _wrap(EXPR_IS_RHS, tr(rhs))),
    )


def _tr_var_stmt(t: Term, tr) -> Term:
    singles = []
    for dtor in extract_list(t.children[0]):
        name = dtor.children[0].payload_values[0]
        opt = dtor.children[1]
        if opt.kind.name == "MiniJS.SomeInit":
            opt_g = mk_term(JUST_INIT, (), (_wrap(EXPR_IS_INIT, tr(opt.children[0])),))
        else:
            opt_g = mk_term(NO_INIT)
        singles.append(
            mk_term(
                IPS.kind("SingleLocalVarDecl"),
                (),
                (mk_term(EMPTY_DECL_ATTRS), _wrap(IDENT_IS_BINDER, ident(name)), opt_g),
            )
        )
    return mk_term(
        MULTI_DECL, (), (mk_term(EMPTY_COMMON_ATTRS), build_list(SINGLE_DECL_L, singles))
    )


def _tr_stmts(t: Term, tr) -> Term:
    items = []
    for stmt in extract_list(t.children[0]):
        if stmt.kind.name == "MiniJS.VarStmt":
            items.append(_wrap(MULTI_DECL_IS_ITEM, _tr_var_stmt(stmt, tr)))
        else:
            items.append(_wrap(STMT_IS_ITEM, tr(stmt)))
    return _wrap(BLOCK_IS_STMTS, generic_block(items))


trans_ips = make_translator(
    {
        "MiniJS.Ident": _tr_ident,
        "MiniJS.AssignE": _tr_assign,
        "MiniJS.Stmts": _tr_stmts,
    }
)


def _expect(cond: bool, what: str) -> None:
    if not cond:
        raise UnrepresentableTerm(what)


def _un_ident(t: Term, tr) -> Term:
    inner = t.children[0]
    _expect(inner.kind.name == "Ident", "expected a generic identifier")
    return _mk("Ident")(inner.payload_values[0])


def _un_assign(t: Term, tr) -> Term:
    inner = t.children[0]
    _expect(inner.kind.name == "Assign", "expected a generic assignment")
    lhs_w, op, rhs_w = inner.children
    _expect(op.kind.name == "AssignOpEquals", "unsupported assignment operator")
    _expect(lhs_w.kind == EXPR_IS_LHS, "assignment target is not a MiniJS expression")
    _expect(rhs_w.kind == EXPR_IS_RHS, "assignment source is not a MiniJS expression")
    return _mk("AssignE")(tr(lhs_w.children[0]), tr(rhs_w.children[0]))


def _un_decl(t: Term, tr) -> Term:
    _expect(t.kind.name == "MultiLocalVarDecl", "expected a generic declaration")
    attrs, singles = t.children
    _expect(attrs.kind.name == "EmptyCommonAttrs", "MiniJS declarations carry no attributes")
    dtors = []
    for single in extract_list(singles):
        _, binder, opt = single.children
        _expect(binder.kind == IDENT_IS_BINDER, "MiniJS binders are single identifiers")
        name = binder.children[0].payload_values[0]
        if opt.kind.name == "JustLocalVarInit":
            init_w = opt.children[0]
            _expect(init_w.kind == EXPR_IS_INIT, "initializer is not a MiniJS expression")
            opt_s = _mk("SomeInit")(tr(init_w.children[0]))
        else:
            opt_s = _mk("NoInit")()
        dtors.append(_mk("VarDtor")(_mk("Ident")(name), opt_s))
    return _mk("VarStmt")(build_list(S("VarDtor"), dtors))


def _un_stmts(t: Term, tr) -> Term:
    stmts = []
    for item in block_items(t.children[0]):
        if item.kind == STMT_IS_ITEM:
            stmts.append(tr(item.children[0]))
        elif item.kind == MULTI_DECL_IS_ITEM:
            stmts.append(_un_decl(item.children[0], tr))
        else:
            raise UnrepresentableTerm(f"unexpected block item {item.kind.name}")
    return _mk("Stmts")(build_list(S("Stmt"), stmts))


untrans_ips = make_translator(
    {
        "IdentIsMiniJSIdent": _un_ident,
        "AssignIsMiniJSExpr": _un_assign,
        "GenericBlockIsMiniJSStmts": _un_stmts,
    }
)


# ---------------------------------------------------------------------------
# Syntactic operations

class _Ops:
    # `var x = <expr mentioning x>` resolves to the x being declared,
    # which holds undefined while the initializer runs.
    binder_in_scope_in_init = True

    def var_init_to_rhs(self, common_attrs: Term, decl_attrs: Term, init: Term) -> Term:
        _expect(init.kind == EXPR_IS_INIT, "not a MiniJS initializer")
        return _wrap(EXPR_IS_RHS, init.children[0])

    def var_decl_binder_to_lhs(self, binder: Term) -> Term:
        name = binder_names(binder)[0]
        return _wrap(EXPR_IS_LHS, _mk("VarE")(_ident_term(name)))


# ---------------------------------------------------------------------------
# Structural adapter

def _block_parts(block: Term) -> tuple[Term, Term]:
    """Split a MiniJS block into (directives, generic block)."""
    directives, stmts_w = block.children
    _expect(stmts_w.kind == BLOCK_IS_STMTS, "block body is foreign")
    return directives, stmts_w.children[0]


def _make_block(directives: Term, generic: Term) -> Term:
    return _mk("Block")(directives, _wrap(BLOCK_IS_STMTS, generic))


def _empty_directives() -> Term:
    return build_list(S("Directive"), [])


def _opt_expr(t: Term) -> Optional[Term]:
    if t.kind.name == "MiniJS.SomeExpr":
        return t.children[0]
    return None


def _mk_opt_expr(e: Optional[Term]) -> Term:
    if e is None:
        return _mk("NoExpr")()
    return _mk("SomeExpr")(e)


class _Adapter:
    def item_view(self, item: Term) -> ItemView:
        if item.kind != STMT_IS_ITEM:
            return PlainView()
        stmt = item.children[0]
        name = stmt.kind.name

        def as_item(s: Term) -> Term:
            return _wrap(STMT_IS_ITEM, s)

        if name == "MiniJS.IfStmt":
            cond, then, els = stmt.children
            then_dirs, then_g = _block_parts(then)
            if els.kind.name == "MiniJS.SomeElse":
                else_dirs, else_g = _block_parts(els.children[0])
            else:
                else_dirs, else_g = None, None

            def rebuild_if(c: Term, tb: Term, eb: Optional[Term]) -> Term:
                if eb is None:
                    new_else = _mk("NoElse")()
                else:
                    dirs = else_dirs if else_dirs is not None else _empty_directives()
                    new_else = _mk("SomeElse")(_make_block(dirs, eb))
                return as_item(_mk("IfStmt")(c, _make_block(then_dirs, tb), new_else))

            return IfView(cond, then_g, else_g, rebuild_if)
        if name == "MiniJS.WhileStmt":
            cond, body = stmt.children
            dirs, body_g = _block_parts(body)

            def rebuild_while(c: Term, b: Term) -> Term:
                return as_item(_mk("WhileStmt")(c, _make_block(dirs, b)))

            return WhileView(cond, body_g, rebuild_while)
        if name == "MiniJS.ForStmt":
            init, cond, step, body = stmt.children
            dirs, body_g = _block_parts(body)

            def rebuild_for(i, c, s, b):
                return as_item(
                    _mk("ForStmt")(
                        _mk_opt_expr(i), _mk_opt_expr(c), _mk_opt_expr(s),
                        _make_block(dirs, b),
                    )
                )

            return ForView(_opt_expr(init), _opt_expr(cond), _opt_expr(step),
                           body_g, rebuild_for)
        if name == "MiniJS.ReturnStmt":
            opt = stmt.children[0]

            def rebuild_ret(v: Optional[Term]) -> Term:
                return as_item(_mk("ReturnStmt")(_mk_opt_expr(v)))

            return ReturnView(_opt_expr(opt), rebuild_ret)
        if name == "MiniJS.BreakStmt":
            return BreakView()
        if name == "MiniJS.ContinueStmt":
            return ContinueView()
        if name == "MiniJS.BlockStmt":
            dirs, inner_g = _block_parts(stmt.children[0])

            def rebuild_block(b: Term) -> Term:
                return as_item(_mk("BlockStmt")(_make_block(dirs, b)))

            return NestedBlockView(inner_g, rebuild_block)
        if name == "MiniJS.ExprStmt":
            expr = stmt.children[0]

            def rebuild_expr(e: Term) -> Term:
                return as_item(_mk("ExprStmt")(e))

            return ExprStmtView(expr, rebuild_expr)
        return PlainView()

    def body_paths(self, root: Term) -> list[Path]:
        paths = []
        spine = root.children[0]
        prefix: Path = (0,)
        while spine.kind.name == "ConsF":
            # FuncDef children: name, params, block(directives, stmts).
            paths.append(prefix + (0, 2, 1, 0))
            spine = spine.children[1]
            prefix = prefix + (1,)
        return paths

    def make_cov_marker(self, index: int) -> Term:
        cell = _mk("IndexE")(
            _mk("MemberE")("cov", _mk("VarE")(_ident_term("TC"))),
            _mk("NumLit")(index),
        )
        a = assign(_wrap(EXPR_IS_LHS, cell), _wrap(EXPR_IS_RHS, _mk("BoolLit")(True)))
        return TABLE.inj(a, BLOCK_ITEM_L)


# ---------------------------------------------------------------------------
# Three-address hooks

_EXPR_SORT = S("Expr")


class _Tac:
    temp_prefix = "__t"

    def classify(self, expr: Term) -> tuple:
        name = expr.kind.name
        if self.is_atomic(expr):
            return ("atomic",)
        if name == "AssignIsMiniJSExpr":
            inner = expr.children[0]
            lhs_w, _, rhs_w = inner.children
            return ("assign", lhs_w.children[0], rhs_w.children[0])
        if name == "MiniJS.BinE" and expr.payload_values[0] in ("&&", "||"):
            return (
                "shortcircuit",
                expr.payload_values[0] == "&&",
                expr.children[0],
                expr.children[1],
            )
        return _split_operands(expr, _EXPR_SORT)

    def is_atomic(self, expr: Term) -> bool:
        name = expr.kind.name
        if name in ("MiniJS.NumLit", "MiniJS.BoolLit", "MiniJS.UndefLit",
                    "MiniJS.VarE"):
            return True
        if name == "MiniJS.MemberE":
            return self.is_atomic(expr.children[0])
        return False

    def is_effect_free(self, expr: Term) -> bool:
        return expr.kind.name in ("MiniJS.NumLit", "MiniJS.BoolLit",
                                  "MiniJS.UndefLit")

    def make_var(self, name: str) -> Term:
        return _mk("VarE")(_ident_term(name))

    def make_not(self, expr: Term) -> Term:
        return _mk("UnaryE")("!", expr)

    def make_decl_item(self, name: str, init: Optional[Term]) -> Term:
        if init is None:
            opt = mk_term(NO_INIT)
        else:
            opt = mk_term(JUST_INIT, (), (_wrap(EXPR_IS_INIT, init),))
        single = mk_term(
            IPS.kind("SingleLocalVarDecl"),
            (),
            (mk_term(EMPTY_DECL_ATTRS), _wrap(IDENT_IS_BINDER, ident(name)), opt),
        )
        decl = mk_term(
            MULTI_DECL, (),
            (mk_term(EMPTY_COMMON_ATTRS), build_list(SINGLE_DECL_L, [single])),
        )
        return _wrap(MULTI_DECL_IS_ITEM, decl)

    def make_assign_item(self, target: Term, source: Term) -> Term:
        a = assign(_wrap(EXPR_IS_LHS, target), _wrap(EXPR_IS_RHS, source))
        return TABLE.inj(a, BLOCK_ITEM_L)

    def make_if_item(self, cond: Term, then_items: list, else_items) -> Term:
        then_b = _make_block(_empty_directives(), generic_block(then_items))
        if else_items is None:
            els = _mk("NoElse")()
        else:
            els = _mk("SomeElse")(
                _make_block(_empty_directives(), generic_block(else_items))
            )
        return _wrap(STMT_IS_ITEM, _mk("IfStmt")(cond, then_b, els))

    def init_exprs(self, init: Term) -> tuple:
        _expect(init.kind == EXPR_IS_INIT, "not a MiniJS initializer")

        def rebuild(exprs: list) -> Term:
            return _wrap(EXPR_IS_INIT, exprs[0])

        return [init.children[0]], rebuild


def _split_operands(expr: Term, expr_sort) -> tuple:
    """Expose the direct expression operands of a compound expression."""
    slots = []  # (child index, None) or (child index, list position)
    parts = []
    for i, (sort, child) in enumerate(zip(expr.kind.child_sorts, expr.children)):
        if sort == expr_sort:
            slots.append((i, None))
            parts.append(child)
        elif sort == ListOf(expr_sort):
            for j, elem in enumerate(extract_list(child)):
                slots.append((i, j))
                parts.append(elem)

    def rebuild(new_parts: list) -> Term:
        children = list(expr.children)
        lists: dict[int, list] = {}
        for (i, j), part in zip(slots, new_parts):
            if j is None:
                children[i] = part
            else:
                lists.setdefault(i, extract_list(expr.children[i]))[j] = part
        for i, elems in lists.items():
            children[i] = build_list(expr_sort, elems)
        return mk_term(expr.kind, expr.payload_values, tuple(children))

    return ("operands", parts, rebuild)


# ---------------------------------------------------------------------------
# Evaluation

_TC = object()
_COV = object()


class _Interp:
    def __init__(self, ast: GenericValue, fuel: int,
                 on_item: Optional[Callable] = None,
                 on_enter: Optional[Callable] = None):
        self.funcs = {f.args[0].args[0]: f for f in ast.args[0]}
        self.fuel = fuel
        self.events: list[tuple] = []
        self.cov: dict[int, bool] = {}
        self.globals: dict[str, object] = {}
        self.ext_calls = 0
        self.on_item = on_item
        self.on_enter = on_enter

    def tick(self) -> None:
        self.fuel -= 1
        if self.fuel < 0:
            raise Trap("fuel")

    def run(self) -> RunResult:
        try:
            main = self.funcs.get("main")
            if main is None:
                raise Trap("nomain")
            value = self.call_user(main, [None] * len(main.args[1]))
            self.events.append(("return", _render(value)))
        except Trap as trap:
            self.events.append(("trap", trap.kind))
        return RunResult(tuple(self.events), dict(self.cov))

    def call_user(self, func: GenericValue, args: list):
        params = func.args[1]
        if len(args) != len(params):
            raise Trap("arity")
        if self.on_enter:
            self.on_enter(func)
        env = [{p.args[0]: a for p, a in zip(params, args)}]
        try:
            self.exec_block(func.args[2], env, new_scope=False)
        except ReturnEx as ret:
            return ret.value
        return None

    def exec_block(self, block: GenericValue, env: list, new_scope: bool = True):
        if new_scope:
            env = env + [{}]
        for stmt in block.args[1].args[0]:
            self.exec_item(stmt, env)

    def exec_item(self, stmt: GenericValue, env: list) -> None:
        if self.on_item:
            self.on_item(stmt)
        self.tick()
        self.exec_stmt(stmt, env)

    def exec_stmt(self, s: GenericValue, env: list) -> None:
        c = s.ctor
        if c == "ExprStmt":
            self.eval(s.args[0], env)
        elif c == "VarStmt":
            for dtor in s.args[0]:
                name = dtor.args[0].args[0]
                opt = dtor.args[1]
                # the binder is in scope (undefined) inside its own initializer
                env[-1][name] = None
                if opt.ctor == "SomeInit":
                    env[-1][name] = self.eval(opt.args[0], env)
        elif c == "IfStmt":
            cond, then, els = s.args
            if _truthy(self.eval(cond, env)):
                self.exec_block(then, env)
            elif els.ctor == "SomeElse":
                self.exec_block(els.args[0], env)
        elif c == "WhileStmt":
            cond, body = s.args
            while True:
                self.tick()
                if not _truthy(self.eval(cond, env)):
                    break
                try:
                    self.exec_block(body, env)
                except BreakEx:
                    break
                except ContinueEx:
                    continue
        elif c == "ForStmt":
            init, cond, step, body = s.args
            if init.ctor == "SomeExpr":
                self.eval(init.args[0], env)
            while True:
                self.tick()
                if cond.ctor == "SomeExpr" and not _truthy(
                    self.eval(cond.args[0], env)
                ):
                    break
                try:
                    self.exec_block(body, env)
                except BreakEx:
                    break
                except ContinueEx:
                    pass
                if step.ctor == "SomeExpr":
                    self.eval(step.args[0], env)
        elif c == "ReturnStmt":
            opt = s.args[0]
            raise ReturnEx(self.eval(opt.args[0], env) if opt.ctor == "SomeExpr" else None)
        elif c == "BreakStmt":
            raise BreakEx()
        elif c == "ContinueStmt":
            raise ContinueEx()
        elif c == "BlockStmt":
            self.exec_block(s.args[0], env)
        else:
            raise Trap("stmt")

    def lookup(self, name: str, env: list):
        for scope in reversed(env):
            if name in scope:
                return scope[name]
        if name in self.globals:
            return self.globals[name]
        if name == "TC":
            return _TC
        raise Trap("undef")

    def store(self, name: str, value, env: list) -> None:
        for scope in reversed(env):
            if name in scope:
                scope[name] = value
                return
        # Assignment to an undeclared name creates a global.
        self.globals[name] = value

    def eval(self, e: GenericValue, env: list):
        self.tick()
        c = e.ctor
        if c == "NumLit" or c == "BoolLit":
            return e.args[0]
        if c == "UndefLit":
            return None
        if c == "VarE":
            return self.lookup(e.args[0].args[0], env)
        if c == "IndexE":
            base = self.eval(e.args[0], env)
            idx = self.eval(e.args[1], env)
            return self.index_read(base, idx)
        if c == "MemberE":
            base = self.eval(e.args[0], env)
            if base is _TC and e.args[1] == "cov":
                return _COV
            raise Trap("member")
        if c == "CallE":
            name = e.args[0].args[0]
            args = [self.eval(a, env) for a in e.args[1]]
            return self.call(name, args)
        if c == "ArrayE":
            return [self.eval(a, env) for a in e.args[0]]
        if c == "UnaryE":
            op, operand = e.args
            v = self.eval(operand, env)
            if op == "!":
                return not _truthy(v)
            if isinstance(v, bool) or not isinstance(v, int):
                raise Trap("type")
            return -v
        if c == "BinE":
            return self.binop(e, env)
        if c == "AssignE":
            value = self.eval(e.args[1], env)
            return self.assign_to(e.args[0], value, env)
        raise Trap("expr")

    def index_read(self, base, idx):
        if isinstance(idx, bool) or not isinstance(idx, int):
            raise Trap("type")
        if base is _COV:
            return self.cov.get(idx, False)
        if not isinstance(base, list):
            raise Trap("type")
        if not 0 <= idx < len(base):
            return None  # out-of-range reads yield undefined
        return base[idx]

    def assign_to(self, lhs: GenericValue, value, env: list):
        if lhs.ctor == "VarE":
            self.store(lhs.args[0].args[0], value, env)
            return value
        if lhs.ctor == "IndexE":
            base = self.eval(lhs.args[0], env)
            idx = self.eval(lhs.args[1], env)
            if isinstance(idx, bool) or not isinstance(idx, int):
                raise Trap("type")
            if base is _COV:
                self.events.append(("cov", idx))
                self.cov[idx] = bool(value)
                return value
            if not isinstance(base, list):
                raise Trap("type")
            if 0 <= idx < len(base):
                base[idx] = value
            elif idx == len(base):
                base.append(value)
            else:
                raise Trap("index")
            return value
        raise Trap("lhs")

    def binop(self, e: GenericValue, env: list):
        op = e.args[0]
        if op == "&&":
            left = self.eval(e.args[1], env)
            return self.eval(e.args[2], env) if _truthy(left) else left
        if op == "||":
            left = self.eval(e.args[1], env)
            return left if _truthy(left) else self.eval(e.args[2], env)
        a = self.eval(e.args[1], env)
        b = self.eval(e.args[2], env)
        if op in ("==", "!="):
            same = _same_value(a, b)
            return same if op == "==" else not same
        for v in (a, b):
            if isinstance(v, bool) or not isinstance(v, int):
                raise Trap("type")
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return trunc_div(a, b)
        if op == "%":
            return trunc_mod(a, b)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        raise Trap("op")

    def call(self, name: str, args: list):
        if name in self.funcs:
            return self.call_user(self.funcs[name], args)
        if name == "print":
            self.events.append(("print", " ".join(_render(a) for a in args)))
            return None
        self.events.append(("call", name, tuple(_render(a) for a in args)))
        value = external_value(self.ext_calls, args)
        self.ext_calls += 1
        return value


def _truthy(v) -> bool:
    if v is None:
        return False
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return v != 0
    return True


def _same_value(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    if isinstance(a, list) != isinstance(b, list):
        return False
    if isinstance(a, list):
        return len(a) == len(b) and all(_same_value(x, y) for x, y in zip(a, b))
    return a == b


def _render(v) -> str:
    if v is None:
        return "undefined"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return "[" + ", ".join(_render(x) for x in v) + "]"
    if v is _TC or v is _COV:
        return "[object]"
    return str(v)


def run(ast: GenericValue, fuel: int = 100_000,
        on_item: Optional[Callable] = None,
        on_enter: Optional[Callable] = None) -> RunResult:
    return _Interp(ast, fuel, on_item, on_enter).run()


def item_walk(ast: GenericValue) -> list[GenericValue]:
    """All item-position nodes in the order coverage analysis numbers them."""
    out: list[GenericValue] = []

    def walk_block(block: GenericValue) -> None:
        for s in block.args[1].args[0]:
            out.append(s)
            walk_stmt(s)

    def walk_stmt(s: GenericValue) -> None:
        c = s.ctor
        if c == "IfStmt":
            walk_block(s.args[1])
            if s.args[2].ctor == "SomeElse":
                walk_block(s.args[2].args[0])
        elif c == "WhileStmt":
            walk_block(s.args[1])
        elif c == "ForStmt":
            walk_block(s.args[3])
        elif c == "BlockStmt":
            walk_block(s.args[0])

    for func in ast.args[0]:
        walk_block(func.args[2])
    return out


def functions_of(ast: GenericValue) -> list[GenericValue]:
    return list(ast.args[0])


LANGUAGE = register(
    LanguageDef(
        name="minijs",
        file_ext=".mjs",
        schema=SCHEMA,
        modularized=MOD,
        ips=IPS,
        injections=TABLE,
        ops=_Ops(),
        adapter=_Adapter(),
        parse=parse,
        pretty=pretty,
        trans_ips=trans_ips,
        untrans_ips=untrans_ips,
        tac=_Tac(),
        run=run,
        item_walk=item_walk,
    )
)
