"""Shared oracles and fixtures for the test suite.

Everything here is deliberately independent of the implementation under
test: the schema/value fuzzers build inputs from scratch, and the
coverage oracle recomputes executed blocks from interpreter callbacks
rather than from the instrumentation output.
"""

from __future__ import annotations

import random
import string

from srctrans.schema import (
    ConstructorDecl,
    GV,
    ListT,
    Named,
    PairT,
    PairV,
    Prim,
    Schema,
)
from srctrans.terms import (
    Atom,
    ListOf,
    OptionOf,
    PairOf,
    Signature,
    Term,
    build_list,
    build_option,
    build_pair,
    mk_term,
)

# ---------------------------------------------------------------------------
# Random schemas and conforming values (modularizer isomorphism oracle).


def random_schema(rng: random.Random, index: int) -> Schema:
    """A random well-formed schema of at most 6 types and 4 constructors.

    Constructor 0 of each type only references earlier types, so every
    type has a finite value and generation always terminates.
    """
    n_types = rng.randrange(1, 7)
    names = [f"T{i}" for i in range(n_types)]
    defs = []
    for i, tname in enumerate(names):
        n_ctors = rng.randrange(1, 5)
        ctors = []
        for c in range(n_ctors):
            # base constructor: earlier types only; others: any type
            pool = names[:i] if c == 0 else names
            n_args = rng.randrange(0, 4)
            args = tuple(_random_arg(rng, pool) for _ in range(n_args))
            ctors.append(ConstructorDecl(f"{tname}C{c}", args))
        defs.append((tname, tuple(ctors)))
    return Schema(f"Rand{index}", tuple(defs), names[-1])


def _random_arg(rng: random.Random, pool: list):
    r = rng.random()
    prims = [Prim("Int"), Prim("Bool"), Prim("String")]
    scalar = prims + [Named(n) for n in pool]
    if r < 0.55 or not pool:
        return rng.choice(scalar if pool else prims)
    if r < 0.8:
        return ListT(rng.choice(scalar))
    return PairT(rng.choice(scalar), rng.choice(scalar))


def random_value(schema: Schema, type_name: str, rng: random.Random,
                 depth: int = 4) -> GV:
    ctors = schema.types()[type_name]
    ctor = ctors[0] if depth <= 0 else rng.choice(ctors)
    args = tuple(
        _random_arg_value(schema, a, rng, depth - 1) for a in ctor.args
    )
    return GV(ctor.name, args)


def _random_arg_value(schema: Schema, ty, rng: random.Random, depth: int):
    if isinstance(ty, Prim):
        return _random_prim(ty.name, rng)
    if isinstance(ty, Named):
        return random_value(schema, ty.name, rng, depth)
    if isinstance(ty, ListT):
        return tuple(
            _random_arg_value(schema, ty.elem, rng, depth - 1)
            for _ in range(rng.randrange(0, 3))
        )
    if isinstance(ty, PairT):
        return PairV(
            _random_arg_value(schema, ty.first, rng, depth - 1),
            _random_arg_value(schema, ty.second, rng, depth - 1),
        )
    raise AssertionError(ty)


def _random_prim(name: str, rng: random.Random):
    if name == "Int":
        return rng.randrange(-50, 50)
    if name == "Bool":
        return rng.random() < 0.5
    return "".join(rng.choice(string.ascii_lowercase) for _ in range(3))


# ---------------------------------------------------------------------------
# Term fuzzing by sort (injection round-trip oracle).


def _min_depths(sig: Signature) -> dict:
    """Least constructor nesting needed to build each atomic sort."""
    INF = 10 ** 9
    depth: dict = {}

    def sort_depth(sort) -> int:
        if isinstance(sort, Atom):
            return depth.get(sort, INF)
        if isinstance(sort, (ListOf, OptionOf)):
            return 0  # empty container
        if isinstance(sort, PairOf):
            a, b = sort_depth(sort.first), sort_depth(sort.second)
            return max(a, b) + 1 if a < INF and b < INF else INF
        raise AssertionError(sort)

    changed = True
    while changed:
        changed = False
        for k in sig.kinds:
            ds = [sort_depth(s) for s in k.child_sorts]
            d = (max(ds) if ds else 0) + 1
            if d < depth.get(k.produced, INF):
                depth[k.produced] = d
                changed = True
    return depth


class TermFuzzer:
    def __init__(self, sig: Signature, seed: int = 0):
        self.sig = sig
        self.rng = random.Random(seed)
        self.depths = _min_depths(sig)
        self.producers: dict = {}
        for k in sig.kinds:
            self.producers.setdefault(k.produced, []).append(k)

    def term(self, sort, budget: int = 4) -> Term:
        if isinstance(sort, ListOf):
            n = self.rng.randrange(0, 3) if budget > 0 else 0
            return build_list(
                sort.elem, [self.term(sort.elem, budget - 1) for _ in range(n)]
            )
        if isinstance(sort, OptionOf):
            if budget > 0 and self.rng.random() < 0.6:
                return build_option(sort.elem, self.term(sort.elem, budget - 1))
            return build_option(sort.elem, None)
        if isinstance(sort, PairOf):
            return build_pair(
                self.term(sort.first, budget - 1),
                self.term(sort.second, budget - 1),
            )
        kinds = self.producers.get(sort)
        if not kinds:
            raise ValueError(f"no kind produces {sort}")
        fitting = [k for k in kinds if self._kind_depth(k) <= budget]
        kind = self.rng.choice(fitting) if fitting else min(
            kinds, key=self._kind_depth
        )
        payloads = tuple(_random_prim(p, self.rng) for p in kind.payloads)
        children = tuple(self.term(s, budget - 1) for s in kind.child_sorts)
        return mk_term(kind, payloads, children)

    def _kind_depth(self, kind) -> int:
        INF = 10 ** 9
        worst = 0
        for s in kind.child_sorts:
            if isinstance(s, Atom):
                worst = max(worst, self.depths.get(s, INF))
        return worst + 1


# ---------------------------------------------------------------------------
# Transliterations of the counting example used by the coverage golden.

COUNTF = {
    "minic": """\
int main() {
  int count = 0;
  int i = 0;
  for (i = 0; i < 9; i = i + 1) {
    if (f(i)) {
      count = count + 1;
      break;
    } else {
      print(i);
    }
  }
  return count;
}
""",
    "minijs": """\
function main() {
  var count = 0;
  var i = 0;
  for (i = 0; i < 9; i = i + 1) {
    if (f(i)) {
      count = count + 1;
      break;
    } else {
      print(i);
    }
  }
  return count;
}
""",
    "minilua": """\
local count = 0
for i = 1, 9 do
  if f(i) then
    count = count + 1
    break
  else
    print(i)
  end
end
print(count)
""",
}


# ---------------------------------------------------------------------------
# Atomic-operand scan: syntactic postcondition of the flattening pass.


def atomization_violations(lang, term) -> list:
    """Expression nodes that still have compound operands or short-circuit
    operators, judged through the language's own classification hooks."""
    from srctrans.terms import iter_subterms

    expr_sort = Atom(f"{lang.schema.name}.ExprL")
    ops = lang.tac
    out = []
    for t in iter_subterms(term):
        if t.sort != expr_sort:
            continue
        cls = ops.classify(t)
        if cls[0] == "shortcircuit":
            out.append(("shortcircuit", t))
        elif cls[0] == "operands":
            for part in cls[1]:
                if not ops.is_atomic(part):
                    out.append(("compound-operand", t))
                    break
    return out


# ---------------------------------------------------------------------------
# Coverage oracle: executed blocks recomputed from interpreter callbacks.


def executed_blocks_oracle(lang, ast, cfg, blocks) -> set:
    """Which block ids an uninstrumented run actually enters.

    Maps each executed item-position node (reported by on_item) to its
    basic block through the statement order shared by item_walk and the
    CFG; empty-body blocks are covered when their body is entered.
    """
    walked = lang.item_walk(ast)
    assert len(walked) == len(cfg.stmt_order), "item order out of sync"
    index_of = {id(node): i for i, node in enumerate(walked)}
    block_of = {n: blk.id for blk in blocks for n in blk.stmts}

    executed: set = set()
    entered_bodies: set = set()
    bodies = _interp_bodies(lang, ast)

    def on_item(node):
        i = index_of.get(id(node))
        if i is not None:
            executed.add(block_of[cfg.stmt_order[i]])

    def on_enter(func):
        b = bodies.get(id(func))
        if b is not None:
            entered_bodies.add(b)

    lang.run(ast, on_item=on_item, on_enter=on_enter)
    for blk in blocks:
        if not blk.stmts and blk.body in entered_bodies:
            executed.add(blk.id)
    return executed


def _interp_bodies(lang, ast) -> dict:
    """id(function node) -> body index, matching adapter.body_paths order."""
    if lang.name == "minilua":
        # body 0 is the chunk itself; functions follow in document order
        out = {id(ast): 0}
        funcs: list = []

        def scan(v):
            if isinstance(v, GV):
                if v.ctor == "FuncStmt":
                    funcs.append(v)
                for a in v.args:
                    scan(a)
            elif isinstance(v, tuple):
                for a in v:
                    scan(a)

        scan(ast)
        for i, f in enumerate(funcs):
            out[id(f)] = i + 1
        return out
    return {id(f): i for i, f in enumerate(ast.args[0])}
