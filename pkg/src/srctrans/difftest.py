"""Differential semantic testing of transformation passes.

Each corpus program is run as written, then pushed through
decompose -> pass -> recompose -> pretty -> reparse and run again; the
two traces must match event for event.  Every program gets a verdict and
a failure never aborts the batch, so one report covers the whole corpus.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .langs.base import LanguageDef, get_language
from .passes.hoist import elementary_hoist, hoist
from .passes.tac import tac
from .passes.testcov import testcov


def _identity(term, lang):
    return term


def _testcov_term(term, lang):
    return testcov(term, lang)[0]


PASSES: dict[str, Callable] = {
    "ident": _identity,
    "ehoist": elementary_hoist,
    "hoist": hoist,
    "testcov": _testcov_term,
    "tac": tac,
}


@dataclass(frozen=True)
class Verdict:
    """Outcome for one corpus program."""

    index: int
    kind: str  # Equal | TraceDiverged | TransformError | ParseError
    detail: str = ""

    def line(self) -> str:
        return f"{self.index}\t{self.kind}\t{self.detail}".rstrip()


@dataclass(frozen=True)
class DiffReport:
    lang: str
    pass_name: str
    verdicts: tuple

    @property
    def passed(self) -> int:
        return sum(1 for v in self.verdicts if v.kind == "Equal")

    @property
    def all_equal(self) -> bool:
        return self.passed == len(self.verdicts)

    def render(self) -> str:
        lines = [v.line() for v in self.verdicts]
        lines.append(f"PASS {self.passed}/{len(self.verdicts)}")
        return "\n".join(lines) + "\n"


def _first_divergence(a: tuple, b: tuple) -> int:
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i
    return min(len(a), len(b))


def diff_one(
    lang: LanguageDef,
    pass_fn: Callable,
    index: int,
    text: str,
    erase_markers: bool = False,
    fuel: int = 100_000,
) -> Verdict:
    try:
        ast = lang.parse(text)
    except Exception as e:
        return Verdict(index, "ParseError", f"original: {e}")
    before = lang.run(ast, fuel=fuel)

    try:
        out_term = pass_fn(lang.decompose(ast), lang)
        out_text = lang.pretty(lang.recompose(out_term))
    except Exception as e:
        return Verdict(index, "TransformError", f"{type(e).__name__}: {e}")

    try:
        out_ast = lang.parse(out_text)
    except Exception as e:
        return Verdict(index, "ParseError", f"transformed: {e}")
    after = lang.run(out_ast, fuel=fuel)
    if erase_markers:
        after = after.erased()
        before = before.erased()

    if before.events != after.events:
        step = _first_divergence(before.events, after.events)
        want = before.events[step] if step < len(before.events) else "<end>"
        got = after.events[step] if step < len(after.events) else "<end>"
        return Verdict(
            index, "TraceDiverged", f"step {step}: {want!r} vs {got!r}"
        )
    return Verdict(index, "Equal")


def diff_test(
    lang_name: str,
    pass_name: str,
    corpus: list[str],
    erase_markers: Optional[bool] = None,
    fuel: int = 100_000,
) -> DiffReport:
    """Run one pass over a corpus of program texts."""
    lang = get_language(lang_name)
    try:
        pass_fn = PASSES[pass_name]
    except KeyError:
        raise KeyError(f"unknown pass {pass_name!r}") from None
    if erase_markers is None:
        erase_markers = pass_name == "testcov"
    verdicts = tuple(
        diff_one(lang, pass_fn, i, text, erase_markers, fuel)
        for i, text in enumerate(corpus)
    )
    return DiffReport(lang_name, pass_name, verdicts)
