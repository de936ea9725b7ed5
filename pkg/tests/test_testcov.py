"""Coverage instrumentation: one marker per basic block."""

import re

import pytest

from helpers import COUNTF, executed_blocks_oracle
from srctrans.flow import basic_blocks, build_cfg
from srctrans.gen import GenConfig, gen_program
from srctrans.langs.base import get_language
from srctrans.passes.testcov import testcov as cov_pass

ALL = ("minic", "minijs", "minilua")


def instrument(lang, text):
    term, n = cov_pass(lang.decompose(lang.parse(text)), lang)
    return lang.pretty(lang.recompose(term)), n


def marker_ids(text):
    return [int(m) for m in re.findall(r"cov\[(\d+)\] = true", text)]


@pytest.mark.parametrize("lname", ALL)
def test_countf_marker_placement(lname):
    lang = get_language(lname)
    out, n = instrument(lang, COUNTF[lname])
    assert n == 5
    assert marker_ids(out) == [0, 1, 2, 3, 4]
    lines = [ln.strip() for ln in out.splitlines()]

    def line_of(pat):
        return next(i for i, ln in enumerate(lines) if pat in ln)

    # 0: routine entry, before the first declaration
    assert line_of("cov[0]") < line_of("count = 0")
    # 1: top of the loop body, before the branch
    assert line_of("cov[1]") == line_of("if") - 1
    # 2: then arm, before the increment; 3: else arm, before the print
    assert line_of("cov[2]") == line_of("count = count + 1") - 1
    assert line_of("cov[3]") == line_of("print(i)") - 1
    # 4: after the loop
    tail = "return count" if lname != "minilua" else "print(count)"
    assert line_of("cov[4]") == line_of(tail) - 1


@pytest.mark.parametrize("lname", ALL)
def test_countf_executed_blocks(lname):
    lang = get_language(lname)
    out, _ = instrument(lang, COUNTF[lname])
    run = lang.run(lang.parse(out))
    hit = {e[1] for e in run.events if e[0] == "cov"}
    # the break fires on the first true f(i), skipping the else arm once
    # the then arm runs, but both arms execute across iterations
    ast = lang.parse(COUNTF[lname])
    term = lang.decompose(ast)
    cfg = build_cfg(term, lang)
    blocks = basic_blocks(cfg)
    assert hit == executed_blocks_oracle(lang, ast, cfg, blocks)


@pytest.mark.parametrize("lname", ALL)
def test_coverage_matches_oracle_on_generated(lname):
    lang = get_language(lname)
    for seed in range(30):
        text = gen_program(lname, GenConfig(seed=seed))
        ast = lang.parse(text)
        term = lang.decompose(ast)
        cfg = build_cfg(term, lang)
        blocks = basic_blocks(cfg)
        out, n = instrument(lang, text)
        assert n == len(blocks)
        run = lang.run(lang.parse(out))
        hit = {e[1] for e in run.events if e[0] == "cov"}
        assert hit == executed_blocks_oracle(lang, ast, cfg, blocks)
        assert hit <= set(range(n))


@pytest.mark.parametrize("lname", ALL)
def test_erased_trace_unchanged(lname):
    lang = get_language(lname)
    for seed in range(30):
        text = gen_program(lname, GenConfig(seed=seed))
        before = lang.run(lang.parse(text))
        out, _ = instrument(lang, text)
        after = lang.run(lang.parse(out))
        assert after.erased().events == before.erased().events


def test_marker_count_equals_block_count():
    lang = get_language("minijs")
    out, n = instrument(lang, COUNTF["minijs"])
    assert out.count("cov[") == n
