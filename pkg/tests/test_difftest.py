"""Differential harness: verdicts, report shape, resilience."""

import pytest

from srctrans.difftest import PASSES, Verdict, diff_one, diff_test
from srctrans.gen import GenConfig, gen_program
from srctrans.langs.base import block_items, get_language, with_block_items


def corpus(lname, n, **kw):
    return [gen_program(lname, GenConfig(seed=s, **kw)) for s in range(n)]


def test_identity_all_equal():
    report = diff_test("minic", "ident", corpus("minic", 30))
    assert report.all_equal
    assert report.passed == 30


def test_report_rendering():
    report = diff_test("minilua", "ident", corpus("minilua", 3))
    lines = report.render().splitlines()
    assert lines[0] == "0\tEqual"
    assert lines[-1] == "PASS 3/3"
    assert len(lines) == 4


def test_parse_error_verdict():
    report = diff_test("minijs", "ident", ["function main() { if }"])
    (v,) = report.verdicts
    assert v.kind == "ParseError"
    assert "original" in v.detail
    assert not report.all_equal


def test_broken_pass_reported_not_raised():
    def drop_last_stmt(term, lang):
        path = lang.adapter.body_paths(term)[0]
        from srctrans.traversal import get_at, replace_at

        body = get_at(term, path)
        items = block_items(body)
        return replace_at(term, path, with_block_items(body, items[:-1]))

    lang = get_language("minijs")
    v = diff_one(
        lang, drop_last_stmt, 0,
        "function main() { print(1); print(2); }",
    )
    assert v.kind == "TraceDiverged"
    assert "step 1" in v.detail


def test_transform_error_verdict():
    def boom(term, lang):
        raise RuntimeError("pass exploded")

    lang = get_language("minic")
    v = diff_one(lang, boom, 0, "int main() { return 0; }")
    assert v.kind == "TransformError"
    assert "pass exploded" in v.detail


def test_batch_survives_bad_entries():
    texts = ["int main() { return 1; }", "int main() {", "int main() { return 2; }"]
    report = diff_test("minic", "hoist", texts)
    kinds = [v.kind for v in report.verdicts]
    assert kinds == ["Equal", "ParseError", "Equal"]
    assert report.passed == 2


def test_testcov_erases_markers_by_default():
    report = diff_test("minijs", "testcov", corpus("minijs", 20))
    assert report.all_equal


def test_unknown_pass_rejected():
    with pytest.raises(KeyError, match="nosuch"):
        diff_test("minic", "nosuch", [])


def test_registered_passes():
    assert set(PASSES) == {"ident", "ehoist", "hoist", "testcov", "tac"}


def test_verdict_line_format():
    assert Verdict(4, "Equal").line() == "4\tEqual"
    assert Verdict(0, "TraceDiverged", "step 2: x vs y").line() == (
        "0\tTraceDiverged\tstep 2: x vs y"
    )
