"""Shared execution machinery for the bundled interpreters.

Runs are fully deterministic: unknown callees are mocked by a per-run call
counter, integer division truncates toward zero, and every trap is an
ordinary outcome recorded in the trace rather than a crash.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class Trap(Exception):
    """A defined runtime failure; ends the run with a trace event."""

    def __init__(self, kind: str):
        super().__init__(kind)
        self.kind = kind


class BreakEx(Exception):
    pass


class ContinueEx(Exception):
    pass


class ReturnEx(Exception):
    def __init__(self, value):
        super().__init__()
        self.value = value


@dataclass(frozen=True)
class RunResult:
    """Observable outcome of one program run."""

    events: tuple
    coverage: dict = field(default_factory=dict)

    def erased(self) -> "RunResult":
        """Drop coverage events; used to compare against unmarked runs."""
        return RunResult(
            tuple(e for e in self.events if e[0] != "cov"), dict(self.coverage)
        )


def trunc_div(a: int, b: int) -> int:
    if b == 0:
        raise Trap("divzero")
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def trunc_mod(a: int, b: int) -> int:
    return a - b * trunc_div(a, b)


def external_value(counter: int, args: list):
    """Mocked return value of an undefined callee; depends only on the
    per-run call counter and the argument summary, never on real state."""
    s = 0
    for a in args:
        if isinstance(a, bool):
            s += 1 if a else 0
        elif isinstance(a, int):
            s += a
        elif isinstance(a, list):
            s += len(a)
    if counter % 3 == 2:
        return (counter + s) % 2 == 0
    return (counter * 7 + s) % 5 - 2
