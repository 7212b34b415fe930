"""Homomorphic operation counting per protocol phase."""
from __future__ import annotations

from collections import Counter
from contextlib import contextmanager

OPS = ("enc", "add", "mul", "plain_add", "plain_mul", "inv")
PHASES = ("query", "setup", "precheck", "indicators", "partial_sums",
          "position_indicators", "gather", "count", "update")


class OpCounter:
    """Tally of backend primitive invocations keyed by (phase, op).

    Backends call :meth:`record` once per primitive; protocols wrap their
    steps in :meth:`phase`. Events outside any phase land in ``"other"``.
    """

    def __init__(self):
        self.counts = Counter()
        self._phase = "other"

    @contextmanager
    def phase(self, name: str):
        prev, self._phase = self._phase, name
        try:
            yield self
        finally:
            self._phase = prev

    def record(self, op: str, n: int = 1):
        if op not in OPS:
            raise ValueError(f"unknown op {op!r}")
        self.counts[(self._phase, op)] += n

    def get(self, phase: str, op: str | None = None) -> int:
        if op is None:
            return sum(v for (ph, _), v in self.counts.items() if ph == phase)
        return self.counts[(phase, op)]

    def total(self, op: str | None = None) -> int:
        return sum(v for (_, o), v in self.counts.items() if op is None or o == op)

    def merge(self, other: OpCounter) -> OpCounter:
        self.counts.update(other.counts)
        return self

    def as_dict(self) -> dict:
        out = {}
        for (ph, op), v in sorted(self.counts.items()):
            out.setdefault(ph, {})[op] = v
        return out


@contextmanager
def _no_phase():
    yield None


def phase_of(counter: OpCounter | None, name: str):
    return counter.phase(name) if counter is not None else _no_phase()
