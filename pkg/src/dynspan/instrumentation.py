"""Recourse, elementary-operation, and load-overhead accounting.

All algorithm modules report through these structures so that runs are
comparable and byte-reproducible.  Costs are counted in elementary
ordered-set operations (insert/delete/find on a maintained index), not
wall-clock time, so assertions are machine independent.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence


class RecourseLog:
    """Per-update counts of edges added to / removed from a maintained output."""

    def __init__(self) -> None:
        self.added: list[int] = []
        self.removed: list[int] = []
        self.total_added = 0
        self.total_removed = 0

    def record(self, added: int, removed: int) -> None:
        self.added.append(added)
        self.removed.append(removed)
        self.total_added += added
        self.total_removed += removed

    @property
    def steps(self) -> int:
        return len(self.added)

    def check(self) -> None:
        # totals must equal the sum of per-step entries
        assert self.total_added == sum(self.added)
        assert self.total_removed == sum(self.removed)


class OpCounter:
    """Counts elementary ordered-set operations, attributed per module.

    A "step" is one update of the structure under test; `end_step` closes
    the current window.  Charges are deterministic functions of the update
    sequence, never of timing.
    """

    def __init__(self) -> None:
        self.current = 0
        self.per_step: list[int] = []
        self.max_step = 0
        self.total = 0
        self.by_module: Counter[str] = Counter()

    def charge(self, n: int = 1, module: str = "core") -> None:
        self.current += n
        self.total += n
        self.by_module[module] += n

    def end_step(self) -> int:
        count = self.current
        self.per_step.append(count)
        if count > self.max_step:
            self.max_step = count
        self.current = 0
        return count

    @property
    def last_step(self) -> int:
        return self.per_step[-1] if self.per_step else 0

    def check_attribution(self) -> None:
        assert sum(self.by_module.values()) == self.total


@dataclass(frozen=True)
class OverheadSample:
    """One (step, machine) observation of actual load vs target load."""

    step: int
    machine: object
    load: int
    target: float


@dataclass(frozen=True)
class OverheadReport:
    total: int
    violations: int
    worst_residual: float
    worst_sample: OverheadSample | None

    @property
    def fraction(self) -> float:
        return self.violations / self.total if self.total else 0.0


def measure_overhead(
    samples: Iterable[OverheadSample],
    alpha: float,
    beta: float,
    every: int = 1,
) -> OverheadReport:
    """Fraction of samples violating load <= alpha*target + beta.

    `every` thins the sample stream (keep one in `every`); the default
    keeps everything.
    """
    total = 0
    violations = 0
    worst = float("-inf")
    worst_sample = None
    for i, s in enumerate(samples):
        if i % every:
            continue
        total += 1
        residual = s.load - (alpha * s.target + beta)
        if residual > worst:
            worst = residual
            worst_sample = s
        if residual > 0:
            violations += 1
    if worst_sample is None:
        worst = 0.0
    return OverheadReport(total, violations, worst, worst_sample)


CSV_HEADER = "step,event,recourse_add,recourse_del,spanner_size,op_count,resamples,stretch_ok"


@dataclass(frozen=True)
class MetricsRow:
    step: int
    event: str
    recourse_add: int
    recourse_del: int
    spanner_size: int
    op_count: int
    resamples: int
    stretch_ok: str  # "1", "0", or "" when unchecked

    def format(self) -> str:
        return (
            f"{self.step},{self.event},{self.recourse_add},{self.recourse_del},"
            f"{self.spanner_size},{self.op_count},{self.resamples},{self.stretch_ok}"
        )


def write_metrics_csv(path: str, rows: Sequence[MetricsRow]) -> None:
    with open(path, "w", newline="") as f:
        f.write(CSV_HEADER + "\n")
        for row in rows:
            f.write(row.format() + "\n")
