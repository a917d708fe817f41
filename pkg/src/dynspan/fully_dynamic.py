"""Fully-dynamic (2k-1)-spanner via a binary-counter level partition.

Edges live in levels E_0, E_1, ...; level 0 is passed through to the
output whole, each higher level runs its own decremental greedy spanner.
A counter of insertions decides placement: when its highest flipped bit g
is at most ell0 the new edge joins E_0, otherwise levels 0..g-ell0-1 merge
into level g-ell0 and that level's spanner is rebuilt from scratch.
Deletions are delegated to the owning level.
"""

from __future__ import annotations

from dataclasses import dataclass

from dynspan.graph import DynamicGraph, EdgeExists, EdgeMissing, edge_key
from dynspan.greedy import GreedyState
from dynspan.instrumentation import OpCounter, RecourseLog


def level_params(n: int, k: int) -> tuple[int, int]:
    """(ell0, j): 2**ell0 <= n^(1+1/k) < 2**(ell0+1), j = ceil(log2 n^(1-1/k)).

    Exact integer arithmetic: 2**ell <= n^(1+1/k) iff 2**(ell*k) <= n^(k+1).
    """
    if n < 2:
        return 0, 0
    ell0 = 0
    while 2 ** ((ell0 + 1) * k) <= n ** (k + 1):
        ell0 += 1
    j = 0
    while 2 ** (j * k) < n ** (k - 1):
        j += 1
    return ell0, j


@dataclass(frozen=True)
class RebuildInfo:
    level: int
    size: int  # edges in the rebuilt level


class FullyDynamicSpanner:
    def __init__(
        self,
        n: int,
        k: int,
        edges: tuple[tuple[int, int], ...] = (),
        counter: OpCounter | None = None,
    ) -> None:
        self.n = n
        self.k = k
        self.ell0, self.num_levels = level_params(n, k)
        self.op_counter = counter
        self.insert_count = 0
        self.e0: set[tuple[int, int]] = set()
        self.levels: dict[int, GreedyState] = {}
        self.owner: dict[tuple[int, int], int] = {}
        self.recourse = RecourseLog()
        if edges:
            # a non-empty start graph occupies the top level whole
            top = max(self.num_levels, 1)
            g = DynamicGraph(n, edges)
            state = GreedyState(g, k, counter)
            self.levels[top] = state
            for e in g.edges():
                self.owner[e] = top
            self.recourse.record(state.spanner_size(), 0)
        else:
            self.recourse.record(0, 0)

    def spanner(self) -> set[tuple[int, int]]:
        out = set(self.e0)
        for state in self.levels.values():
            out |= state.in_spanner
        return out

    def spanner_size(self) -> int:
        return len(self.e0) + sum(s.spanner_size() for s in self.levels.values())

    def insert(self, u: int, v: int) -> RebuildInfo | None:
        e = edge_key(u, v)
        if e in self.owner:
            raise EdgeExists(f"edge {e} already present")
        self.insert_count += 1
        g = (self.insert_count & -self.insert_count).bit_length() - 1  # highest flipped bit
        if g <= self.ell0:
            self.e0.add(e)
            self.owner[e] = 0
            self.recourse.record(1, 0)
            return None
        h = g - self.ell0  # may exceed num_levels once the counter outgrows n(n-1)/2
        return self._rebuild_level(h, e)

    def _rebuild_level(self, h: int, new_edge: tuple[int, int]) -> RebuildInfo:
        merged = set(self.e0)
        old_output = set(self.e0)
        self.e0.clear()
        for i in sorted(self.levels):
            if i < h:
                state = self.levels.pop(i)
                merged |= set(state.graph.edges())
                old_output |= state.in_spanner
        if h in self.levels:
            state = self.levels.pop(h)
            merged |= set(state.graph.edges())
            old_output |= state.in_spanner
        merged.add(new_edge)
        graph = DynamicGraph(self.n, sorted(merged))
        state = GreedyState(graph, self.k, self.op_counter)
        self.levels[h] = state
        for e in merged:
            self.owner[e] = h
        new_output = state.in_spanner
        self.recourse.record(len(new_output - old_output), len(old_output - new_output))
        return RebuildInfo(h, len(merged))

    def delete(self, u: int, v: int) -> list[tuple[int, int]]:
        e = edge_key(u, v)
        level = self.owner.pop(e, None)
        if level is None:
            raise EdgeMissing(f"edge {e} not present")
        if level == 0:
            self.e0.discard(e)
            self.recourse.record(0, 1)
            return []
        state = self.levels[level]
        was_spanner = e in state.in_spanner
        added = state.handle_delete(*e)
        self.recourse.record(len(added), 1 if was_spanner else 0)
        return added

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self.owner

    def edge_count(self) -> int:
        return len(self.owner)

    def check_invariants(self) -> None:
        seen: set[tuple[int, int]] = set()
        for e, lvl in self.owner.items():
            assert e not in seen
            seen.add(e)
            if lvl == 0:
                assert e in self.e0
            else:
                assert self.levels[lvl].graph.has_edge(*e)
        assert len(self.e0) + sum(s.graph.m for s in self.levels.values()) == len(self.owner)
        # capacity: level i holds at most 2**(ell0+i+1) edges (the counter can
        # feed a level for 2**(ell0+i+1)-1 insertions between its flushes)
        assert len(self.e0) < 2 ** (self.ell0 + 1)
        for i, state in self.levels.items():
            if i <= self.num_levels:
                assert state.graph.m <= 2 ** (self.ell0 + i + 1)
