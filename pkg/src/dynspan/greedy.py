"""Decremental greedy (2k-1)-spanner with one-way recourse.

Spanner edges are only ever removed when the adversary deletes them.  On
such a deletion every current non-spanner edge is re-inspected in
ascending key order and joins iff its endpoints sit at spanner distance
>= 2k.  The maintained edge sequence doubles as a greedy inspection
prefix: the structure always equals the order-driven greedy run that
inspects the surviving spanner sequence first and the rest ascending.
"""

from __future__ import annotations

from dynspan.graph import DynamicGraph, EdgeMissing, edge_key, mask_dist
from dynspan.instrumentation import OpCounter, RecourseLog


class GreedyState:
    def __init__(self, graph: DynamicGraph, k: int, counter: OpCounter | None = None) -> None:
        if k < 1:
            raise ValueError("k must be >= 1")
        self.graph = graph
        self.k = k
        self.cap = 2 * k - 1  # inspection asks dist >= 2k, i.e. not reachable within 2k-1
        self.counter = counter
        self.spanner_seq: list[tuple[int, int]] = []
        self.in_spanner: set[tuple[int, int]] = set()
        self.non_spanner: set[tuple[int, int]] = set()
        self.span_mask = [0] * graph.n
        self.recourse = RecourseLog()
        self._build()

    def _build(self) -> None:
        for e in self.graph.edges():
            self._inspect(e)
        self.recourse.record(len(self.spanner_seq), 0)

    def _inspect(self, e: tuple[int, int]) -> bool:
        u, v = e
        if mask_dist(self.span_mask, u, v, self.cap) is None:
            self.spanner_seq.append(e)
            self.in_spanner.add(e)
            self.span_mask[u] |= 1 << v
            self.span_mask[v] |= 1 << u
            return True
        self.non_spanner.add(e)
        return False

    def spanner(self) -> set[tuple[int, int]]:
        return set(self.in_spanner)

    def spanner_size(self) -> int:
        return len(self.in_spanner)

    def total_recourse(self) -> int:
        return self.recourse.total_added

    def handle_delete(self, u: int, v: int) -> list[tuple[int, int]]:
        """Remove edge (u, v); returns the edges promoted into the spanner."""
        e = edge_key(u, v)
        self.graph.delete_edge(*e)
        if self.counter is not None:
            self.counter.charge(2, "greedy")
        if e in self.non_spanner:
            self.non_spanner.discard(e)
            self.recourse.record(0, 0)
            return []
        if e not in self.in_spanner:
            raise EdgeMissing(f"edge {e} tracked nowhere")  # unreachable if graph agreed
        self.spanner_seq.remove(e)
        self.in_spanner.discard(e)
        self.span_mask[e[0]] &= ~(1 << e[1])
        self.span_mask[e[1]] &= ~(1 << e[0])
        added: list[tuple[int, int]] = []
        for cand in sorted(self.non_spanner):
            if self._inspect_existing(cand):
                added.append(cand)
        for cand in added:
            self.non_spanner.discard(cand)
        self.recourse.record(len(added), 1)
        return added

    def _inspect_existing(self, e: tuple[int, int]) -> bool:
        u, v = e
        if mask_dist(self.span_mask, u, v, self.cap) is None:
            self.spanner_seq.append(e)
            self.in_spanner.add(e)
            self.span_mask[u] |= 1 << v
            self.span_mask[v] |= 1 << u
            return True
        return False

    def check_invariants(self) -> None:
        assert self.in_spanner | self.non_spanner == set(self.graph.edges())
        assert not (self.in_spanner & self.non_spanner)
        assert self.in_spanner == set(self.spanner_seq)
        for u in range(self.graph.n):
            assert self.span_mask[u] == sum(
                1 << v for v in self.graph.adj[u] if edge_key(u, v) in self.in_spanner
            )
