"""Ground-truth verification: stretch, size, girth, and a reference greedy spanner.

Everything here is a pure function of its inputs; repeated calls on the
same snapshot are identical.  Stretch is verified over the edges of the
host graph only: for unweighted graphs, dist_H(u,v) <= t on every host
edge (u,v) implies the same bound on every vertex pair (subdivide an
arbitrary shortest path edge by edge).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from dynspan.graph import DynamicGraph, edge_key, iter_bits, mask_dist


class SpannerNotSubgraph(Exception):
    pass


class OrderNotPermutation(Exception):
    pass


@dataclass(frozen=True)
class StretchReport:
    ok: bool
    worst_edge: tuple[int, int] | None
    worst_dist: float  # hop count; inf when the witness pair is disconnected

    def __bool__(self) -> bool:
        return self.ok


def adjacency_masks(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    masks = [0] * n
    for u, v in edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def reach_levels(masks: list[int], t: int) -> list[list[int]]:
    """levels[j][u] = bitmask of vertices at distance in [1, j+1] from u.

    Built by t-fold neighborhood composition; total cost O(t * sum(deg)).
    """
    n = len(masks)
    levels = [list(masks)]
    prev = levels[0]
    for _ in range(t - 1):
        cur = []
        for u in range(n):
            acc = masks[u]
            m = masks[u]
            while m:
                low = m & -m
                acc |= prev[low.bit_length() - 1]
                m ^= low
            cur.append(acc)
        levels.append(cur)
        prev = cur
    return levels


def verify_stretch(
    g: DynamicGraph,
    h_edges: Iterable[tuple[int, int]],
    t: int,
    mode: str = "exact",
    sample: int = 64,
    seed: int = 0,
) -> StretchReport:
    """Check dist_H(u,v) <= t for host edges (u,v); mode "sampled" checks a
    seeded uniform subset of them.  The witness on failure is the checked
    edge with the largest (possibly infinite) spanner distance."""
    h = list(h_edges)
    for u, v in h:
        if not g.has_edge(u, v):
            raise SpannerNotSubgraph(f"spanner edge {(u, v)} not in host graph")
    if mode not in ("exact", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")

    checked: Sequence[tuple[int, int]] = list(g.edges())
    if mode == "sampled" and len(checked) > sample:
        rng = random.Random(seed)
        checked = rng.sample(checked, sample)

    masks = adjacency_masks(g.n, h)
    levels = reach_levels(masks, t) if t >= 1 else []
    top = levels[-1] if levels else [0] * g.n

    ok = True
    worst_edge: tuple[int, int] | None = None
    worst: float = 0.0
    for u, v in checked:
        if (top[u] >> v) & 1:
            d = 1
            while not (levels[d - 1][u] >> v) & 1:
                d += 1
            dist: float = d
        else:
            exact = mask_dist(masks, u, v)
            dist = float("inf") if exact is None else exact
            ok = False
        if dist > worst:
            worst = dist
            worst_edge = (u, v)
    if ok:
        return StretchReport(True, worst_edge, worst)
    return StretchReport(False, worst_edge, worst)


def verify_size(h_edges: Iterable[tuple[int, int]], bound: float) -> bool:
    return sum(1 for _ in h_edges) <= bound


def girth_at_least(n: int, h_edges: Iterable[tuple[int, int]], g_min: int) -> bool:
    """True iff (V, h) has no cycle shorter than g_min.

    BFS from every vertex up to depth floor((g_min-1)/2).  A shortest cycle
    of length 2i+1 shows up as an edge inside level i of the BFS from any
    of its vertices; length 2i as a level-i vertex with two parents in
    level i-1 (no shortcuts exist on a shortest cycle, so along-cycle
    distances equal BFS depths).  Simple graphs have girth >= 3 trivially.
    """
    if g_min <= 3:
        return True
    masks = adjacency_masks(n, h_edges)
    depth = (g_min - 1) // 2  # even cycles 2i <= g_min-1 need levels up to i = depth
    odd_limit = (g_min - 2) // 2  # odd cycles 2i+1 <= g_min-1 need i <= odd_limit
    for root in range(n):
        if not masks[root]:
            continue
        prev = 1 << root
        visited = prev
        cur = masks[root]
        i = 1
        while cur:
            acc = 0
            for x in iter_bits(cur):
                mx = masks[x]
                if (mx & prev).bit_count() >= 2:
                    return False  # cycle of length <= 2i
                if i <= odd_limit and mx & cur:
                    return False  # cycle of length <= 2i+1
                acc |= mx
            if i == depth:
                break
            visited |= cur
            prev = cur
            cur = acc & ~visited
            i += 1
    return True


def reference_greedy(
    g: DynamicGraph,
    k: int,
    order: Sequence[tuple[int, int]],
) -> list[tuple[int, int]]:
    """Order-driven greedy (2k-1)-spanner; returns accepted edges in
    acceptance order.  An edge joins iff its endpoints are at spanner
    distance >= 2k when inspected."""
    if k < 1:
        raise ValueError("k must be >= 1")
    canon = [edge_key(u, v) for u, v in order]
    if sorted(canon) != list(g.edges()):
        raise OrderNotPermutation("order is not a permutation of the graph's edges")
    masks = [0] * g.n
    accepted: list[tuple[int, int]] = []
    cap = 2 * k - 1
    for u, v in canon:
        if mask_dist(masks, u, v, cap) is None:
            accepted.append((u, v))
            masks[u] |= 1 << v
            masks[v] |= 1 << u
    return accepted
