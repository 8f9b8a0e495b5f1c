"""Role-swap local search on spanning subgraphs of K_n.

Swapping u and v relabels the subgraph by the transposition (u v): every edge
at u moves to v and vice versa, the edge uv (if present) stays.  For a
Delta-regular subgraph under a zero-sum labeling some swap strictly lowers a
positive sum (and raises a negative one), and one swap moves the sum by at
most 4*Delta, so descent reaches |c| <= 2*Delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotZeroSum, SameVertex
from .graphs import EdgeLabeling, Embedding, SimpleGraph, gen_forest, make_rng, parse_graph


class SpanningSubgraph(SimpleGraph):
    @property
    def is_regular(self) -> bool:
        return len(set(self.degrees)) <= 1

    @classmethod
    def from_graph(cls, graph: SimpleGraph) -> SpanningSubgraph:
        return cls(graph.n, graph.edges)


def _check_pair(H: SimpleGraph, u: int, v: int) -> None:
    if u == v:
        raise SameVertex(f"cannot swap vertex {u} with itself")
    for x in (u, v):
        if not 1 <= x <= H.n:
            raise DimensionMismatch(f"vertex {x} outside 1..{H.n}")


def subgraph_sum(labeling: EdgeLabeling, H: SimpleGraph) -> int:
    if labeling.n != H.n:
        raise DimensionMismatch(f"labeling on {labeling.n} vertices, subgraph on {H.n}")
    return sum(labeling.label(u, v) for u, v in H.edges)


def boundary_set(H: SimpleGraph, u: int, v: int) -> frozenset[tuple[int, int]]:
    """Edges of H joining {u, v} to the rest of N(u) | N(v); uv itself excluded."""
    _check_pair(H, u, v)
    out = set()
    for a in (u, v):
        for x in H.neighbors(a):
            if x not in (u, v):
                out.add((min(a, x), max(a, x)))
    return frozenset(out)


def swap_roles(H: SpanningSubgraph, u: int, v: int) -> SpanningSubgraph:
    _check_pair(H, u, v)
    tau = Embedding.identity(H.n).swap_roles(u, v)
    return SpanningSubgraph(H.n, tau.image_edges(H))


def swap_delta(labeling: EdgeLabeling, H: SimpleGraph, u: int, v: int) -> int:
    """c(H_uv) - c(H), from the O(d(u) + d(v)) boundary edges only."""
    _check_pair(H, u, v)
    lab = labeling.label
    delta = 0
    for x in H.neighbors(u):
        if x != v:
            delta += lab(v, x) - lab(u, x)
    for x in H.neighbors(v):
        if x != u:
            delta += lab(u, x) - lab(v, x)
    return delta


def all_swap_deltas(labeling: EdgeLabeling, H: SimpleGraph) -> np.ndarray:
    """Matrix D with D[u-1, v-1] = swap_delta(labeling, H, u, v) for all u != v."""
    c = labeling.matrix.astype(np.int64)
    a = H.adjacency_matrix()
    m = a @ c  # m[u, v] = sum of c(x, v) over x in N(u)
    s = np.diagonal(m)  # s[u] = sum of c(u, x) over x in N(u)
    d = m + m.T - s[:, None] - s[None, :] + 2 * a * c
    np.fill_diagonal(d, 0)
    return d


@dataclass(frozen=True)
class Descent:
    subgraph: SpanningSubgraph
    trace: tuple[int, ...]
    swaps: tuple[tuple[int, int], ...]
    target: int
    stalled: bool
    certified: bool

    @property
    def final_sum(self) -> int:
        return self.trace[-1]

    def __iter__(self):
        # unpacks as (subgraph, trace)
        return iter((self.subgraph, self.trace))


def descend(
    labeling: EdgeLabeling,
    H0: SimpleGraph,
    rule: str = "best_improvement",
    certify: bool = True,
) -> Descent:
    """Apply strictly improving role swaps until |c| <= 2*Delta or none is left.

    ``best_improvement`` takes the swap with the smallest resulting |c|,
    ``first_improvement`` the first improving pair in lexicographic order;
    both break ties by (u, v).  With ``certify`` the labeling must be
    zero-sum; the result is certified when it ends inside the window.
    """
    if rule not in ("best_improvement", "first_improvement"):
        raise ValueError(f"unknown rule {rule!r}")
    if certify and not labeling.is_zero_sum():
        raise NotZeroSum(f"labeling sums to {labeling.total_sum}, not 0")
    H = SpanningSubgraph.from_graph(H0)
    target = 2 * H.max_degree
    total = subgraph_sum(labeling, H)
    trace = [total]
    swaps = []
    iu, iv = np.triu_indices(H.n, 1)
    while abs(total) > target:
        new = np.abs(total + all_swap_deltas(labeling, H)[iu, iv])
        improving = np.flatnonzero(new < abs(total))
        if not len(improving):
            break
        i = improving[np.argmin(new[improving])] if rule == "best_improvement" else improving[0]
        u, v = int(iu[i]) + 1, int(iv[i]) + 1
        total += swap_delta(labeling, H, u, v)
        H = swap_roles(H, u, v)
        trace.append(total)
        swaps.append((u, v))
    inside = abs(total) <= target
    return Descent(H, tuple(trace), tuple(swaps), target, not inside, inside and labeling.is_zero_sum())


def is_local_optimum(labeling: EdgeLabeling, H: SimpleGraph) -> bool:
    """True when no role swap strictly lowers |c(H)|."""
    total = subgraph_sum(labeling, H)
    iu, iv = np.triu_indices(H.n, 1)
    return bool(np.all(np.abs(total + all_swap_deltas(labeling, H)[iu, iv]) >= abs(total)))


def degree_weighted_sum(labeling: EdgeLabeling, H: SimpleGraph) -> int:
    """Sum over all pairs uv of (d(u) + d(v)) c(uv); zero for regular H and zero-sum c."""
    deg = np.asarray(H.degrees, dtype=np.int64)
    c = labeling.matrix.astype(np.int64)
    return int(((deg[:, None] + deg[None, :]) * c).sum()) // 2


def random_regular_subgraph(n: int, degree: int, seed: int) -> SpanningSubgraph:
    """Random ``degree``-regular spanning subgraph for degree in {1, 2, 3}.

    Degree 1 is a random perfect matching, degree 2 a random union of cycles
    (each of length >= 3), degree 3 a configuration-model pairing retried
    until simple.
    """
    rng = make_rng(seed)
    if degree == 1:
        match = gen_forest(n, "perfect_matching")
        perm = Embedding(tuple(int(x) + 1 for x in rng.permutation(n)))
        return SpanningSubgraph(n, perm.image_edges(match))
    if degree == 2:
        if n < 3:
            raise ValueError("a 2-regular graph needs n >= 3")
        order = [int(x) + 1 for x in rng.permutation(n)]
        sizes = []
        left = n
        while left:
            size = left if left < 6 else int(rng.integers(3, left - 2))
            sizes.append(size)
            left -= size
        edges = []
        start = 0
        for size in sizes:
            cyc = order[start : start + size]
            edges.extend(zip(cyc, cyc[1:] + cyc[:1]))
            start += size
        return SpanningSubgraph(n, edges)
    if degree == 3:
        if n % 2 or n < 4:
            raise ValueError("a 3-regular graph needs even n >= 4")
        while True:
            stubs = rng.permutation(np.repeat(np.arange(1, n + 1), 3)).reshape(-1, 2)
            pairs = {(min(a, b), max(a, b)) for a, b in stubs.tolist()}
            if len(pairs) == len(stubs) and all(a != b for a, b in pairs):
                return SpanningSubgraph(n, pairs)
    raise ValueError(f"unsupported degree {degree}")


def parse_subgraph(text: str) -> SpanningSubgraph:
    return SpanningSubgraph.from_graph(parse_graph(text))
