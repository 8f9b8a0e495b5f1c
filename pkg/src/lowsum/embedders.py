"""Embedding algorithms built on the conditional-expectation engine.

* :func:`greedy_embed` keeps |E[i_1..i_k]| as small as possible at every step.
* :func:`monotone_embed` keeps E non-decreasing (or non-increasing), which
  ends at a copy with sum >= 0 (or <= 0) when the labeling is zero-sum.
* :func:`transposition_walk` joins two copies by role swaps through a vertex of
  forest degree <= 1, so consecutive copies differ in at most Delta+1 edges
  each way; :func:`prop2_embed` walks from the >= 0 copy to the <= 0 copy and
  returns the best one, which always has |sum| <= Delta+1.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import EpsilonOutOfRange, NotZeroSum
from .expectation import ExpectationState
from .graphs import (
    EdgeLabeling,
    Embedding,
    SpanningForest,
    VertexOrdering,
    check_dimensions,
    copy_sum,
)


def as_fraction(value) -> Fraction:
    """Exact conversion; floats go through their decimal repr so 0.2 means 1/5."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class GreedyConfig:
    epsilon: Fraction = Fraction(1, 5)
    ordering: Optional[VertexOrdering] = None  # overrides reorder_forest when given

    def __post_init__(self) -> None:
        eps = as_fraction(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if not 0 < eps < Fraction(1, 4):
            raise EpsilonOutOfRange(f"epsilon must lie in (0, 1/4), got {eps}")

    def prefix_length(self, n: int) -> int:
        return min(n, int(self.epsilon * n))

    @property
    def additive_constant(self) -> Fraction:
        return 8 / self.epsilon + 4

    @property
    def slope(self) -> Fraction:
        return Fraction(3, 4) + 327 * self.epsilon

    def theorem_bound(self, max_degree: int) -> Fraction:
        return self.slope * max_degree + self.additive_constant


@dataclass(frozen=True)
class EmbedResult:
    embedding: Embedding
    c_value: int
    trace: tuple[Fraction, ...]
    certificates: dict
    algorithm: str
    ordering: VertexOrdering
    runtime: float = field(default=0.0, compare=False)

    @property
    def step_deltas(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.trace, self.trace[1:]))

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "c_value": self.c_value,
            "embedding": list(self.embedding.pi),
            "ordering": list(self.ordering.order),
            "trace": [str(x) for x in self.trace],
            "certificates": self.certificates,
        }


@dataclass(frozen=True)
class WalkResult:
    pivot: int
    swaps: tuple[int, ...]  # the pivot trades roles with swaps[i] at step i+1
    sums: tuple[int, ...]
    best_index: int
    best_embedding: Embedding
    start: Embedding

    @property
    def length(self) -> int:
        return len(self.swaps)

    def embeddings(self) -> list[Embedding]:
        out = [self.start]
        for x in self.swaps:
            out.append(out[-1].swap_roles(self.pivot, x))
        return out


# -- vertex ordering ---------------------------------------------------------


def satisfies_ordering_conditions(forest: SpanningForest, ordering: VertexOrdering, epsilon) -> bool:
    """Check that early vertices have <= 1 earlier neighbour and late ones degree <= 2/epsilon."""
    eps = as_fraction(epsilon)
    pos = ordering.position
    for j, u in enumerate(ordering.order):
        if j < ordering.t:
            if sum(1 for x in forest.adj0[u - 1] if pos[x] < j) > 1:
                return False
        elif forest.degree(u) > 2 / eps:
            return False
    return True


def reorder_forest(forest: SpanningForest, epsilon) -> VertexOrdering:
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise EpsilonOutOfRange(f"epsilon must be positive, got {eps}")
    n = forest.n
    t = min(n, int(eps * n))
    deg = forest.degrees
    by_degree = sorted(range(1, n + 1), key=lambda u: (-deg[u - 1], u))
    heavy = [u for u in by_degree if deg[u - 1] > 2 / eps]
    if len(heavy) > t:
        # impossible for a forest; kept as a guard against a broken invariant
        raise AssertionError(f"{len(heavy)} vertices of degree > 2/epsilon exceed t = {t}")
    chosen = set(heavy)
    for u in by_degree:
        if len(chosen) >= t:
            break
        chosen.add(u)

    prefix: list[int] = []
    seen: set[int] = set()
    for root in by_degree:
        if root not in chosen or root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            prefix.append(u)
            for x in forest.neighbors(u):
                if x in chosen and x not in seen:
                    seen.add(x)
                    queue.append(x)
    suffix = [u for u in range(1, n + 1) if u not in chosen]
    return VertexOrdering(tuple(prefix + suffix), t)


# -- sequential embedders -----------------------------------------------------


def _run_sequential(labeling, forest, ordering, choose) -> tuple[Embedding, list[Fraction]]:
    state = ExpectationState(labeling, forest, ordering)
    trace = [state.expectation()]
    for _ in range(state.n):
        cand, num, den = state.candidate_numerators()
        i = choose(num)
        state.place(int(cand[i]))
        trace.append(Fraction(int(num[i]), den))
    pi = [0] * state.n
    for j, x in enumerate(state.prefix):
        pi[ordering.order[j] - 1] = x
    return Embedding(tuple(pi)), trace


def _certificates(labeling: EdgeLabeling, forest: SpanningForest, c_value: int, config: GreedyConfig) -> dict:
    if not labeling.is_zero_sum():
        return {}
    return {
        "delta_plus_1": abs(c_value) <= forest.max_degree + 1,
        "theorem_bound": abs(c_value) <= config.theorem_bound(forest.max_degree),
    }


def greedy_embed(labeling: EdgeLabeling, forest: SpanningForest, config: GreedyConfig = GreedyConfig()) -> EmbedResult:
    """Place vertices one by one, each time minimizing |E|; ties go to the smallest K-vertex."""
    start = time.perf_counter()
    check_dimensions(labeling, forest)
    ordering = config.ordering or reorder_forest(forest, config.epsilon)
    check_dimensions(forest, ordering)
    # np.argmin returns the first minimum, i.e. the smallest candidate index
    emb, trace = _run_sequential(labeling, forest, ordering, lambda num: int(np.argmin(np.abs(num))))
    c_value = int(trace[-1])
    return EmbedResult(
        emb, c_value, tuple(trace), _certificates(labeling, forest, c_value, config), "greedy", ordering,
        time.perf_counter() - start,
    )


def monotone_embed(labeling: EdgeLabeling, forest: SpanningForest, sign: str) -> EmbedResult:
    """Keep E monotone: ``sign='+'`` maximizes each step's value, ``'-'`` minimizes it."""
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    if not labeling.is_zero_sum():
        raise NotZeroSum(f"labeling sums to {labeling.total_sum}, not 0")
    start = time.perf_counter()
    n = check_dimensions(labeling, forest)
    ordering = VertexOrdering.natural(n)
    pick = (lambda num: int(np.argmax(num))) if sign == "+" else (lambda num: int(np.argmin(num)))
    emb, trace = _run_sequential(labeling, forest, ordering, pick)
    c_value = int(trace[-1])
    return EmbedResult(
        emb, c_value, tuple(trace), {"sign_ok": c_value >= 0 if sign == "+" else c_value <= 0},
        f"monotone{sign}", ordering, time.perf_counter() - start,
    )


# -- transposition walk -------------------------------------------------------


def walk_pivot(forest: SpanningForest) -> int:
    return next(u for u in range(1, forest.n + 1) if forest.degree(u) <= 1)


def _swap_delta(labeling: EdgeLabeling, forest: SpanningForest, pi: list[int], w: int, x: int) -> int:
    """Change of the copy sum when F-vertices w and x trade K-vertices."""
    c = labeling.matrix
    a, b = pi[w - 1] - 1, pi[x - 1] - 1
    delta = 0
    for y in forest.adj0[w - 1]:
        if y != x - 1:
            z = pi[y] - 1
            delta += int(c[b, z]) - int(c[a, z])
    for y in forest.adj0[x - 1]:
        if y != w - 1:
            z = pi[y] - 1
            delta += int(c[a, z]) - int(c[b, z])
    return delta


def transposition_walk(
    labeling: EdgeLabeling, forest: SpanningForest, start: Embedding, goal: Embedding
) -> WalkResult:
    """Walk from ``start`` to ``goal`` by swapping the pivot's role with one vertex per step.

    Sorting with the pivot slot as buffer: if the pivot holds a K-vertex that
    belongs elsewhere, send it there; otherwise park the pivot on the first
    misplaced slot.  Each cycle of length L costs L+1 swaps (L-1 for the cycle
    through the pivot), so the walk has fewer than 3n/2 steps.
    """
    n = check_dimensions(labeling, forest, start, goal)
    w = walk_pivot(forest)
    slot_of = {x: u for u, x in enumerate(goal.pi, start=1)}
    cur = list(start.pi)
    total = copy_sum(labeling, forest, start)
    sums = [total]
    swaps: list[int] = []
    scan = 1
    while True:
        if cur[w - 1] != goal(w):
            x = slot_of[cur[w - 1]]
        else:
            while scan <= n and cur[scan - 1] == goal(scan):
                scan += 1
            if scan > n:
                break
            x = scan
        total += _swap_delta(labeling, forest, cur, w, x)
        cur[w - 1], cur[x - 1] = cur[x - 1], cur[w - 1]
        swaps.append(x)
        sums.append(total)
    best = min(range(len(sums)), key=lambda i: (abs(sums[i]), i))
    emb = start
    for x in swaps[:best]:
        emb = emb.swap_roles(w, x)
    return WalkResult(w, tuple(swaps), tuple(sums), best, emb, start)


def replay_trace(labeling: EdgeLabeling, forest: SpanningForest, ordering: VertexOrdering, emb: Embedding) -> tuple[Fraction, ...]:
    """E after each step when the vertices are placed as in ``emb``."""
    state = ExpectationState(labeling, forest, ordering)
    trace = [state.expectation()]
    for u in ordering.order:
        state.place(emb(u))
        trace.append(state.expectation())
    return tuple(trace)


def prop2_embed(labeling: EdgeLabeling, forest: SpanningForest) -> EmbedResult:
    """Best copy on the walk from the monotone(+) copy to the monotone(-) copy."""
    start = time.perf_counter()
    plus = monotone_embed(labeling, forest, "+")
    minus = monotone_embed(labeling, forest, "-")
    walk = transposition_walk(labeling, forest, plus.embedding, minus.embedding)
    emb = walk.best_embedding
    c_value = walk.sums[walk.best_index]
    ordering = VertexOrdering.natural(forest.n)
    return EmbedResult(
        emb,
        c_value,
        replay_trace(labeling, forest, ordering, emb),
        {"delta_plus_1": abs(c_value) <= forest.max_degree + 1, "walk_length": walk.length},
        "prop2",
        ordering,
        time.perf_counter() - start,
    )


def best_embed(labeling: EdgeLabeling, forest: SpanningForest, config: GreedyConfig = GreedyConfig()) -> EmbedResult:
    """Greedy or prop2, whichever has the smaller |c| (ties keep greedy)."""
    if not labeling.is_zero_sum():
        raise NotZeroSum(f"labeling sums to {labeling.total_sum}, not 0")
    start = time.perf_counter()
    greedy = greedy_embed(labeling, forest, config)
    prop2 = prop2_embed(labeling, forest)
    chosen = greedy if abs(greedy.c_value) <= abs(prop2.c_value) else prop2
    certs = _certificates(labeling, forest, chosen.c_value, config)
    certs["source"] = chosen.algorithm
    return EmbedResult(
        chosen.embedding, chosen.c_value, chosen.trace, certs, "best", chosen.ordering,
        time.perf_counter() - start,
    )
