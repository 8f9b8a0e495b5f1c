"""Averaging-gap and balanced-vertex checks, the positive graph, and greedy trace diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .embedders import EmbedResult, GreedyConfig, as_fraction
from .errors import BadParameters, BadValue, PreconditionViolated, TraceMismatch, WitnessNotFound
from .graphs import EdgeLabeling, SpanningForest


@dataclass(frozen=True)
class AveragingGap:
    gap: Fraction
    bound: Fraction
    holds: bool


def check_averaging_gap(x: Sequence[int], q: int) -> AveragingGap:
    """Compare the mean of all p values with the mean of the first p-q against 2q/p."""
    raw = np.asarray(x).reshape(-1)
    p = len(raw)
    if not 0 < q < p:
        raise BadParameters(f"need 0 < q < p, got q={q}, p={p}")
    if not np.all((raw == 1) | (raw == -1)):
        raise BadValue("all values must be +1 or -1")
    arr = raw.astype(np.int64)
    gap = abs(Fraction(int(arr.sum()), p) - Fraction(int(arr[: p - q].sum()), p - q))
    bound = Fraction(2 * q, p)
    return AveragingGap(gap, bound, gap <= bound)


class VertexSubgraph:
    """Simple graph on an arbitrary subset of [n]."""

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]]):
        self.vertices = tuple(sorted(vertices))
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        m = 0
        for u, v in edges:
            if u == v or u not in adj or v not in adj:
                raise BadParameters(f"edge ({u}, {v}) not on the vertex set")
            if v not in adj[u]:
                adj[u].add(v)
                adj[v].add(u)
                m += 1
        self.adjacency = {v: frozenset(a) for v, a in adj.items()}
        self.m = m

    @property
    def order(self) -> int:
        return len(self.vertices)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


def build_positive_graph(labeling: EdgeLabeling, excluded: Iterable[int] = ()) -> VertexSubgraph:
    """Graph on the surviving vertices whose edges are the +1 pairs."""
    gone = set(excluded)
    keep = [v for v in range(1, labeling.n + 1) if v not in gone]
    mat = labeling.matrix
    edges = [
        (u, v)
        for i, u in enumerate(keep)
        for v in keep[i + 1 :]
        if mat[u - 1, v - 1] == 1
    ]
    return VertexSubgraph(keep, edges)


def balanced_window(order: int, epsilon) -> tuple[Fraction, Fraction]:
    eps = as_fraction(epsilon)
    return (Fraction(1, 4) - eps) * order, (Fraction(3, 4) + eps) * order - 1


def find_balanced_vertex(G: VertexSubgraph, epsilon) -> int:
    """Smallest vertex whose degree lies in [(1/4 - eps) n, (3/4 + eps) n - 1]."""
    eps = as_fraction(epsilon)
    n = G.order
    pairs = Fraction(n * (n - 1), 2)
    if eps * n < 10:
        raise PreconditionViolated(f"epsilon * n = {eps * n} < 10")
    if abs(G.m - pairs / 2) > eps / 10 * pairs:
        raise PreconditionViolated(f"size {G.m} is not within (epsilon/10) C(n,2) of C(n,2)/2")
    lo, hi = balanced_window(n, eps)
    for v in G.vertices:
        if lo <= G.degree(v) <= hi:
            return v
    degrees = {v: G.degree(v) for v in G.vertices}
    raise WitnessNotFound(f"no degree in [{lo}, {hi}]; n={n}, m={G.m}, epsilon={eps}, degrees={degrees}")


@dataclass(frozen=True)
class TraceReport:
    epsilon: Fraction
    max_degree: int
    step_deltas: tuple[Fraction, ...]
    step_bound: Fraction
    pairing_bound: Fraction
    value_bound: Fraction
    step_flags: tuple[bool, ...]
    pairing_flags: tuple[bool, ...]
    value_flags: tuple[bool, ...]
    note: str

    @property
    def max_step_delta(self) -> Fraction:
        return max((abs(d) for d in self.step_deltas), default=Fraction(0))

    @property
    def flagged(self) -> bool:
        return any(self.step_flags) or any(self.pairing_flags) or any(self.value_flags)

    def to_dict(self) -> dict:
        return {
            "epsilon": str(self.epsilon),
            "max_degree": self.max_degree,
            "max_step_delta": str(self.max_step_delta),
            "step_bound": str(self.step_bound),
            "pairing_bound": str(self.pairing_bound),
            "value_bound": str(self.value_bound),
            "flagged_steps": [k for k, f in enumerate(self.step_flags) if f],
            "flagged_pairing_steps": [k for k, f in enumerate(self.pairing_flags) if f],
            "flagged_values": [k for k, f in enumerate(self.value_flags) if f],
            "note": self.note,
        }


def analyze_trace(result: EmbedResult, forest: SpanningForest, config: GreedyConfig) -> TraceReport:
    """Compare a greedy trace with the per-step and per-value bounds.

    Diagnostic only: the per-step bounds concern the existence of some good
    candidate and need n large in terms of epsilon, so a flag is a data point
    rather than a failure.
    """
    if len(result.trace) != forest.n + 1:
        raise TraceMismatch(f"trace has {len(result.trace)} entries, expected {forest.n + 1}")
    eps = config.epsilon
    delta = forest.max_degree
    const = config.additive_constant
    step_bound = (1 + Fraction(16, 3) * eps) * delta + const
    pairing_bound = (Fraction(1, 2) + 327 * eps) * delta + const
    value_bound = config.theorem_bound(delta)
    deltas = result.step_deltas
    return TraceReport(
        epsilon=eps,
        max_degree=delta,
        step_deltas=deltas,
        step_bound=step_bound,
        pairing_bound=pairing_bound,
        value_bound=value_bound,
        step_flags=tuple(abs(d) > step_bound for d in deltas),
        pairing_flags=tuple(abs(d) > pairing_bound for d in deltas),
        value_flags=tuple(abs(v) > value_bound for v in result.trace),
        note="the pairing bound is derived with the balanced-vertex window taken at 320*epsilon/3; "
        "this report uses epsilon as given",
    )
