"""Brute-force ground truth over all n! embeddings, for small n only."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import TooLarge
from .expectation import _check_prefix
from .graphs import EdgeLabeling, SpanningForest, VertexOrdering, check_dimensions

DEFAULT_CAP = 8
HARD_CAP = 10


@dataclass(frozen=True)
class SumDistribution:
    counts: dict[int, int]
    n_factorial: int

    def mean(self) -> Fraction:
        return Fraction(sum(s * c for s, c in self.counts.items()), self.n_factorial)

    def min_abs(self) -> int:
        return min(abs(s) for s in self.counts)

    def to_json(self) -> str:
        return json.dumps({str(s): self.counts[s] for s in sorted(self.counts)})

    @classmethod
    def from_json(cls, text: str) -> SumDistribution:
        counts = {int(s): int(c) for s, c in json.loads(text).items()}
        return cls(counts, sum(counts.values()))


def _check_cap(n: int, cap: int) -> None:
    if cap > HARD_CAP:
        raise TooLarge(f"cap {cap} exceeds the hard limit {HARD_CAP}")
    if n > cap:
        raise TooLarge(f"n = {n} exceeds the enumeration cap {cap}")


def _completion_sums(
    labeling: EdgeLabeling,
    forest: SpanningForest,
    ordering: VertexOrdering,
    prefix: Sequence[int],
) -> np.ndarray:
    """Copy sums of every completion of ``prefix``, one per permutation.

    Completions are processed in chunks keyed by the next placed vertex so
    memory stays at (n-k-1)! rows.
    """
    n = labeling.n
    k = len(prefix)
    rest = [x - 1 for x in range(1, n + 1) if x not in set(prefix)]
    c = labeling.matrix.astype(np.int64)
    # step index of each F-vertex; edges rewritten in step coordinates
    pos = ordering.position
    e = np.asarray([(pos[u - 1], pos[v - 1]) for u, v in forest.edges], dtype=np.intp).reshape(-1, 2)
    head = np.asarray(prefix, dtype=np.intp) - 1
    chunks = []
    firsts = rest if len(rest) > 1 else [None]
    for first in firsts:
        tail = [x for x in rest if x != first]
        rows = list(itertools.permutations(tail))
        perms = np.asarray(rows, dtype=np.intp).reshape(len(rows), len(tail))
        cols = [np.broadcast_to(head, (len(perms), k))]
        if first is not None:
            cols.append(np.full((len(perms), 1), first, dtype=np.intp))
        cols.append(perms)
        images = np.concatenate(cols, axis=1)
        if len(e):
            chunks.append(c[images[:, e[:, 0]], images[:, e[:, 1]]].sum(axis=1))
        else:
            chunks.append(np.zeros(len(images), dtype=np.int64))
    return np.concatenate(chunks)


def enumerate_sums(labeling: EdgeLabeling, forest: SpanningForest, cap: int = DEFAULT_CAP) -> SumDistribution:
    n = check_dimensions(labeling, forest)
    _check_cap(n, cap)
    sums = _completion_sums(labeling, forest, VertexOrdering.natural(n), ())
    values, counts = np.unique(sums, return_counts=True)
    return SumDistribution({int(v): int(c) for v, c in zip(values, counts)}, math.factorial(n))


def min_abs_sum(labeling: EdgeLabeling, forest: SpanningForest, cap: int = DEFAULT_CAP) -> int:
    return enumerate_sums(labeling, forest, cap).min_abs()


def conditional_expectation_bruteforce(
    labeling: EdgeLabeling,
    forest: SpanningForest,
    ordering: VertexOrdering,
    prefix: Sequence[int],
    cap: int = DEFAULT_CAP,
) -> Fraction:
    """Mean copy sum over all (n-k)! completions of ``prefix``."""
    n = check_dimensions(labeling, forest, ordering)
    _check_cap(n, cap)
    _check_prefix(prefix, n)
    sums = _completion_sums(labeling, forest, ordering, prefix)
    return Fraction(int(sums.sum()), len(sums))

