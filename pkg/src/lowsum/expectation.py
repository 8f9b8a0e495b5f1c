"""Exact conditional expectation of a random copy sum given a placed prefix.

A uniformly random permutation pi places F-vertex ``order[j]`` on K-vertex
``pi(order[j])``.  Conditioned on the first k placements ``i_1..i_k``, the
expected copy sum splits into three parts:

* the labels of F-edges with both ends placed (``c_prefix``),
* for every placed step j, its ``d_k(j)`` F-edges into the unplaced part,
  each with expected label ``S_k(j) / (n-k)`` where ``S_k(j)`` sums the
  labels from ``i_j`` into the unplaced K-vertices,
* the ``m_k`` F-edges among unplaced F-vertices, each with expected label
  ``T_k / C(n-k, 2)`` where ``T_k`` sums the labels inside the unplaced part.

Values are :class:`fractions.Fraction`; nothing on the decision path touches
floating point.  :class:`ExpectationState` keeps enough running sums that all
candidates of one step are scored in O(n) numpy work, with every score sharing
one integer denominator so the argmin is an integer comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import AlreadyPlaced, DimensionMismatch, DuplicateInPrefix, PrefixComplete
from .graphs import EdgeLabeling, SpanningForest, VertexOrdering, check_dimensions

ExactValue = Fraction


def _combine(c_prefix: int, star: int, clique: int, m_rest: int, r: int) -> Fraction:
    """c_prefix + star/r + clique*m_rest/C(r,2), with vacuous terms set to 0."""
    value = Fraction(c_prefix)
    if r >= 1:
        value += Fraction(star, r)
    if r >= 2 and m_rest:
        value += Fraction(2 * clique * m_rest, r * (r - 1))
    return value


def _step_scale(r: int) -> tuple[int, int, int]:
    """Common denominator and multipliers of the star/clique terms for r unplaced."""
    if r >= 2:
        return r * (r - 1), r - 1, 2
    if r == 1:
        return 1, 1, 0
    return 1, 0, 0


@dataclass(frozen=True)
class CandidateEvaluation:
    p: int
    d1: int
    d2: int
    c1: int
    value: Fraction


class ExpectationState:
    """Incremental state for E[i_1, ..., i_k].

    Public vertex arguments are 1-indexed K-vertices.  Per-step arrays are
    indexed by embedding step ``j`` (0-based), per-vertex arrays by 0-based
    K-vertex.
    """

    def __init__(self, labeling: EdgeLabeling, forest: SpanningForest, ordering: VertexOrdering):
        n = check_dimensions(labeling, forest, ordering)
        self.labeling = labeling
        self.forest = forest
        self.ordering = ordering
        self.n = n
        self._c = labeling.matrix.astype(np.int64)
        # F-neighbours of each step's vertex, as step indices
        pos = ordering.position
        self._nbr_steps = tuple(
            tuple(sorted(pos[x] for x in forest.adj0[u - 1])) for u in ordering.order
        )
        self.k = 0
        self.prefix: list[int] = []
        self.placed = np.zeros(n, dtype=bool)
        self.c_prefix = 0
        self.residual_degree = np.zeros(n, dtype=np.int64)
        self.m_k = forest.m
        # rowsum[q] = sum of labels from q into the unplaced set; S_k(j) = rowsum[i_j]
        self.rowsum = self._c.sum(axis=1)
        self.T = labeling.total_sum
        # weighted[q] = sum_j d_k(j) * c(i_j, q)
        self.weighted = np.zeros(n, dtype=np.int64)
        # star numerator sum_j S_k(j) d_k(j)
        self.star = 0

    # -- derived fields -------------------------------------------------

    @property
    def residual_star_sum(self) -> np.ndarray:
        """S_k(j) for placed steps j = 0..k-1."""
        return self.rowsum[np.asarray(self.prefix, dtype=np.intp) - 1] if self.prefix else np.zeros(0, np.int64)

    @property
    def residual_clique_sum(self) -> int:
        """T_k, the label sum inside the unplaced K-vertices."""
        return self.T

    def unplaced(self) -> list[int]:
        return [int(q) + 1 for q in np.flatnonzero(~self.placed)]

    def snapshot(self) -> dict:
        """Every field, as plain Python values, for comparing two states."""
        k = self.k
        return {
            "k": k,
            "prefix": tuple(self.prefix),
            "c_prefix": int(self.c_prefix),
            "residual_degree": tuple(int(x) for x in self.residual_degree[:k]),
            "m_k": int(self.m_k),
            "residual_star_sum": tuple(int(x) for x in self.residual_star_sum),
            "residual_clique_sum": int(self.T),
            "weighted": tuple(int(x) for x in self.weighted[~self.placed]),
            "star": int(self.star),
        }

    def copy(self) -> ExpectationState:
        other = object.__new__(ExpectationState)
        other.__dict__.update(self.__dict__)
        other.prefix = list(self.prefix)
        for name in ("placed", "residual_degree", "rowsum", "weighted"):
            setattr(other, name, getattr(self, name).copy())
        return other

    def expectation(self) -> Fraction:
        return _combine(self.c_prefix, self.star, self.T, self.m_k, self.n - self.k)

    # -- one step ---------------------------------------------------------

    def _check_candidate(self, p: int) -> None:
        if self.k >= self.n:
            raise PrefixComplete("all vertices are already placed")
        if not 1 <= p <= self.n:
            raise DimensionMismatch(f"vertex {p} outside 1..{self.n}")
        if self.placed[p - 1]:
            raise AlreadyPlaced(f"K-vertex {p} is already placed")

    def _step_parts(self) -> tuple[tuple[int, ...], int, int, int]:
        nbrs = tuple(j for j in self._nbr_steps[self.k] if j < self.k)
        d1 = len(nbrs)
        d2 = len(self._nbr_steps[self.k]) - d1
        pinned = int(sum(self.rowsum[self.prefix[j] - 1] for j in nbrs))
        return nbrs, d1, d2, pinned

    def evaluate_candidate(self, p: int) -> CandidateEvaluation:
        """Exact E[i_1..i_k, p] in O(d_F) work."""
        self._check_candidate(p)
        nbrs, d1, d2, pinned = self._step_parts()
        q = p - 1
        c1 = int(sum(self._c[self.prefix[j] - 1, q] for j in nbrs))
        star = self.star - pinned - int(self.weighted[q]) + c1 + int(self.rowsum[q]) * d2
        clique = self.T - int(self.rowsum[q])
        value = _combine(self.c_prefix + c1, star, clique, self.m_k - d2, self.n - self.k - 1)
        return CandidateEvaluation(p, d1, d2, c1, value)

    def candidate_numerators(self) -> tuple[np.ndarray, np.ndarray, int]:
        """Scaled values of every candidate at the current step.

        Returns ``(candidates, numerators, denominator)`` where candidate
        ``candidates[i]`` (1-based, ascending) has E = numerators[i] / denominator.
        """
        if self.k >= self.n:
            raise PrefixComplete("all vertices are already placed")
        nbrs, _, d2, pinned = self._step_parts()
        cand = np.flatnonzero(~self.placed)
        c1 = self._c1_vector(nbrs)[cand]
        rs = self.rowsum[cand]
        star = self.star - pinned - self.weighted[cand] + c1 + rs * d2
        clique = self.T - rs
        den, star_mul, clique_mul = _step_scale(self.n - self.k - 1)
        m_rest = self.m_k - d2
        num = (self.c_prefix + c1) * den + star * star_mul + clique * (clique_mul * m_rest)
        return cand + 1, num, den

    def _c1_vector(self, nbrs: Sequence[int]) -> np.ndarray:
        if not nbrs:
            return np.zeros(self.n, dtype=np.int64)
        rows = np.asarray([self.prefix[j] - 1 for j in nbrs], dtype=np.intp)
        return self._c[rows].sum(axis=0)

    def place(self, p: int) -> ExpectationState:
        """Place K-vertex ``p`` at the next step, in place; returns self."""
        self._check_candidate(p)
        nbrs, _, d2, pinned = self._step_parts()
        q = p - 1
        c1vec = self._c1_vector(nbrs)
        c1 = int(c1vec[q])
        self.star = self.star - pinned - int(self.weighted[q]) + c1 + int(self.rowsum[q]) * d2
        self.c_prefix += c1
        for j in nbrs:
            self.residual_degree[j] -= 1
        self.residual_degree[self.k] = d2
        self.weighted += d2 * self._c[q] - c1vec
        self.T -= int(self.rowsum[q])
        self.rowsum -= self._c[:, q]
        self.m_k -= d2
        self.placed[q] = True
        self.prefix.append(p)
        self.k += 1
        return self

    @classmethod
    def from_prefix(
        cls,
        labeling: EdgeLabeling,
        forest: SpanningForest,
        ordering: VertexOrdering,
        prefix: Sequence[int],
    ) -> ExpectationState:
        """Build the state for ``prefix`` directly, without the place() chain."""
        state = cls(labeling, forest, ordering)
        _check_prefix(prefix, state.n)
        n, k = state.n, len(prefix)
        c = state._c
        placed = np.zeros(n, dtype=bool)
        idx = np.asarray(prefix, dtype=np.intp) - 1
        placed[idx] = True
        state.k = k
        state.prefix = list(prefix)
        state.placed = placed
        state.rowsum = c[:, ~placed].sum(axis=1)
        state.T = int(c[np.ix_(~placed, ~placed)].sum()) // 2
        deg = np.zeros(n, dtype=np.int64)
        c_prefix = 0
        m_k = 0
        for j in range(n):
            for x in state._nbr_steps[j]:
                if j < k and x < k and j < x:
                    c_prefix += int(c[prefix[j] - 1, prefix[x] - 1])
                if j < k and x >= k:
                    deg[j] += 1
                if j >= k and x >= k and j < x:
                    m_k += 1
        state.c_prefix = c_prefix
        state.residual_degree = deg
        state.m_k = m_k
        state.weighted = (deg[:k, None] * c[idx]).sum(axis=0) if k else np.zeros(n, dtype=np.int64)
        state.star = int((state.rowsum[idx] * deg[:k]).sum()) if k else 0
        return state


def _check_prefix(prefix: Sequence[int], n: int) -> None:
    if len(prefix) > n:
        raise DimensionMismatch(f"prefix of length {len(prefix)} exceeds n = {n}")
    for x in prefix:
        if not 1 <= x <= n:
            raise DimensionMismatch(f"vertex {x} outside 1..{n}")
    if len(set(prefix)) != len(prefix):
        raise DuplicateInPrefix(f"prefix {tuple(prefix)} repeats a vertex")


def init_state(labeling: EdgeLabeling, forest: SpanningForest, ordering: VertexOrdering) -> ExpectationState:
    return ExpectationState(labeling, forest, ordering)


def expectation(state: ExpectationState) -> Fraction:
    return state.expectation()


def evaluate_candidate(state: ExpectationState, p: int) -> CandidateEvaluation:
    return state.evaluate_candidate(p)


def place(state: ExpectationState, p: int) -> ExpectationState:
    """Functional form of :meth:`ExpectationState.place`; ``state`` is left untouched."""
    return state.copy().place(p)


def expectation_direct(
    labeling: EdgeLabeling,
    forest: SpanningForest,
    ordering: VertexOrdering,
    prefix: Sequence[int],
) -> Fraction:
    """Reference evaluation of E[prefix] from scratch, term by term, in O(n^2)."""
    n = check_dimensions(labeling, forest, ordering)
    _check_prefix(prefix, n)
    k = len(prefix)
    lab = labeling.label
    step_of = {u: j for j, u in enumerate(ordering.order)}
    image = {ordering.order[j]: prefix[j] for j in range(k)}
    rest = [x for x in range(1, n + 1) if x not in set(prefix)]
    r = n - k

    fixed = 0
    for u, v in forest.edges:
        if u in image and v in image:
            fixed += lab(image[u], image[v])

    star = Fraction(0)
    for j in range(k):
        u = ordering.order[j]
        out = sum(1 for x in forest.neighbors(u) if step_of[x] >= k)
        if out:
            star += Fraction(sum(lab(prefix[j], y) for y in rest), r) * out

    clique = Fraction(0)
    m_rest = sum(1 for u, v in forest.edges if step_of[u] >= k and step_of[v] >= k)
    if m_rest and r >= 2:
        inner = sum(lab(rest[a], rest[b]) for a in range(r) for b in range(a + 1, r))
        clique = Fraction(inner * m_rest * 2, r * (r - 1))
    return fixed + star + clique
