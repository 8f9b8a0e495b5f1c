"""Labeled complete graphs, spanning forests and embeddings.

All public interfaces speak 1-indexed vertices ``1..n``.  Internally the
label matrix and adjacency lists are 0-indexed.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InfeasibleKind,
    InfeasibleZeroSum,
    MalformedInput,
)

PRNG_NAME = "numpy.random.PCG64/v1"

FOREST_KINDS = ("path", "star", "perfect_matching", "random_tree", "random_forest", "binary_tree")
LABELING_PATTERNS = ("uniform", "block_adversarial")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        """Merge the classes of x and y; False if they were already merged."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        return True


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class EdgeLabeling:
    """A +-1 labeling of the edges of K_n.

    ``matrix`` is a read-only symmetric int8 array with zero diagonal;
    ``matrix[u-1, v-1]`` is the label of the edge uv.
    """

    __slots__ = ("n", "matrix", "total_sum")

    def __init__(self, matrix: np.ndarray):
        matrix = np.array(matrix, dtype=np.int8)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise MalformedInput("label matrix must be square")
        n = matrix.shape[0]
        if not np.array_equal(matrix, matrix.T):
            raise MalformedInput("label matrix must be symmetric")
        if np.any(np.diagonal(matrix) != 0):
            raise MalformedInput("label matrix must have a zero diagonal")
        off = matrix[np.triu_indices(n, 1)]
        if np.any((off != 1) & (off != -1)):
            raise MalformedInput("labels must be +1 or -1")
        matrix.setflags(write=False)
        self.n = n
        self.matrix = matrix
        self.total_sum = int(off.sum(dtype=np.int64))

    def label(self, u: int, v: int) -> int:
        if u == v:
            raise MalformedInput("no label on a loop")
        return int(self.matrix[u - 1, v - 1])

    def is_zero_sum(self) -> bool:
        return self.total_sum == 0

    @property
    def num_edges(self) -> int:
        return self.n * (self.n - 1) // 2

    def mean(self) -> Fraction:
        """Average label over all edges of K_n (0 when there are no edges)."""
        if self.num_edges == 0:
            return Fraction(0)
        return Fraction(self.total_sum, self.num_edges)

    def triples(self) -> list[tuple[int, int, int]]:
        n = self.n
        return [(u, v, int(self.matrix[u - 1, v - 1])) for u in range(1, n + 1) for v in range(u + 1, n + 1)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EdgeLabeling):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.matrix, other.matrix)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"EdgeLabeling(n={self.n}, total_sum={self.total_sum})"


def validate_labeling(n: int, raw: Iterable[tuple[int, int, int]]) -> EdgeLabeling:
    """Build an EdgeLabeling from ``(u, v, s)`` triples covering every pair once."""
    if n < 1:
        raise MalformedInput(f"vertex count must be positive, got {n}")
    matrix = np.zeros((n, n), dtype=np.int8)
    seen = 0
    for u, v, s in raw:
        if not (1 <= u <= n and 1 <= v <= n):
            raise MalformedInput(f"vertex out of range in pair ({u}, {v})")
        if u == v:
            raise MalformedInput(f"loop at vertex {u}")
        if s not in (1, -1):
            raise MalformedInput(f"label {s} on ({u}, {v}) is not +1/-1")
        if matrix[u - 1, v - 1] != 0:
            raise MalformedInput(f"pair ({u}, {v}) labeled twice")
        matrix[u - 1, v - 1] = matrix[v - 1, u - 1] = s
        seen += 1
    if seen != n * (n - 1) // 2:
        raise MalformedInput(f"expected {n * (n - 1) // 2} labeled pairs, got {seen}")
    return EdgeLabeling(matrix)


def gen_zero_sum_labeling(n: int, seed: int, pattern: str = "uniform") -> EdgeLabeling:
    """Random zero-sum labeling of K_n; deterministic in ``(n, seed, pattern)``."""
    num_edges = n * (n - 1) // 2
    if n < 1 or num_edges % 2:
        raise InfeasibleZeroSum(f"K_{n} has {num_edges} edges; a zero-sum labeling needs an even count")
    if pattern not in LABELING_PATTERNS:
        raise MalformedInput(f"unknown labeling pattern {pattern!r}")
    rng = make_rng(seed)
    iu, iv = np.triu_indices(n, 1)
    budget = num_edges // 2
    signs = np.full(num_edges, -1, dtype=np.int8)
    if pattern == "uniform":
        signs[rng.permutation(num_edges)[:budget]] = 1
    else:
        b = -(-n // 2)
        inside = np.flatnonzero((iu < b) & (iv < b))
        outside = np.flatnonzero(~((iu < b) & (iv < b)))
        if len(inside) >= budget:
            signs[rng.permutation(inside)[:budget]] = 1
        else:
            signs[inside] = 1
            signs[rng.permutation(outside)[: budget - len(inside)]] = 1
    matrix = np.zeros((n, n), dtype=np.int8)
    matrix[iu, iv] = signs
    matrix[iv, iu] = signs
    return EdgeLabeling(matrix)


class SimpleGraph:
    """Simple undirected graph on the vertex set [n] (1-indexed)."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 1:
            raise MalformedInput(f"vertex count must be positive, got {n}")
        seen: set[tuple[int, int]] = set()
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise MalformedInput(f"vertex out of range in edge ({u}, {v})")
            if u == v:
                raise MalformedInput(f"loop at vertex {u}")
            e = _pair(u, v)
            if e in seen:
                raise MalformedInput(f"duplicate edge {e}")
            seen.add(e)
            adj[u - 1].append(v - 1)
            adj[v - 1].append(u - 1)
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(seen))
        self.adj0: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj)
        self.degrees: tuple[int, ...] = tuple(len(a) for a in adj)
        self.max_degree = max(self.degrees, default=0)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return tuple(x + 1 for x in self.adj0[u - 1])

    def degree(self, u: int) -> int:
        return self.degrees[u - 1]

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u - 1, v - 1] = a[v - 1, u - 1] = 1
        return a

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimpleGraph):
            return NotImplemented
        return type(self) is type(other) and self.n == other.n and self.edges == other.edges

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, m={self.m}, max_degree={self.max_degree})"


class SpanningForest(SimpleGraph):
    """An acyclic spanning subgraph of K_n; isolated vertices allowed."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        super().__init__(n, edges)
        uf = UnionFind(n)
        for u, v in self.edges:
            if not uf.union(u - 1, v - 1):
                raise MalformedInput(f"edge ({u}, {v}) closes a cycle")


def gen_forest(n: int, kind: str, seed: int = 0) -> SpanningForest:
    if n < 1:
        raise InfeasibleKind(f"vertex count must be positive, got {n}")
    if kind == "path":
        edges = [(i, i + 1) for i in range(1, n)]
    elif kind == "star":
        edges = [(1, v) for v in range(2, n + 1)]
    elif kind == "perfect_matching":
        if n % 2:
            raise InfeasibleKind(f"no perfect matching on {n} vertices")
        edges = [(i, i + 1) for i in range(1, n, 2)]
    elif kind == "binary_tree":
        edges = [(v // 2, v) for v in range(2, n + 1)]
    elif kind in ("random_tree", "random_forest"):
        rng = make_rng(seed)
        edges = _prufer_tree(n, rng)
        if kind == "random_forest":
            keep = rng.random(len(edges)) < 0.5
            edges = [e for e, k in zip(edges, keep) if k]
    else:
        raise InfeasibleKind(f"unknown forest kind {kind!r}")
    return SpanningForest(n, edges)


def _prufer_tree(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Uniform random labeled tree on [n] decoded from a random Pruefer sequence."""
    if n < 2:
        return []
    seq = [int(x) for x in rng.integers(1, n + 1, size=n - 2)]
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append(_pair(leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append(_pair(u, v))
    return sorted(edges)


@dataclass(frozen=True)
class Embedding:
    """Bijection from F-vertices to K-vertices: ``pi[u-1]`` is the K-vertex playing u."""

    pi: tuple[int, ...]

    def __post_init__(self) -> None:
        pi = tuple(int(x) for x in self.pi)
        object.__setattr__(self, "pi", pi)
        if sorted(pi) != list(range(1, len(pi) + 1)):
            raise MalformedInput(f"{pi} is not a permutation of 1..{len(pi)}")

    @classmethod
    def identity(cls, n: int) -> Embedding:
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.pi)

    def __call__(self, u: int) -> int:
        return self.pi[u - 1]

    def inverse(self) -> Embedding:
        inv = [0] * self.n
        for u, x in enumerate(self.pi, start=1):
            inv[x - 1] = u
        return Embedding(tuple(inv))

    def swap_roles(self, u: int, v: int) -> Embedding:
        """Copy in which F-vertices u and v exchange their K-vertices."""
        pi = list(self.pi)
        pi[u - 1], pi[v - 1] = pi[v - 1], pi[u - 1]
        return Embedding(tuple(pi))

    def image_edges(self, graph: SimpleGraph) -> frozenset[tuple[int, int]]:
        return frozenset(_pair(self.pi[u - 1], self.pi[v - 1]) for u, v in graph.edges)


@dataclass(frozen=True)
class VertexOrdering:
    """Order in which F-vertices are embedded; ``order[j]`` is placed at step j+1.

    ``t`` is the length of the low-degeneracy prefix (see ``reorder_forest``).
    """

    order: tuple[int, ...]
    t: int = 0
    position: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        order = tuple(int(x) for x in self.order)
        object.__setattr__(self, "order", order)
        n = len(order)
        if sorted(order) != list(range(1, n + 1)):
            raise MalformedInput(f"{order} is not an ordering of 1..{n}")
        if not 0 <= self.t <= n:
            raise MalformedInput(f"prefix length {self.t} outside [0, {n}]")
        pos = [0] * n
        for j, u in enumerate(order):
            pos[u - 1] = j
        object.__setattr__(self, "position", tuple(pos))

    @classmethod
    def natural(cls, n: int) -> VertexOrdering:
        return cls(tuple(range(1, n + 1)), 0)

    @property
    def n(self) -> int:
        return len(self.order)


def check_dimensions(*objs) -> int:
    sizes = {o.n for o in objs}
    if len(sizes) != 1:
        raise DimensionMismatch(f"vertex counts differ: {sorted(sizes)}")
    return sizes.pop()


def copy_sum(labeling: EdgeLabeling, forest: SimpleGraph, emb: Embedding) -> int:
    """Label sum of the copy of ``forest`` placed by ``emb``."""
    check_dimensions(labeling, forest, emb)
    if not forest.edges:
        return 0
    pi = np.asarray(emb.pi, dtype=np.intp) - 1
    e = np.asarray(forest.edges, dtype=np.intp) - 1
    return int(labeling.matrix[pi[e[:, 0]], pi[e[:, 1]]].sum(dtype=np.int64))


# -- text formats ----------------------------------------------------------


def _content_lines(text: str) -> list[list[str]]:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            rows.append(line.split())
    return rows


def _ints(tokens: Sequence[str], what: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise MalformedInput(f"non-integer token in {what}: {' '.join(tokens)}") from None


def format_labeling(labeling: EdgeLabeling, comments: Sequence[str] = ()) -> str:
    out = [f"# {c}" for c in comments]
    out.append(str(labeling.n))
    out.extend(f"{u} {v} {s:+d}" for u, v, s in labeling.triples())
    return "\n".join(out) + "\n"


def parse_labeling(text: str) -> EdgeLabeling:
    rows = _content_lines(text)
    if not rows or len(rows[0]) != 1:
        raise MalformedInput("labeling file must start with a line holding n")
    (n,) = _ints(rows[0], "header")
    triples = []
    prev = (0, 0)
    for row in rows[1:]:
        if len(row) != 3:
            raise MalformedInput(f"expected 'u v s', got {' '.join(row)!r}")
        u, v, s = _ints(row, "labeling line")
        if u >= v:
            raise MalformedInput(f"pair ({u}, {v}) must be written with u < v")
        if (u, v) <= prev:
            raise MalformedInput(f"pair ({u}, {v}) out of lexicographic order")
        prev = (u, v)
        triples.append((u, v, s))
    return validate_labeling(n, triples)


def format_graph(graph: SimpleGraph) -> str:
    out = [f"{graph.n} {graph.m}"]
    out.extend(f"{u} {v}" for u, v in graph.edges)
    return "\n".join(out) + "\n"


def _parse_graph_rows(text: str) -> tuple[int, list[tuple[int, int]]]:
    rows = _content_lines(text)
    if not rows or len(rows[0]) != 2:
        raise MalformedInput("graph file must start with a line 'n m'")
    n, m = _ints(rows[0], "header")
    edges = []
    for row in rows[1:]:
        if len(row) != 2:
            raise MalformedInput(f"expected 'u v', got {' '.join(row)!r}")
        u, v = _ints(row, "edge line")
        if u >= v:
            raise MalformedInput(f"edge ({u}, {v}) must be written with u < v")
        edges.append((u, v))
    if len(edges) != m:
        raise MalformedInput(f"header announces {m} edges, found {len(edges)}")
    return n, edges


def parse_forest(text: str) -> SpanningForest:
    return SpanningForest(*_parse_graph_rows(text))


def parse_graph(text: str) -> SimpleGraph:
    return SimpleGraph(*_parse_graph_rows(text))


def format_embedding(emb: Embedding) -> str:
    return f"{emb.n}\n{' '.join(map(str, emb.pi))}\n"


def parse_embedding(text: str) -> Embedding:
    rows = _content_lines(text)
    if len(rows) != 2 or len(rows[0]) != 1:
        raise MalformedInput("embedding file must hold 'n' and one line of n images")
    (n,) = _ints(rows[0], "header")
    pi = _ints(rows[1], "embedding line")
    if len(pi) != n:
        raise MalformedInput(f"expected {n} images, got {len(pi)}")
    return Embedding(tuple(pi))
