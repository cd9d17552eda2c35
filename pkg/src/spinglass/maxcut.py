"""Max-cut on sparse random graphs: exact search, local search and the large-degree prediction."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import CapabilityError, InvalidArgumentError
from .numerics import RngLike, as_generator
from .parisi import P_STAR

BRUTE_FORCE_MAX_N = 24
_REG_RETRIES = 1000


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``; edges stored as ``(u, v)`` with ``u < v``."""

    n: int
    edges: tuple

    def __post_init__(self):
        seen = set()
        norm = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidArgumentError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidArgumentError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise InvalidArgumentError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    def adjacency(self) -> sparse.csr_matrix:
        e = self.edge_array()
        data = np.ones(2 * len(e))
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))


@dataclass(frozen=True)
class CutResult:
    assignment: np.ndarray
    cut_value: int
    method: str


def cut_value(graph: Graph, sigma) -> int:
    """Number of edges whose endpoints get opposite signs."""
    s = np.asarray(sigma)
    if s.shape != (graph.n,) or not np.all(np.abs(s) == 1):
        raise InvalidArgumentError("assignment must be a +-1 vector of length n")
    if graph.m == 0:
        return 0
    e = graph.edge_array()
    return int(np.count_nonzero(s[e[:, 0]] != s[e[:, 1]]))


def maxcut_prediction(d: float, pstar: float = P_STAR) -> float:
    """Predicted ``MaxCut / n`` for large average degree ``d``: ``d/4 + P* sqrt(d/4)``."""
    if d <= 0:
        raise InvalidArgumentError("average degree must be positive")
    return d / 4.0 + pstar * math.sqrt(d / 4.0)


def bisection_prediction(d: float, kind: str = "min", pstar: float = P_STAR) -> float:
    """Predicted min- or max-bisection size per vertex, ``d/4 -+ P* sqrt(d/4)``."""
    if kind not in ("min", "max"):
        raise InvalidArgumentError("kind must be 'min' or 'max'")
    sign = -1.0 if kind == "min" else 1.0
    return d / 4.0 + sign * pstar * math.sqrt(d / 4.0)


def er_graph(n: int, d: float, rng: RngLike) -> Graph:
    """Erdos-Renyi graph with each pair present independently with probability ``d/n``."""
    if n < 2 or not 0 < d <= n:
        raise InvalidArgumentError("need n >= 2 and 0 < d <= n")
    gen = as_generator(rng)
    iu, ju = np.triu_indices(n, k=1)
    keep = gen.random(len(iu)) < d / n
    return Graph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist())))


def reg_graph(n: int, d: int, rng: RngLike) -> Graph:
    """Random d-regular graph by configuration-model pairing with rejection.

    Raises:
        InvalidArgumentError: If ``n * d`` is odd or ``d >= n``.
        CapabilityError: If no simple pairing is found within the retry cap.
    """
    if (n * d) % 2 or d >= n or d < 1:
        raise InvalidArgumentError(f"no simple {d}-regular graph on {n} vertices")
    gen = as_generator(rng)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(_REG_RETRIES):
        pairs = gen.permutation(stubs).reshape(-1, 2)
        pairs.sort(axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        if len(np.unique(pairs, axis=0)) != len(pairs):
            continue
        return Graph(n, tuple(map(tuple, pairs.tolist())))
    raise CapabilityError(f"configuration model failed {_REG_RETRIES} times for n={n}, d={d}")


def random_cut(graph: Graph, rng: RngLike) -> CutResult:
    sigma = as_generator(rng).choice(np.array([-1, 1]), size=graph.n)
    return CutResult(sigma, cut_value(graph, sigma), "random")


def maxcut_bruteforce(graph: Graph, chunk: int = 1 << 18) -> CutResult:
    """Exact max-cut by enumerating all assignments with ``sigma_0 = +1``.

    Codes ``c`` in ``[0, 2^(n-1))`` map bit ``n-2-j`` to vertex ``j+1``
    (1 means +1), so increasing ``c`` is lexicographic order in ``sigma``
    with -1 < +1; the first maximizer is the lexicographically smallest.

    Raises:
        CapabilityError: If ``n > 24``.
    """
    n = graph.n
    if n > BRUTE_FORCE_MAX_N:
        raise CapabilityError(f"brute force supports n <= {BRUTE_FORCE_MAX_N}, got {n}")
    e = graph.edge_array()
    shifts = np.concatenate([[-1], np.arange(n - 2, -1, -1)])
    best_val, best_code = -1, 0
    total = 1 << (n - 1)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        # Bit for vertex 0 is fixed to 1.
        bits = np.ones((len(codes), n), dtype=np.int8)
        bits[:, 1:] = (codes[:, None] >> shifts[None, 1:]) & 1
        cuts = np.zeros(len(codes), dtype=np.int64)
        for u, v in e:
            cuts += bits[:, u] != bits[:, v]
        i = int(np.argmax(cuts))
        if cuts[i] > best_val:
            best_val, best_code = int(cuts[i]), int(codes[i])
    sigma = np.ones(n, dtype=np.int64)
    for j in range(1, n):
        sigma[j] = 1 if (best_code >> (n - 1 - j)) & 1 else -1
    return CutResult(sigma, cut_value(graph, sigma), "brute")


def _steepest_ascent(adj: sparse.csr_matrix, sigma: np.ndarray) -> np.ndarray:
    sigma = sigma.astype(np.int64).copy()
    field = adj @ sigma
    while True:
        # Flipping i changes the cut by (# same-side neighbours) - (# opposite ones).
        gain = sigma * field
        i = int(np.argmax(gain))
        if gain[i] <= 0:
            return sigma
        lo, hi = adj.indptr[i], adj.indptr[i + 1]
        field[adj.indices[lo:hi]] -= 2 * sigma[i]
        sigma[i] = -sigma[i]


def maxcut_localsearch(graph: Graph, restarts: int, rng: RngLike) -> CutResult:
    """Best of ``restarts`` steepest single-flip ascents from random assignments."""
    if restarts < 1:
        raise InvalidArgumentError("restarts must be >= 1")
    adj = graph.adjacency().astype(np.int64)
    gen = as_generator(rng)
    best = None
    for _ in range(restarts):
        sigma = _steepest_ascent(adj, gen.choice(np.array([-1, 1]), size=graph.n))
        val = cut_value(graph, sigma)
        if best is None or val > best.cut_value:
            best = CutResult(sigma, val, "local-search")
    return best


def write_edge_list(graph: Graph, path) -> None:
    """Write ``# n <n>`` followed by one ``u v`` pair per line."""
    lines = [f"# n {graph.n}"] + [f"{u} {v}" for u, v in graph.edges]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path, n: int | None = None) -> Graph:
    """Read an edge list; ``n`` comes from the header, the argument, or the largest label."""
    edges, header_n = [], None
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "n":
                header_n = int(parts[1])
            continue
        u, v = line.split()
        edges.append((int(u), int(v)))
    size = n if n is not None else header_n
    if size is None:
        size = 1 + max((max(e) for e in edges), default=-1)
    return Graph(size, tuple(edges))
