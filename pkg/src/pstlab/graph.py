"""Graphs on which the quantum walks run.

A :class:`Graph` is nothing more than a validated, read-only adjacency
matrix. Vertices are integers ``0..m-1``; for cube-shaped graphs vertex ``i``
is identified with the binary representation of ``i``, most significant bit
first. The adjacency matrix doubles as the single-excitation Hamiltonian.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

DEFAULT_SIZE_CAP = 2**14
SIZE_CAP_ENV = "PSTLAB_SIZE_CAP"


class GraphError(ValueError):
    """Raised for malformed graphs or graph files."""


class SizeCapError(GraphError):
    """Raised when a construction would exceed the vertex cap."""


def size_cap() -> int:
    """Current vertex cap, overridable through ``PSTLAB_SIZE_CAP``."""
    raw = os.environ.get(SIZE_CAP_ENV)
    if raw is None:
        return DEFAULT_SIZE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise GraphError(f"{SIZE_CAP_ENV}={raw!r} is not an integer") from None
    if cap < 1:
        raise GraphError(f"{SIZE_CAP_ENV} must be positive, got {cap}")
    return cap


def check_size(m: int) -> None:
    cap = size_cap()
    if m > cap:
        raise SizeCapError(f"{m} vertices exceeds the size cap of {cap}")


@dataclass(frozen=True, eq=False)
class Graph:
    """Symmetric, loop-free, nonnegative weighted adjacency matrix.

    Parameters
    ----------
    adj : array_like
        ``m x m`` real matrix of coupling strengths. Copied and frozen.
    labels : dict, optional
        Vertex index to display string.
    """

    adj: np.ndarray
    labels: dict[int, str] | None = field(default=None)

    def __post_init__(self):
        a = np.array(self.adj, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise GraphError(f"adjacency must be a nonempty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise GraphError("adjacency has non-finite entries")
        if not np.array_equal(a, a.T):
            raise GraphError("adjacency is not symmetric")
        if np.any(np.diag(a) != 0):
            raise GraphError("adjacency has nonzero diagonal (loops)")
        if np.any(a < 0):
            raise GraphError("adjacency has negative weights")
        check_size(a.shape[0])
        a.flags.writeable = False
        object.__setattr__(self, "adj", a)

    @property
    def m(self) -> int:
        return self.adj.shape[0]

    @property
    def is_unweighted(self) -> bool:
        return bool(np.all((self.adj == 0) | (self.adj == 1)))

    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def num_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adj)))

    def edges(self) -> list[tuple[int, int, float]]:
        """Edges as ``(i, j, w)`` with ``i < j``, in row-major order."""
        iu, ju = np.nonzero(np.triu(self.adj))
        return [(int(i), int(j), float(self.adj[i, j])) for i, j in zip(iu, ju)]

    def same_as(self, other: "Graph") -> bool:
        return self.m == other.m and np.array_equal(self.adj, other.adj)

    def to_dict(self) -> dict:
        return {"m": self.m, "edges": [[i, j, _weight_out(w)] for i, j, w in self.edges()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        try:
            m = data["m"]
            edges = data["edges"]
        except (KeyError, TypeError):
            raise GraphError("graph JSON needs keys 'm' and 'edges'") from None
        if not isinstance(m, int) or isinstance(m, bool) or m < 1:
            raise GraphError(f"'m' must be a positive integer, got {m!r}")
        check_size(m)
        adj = np.zeros((m, m))
        seen: dict[tuple[int, int], float] = {}
        for entry in edges:
            if not isinstance(entry, (list, tuple)) or len(entry) != 3:
                raise GraphError(f"edge {entry!r} is not [i, j, w]")
            i, j, w = entry
            if not all(isinstance(x, int) and not isinstance(x, bool) for x in (i, j)):
                raise GraphError(f"edge {entry!r} has non-integer endpoints")
            if not (0 <= i < m and 0 <= j < m):
                raise GraphError(f"edge {entry!r} out of range for m={m}")
            if i == j:
                raise GraphError(f"edge {entry!r} is a loop")
            w = float(w)
            if not w > 0 or not np.isfinite(w):
                raise GraphError(f"edge {entry!r} weight must be positive and finite")
            key = (min(i, j), max(i, j))
            if key in seen:
                if seen[key] != w:
                    raise GraphError(f"edge {key} given twice with different weights (asymmetric)")
                raise GraphError(f"duplicate edge {key}")
            seen[key] = w
            adj[i, j] = adj[j, i] = w
        return cls(adj)

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def from_edges(cls, m: int, edges: Iterable[Sequence]) -> "Graph":
        """Unweighted (pairs) or weighted (triples) edge list."""
        adj = np.zeros((m, m))
        for e in edges:
            i, j = e[0], e[1]
            w = e[2] if len(e) > 2 else 1.0
            adj[i, j] = adj[j, i] = w
        return cls(adj)


def _weight_out(w: float):
    # integers print as 1 rather than 1.0 so unweighted output stays compact
    return int(w) if float(w).is_integer() else w


@dataclass(frozen=True)
class ConnectionSet:
    """Connection set of a cubelike graph, elements stored as bit masks.

    Bit vectors can be given as ints, as ``"0101"`` strings (leftmost
    character is the most significant bit), or as 0/1 sequences in the same
    order.
    """

    n: int
    elements: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"dimension must be positive, got {self.n}")
        masks = tuple(_as_mask(e, self.n) for e in self.elements)
        if any(x == 0 for x in masks):
            raise GraphError("connection set contains the zero vector")
        if len(set(masks)) != len(masks):
            raise GraphError("connection set has repeated elements")
        object.__setattr__(self, "elements", masks)

    @classmethod
    def standard_basis(cls, n: int) -> "ConnectionSet":
        return cls(n, tuple(1 << b for b in range(n)))

    def gf2_rank(self) -> int:
        """Rank of the elements over GF(2), by xor elimination."""
        basis: list[int] = []
        for x in self.elements:
            for b in basis:
                x = min(x, x ^ b)
            if x:
                basis.append(x)
        return len(basis)


def _as_mask(e, n: int) -> int:
    if isinstance(e, str):
        if len(e) != n or set(e) - {"0", "1"}:
            raise GraphError(f"bit string {e!r} is not of length {n}")
        x = int(e, 2)
    elif isinstance(e, (int, np.integer)):
        x = int(e)
    else:
        bits = list(e)
        if len(bits) != n or any(b not in (0, 1) for b in bits):
            raise GraphError(f"bit vector {e!r} is not of length {n}")
        x = int("".join(map(str, bits)), 2)
    if not 0 <= x < 2**n:
        raise GraphError(f"element {e!r} does not fit in {n} bits")
    return x


def cubelike(c: ConnectionSet) -> Graph:
    """Cayley graph of Z_2^n: ``x ~ y`` iff ``x xor y`` is in the connection set."""
    m = 1 << c.n
    check_size(m)
    x = np.arange(m)
    adj = np.zeros((m, m))
    for mask in c.elements:
        adj[x, x ^ mask] = 1.0
    return Graph(adj)


def hypercube(n: int) -> Graph:
    """The n-cube Q_n on vertices ``0..2^n-1``, adjacent when one bit differs."""
    if n < 1:
        raise GraphError(f"hypercube dimension must be >= 1, got {n}")
    check_size(1 << n)
    return cubelike(ConnectionSet.standard_basis(n))


def cartesian_product(g1: Graph, g2: Graph) -> Graph:
    """``g1 □ g2`` with vertex ``(j1, j2)`` at index ``j1 * m2 + j2``."""
    check_size(g1.m * g2.m)
    return Graph(np.kron(g1.adj, np.eye(g2.m)) + np.kron(np.eye(g1.m), g2.adj))


def convex_combination(graphs: Sequence[Graph], weights: Sequence[float]) -> Graph:
    """Weighted graph ``sum_r c_r A(G_r)`` with ``c_r >= 0`` summing to one."""
    if len(graphs) == 0 or len(graphs) != len(weights):
        raise GraphError("need one weight per graph and at least one graph")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or not np.isclose(w.sum(), 1.0, atol=1e-12):
        raise GraphError(f"weights {list(weights)} are not a convex combination")
    m = graphs[0].m
    if any(g.m != m for g in graphs):
        raise GraphError("graphs in a convex combination must share a vertex count")
    return Graph(sum(c * g.adj for c, g in zip(w, graphs)))


def is_connected(g: Graph) -> bool:
    ncomp, _ = connected_components(g.adj != 0, directed=False)
    return ncomp == 1


def complement_vertex(v: int, n: int) -> int:
    """Bitwise complement of vertex ``v`` in an n-bit labelling."""
    return v ^ ((1 << n) - 1)


def hamming_weight(v: int) -> int:
    return bin(v).count("1")
