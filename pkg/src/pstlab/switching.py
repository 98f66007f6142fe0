"""Godsil-McKay switching and the switched / partially switched cubes.

The switched 4-cube is built by switching Q_4 on the distance partition from
vertex ``0000``: cells ``{0000}``, the weight-2 vertices, the weight-3
vertices and ``{1111}``, with the weight-1 vertices as the residual cell.
Each weight-1 vertex sees exactly three of the six weight-2 vertices, so its
edges into that cell get complemented.

Larger cubes are handled as ``2^(n-4)`` diagonal 16x16 blocks glued by
``A(Q_{n-4}) ⊗ I_16``; each block is a convex mix ``p*A(Q_4) + (1-p)*A(~Q_4)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .graph import Graph, GraphError, cartesian_product, check_size, hamming_weight, hypercube


class PartitionError(GraphError):
    """Raised for an invalid partition, or one that fails the GM conditions.

    The failing :class:`PartitionReport` is attached as ``report`` when the
    partition was well-formed but the switching conditions did not hold.
    """

    def __init__(self, message: str, report: "PartitionReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Partition:
    """Cells ``C_1..C_k`` plus a residual cell ``D`` (possibly empty)."""

    cells: tuple[frozenset[int], ...]
    residual: frozenset[int] = frozenset()

    def __post_init__(self):
        cells = tuple(frozenset(int(v) for v in c) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "residual", frozenset(int(v) for v in self.residual))
        if any(len(c) == 0 for c in cells):
            raise PartitionError("partition cells must be nonempty")
        total = sum(len(c) for c in cells) + len(self.residual)
        if len(frozenset().union(*cells, self.residual)) != total:
            raise PartitionError("partition cells overlap")

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset().union(*self.cells, self.residual)

    def check_covers(self, m: int) -> None:
        if self.vertices != frozenset(range(m)):
            raise PartitionError(f"partition does not cover exactly the vertices 0..{m - 1}")

    def to_dict(self) -> dict:
        return {"cells": [sorted(c) for c in self.cells], "residual": sorted(self.residual)}

    @classmethod
    def from_dict(cls, data: dict) -> "Partition":
        try:
            return cls(tuple(data["cells"]), data.get("residual", []))
        except (KeyError, TypeError):
            raise PartitionError("partition JSON needs 'cells' (and optionally 'residual')") from None


@dataclass(frozen=True)
class Violation:
    condition: str  # "a" or "b"
    cell: int
    vertex: int
    detail: str


@dataclass
class PartitionReport:
    ok: bool
    violations: list[Violation] = field(default_factory=list)
    # per residual vertex: indices of the cells it sees exactly half of
    half_cells: dict[int, list[int]] = field(default_factory=dict)


def _cell_counts(adj: np.ndarray, cells: Sequence[frozenset[int]]) -> np.ndarray:
    member = np.zeros((adj.shape[0], len(cells)))
    for i, c in enumerate(cells):
        member[list(c), i] = 1.0
    return adj @ member


def validate_gm_partition(g: Graph, p: Partition) -> PartitionReport:
    """Check the two GM switching conditions.

    (a) every vertex of ``C_i`` has the same number of neighbours in ``C_j``,
    for all ``i, j`` including ``i == j``; (b) every ``v`` in ``D`` has 0,
    ``n_i/2`` or ``n_i`` neighbours in ``C_i``. ``n_i/2`` only counts when
    ``n_i`` is even.
    """
    if not g.is_unweighted:
        raise GraphError("GM switching is only defined here for unweighted graphs")
    p.check_covers(g.m)
    report = PartitionReport(ok=True)
    if not p.cells:
        return report
    counts = _cell_counts(g.adj, p.cells)
    for i, cell in enumerate(p.cells):
        rows = sorted(cell)
        block = counts[rows]
        for j in range(len(p.cells)):
            ref = block[0, j]
            for v, c in zip(rows, block[:, j]):
                if c != ref:
                    report.violations.append(
                        Violation("a", i, v, f"{int(c)} neighbours in cell {j}, cell-mate {rows[0]} has {int(ref)}")
                    )
    sizes = [len(c) for c in p.cells]
    for v in sorted(p.residual):
        for i, n_i in enumerate(sizes):
            c = counts[v, i]
            if c == 0 or c == n_i:
                continue
            if n_i % 2 == 0 and c == n_i // 2:
                report.half_cells.setdefault(v, []).append(i)
                continue
            report.violations.append(Violation("b", i, v, f"{int(c)} neighbours in cell of size {n_i}"))
    report.ok = not report.violations
    return report


def gm_switch(g: Graph, p: Partition) -> Graph:
    """Return ``G^(pi)``: residual vertices swap which half of a cell they see."""
    report = validate_gm_partition(g, p)
    if not report.ok:
        raise PartitionError(f"partition fails GM conditions ({len(report.violations)} violations)", report)
    adj = g.adj.copy()
    for v, cell_ids in report.half_cells.items():
        for i in cell_ids:
            idx = sorted(p.cells[i])
            adj[v, idx] = 1.0 - adj[v, idx]
            adj[idx, v] = adj[v, idx]
    return Graph(adj)


def iter_gm_partitions(g: Graph, max_vertices: int = 8, nontrivial_only: bool = False) -> Iterator[Partition]:
    """Every partition satisfying the GM conditions with a nonempty residual.

    Cells are unordered, so each set partition is visited once per choice of
    residual block. Exhaustive, hence capped at ``max_vertices``.
    """
    from sympy.utilities.iterables import multiset_partitions

    if g.m > max_vertices:
        raise GraphError(f"exhaustive partition search is capped at {max_vertices} vertices, got {g.m}")
    for blocks in multiset_partitions(list(range(g.m))):
        if len(blocks) < 2:
            continue
        for d in range(len(blocks)):
            part = Partition(tuple(b for k, b in enumerate(blocks) if k != d), blocks[d])
            report = validate_gm_partition(g, part)
            if report.ok and (report.half_cells or not nontrivial_only):
                yield part


def canonical_q4_partition() -> Partition:
    """Distance partition of Q_4 from ``0000``; weight-1 vertices are residual."""
    by_weight = [frozenset(v for v in range(16) if hamming_weight(v) == w) for w in range(5)]
    return Partition((by_weight[0], by_weight[2], by_weight[3], by_weight[4]), by_weight[1])


@lru_cache(maxsize=None)
def switched_q4() -> Graph:
    return gm_switch(hypercube(4), canonical_q4_partition())


def _cube_coupling(k: int) -> np.ndarray:
    # adjacency of Q_k, with Q_0 a single isolated vertex
    return np.zeros((1, 1)) if k == 0 else hypercube(k).adj


def switched_hypercube(n: int) -> Graph:
    """``Q_{n-4} □ ~Q_4``, n-regular and cospectral with Q_n."""
    if n < 4:
        raise GraphError(f"switched hypercube needs n >= 4, got {n}")
    if n == 4:
        return switched_q4()
    return cartesian_product(hypercube(n - 4), switched_q4())


PLAIN = 1.0
SWITCHED = 0.0


@dataclass(frozen=True)
class BlockSpec:
    """Per-block mixing weights for an n-cube split into 16-vertex blocks.

    ``blocks[j]`` is the weight ``p_j`` on Q_4 in block ``j``: 1 keeps the plain
    4-cube, 0 uses the switched 4-cube, anything between blends the two.
    Block ``j`` holds vertices ``16*j .. 16*j + 15``.
    """

    n: int
    blocks: tuple[float, ...]

    def __post_init__(self):
        if self.n < 4:
            raise GraphError(f"block cubes need n >= 4, got {self.n}")
        blocks = tuple(float(p) for p in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        want = 1 << (self.n - 4)
        if len(blocks) != want:
            raise GraphError(f"n={self.n} needs {want} blocks, got {len(blocks)}")
        if any(not 0.0 <= p <= 1.0 for p in blocks):
            raise GraphError(f"block weights must lie in [0, 1], got {list(blocks)}")

    @classmethod
    def parse(cls, n: int, text: str) -> "BlockSpec":
        """From a comma list such as ``"1,0"`` or ``"0.3,0.7"``."""
        try:
            return cls(n, tuple(float(x) for x in text.split(",")))
        except ValueError:
            raise GraphError(f"cannot parse block list {text!r}") from None

    def to_dict(self) -> dict:
        return {"n": self.n, "blocks": list(self.blocks)}

    @classmethod
    def from_dict(cls, data: dict) -> "BlockSpec":
        try:
            return cls(int(data["n"]), tuple(data["blocks"]))
        except (KeyError, TypeError):
            raise GraphError("block spec JSON needs 'n' and 'blocks'") from None

    @classmethod
    def from_json(cls, text: str) -> "BlockSpec":
        return cls.from_dict(json.loads(text))


def block_matrix(p: float) -> np.ndarray:
    """``p*A(Q_4) + (1-p)*A(~Q_4)``; shared edges stay exactly 1."""
    a2 = switched_q4().adj
    return a2 + p * (hypercube(4).adj - a2)


def build_block_cube(spec: BlockSpec) -> Graph:
    """``blockdiag(M_1..M_B) + A(Q_{n-4}) ⊗ I_16``."""
    check_size(1 << spec.n)
    nb = len(spec.blocks)
    adj = np.kron(_cube_coupling(spec.n - 4), np.eye(16))
    for j, p in enumerate(spec.blocks):
        adj[16 * j:16 * (j + 1), 16 * j:16 * (j + 1)] += block_matrix(p)
    assert adj.shape == (16 * nb, 16 * nb)
    return Graph(adj)


def partial_patterns(n: int, proper_only: bool = False) -> list[tuple[float, ...]]:
    """All ``2^(2^(n-4))`` plain/switched block patterns, in binary order.

    With ``proper_only`` the all-plain and all-switched patterns are dropped.
    """
    nb = 1 << (n - 4)
    out = []
    for code in range(1 << nb):
        pattern = tuple(PLAIN if (code >> (nb - 1 - j)) & 1 else SWITCHED for j in range(nb))
        if proper_only and len(set(pattern)) == 1:
            continue
        out.append(pattern)
    return out
