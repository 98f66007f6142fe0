"""Eigendecomposition of adjacency matrices and the spectral predicates built on it."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, check_size


class DecompositionError(ArithmeticError):
    """The symmetric eigensolver failed or produced an inconsistent result."""


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct eigenvalues (descending) with orthonormal eigenbases.

    ``bases[r]`` is an ``m x mult[r]`` matrix whose columns span the
    eigenspace of ``eigenvalues[r]``; the projector is ``bases[r] @ bases[r].T``.
    """

    eigenvalues: np.ndarray
    multiplicities: tuple[int, ...]
    bases: tuple[np.ndarray, ...]
    cluster_tol: float

    @property
    def m(self) -> int:
        return self.bases[0].shape[0]

    def projector(self, r: int) -> np.ndarray:
        b = self.bases[r]
        return b @ b.T

    def projectors(self) -> list[np.ndarray]:
        return [self.projector(r) for r in range(len(self.bases))]

    def full(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalue per column and the stacked eigenvector matrix."""
        lam = np.repeat(self.eigenvalues, self.multiplicities)
        return lam, np.hstack(self.bases)

    def reconstruct(self) -> np.ndarray:
        lam, v = self.full()
        return (v * lam) @ v.T

    def propagator(self, t: float) -> np.ndarray:
        """``e^{itA} = sum_r e^{it lambda_r} E_r``."""
        lam, v = self.full()
        return (v * np.exp(1j * t * lam)) @ v.T

    def projection_norms(self, u: int) -> np.ndarray:
        """``||E_r |u>||`` for each distinct eigenvalue, from row ``u`` of each basis."""
        return np.array([np.linalg.norm(b[u]) for b in self.bases])

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "multiplicities": list(self.multiplicities),
            "cluster_tol": self.cluster_tol,
        }


def _cluster_bounds(values: np.ndarray, tol: float) -> list[tuple[int, int]]:
    # values sorted descending; gap measured against the smaller-magnitude neighbour scale
    bounds = []
    start = 0
    for i in range(1, len(values)):
        gap = values[i - 1] - values[i]
        if gap > tol * max(1.0, abs(values[i - 1]), abs(values[i])):
            bounds.append((start, i))
            start = i
    bounds.append((start, len(values)))
    return bounds


def eigendecompose(g: Graph, cluster_tol: float = 1e-8) -> SpectralDecomposition:
    """Full symmetric eigendecomposition with near-equal eigenvalues merged.

    Eigenvalues closer than ``cluster_tol * max(1, |lambda|)`` are treated as
    one; the merged value is the mean of the raw values. The result is checked
    for orthonormality and reconstruction before it is returned.
    """
    if not cluster_tol > 0:
        raise ValueError(f"cluster_tol must be positive, got {cluster_tol}")
    a = g.adj
    try:
        lam, vec = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigensolver did not converge: {exc}") from exc
    lam, vec = lam[::-1], vec[:, ::-1]
    values, mults, bases = [], [], []
    for lo, hi in _cluster_bounds(lam, cluster_tol):
        values.append(lam[lo:hi].mean())
        mults.append(hi - lo)
        bases.append(np.ascontiguousarray(vec[:, lo:hi]))
    dec = SpectralDecomposition(np.array(values), tuple(mults), tuple(bases), cluster_tol)
    _check(dec, a)
    return dec


def _check(dec: SpectralDecomposition, a: np.ndarray) -> None:
    _, v = dec.full()
    m = a.shape[0]
    scale = max(1.0, float(np.abs(a).max()))
    orth = np.abs(v.T @ v - np.eye(m)).max()
    # orthonormal columns make the projectors idempotent, mutually orthogonal and complete
    if orth > max(1e-9, 10 * dec.cluster_tol):
        raise DecompositionError(f"eigenvectors not orthonormal (error {orth:.2e})")
    err = np.abs(a - dec.reconstruct()).max()
    if err > 10 * dec.cluster_tol * scale:
        raise DecompositionError(f"reconstruction error {err:.2e} exceeds tolerance")


def spectrum(g: Graph) -> np.ndarray:
    """Eigenvalues with multiplicity, ascending."""
    try:
        return np.linalg.eigvalsh(g.adj)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigensolver did not converge: {exc}") from exc


def are_cospectral(g1: Graph, g2: Graph, tol: float = 1e-8) -> bool:
    if g1.m != g2.m:
        raise GraphError(f"cannot compare spectra of sizes {g1.m} and {g2.m}")
    s1, s2 = spectrum(g1), spectrum(g2)
    scale = np.maximum(1.0, np.maximum(np.abs(s1), np.abs(s2)))
    return bool(np.all(np.abs(s1 - s2) <= tol * scale))


def standard_hadamard(n: int) -> np.ndarray:
    """``H_1^{⊗n}`` with ``H_1 = [[1, 1], [1, -1]]``, as an integer array."""
    if n < 1:
        raise ValueError(f"Hadamard order exponent must be >= 1, got {n}")
    check_size(1 << n)
    h1 = np.array([[1, 1], [1, -1]], dtype=np.int64)
    h = h1
    for _ in range(n - 1):
        h = np.kron(h1, h)
    return h


def is_standard_hadamard_diagonalizable(g: Graph, tol: float = 1e-8) -> bool:
    m = g.m
    n = m.bit_length() - 1
    if m < 2 or m != 1 << n:
        raise GraphError(f"vertex count {m} is not a power of two")
    h = standard_hadamard(n).astype(float)
    d = h.T @ g.adj @ h / m
    off = d - np.diag(np.diag(d))
    return bool(np.abs(off).max() <= tol * max(1.0, float(np.abs(g.adj).max())))


def minimal_polynomial(g: Graph, cluster_tol: float = 1e-8) -> list[int | float]:
    """Monic ``prod_r (x - lambda_r)`` over distinct eigenvalues, highest degree first.

    Coefficients within 1e-6 of an integer are returned as that ``int``.
    """
    dec = eigendecompose(g, cluster_tol)
    coeffs = np.poly(dec.eigenvalues)
    out = []
    for c in coeffs:
        r = round(float(c))
        out.append(r if abs(c - r) <= 1e-6 else float(c))
    return out


def eigenvalue_support(g: Graph, u: int, proj_tol: float = 1e-8,
                       dec: SpectralDecomposition | None = None) -> list[float]:
    """Distinct eigenvalues whose projector does not kill ``|u>``, descending."""
    if not 0 <= u < g.m:
        raise IndexError(f"vertex {u} out of range for {g.m} vertices")
    dec = dec if dec is not None else eigendecompose(g)
    norms = dec.projection_norms(u)
    return [float(x) for x, nrm in zip(dec.eigenvalues, norms) if nrm > proj_tol]


class Verdict(enum.Enum):
    OBSTRUCTED = "Obstructed"
    NO_OBSTRUCTION_FOUND = "NoObstructionFound"


def pst_obstruction_check(g: Graph, u: int, int_tol: float = 1e-6,
                          dec: SpectralDecomposition | None = None) -> Verdict:
    """Integer/irrational special case of the ratio condition for periodic vertices.

    If the support of ``u`` holds two integers and also something clearly not
    an integer, ``u`` cannot be periodic and so is in no PST pair. Values in
    the guard band between ``int_tol`` and ``100 * int_tol`` of an integer
    count as neither, which only ever weakens the verdict.
    """
    support = np.array(eigenvalue_support(g, u, dec=dec))
    dist = np.abs(support - np.round(support))
    integers = {int(round(x)) for x, d in zip(support, dist) if d <= int_tol}
    non_integer = bool(np.any(dist > 100 * int_tol))
    if len(integers) >= 2 and non_integer:
        return Verdict.OBSTRUCTED
    return Verdict.NO_OBSTRUCTION_FOUND
