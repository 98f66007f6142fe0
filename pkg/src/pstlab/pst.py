"""Perfect state transfer detection, the protected vertex set, readout sensitivity."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from math import comb, pi
from typing import Sequence, Union

import numpy as np

from .evolution import EvolutionSchedule, propagator, schedule_propagator
from .graph import Graph, GraphError, complement_vertex, hypercube
from .spectral import eigendecompose
from .switching import BlockSpec, build_block_cube, partial_patterns, switched_hypercube

log = logging.getLogger(__name__)

Dynamics = Union[Graph, EvolutionSchedule]

PST_TIME = pi / 2
DERIVATIVE_PST_TOL = 1e-6


class NoPSTError(ValueError):
    """The derivative formula was asked for at a time without PST."""


@dataclass
class PSTReport:
    time: float
    tolerance: float
    pairs: list[tuple[int, int, float]]
    unpaired: list[int]

    @property
    def paired_vertices(self) -> list[int]:
        return sorted(v for j, k, _ in self.pairs for v in (j, k))

    def pair_set(self) -> set[tuple[int, int]]:
        return {(j, k) for j, k, _ in self.pairs}

    def to_dict(self, one_based: bool = False) -> dict:
        out = {
            "t": self.time,
            "tol": self.tolerance,
            "pairs": [[j, k, p] for j, k, p in self.pairs],
            "unpaired": list(self.unpaired),
        }
        if one_based:
            out["one_based"] = [[j + 1, k + 1] for j, k, _ in self.pairs]
        return out


def transfer_matrix(dyn: Dynamics, t: float | None = None) -> tuple[np.ndarray, float]:
    """``P[j, k]``: probability of moving an excitation from ``j`` to ``k``."""
    if isinstance(dyn, EvolutionSchedule):
        if t is not None and not np.isclose(t, dyn.total_time, rtol=0, atol=1e-12):
            dyn = _retime(dyn, t)
        u = schedule_propagator(dyn)
        return np.abs(u.T) ** 2, dyn.total_time
    if t is None:
        raise ValueError("a time is required for a single graph")
    return np.abs(propagator(dyn, t)) ** 2, float(t)


def _retime(s: EvolutionSchedule, t: float) -> EvolutionSchedule:
    """Move the readout time by stretching or shrinking the final segment."""
    last = s.segments[-1].duration + (t - s.total_time)
    if last < 0:
        raise ValueError(f"readout time {t} falls before the final segment starts")
    return s.with_final_duration(last)


def find_pst_pairs(dyn: Dynamics, t: float | None = None, tol: float = 1e-6) -> PSTReport:
    """All vertex pairs with fidelity at least ``1 - tol`` at time ``t``.

    For a schedule ``t`` defaults to its total time. A pair counts if either
    direction reaches the threshold; the larger value is reported.
    """
    if not 0 < tol < 0.5:
        raise ValueError(f"tol must lie in (0, 1/2) for partners to be unique, got {tol}")
    p, t = transfer_matrix(dyn, t)
    sym = np.maximum(p, p.T)
    np.fill_diagonal(sym, 0.0)
    js, ks = np.nonzero(np.triu(sym >= 1 - tol))
    pairs = [(int(j), int(k), float(sym[j, k])) for j, k in zip(js, ks)]
    seen: set[int] = set()
    for j, k, _ in pairs:
        if j in seen or k in seen:
            raise AssertionError(f"vertex in two PST pairs at tol={tol}")
        seen.update((j, k))
    unpaired = [v for v in range(p.shape[0]) if v not in seen]
    return PSTReport(t, tol, pairs, unpaired)


def protected_set(n: int) -> list[int]:
    """Vertices whose low four bits are ``0000`` or ``1111``; ``2^(n-3)`` of them."""
    if n < 5:
        raise GraphError(f"protected set is defined for n >= 5, got {n}")
    return sorted(16 * b + local for b in range(1 << (n - 4)) for local in (0, 15))


def expected_s_pairs(n: int) -> list[tuple[int, int]]:
    """Each protected vertex with its bitwise complement, smaller index first."""
    return sorted({tuple(sorted((v, complement_vertex(v, n)))) for v in protected_set(n)})


@dataclass
class DerivativeReport:
    source: int
    target: int
    t0: float
    values: dict[int, float] = field(default_factory=dict)
    numeric: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"pair": [self.source, self.target], "t0": self.t0,
               "values": {str(k): v for k, v in sorted(self.values.items())}}
        if self.numeric:
            out["numeric"] = {str(k): v for k, v in sorted(self.numeric.items())}
        return out


def _final_hamiltonian(dyn: Dynamics) -> np.ndarray:
    return dyn.segments[-1].graph.adj if isinstance(dyn, EvolutionSchedule) else dyn.adj


def pst_partner(dyn: Dynamics, s: int, t0: float, tol: float = DERIVATIVE_PST_TOL) -> int:
    """Vertex whose excitation arrives at ``s`` at ``t0`` with fidelity ``>= 1 - tol``."""
    p, _ = transfer_matrix(dyn, t0)
    col = p[:, s].copy()
    col[s] = 0.0
    j = int(np.argmax(col))
    if col[j] < 1 - tol:
        raise NoPSTError(f"no PST into vertex {s} at t={t0} (best fidelity {col[j]:.6g})")
    return j


def fidelity_derivative_analytic(dyn: Dynamics, s: int, t0: float, k: int) -> float:
    """k-th time derivative of the fidelity into ``s`` at a PST time ``t0``.

    At PST the fidelity near ``t0`` is ``|<s|e^{i eps H}|s>|^2``, whose
    derivatives need only the moments ``<s|H^l|s>``:

        (-1)^(k/2) * sum_l (-1)^l C(k, l) <s|H^l|s> <s|H^(k-l)|s>   (k even)

    and zero for odd ``k``. ``H`` is the Hamiltonian in force at readout, i.e.
    the final segment of a schedule.
    """
    if k < 1:
        raise ValueError(f"derivative order must be >= 1, got {k}")
    pst_partner(dyn, s, t0)
    if k % 2:
        return 0.0
    h = _final_hamiltonian(dyn)
    moments = np.empty(k + 1)
    vec = np.zeros(h.shape[0])
    vec[s] = 1.0
    for ell in range(k + 1):
        moments[ell] = vec[s]
        vec = h @ vec
    total = sum((-1) ** ell * comb(k, ell) * moments[ell] * moments[k - ell] for ell in range(k + 1))
    return float((-1) ** (k // 2) * total)


def fidelity_derivative_numeric(dyn: Dynamics, j: int, k_vertex: int, t0: float,
                                order: int, h: float = 1e-3) -> float:
    """Central finite difference of ``p_{j -> k}`` around ``t0`` (orders 1 and 2)."""
    if order not in (1, 2):
        raise ValueError(f"finite differences support orders 1 and 2, got {order}")
    if isinstance(dyn, EvolutionSchedule):
        def p(t):
            return transfer_matrix(dyn, t)[0][j, k_vertex]
    else:
        dec = eigendecompose(dyn)

        def p(t):
            return abs(dec.propagator(t)[j, k_vertex]) ** 2
    plus, minus = p(t0 + h), p(t0 - h)
    if order == 1:
        return float((plus - minus) / (2 * h))
    return float((plus - 2 * p(t0) + minus) / h**2)


def derivative_report(dyn: Dynamics, target: int, t0: float, orders: Sequence[int] = (1, 2),
                      h: float = 1e-3) -> DerivativeReport:
    source = pst_partner(dyn, target, t0)
    rep = DerivativeReport(source, target, t0)
    for k in orders:
        rep.values[k] = fidelity_derivative_analytic(dyn, target, t0, k)
        if k in (1, 2):
            rep.numeric[k] = fidelity_derivative_numeric(dyn, source, target, t0, k, h)
    return rep


class Family(enum.Enum):
    HYPERCUBE = "hypercube"
    SWITCHED = "switched"
    PARTIAL_ALL = "partial-all"
    BLEND = "blend"


def pst_census(family: Family | str, n: int, blocks: Sequence[Sequence[float]] = (),
               t: float = PST_TIME, tol: float = 1e-6) -> dict:
    """PST pair counts for one family of cubes at time ``t``.

    Partially switched and blended instances are compared against the
    protected set; any instance whose PST vertices differ is listed under
    ``"deviations"``. That comparison is a probe, not an assertion.
    """
    family = Family(family)
    if family is Family.HYPERCUBE:
        instances = [(None, hypercube(n))]
    elif family is Family.SWITCHED:
        instances = [(None, switched_hypercube(n))]
    elif family is Family.PARTIAL_ALL:
        instances = [(pat, build_block_cube(BlockSpec(n, pat))) for pat in partial_patterns(n, proper_only=True)]
    else:
        if not blocks:
            raise ValueError("blend census needs at least one block list")
        instances = [(tuple(b), build_block_cube(BlockSpec(n, b))) for b in blocks]
    compare = family in (Family.PARTIAL_ALL, Family.BLEND) and n >= 5
    protected = protected_set(n) if compare else None
    rows, deviations = [], []
    for idx, (pattern, g) in enumerate(instances):
        rep = find_pst_pairs(g, t, tol)
        row = {
            "blocks": list(pattern) if pattern is not None else None,
            "num_pairs": len(rep.pairs),
            "pst_vertices": rep.paired_vertices,
            "pairs": [[j, k] for j, k, _ in rep.pairs],
        }
        if compare:
            row["matches_protected_set"] = rep.paired_vertices == protected
            if not row["matches_protected_set"]:
                deviations.append(idx)
                log.info("instance %s has PST vertices outside the protected set", pattern)
        rows.append(row)
    return {"family": family.value, "n": n, "t": t, "tol": tol, "instances": rows, "deviations": deviations}


def mixture_spectrum(alpha: float, tol: float = 1e-8) -> dict:
    """Spectra of the two 4-cube mixtures ``C + alpha*E`` and ``C - alpha*E``.

    ``C`` is the midpoint of the plain and switched 4-cube adjacencies and
    ``E`` their difference, so ``C + alpha*E`` is the block with weight
    ``1/2 - alpha`` on the plain cube.
    """
    if not 0 <= alpha <= 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    plus = build_block_cube(BlockSpec(4, (0.5 - alpha,)))
    minus = build_block_cube(BlockSpec(4, (0.5 + alpha,)))
    dec_p = eigendecompose(plus, tol)
    dec_m = eigendecompose(minus, tol)
    return {
        "alpha": alpha,
        "plus": dec_p.to_dict(),
        "minus": dec_m.to_dict(),
        "predicted_irrational": float(np.sqrt(2 + 8 * alpha**2)),
    }
