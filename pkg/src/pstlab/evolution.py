"""Continuous-time quantum walk dynamics under ``H = A(G)``.

Time is in units with hbar = 1. Propagators are ``e^{itA}`` exactly, with no
global phase removed. A schedule switches Hamiltonians at fixed times, the
first segment acting first on the initial state.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .graph import Graph, GraphError
from .spectral import DecompositionError, SpectralDecomposition, eigendecompose

UNITARITY_TOL = 1e-9


def _check_unitary(u: np.ndarray) -> None:
    err = np.abs(u @ u.conj().T - np.eye(u.shape[0])).max()
    if err > UNITARITY_TOL:
        raise DecompositionError(f"propagator not unitary (error {err:.2e})")


def propagator(g: Graph | SpectralDecomposition, t: float) -> np.ndarray:
    """``U(t) = e^{itA}`` built from the spectral decomposition."""
    dec = g if isinstance(g, SpectralDecomposition) else eigendecompose(g)
    u = dec.propagator(t)
    _check_unitary(u)
    return u


def _check_vertex(m: int, *vs: int) -> None:
    for v in vs:
        if not 0 <= v < m:
            raise IndexError(f"vertex {v} out of range for {m} vertices")


def fidelity(g: Graph, j: int, k: int, t: float) -> float:
    """``p_{j,k}(t) = |<j|e^{itA}|k>|^2``."""
    _check_vertex(g.m, j, k)
    return float(abs(propagator(g, t)[j, k]) ** 2)


@dataclass(frozen=True)
class Segment:
    graph: Graph
    duration: float


@dataclass(frozen=True)
class EvolutionSchedule:
    """Piecewise-constant Hamiltonian: ``graph`` active for ``duration``, in order."""

    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise GraphError("schedule needs at least one segment")
        m = segs[0].graph.m
        if any(s.graph.m != m for s in segs):
            raise GraphError("all schedule segments must have the same vertex count")
        if any(not s.duration >= 0 for s in segs):
            raise GraphError("segment durations must be nonnegative")

    @classmethod
    def of(cls, *pairs: tuple[Graph, float]) -> "EvolutionSchedule":
        return cls(tuple(Segment(g, float(t)) for g, t in pairs))

    @property
    def m(self) -> int:
        return self.segments[0].graph.m

    @property
    def total_time(self) -> float:
        return float(sum(s.duration for s in self.segments))

    def with_final_duration(self, duration: float) -> "EvolutionSchedule":
        last = self.segments[-1]
        return EvolutionSchedule(self.segments[:-1] + (Segment(last.graph, duration),))


def schedule_propagator(s: EvolutionSchedule) -> np.ndarray:
    """``U_r ... U_2 U_1`` so that ``U |psi0>`` runs segment 1 first."""
    u = np.eye(s.m, dtype=complex)
    for seg in s.segments:
        u = propagator(seg.graph, seg.duration) @ u
    _check_unitary(u)
    return u


def transfer_probability(s: EvolutionSchedule, j: int, k: int) -> float:
    """Probability ``|<k|U|j>|^2`` of finding at ``k`` an excitation started at ``j``."""
    _check_vertex(s.m, j, k)
    return float(abs(schedule_propagator(s)[k, j]) ** 2)


@dataclass(frozen=True)
class FidelityTrace:
    source: int
    target: int
    times: np.ndarray
    values: np.ndarray

    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.values.tolist()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "fidelity"])
        for t, p in zip(self.times, self.values):
            w.writerow([f"{t:.15g}", f"{p:.15g}"])
        return buf.getvalue()


def fidelity_trace(g: Graph, j: int, k: int, times: Sequence[float]) -> FidelityTrace:
    """Fidelity ``p_{j,k}`` sampled at increasing ``times``, one decomposition reused."""
    _check_vertex(g.m, j, k)
    ts = np.asarray(times, dtype=float)
    if ts.ndim != 1 or ts.size == 0 or np.any(np.diff(ts) <= 0):
        raise ValueError("times must be a nonempty, strictly increasing sequence")
    dec = eigendecompose(g)
    lam, v = dec.full()
    # <j|U(t)|k> = sum_c v[j,c] v[k,c] e^{it lam_c}
    weights = v[j] * v[k]
    amps = np.exp(1j * np.outer(ts, lam)) @ weights
    vals = np.abs(amps) ** 2
    if np.any(vals > 1 + 1e-9):
        raise DecompositionError("fidelity above one; eigenvectors are not orthonormal")
    return FidelityTrace(j, k, ts, vals)


def load_schedule(data: dict, base: Path | None = None, resolve=None) -> EvolutionSchedule:
    """Build a schedule from its JSON form.

    Each segment's ``graph`` is an inline graph object, a path (relative to
    ``base``), or a build request ``{"build": kind, ...}`` handed to ``resolve``.
    """
    try:
        raw = data["segments"]
    except (KeyError, TypeError):
        raise GraphError("schedule JSON needs 'segments'") from None
    segs = []
    for item in raw:
        ref = item.get("graph")
        if isinstance(ref, str):
            path = Path(ref) if base is None else base / ref
            g = Graph.from_json(path.read_text())
        elif isinstance(ref, dict) and "build" in ref:
            if resolve is None:
                raise GraphError("build requests in schedules need a resolver")
            g = resolve(ref)
        elif isinstance(ref, dict):
            g = Graph.from_dict(ref)
        else:
            raise GraphError(f"bad graph reference {ref!r}")
        segs.append(Segment(g, float(item["duration"])))
    return EvolutionSchedule(tuple(segs))


def schedule_to_dict(s: EvolutionSchedule) -> dict:
    return {"segments": [{"graph": seg.graph.to_dict(), "duration": seg.duration} for seg in s.segments]}


def schedule_to_json(s: EvolutionSchedule) -> str:
    return json.dumps(schedule_to_dict(s), sort_keys=True)
