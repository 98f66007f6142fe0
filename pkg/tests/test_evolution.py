from math import pi

import numpy as np
import pytest

from pstlab.evolution import (
    EvolutionSchedule,
    fidelity,
    fidelity_trace,
    load_schedule,
    propagator,
    schedule_propagator,
    schedule_to_dict,
    transfer_probability,
)
from pstlab.graph import Graph, GraphError, complement_vertex, hamming_weight, hypercube
from pstlab.pst import protected_set
from pstlab.switching import BlockSpec, build_block_cube, partial_patterns, switched_hypercube

from oracles import expm_propagator, hypercube_transfer

K2 = Graph([[0, 1], [1, 0]])


def test_k2_quarter_period():
    np.testing.assert_allclose(propagator(K2, pi / 2), 1j * np.array([[0, 1], [1, 0]]), atol=1e-15)


def test_identity_at_zero(q4):
    np.testing.assert_allclose(propagator(q4, 0.0), np.eye(16), atol=1e-14)


@pytest.mark.parametrize("n", range(2, 8))
def test_hypercube_antipodal_modulus_one(n):
    u = propagator(hypercube(n), pi / 2)
    k = np.arange(2**n)
    np.testing.assert_allclose(np.abs(u[k, complement_vertex(k, n)]), 1.0, atol=1e-12)


@pytest.mark.parametrize("t", [0.3, pi / 4, 1.1, pi / 2, 2.9])
def test_propagator_matches_expm(t, q4, sq4):
    for g in (q4, sq4, build_block_cube(BlockSpec(5, (0.3, 1)))):
        np.testing.assert_allclose(propagator(g, t), expm_propagator(g.adj, t), atol=1e-11)


def test_hypercube_fidelity_closed_form():
    n = 4
    g = hypercube(n)
    for t in (0.2, pi / 4, 1.3, pi / 2):
        u = np.abs(propagator(g, t)) ** 2
        for y in range(16):
            assert u[0, y] == pytest.approx(hypercube_transfer(n, t, hamming_weight(y)), abs=1e-12)


def test_fidelity_examples(q4, sq4):
    assert fidelity(q4, 0, 15, pi / 2) == pytest.approx(1.0, abs=1e-9)
    assert fidelity(q4, 3, 3, 0.0) == pytest.approx(1.0, abs=1e-12)
    # oracle: weight-2 vertices paired only with their complements in the switched cube
    ref = np.abs(expm_propagator(sq4.adj, pi / 2)) ** 2
    for v in (3, 5, 6, 9, 10, 12):
        assert fidelity(sq4, 0, v, pi / 2) == pytest.approx(0.0, abs=1e-12)
        assert fidelity(sq4, 0, v, pi / 2) == pytest.approx(ref[0, v], abs=1e-12)
    with pytest.raises(IndexError):
        fidelity(q4, 0, 16, 1.0)


def test_fidelity_symmetric(rng, sq4):
    for _ in range(5):
        t = float(rng.uniform(0, 4))
        j, k = rng.integers(0, 16, 2)
        assert fidelity(sq4, j, k, t) == pytest.approx(fidelity(sq4, k, j, t), abs=1e-13)


def random_graph(rng, m):
    a = np.triu(rng.random((m, m)) < 0.35, 1) * rng.choice([1.0, 0.5, 2.0], (m, m))
    return Graph(a + a.T)


def test_randomized_unitarity_semigroup_rowsums(rng):
    for _ in range(100):
        m = int(rng.integers(2, 65))
        g = random_graph(rng, m)
        t1, t2 = rng.uniform(0, 3, 2)
        u1, u2, u12 = propagator(g, t1), propagator(g, t2), propagator(g, t1 + t2)
        np.testing.assert_allclose(u1 @ u1.conj().T, np.eye(m), atol=1e-9)
        np.testing.assert_allclose(u2 @ u1, u12, atol=1e-9)
        np.testing.assert_allclose((np.abs(u1) ** 2).sum(axis=1), 1.0, atol=1e-9)


def test_trace_endpoints(q4):
    tr = fidelity_trace(q4, 0, 15, [0, pi / 4, pi / 2])
    np.testing.assert_allclose(tr.values, [0.0, 1 / 16, 1.0], atol=1e-12)
    assert tr.source == 0 and tr.target == 15


def test_trace_in_unit_interval(rng, sq4):
    ts = np.linspace(0, 2 * pi, 200)
    tr = fidelity_trace(sq4, 1, 7, ts)
    assert np.all(tr.values >= 0) and np.all(tr.values <= 1 + 1e-9)
    with pytest.raises(ValueError):
        fidelity_trace(sq4, 0, 1, [0.5, 0.5])


def test_trace_partial_matches_hypercube():
    ts = np.linspace(0, 3, 61)
    a = fidelity_trace(build_block_cube(BlockSpec(5, (1, 0))), 0, 31, ts).values
    b = fidelity_trace(hypercube(5), 0, 31, ts).values
    np.testing.assert_allclose(a, b, atol=1e-9)
    np.testing.assert_allclose(b, np.sin(ts) ** 10, atol=1e-12)


def test_trace_csv_format(q4):
    text = fidelity_trace(q4, 0, 15, [0.0, pi / 2]).to_csv()
    lines = text.splitlines()
    assert lines[0] == "t,fidelity"
    assert lines[2].startswith("1.5707963267949,")


@pytest.mark.parametrize("n", [5, 6])
def test_protected_rows_preserved(n):
    base = hypercube(n)
    rows = protected_set(n)
    for t in (0.3, pi / 4, pi / 2, 1.7):
        ref = propagator(base, t)[rows]
        for pattern in partial_patterns(n):
            u = propagator(build_block_cube(BlockSpec(n, pattern)), t)
            np.testing.assert_allclose(u[rows], ref, atol=1e-9)


def test_single_segment_schedule(sq4):
    s = EvolutionSchedule.of((sq4, 0.7))
    np.testing.assert_allclose(schedule_propagator(s), propagator(sq4, 0.7), atol=1e-13)


def test_schedule_order_first_segment_first(q4, sq4):
    s = EvolutionSchedule.of((q4, 0.4), (sq4, 0.9))
    expect = expm_propagator(sq4.adj, 0.9) @ expm_propagator(q4.adj, 0.4)
    np.testing.assert_allclose(schedule_propagator(s), expect, atol=1e-11)
    p = transfer_probability(s, 1, 6)
    assert p == pytest.approx(abs(expect[6, 1]) ** 2, abs=1e-12)


def test_schedule_protected_rows_equal_switched():
    q5, s5 = hypercube(5), switched_hypercube(5)
    u = schedule_propagator(EvolutionSchedule.of((q5, pi / 4), (s5, pi / 4)))
    ref = propagator(s5, pi / 2)
    rows = protected_set(5)
    np.testing.assert_allclose(u[rows], ref[rows], atol=1e-9)


def test_schedule_validation(q4):
    with pytest.raises(GraphError):
        EvolutionSchedule.of((q4, 1.0), (hypercube(3), 1.0))
    with pytest.raises(GraphError):
        EvolutionSchedule.of((q4, -1.0))
    with pytest.raises(GraphError):
        EvolutionSchedule(())
    s = EvolutionSchedule.of((q4, 0.5), (q4, 0.25))
    assert s.total_time == 0.75
    assert s.with_final_duration(1.0).total_time == 1.5


def test_schedule_json_roundtrip(q4, sq4, tmp_path):
    s = EvolutionSchedule.of((q4, 0.5), (sq4, 0.25))
    back = load_schedule(schedule_to_dict(s))
    assert all(a.graph.same_as(b.graph) and a.duration == b.duration for a, b in zip(s.segments, back.segments))
    (tmp_path / "q4.json").write_text(q4.to_json())
    ref = load_schedule({"segments": [{"graph": "q4.json", "duration": 1.0}]}, base=tmp_path)
    assert ref.segments[0].graph.same_as(q4)
    with pytest.raises(GraphError):
        load_schedule({"segments": [{"graph": {"build": "hypercube", "n": 4}, "duration": 1.0}]})
