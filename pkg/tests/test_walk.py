import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwalk.maze import (
    Center,
    DirectedEdge,
    Junction,
    MazeError,
    Spoke,
    _parse_name,
    build_maze,
    edge_index,
    index_edge,
)
from qwalk.walk import (
    BasisEdge,
    LocalizedConnection,
    LocalizedStart,
    Psi1,
    Psi3,
    SuperposedInit,
    TwoStar,
    WalkState,
    apply_step,
    connection_amplitudes,
    connection_probability,
    even_steps,
    evolve,
    measure,
    mirror_lift,
    normal_side,
    outcome_probabilities,
    prepare,
    unitary_matrix,
)


def naive_step(maze, amps):
    """Edge-by-edge reference implementation of one step."""
    out = np.zeros_like(amps)
    M, t = maze.M, maze.t
    for i, a in enumerate(amps):
        if a == 0:
            continue
        tail, head = index_edge(maze, i)
        if isinstance(head, Center):
            for other in _center_edges(maze, head):
                coeff = t - 1 if other == tail else t
                out[edge_index(maze, DirectedEdge(head, other))] += coeff * a
        elif isinstance(head, Spoke):
            out[edge_index(maze, DirectedEdge(head, tail))] += a
        else:
            k = head.k
            if maze.is_chain and k in (0, M):
                out[edge_index(maze, DirectedEdge(head, tail))] -= a
            else:
                nxt = [Center(j) for j in _centers_of(maze, k) if Center(j) != tail][0]
                out[edge_index(maze, DirectedEdge(head, nxt))] += a
    return out


def _center_edges(maze, c):
    j = c.j
    back = Junction(j - 1) if j > 1 else (Junction(0) if maze.is_chain else Junction(maze.M))
    return [back, Junction(j)] + [Spoke(j, k) for k in range(2, maze.N)]


def _centers_of(maze, k):
    if maze.is_chain:
        return [k, k + 1]
    return [k, k % maze.M + 1]


@pytest.mark.parametrize("topology,M,N", [("chain", 3, 5), ("ring", 3, 5), ("chain", 1, 4), ("ring", 2, 3)])
def test_step_matches_edge_by_edge_reference(topology, M, N):
    maze = build_maze(topology, M, N, 1)
    rng = np.random.default_rng(0)
    amps = rng.normal(size=maze.dim)
    assert np.allclose(apply_step(maze, WalkState(amps)).amplitudes, naive_step(maze, amps), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["chain", "ring"]), st.integers(2, 7), st.integers(3, 12),
       st.integers(0, 2**32 - 1), st.integers(1, 40))
def test_evolution_preserves_norm(topology, M, N, seed, steps):
    maze = build_maze(topology, M, N, 0)
    amps = np.random.default_rng(seed).normal(size=maze.dim)
    amps /= np.linalg.norm(amps)
    s = evolve(maze, WalkState(amps), steps)
    assert s.norm() == pytest.approx(1.0, abs=1e-12)
    assert s.step_count == steps


def test_evolve_composes():
    maze = build_maze("chain", 4, 9, 0)
    s = prepare(maze, SuperposedInit())
    one = evolve(maze, evolve(maze, s, 5), 7)
    assert np.allclose(one.amplitudes, evolve(maze, s, 12).amplitudes, atol=1e-14)
    step = s
    for _ in range(12):
        step = apply_step(maze, step)
    assert np.allclose(step.amplitudes, one.amplitudes, atol=1e-14)


def test_evolve_does_not_mutate_input():
    maze = build_maze("chain", 3, 6, 0)
    s = prepare(maze, LocalizedStart())
    before = s.amplitudes.copy()
    evolve(maze, s, 6)
    assert np.array_equal(before, s.amplitudes)
    with pytest.raises(ValueError):
        evolve(maze, s, -1)


def test_unitary_is_real_orthogonal():
    U = unitary_matrix(build_maze("ring", 3, 7, 0))
    assert np.abs(U @ U.T - np.eye(len(U))).max() < 1e-13


@pytest.mark.parametrize("p", [Psi1(), Psi3(), SuperposedInit(), LocalizedStart(),
                               LocalizedConnection(2), TwoStar(1)])
def test_prescriptions_are_normalized(p):
    maze = build_maze("chain", 4, 8, 0)
    assert prepare(maze, p).norm() == pytest.approx(1.0, abs=1e-14)


def test_prescriptions_are_validated():
    chain, ring = build_maze("chain", 4, 8, 0), build_maze("ring", 4, 8, 0)
    for bad in (LocalizedConnection(0), LocalizedConnection(4), TwoStar(0), TwoStar(4)):
        with pytest.raises(MazeError):
            prepare(chain, bad)
    with pytest.raises(MazeError):
        prepare(ring, LocalizedStart())
    assert prepare(ring, LocalizedConnection(4)).norm() == pytest.approx(1.0)
    with pytest.raises(TypeError):
        prepare(chain, "start")


def test_psi3_weights():
    # half weight on START and END, full weight on each interior junction
    maze = build_maze("chain", 5, 10, 0)
    s = prepare(maze, Psi3())
    p = [connection_probability(maze, s, k) for k in maze.junctions()]
    assert p[0] == pytest.approx(1 / 10) and p[-1] == pytest.approx(1 / 10)
    assert all(x == pytest.approx(1 / 5) for x in p[1:-1])
    assert sum(p) == pytest.approx(1.0)


def test_localized_connection_amplitudes():
    maze = build_maze("chain", 4, 8, 0)
    s = prepare(maze, LocalizedConnection(2))
    e_plus, e_minus = connection_amplitudes(maze, s, 2)
    assert e_plus == pytest.approx(1 / math.sqrt(2)) and e_minus == pytest.approx(1 / math.sqrt(2))
    assert connection_probability(maze, s, 2) == pytest.approx(1.0)


def test_terminals_reflect_with_minus_sign():
    maze = build_maze("chain", 2, 5, 0)
    s = apply_step(maze, prepare(maze, LocalizedStart()))
    i = edge_index(maze, DirectedEdge(Junction(0), Center(1)))
    assert s.amplitudes[i] == -1.0


def test_even_steps():
    assert [even_steps(x) for x in (0, 0.9, 1.0, 2.9, 3.0, 47.6, 48.9)] == [0, 0, 2, 2, 4, 48, 48]
    with pytest.raises(ValueError):
        even_steps(-1)


def test_measurement_frequencies():
    maze = build_maze("chain", 2, 4, 3)
    s = evolve(maze, prepare(maze, SuperposedInit()), 3)
    probs = outcome_probabilities(s)
    rng = np.random.default_rng(5)
    n = 20000
    counts = {}
    for _ in range(n):
        o = measure(maze, s, rng)
        key = edge_index(maze, _edge_of(maze, o))
        counts[key] = counts.get(key, 0) + 1
    support = probs > 1e-12
    obs = np.array([counts.get(i, 0) for i in range(maze.dim)])
    assert obs[~support].sum() == 0
    exp = probs[support] * n
    chi2 = float(((obs[support] - exp) ** 2 / exp).sum())
    assert chi2 < 45.0  # at most 15 dof, p < 1e-4


def _edge_of(maze, outcome):
    a, b = _parse_name(maze, outcome.tail), _parse_name(maze, outcome.head)
    return DirectedEdge(a, b)


def test_measurement_uses_external_names():
    maze = build_maze("chain", 3, 6, 9)
    s = prepare(maze, BasisEdge(DirectedEdge(Center(2), Spoke(2, 4))))
    o = measure(maze, s, np.random.default_rng(0))
    assert o.star == 2 and o.direction == "out"
    assert o.tail == "A2" and o.head == f"B2:{maze.label_maps[1][3]}"
    assert o.spoke == o.head


def test_mirror_lift_round_trip():
    maze = build_maze("chain", 3, 6, 0)
    s = prepare(maze, TwoStar(1))
    ring, rs = mirror_lift(maze, s)
    assert ring.M == 6 and rs.norm() == pytest.approx(math.sqrt(2))
    assert np.array_equal(normal_side(maze, rs).amplitudes, s.amplitudes)
    with pytest.raises(MazeError):
        mirror_lift(ring, rs)
