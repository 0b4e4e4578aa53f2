"""
State-vector simulation of the scattering walk on a maze.

Amplitudes are stored as a real ``float64`` vector over the canonical edge
index of :mod:`qwalk.maze`.  Internally the vector is viewed as an array of
shape ``(2, M, N)``: ``[0]`` holds the outgoing states ``|A_j, B>`` and
``[1]`` the incoming states ``|B, A_j>``.

One step of the walk scatters every occupied edge at its head vertex:

* plain spokes reflect, ``|A_j, B_jk> -> |B_jk, A_j>``;
* interior junctions transmit into the neighbouring star;
* START and END reflect with a factor ``-1``;
* a center maps incoming amplitudes ``a`` to ``t * sum(a) - a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .maze import (
    Center,
    DirectedEdge,
    MazeError,
    MazeSpec,
    build_maze,
    edge_index,
    external_name,
    index_edge,
    junction_edge_indices,
)

__all__ = [
    "WalkState",
    "Psi1",
    "Psi2",
    "Psi3",
    "Psi4",
    "SuperposedInit",
    "LocalizedStart",
    "LocalizedConnection",
    "TwoStar",
    "BasisEdge",
    "StatePrescription",
    "Outcome",
    "prepare",
    "apply_step",
    "evolve",
    "even_steps",
    "connection_probability",
    "connection_amplitudes",
    "outcome_probabilities",
    "measure",
    "unitary_matrix",
    "mirror_lift",
    "normal_side",
]

NORM_TOL = 1e-9


@dataclass
class WalkState:
    amplitudes: np.ndarray
    step_count: int = 0

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "WalkState":
        return WalkState(self.amplitudes.copy(), self.step_count)


# -- state prescriptions ----------------------------------------------------


@dataclass(frozen=True)
class Psi1:
    """Alternating-sign superposition of outgoing plain-spoke edges."""


@dataclass(frozen=True)
class Psi2:
    """Alternating-sign superposition of incoming plain-spoke edges."""


@dataclass(frozen=True)
class Psi3:
    """Alternating-sign superposition of outgoing edges on the path."""


@dataclass(frozen=True)
class Psi4:
    """Alternating-sign superposition of incoming edges on the path."""


@dataclass(frozen=True)
class SuperposedInit:
    """Every outgoing edge with amplitude ``(-1)^j / sqrt(MN)``."""


@dataclass(frozen=True)
class LocalizedStart:
    """The single edge ``|A_1, START>``."""


@dataclass(frozen=True)
class LocalizedConnection:
    """``(|A_{k+1}, B_k1> - |A_k, B_k1>) / sqrt(2)`` around a known junction."""

    k: int


@dataclass(frozen=True)
class TwoStar:
    """All outgoing edges of stars ``j`` (sign -1) and ``j+1`` (sign +1)."""

    j: int


@dataclass(frozen=True)
class BasisEdge:
    edge: DirectedEdge


StatePrescription = Union[Psi1, Psi2, Psi3, Psi4, SuperposedInit, LocalizedStart,
                          LocalizedConnection, TwoStar, BasisEdge]


def _view(maze: MazeSpec, amps: np.ndarray) -> np.ndarray:
    return amps.reshape(2, maze.M, maze.N)


def _alternating(M: int) -> np.ndarray:
    # (-1)^j for j = 1..M
    return np.where(np.arange(1, M + 1) % 2 == 0, 1.0, -1.0)


def prepare(maze: MazeSpec, p: StatePrescription) -> WalkState:
    """Build the initial state named by ``p``."""
    M, N = maze.M, maze.N
    amps = np.zeros(maze.dim)
    v = _view(maze, amps)
    sign = _alternating(M)[:, None]
    if isinstance(p, (Psi1, Psi2)):
        d = 0 if isinstance(p, Psi1) else 1
        v[d, :, 2:] = sign / math.sqrt(M * (N - 2))
    elif isinstance(p, (Psi3, Psi4)):
        d = 0 if isinstance(p, Psi3) else 1
        v[d, :, :2] = sign / math.sqrt(2 * M)
    elif isinstance(p, SuperposedInit):
        v[0] = sign / math.sqrt(M * N)
    elif isinstance(p, LocalizedStart):
        if not maze.is_chain:
            raise MazeError("a ring has no START vertex")
        v[0, 0, 0] = 1.0
    elif isinstance(p, LocalizedConnection):
        k = p.k
        if maze.is_chain and not 1 <= k <= M - 1:
            raise MazeError(f"connection index {k} outside 1..{M - 1}")
        if not maze.is_chain and not 1 <= k <= M:
            raise MazeError(f"connection index {k} outside 1..{M}")
        e_plus, e_minus = junction_edge_indices(maze, k)
        amps[e_plus] = 1 / math.sqrt(2)
        amps[e_minus] = -1 / math.sqrt(2)
    elif isinstance(p, TwoStar):
        j = p.j
        last = M - 1 if maze.is_chain else M
        if not 1 <= j <= last:
            raise MazeError(f"two-star index {j} outside 1..{last}")
        v[0, j - 1, :] = -1 / math.sqrt(2 * N)
        v[0, j % M, :] = 1 / math.sqrt(2 * N)
    elif isinstance(p, BasisEdge):
        amps[edge_index(maze, p.edge)] = 1.0
    else:
        raise TypeError(f"unknown state prescription {p!r}")
    return WalkState(amps)


# -- evolution --------------------------------------------------------------


def _step_into(src: np.ndarray, dst: np.ndarray, sums: np.ndarray, chain: bool, t: float) -> None:
    """Write ``U @ src`` into ``dst``; both are ``(2, M, N)`` views."""
    out, inc = src[0], src[1]
    new_out, new_inc = dst[0], dst[1]

    # centers: t * sum(incoming) - incoming
    np.sum(inc, axis=1, out=sums)
    sums *= t
    np.subtract(sums[:, None], inc, out=new_out)

    # plain spokes reflect
    new_inc[:, 2:] = out[:, 2:]
    # junctions transmit to the neighbouring star
    new_inc[1:, 0] = out[:-1, 1]
    new_inc[:-1, 1] = out[1:, 0]
    if chain:
        new_inc[0, 0] = -out[0, 0]
        new_inc[-1, 1] = -out[-1, 1]
    else:
        new_inc[0, 0] = out[-1, 1]
        new_inc[-1, 1] = out[0, 0]


def apply_step(maze: MazeSpec, s: WalkState) -> WalkState:
    """One application of the walk unitary."""
    dst = np.empty_like(s.amplitudes)
    sums = np.empty(maze.M)
    _step_into(_view(maze, s.amplitudes), _view(maze, dst), sums, maze.is_chain, maze.t)
    return WalkState(dst, s.step_count + 1)


def evolve(maze: MazeSpec, s: WalkState, steps: int) -> WalkState:
    """Apply the walk unitary ``steps`` times.

    Uses two ping-pong buffers; nothing else is allocated per step.
    """
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    a = s.amplitudes.copy()
    if steps == 0:
        return WalkState(a, s.step_count)
    b = np.empty_like(a)
    va, vb = _view(maze, a), _view(maze, b)
    sums = np.empty(maze.M)
    chain, t = maze.is_chain, maze.t
    for _ in range(steps):
        _step_into(va, vb, sums, chain, t)
        va, vb = vb, va
    return WalkState(va.reshape(-1), s.step_count + steps)


def even_steps(x: float) -> int:
    """Nearest even integer to ``x``, ties rounded up."""
    if x < 0:
        raise ValueError("step count must be non-negative")
    return 2 * int(math.floor(x / 2 + 0.5))


def unitary_matrix(maze: MazeSpec) -> np.ndarray:
    """Dense walk unitary, built column by column from :func:`apply_step`."""
    if maze.dim > 4000:
        raise MazeError(f"refusing to materialize a {maze.dim}x{maze.dim} unitary")
    U = np.zeros((maze.dim, maze.dim))
    basis = np.zeros(maze.dim)
    for i in range(maze.dim):
        basis[:] = 0.0
        basis[i] = 1.0
        U[:, i] = apply_step(maze, WalkState(basis)).amplitudes
    return U


# -- observables ------------------------------------------------------------


def connection_amplitudes(maze: MazeSpec, s: WalkState, target: int) -> tuple:
    """Amplitudes ``(<e+|s>, <e-|s>)`` of the success states of a junction.

    ``e+ = |A_{k+1}, B_k1>`` and ``e- = -|A_k, B_k1>``.  At START only
    ``e+`` exists and at END only ``e-``; the missing one is reported as 0.
    """
    idx = junction_edge_indices(maze, target)
    a = s.amplitudes
    if len(idx) == 2:
        return float(a[idx[0]]), float(-a[idx[1]])
    if target == 0:
        return float(a[idx[0]]), 0.0
    return 0.0, float(-a[idx[0]])


def connection_probability(maze: MazeSpec, s: WalkState, target: int) -> float:
    """Probability of finding the walker on the outgoing edges into junction ``target``.

    Interior junctions contribute two edges; START and END of a chain only
    one, which is how the last-star case is handled.
    """
    idx = junction_edge_indices(maze, target)
    return float(np.sum(s.amplitudes[list(idx)] ** 2))


class Outcome(NamedTuple):
    star: int
    tail: str
    head: str
    direction: str

    @property
    def spoke(self) -> str:
        return self.head if self.direction == "out" else self.tail


def outcome_probabilities(s: WalkState) -> np.ndarray:
    return s.amplitudes ** 2


def _describe(maze: MazeSpec, i: int) -> Outcome:
    e = index_edge(maze, i)
    tail, head = external_name(maze, e.tail), external_name(maze, e.head)
    if isinstance(e.tail, Center):
        return Outcome(e.tail.j, tail, head, "out")
    return Outcome(e.head.j, tail, head, "in")


class _Sampler:
    def __init__(self, probs: np.ndarray):
        cdf = np.cumsum(probs)
        self.cdf = cdf / cdf[-1]

    def draw(self, rng: np.random.Generator) -> int:
        i = int(np.searchsorted(self.cdf, rng.random(), side="right"))
        return min(i, len(self.cdf) - 1)


def measure(maze: MazeSpec, s: WalkState, rng: np.random.Generator) -> Outcome:
    """Sample an edge with probability ``amplitude**2`` and name it externally.

    The state is left untouched.
    """
    i = _Sampler(outcome_probabilities(s)).draw(rng)
    return _describe(maze, i)


# -- chain <-> doubled ring -------------------------------------------------


def _mirror_index(M: int, N: int) -> np.ndarray:
    """Ring index of the mirror partner of every chain edge.

    Chain star ``j`` maps to ring star ``j`` (normal half) and to ring star
    ``2M + 1 - j`` (mirror half).  The mirror swaps the two junction slots.
    """
    d, s, slot = np.meshgrid(np.arange(2), np.arange(M), np.arange(N), indexing="ij")
    mslot = np.where(slot == 0, 1, np.where(slot == 1, 0, slot))
    return (d * 2 * M * N + (2 * M - 1 - s) * N + mslot).reshape(-1)


def _normal_index(M: int, N: int) -> np.ndarray:
    d, s, slot = np.meshgrid(np.arange(2), np.arange(M), np.arange(N), indexing="ij")
    return (d * 2 * M * N + s * N + slot).reshape(-1)


def mirror_lift(maze: MazeSpec, s: WalkState) -> tuple:
    """Embed a chain state into a ring of ``2M`` stars as a mirroring state.

    Each chain amplitude appears on its normal edge and, negated, on the
    mirror edge.  The result is not normalized: its norm is ``sqrt(2)``.
    Returns ``(ring_maze, ring_state)``.
    """
    if not maze.is_chain:
        raise MazeError("only chain states can be lifted to the doubled ring")
    M, N = maze.M, maze.N
    ring = build_maze("ring", 2 * M, N, maze.seed)
    amps = np.zeros(ring.dim)
    amps[_normal_index(M, N)] = s.amplitudes
    amps[_mirror_index(M, N)] = -s.amplitudes
    return ring, WalkState(amps, s.step_count)


def normal_side(maze: MazeSpec, ring_state: WalkState) -> WalkState:
    """Read the normal half of a doubled-ring state back as a chain state."""
    return WalkState(ring_state.amplitudes[_normal_index(maze.M, maze.N)].copy(),
                     ring_state.step_count)
