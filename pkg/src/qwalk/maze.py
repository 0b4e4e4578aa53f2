"""
Chains and rings of star graphs with hidden connections.

A maze is ``M`` stars with ``N`` spokes each.  Star ``j`` has center ``A_j``
and spokes ``B_jk`` for ``k = 1..N-1``; spoke ``B_j1`` is the connection
(junction) shared with star ``j+1``.  On a chain ``B_01`` is START and
``B_M1`` is END; on a ring junction ``M`` closes the loop back to star 1.

Directed edge states live in a canonical index space of size ``2*M*N``::

    index = direction * M * N + (j - 1) * N + slot

with ``direction`` 0 for center-to-spoke (``|A_j, B>``) and 1 for
spoke-to-center (``|B, A_j>``).  ``slot`` 0 is the junction towards the
previous star, ``slot`` 1 the junction towards the next star and
``slot = k`` (``k >= 2``) the plain spoke ``B_jk``.

The internal labels are never shown to search strategies.  Every star gets a
seeded permutation of ``1..N-1`` as external spoke labels, and the oracle
surface (:func:`neighbors`, :func:`external_name`) speaks only those.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Union

import numpy as np

__all__ = [
    "Center",
    "Spoke",
    "Junction",
    "Vertex",
    "DirectedEdge",
    "MazeSpec",
    "MazeError",
    "SizingError",
    "NeighborInfo",
    "build_maze",
    "neighbors",
    "edge_index",
    "index_edge",
    "external_name",
    "reveal_path",
    "maze_to_json",
    "maze_from_json",
    "save_maze",
    "load_maze",
    "START",
    "END",
]

MAZE_FORMAT = "qwalk-maze"
MAZE_VERSION = 1

START = "S"
END = "E"

OUT, IN = 0, 1


class MazeError(ValueError):
    """Invalid maze, vertex name, edge or index."""


class SizingError(MazeError):
    """Star count or spoke count outside the supported range."""


class Center(NamedTuple):
    j: int


class Spoke(NamedTuple):
    j: int
    k: int


class Junction(NamedTuple):
    k: int


Vertex = Union[Center, Spoke, Junction]


class DirectedEdge(NamedTuple):
    tail: Vertex
    head: Vertex


class NeighborInfo(NamedTuple):
    names: list
    is_start: bool
    is_end: bool


@dataclass(frozen=True)
class MazeSpec:
    """Immutable maze instance.

    ``label_maps[j-1][k-1]`` is the external label of internal spoke ``k``
    of star ``j``.
    """

    topology: str
    M: int
    N: int
    seed: int
    label_maps: tuple
    _inverse: tuple = field(init=False, repr=False, compare=False)
    _answers: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        _check_sizes(self.topology, self.M, self.N)
        maps = tuple(tuple(int(x) for x in row) for row in self.label_maps)
        if len(maps) != self.M:
            raise MazeError(f"expected {self.M} label maps, got {len(maps)}")
        inverse = []
        for j, row in enumerate(maps, start=1):
            if len(row) != self.N - 1 or len(set(row)) != self.N - 1:
                raise MazeError(f"label map of star {j} is not a bijection on N-1 spokes")
            inverse.append({label: k for k, label in enumerate(row, start=1)})
        object.__setattr__(self, "label_maps", maps)
        object.__setattr__(self, "_inverse", tuple(inverse))
        object.__setattr__(self, "_answers", {})

    @property
    def t(self) -> float:
        """Transmission amplitude of a center, ``2/N``."""
        return 2.0 / self.N

    @property
    def r(self) -> float:
        """Reflection amplitude of a center, ``(N-2)/N``."""
        return (self.N - 2) / self.N

    @property
    def dim(self) -> int:
        return 2 * self.M * self.N

    @property
    def is_chain(self) -> bool:
        return self.topology == "chain"

    def junctions(self) -> range:
        return range(0, self.M + 1) if self.is_chain else range(1, self.M + 1)


def _check_sizes(topology: str, M: int, N: int) -> None:
    if topology not in ("chain", "ring"):
        raise MazeError(f"unknown topology {topology!r}")
    if N < 3:
        raise SizingError(f"need N >= 3 spokes per star, got {N}")
    min_m = 1 if topology == "chain" else 2
    if M < min_m:
        raise SizingError(f"a {topology} needs M >= {min_m} stars, got {M}")


def build_maze(topology: str, M: int, N: int, seed: int) -> MazeSpec:
    """Build a maze whose hidden labels are a deterministic function of ``seed``."""
    _check_sizes(topology, M, N)
    rng = np.random.default_rng(seed)
    maps = tuple(tuple(int(x) + 1 for x in rng.permutation(N - 1)) for _ in range(M))
    return MazeSpec(topology, M, N, int(seed), maps)


# ---------------------------------------------------------------------------
# canonical index space


def _junction_slots(maze: MazeSpec, k: int) -> tuple:
    """(star, slot) pairs of the centers adjacent to junction ``k``."""
    if k not in maze.junctions():
        raise MazeError(f"no junction {k} on a {maze.topology} of {maze.M} stars")
    pairs = []
    if k >= 1:
        pairs.append((k, 1))
    if maze.is_chain:
        if k < maze.M:
            pairs.append((k + 1, 0))
    else:
        pairs.append((k % maze.M + 1, 0))
    return tuple(pairs)


def _slot_vertex(maze: MazeSpec, j: int, slot: int) -> Vertex:
    if slot >= 2:
        return Spoke(j, slot)
    if slot == 1:
        return Junction(j)
    if j > 1:
        return Junction(j - 1)
    return Junction(0) if maze.is_chain else Junction(maze.M)


def _edge_slot(maze: MazeSpec, center: Center, other: Vertex) -> int:
    j = center.j
    if not 1 <= j <= maze.M:
        raise MazeError(f"no star {j}")
    if isinstance(other, Spoke):
        if other.j != j or not 2 <= other.k <= maze.N - 1:
            raise MazeError(f"{other} is not a spoke of star {j}")
        return other.k
    if isinstance(other, Junction):
        for star, slot in _junction_slots(maze, other.k):
            if star == j:
                return slot
    raise MazeError(f"{center} and {other} are not adjacent")


def edge_index(maze: MazeSpec, e: DirectedEdge) -> int:
    """Canonical index of a directed edge state."""
    if isinstance(e.tail, Center):
        direction, center, other = OUT, e.tail, e.head
    elif isinstance(e.head, Center):
        direction, center, other = IN, e.head, e.tail
    else:
        raise MazeError(f"{e} does not touch a star center")
    slot = _edge_slot(maze, center, other)
    return direction * maze.M * maze.N + (center.j - 1) * maze.N + slot


def index_edge(maze: MazeSpec, i: int) -> DirectedEdge:
    """Inverse of :func:`edge_index`."""
    if not 0 <= i < maze.dim:
        raise MazeError(f"edge index {i} outside 0..{maze.dim - 1}")
    direction, rest = divmod(i, maze.M * maze.N)
    s, slot = divmod(rest, maze.N)
    center = Center(s + 1)
    other = _slot_vertex(maze, s + 1, slot)
    if direction == OUT:
        return DirectedEdge(center, other)
    return DirectedEdge(other, center)


def junction_edge_indices(maze: MazeSpec, k: int) -> tuple:
    """Indices of the outgoing edges ``|A, B_k1>`` pointing at junction ``k``.

    Ordered as ``(e_plus, e_minus)`` for interior junctions: the edge from the
    star after the junction first, then the edge from the star before it.
    Terminal junctions of a chain have a single edge.
    """
    pairs = _junction_slots(maze, k)
    idx = [(j - 1) * maze.N + slot for j, slot in pairs]
    return tuple(reversed(idx))


# ---------------------------------------------------------------------------
# external names and the oracle


def _end_name(maze: MazeSpec) -> str:
    return f"B{maze.M}:{maze.label_maps[maze.M - 1][0]}"


def external_name(maze: MazeSpec, v: Vertex) -> str:
    """Name of ``v`` as the oracle reports it."""
    if isinstance(v, Center):
        if not 1 <= v.j <= maze.M:
            raise MazeError(f"no star {v.j}")
        return f"A{v.j}"
    if isinstance(v, Spoke):
        if not (1 <= v.j <= maze.M and 2 <= v.k <= maze.N - 1):
            raise MazeError(f"no spoke {v}")
        return f"B{v.j}:{maze.label_maps[v.j - 1][v.k - 1]}"
    if isinstance(v, Junction):
        if v.k not in maze.junctions():
            raise MazeError(f"no junction {v.k}")
        if v.k == 0:
            return START
        return f"B{v.k}:{maze.label_maps[v.k - 1][0]}"
    raise MazeError(f"not a vertex: {v!r}")


def _parse_name(maze: MazeSpec, name: str) -> Vertex:
    if maze.is_chain and name == START:
        return Junction(0)
    if maze.is_chain and name == END:
        return Junction(maze.M)
    try:
        if name.startswith("A"):
            j = int(name[1:])
            if 1 <= j <= maze.M:
                return Center(j)
        elif name.startswith("B"):
            star, label = name[1:].split(":")
            j, label = int(star), int(label)
            if 1 <= j <= maze.M and label in maze._inverse[j - 1]:
                k = maze._inverse[j - 1][label]
                return Junction(j) if k == 1 else Spoke(j, k)
    except ValueError:
        pass
    raise MazeError(f"unknown vertex name {name!r}")


def _adjacent(maze: MazeSpec, v: Vertex) -> list:
    if isinstance(v, Center):
        back = _slot_vertex(maze, v.j, 0)
        spokes = [Junction(v.j)] + [Spoke(v.j, k) for k in range(2, maze.N)]
        return [back] + spokes
    if isinstance(v, Spoke):
        return [Center(v.j)]
    return [Center(j) for j, _ in _junction_slots(maze, v.k)]


def neighbors(maze: MazeSpec, name: str) -> NeighborInfo:
    """Oracle query: external names of the neighbors of ``name``.

    Spoke names of a center are listed in label order so the position of the
    connection is not revealed.  ``"E"`` is accepted as an alias for the END
    vertex of a chain; in neighbor lists END appears under its spoke label.
    """
    hit = maze._answers.get(name)
    if hit is not None:
        return NeighborInfo(list(hit.names), hit.is_start, hit.is_end)
    v = _parse_name(maze, name)
    adj = [external_name(maze, u) for u in _adjacent(maze, v)]
    if isinstance(v, Center):
        own = sorted(adj[1:], key=lambda s: int(s.split(":")[1]))
        adj = adj[:1] + own
    is_start = maze.is_chain and v == Junction(0)
    is_end = maze.is_chain and v == Junction(maze.M)
    info = NeighborInfo(adj, is_start, is_end)
    maze._answers[name] = info
    return NeighborInfo(list(adj), is_start, is_end)


def reveal_path(maze: MazeSpec) -> list:
    """Ground-truth path as external names, START first.

    Privileged: for verification only, recovery strategies never call it.
    On a ring the junctions are listed from junction 1 to junction M.
    """
    return [external_name(maze, Junction(k)) for k in maze.junctions()]


# ---------------------------------------------------------------------------
# serialization


def maze_to_json(maze: MazeSpec) -> str:
    doc = {
        "format": MAZE_FORMAT,
        "version": MAZE_VERSION,
        "topology": maze.topology,
        "M": maze.M,
        "N": maze.N,
        "seed": maze.seed,
        "label_maps": [list(row) for row in maze.label_maps],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def maze_from_json(text: str) -> MazeSpec:
    doc = json.loads(text)
    if doc.get("format") != MAZE_FORMAT or doc.get("version") != MAZE_VERSION:
        raise MazeError("not a version 1 maze document")
    return MazeSpec(doc["topology"], int(doc["M"]), int(doc["N"]), int(doc["seed"]),
                    tuple(tuple(row) for row in doc["label_maps"]))


def save_maze(maze: MazeSpec, path) -> None:
    Path(path).write_text(maze_to_json(maze))


def load_maze(path) -> MazeSpec:
    return maze_from_json(Path(path).read_text())
