"""
Path recovery strategies and Monte Carlo drivers.

Every strategy talks to the maze only through the oracle
(:func:`qwalk.maze.neighbors`) and through measurement outcomes, which carry
external names.  The ground truth (:func:`qwalk.maze.reveal_path`) is never
consulted here.

The walk is deterministic, so every round of a stage re-prepares the same
state and evolves it the same number of steps.  The evolved outcome
distribution is therefore computed once per (maze shape, initial state,
step count) and cached; each round still counts its unitary applications.
"""

from __future__ import annotations

import json
import math
from collections import OrderedDict
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .analytic import optimal_steps_localized, optimal_steps_superposed
from .maze import START, MazeSpec, NeighborInfo, neighbors
from .walk import (
    LocalizedConnection,
    LocalizedStart,
    Outcome,
    StatePrescription,
    SuperposedInit,
    TwoStar,
    _describe,
    _Sampler,
    evolve,
    outcome_probabilities,
    prepare,
)

__all__ = [
    "STRATEGIES",
    "RecoveryConfig",
    "RecoveryResult",
    "StrategyError",
    "recover_superposed",
    "recover_successive",
    "recover_unknown_start",
    "classical_baseline",
    "recover",
    "trial_rng",
    "run_trials",
    "summarize",
    "coupon_collector_rounds",
]

STRATEGIES = ("superposed", "successive", "unknown_start", "classical")
DEFAULT_MAX_ROUNDS = 50


class StrategyError(ValueError):
    """Strategy cannot run on the given maze."""


@dataclass(frozen=True)
class RecoveryConfig:
    strategy: str = "successive"
    max_rounds_per_stage: int = DEFAULT_MAX_ROUNDS
    trials: int = 1
    master_seed: int = 0
    step_override: Optional[int] = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise StrategyError(f"unknown strategy {self.strategy!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_rounds_per_stage < 1:
            raise ValueError("max_rounds_per_stage must be >= 1")
        if self.step_override is not None and (self.step_override < 0 or self.step_override % 2):
            raise ValueError("step_override must be a non-negative even integer")


@dataclass
class RecoveryResult:
    """Outcome of one recovery trial.

    ``rounds_per_connection`` has one entry per completed stage or discovery;
    a failed trial appends the rounds spent on the stage that ran out.
    """

    path: list
    success: bool
    total_unitary_applications: int
    total_oracle_queries: int
    rounds_per_connection: list
    measurement_log: list = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return sum(self.rounds_per_connection)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["measurement_log"] = [
            {"round": rnd, "outcome": out._asdict()} for rnd, out in self.measurement_log
        ]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)


# ---------------------------------------------------------------------------
# evolved distributions, shared across rounds and trials

_CACHE_SIZE = 64
_samplers: "OrderedDict[tuple, _Sampler]" = OrderedDict()


def _sampler(maze: MazeSpec, p: StatePrescription, steps: int) -> _Sampler:
    # amplitudes do not depend on the spoke labels, only on the maze shape
    key = (maze.topology, maze.M, maze.N, p, steps)
    hit = _samplers.get(key)
    if hit is not None:
        _samplers.move_to_end(key)
        return hit
    state = evolve(maze, prepare(maze, p), steps)
    s = _Sampler(outcome_probabilities(state))
    _samplers[key] = s
    if len(_samplers) > _CACHE_SIZE:
        _samplers.popitem(last=False)
    return s


class _Session:
    """Bookkeeping for one trial: rounds, unitary applications, oracle queries."""

    def __init__(self, maze: MazeSpec, rng: np.random.Generator):
        self.maze = maze
        self.rng = rng
        self.unitary = 0
        self.queries = 0
        self.round = 0
        self.log = []
        self._known = {}

    def run_round(self, p: StatePrescription, steps: int) -> Outcome:
        self.round += 1
        self.unitary += steps
        i = _sampler(self.maze, p, steps).draw(self.rng)
        out = _describe(self.maze, i)
        self.log.append((self.round, out))
        return out

    def query(self, name: str) -> NeighborInfo:
        info = self._known.get(name)
        if info is None:
            self.queries += 1
            info = neighbors(self.maze, name)
            self._known[name] = info
        return info

    def classify(self, out: Outcome):
        """``("start" | "end" | "connection" | "spoke", star_or_None)``.

        For a connection the star index is the lower of the two stars it joins.
        """
        info = self.query(out.spoke)
        if info.is_start:
            return "start", None
        if info.is_end:
            return "end", None
        if len(info.names) == 2:
            return "connection", min(int(n[1:]) for n in info.names)
        return "spoke", None

    def result(self, path, success, rounds) -> RecoveryResult:
        return RecoveryResult(path, success, self.unitary, self.queries, rounds, self.log)


def _require_chain(maze: MazeSpec, what: str) -> None:
    if not maze.is_chain:
        raise StrategyError(f"{what} recovery needs a chain maze, got a {maze.topology}")


# ---------------------------------------------------------------------------
# strategies


def recover_superposed(maze: MazeSpec, config: RecoveryConfig, rng) -> RecoveryResult:
    """Repeat the global alternating-sign search until every path element is seen.

    Each round prepares the superposed state, evolves it for the superposed
    optimum and measures.  START and END are recovered like connections.
    ``rounds_per_connection`` lists the rounds spent on each new discovery.
    The round budget is ``max_rounds_per_stage`` per path element.
    """
    _require_chain(maze, "superposed")
    if maze.N < 5:
        raise StrategyError("superposed recovery needs N >= 5")
    steps = config.step_override if config.step_override is not None \
        else optimal_steps_superposed(maze.N)
    session = _Session(maze, rng)
    M = maze.M
    found = {}
    start = end = None
    rounds, since = [], 0
    budget = config.max_rounds_per_stage * (M + 1)
    while len(found) < M - 1 or start is None or end is None:
        if session.round >= budget:
            return session.result(_assemble(start, found, end, M), False, rounds + [since])
        out = session.run_round(SuperposedInit(), steps)
        since += 1
        kind, star = session.classify(out)
        new = False
        if kind == "start" and start is None:
            start, new = out.spoke, True
        elif kind == "end" and end is None:
            end, new = out.spoke, True
        elif kind == "connection" and star not in found:
            found[star], new = out.spoke, True
        if new:
            rounds.append(since)
            since = 0
    return session.result(_assemble(start, found, end, M), True, rounds)


def _assemble(start, found, end, M) -> list:
    path = [start] if start is not None else []
    j = 1
    while j in found:
        path.append(found[j])
        j += 1
    if j == M and end is not None:
        path.append(end)
    return path


def recover_successive(maze: MazeSpec, config: RecoveryConfig, rng) -> RecoveryResult:
    """Find connections one at a time, starting each search on the last one found.

    Stage 0 starts on ``|A_1, START>``; stage ``k`` on the localized state
    around connection ``k``.  A round succeeds when it lands on a two-neighbor
    vertex joining stars ``k+1`` and ``k+2`` or, on the last stage, on END.
    """
    _require_chain(maze, "successive")
    steps = config.step_override if config.step_override is not None \
        else optimal_steps_localized(maze.N)
    session = _Session(maze, rng)
    M = maze.M
    path = [START]
    rounds = []
    for stage in range(M):
        p = LocalizedStart() if stage == 0 else LocalizedConnection(stage)
        last = stage == M - 1
        for r in range(1, config.max_rounds_per_stage + 1):
            out = session.run_round(p, steps)
            # the target junction touches only stars stage+1 and stage+2
            if out.star not in (stage + 1, stage + 2) or out.spoke == path[-1]:
                continue
            kind, star = session.classify(out)
            if (last and kind == "end") or (not last and kind == "connection" and star == stage + 1):
                path.append(out.spoke)
                rounds.append(r)
                break
        else:
            return session.result(path, False, rounds + [config.max_rounds_per_stage])
    return session.result(path, True, rounds)


def recover_unknown_start(maze: MazeSpec, config: RecoveryConfig, rng) -> RecoveryResult:
    """Recover the path knowing only the star order.

    Stage ``j`` prepares the two-star state on stars ``j`` and ``j+1`` and
    repeats until the connection between them is seen, together with START on
    the first stage and END on the last.  A one-star chain uses the global
    superposition instead.  Each stage collects its own targets.
    """
    _require_chain(maze, "unknown-start")
    if maze.N < 4:
        raise StrategyError("unknown-start recovery needs N >= 4")
    steps = config.step_override if config.step_override is not None \
        else optimal_steps_superposed(maze.N)
    session = _Session(maze, rng)
    M = maze.M
    found = {}
    start = end = None
    rounds = []
    stages = [(SuperposedInit(), 0)] if M == 1 else [(TwoStar(j), j) for j in range(1, M)]
    for p, j in stages:
        want_start = j <= 1
        want_end = j == M - 1 or M == 1
        seen = set()
        for r in range(1, config.max_rounds_per_stage + 1):
            out = session.run_round(p, steps)
            kind, star = session.classify(out)
            if kind == "start" and want_start:
                start = out.spoke
                seen.add("start")
            elif kind == "end" and want_end:
                end = out.spoke
                seen.add("end")
            elif kind == "connection" and star == j:
                found[j] = out.spoke
                seen.add("connection")
            need = {"connection"} if j else set()
            need |= {"start"} if want_start else set()
            need |= {"end"} if want_end else set()
            if need <= seen:
                rounds.append(r)
                break
        else:
            return session.result(_assemble(start, found, end, M), False,
                                  rounds + [config.max_rounds_per_stage])
    return session.result(_assemble(start, found, end, M), True, rounds)


def classical_baseline(maze: MazeSpec, config: RecoveryConfig, rng) -> RecoveryResult:
    """Probe each star's spokes in random order until the way onward turns up.

    Spoke labels of a star are ``1..N-1`` in some hidden order, so the probe
    names are known without asking the center.  ``rounds_per_connection``
    holds the number of probes spent on each star.
    """
    _require_chain(maze, "classical")
    session = _Session(maze, rng)
    M, N = maze.M, maze.N
    path = [START]
    per_star = []
    for j in range(1, M + 1):
        order = rng.permutation(N - 1) + 1
        for probes, label in enumerate(order, start=1):
            name = f"B{j}:{label}"
            info = session.query(name)
            if (j == M and info.is_end) or (j < M and len(info.names) == 2):
                path.append(name)
                per_star.append(probes)
                break
    return session.result(path, True, per_star)


_DISPATCH = {
    "superposed": recover_superposed,
    "successive": recover_successive,
    "unknown_start": recover_unknown_start,
    "classical": classical_baseline,
}


def recover(maze: MazeSpec, config: RecoveryConfig, rng) -> RecoveryResult:
    return _DISPATCH[config.strategy](maze, config, rng)


# ---------------------------------------------------------------------------
# Monte Carlo


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent stream ``index`` derived from ``master_seed``."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def run_trials(maze: MazeSpec, config: RecoveryConfig) -> list:
    """Run ``config.trials`` independent trials; trial ``i`` uses stream ``i``."""
    return [recover(maze, config, trial_rng(config.master_seed, i)) for i in range(config.trials)]


def summarize(results: list) -> dict:
    n = len(results)
    ok = [r for r in results if r.success]
    return {
        "trials": n,
        "success_rate": len(ok) / n,
        "mean_rounds": float(np.mean([r.rounds for r in results])),
        "mean_unitary_applications": float(np.mean([r.total_unitary_applications for r in results])),
        "mean_oracle_queries": float(np.mean([r.total_oracle_queries for r in results])),
    }


def coupon_collector_rounds(weights, rng: np.random.Generator) -> int:
    """Draws until every category with positive weight has been seen.

    ``weights`` may sum to less than one; the remainder is a draw that
    reveals nothing.
    """
    w = np.asarray(weights, dtype=float)
    cdf = np.cumsum(w)
    missing = set(np.flatnonzero(w > 0).tolist())
    draws = 0
    while missing:
        draws += 1
        i = int(np.searchsorted(cdf, rng.random(), side="right"))
        missing.discard(i)
    return draws
