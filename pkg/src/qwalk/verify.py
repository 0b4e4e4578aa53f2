"""
Property suites comparing the simulator with its closed forms.

Each suite returns a :class:`VerifyReport`; ``passed`` is true only if every
residual is within its tolerance.  Sizes are fixed so reports are
reproducible.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import analytic as an
from .bessel import bessel_j, bessel_j_quadrature
from .maze import build_maze
from .walk import (
    LocalizedConnection,
    LocalizedStart,
    Psi1,
    Psi2,
    Psi3,
    Psi4,
    SuperposedInit,
    TwoStar,
    connection_amplitudes,
    evolve,
    mirror_lift,
    normal_side,
    prepare,
    unitary_matrix,
)

__all__ = ["VerifyReport", "SUITES", "run_suite", "run_all"]


@dataclass
class VerifyReport:
    suite: str
    cases: int = 0
    max_residual: float = 0.0
    comparisons: list = field(default_factory=list)
    passed: bool = True

    def check(self, name: str, value: float, bound: float) -> None:
        ok = bool(value <= bound)
        self.cases += 1
        self.max_residual = max(self.max_residual, float(value))
        self.comparisons.append({"case": name, "value": float(value), "bound": float(bound), "ok": ok})
        self.passed = self.passed and ok

    def to_dict(self) -> dict:
        return asdict(self)


SUBSPACE_SIZES = ((2, 4), (3, 8), (5, 16))


def unitarity() -> VerifyReport:
    rep = VerifyReport("unitarity")
    for topo, M, N in [("chain", M, N) for M, N in SUBSPACE_SIZES] + [("ring", 4, 6), ("chain", 20, 10)]:
        U = unitary_matrix(build_maze(topo, M, N, 0))
        resid = np.abs(U.T @ U - np.eye(U.shape[0])).max()
        rep.check(f"{topo} M={M} N={N}", resid, 1e-12)
    return rep


def subspace_residuals(M: int, N: int) -> dict:
    """Residuals of the four-state closure relations and the double-step rotation."""
    maze = build_maze("chain", M, N, 0)
    r, t = maze.r, maze.t
    c = 2 * math.sqrt(r * t)
    p1, p2, p3, p4 = (prepare(maze, p).amplitudes for p in (Psi1(), Psi2(), Psi3(), Psi4()))
    U = unitary_matrix(maze)
    U2 = U @ U
    return {
        "U psi1": np.abs(U @ p1 - p2).max(),
        "U psi2": np.abs(U @ p2 - ((r - t) * p1 + c * p3)).max(),
        "U psi3": np.abs(U @ p3 + p4).max(),
        "U psi4": np.abs(U @ p4 - ((t - r) * p3 + c * p1)).max(),
        "U2 psi1": np.abs(U2 @ p1 - ((r - t) * p1 + c * p3)).max(),
        "U2 psi3": np.abs(U2 @ p3 - ((r - t) * p3 - c * p1)).max(),
    }


def subspace() -> VerifyReport:
    rep = VerifyReport("subspace")
    for M, N in SUBSPACE_SIZES:
        for name, val in subspace_residuals(M, N).items():
            rep.check(f"{name} M={M} N={N}", val, 1e-12)
    return rep


def ring_exact_residual(M: int, N: int, max_steps: int, k: int = 1) -> float:
    """Largest ``|simulated - exact|`` over all offsets, amplitudes and probabilities."""
    maze = build_maze("ring", M, N, 0)
    spec = an.RingSpectrum(M, N)
    s = prepare(maze, LocalizedConnection(k))
    worst = 0.0
    for steps in range(0, max_steps + 1, 2):
        if steps:
            s = evolve(maze, s, 2)
        for b in range(M):
            target = (k + b - 1) % M + 1
            sim = connection_amplitudes(maze, s, target)
            ex = an.ring_amplitude_exact(spec, b, steps)
            worst = max(worst, abs(sim[0] - ex.e_plus), abs(sim[1] - ex.e_minus),
                        abs(sim[0] ** 2 + sim[1] ** 2 - ex.probability))
    return worst


def ring_exact() -> VerifyReport:
    rep = VerifyReport("ring-exact")
    for M, N in ((5, 20), (8, 32), (11, 450)):
        top = 4 * an.optimal_steps_localized(N)
        rep.check(f"ring M={M} N={N} steps<={top}", ring_exact_residual(M, N, top), 1e-9)
    return rep


def mirror_residual(M: int, N: int, max_steps: int = 100) -> float:
    """Chain evolution vs. the normal half of the doubled-ring evolution."""
    maze = build_maze("chain", M, N, 0)
    inits = [LocalizedStart(), SuperposedInit()]
    inits += [LocalizedConnection(k) for k in range(1, M)]
    if M >= 2:
        inits.append(TwoStar(1))
    worst = 0.0
    for p in inits:
        s = prepare(maze, p)
        ring, rs = mirror_lift(maze, s)
        for _ in range(0, max_steps, 2):
            s = evolve(maze, s, 2)
            rs = evolve(ring, rs, 2)
            worst = max(worst, float(np.abs(normal_side(maze, rs).amplitudes - s.amplitudes).max()))
    return worst


def mirror() -> VerifyReport:
    rep = VerifyReport("mirror")
    for M, N in ((4, 16), (11, 450)):
        rep.check(f"chain M={M} N={N}", mirror_residual(M, N), 1e-10)
    return rep


BOUND_NS = (16, 64, 256, 1024)


def bounds() -> VerifyReport:
    rep = VerifyReport("bounds")
    for N in BOUND_NS:
        for case in ("superposed", "superposed_optimal", "localized"):
            rep.check(f"{case} N={N}", an.max_step_error(case, N),
                      an.integer_step_error_bound(case, N))
    return rep


def bessel() -> VerifyReport:
    rep = VerifyReport("bessel")
    worst, where = 0.0, None
    for n in range(0, 65):
        for z in np.linspace(0.0, 200.0, 41):
            d = abs(bessel_j(n, float(z)) - bessel_j_quadrature(n, float(z)))
            if d >= worst:
                worst, where = d, (n, float(z))
    rep.check(f"order<=64 z<=200 worst at {where}", worst, 1e-8)
    return rep


def eigenvectors() -> VerifyReport:
    rep = VerifyReport("eigenvectors")
    for M, N in ((2, 3), (3, 4), (4, 8), (5, 20), (8, 24)):
        res = an.ring_eigenvector_check(an.RingSpectrum(M, N))
        rep.check(f"eigen-residual M={M} N={N}", res["residual"], 1e-9)
        rep.check(f"normalization M={M} N={N}", res["norm_error"], 1e-10)
    return rep


SUITES = {
    "unitarity": unitarity,
    "subspace": subspace,
    "ring-exact": ring_exact,
    "mirror": mirror,
    "bounds": bounds,
    "bessel": bessel,
    "eigenvectors": eigenvectors,
}


def run_suite(name: str) -> VerifyReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return SUITES[name]()


def run_all() -> list:
    return [fn() for fn in SUITES.values()]
