"""
Closed-form predictions for the walk.

* :class:`ReducedGroverModel` -- the two-dimensional rotation the walk
  performs (per double step) between the off-path and on-path superpositions
  when started from a global alternating-sign state.
* :class:`RingSpectrum` -- Bloch frequencies of the double step on a ring of
  stars, and the exact amplitude sums for transport between junctions.
* Chain amplitudes obtained from a ring of twice the length, where the
  mirrored half of the ring reproduces the sign-flipping reflections at
  START and END.
* Integer step-count error bounds.

Amplitude conventions: for a junction ``q`` the success states are
``e+ = |A_{q+1}, B_q1>`` and ``e- = -|A_q, B_q1>``, matching
:func:`qwalk.walk.connection_amplitudes`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .bessel import bessel_j

__all__ = [
    "ReducedGroverModel",
    "RingSpectrum",
    "AmplitudePair",
    "grover_psuc",
    "optimal_steps_superposed",
    "optimal_steps_localized",
    "ring_amplitude_exact",
    "ring_psuc",
    "ring_amplitude_approx",
    "chain_amplitude",
    "chain_psuc",
    "chain_amplitude_approx",
    "integer_step_error_bound",
    "max_step_error",
    "ring_eigenvectors",
    "ring_eigenvector_check",
]


class AmplitudePair(NamedTuple):
    e_plus: float
    e_minus: float

    @property
    def probability(self) -> float:
        return self.e_plus ** 2 + self.e_minus ** 2


def _even(steps) -> int:
    if int(steps) != steps or steps < 0 or int(steps) % 2:
        raise ValueError(f"step count must be a non-negative even integer, got {steps}")
    return int(steps)


def _round_even(x: float) -> int:
    return 2 * int(math.floor(x / 2 + 0.5))


# ---------------------------------------------------------------------------
# global superposition: reduced Grover rotation


@dataclass(frozen=True)
class ReducedGroverModel:
    """Rotation by ``theta`` per double step, ``cos(theta) = (N - 4) / N``."""

    N: int
    theta: float = field(init=False)
    n0: float = field(init=False)

    def __post_init__(self):
        if self.N < 3:
            raise ValueError(f"need N >= 3, got {self.N}")
        theta = math.acos((self.N - 4) / self.N)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "n0", math.pi / (2 * theta))

    @property
    def eigenvalues(self) -> tuple:
        """``exp(+-i theta)``, the eigenvalues of the double step on the plane."""
        return complex(math.cos(self.theta), math.sin(self.theta)), \
            complex(math.cos(self.theta), -math.sin(self.theta))

    @property
    def superposed_overlap(self) -> float:
        """Overlap of the alternating global state with the off-path state."""
        return math.cos(self.theta / 2)


def _grover_p(model: ReducedGroverModel, n: float, from_superposed: bool) -> float:
    if from_superposed:
        return math.sin((2 * n + 1) * model.theta / 2) ** 2
    return math.sin(n * model.theta) ** 2


def grover_psuc(model: ReducedGroverModel, steps: int, from_superposed: bool = False) -> float:
    """Probability of being on the path after ``steps`` (even) applications of U."""
    n = _even(steps) // 2
    return _grover_p(model, n, from_superposed)


def optimal_steps_superposed(N: int) -> int:
    """Nearest even integer to ``pi / theta``."""
    if N < 4:
        raise ValueError(f"superposed search needs N >= 4, got {N}")
    return _round_even(math.pi / ReducedGroverModel(N).theta)


def optimal_steps_localized(N: int) -> int:
    """Nearest even integer to ``pi * sqrt(N / 2)``."""
    if N < 3:
        raise ValueError(f"localized search needs N >= 3, got {N}")
    return _round_even(math.pi * math.sqrt(N / 2))


# ---------------------------------------------------------------------------
# ring of stars


@dataclass(frozen=True)
class RingSpectrum:
    """Bloch data of the double step on a ring of ``M`` stars with ``N`` spokes.

    ``phi[m] = 2 pi m / M`` and ``cos(omega[m]) = 1 - t (1 - cos(phi[m]))``.
    ``t_m`` is zero for ``m = 0`` and ``t`` otherwise.
    """

    M: int
    N: int
    phi: np.ndarray = field(init=False, repr=False, compare=False)
    omega: np.ndarray = field(init=False, repr=False, compare=False)
    t_m: np.ndarray = field(init=False, repr=False, compare=False)
    _ratio: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.M < 1 or self.N < 3:
            raise ValueError(f"invalid ring size M={self.M}, N={self.N}")
        m = np.arange(self.M)
        phi = 2 * np.pi * m / self.M
        omega = np.arccos(np.clip(1 - self.t * (1 - np.cos(phi)), -1.0, 1.0))
        omega[0] = 0.0
        t_m = np.full(self.M, self.t)
        t_m[0] = 0.0
        # t_m sin(phi_m) / sin(omega_m); the m = 0 term is defined as zero
        ratio = np.zeros(self.M)
        ratio[1:] = t_m[1:] * np.sin(phi[1:]) / np.sin(omega[1:])
        for name, val in (("phi", phi), ("omega", omega), ("t_m", t_m), ("_ratio", ratio)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def t(self) -> float:
        return 2.0 / self.N

    @property
    def eigenvalues(self) -> np.ndarray:
        """``exp(i omega_m)`` for each Bloch index."""
        return np.exp(1j * self.omega)


def _ring_amplitudes(spec: RingSpectrum, b: int, n: float) -> AmplitudePair:
    c = np.cos(n * spec.omega + b * spec.phi)
    scale = 1.0 / (math.sqrt(2) * spec.M)
    # np.sum is pairwise, which keeps cancellation under control for large M
    plus = float(np.sum((1 + spec._ratio) * c)) * scale
    minus = float(np.sum((1 - spec._ratio) * c)) * scale
    return AmplitudePair(plus, minus)


def ring_amplitude_exact(spec: RingSpectrum, b: int, steps: int) -> AmplitudePair:
    """Exact success amplitudes ``b`` junctions ahead of a localized start on a ring.

    The walker starts in ``(|A_{k+1}, B_k1> - |A_k, B_k1>) / sqrt(2)``; the
    result is independent of ``k``.
    """
    n = _even(steps) // 2
    return _ring_amplitudes(spec, int(b), n)


def ring_psuc(spec: RingSpectrum, b: int, steps: int) -> float:
    return ring_amplitude_exact(spec, b, steps).probability


def ring_amplitude_approx(b: int, n: float, t: float) -> float:
    """Large-ring, large-N amplitude ``J_{2|b|}(2 n sqrt(t)) / sqrt(2)``.

    ``n`` counts double steps.  Valid while ``n`` is small compared with
    ``M * sqrt(N)``; the caller is responsible for staying in that regime.
    """
    return bessel_j(2 * abs(int(b)), 2 * n * math.sqrt(t)) / math.sqrt(2)


# ---------------------------------------------------------------------------
# chain of stars via the doubled ring


def _check_chain(M: int, N: int, k: int, b: int) -> None:
    if M < 1 or N < 3:
        raise ValueError(f"invalid chain size M={M}, N={N}")
    if not 0 <= k <= M - 1:
        raise ValueError(f"known connection {k} outside 0..{M - 1}")
    if not 0 <= k + b <= M:
        raise ValueError(f"target junction {k + b} outside 0..{M}")


def _chain_amplitudes(spec2: RingSpectrum, k: int, b: int, n: float) -> AmplitudePair:
    direct = _ring_amplitudes(spec2, b, n)
    if k == 0:
        # |A_1, START> lifts to sqrt(2) times a localized ring state
        return AmplitudePair(math.sqrt(2) * direct.e_plus, math.sqrt(2) * direct.e_minus)
    image = _ring_amplitudes(spec2, 2 * k + b, n)
    return AmplitudePair(direct.e_plus + image.e_plus, direct.e_minus + image.e_minus)


def chain_amplitude(M: int, N: int, k: int, b: int, steps: int) -> AmplitudePair:
    """Success amplitudes on junction ``k + b`` of a chain, started at junction ``k``.

    ``k = 0`` means the walker starts on ``|A_1, START>``; otherwise on the
    localized state around connection ``k``.  Evaluated on a ring of ``2M``
    stars as the sum of the direct term and the mirror image term.  At START
    and END only one edge exists; both returned amplitudes then coincide.
    """
    _check_chain(M, N, k, b)
    n = _even(steps) // 2
    return _chain_amplitudes(RingSpectrum(2 * M, N), k, b, n)


def _chain_p(pair: AmplitudePair, M: int, k: int, b: int) -> float:
    if k + b in (0, M):
        return pair.e_plus ** 2
    return pair.probability


def chain_psuc(M: int, N: int, k: int, b: int, steps: int) -> float:
    """Probability of finding the walker on junction ``k + b``; terminals count one edge."""
    return _chain_p(chain_amplitude(M, N, k, b, steps), M, k, b)


def chain_amplitude_approx(M: int, N: int, k: int, b: int, steps: int) -> float:
    """Bessel approximation of the chain success amplitude (both edges alike).

    The direct term is ``J_{2|b|} / sqrt(2)``.  The mirror term uses whichever
    reflection is closer: through START (order ``2 (2k + b)``) or through END
    (order ``2 (2M - 2k - b)``).  Starting on START the two coincide and the
    amplitude is ``J_{2|b|}``.
    """
    _check_chain(M, N, k, b)
    n = _even(steps) // 2
    x = 2 * n * math.sqrt(2.0 / N)
    direct = bessel_j(2 * abs(b), x)
    if k == 0:
        return direct
    mirror = min(abs(2 * k + b), abs(2 * M - 2 * k - b))
    return (direct + bessel_j(2 * mirror, x)) / math.sqrt(2)


# ---------------------------------------------------------------------------
# integer step-count errors

_BOUND_CASES = ("superposed", "superposed_optimal", "localized")


def integer_step_error_bound(case: str, N: int) -> float:
    """Bound on ``|p(2n) - p(2(n + eps))|`` for ``|eps| <= 1``.

    ``"superposed"``: ``2 sqrt(2/N)``; ``"superposed_optimal"``: ``8/N`` at the
    peak of the superposed success probability; ``"localized"``: ``16/sqrt(N)``
    (vacuous below N = 256).
    """
    if N < 3:
        raise ValueError(f"need N >= 3, got {N}")
    if case == "superposed":
        return 2 * math.sqrt(2 / N)
    if case == "superposed_optimal":
        return 8 / N
    if case == "localized":
        return 16 / math.sqrt(N)
    raise ValueError(f"unknown case {case!r}; expected one of {_BOUND_CASES}")


def max_step_error(case: str, N: int, M: int = 11, eps_step: float = 0.01,
                   max_steps: int | None = None) -> float:
    """Largest measured ``|p(2n) - p(2(n + eps))|`` over an ``eps`` grid in ``[-1, 1]``.

    ``superposed`` scans every even step count up to twice the optimum;
    ``superposed_optimal`` uses the real-valued peak of the superposed success
    probability, ``(2n + 1) theta = pi``, and the ideal peak ``2n theta = pi``;
    ``localized`` scans every even step count up to ``max_steps`` (default
    twice the localized optimum) and every offset ``b`` on a ring of ``M``.
    """
    eps = np.round(np.arange(-1.0, 1.0 + eps_step / 2, eps_step), 12)
    worst = 0.0
    if case in ("superposed", "superposed_optimal"):
        model = ReducedGroverModel(N)
        if case == "superposed":
            top = max_steps or 2 * optimal_steps_superposed(N)
            starts = [(s / 2, True) for s in range(0, top + 1, 2)]
        else:
            starts = [((math.pi / model.theta - 1) / 2, True), (math.pi / (2 * model.theta), False)]
        for n, sup in starts:
            p0 = _grover_p(model, n, sup)
            for e in eps:
                worst = max(worst, abs(p0 - _grover_p(model, n + e, sup)))
        return worst
    if case == "localized":
        spec = RingSpectrum(M, N)
        top = max_steps or 2 * optimal_steps_localized(N)
        scale = 1.0 / (math.sqrt(2) * spec.M)
        for b in range(M):
            for s in range(0, top + 1, 2):
                n = s / 2 + np.concatenate(([0.0], eps))
                c = np.cos(np.outer(n, spec.omega) + b * spec.phi)
                p = (np.sum((1 + spec._ratio) * c, axis=1) * scale) ** 2 \
                    + (np.sum((1 - spec._ratio) * c, axis=1) * scale) ** 2
                worst = max(worst, float(np.abs(p[1:] - p[0]).max()))
        return worst
    raise ValueError(f"unknown case {case!r}; expected one of {_BOUND_CASES}")


# ---------------------------------------------------------------------------
# Bloch eigenvectors, checked against the simulated double step


def ring_eigenvectors(spec: RingSpectrum, m: int) -> list:
    """Bloch eigenvectors of the double step overlapping localized junction states.

    Returns ``[(eigenvalue, vector), ...]`` with vectors in the canonical edge
    basis of a ring with ``spec.M`` stars and ``spec.N`` spokes.  For
    ``m != 0`` the two vectors carry eigenvalues ``exp(+-i omega_m)``; for
    ``m = 0`` the single antisymmetric junction state with eigenvalue 1.
    """
    M, N, t, r = spec.M, spec.N, spec.t, 1 - spec.t
    phi = spec.phi[m]
    phase = np.exp(1j * phi * np.arange(1, M + 1))
    out = []
    if m == 0:
        coeffs = [(1.0 + 0j, 1 / math.sqrt(2 * M), -1 / math.sqrt(2 * M), 0.0)]
    else:
        coeffs = []
        norm = math.sqrt(2 * M * t * (1 + math.cos(spec.omega[m])))
        for sgn in (1, -1):
            lam = np.exp(sgn * 1j * spec.omega[m])
            conj = np.conj(lam)
            c_back = (1 - lam) / (lam - np.exp(1j * phi)) * r / norm
            # forward coefficient is the conjugate of the opposite-sign back coefficient
            c_fwd = np.conj((1 - conj) / (conj - np.exp(1j * phi)) * r / norm)
            coeffs.append((lam, c_back, c_fwd, t / norm))
    for lam, c_back, c_fwd, c_spoke in coeffs:
        vec = np.zeros((2, M, N), dtype=complex)
        vec[0, :, 0] = phase * c_back
        vec[0, :, 1] = phase * c_fwd
        vec[0, :, 2:] = (phase * c_spoke)[:, None]
        out.append((complex(lam), vec.reshape(-1)))
    return out


def ring_eigenvector_check(spec: RingSpectrum) -> dict:
    """Residuals of the closed-form Bloch eigenvectors under the simulated double step.

    Returns ``{"residual": max ||U^2 v - lambda v||, "norm_error": max | ||v|| - 1 |}``.
    Only small rings (``M <= 8``, ``N <= 24``) are accepted.
    """
    from .maze import build_maze
    from .walk import unitary_matrix

    if spec.M > 8 or spec.N > 24 or spec.M < 2:
        raise ValueError("eigenvector check needs 2 <= M <= 8 and N <= 24")
    U = unitary_matrix(build_maze("ring", spec.M, spec.N, 0))
    U2 = U @ U
    residual = 0.0
    norm_error = 0.0
    for m in range(spec.M):
        for lam, v in ring_eigenvectors(spec, m):
            residual = max(residual, float(np.linalg.norm(U2 @ v - lam * v)))
            norm_error = max(norm_error, abs(float(np.linalg.norm(v)) - 1.0))
    return {"residual": residual, "norm_error": norm_error}
