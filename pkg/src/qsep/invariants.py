"""Local-unitary invariants, generalized concurrence and pure-state factoring."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qsep._backend import kernels
from qsep.bipartitions import BipartitionClass, bipartition_classes, matricize
from qsep.errors import FormulaMismatch, NotSeparable
from qsep.quadratic import family_table
from qsep.state import PureState

AGREEMENT_TOL = 1e-9
MISMATCH_TOL = 1e-7


@dataclass(frozen=True)
class InvariantSet:
    """``I0`` and one biquadratic invariant per bipartition class."""

    i0: float
    i_ts: tuple[tuple[BipartitionClass, float], ...]

    @property
    def d(self) -> int:
        return len(self.i_ts)

    def values(self) -> list[float]:
        return [val for _, val in self.i_ts]

    def concurrence_sq(self) -> float:
        """``2 (d I0^2 - sum I_TS)``."""
        return 2.0 * (self.d * self.i0 ** 2 - sum(self.values()))


def compute_invariants(state: PureState) -> InvariantSet:
    amp = state.amp
    i0 = float(np.vdot(amp, amp).real)
    i_ts = tuple(
        (cls, kernels.biquadratic(matricize(amp, cls)))
        for cls in bipartition_classes(len(state.dims))
    )
    return InvariantSet(i0, i_ts)


def minor_sum(state: PureState) -> float:
    """Sum of ``|a_u a_v - a_mu a_nu|^2`` over all ordered index pairs and classes.

    Each stored family is an unordered pair, hence the factor 2.
    """
    t = family_table(state.profile)
    return 2.0 * kernels.minor_norm_sq(np.ascontiguousarray(state.vector), t.u, t.v, t.mu, t.nu)


def concurrence_paths(state: PureState) -> tuple[float, float]:
    """Squared concurrence from the minor sum and from the invariants."""
    return minor_sum(state), compute_invariants(state).concurrence_sq()


def generalized_concurrence(state: PureState) -> float:
    """Generalized concurrence of a pure state.

    Both the invariant expression and the explicit minor sum are evaluated;
    the minor-sum value is returned.

    Raises
    ------
    FormulaMismatch
        if the squared values differ by more than ``1e-7``.
    """
    by_minors, by_invariants = concurrence_paths(state)
    if abs(by_minors - by_invariants) > MISMATCH_TOL:
        raise FormulaMismatch(
            f"minor sum {by_minors!r} vs invariant formula {by_invariants!r}"
        )
    return math.sqrt(max(by_minors, 0.0))


def default_separability_tol(state: PureState) -> float:
    peak = float(np.max(np.abs(state.vector))) ** 2
    return 1e-9 * max(1.0, peak * state.profile.total_dim)


def pure_is_separable(state: PureState, tol: float | None = None) -> bool:
    if tol is None:
        tol = default_separability_tol(state)
    return generalized_concurrence(state) <= tol


def extract_product_factors(state: PureState, tol: float | None = None) -> list[np.ndarray]:
    """Per-mode unit vectors whose outer product equals the state.

    Every factor but the first has a real positive entry at the anchor (the
    largest amplitude); the first factor carries the global phase, so the
    outer product reproduces the amplitudes exactly rather than up to phase.
    """
    if not pure_is_separable(state, tol):
        raise NotSeparable("state has nonzero generalized concurrence")
    amp = state.amp
    anchor = np.unravel_index(int(np.argmax(np.abs(amp))), amp.shape)
    factors = []
    for k in range(amp.ndim):
        sl = list(anchor)
        sl[k] = slice(None)
        fiber = np.array(amp[tuple(sl)])
        fiber /= np.linalg.norm(fiber)
        fiber *= np.conj(fiber[anchor[k]]) / abs(fiber[anchor[k]])
        factors.append(fiber)
    built = 1.0 + 0j
    for k, f in enumerate(factors):
        built *= f[anchor[k]]
    factors[0] = factors[0] * (amp[anchor] / built)
    return factors
