"""Separability decision for rank-two states.

``decide`` runs the complex-coefficient criterion and, on success, returns the
explicit two-term product decomposition. Every separable verdict is
certified afterwards by reconstructing ``rho`` and re-testing both product
vectors, so a false "separable" cannot leave this module silently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from qsep._backend import kernels
from qsep.errors import ConsistencyError, NotMaximallyEntangled, NotOrthogonal, NotRealCoefficients
from qsep.invariants import pure_is_separable
from qsep.quadratic import (
    DEFAULT_REL_TOL,
    CoefficientArrays,
    FamilyIndex,
    RootAnalysis,
    RootKind,
    coefficient_arrays,
    analyze_common_roots,
)
from qsep.state import (
    ORTHO_TOL,
    PureState,
    RankTwoState,
    canonical_phase,
    low_rank_residual,
    make_pure_state,
    maximally_entangled_state,
)

# derived quantities (roots, weights) compound eigenvector and root errors
LOOSE_TOL = 1e-6
RECONSTRUCTION_TOL = 1e-8
REAL_TOL = 1e-12


class Status(str, Enum):
    SEPARABLE = "Separable"
    ENTANGLED = "Entangled"
    INCONCLUSIVE = "Inconclusive"


class WitnessKind(str, Enum):
    PHASE_EQUATION_VIOLATED = "PhaseEquationViolated"
    PROPORTIONALITY_VIOLATED = "ProportionalityViolated"
    DOUBLE_ROOT = "DoubleRoot"
    WEIGHT_OUT_OF_RANGE = "WeightOutOfRange"
    E2_SEPARABLE_E1_NOT = "E2SeparableE1Not"
    CONCURRENCE_RATIO_VIOLATED = "ConcurrenceRatioViolated"


@dataclass(frozen=True)
class Witness:
    kind: WitnessKind
    families: tuple[FamilyIndex, ...] = ()
    value: Any = None
    detail: str = ""

    def as_dict(self) -> dict:
        out = {"kind": self.kind.value, "detail": self.detail,
               "families": [f.as_dict() for f in self.families]}
        if self.value is not None:
            v = self.value
            out["value"] = [v.real, v.imag] if isinstance(v, complex) else v
        return out


@dataclass(frozen=True, eq=False)
class SeparabilityVerdict:
    status: Status
    mu1: complex | None = None
    mu2: complex | None = None
    theta: float | None = None
    p_prime: float | None = None
    e1p: PureState | None = None
    e2p: PureState | None = None
    witness: Witness | None = None
    analysis: RootAnalysis | None = None
    residual: float | None = None
    route: str = ""

    @property
    def separable(self) -> bool:
        return self.status is Status.SEPARABLE


def _entangled(kind, analysis, families=(), value=None, detail=""):
    return SeparabilityVerdict(
        Status.ENTANGLED, witness=Witness(kind, tuple(families), value, detail), analysis=analysis
    )


def _certify(rho: RankTwoState, p_prime: float, e1p: PureState, e2p: PureState) -> float:
    residual = low_rank_residual(
        [p_prime, 1.0 - p_prime], [e1p.vector, e2p.vector], [rho.p, rho.q], [rho.e1.vector, rho.e2.vector]
    )
    if residual > RECONSTRUCTION_TOL:
        raise ConsistencyError(f"decomposition reconstructs rho only to {residual:.3g}")
    for name, e in (("E1'", e1p), ("E2'", e2p)):
        if not pure_is_separable(e):
            raise ConsistencyError(f"{name} of the decomposition is not a product vector")
    return residual


def _eigenpair_verdict(rho: RankTwoState, analysis: RootAnalysis) -> SeparabilityVerdict:
    residual = _certify(rho, rho.p, rho.e1, rho.e2)
    return SeparabilityVerdict(
        Status.SEPARABLE, p_prime=rho.p, e1p=rho.e1, e2p=rho.e2,
        analysis=analysis, residual=residual, route="eigenpair",
    )


def _combine(rho: RankTwoState, mu: complex) -> PureState:
    vec = (rho.e1.vector + mu * rho.e2.vector) / math.sqrt(1.0 + abs(mu) ** 2)
    return canonical_phase(make_pure_state(vec, rho.e1.dims))


def decide(rho: RankTwoState, rel_tol: float = DEFAULT_REL_TOL,
           coeffs: CoefficientArrays | None = None) -> SeparabilityVerdict:
    """Decide full separability of ``rho = p|E1><E1| + (1-p)|E2><E2|``.

    Checks run in this order: the phase equation ``gamma = e^{i theta}
    (1 - 1/p) alpha`` on every family, proportionality of ``beta``, distinct
    roots, the phase of ``z = mu2 - mu1`` and finally the weight ``p'``. The
    first violated condition becomes the witness.
    """
    if coeffs is None:
        coeffs = coefficient_arrays(rho.e1, rho.e2)
    analysis = analyze_common_roots(coeffs, rel_tol)
    table = coeffs.table
    alpha, gamma = coeffs.alpha, coeffs.gamma

    if analysis.kind is RootKind.ALL_ZERO:
        return _eigenpair_verdict(rho, analysis)
    if analysis.kind is RootKind.E1_ONLY:
        abs_g = np.abs(gamma)
        worst = int(np.argmax(abs_g))
        if abs_g[worst] <= analysis.scale * rel_tol:
            return _eigenpair_verdict(rho, analysis)
        return _entangled(WitnessKind.E2_SEPARABLE_E1_NOT, analysis, [table.family(worst)],
                          float(abs_g[worst]), "E2 is a product vector but E1 is not")

    k = 1.0 - 1.0 / rho.p
    a_ref, _, c_ref = analysis.ref_coefficients
    ratio = c_ref / a_ref
    if abs(abs(ratio) - abs(k)) > rel_tol * max(1.0, abs(k)):
        return _entangled(WitnessKind.PHASE_EQUATION_VIOLATED, analysis, [analysis.reference],
                          abs(ratio), f"|gamma/alpha| = {abs(ratio):.12g}, need 1/p - 1 = {-k:.12g}")
    phase = ratio / k
    phase /= abs(phase)
    theta = cmath.phase(phase)
    res = np.abs(gamma - (phase * k) * alpha)
    worst = int(np.argmax(res))
    if res[worst] > analysis.scale * rel_tol * max(1.0, abs(k)):
        return _entangled(WitnessKind.PHASE_EQUATION_VIOLATED, analysis, [table.family(worst)],
                          float(res[worst]), "gamma is not e^{i theta}(1 - 1/p) alpha on this family")

    if analysis.kind is RootKind.INCONSISTENT:
        if analysis.reason == "double-root":
            return _entangled(WitnessKind.DOUBLE_ROOT, analysis, [analysis.reference],
                              analysis.mu1, "the common roots coincide")
        return _entangled(WitnessKind.PROPORTIONALITY_VIOLATED, analysis, analysis.witness,
                          analysis.residual, analysis.reason)

    weight_fail = None
    z_fail = None
    for m1, m2 in ((analysis.mu1, analysis.mu2), (analysis.mu2, analysis.mu1)):
        z = m2 - m1
        z_err = abs(z - phase * z.conjugate())
        if z_err > LOOSE_TOL * abs(z):
            z_fail = z_err / abs(z)
            continue
        denom = z - m1 * m2 * z.conjugate()
        pp = m2 * (1.0 + abs(m1) ** 2) / denom
        if abs(pp.imag) > LOOSE_TOL or not rel_tol < pp.real < 1.0 - rel_tol:
            weight_fail = pp
            continue
        p_prime = min(max(pp.real, 0.0), 1.0)
        p_check = 1.0 / (1.0 - m1 * m2 * z.conjugate() / z)
        if abs(p_check - rho.p) > LOOSE_TOL:
            raise ConsistencyError(f"weight cross-check gives p = {p_check!r}, eigenvalue is {rho.p!r}")
        e1p, e2p = _combine(rho, m1), _combine(rho, m2)
        residual = _certify(rho, p_prime, e1p, e2p)
        return SeparabilityVerdict(
            Status.SEPARABLE, mu1=m1, mu2=m2, theta=theta, p_prime=p_prime, e1p=e1p, e2p=e2p,
            analysis=analysis, residual=residual, route="roots",
        )
    if weight_fail is None:
        return _entangled(WitnessKind.PHASE_EQUATION_VIOLATED, analysis, [analysis.reference],
                          z_fail, "z = mu2 - mu1 violates z = e^{i theta} z*")
    return _entangled(WitnessKind.WEIGHT_OUT_OF_RANGE, analysis, [analysis.reference],
                      complex(weight_fail), "p' is not a real weight strictly inside (0, 1)")


@dataclass(frozen=True)
class RealCaseDeltas:
    delta1: float
    delta2: float
    threshold: float

    @property
    def separable(self) -> bool:
        return min(self.delta1, self.delta2) <= self.threshold


def _real_coefficients(rho: RankTwoState) -> CoefficientArrays:
    e1, e2 = canonical_phase(rho.e1), canonical_phase(rho.e2)
    for name, e in (("E1", e1), ("E2", e2)):
        worst = float(np.max(np.abs(e.vector.imag)))
        if worst > REAL_TOL:
            raise NotRealCoefficients(f"{name} has imaginary part {worst:.3g} after phase fixing")
    return coefficient_arrays(e1, e2)


def real_case_deltas(rho: RankTwoState, rel_tol: float = DEFAULT_REL_TOL) -> RealCaseDeltas:
    """The two sums that vanish for separable real-amplitude states.

    ``delta1`` covers real roots of opposite sign, ``delta2`` purely imaginary
    roots. The state is separable iff one of them is (numerically) zero.
    """
    coeffs = _real_coefficients(rho)
    a, b, c = coeffs.alpha, coeffs.beta, coeffs.gamma
    k = 1.0 - 1.0 / rho.p
    d1 = c - k * a
    d2 = c + k * a
    delta1 = float(np.sum(d1.real ** 2 + d1.imag ** 2)) + kernels.pair_cross_norm_sq(b, a)
    delta2 = float(np.sum(d2.real ** 2 + d2.imag ** 2) + np.sum(b.real ** 2 + b.imag ** 2))
    scale = coeffs.scale
    return RealCaseDeltas(delta1, delta2, scale * scale * rel_tol)


def concurrence_pair(coeffs: CoefficientArrays) -> tuple[float, float]:
    """Generalized concurrences of E1 and E2 from the gamma and alpha minors."""
    g, a = coeffs.gamma, coeffs.alpha
    c1 = math.sqrt(2.0 * float(np.sum(g.real ** 2 + g.imag ** 2)))
    c2 = math.sqrt(2.0 * float(np.sum(a.real ** 2 + a.imag ** 2)))
    return c1, c2


def concurrence_ratio_screen(rho: RankTwoState, rel_tol: float = DEFAULT_REL_TOL,
                             coeffs: CoefficientArrays | None = None) -> SeparabilityVerdict | None:
    """Necessary condition ``p C(E1) = (1 - p) C(E2)``; ``None`` when it holds."""
    if coeffs is None:
        coeffs = coefficient_arrays(rho.e1, rho.e2)
    c1, c2 = concurrence_pair(coeffs)
    gap = abs(c1 * rho.p - c2 * rho.q)
    if gap > coeffs.scale * rel_tol * max(rho.p, rho.q):
        return _entangled(WitnessKind.CONCURRENCE_RATIO_VIOLATED, None, (), gap,
                          f"p*C(E1) = {c1 * rho.p:.12g} but (1-p)*C(E2) = {c2 * rho.q:.12g}")
    return None


def corollary_threshold(e2: PureState, e1: PureState, p: float,
                        rel_tol: float = DEFAULT_REL_TOL) -> SeparabilityVerdict:
    """Entangled whenever the maximally entangled E2 carries weight above 1/2."""
    target = maximally_entangled_state(e2.dims)
    if abs(abs(target.inner(e2)) - 1.0) > 1e-9:
        raise NotMaximallyEntangled("E2 is not the canonical maximally entangled vector")
    if e1.dims != e2.dims or abs(e1.inner(e2)) > ORTHO_TOL:
        raise NotOrthogonal("E1 must be orthogonal to E2")
    if p < 0.5 - rel_tol:
        return _entangled(WitnessKind.CONCURRENCE_RATIO_VIOLATED, None, (), float(p),
                          "maximally entangled E2 with weight 1 - p > 1/2")
    return SeparabilityVerdict(Status.INCONCLUSIVE)
