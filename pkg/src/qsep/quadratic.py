"""Quadratic equation families and their common-root analysis.

A vector ``E1 + lam * E2`` is fully separable iff ``lam`` solves

    alpha * lam**2 + beta * lam + gamma = 0

for every family ``(T|S, u, v)``, where ``alpha`` and ``gamma`` are the 2x2
minors of E2 and E1 on the family and ``beta`` is the mixed term.

Families are ordered by bipartition class (see :mod:`qsep.bipartitions`) and
then lexicographically by the flat positions ``(u, v)`` with ``u < v``. Pairs
that agree on ``T`` or on ``S`` are skipped since their minor vanishes
identically.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from qsep._backend import kernels
from qsep.bipartitions import BipartitionClass, bipartition_classes, matricize
from qsep.errors import DimensionMismatch
from qsep.state import DimensionProfile, PureState, as_profile

DEFAULT_REL_TOL = 1e-8


@dataclass(frozen=True)
class FamilyIndex:
    bipartition: BipartitionClass
    u: tuple[int, ...]
    v: tuple[int, ...]

    @property
    def mu(self) -> tuple[int, ...]:
        return self.bipartition.mix(self.u, self.v)

    @property
    def nu(self) -> tuple[int, ...]:
        return self.bipartition.mix(self.v, self.u)

    def as_dict(self) -> dict:
        return {
            "bipartition": list(self.bipartition.members),
            "u": list(self.u),
            "v": list(self.v),
        }


@dataclass(frozen=True, eq=False)
class FamilyTable:
    """All families of a profile as flat index arrays, in canonical order."""

    profile: DimensionProfile
    classes: tuple[BipartitionClass, ...]
    cls: np.ndarray
    u: np.ndarray
    v: np.ndarray
    mu: np.ndarray
    nu: np.ndarray

    def __len__(self) -> int:
        return len(self.u)

    def family(self, f: int) -> FamilyIndex:
        dims = self.profile.dims
        return FamilyIndex(
            self.classes[int(self.cls[f])],
            tuple(int(i) for i in np.unravel_index(int(self.u[f]), dims)),
            tuple(int(i) for i in np.unravel_index(int(self.v[f]), dims)),
        )

    def class_slices(self) -> list[slice]:
        bounds = np.searchsorted(self.cls, np.arange(len(self.classes) + 1))
        return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def _class_families(dims, cls: BipartitionClass):
    flat = np.arange(math.prod(dims)).reshape(dims)
    idx = matricize(flat, cls)
    d_t, d_s = idx.shape
    t0, t1 = np.triu_indices(d_t, 1)
    s0, s1 = np.triu_indices(d_s, 1)
    t0, s0 = np.meshgrid(t0, s0, indexing="ij")
    t1, s1 = np.meshgrid(t1, s1, indexing="ij")
    a, b = idx[t0, s0].ravel(), idx[t1, s1].ravel()  # (t,s), (t',s')
    c, d = idx[t0, s1].ravel(), idx[t1, s0].ravel()  # (t,s'), (t',s)
    # first orientation: u=(t,s), v=(t',s') -> mu=(t,s'), nu=(t',s)
    # second: u=(t,s'), v=(t',s) -> mu=(t,s), nu=(t',s')
    u = np.concatenate([a, c])
    v = np.concatenate([b, d])
    mu = np.concatenate([c, a])
    nu = np.concatenate([d, b])
    swap = u > v
    u, v = np.where(swap, v, u), np.where(swap, u, v)
    mu, nu = np.where(swap, nu, mu), np.where(swap, mu, nu)
    order = np.lexsort((v, u))
    return u[order], v[order], mu[order], nu[order]


@lru_cache(maxsize=64)
def _family_table(dims: tuple[int, ...]) -> FamilyTable:
    profile = DimensionProfile(dims)
    classes = bipartition_classes(profile.n_modes)
    parts = [_class_families(dims, c) for c in classes]
    arrays = [np.ascontiguousarray(np.concatenate([p[i] for p in parts]), dtype=np.intp)
              for i in range(4)]
    cls = np.concatenate([np.full(len(p[0]), k, dtype=np.intp) for k, p in enumerate(parts)])
    for arr in (cls, *arrays):
        arr.setflags(write=False)
    return FamilyTable(profile, classes, cls, *arrays)


def family_table(profile) -> FamilyTable:
    return _family_table(as_profile(profile).dims)


def enumerate_families(profile) -> Iterator[FamilyIndex]:
    table = family_table(profile)
    for f in range(len(table)):
        yield table.family(f)


@dataclass(frozen=True)
class CoefficientTriple:
    family: FamilyIndex
    alpha: complex
    beta: complex
    gamma: complex


def coefficient_triple(e1: PureState, e2: PureState, family: FamilyIndex) -> CoefficientTriple:
    """Coefficients of one family's quadratic; superscript 1 is E1, 2 is E2."""
    if e1.dims != e2.dims:
        raise DimensionMismatch("eigenvectors live on different profiles")
    a1, a2 = e1.amp, e2.amp
    u, v, mu, nu = family.u, family.v, family.mu, family.nu
    alpha = a2[u] * a2[v] - a2[mu] * a2[nu]
    gamma = a1[u] * a1[v] - a1[mu] * a1[nu]
    beta = a2[u] * a1[v] + a1[u] * a2[v] - a2[mu] * a1[nu] - a1[mu] * a2[nu]
    return CoefficientTriple(family, complex(alpha), complex(beta), complex(gamma))


@dataclass(frozen=True, eq=False)
class CoefficientArrays:
    """``alpha``, ``beta``, ``gamma`` for every family of a table."""

    table: FamilyTable
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __len__(self):
        return len(self.alpha)

    def triple(self, f: int) -> CoefficientTriple:
        return CoefficientTriple(
            self.table.family(f), complex(self.alpha[f]), complex(self.beta[f]), complex(self.gamma[f])
        )

    def triples(self) -> list[CoefficientTriple]:
        return [self.triple(f) for f in range(len(self))]

    @property
    def scale(self) -> float:
        if len(self) == 0:
            return 0.0
        return float(max(np.max(np.abs(self.alpha)), np.max(np.abs(self.beta)),
                         np.max(np.abs(self.gamma))))


def coefficient_arrays(e1: PureState, e2: PureState) -> CoefficientArrays:
    if e1.dims != e2.dims:
        raise DimensionMismatch("eigenvectors live on different profiles")
    table = family_table(e1.profile)
    alpha, beta, gamma = kernels.family_coefficients(
        np.ascontiguousarray(e1.vector), np.ascontiguousarray(e2.vector),
        table.u, table.v, table.mu, table.nu,
    )
    return CoefficientArrays(table, alpha, beta, gamma)


def solve_quadratic(a: complex, b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of ``a x^2 + b x + c`` (``a != 0``) without cancellation."""
    sq = cmath.sqrt(b * b - 4 * a * c)
    if (b.conjugate() * sq).real < 0:
        sq = -sq
    q = -(b + sq) / 2
    if q == 0:
        return 0j, 0j
    return q / a, c / q


class RootKind(str, Enum):
    ALL_ZERO = "AllZero"
    E1_ONLY = "E1OnlyConstraints"
    PROPORTIONAL = "Proportional"
    INCONSISTENT = "Inconsistent"


@dataclass(frozen=True)
class RootAnalysis:
    kind: RootKind
    scale: float
    reference: FamilyIndex | None = None
    ref_coefficients: tuple[complex, complex, complex] | None = None
    mu1: complex | None = None
    mu2: complex | None = None
    reason: str | None = None
    witness: tuple[FamilyIndex, FamilyIndex] | None = None
    residual: float = 0.0

    @property
    def roots(self) -> tuple[complex, complex] | None:
        if self.mu1 is None:
            return None
        return self.mu1, self.mu2


def _as_arrays(triples) -> tuple[list[FamilyIndex] | FamilyTable, np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(triples, CoefficientArrays):
        return triples.table, triples.alpha, triples.beta, triples.gamma
    def key(t):
        b = t.family.bipartition
        return bipartition_classes(b.n_modes).index(b), t.family.u, t.family.v

    items: Sequence[CoefficientTriple] = sorted(triples, key=key)
    fams = [t.family for t in items]
    a = np.array([t.alpha for t in items], dtype=np.complex128)
    b = np.array([t.beta for t in items], dtype=np.complex128)
    c = np.array([t.gamma for t in items], dtype=np.complex128)
    return fams, a, b, c


def analyze_common_roots(triples, rel_tol: float = DEFAULT_REL_TOL) -> RootAnalysis:
    """Decide whether all family quadratics share the same two roots.

    ``triples`` is a :class:`CoefficientArrays` or any iterable of
    :class:`CoefficientTriple`; the result does not depend on iteration order.
    """
    fams, alpha, beta, gamma = _as_arrays(triples)

    def fam(f):
        return fams.family(f) if isinstance(fams, FamilyTable) else fams[f]

    if len(alpha) == 0:
        return RootAnalysis(RootKind.ALL_ZERO, 0.0)
    abs_a = np.abs(alpha)
    scale = float(max(abs_a.max(), np.abs(beta).max(), np.abs(gamma).max()))
    if scale == 0.0:
        return RootAnalysis(RootKind.ALL_ZERO, 0.0)
    lin_tol = scale * rel_tol
    if abs_a.max() <= lin_tol:
        if np.abs(beta).max() <= lin_tol and np.abs(gamma).max() <= lin_tol:
            return RootAnalysis(RootKind.ALL_ZERO, scale)
        return RootAnalysis(RootKind.E1_ONLY, scale)

    r = int(np.argmax(abs_a))
    ar, br, cr = complex(alpha[r]), complex(beta[r]), complex(gamma[r])
    ref = fam(r)
    mu1, mu2 = solve_quadratic(ar, br, cr)
    common = dict(scale=scale, reference=ref, ref_coefficients=(ar, br, cr), mu1=mu1, mu2=mu2)

    cross_tol = scale * scale * rel_tol
    res_b = np.abs(beta * ar - br * alpha)
    res_c = np.abs(gamma * ar - cr * alpha)
    for name, res in (("gamma", res_c), ("beta", res_b)):
        worst = int(np.argmax(res))
        if res[worst] > cross_tol:
            return RootAnalysis(RootKind.INCONSISTENT, reason=f"{name}-proportionality",
                                witness=(ref, fam(worst)), residual=float(res[worst]), **common)

    disc = br * br - 4 * ar * cr
    if abs(disc) <= rel_tol * max(abs(br) ** 2, abs(4 * ar * cr)):
        return RootAnalysis(RootKind.INCONSISTENT, reason="double-root",
                            witness=(ref, ref), residual=abs(disc), **common)
    return RootAnalysis(RootKind.PROPORTIONAL,
                        residual=float(max(res_b.max(), res_c.max())), **common)
