"""Dense tensor model for pure states and rank-two density matrices.

All objects are immutable once built: the backing numpy arrays are flagged
read-only, so states can be shared freely between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from qsep.errors import (
    AllZeroTensor,
    DimensionMismatch,
    InvalidInput,
    NotOrthogonal,
    NotRankTwo,
    NotUnitary,
    RankOne,
)

NORM_TOL = 1e-10
ORTHO_TOL = 1e-9
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
UNITARY_TOL = 1e-10
ZERO_NORM_SQ = 1e-14
RANK_TOL = 1e-9
MAX_TOTAL_DIM = 4096


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DimensionProfile:
    """Ordered mode dimensions ``(N_1, ..., N_M)``."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if len(dims) < 2:
            raise InvalidInput(f"need at least two modes, got {len(dims)}")
        for k, n in enumerate(dims):
            if n < 2:
                raise InvalidInput(f"mode {k} has dimension {n}; every mode needs N >= 2")
        object.__setattr__(self, "dims", dims)

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return len(self.dims)


def as_profile(profile) -> DimensionProfile:
    if isinstance(profile, DimensionProfile):
        return profile
    return DimensionProfile(tuple(profile))


@dataclass(frozen=True, eq=False)
class CoefficientTensor:
    """Complex amplitudes ``a[i_1, ..., i_M]`` stored densely in row-major order."""

    profile: DimensionProfile
    amp: np.ndarray

    def __post_init__(self):
        profile = as_profile(self.profile)
        amp = np.array(self.amp, dtype=np.complex128)
        if amp.ndim == 1 and amp.size == profile.total_dim:
            amp = amp.reshape(profile.dims)
        if amp.shape != profile.dims:
            raise DimensionMismatch(
                f"amplitude array of shape {amp.shape} does not match dims {profile.dims}"
            )
        if not np.all(np.isfinite(amp)):
            raise InvalidInput("amplitudes must be finite")
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "amp", _frozen(amp))

    @classmethod
    def from_entries(cls, dims, entries) -> "CoefficientTensor":
        """Build from ``{multi_index: value}`` pairs; missing entries are zero."""
        profile = as_profile(dims)
        amp = np.zeros(profile.dims, dtype=np.complex128)
        for index, value in dict(entries).items():
            index = tuple(index)
            if len(index) != profile.n_modes or any(
                not 0 <= i < n for i, n in zip(index, profile.dims)
            ):
                raise InvalidInput(f"index {index} out of bounds for dims {profile.dims}")
            amp[index] += value
        return cls(profile, amp)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amp, self.amp).real)


@dataclass(frozen=True, eq=False)
class PureState:
    """A unit-norm coefficient tensor.

    ``scale`` is the factor that was applied to the raw input to normalize
    it (1.0 when the input already had unit norm).
    """

    tensor: CoefficientTensor
    norm_tol: float = NORM_TOL
    scale: float = 1.0

    def __post_init__(self):
        if abs(self.tensor.norm_sq - 1.0) > self.norm_tol:
            raise InvalidInput(
                f"state norm^2 = {self.tensor.norm_sq!r} differs from 1 by more than {self.norm_tol}"
            )

    @property
    def profile(self) -> DimensionProfile:
        return self.tensor.profile

    @property
    def dims(self) -> tuple[int, ...]:
        return self.tensor.profile.dims

    @property
    def amp(self) -> np.ndarray:
        return self.tensor.amp

    @property
    def vector(self) -> np.ndarray:
        return self.tensor.amp.reshape(-1)

    def inner(self, other: "PureState") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.vector, other.vector))


def make_pure_state(tensor, dims=None) -> PureState:
    """Normalize a coefficient tensor into a :class:`PureState`.

    ``tensor`` may be a :class:`CoefficientTensor` or any array-like, in which
    case ``dims`` defaults to its shape.
    """
    if not isinstance(tensor, CoefficientTensor):
        arr = np.asarray(tensor, dtype=np.complex128)
        tensor = CoefficientTensor(as_profile(dims if dims is not None else arr.shape), arr)
    norm_sq = tensor.norm_sq
    if not norm_sq >= ZERO_NORM_SQ:
        raise AllZeroTensor(f"tensor norm^2 {norm_sq:.3g} is below {ZERO_NORM_SQ:g}")
    scale = 1.0 / math.sqrt(norm_sq)
    return PureState(CoefficientTensor(tensor.profile, tensor.amp * scale), scale=scale)


def canonical_phase(state: PureState) -> PureState:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    vec = state.vector
    k = int(np.argmax(np.abs(vec)))
    phase = vec[k] / abs(vec[k])
    amp = state.amp * np.conj(phase)
    flat = amp.reshape(-1)
    flat[k] = abs(flat[k])
    return PureState(CoefficientTensor(state.profile, amp), state.norm_tol, state.scale)


def basis_state(dims, index) -> PureState:
    profile = as_profile(dims)
    amp = np.zeros(profile.dims, dtype=np.complex128)
    amp[tuple(index)] = 1.0
    return PureState(CoefficientTensor(profile, amp))


def product_state(vectors: Sequence) -> PureState:
    """Outer product of per-mode vectors (normalized afterwards)."""
    vecs = [np.asarray(v, dtype=np.complex128).reshape(-1) for v in vectors]
    amp = reduce(np.multiply.outer, vecs)
    return make_pure_state(amp)


def maximally_entangled_state(dims) -> PureState:
    """``(1/sqrt(N)) sum_i |i, i, ..., i>`` with ``N = min(dims)``."""
    profile = as_profile(dims)
    n = min(profile.dims)
    amp = np.zeros(profile.dims, dtype=np.complex128)
    for i in range(n):
        amp[(i,) * profile.n_modes] = 1.0 / math.sqrt(n)
    return PureState(CoefficientTensor(profile, amp))


ghz_state = maximally_entangled_state


@dataclass(frozen=True, eq=False)
class RankTwoState:
    """``rho = p |E1><E1| + (1 - p) |E2><E2|`` with orthonormal ``E1, E2``."""

    p: float
    e1: PureState
    e2: PureState

    def __post_init__(self):
        p = float(self.p)
        if not 0.0 < p < 1.0:
            raise InvalidInput(f"weight p = {p!r} must lie strictly between 0 and 1")
        if self.e1.dims != self.e2.dims:
            raise DimensionMismatch(f"eigenvectors live on {self.e1.dims} and {self.e2.dims}")
        overlap = abs(self.e1.inner(self.e2))
        if overlap > ORTHO_TOL:
            raise NotOrthogonal(f"|<E1|E2>| = {overlap:.3g} exceeds {ORTHO_TOL:g}")
        object.__setattr__(self, "p", p)

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def profile(self) -> DimensionProfile:
        return self.e1.profile

    def dense(self) -> "DensityMatrix":
        return DensityMatrix.from_mixture([self.p, self.q], [self.e1, self.e2])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    profile: DimensionProfile
    entries: np.ndarray

    def __post_init__(self):
        profile = as_profile(self.profile)
        d = profile.total_dim
        if d > MAX_TOTAL_DIM:
            raise InvalidInput(f"total dimension {d} exceeds the supported {MAX_TOTAL_DIM}")
        m = np.array(self.entries, dtype=np.complex128)
        if m.shape != (d, d):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match total dimension {d}")
        if not np.all(np.isfinite(m)):
            raise InvalidInput("density matrix entries must be finite")
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > HERMITIAN_TOL:
            raise InvalidInput(f"matrix is not Hermitian (max |rho - rho^H| = {herm:.3g})")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidInput(f"trace {tr:.12g} differs from 1")
        m = 0.5 * (m + m.conj().T)
        lowest = float(np.linalg.eigvalsh(m)[0])
        if lowest < -PSD_TOL:
            raise InvalidInput(f"matrix has negative eigenvalue {lowest:.3g}")
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "entries", _frozen(m))

    @classmethod
    def from_mixture(cls, weights, states) -> "DensityMatrix":
        """``sum_i w_i |psi_i><psi_i|``; states need not be orthogonal."""
        states = list(states)
        vecs = np.stack([s.vector for s in states], axis=1)
        w = np.asarray(weights, dtype=float)
        m = (vecs * w) @ vecs.conj().T
        return cls(states[0].profile, m)


def rank2_eigendecompose(rho: DensityMatrix, tol: float = RANK_TOL) -> RankTwoState:
    """Split a rank-two density matrix into its two eigenpairs.

    Uses LAPACK's Hermitian solver, so the result is deterministic for a given
    input. The returned ``p`` belongs to the larger eigenvalue; both
    eigenvectors carry the canonical global phase.

    Raises
    ------
    NotRankTwo
        if any eigenvalue other than the top two exceeds ``tol * lambda_max``.
    RankOne
        if the second eigenvalue is at or below ``tol * lambda_max``.
    """
    w, v = np.linalg.eigh(rho.entries)
    lam_max = float(w[-1])
    cutoff = tol * max(lam_max, 0.0)
    spectrum = w[::-1].copy()
    if len(w) > 2 and float(np.max(np.abs(w[:-2]))) > cutoff:
        raise NotRankTwo(
            f"third eigenvalue {spectrum[2]:.3g} exceeds tolerance {cutoff:.3g}", spectrum
        )
    if float(w[-2]) <= cutoff:
        raise RankOne(f"second eigenvalue {w[-2]:.3g} is at or below {cutoff:.3g}", spectrum)
    p, q = float(w[-1]), float(w[-2])
    total = p + q
    e1 = canonical_phase(make_pure_state(v[:, -1], rho.profile.dims))
    e2 = canonical_phase(make_pure_state(v[:, -2], rho.profile.dims))
    return RankTwoState(p / total, e1, e2)


def eigen_residuals(rho: DensityMatrix, state: RankTwoState) -> tuple[float, float]:
    """``||rho v - lambda v||`` for both eigenpairs of ``state``."""
    out = []
    for lam, e in ((state.p, state.e1), (state.q, state.e2)):
        v = e.vector
        out.append(float(np.linalg.norm(rho.entries @ v - lam * v)))
    return out[0], out[1]


def low_rank_residual(weights_a, vecs_a, weights_b, vecs_b) -> float:
    """Frobenius norm of ``sum_a w|v><v| - sum_b w|v><v|``.

    Evaluated in an orthonormal basis of the span of all vectors, which avoids
    forming dense ``D x D`` matrices and the cancellation of a Gram-based
    formula.
    """
    vecs = np.stack([np.asarray(x).reshape(-1) for x in (*vecs_a, *vecs_b)], axis=1)
    w = np.concatenate([np.asarray(weights_a, float), -np.asarray(weights_b, float)])
    _, r = np.linalg.qr(vecs)
    diff = (r * w) @ r.conj().T
    return float(np.linalg.norm(diff))


def apply_local_unitaries(state: PureState, unitaries: Sequence) -> PureState:
    """Act with ``U_1 (x) U_2 (x) ... (x) U_M`` on ``state``."""
    dims = state.dims
    if len(unitaries) != len(dims):
        raise DimensionMismatch(f"got {len(unitaries)} unitaries for {len(dims)} modes")
    amp = np.array(state.amp)
    for k, u in enumerate(unitaries):
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (dims[k], dims[k]):
            raise DimensionMismatch(f"unitary {k} has shape {u.shape}, mode dimension is {dims[k]}")
        err = float(np.max(np.abs(u @ u.conj().T - np.eye(dims[k]))))
        if err > UNITARY_TOL:
            raise NotUnitary(f"unitary {k} deviates from unitarity by {err:.3g}")
        amp = np.moveaxis(np.tensordot(u, amp, axes=([1], [k])), 0, k)
    out = PureState(CoefficientTensor(state.profile, amp), max(state.norm_tol, NORM_TOL))
    return out


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_product_state(profile, seed=None) -> PureState:
    profile = as_profile(profile)
    rng = _rng(seed)
    factors = []
    for n in profile.dims:
        x = _gaussian(rng, n)
        factors.append(x / np.linalg.norm(x))
    return product_state(factors)


def random_pure_state(profile, seed=None) -> PureState:
    profile = as_profile(profile)
    rng = _rng(seed)
    return make_pure_state(_gaussian(rng, profile.dims))


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary from the QR of a complex Gaussian matrix."""
    rng = _rng(seed)
    z = _gaussian(rng, (n, n)) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_local_unitaries(profile, seed=None) -> list[np.ndarray]:
    profile = as_profile(profile)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [random_unitary(n, child) for n, child in zip(profile.dims, ss.spawn(len(profile)))]
