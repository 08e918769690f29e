"""Brute-force reference computations.

Nothing here calls into the family tables, kernels or invariants; each check
is written out with its own loops so a bug in the main path cannot hide in a
shared helper.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from qsep.errors import IdenticalStates, InvalidInput
from qsep.state import DensityMatrix, PureState

MAX_ORACLE_DIM = 256


def _amp(tensor) -> np.ndarray:
    amp = getattr(tensor, "amp", tensor)
    return np.asarray(amp, dtype=np.complex128)


def _guard(amp):
    if amp.size > MAX_ORACLE_DIM:
        raise InvalidInput(f"oracle limited to total dimension {MAX_ORACLE_DIM}, got {amp.size}")


def unfolding_rank_one(tensor, mode: int, tol: float = 1e-8) -> bool:
    """True iff every 2x2 minor of the mode-``mode`` unfolding is ``<= tol * max|a|^2``."""
    amp = _amp(tensor)
    _guard(amp)
    mat = np.moveaxis(amp, mode, 0).reshape(amp.shape[mode], -1)
    scale = float(np.max(np.abs(amp))) ** 2
    rows, cols = mat.shape
    worst = 0.0
    for i in range(rows):
        for j in range(i + 1, rows):
            x, y = mat[i], mat[j]
            minors = x[:, None] * y[None, :] - x[None, :] * y[:, None]
            worst = max(worst, float(np.max(np.abs(minors))))
    return worst <= tol * scale


def oracle_pure_separable(tensor, tol: float = 1e-8) -> bool:
    amp = _amp(tensor)
    return all(unfolding_rank_one(amp, k, tol) for k in range(amp.ndim))


def build_separable_rank2(product_states, weight: float, seed=None) -> DensityMatrix:
    """``w |s1><s1| + (1 - w) |s2><s2|`` from two distinct product states.

    With a ``seed`` each state first gets a random global phase, which leaves
    the mixture unchanged.
    """
    s1, s2 = product_states
    for s in (s1, s2):
        if not oracle_pure_separable(s):
            raise InvalidInput("build_separable_rank2 needs product states")
    if abs(np.vdot(s1.vector, s2.vector)) > 1.0 - 1e-12:
        raise IdenticalStates("the two product states coincide up to phase")
    if not 0.0 <= weight <= 1.0:
        raise InvalidInput(f"weight {weight!r} outside [0, 1]")
    v1, v2 = np.array(s1.vector), np.array(s2.vector)
    if seed is not None:
        rng = np.random.default_rng(seed)
        v1 = v1 * np.exp(2j * np.pi * rng.random())
        v2 = v2 * np.exp(2j * np.pi * rng.random())
    m = weight * np.outer(v1, v1.conj()) + (1.0 - weight) * np.outer(v2, v2.conj())
    return DensityMatrix(s1.profile, m)


# s=1 swaps the last index between the two multi-indices, s=2 the middle one, s=3 the first.
TRIPARTITE_CLASSES = {1: (0, 1), 2: (0, 2), 3: (0,)}


def tripartite_transcription(e1: PureState, e2: PureState) -> dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Tripartite ``alpha_s, beta_s, gamma_s`` indexed ``[i, j, k, p, q, m]``."""
    a1, a2 = _amp(e1), _amp(e2)
    if a1.ndim != 3:
        raise InvalidInput("the tripartite transcription needs exactly three modes")
    M, N, T = a1.shape
    shape = (M, N, T, M, N, T)
    out = {s: tuple(np.zeros(shape, dtype=np.complex128) for _ in range(3)) for s in (1, 2, 3)}
    for i in range(M):
        for j in range(N):
            for k in range(T):
                for p in range(M):
                    for q in range(N):
                        for m in range(T):
                            swapped = {
                                1: ((i, j, m), (p, q, k)),
                                2: ((i, q, k), (p, j, m)),
                                3: ((p, j, k), (i, q, m)),
                            }
                            for s, (x, y) in swapped.items():
                                al, be, ga = out[s]
                                idx = (i, j, k, p, q, m)
                                al[idx] = a2[i, j, k] * a2[p, q, m] - a2[x] * a2[y]
                                be[idx] = (a2[i, j, k] * a1[p, q, m] + a1[i, j, k] * a2[p, q, m]
                                           - a2[x] * a1[y] - a1[x] * a2[y])
                                ga[idx] = a1[i, j, k] * a1[p, q, m] - a1[x] * a1[y]
    return out


def tripartite_concurrence_loops(tensor) -> float:
    """Tripartite concurrence from the three explicit minor sums."""
    a = _amp(tensor)
    M, N, T = a.shape
    total = 0.0
    for i, j, k, p, q, m in itertools.product(range(M), range(N), range(T), range(M), range(N), range(T)):
        lead = a[i, j, k] * a[p, q, m]
        total += abs(lead - a[i, j, m] * a[p, q, k]) ** 2
        total += abs(lead - a[i, q, k] * a[p, j, m]) ** 2
        total += abs(lead - a[p, j, k] * a[i, q, m]) ** 2
    return math.sqrt(total)


def _proper_subsets(n: int):
    for r in range(1, n):
        yield from itertools.combinations(range(n), r)


def brute_force_concurrence(tensor) -> float:
    """Minor sum over every subset ``T`` (both sides counted, then halved)."""
    a = _amp(tensor)
    _guard(a)
    dims = a.shape
    n = len(dims)
    idx = list(itertools.product(*(range(d) for d in dims)))
    total = 0.0
    for subset in _proper_subsets(n):
        side = set(subset)
        for u in idx:
            for v in idx:
                x = tuple(u[k] if k in side else v[k] for k in range(n))
                y = tuple(v[k] if k in side else u[k] for k in range(n))
                total += abs(a[u] * a[v] - a[x] * a[y]) ** 2
    return math.sqrt(total / 2.0)


def brute_force_family_count(dims) -> int:
    """Count distinct non-trivial families by filtering every ``(T, u, v)``."""
    dims = tuple(dims)
    n = len(dims)
    idx = list(itertools.product(*(range(d) for d in dims)))
    seen = set()
    for subset in _proper_subsets(n):
        side = frozenset(subset)
        other = frozenset(range(n)) - side
        key_side = side if 0 in side else other
        for u in idx:
            for v in idx:
                if all(u[k] == v[k] for k in side) or all(u[k] == v[k] for k in other):
                    continue
                seen.add((key_side, frozenset((u, v))))
    return len(seen)
