"""Bipartition classes ``T | S`` of the mode set and the hybrid-index map.

A class is stored by its canonical representative, the side that contains
mode 0; the complement gives the same minors, so a profile with ``M`` modes
has exactly ``2**(M-1) - 1`` classes.

Classes are ordered by the bitmask of ``S`` with mode 1 as the most
significant bit. For three modes this gives ``S = {2}, {1}, {1, 2}``, i.e.
the swapped index is the last, the middle, then the first one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from qsep.errors import InvalidInput


@dataclass(frozen=True, order=True)
class BipartitionClass:
    members: tuple[int, ...]
    n_modes: int

    def __post_init__(self):
        members = tuple(sorted(set(int(k) for k in self.members)))
        if not members or len(members) >= self.n_modes:
            raise InvalidInput("a bipartition side must be nonempty and proper")
        if members[0] < 0 or members[-1] >= self.n_modes:
            raise InvalidInput(f"modes {members} out of range for {self.n_modes} modes")
        object.__setattr__(self, "members", members)

    @classmethod
    def canonical(cls, members, n_modes: int) -> "BipartitionClass":
        """Fold ``members`` onto the representative that contains mode 0."""
        side = set(members)
        if 0 not in side:
            side = set(range(n_modes)) - side
        return cls(tuple(side), n_modes)

    @property
    def is_canonical(self) -> bool:
        return 0 in self.members

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.n_modes) if k not in self.members)

    def label(self) -> str:
        t = ",".join(map(str, self.members))
        s = ",".join(map(str, self.complement))
        return f"{{{t}}}|{{{s}}}"

    def mix(self, u, v) -> tuple[int, ...]:
        """Multi-index with ``u``'s entries on this side and ``v``'s on the complement."""
        members = set(self.members)
        return tuple(u[k] if k in members else v[k] for k in range(self.n_modes))


def class_count(n_modes: int) -> int:
    return 2 ** (n_modes - 1) - 1


@lru_cache(maxsize=None)
def bipartition_classes(n_modes: int) -> tuple[BipartitionClass, ...]:
    if n_modes < 2:
        raise InvalidInput("need at least two modes")
    out = []
    for r in range(1, 2 ** (n_modes - 1)):
        s = {k for k in range(1, n_modes) if (r >> (n_modes - 1 - k)) & 1}
        out.append(BipartitionClass(tuple(k for k in range(n_modes) if k not in s), n_modes))
    return tuple(out)


def matricize(amp: np.ndarray, cls: BipartitionClass) -> np.ndarray:
    """Reshape the tensor to a ``D_T x D_S`` matrix (C-contiguous)."""
    order = cls.members + cls.complement
    d_t = math.prod(amp.shape[k] for k in cls.members)
    return np.ascontiguousarray(np.transpose(amp, order).reshape(d_t, -1))
