"""Extended states over a finite-dimensional inner-product space, and the top-coefficient pairing.

A state is ``psi = sum_I psi_I eta^I`` with each ``psi_I`` a vector of V. Vectors in the
full space are laid out ghost-major: block ``I`` (in :func:`all_multi_indices` order) then
the V index, so sector ``S^s`` occupies a contiguous slice.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError
from .ghostalg import MultiIndex, all_multi_indices, complement, merge_sign, reversal_sign


@dataclass(frozen=True, eq=False)
class FockSpace:
    m: int
    d: int
    inner: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise DomainError(f"need m >= 1 and d >= 1, got m={self.m}, d={self.d}")
        h = np.eye(self.d, dtype=complex) if self.inner is None else np.asarray(self.inner, dtype=complex)
        if h.shape != (self.d, self.d):
            raise DomainError(f"inner product must be {self.d}x{self.d}, got {h.shape}")
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "inner", h)

    @property
    def dim(self) -> int:
        return (1 << self.m) * self.d

    @property
    def basis(self) -> tuple[MultiIndex, ...]:
        return all_multi_indices(self.m)

    @cached_property
    def _position(self) -> dict[MultiIndex, int]:
        return {I: n for n, I in enumerate(self.basis)}

    def block(self, I: MultiIndex) -> slice:
        n = self._position[I]
        return slice(n * self.d, (n + 1) * self.d)

    def sector(self, s: int) -> slice:
        """Slice of the full vector holding ``S^s`` (exactly s ghosts)."""
        if not 0 <= s <= self.m:
            raise DomainError(f"ghost degree {s} outside 0..{self.m}")
        start = sum(1 for I in self.basis if len(I) < s)
        stop = sum(1 for I in self.basis if len(I) <= s)
        return slice(start * self.d, stop * self.d)

    def sector_dim(self, s: int) -> int:
        sl = self.sector(s)
        return sl.stop - sl.start

    def degree_of_index(self) -> np.ndarray:
        """Ghost degree of every basis vector of the full space."""
        return np.repeat([len(I) for I in self.basis], self.d)

    def v_inner(self, x: np.ndarray, y: np.ndarray) -> complex:
        return complex(np.conj(x) @ self.inner @ y)

    @cached_property
    def gram(self) -> np.ndarray:
        """``K`` with ``(psi, phi) = psi^H K phi`` for full coordinate vectors."""
        K = np.zeros((self.dim, self.dim), dtype=complex)
        for I in self.basis:
            J = complement(I)
            _, s = merge_sign(I, J)
            K[self.block(I), self.block(J)] = reversal_sign(I) * s * self.inner
        K.setflags(write=False)
        return K


@dataclass(frozen=True, eq=False)
class ExtendedState:
    space: FockSpace
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        for I, v in self.components.items():
            if not isinstance(I, MultiIndex) or I.m != self.space.m:
                raise DomainError(f"component key {I!r} is not a multi-index over m={self.space.m}")
            if np.shape(v) != (self.space.d,):
                raise DomainError(f"component {I.indices} has shape {np.shape(v)}, expected ({self.space.d},)")

    @classmethod
    def from_vector(cls, space: FockSpace, vec: np.ndarray) -> "ExtendedState":
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (space.dim,):
            raise DomainError(f"vector has shape {vec.shape}, expected ({space.dim},)")
        comps = {I: vec[space.block(I)].copy() for I in space.basis if np.any(vec[space.block(I)])}
        return cls(space, comps)

    def to_vector(self) -> np.ndarray:
        out = np.zeros(self.space.dim, dtype=complex)
        for I, v in self.components.items():
            out[self.space.block(I)] = v
        return out

    def component(self, I: MultiIndex) -> np.ndarray:
        return np.asarray(self.components.get(I, np.zeros(self.space.d)), dtype=complex)


def scalar_product(psi: ExtendedState, phi: ExtendedState) -> complex:
    """``(psi, phi)``: coefficient of ``eta^1...eta^m`` in ``(psi_I|phi_J) (eta^I)* eta^J``."""
    if psi.space is not phi.space:
        raise DomainError("states live in different spaces")
    total = 0j
    for I, v in psi.components.items():
        J = complement(I)
        if J not in phi.components:
            continue
        _, s = merge_sign(I, J)
        total += reversal_sign(I) * s * psi.space.v_inner(v, phi.components[J])
    return total


def pairing_gram(space: FockSpace, p: int) -> np.ndarray:
    """Gram matrix of the pairing between the bases of ``S^p`` and ``S^(m-p)``."""
    if not 0 <= p <= space.m:
        raise DomainError(f"degree {p} outside 0..{space.m}")
    return np.array(space.gram[space.sector(p), space.sector(space.m - p)])


def zeta(psi: ExtendedState) -> np.ndarray:
    """Top coefficient of a state supported in ``S^m``."""
    top = MultiIndex.full(psi.space.m)
    for I, v in psi.components.items():
        if I != top and np.any(v):
            raise DomainError(f"state has a component outside top degree at {I.indices}")
    return psi.component(top)


def zeta_inverse(space: FockSpace, v: np.ndarray) -> ExtendedState:
    v = np.asarray(v, dtype=complex)
    if v.shape != (space.d,):
        raise DomainError(f"vector has shape {v.shape}, expected ({space.d},)")
    return ExtendedState(space, {MultiIndex.full(space.m): v.copy()} if np.any(v) else {})
