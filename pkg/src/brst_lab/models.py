"""Small standard constraint systems: diagonal abelian ones and su(2) representations."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .observables import StructureConstants
from .system import system_to_json


def spin_matrices(j: Fraction | float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hermitian ``(S_x, S_y, S_z)`` for spin j in the ``|j, m>`` basis, m descending."""
    two_j = int(round(2 * float(j)))
    if two_j < 0 or abs(two_j - 2 * float(j)) > 1e-12:
        raise ValueError(f"spin must be a non-negative half-integer, got {j}")
    jj = two_j / 2
    ms = jj - np.arange(two_j + 1)
    # S_+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>
    plus = np.diag(np.sqrt(jj * (jj + 1) - ms[1:] * (ms[1:] + 1)), k=1).astype(complex)
    minus = plus.conj().T
    return (plus + minus) / 2, (plus - minus) / 2j, np.diag(ms).astype(complex)


def _block_diag(*mats: np.ndarray) -> np.ndarray:
    n = sum(a.shape[0] for a in mats)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for a in mats:
        out[k:k + a.shape[0], k:k + a.shape[0]] = a
        k += a.shape[0]
    return out


def su2_generators(spins) -> tuple[np.ndarray, ...]:
    """Constraint matrices ``G_a = -S_a`` on the direct sum of the given spins.

    With this sign ``[G_a, G_b] = -i eps_abc G_c``, matching structure constants
    ``C_ab^c = eps_abc``.
    """
    blocks = [spin_matrices(j) for j in spins]
    return tuple(-_block_diag(*[b[a] for b in blocks]) for a in range(3))


def abelian_generators(m: int, d: int) -> tuple[np.ndarray, ...]:
    """Commuting projectors ``G_a = e_a e_a^T`` onto the first m basis vectors of C^d."""
    if d <= m:
        raise ValueError("need d > m so the joint kernel is nonzero")
    return tuple(np.diag([1.0 if i == a else 0.0 for i in range(d)]).astype(complex) for a in range(m))


def su2_entries() -> dict[tuple[int, int, int], float]:
    C = StructureConstants.su2()
    return {k: float(v) for k, v in C.table.items()}


def shipped_systems() -> dict[str, dict]:
    """JSON documents for the example systems kept under ``systems/``."""
    return {
        "abelian_m1": system_to_json(
            "abelian_m1", abelian_generators(1, 2), {},
            description="one abelian constraint G = diag(1, 0) on C^2",
        ),
        "abelian_m2": system_to_json(
            "abelian_m2", abelian_generators(2, 3), {},
            description="two commuting projectors on C^3",
        ),
        "su2_spin_half_trivial": system_to_json(
            "su2_spin_half_trivial", su2_generators([Fraction(1, 2), 0]), su2_entries(),
            description="su(2) acting on spin-1/2 plus a trivial line",
        ),
        "su2_spin1_trivial": system_to_json(
            "su2_spin1_trivial", su2_generators([1, 0]), su2_entries(),
            description="su(2) acting on spin-1 plus a trivial line",
        ),
    }
