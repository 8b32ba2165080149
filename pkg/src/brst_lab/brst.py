"""Quantum BRST operator with nilpotency and self-adjointness certificates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NilpotencyError
from .koszul import BRSTCharge
from .quantize import (
    DEFAULT_TOL,
    GradedOperator,
    QuantumGenerators,
    block_structure_residual,
    ghost_number_op,
    max_abs,
    quantize,
    scaled_tol,
)
from .states import FockSpace


@dataclass(frozen=True)
class BRSTCertificate:
    square_residual: float
    square_sector: int
    adjoint_residual: float
    block_residual: float
    ghost_commutator_residual: float
    tolerance: float

    @property
    def nilpotent(self) -> bool:
        return self.square_residual <= self.tolerance

    @property
    def self_adjoint(self) -> bool:
        return self.adjoint_residual <= self.tolerance


@dataclass(frozen=True, eq=False)
class QuantumBRST:
    operator: GradedOperator
    gens: QuantumGenerators
    certificate: BRSTCertificate

    @property
    def space(self) -> FockSpace:
        return self.gens.space

    def sector_map(self, s: int) -> np.ndarray:
        """Block of Omega_hat from ``S^s`` to ``S^(s+1)``."""
        sp = self.space
        if not 0 <= s < sp.m:
            raise DomainError(f"no differential out of ghost degree {s}")
        return np.array(self.operator.matrix[sp.sector(s + 1), sp.sector(s)])

    def ghost_free_residual(self) -> float:
        """Distance between Omega_hat on ``S^0`` and ``psi_0 -> sum_a (G_a psi_0) eta^a``."""
        return max_abs(self.sector_map(0) - np.vstack(self.gens.G))


def _square_sector(sq: np.ndarray, space: FockSpace) -> int:
    worst, where = -1.0, 0
    for s in range(space.m + 1):
        val = max_abs(sq[:, space.sector(s)])
        if val > worst:
            worst, where = val, s
    return where


def quantum_brst(charge: BRSTCharge, gens: QuantumGenerators, tol: float | None = None, *, strict: bool = True) -> QuantumBRST:
    """Quantize the classical charge piece by piece and measure ``Omega_hat^2`` and
    ``Omega_hat - Omega_hat^dagger``.

    Raises :class:`NilpotencyError` (carrying the residual and the source ghost degree
    where it concentrates) when ``strict`` and the square exceeds tolerance.
    """
    space = gens.space
    tol = gens.tol if tol is None else tol
    if charge.m != space.m:
        raise DomainError(f"charge has m={charge.m}, space has m={space.m}")
    op = quantize(charge.pieces[0], gens)
    for piece in charge.pieces[1:]:
        op = op + quantize(piece, gens)
    op = GradedOperator(op.matrix, 1, 1)
    omega = op.matrix
    sq = omega @ omega
    K = space.gram
    right = np.linalg.solve(K, omega.conj().T @ K)
    adjoint_residual = max(max_abs(right - omega), max_abs(omega.conj().T @ K - K @ omega))
    G = ghost_number_op(space).matrix
    cert = BRSTCertificate(
        square_residual=max_abs(sq),
        square_sector=_square_sector(sq, space),
        adjoint_residual=adjoint_residual,
        block_residual=block_structure_residual(op, space),
        ghost_commutator_residual=max_abs(G @ omega - omega @ G - omega),
        tolerance=scaled_tol(tol, space.dim),
    )
    if strict and not cert.nilpotent:
        raise NilpotencyError(cert.square_residual, cert.square_sector)
    return QuantumBRST(op, gens, cert)
