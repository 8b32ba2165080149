"""Operators on the extended state space and the quantization map.

Ghost operators act on the 2^m-dimensional ghost factor; V-operators act on the
d-dimensional factor. A full operator is assembled as ``kron(ghost_part, v_part)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import comb

import numpy as np

from .errors import ConfigurationError, DomainError, NoAdjointError, ParityError
from .ghostalg import MultiIndex, all_multi_indices, merge_sign
from .observables import CoefficientPoly, Observable, StructureConstants, to_complex
from .states import FockSpace

DEFAULT_TOL = 1e-10


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def scaled_tol(tol: float, n: int) -> float:
    return tol * max(n, 1)


@dataclass(frozen=True, eq=False)
class GradedOperator:
    matrix: np.ndarray
    parity: int | None = None
    ghost_shift: int | None = None

    def __matmul__(self, other: "GradedOperator") -> "GradedOperator":
        par = None if self.parity is None or other.parity is None else (self.parity + other.parity) % 2
        sh = None if self.ghost_shift is None or other.ghost_shift is None else self.ghost_shift + other.ghost_shift
        return GradedOperator(self.matrix @ other.matrix, par, sh)

    def _combine(self, other: "GradedOperator", sign: int) -> "GradedOperator":
        par = self.parity if self.parity == other.parity else None
        sh = self.ghost_shift if self.ghost_shift == other.ghost_shift else None
        return GradedOperator(self.matrix + sign * other.matrix, par, sh)

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        return self._combine(other, 1)

    def __sub__(self, other: "GradedOperator") -> "GradedOperator":
        return self._combine(other, -1)

    def __neg__(self) -> "GradedOperator":
        return GradedOperator(-self.matrix, self.parity, self.ghost_shift)

    def scale(self, c: complex) -> "GradedOperator":
        return GradedOperator(c * self.matrix, self.parity, self.ghost_shift)

    def __call__(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec


# ---------------------------------------------------------------------------
# ghost factor

@lru_cache(maxsize=None)
def ghost_eta(a: int, m: int) -> np.ndarray:
    """Left multiplication by ``eta^a`` on the ghost factor."""
    basis = all_multi_indices(m)
    pos = {I: n for n, I in enumerate(basis)}
    out = np.zeros((len(basis), len(basis)), dtype=complex)
    single = MultiIndex.of((a,), m)
    for I in basis:
        J, s = merge_sign(single, I)
        if s:
            out[pos[J], pos[I]] = s
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def ghost_momentum(a: int, m: int) -> np.ndarray:
    """``(1/i) d/d eta^a`` (left derivative) on the ghost factor."""
    basis = all_multi_indices(m)
    pos = {I: n for n, I in enumerate(basis)}
    out = np.zeros((len(basis), len(basis)), dtype=complex)
    for I in basis:
        if a in I:
            sign = -1 if I.count_below(a) % 2 else 1
            out[pos[I.without(a)], pos[I]] = -1j * sign
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def ghost_word(a_mask: int, b_mask: int, m: int) -> np.ndarray:
    """``eta_hat^A P_hat_B`` on the ghost factor (momenta act first)."""
    out = np.eye(1 << m, dtype=complex)
    for a in MultiIndex(a_mask, m).indices:
        out = out @ ghost_eta(a, m)
    for b in MultiIndex(b_mask, m).indices:
        out = out @ ghost_momentum(b, m)
    out.setflags(write=False)
    return out


def _sector_degrees(m: int) -> np.ndarray:
    return np.array([len(I) for I in all_multi_indices(m)])


# ---------------------------------------------------------------------------

class QuantumGenerators:
    """Generator operators for a constraint system on a given Fock space.

    Checks on construction that each ``G_hat_a`` is self-adjoint for the inner product on V
    and that ``[G_hat_a, G_hat_b] = -i C_ab^c G_hat_c``.
    """

    def __init__(self, space: FockSpace, G_mats, C: StructureConstants, tol: float = DEFAULT_TOL):
        if C.m != space.m:
            raise ConfigurationError(f"structure constants for m={C.m} but space has m={space.m}")
        mats = [np.asarray(g, dtype=complex) for g in G_mats]
        if len(mats) != space.m:
            raise ConfigurationError(f"expected {space.m} constraint matrices, got {len(mats)}")
        problems = []
        for a, g in enumerate(mats, start=1):
            if g.shape != (space.d, space.d):
                problems.append(f"G_{a} has shape {g.shape}, expected {(space.d, space.d)}")
        if problems:
            raise ConfigurationError("bad constraint matrices", problems)
        self.space = space
        self.C = C
        self.tol = tol
        self.G = tuple(mats)
        H = space.inner
        self.hermiticity_residual = max(max_abs(H @ g - g.conj().T @ H) for g in mats)
        self.consistency_residual = self._consistency()
        limit = scaled_tol(tol, space.d)
        if self.hermiticity_residual > limit:
            problems.append(f"constraint operators not self-adjoint: residual {self.hermiticity_residual:.3e}")
        if self.consistency_residual > limit:
            problems.append(f"[G_a, G_b] != -i C_ab^c G_c: residual {self.consistency_residual:.3e}")
        if problems:
            raise ConfigurationError("inconsistent quantum constraints", problems)
        self._poly_cache: dict[tuple[int, ...], np.ndarray] = {}

    def _consistency(self) -> float:
        m = self.space.m
        worst = 0.0
        for a in range(1, m + 1):
            for b in range(a + 1, m + 1):
                lhs = self.G[a - 1] @ self.G[b - 1] - self.G[b - 1] @ self.G[a - 1]
                rhs = sum((-1j * float(self.C(a, b, c)) * self.G[c - 1] for c in range(1, m + 1)), np.zeros_like(lhs))
                worst = max(worst, max_abs(lhs - rhs))
        return worst

    # -- building blocks ---------------------------------------------------
    def eta(self, a: int) -> GradedOperator:
        return GradedOperator(np.kron(ghost_eta(a, self.space.m), np.eye(self.space.d)), 1, 1)

    def momentum(self, a: int) -> GradedOperator:
        return GradedOperator(np.kron(ghost_momentum(a, self.space.m), np.eye(self.space.d)), 1, -1)

    def lift(self, f: np.ndarray) -> GradedOperator:
        """``f_hat`` acting on every ghost component alike."""
        return GradedOperator(np.kron(np.eye(1 << self.space.m), np.asarray(f, dtype=complex)), 0, 0)

    def constraint(self, a: int) -> GradedOperator:
        return self.lift(self.G[a - 1])

    def monomial_matrix(self, exps: tuple[int, ...]) -> np.ndarray:
        """Fully symmetrized product of the ``G_hat`` factors in ``G^exps``."""
        if exps not in self._poly_cache:
            factors = [a for a, e in enumerate(exps) for _ in range(e)]
            d = self.space.d
            if not factors:
                out = np.eye(d, dtype=complex)
            else:
                orders = set(permutations(factors))
                out = np.zeros((d, d), dtype=complex)
                for order in orders:
                    prod = np.eye(d, dtype=complex)
                    for a in order:
                        prod = prod @ self.G[a]
                    out += prod
                out /= len(orders)
            out.setflags(write=False)
            self._poly_cache[exps] = out
        return self._poly_cache[exps]

    def coefficient_matrix(self, f: CoefficientPoly) -> np.ndarray:
        out = np.zeros((self.space.d, self.space.d), dtype=complex)
        for exps, c in f.terms.items():
            out = out + to_complex(c) * self.monomial_matrix(exps)
        return out


def generator_ops(space: FockSpace, G_mats, C: StructureConstants, tol: float = DEFAULT_TOL) -> QuantumGenerators:
    return QuantumGenerators(space, G_mats, C, tol)


def quantize(F: Observable, gens: QuantumGenerators) -> GradedOperator:
    """``F_hat = sum eta_hat^A f_hat P_hat_B`` with momenta acting first."""
    m = gens.space.m
    if F.m != m:
        raise DomainError(f"observable has m={F.m}, space has m={m}")
    out = np.zeros((gens.space.dim, gens.space.dim), dtype=complex)
    shifts, parities = set(), set()
    for (a, b), f in F.terms.items():
        out += np.kron(ghost_word(a.mask, b.mask, m), gens.coefficient_matrix(f))
        shifts.add(len(a) - len(b))
        parities.add((len(a) + len(b)) % 2)
    if not F.terms:
        shifts, parities = {0}, {0}
    return GradedOperator(
        out,
        parities.pop() if len(parities) == 1 else None,
        shifts.pop() if len(shifts) == 1 else None,
    )


def adjoint(A: GradedOperator, space: FockSpace, tol: float = DEFAULT_TOL) -> GradedOperator:
    """Two-sided adjoint for the degenerate pairing.

    The right adjoint solves ``K B = A^H K``; it is accepted only if it is also a left
    adjoint, ``B^H K = K A``, to within ``tol`` (scaled by dimension).
    """
    K = space.gram
    B = np.linalg.solve(K, A.matrix.conj().T @ K)
    residual = max_abs(B.conj().T @ K - K @ A.matrix)
    if residual > scaled_tol(tol, space.dim):
        raise NoAdjointError(residual)
    return GradedOperator(B, A.parity, A.ghost_shift)


def closed_form_adjoint(F: Observable, gens: QuantumGenerators) -> GradedOperator:
    """Adjoint of ``F_hat`` term by term: ``(-1)^|B| (-1)^([|A|/2] + [|B|/2]) P_hat_B f_hat^+ eta_hat^A``."""
    space = gens.space
    m = space.m
    H = space.inner
    Hinv = np.linalg.inv(H)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for (a, b), f in F.terms.items():
        r, s = len(a), len(b)
        sign = (-1) ** (s + r // 2 + s // 2)
        fmat = gens.coefficient_matrix(f)
        f_dag = Hinv @ fmat.conj().T @ H
        word = ghost_word(0, b.mask, m) @ ghost_word(a.mask, 0, m)
        out += sign * np.kron(word, f_dag)
    par = {(len(a) + len(b)) % 2 for a, b in F.terms}
    sh = {len(a) - len(b) for a, b in F.terms}
    return GradedOperator(out, par.pop() if len(par) == 1 else None, sh.pop() if len(sh) == 1 else None)


def ghost_number_op(space: FockSpace) -> GradedOperator:
    """``(i/2) sum_a (eta_hat^a P_hat_a - P_hat_a eta_hat^a)``."""
    m = space.m
    g = np.zeros((1 << m, 1 << m), dtype=complex)
    for a in range(1, m + 1):
        e, p = ghost_eta(a, m), ghost_momentum(a, m)
        g += 0.5j * (e @ p - p @ e)
    return GradedOperator(np.kron(g, np.eye(space.d)), 0, 0)


def ghost_spectrum(space: FockSpace) -> dict[float, int]:
    """Expected spectrum of the ghost number operator: ``-m/2 + s`` with multiplicity ``C(m,s) d``."""
    return {s - space.m / 2: comb(space.m, s) * space.d for s in range(space.m + 1)}


def graded_commutator(A: GradedOperator, B: GradedOperator) -> GradedOperator:
    """``AB - (-1)^{eps_A eps_B} BA``."""
    if A.parity is None or B.parity is None:
        raise ParityError("graded commutator needs parity-homogeneous operators")
    sign = -1 if A.parity * B.parity else 1
    return A @ B - (B @ A).scale(sign)


def sector_of(space: FockSpace) -> np.ndarray:
    """Ghost degree of each basis vector."""
    return np.repeat(_sector_degrees(space.m), space.d)


def block_structure_residual(A: GradedOperator, space: FockSpace) -> float:
    """Largest entry of A outside the blocks ``S^s -> S^(s + ghost_shift)``."""
    if A.ghost_shift is None:
        raise DomainError("operator has no definite ghost shift")
    deg = sector_of(space)
    allowed = deg[:, None] == deg[None, :] + A.ghost_shift
    return max_abs(np.where(allowed, 0, A.matrix))
