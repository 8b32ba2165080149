"""Finite cochain complexes and their cohomology by numerical rank.

Also home to the bottom/top duality check and the extended complex with the sphere model.

Rank decisions: a singular value counts as zero when it is at most
``tol * max(largest singular value, 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .brst import QuantumBRST
from .errors import DomainError, InvalidComplexError, TheoremViolation
from .quantize import max_abs

RANK_TOL = 1e-9


def _threshold(sv: np.ndarray, tol: float) -> float:
    return tol * max(float(sv[0]) if sv.size else 0.0, 1.0)


def numerical_rank(M: np.ndarray, tol: float = RANK_TOL) -> int:
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv > _threshold(sv, tol)))


def null_space(M: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of M."""
    n = M.shape[1]
    if M.shape[0] == 0 or n == 0:
        return np.eye(n, dtype=complex)
    _, sv, vh = np.linalg.svd(M)
    r = int(np.sum(sv > _threshold(sv, tol)))
    return vh[r:].conj().T


def column_space(M: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the image of M."""
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    u, sv, _ = np.linalg.svd(M)
    r = int(np.sum(sv > _threshold(sv, tol)))
    return u[:, :r]


def format_ghost_number(x: Fraction) -> str:
    """Signed label such as ``-3/2``, ``0`` or ``+1``."""
    return f"+{x}" if x > 0 else str(x)


@dataclass(frozen=True, eq=False)
class CochainComplex:
    """``C^0 -> C^1 -> ... -> C^n`` with ``differentials[k]: C^k -> C^(k+1)``."""

    dims: tuple[int, ...]
    differentials: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.differentials) != len(self.dims) - 1 or len(self.labels) != len(self.dims):
            raise DomainError("need one differential between consecutive sectors and one label per sector")
        for k, d in enumerate(self.differentials):
            if d.shape != (self.dims[k + 1], self.dims[k]):
                raise DomainError(f"d_{k} has shape {d.shape}, expected {(self.dims[k + 1], self.dims[k])}")

    def square_residual(self) -> float:
        return max(
            (max_abs(self.differentials[k + 1] @ self.differentials[k]) for k in range(len(self.differentials) - 1)),
            default=0.0,
        )

    def incoming(self, k: int) -> np.ndarray:
        if k == 0:
            return np.zeros((self.dims[0], 0), dtype=complex)
        return self.differentials[k - 1]

    def outgoing(self, k: int) -> np.ndarray:
        if k == len(self.dims) - 1:
            return np.zeros((0, self.dims[k]), dtype=complex)
        return self.differentials[k]


@dataclass(frozen=True)
class DegreeCohomology:
    label: str
    dim: int
    kernel_dim: int
    image_dim: int
    representatives: np.ndarray = field(repr=False, compare=False)

    @property
    def h(self) -> int:
        return self.kernel_dim - self.image_dim


@dataclass(frozen=True)
class CohomologyReport:
    degrees: tuple[DegreeCohomology, ...]
    square_residual: float
    tolerance: float

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d.h for d in self.degrees)

    def by_label(self, label: str) -> DegreeCohomology:
        for d in self.degrees:
            if d.label == label:
                return d
        raise KeyError(label)


def cohomology(cx: CochainComplex, tol: float = RANK_TOL, square_tol: float = 1e-8) -> CohomologyReport:
    """Per-degree kernel, image and cohomology dimensions with representatives orthonormal
    to the image."""
    resid = cx.square_residual()
    scale = max((max_abs(d) for d in cx.differentials), default=1.0)
    if resid > square_tol * max(scale * scale, 1.0):
        raise InvalidComplexError(f"d^2 != 0: residual {resid:.3e}")
    out = []
    for k, n in enumerate(cx.dims):
        Z = null_space(cx.outgoing(k), tol)
        B = column_space(cx.incoming(k), tol)
        h = Z.shape[1] - B.shape[1]
        if h < 0:
            raise InvalidComplexError(f"image exceeds kernel in degree {k}")
        reps = Z - B @ (B.conj().T @ Z) if B.shape[1] else Z
        reps = column_space(reps, tol)[:, :h] if h else np.zeros((n, 0), dtype=complex)
        out.append(DegreeCohomology(cx.labels[k], n, Z.shape[1], B.shape[1], reps))
    return CohomologyReport(tuple(out), resid, tol)


def brst_complex(q: QuantumBRST) -> CochainComplex:
    """The sectors ``S^0 .. S^m`` labelled by ghost number ``-m/2 + s``."""
    sp = q.space
    m = sp.m
    dims = tuple(sp.sector_dim(s) for s in range(m + 1))
    diffs = tuple(q.sector_map(s) for s in range(m))
    labels = tuple(format_ghost_number(Fraction(2 * s - m, 2)) for s in range(m + 1))
    return CochainComplex(dims, diffs, labels)


@dataclass(frozen=True)
class DualityReport:
    kernel_dim: int
    cokernel_dim: int
    lambda_rank: int
    lambda_matrix: np.ndarray = field(repr=False, compare=False)

    @property
    def injective(self) -> bool:
        return self.lambda_rank == self.kernel_dim

    @property
    def surjective(self) -> bool:
        return self.lambda_rank == self.cokernel_dim

    @property
    def passed(self) -> bool:
        return self.kernel_dim == self.cokernel_dim and self.injective and self.surjective


def duality_check(q: QuantumBRST, tol: float = RANK_TOL, strict: bool = False) -> DualityReport:
    """Pair ``ker(Omega|S^0)`` against ``zeta(Omega(S^(m-1)))^perp`` through ``(psi_0 | phi)``.

    The bottom cohomology is the kernel; the top cohomology ``S^m / Omega(S^(m-1))`` is
    dual to the orthogonal complement of the image's top coefficients.
    """
    sp = q.space
    H = sp.inner
    kernel = null_space(q.sector_map(0), tol)
    image = column_space(q.sector_map(sp.m - 1), tol)
    # orthogonal complement in V with respect to H
    complement = null_space(image.conj().T @ H, tol) if image.shape[1] else np.eye(sp.d, dtype=complex)
    lam = kernel.conj().T @ H @ complement
    rank = numerical_rank(lam, tol) if lam.size else 0
    report = DualityReport(kernel.shape[1], complement.shape[1], rank, lam)
    if strict and not report.passed:
        raise TheoremViolation(
            f"duality fails: dim ker = {report.kernel_dim}, dim coker = {report.cokernel_dim}, rank Lambda = {rank}"
        )
    return report


def sphere_complex(m: int) -> CochainComplex:
    """Simplicial cochains of the boundary of the standard (m+1)-simplex, degrees 0..m."""
    if m < 1:
        raise DomainError(f"sphere dimension must be >= 1, got {m}")
    simplices = [list(combinations(range(m + 2), k + 1)) for k in range(m + 1)]
    diffs = []
    for k in range(m):
        rows, cols = simplices[k + 1], simplices[k]
        pos = {s: n for n, s in enumerate(cols)}
        d = np.zeros((len(rows), len(cols)), dtype=complex)
        for r, sigma in enumerate(rows):
            for i in range(len(sigma)):
                d[r, pos[sigma[:i] + sigma[i + 1:]]] = (-1) ** i
        diffs.append(d)
    labels = tuple(format_ghost_number(Fraction(2 * q - m, 2)) for q in range(m + 1))
    return CochainComplex(tuple(len(s) for s in simplices), tuple(diffs), labels)


@dataclass(frozen=True, eq=False)
class ExtendedComplex:
    """Graded tensor product, total degree ``n = p + q`` and ghost number ``n - m``."""

    complex: CochainComplex
    blocks: tuple[tuple[tuple[int, int, slice], ...], ...]
    m: int

    def block(self, n: int, p: int, q: int) -> slice:
        for pp, qq, sl in self.blocks[n]:
            if (pp, qq) == (p, q):
                return sl
        raise KeyError((n, p, q))


def extended_complex(left: CochainComplex, right: CochainComplex, m: int | None = None) -> ExtendedComplex:
    """``d(x (x) y) = d x (x) y + (-1)^p x (x) d~ y`` for x of degree p."""
    P, Q = len(left.dims) - 1, len(right.dims) - 1
    m = P if m is None else m
    blocks = []
    for n in range(P + Q + 1):
        offset, row = 0, []
        for p in range(max(0, n - Q), min(P, n) + 1):
            q = n - p
            size = left.dims[p] * right.dims[q]
            row.append((p, q, slice(offset, offset + size)))
            offset += size
        blocks.append(tuple(row))
    dims = tuple(blk[-1][2].stop for blk in blocks)
    diffs = []
    for n in range(P + Q):
        d = np.zeros((dims[n + 1], dims[n]), dtype=complex)
        targets = {(p, q): sl for p, q, sl in blocks[n + 1]}
        for p, q, src in blocks[n]:
            if p < P:
                d[targets[(p + 1, q)], src] = np.kron(left.differentials[p], np.eye(right.dims[q]))
            if q < Q:
                d[targets[(p, q + 1)], src] = (-1) ** p * np.kron(np.eye(left.dims[p]), right.differentials[q])
        diffs.append(d)
    labels = tuple(format_ghost_number(Fraction(n - m)) for n in range(P + Q + 1))
    return ExtendedComplex(CochainComplex(dims, tuple(diffs), labels), tuple(blocks), m)


@dataclass(frozen=True)
class BranchReport:
    """Ghost-zero cocycles supported on a single ``S^p (x) S~^q`` block."""

    p: int
    q: int
    cocycle_dim: int
    class_dim: int
    sphere_residual: float
    ghost_residual: float
    cocycles: np.ndarray = field(repr=False, compare=False)


def branch_cocycles(ext: ExtendedComplex, p: int, q: int, eta_ops=None, tol: float = RANK_TOL) -> BranchReport:
    """Cocycles of total degree ``p + q`` living only in the ``(p, q)`` block, how many
    cohomology classes they span, and how far they are from being killed by ``1 (x) d~``
    and by each ``eta_ops[b] (x) 1`` (ghost-factor operators on the left complex sectors).
    """
    cx = ext.complex
    n = p + q
    sl = ext.block(n, p, q)
    d_out = cx.outgoing(n)
    Z = null_space(d_out[:, sl], tol)
    full = np.zeros((cx.dims[n], Z.shape[1]), dtype=complex)
    full[sl] = Z
    image = cx.incoming(n)
    r_img = numerical_rank(image, tol)
    r_all = numerical_rank(np.hstack([image, full]), tol) if Z.shape[1] else r_img
    # 1 (x) d~ restricted to the block lands in (p, q+1)
    sphere_res = 0.0
    if n + 1 < len(cx.dims) and Z.shape[1]:
        try:
            tgt = ext.block(n + 1, p, q + 1)
            sphere_res = max_abs(d_out[tgt, sl] @ Z)
        except KeyError:
            pass
    ghost_res = 0.0
    if eta_ops is not None and Z.shape[1]:
        for e in eta_ops:
            right_dim = (sl.stop - sl.start) // e.shape[1]
            ghost_res = max(ghost_res, max_abs(np.kron(e, np.eye(right_dim)) @ Z))
    return BranchReport(p, q, Z.shape[1], r_all - r_img, sphere_res, ghost_res, full)
