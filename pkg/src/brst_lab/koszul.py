"""Koszul-Tate differential, its contracting homotopy, and the perturbative BRST charge."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConstructionError, NotInImageError, RankOverflowError
from .ghostalg import MultiIndex, merge_sign
from .observables import CoefficientPoly, HALF, Observable, StructureConstants, conjugate, poisson


def koszul_tate(F: Observable) -> Observable:
    """Odd derivation with ``delta(P_a) = -G_a`` and ``delta(eta^a) = delta(G_a) = 0``.

    On a normal-ordered term only the momentum word is hit:
    ``delta(eta^A f P_B) = (-1)^|A| eta^A f delta(P_B)``.
    """
    m = F.m
    out: dict = {}
    for (a, b), f in F.terms.items():
        for pos, bk in enumerate(b.indices):
            # P_{b1}..P_{bk}..: moving delta past pos odd factors, then -G_bk is even
            sign = -((-1) ** (len(a) + pos))
            key = (a, b.without(bk))
            val = f * CoefficientPoly.symbol(bk, m) * sign
            out[key] = out[key] + val if key in out else val
    return Observable(m, out)


def koszul_weight(exps: tuple[int, ...], b: MultiIndex) -> int:
    """Polynomial degree in G plus number of momenta; the eigenvalue of delta s + s delta."""
    return sum(exps) + len(b)


def contracting_homotopy(F: Observable) -> Observable:
    """Homotopy ``s`` with ``delta s + s delta = id`` on every monomial of positive weight.

    Each monomial ``eta^A G^alpha P_B`` of weight N goes to
    ``(-1)^|A| / N * sum_a alpha_a eta^A G^(alpha - e_a) (-P_a) P_B``.
    """
    m = F.m
    out: dict = {}
    for (a, b), f in F.terms.items():
        eta_sign = -1 if len(a) % 2 else 1
        for exps, c in f.terms.items():
            n = koszul_weight(exps, b)
            if n == 0:
                raise NotInImageError(f"monomial eta^{a.indices} P_{b.indices} has no G or P factor")
            for idx, e in enumerate(exps):
                if not e:
                    continue
                lowered = list(exps)
                lowered[idx] -= 1
                merged, s = merge_sign(MultiIndex.of((idx + 1,), m), b)
                if not s:
                    continue
                coeff = c * Fraction(-eta_sign * s * e, n)
                key = (a, merged)
                val = CoefficientPoly(m, {tuple(lowered): coeff})
                out[key] = out[key] + val if key in out else val
    return Observable(m, out)


@dataclass(frozen=True)
class BRSTCharge:
    pieces: tuple[Observable, ...]
    structure_constants: StructureConstants = field(repr=False)

    @property
    def m(self) -> int:
        return self.pieces[0].m

    @property
    def total(self) -> Observable:
        out = Observable.zero(self.m)
        for piece in self.pieces:
            out = out + piece
        return out

    @property
    def rank(self) -> int:
        return len(self.pieces) - 1


def brst_seed(m: int) -> Observable:
    """``eta^a G_a``."""
    out = Observable.zero(m)
    for a in range(1, m + 1):
        out = out + Observable.monomial((a,), (), m, CoefficientPoly.symbol(a, m))
    return out


def obstruction(pieces: list[Observable], p: int, C: StructureConstants) -> Observable:
    """``D^(p)``: half the C^inf(M) brackets at level p plus the ghost brackets at level p+1
    that do not involve the unknown ``Omega^(p+1)``."""
    m = pieces[0].m
    total = Observable.zero(m)
    for k in range(p + 1):
        total = total + poisson(pieces[p - k], pieces[k], C, ghosts=False)
    for k in range(1, p + 1):
        total = total + poisson(pieces[p - k + 1], pieces[k], C, coefficients=False)
    return total.scale(HALF)


def _pattern_ok(piece: Observable, p: int) -> bool:
    # leading part: p momenta and p+1 ghosts; reality corrections keep ghost number 1
    # with fewer momenta
    if not piece:
        return False
    top = [(a, b) for a, b in piece.terms if len(b) == p]
    return bool(top) and all(len(a) - len(b) == 1 and len(b) <= p for a, b in piece.terms) and all(
        len(a) == p + 1 for a, _ in top
    )


def build_brst(C: StructureConstants, max_rank: int = 4) -> BRSTCharge:
    """Homological perturbation for the classical BRST charge.

    Starting from ``eta^a G_a``, each step solves ``delta(Omega^(p+1)) = D^(p)`` with the
    contracting homotopy and then takes the real part ``(X + X*)/2``. The loop stops when
    the obstruction vanishes; the result is certified by ``[Omega, Omega] = 0`` exactly.
    """
    if max_rank < 1:
        raise ValueError("max_rank must be at least 1")
    m = C.m
    pieces = [brst_seed(m)]
    p = 0
    while True:
        D = obstruction(pieces, p, C)
        if not D:
            break
        if p == max_rank:
            raise RankOverflowError(f"obstruction D^({p}) nonzero at max_rank={max_rank}: {D}")
        if koszul_tate(D):
            raise ConstructionError(f"obstruction D^({p}) is not delta-closed")
        candidate = contracting_homotopy(D)
        if koszul_tate(candidate) != D:
            raise ConstructionError(f"homotopy failed to invert delta on D^({p})")
        piece = (candidate + conjugate(candidate)).scale(HALF)
        if koszul_tate(piece) != D:
            raise ConstructionError(f"real part of Omega^({p + 1}) no longer solves the homotopy equation")
        if not _pattern_ok(piece, p + 1):
            raise ConstructionError(f"Omega^({p + 1}) has the wrong ghost/antighost pattern: {piece}")
        pieces.append(piece)
        p += 1
    charge = BRSTCharge(tuple(pieces), C)
    omega = charge.total
    if poisson(omega, omega, C):
        raise ConstructionError(f"[Omega, Omega] = {poisson(omega, omega, C)} != 0")
    if conjugate(omega) != omega:
        raise ConstructionError("Omega is not real")
    return charge
