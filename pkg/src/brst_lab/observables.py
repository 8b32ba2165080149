"""Classical observables: normal-ordered ghost polynomials with constraint-polynomial coefficients.

An observable is a finite sum of terms ``eta^A f P_B`` with ``A`` and ``B`` increasing
multi-indices and ``f`` a polynomial in commuting constraint symbols ``G_1..G_m``.
All arithmetic is exact over the Gaussian rationals.

Ghost relations used throughout::

    eta^a eta^b = -eta^b eta^a,   P_a P_b = -P_b P_a,   P_a eta^b + eta^b P_a = -i delta^b_a

The value ``-i`` (rather than a real constant) is the only one compatible with the
conjugation rules ``eta* = eta``, ``P* = -P`` and with ``P_hat = (1/i) d/d eta``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from numbers import Complex, Rational
from typing import Iterable, Mapping

from sympy.polys.domains import QQ_I

from .errors import ConfigurationError, DomainError, ParityError
from .ghostalg import MultiIndex, merge_sign, reversal_sign

Coeff = type(QQ_I.one)

ZERO = QQ_I.zero
ONE = QQ_I.one
I_UNIT = QQ_I(0, 1)
HALF = QQ_I(Fraction(1, 2), 0)
# P_a eta^a + eta^a P_a
CLIFFORD_CONSTANT = QQ_I(0, -1)


def to_coeff(x) -> Coeff:
    if isinstance(x, Coeff):
        return x
    if isinstance(x, (int, Rational)):
        return QQ_I(Fraction(x), 0)
    if isinstance(x, float):
        return QQ_I(Fraction(x), 0)
    if isinstance(x, Complex):
        z = complex(x)
        return QQ_I(Fraction(z.real), Fraction(z.imag))
    raise TypeError(f"cannot use {type(x).__name__} as a coefficient")


def conj(c: Coeff) -> Coeff:
    return QQ_I(c.x, -c.y)


def to_complex(c: Coeff) -> complex:
    return complex(float(c.x), float(c.y))


def format_coeff(c: Coeff) -> str:
    re, im = Fraction(int(c.x.numerator), int(c.x.denominator)), Fraction(int(c.y.numerator), int(c.y.denominator))
    if im == 0:
        return str(re)
    mag = abs(im)
    unit = ("" if mag.numerator == 1 else str(mag.numerator)) + "i" + ("" if mag.denominator == 1 else f"/{mag.denominator}")
    if re == 0:
        return unit if im > 0 else "-" + unit
    return f"({re}{'+' if im > 0 else '-'}{unit})"


class CoefficientPoly:
    """Polynomial in commuting symbols ``G_1..G_m`` with Gaussian-rational coefficients.

    ``terms`` maps exponent tuples of length m to nonzero coefficients.
    """

    __slots__ = ("m", "terms", "_hash")

    def __init__(self, m: int, terms: Mapping[tuple[int, ...], object] | None = None):
        self.m = m
        clean = {}
        for exps, c in (terms or {}).items():
            if len(exps) != m:
                raise DomainError(f"exponent vector {exps} has wrong length for m={m}")
            c = to_coeff(c)
            if c:
                clean[tuple(exps)] = c
        self.terms: dict[tuple[int, ...], Coeff] = clean
        self._hash = None

    @classmethod
    def constant(cls, m: int, value=1) -> "CoefficientPoly":
        return cls(m, {(0,) * m: value})

    @classmethod
    def symbol(cls, a: int, m: int) -> "CoefficientPoly":
        if not 1 <= a <= m:
            raise DomainError(f"constraint index {a} outside 1..{m}")
        exps = [0] * m
        exps[a - 1] = 1
        return cls(m, {tuple(exps): 1})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoefficientPoly):
            return NotImplemented
        return self.m == other.m and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.m, frozenset(self.terms.items())))
        return self._hash

    def __add__(self, other: "CoefficientPoly") -> "CoefficientPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, ZERO) + c
        return CoefficientPoly(self.m, out)

    def __neg__(self) -> "CoefficientPoly":
        return CoefficientPoly(self.m, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "CoefficientPoly") -> "CoefficientPoly":
        return self + (-other)

    def __mul__(self, other) -> "CoefficientPoly":
        if not isinstance(other, CoefficientPoly):
            s = to_coeff(other)
            return CoefficientPoly(self.m, {k: c * s for k, c in self.terms.items()})
        out: dict[tuple[int, ...], Coeff] = {}
        for (k1, c1), (k2, c2) in cartesian(self.terms.items(), other.terms.items()):
            k = tuple(x + y for x, y in zip(k1, k2))
            out[k] = out.get(k, ZERO) + c1 * c2
        return CoefficientPoly(self.m, out)

    __rmul__ = __mul__

    def conjugate(self) -> "CoefficientPoly":
        # constraint symbols are real
        return CoefficientPoly(self.m, {k: conj(c) for k, c in self.terms.items()})

    def derivative(self, a: int) -> "CoefficientPoly":
        out = {}
        for k, c in self.terms.items():
            e = k[a - 1]
            if e:
                kk = list(k)
                kk[a - 1] -= 1
                out[tuple(kk)] = c * e
        return CoefficientPoly(self.m, out)

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(not any(k) for k in self.terms)

    def is_real(self) -> bool:
        return all(not c.y for c in self.terms.values())

    def real_part(self) -> "CoefficientPoly":
        return CoefficientPoly(self.m, {k: QQ_I(c.x, 0) for k, c in self.terms.items()})

    def imag_part(self) -> "CoefficientPoly":
        return CoefficientPoly(self.m, {k: QQ_I(c.y, 0) for k, c in self.terms.items()})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda e: (sum(e), [-x for x in e])):
            mono = " ".join(f"G{a + 1}" + (f"^{e}" if e > 1 else "") for a, e in enumerate(k) if e)
            c = format_coeff(self.terms[k])
            parts.append(mono if c == "1" and mono else (f"-{mono}" if c == "-1" and mono else f"{c} {mono}".strip()))
        return " + ".join(parts)

    __repr__ = __str__


class StructureConstants:
    """Real structure constants ``C_ab^c`` of the constraint algebra ``{G_a, G_b} = C_ab^c G_c``.

    Indices are 1-based. Construction validates antisymmetry and the Jacobi identity
    and raises :class:`ConfigurationError` listing every violation.
    """

    def __init__(self, m: int, entries: Mapping[tuple[int, int, int], object] | None = None, validate: bool = True):
        self.m = m
        table: dict[tuple[int, int, int], Fraction] = {}
        for (a, b, c), v in (entries or {}).items():
            for x in (a, b, c):
                if not 1 <= x <= m:
                    raise ConfigurationError(f"structure constant index ({a},{b},{c}) outside 1..{m}")
            v = Fraction(v) if not isinstance(v, Fraction) else v
            if v:
                table[(a, b, c)] = table.get((a, b, c), Fraction(0)) + v
        self.table = {k: v for k, v in table.items() if v}
        if validate:
            problems = self.violations()
            if problems:
                raise ConfigurationError("invalid structure constants", problems)

    @classmethod
    def abelian(cls, m: int) -> "StructureConstants":
        return cls(m, {})

    @classmethod
    def su2(cls) -> "StructureConstants":
        eps = {}
        for (a, b, c), s in _levi_civita3().items():
            eps[(a, b, c)] = s
        return cls(3, eps)

    def __call__(self, a: int, b: int, c: int) -> Fraction:
        return self.table.get((a, b, c), Fraction(0))

    def is_abelian(self) -> bool:
        return not self.table

    def violations(self) -> list[str]:
        out = []
        m = self.m
        for a in range(1, m + 1):
            for b in range(a, m + 1):
                for c in range(1, m + 1):
                    if self(a, b, c) != -self(b, a, c):
                        out.append(f"antisymmetry violated at ({a},{b},{c}): C_ab^c={self(a, b, c)}, C_ba^c={self(b, a, c)}")
        for a in range(1, m + 1):
            for b in range(a + 1, m + 1):
                for c in range(b + 1, m + 1):
                    for e in range(1, m + 1):
                        s = sum(
                            self(a, b, d) * self(d, c, e) + self(b, c, d) * self(d, a, e) + self(c, a, d) * self(d, b, e)
                            for d in range(1, m + 1)
                        )
                        if s:
                            out.append(f"Jacobi identity violated for ({a},{b},{c}) in component {e}: residual {s}")
        return out

    def trace(self, a: int) -> Fraction:
        """``C_ab^b``; zero for unimodular algebras."""
        return sum((self(a, b, b) for b in range(1, self.m + 1)), Fraction(0))

    def bracket_polys(self, f: CoefficientPoly, g: CoefficientPoly) -> CoefficientPoly:
        """Poisson bracket of two coefficient polynomials, by the Leibniz rule from the C table."""
        out = CoefficientPoly(self.m)
        if not self.table or f.is_constant() or g.is_constant():
            return out
        for (a, b, c), v in self.table.items():
            da = f.derivative(a)
            if not da:
                continue
            db = g.derivative(b)
            if not db:
                continue
            out = out + da * db * CoefficientPoly.symbol(c, self.m) * v
        return out


def _levi_civita3() -> dict[tuple[int, int, int], int]:
    return {(1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1, (2, 1, 3): -1, (3, 2, 1): -1, (1, 3, 2): -1}


# ---------------------------------------------------------------------------
# Ghost-word normal ordering

@lru_cache(maxsize=None)
def _reorder(b_mask: int, i_mask: int, m: int) -> tuple[tuple[int, int, Coeff], ...]:
    """Normal-order ``P_B eta^I`` into ``sum c eta^K P_L``; returns ``(K, L, c)`` triples."""
    if not b_mask or not i_mask:
        return ((i_mask, b_mask, ONE),)
    b = (b_mask & -b_mask).bit_length()  # smallest index in B, so P_B = P_b P_rest
    rest = b_mask & (b_mask - 1)
    out: dict[tuple[int, int], Coeff] = {}
    pb = MultiIndex.of((b,), m)
    for k_mask, l_mask, c in _reorder(rest, i_mask, m):
        k = MultiIndex(k_mask, m)
        if b in k:
            # contract P_b with the eta^b sitting at position count_below(b) in eta^K
            sign = -1 if k.count_below(b) % 2 else 1
            key = (k_mask & ~(1 << (b - 1)), l_mask)
            out[key] = out.get(key, ZERO) + c * CLIFFORD_CONSTANT * sign
        # P_b passes all of eta^K
        merged, s = merge_sign(pb, MultiIndex(l_mask, m))
        if s:
            sign = s * (-1 if len(k) % 2 else 1)
            key = (k_mask, merged.mask)
            out[key] = out.get(key, ZERO) + c * sign
    return tuple((k, l, c) for (k, l), c in out.items() if c)


@lru_cache(maxsize=None)
def _ghost_product(a_mask: int, b_mask: int, i_mask: int, j_mask: int, m: int) -> tuple[tuple[int, int, Coeff], ...]:
    """``(eta^A P_B)(eta^I P_J)`` normal-ordered."""
    out: dict[tuple[int, int], Coeff] = {}
    A, J = MultiIndex(a_mask, m), MultiIndex(j_mask, m)
    for k_mask, l_mask, c in _reorder(b_mask, i_mask, m):
        left, s1 = merge_sign(A, MultiIndex(k_mask, m))
        if not s1:
            continue
        right, s2 = merge_sign(MultiIndex(l_mask, m), J)
        if not s2:
            continue
        key = (left.mask, right.mask)
        out[key] = out.get(key, ZERO) + c * (s1 * s2)
    return tuple((k, l, c) for (k, l), c in out.items() if c)


TermKey = tuple[MultiIndex, MultiIndex]


class Observable:
    """Normal-ordered element of the classical observable algebra."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: Mapping[TermKey, CoefficientPoly] | None = None):
        self.m = m
        clean: dict[TermKey, CoefficientPoly] = {}
        for (a, b), f in (terms or {}).items():
            if a.m != m or b.m != m or f.m != m:
                raise DomainError("term built over a different ghost count")
            if f:
                clean[(a, b)] = f
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, m: int) -> "Observable":
        return cls(m)

    @classmethod
    def constant(cls, m: int, value=1) -> "Observable":
        e = MultiIndex.empty(m)
        return cls(m, {(e, e): CoefficientPoly.constant(m, value)})

    @classmethod
    def coefficient(cls, f: CoefficientPoly) -> "Observable":
        e = MultiIndex.empty(f.m)
        return cls(f.m, {(e, e): f})

    @classmethod
    def constraint(cls, a: int, m: int) -> "Observable":
        return cls.coefficient(CoefficientPoly.symbol(a, m))

    @classmethod
    def eta(cls, a: int, m: int) -> "Observable":
        return cls.monomial((a,), (), m)

    @classmethod
    def ghost_momentum(cls, b: int, m: int) -> "Observable":
        return cls.monomial((), (b,), m)

    @classmethod
    def monomial(cls, etas: Iterable[int], momenta: Iterable[int], m: int, coeff: CoefficientPoly | object = 1) -> "Observable":
        """``eta^A f P_B`` for increasing ``etas`` and ``momenta``."""
        f = coeff if isinstance(coeff, CoefficientPoly) else CoefficientPoly.constant(m, coeff)
        return cls(m, {(MultiIndex.of(etas, m), MultiIndex.of(momenta, m)): f})

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "Observable") -> None:
        if not isinstance(other, Observable):
            raise TypeError(f"expected Observable, got {type(other).__name__}")
        if other.m != self.m:
            raise DomainError(f"ghost counts differ: {self.m} vs {other.m}")

    def __add__(self, other: "Observable") -> "Observable":
        self._check(other)
        out = dict(self.terms)
        for k, f in other.terms.items():
            out[k] = out[k] + f if k in out else f
        return Observable(self.m, out)

    def __neg__(self) -> "Observable":
        return Observable(self.m, {k: -f for k, f in self.terms.items()})

    def __sub__(self, other: "Observable") -> "Observable":
        return self + (-other)

    def scale(self, s) -> "Observable":
        if isinstance(s, CoefficientPoly):
            return Observable(self.m, {k: f * s for k, f in self.terms.items()})
        s = to_coeff(s)
        return Observable(self.m, {k: f * s for k, f in self.terms.items()})

    def __mul__(self, other) -> "Observable":
        if isinstance(other, Observable):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other) -> "Observable":
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Observable):
            return NotImplemented
        return self.m == other.m and self.terms == other.terms

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- grading ------------------------------------------------------------
    def bidegrees(self) -> set[tuple[int, int]]:
        return {(len(a), len(b)) for a, b in self.terms}

    def ghost_number(self) -> int | None:
        """``|A| - |B|`` when uniform over terms, else None."""
        vals = {len(a) - len(b) for a, b in self.terms}
        return vals.pop() if len(vals) == 1 else (0 if not vals else None)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, b) in sorted(self.terms, key=lambda k: (len(k[0]), len(k[1]), k[0].indices, k[1].indices)):
            parts.append(_format_term(a, self.terms[(a, b)], b))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _format_term(a: MultiIndex, f: CoefficientPoly, b: MultiIndex) -> str:
    ghosts = [f"eta{x}" for x in a.indices]
    moms = [f"P{x}" for x in b.indices]
    if len(f.terms) == 1:
        (exps, c), = f.terms.items()
        mono = [f"G{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e]
        word = " ".join(ghosts + mono + moms)
        cs = format_coeff(c)
        if not word:
            return cs
        return word if cs == "1" else ("-" + word if cs == "-1" else f"{cs} {word}")
    return " ".join(ghosts + [f"({f})"] + moms)


def multiply(F: Observable, G: Observable) -> Observable:
    """Associative product, re-normal-ordered with ``P_a eta^b = -i delta^b_a - eta^b P_a``."""
    F._check(G)
    m = F.m
    out: dict[TermKey, CoefficientPoly] = {}
    for (a, b), f in F.terms.items():
        for (i, j), g in G.terms.items():
            fg = None
            for k_mask, l_mask, c in _ghost_product(a.mask, b.mask, i.mask, j.mask, m):
                if fg is None:
                    fg = f * g
                key = (MultiIndex(k_mask, m), MultiIndex(l_mask, m))
                val = fg * c
                out[key] = out[key] + val if key in out else val
    return Observable(m, out)


def conjugate(F: Observable) -> Observable:
    """Antilinear involution with ``eta* = eta``, ``P* = -P``, ``(zw)* = w* z*``."""
    m = F.m
    out: dict[TermKey, CoefficientPoly] = {}
    for (a, b), f in F.terms.items():
        # (eta^A f P_B)* = (-1)^|B| rev(B) rev(A) P_B f* eta^A
        sign = (-1) ** len(b) * reversal_sign(b) * reversal_sign(a)
        fc = f.conjugate() * sign
        for k_mask, l_mask, c in _reorder(b.mask, a.mask, m):
            key = (MultiIndex(k_mask, m), MultiIndex(l_mask, m))
            val = fc * c
            out[key] = out[key] + val if key in out else val
    return Observable(m, out)


def parity(F: Observable) -> int:
    """Grassmann parity ``(|A| + |B|) mod 2``; raises on mixed parity."""
    vals = {(len(a) + len(b)) % 2 for a, b in F.terms}
    if len(vals) > 1:
        raise ParityError(f"observable mixes parities: {sorted(vals)}")
    return vals.pop() if vals else 0


def split_homogeneous(F: Observable) -> list[Observable]:
    """Pieces of fixed bidegree ``(|A|, |B|)``, ordered by bidegree."""
    groups: dict[tuple[int, int], dict[TermKey, CoefficientPoly]] = {}
    for (a, b), f in F.terms.items():
        groups.setdefault((len(a), len(b)), {})[(a, b)] = f
    return [Observable(F.m, groups[k]) for k in sorted(groups)]


def _unit_terms(m: int, a_mask: int, b_mask: int, i_mask: int, j_mask: int) -> dict[tuple[int, int], Coeff]:
    return {(k, l): c for k, l, c in _ghost_product(a_mask, b_mask, i_mask, j_mask, m)}


def poisson(F: Observable, G: Observable, C: StructureConstants, *, ghosts: bool = True, coefficients: bool = True) -> Observable:
    """Graded Poisson bracket ``[F, G]``.

    On generators: ``[G_a, G_b] = C_ab^c G_c``, ``[P_a, eta^b] = [eta^b, P_a] = delta^b_a``, all
    others zero. For terms ``X f`` and ``Z h`` with ghost words X, Z::

        [X f, Z h] = i (XZ - (-1)^{xz} ZX) f h + 1/2 (XZ + (-1)^{xz} ZX) {f, h}

    ``ghosts=False`` drops the first piece (bracket of C^inf(M) only),
    ``coefficients=False`` drops the second (ghost/momentum bracket only).
    """
    F._check(G)
    if C.m != F.m:
        raise DomainError(f"structure constants are for m={C.m}, observables for m={F.m}")
    m = F.m
    use_coeff = coefficients and not C.is_abelian()
    out: dict[TermKey, CoefficientPoly] = {}

    def add(k_mask: int, l_mask: int, val: CoefficientPoly) -> None:
        key = (MultiIndex(k_mask, m), MultiIndex(l_mask, m))
        out[key] = out[key] + val if key in out else val

    for (a, b), f in F.terms.items():
        x = (len(a) + len(b)) % 2
        for (i, j), g in G.terms.items():
            z = (len(i) + len(j)) % 2
            sign = -1 if x * z else 1
            xz = _unit_terms(m, a.mask, b.mask, i.mask, j.mask)
            zx = _unit_terms(m, i.mask, j.mask, a.mask, b.mask)
            keys = set(xz) | set(zx)
            if ghosts:
                fg = None
                for key in keys:
                    c = xz.get(key, ZERO) - zx.get(key, ZERO) * sign
                    if c:
                        fg = f * g if fg is None else fg
                        add(*key, fg * (c * I_UNIT))
            if use_coeff:
                br = C.bracket_polys(f, g)
                if br:
                    for key in keys:
                        c = xz.get(key, ZERO) + zx.get(key, ZERO) * sign
                        if c:
                            add(*key, br * (c * HALF))
    return Observable(m, out)


def graded_commutator(F: Observable, G: Observable) -> Observable:
    """``FG - (-1)^{eps_F eps_G} GF`` inside the observable algebra."""
    s = -1 if parity(F) * parity(G) else 1
    return multiply(F, G) - multiply(G, F).scale(s)
