"""Shared random generators and independent oracles for the test suite."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from brst_lab.ghostalg import MultiIndex
from brst_lab.observables import CoefficientPoly, Observable, to_complex

GAUSSIAN_SMALL = [complex(a, b) for a in range(-2, 3) for b in range(-2, 3) if (a, b) != (0, 0)]


def random_exponents(rng: np.random.Generator, m: int, degree: int) -> tuple[int, ...]:
    exps = [0] * m
    for _ in range(degree):
        exps[int(rng.integers(m))] += 1
    return tuple(exps)


def random_poly(rng: np.random.Generator, m: int, degree: int, nterms: int = 2) -> CoefficientPoly:
    """Homogeneous polynomial of the given degree with small Gaussian-integer coefficients."""
    terms: dict = {}
    for _ in range(nterms):
        c = GAUSSIAN_SMALL[int(rng.integers(len(GAUSSIAN_SMALL)))]
        exps = random_exponents(rng, m, degree)
        terms[exps] = terms.get(exps, 0) + c
    poly = CoefficientPoly(m, terms)
    return poly if poly else CoefficientPoly(m, {random_exponents(rng, m, degree): 1})


def random_index(rng: np.random.Generator, m: int, r: int) -> MultiIndex:
    return MultiIndex.of(sorted(rng.choice(np.arange(1, m + 1), size=r, replace=False).tolist()), m)


def random_observable(
    rng: np.random.Generator, m: int, r: int, s: int, degree: int = 0, nterms: int = 2
) -> Observable:
    """Sum of terms ``eta^A f P_B`` with ``|A| = r``, ``|B| = s`` and deg f = degree."""
    terms: dict = {}
    for _ in range(nterms):
        key = (random_index(rng, m, r), random_index(rng, m, s))
        f = random_poly(rng, m, degree, 1)
        terms[key] = terms[key] + f if key in terms else f
    out = Observable(m, terms)
    if not out:
        return random_observable(rng, m, r, s, degree, nterms)
    return out


def random_bidegree(rng: np.random.Generator, m: int, budget: int) -> tuple[int, int, int]:
    """``(r, s, deg)`` with r + s + deg <= budget."""
    r = int(rng.integers(0, min(m, budget) + 1))
    s = int(rng.integers(0, min(m, budget - r) + 1))
    deg = int(rng.integers(0, budget - r - s + 1))
    return r, s, deg


# ---------------------------------------------------------------------------
# word-rewriting oracle for the ghost algebra

def _rewrite(word: tuple, coeff: complex, out: dict) -> None:
    for k in range(len(word) - 1):
        (t1, a), (t2, b) = word[k], word[k + 1]
        if t1 == t2:
            if a == b:
                return
            if a > b:
                _rewrite(word[:k] + (word[k + 1], word[k]) + word[k + 2:], -coeff, out)
                return
        elif t1 == "p" and t2 == "e":
            _rewrite(word[:k] + (word[k + 1], word[k]) + word[k + 2:], -coeff, out)
            if a == b:
                _rewrite(word[:k] + word[k + 2:], -1j * coeff, out)
            return
    out[word] = out.get(word, 0) + coeff


def normal_form(word: tuple) -> dict:
    """Normal-order a word of letters ``('e', a)`` / ``('p', a)`` by naive rewriting.

    Relations: eta's and P's anticommute among themselves, ``P_a eta^b = -eta^b P_a - i delta``.
    """
    out: dict = {}
    _rewrite(tuple(word), 1 + 0j, out)
    return {w: c for w, c in out.items() if abs(c) > 1e-12}


def observable_as_words(F: Observable) -> dict:
    """Constant-coefficient observable as ``{word: complex}``."""
    out = {}
    for (a, b), f in F.terms.items():
        assert f.is_constant()
        word = tuple(("e", x) for x in a.indices) + tuple(("p", x) for x in b.indices)
        out[word] = sum(to_complex(c) for c in f.terms.values())
    return out


def word_observable(word: tuple, m: int) -> Observable:
    out = Observable.constant(m)
    for t, a in word:
        out = out * (Observable.eta(a, m) if t == "e" else Observable.ghost_momentum(a, m))
    return out


# ---------------------------------------------------------------------------
# linear algebra helpers

def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_inner(rng: np.random.Generator, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Positive-definite H = S^H S and the factor S."""
    S = np.eye(d) + 0.3 * (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return S.conj().T @ S, S


def transport(G_mats, S: np.ndarray):
    """Operators self-adjoint for ``H = S^H S``, from operators self-adjoint for the identity."""
    Sinv = np.linalg.inv(S)
    return [Sinv @ g @ S for g in G_mats]


def frac(x) -> Fraction:
    return Fraction(x)


# ---------------------------------------------------------------------------
# random pairs for the quantization correspondence

def random_pair_budget(rng: np.random.Generator, m: int, budget: int, max_deg: int | None = None):
    r, s, deg = random_bidegree(rng, m, budget)
    if max_deg is not None:
        deg = min(deg, max_deg)
    return random_observable(rng, m, r, s, deg, nterms=int(rng.integers(1, 4)))


def correspondence_pairs(rng: np.random.Generator, kind: str, m: int, n: int, budget: int = 5):
    """Pairs on which quantization is exactly multiplicative / bracket-preserving.

    ``abelian``: anything. ``su2_product``: one factor has constant coefficients.
    ``su2_bracket``: both coefficient degrees at most one, or one factor constant.
    """
    out = []
    for _ in range(n):
        if kind == "abelian":
            F, H = random_pair_budget(rng, m, budget), random_pair_budget(rng, m, budget)
        elif kind == "su2_product":
            F, H = random_pair_budget(rng, m, budget), random_pair_budget(rng, m, budget, max_deg=0)
            if rng.integers(2):
                F, H = H, F
        elif kind == "su2_bracket":
            if rng.integers(2):
                F, H = random_pair_budget(rng, m, budget, 1), random_pair_budget(rng, m, budget, 1)
            else:
                F, H = random_pair_budget(rng, m, budget), random_pair_budget(rng, m, budget, max_deg=0)
        else:
            raise ValueError(kind)
        out.append((F, H))
    return out


def abelian_diagonal(rng: np.random.Generator, m: int, d: int):
    return [np.diag(rng.integers(-2, 3, size=d).astype(float)).astype(complex) for _ in range(m)]
