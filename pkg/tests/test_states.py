from __future__ import annotations

from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brst_lab.errors import DomainError
from brst_lab.ghostalg import MultiIndex, all_multi_indices, normalize
from brst_lab.states import ExtendedState, FockSpace, pairing_gram, scalar_product, zeta, zeta_inverse
from support import random_inner

seeds = st.integers(0, 2**32 - 1)


def oracle_product(psi_vec, phi_vec, space) -> complex:
    """Top coefficient of ``sum (psi_I|phi_J) (eta^I)* eta^J`` with ``(eta^I)* = eta^{reversed I}``."""
    m, d, H = space.m, space.d, space.inner
    total = 0j
    for n1, I in enumerate(all_multi_indices(m)):
        for n2, J in enumerate(all_multi_indices(m)):
            idx, sign = normalize(list(reversed(I.indices)) + list(J.indices), m)
            if sign and len(idx) == m:
                x = psi_vec[n1 * d:(n1 + 1) * d]
                y = phi_vec[n2 * d:(n2 + 1) * d]
                total += sign * (x.conj() @ H @ y)
    return total


def random_vec(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


@given(seeds, st.integers(1, 4), st.integers(1, 3))
def test_scalar_product_matches_top_coefficient_oracle(seed, m, d):
    rng = np.random.default_rng(seed)
    H, _ = random_inner(rng, d)
    sp = FockSpace(m, d, H)
    x, y = random_vec(rng, sp.dim), random_vec(rng, sp.dim)
    ref = oracle_product(x, y, sp)
    psi, phi = ExtendedState.from_vector(sp, x), ExtendedState.from_vector(sp, y)
    assert scalar_product(psi, phi) == pytest.approx(ref, abs=1e-10)
    assert x.conj() @ sp.gram @ y == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("m", range(1, 6))
def test_gram_symmetry_sign(m):
    # (psi, phi)* = (-1)^{m(m-1)/2} (phi, psi)
    K = FockSpace(m, 2).gram
    sign = (-1) ** (m * (m - 1) // 2)
    assert np.array_equal(K.conj().T, sign * K)


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_pairing_gram_nonsingular(seed, m, d):
    rng = np.random.default_rng(seed)
    H, _ = random_inner(rng, d)
    sp = FockSpace(m, d, H)
    for p in range(m + 1):
        g = pairing_gram(sp, p)
        assert g.shape == (comb(m, p) * d, comb(m, m - p) * d)
        assert np.linalg.svd(g, compute_uv=False).min() > 1e-9


def test_sectors_are_contiguous_and_sized():
    sp = FockSpace(3, 2)
    deg = sp.degree_of_index()
    for s in range(4):
        sl = sp.sector(s)
        assert sp.sector_dim(s) == comb(3, s) * 2
        assert set(deg[sl]) == {s}


@given(seeds)
def test_vector_roundtrip(seed):
    rng = np.random.default_rng(seed)
    sp = FockSpace(3, 2)
    v = random_vec(rng, sp.dim)
    assert np.array_equal(ExtendedState.from_vector(sp, v).to_vector(), v)


def test_zeta_roundtrip_and_errors():
    sp = FockSpace(2, 3)
    v = np.array([1, 2j, 3])
    psi = zeta_inverse(sp, v)
    assert np.array_equal(zeta(psi), v)
    assert np.array_equal(psi.component(MultiIndex.full(2)), v)
    with pytest.raises(DomainError):
        zeta(ExtendedState(sp, {MultiIndex.empty(2): v}))
    with pytest.raises(DomainError):
        zeta_inverse(sp, np.ones(2))


def test_bad_spaces():
    with pytest.raises(DomainError):
        FockSpace(0, 1)
    with pytest.raises(DomainError):
        FockSpace(2, 2, np.eye(3))
    sp = FockSpace(2, 2)
    with pytest.raises(DomainError):
        ExtendedState(sp, {MultiIndex.empty(3): np.zeros(2)})
    with pytest.raises(DomainError):
        scalar_product(ExtendedState(sp), ExtendedState(FockSpace(2, 2)))
