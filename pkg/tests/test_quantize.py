from __future__ import annotations

from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brst_lab.errors import ConfigurationError, DomainError, ParityError
from brst_lab.ghostalg import MultiIndex, all_multi_indices, normalize
from brst_lab.models import su2_generators
from brst_lab.observables import CoefficientPoly, Observable, StructureConstants, multiply, poisson
from brst_lab.quantize import (
    GradedOperator,
    adjoint,
    block_structure_residual,
    closed_form_adjoint,
    generator_ops,
    ghost_eta,
    ghost_momentum,
    ghost_number_op,
    ghost_spectrum,
    graded_commutator,
    max_abs,
    quantize,
)
from brst_lab.states import FockSpace
from support import abelian_diagonal, correspondence_pairs, random_bidegree, random_inner, random_observable, transport

seeds = st.integers(0, 2**32 - 1)
SIZES = [(m, d) for m in range(1, 4) for d in range(1, 5)]


def su2_gens(spins=(1, 0), H=None, S=None):
    G = su2_generators(list(spins))
    d = G[0].shape[0]
    if S is not None:
        G = transport(G, S)
    return generator_ops(FockSpace(3, d, H), G, StructureConstants.su2())


def abelian_gens(rng, m, d):
    return generator_ops(FockSpace(m, d), abelian_diagonal(rng, m, d), StructureConstants.abelian(m))


# -- ghost factor against the exterior algebra ------------------------------------

@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_eta_is_left_multiplication(m):
    basis = all_multi_indices(m)
    pos = {I: n for n, I in enumerate(basis)}
    for a in range(1, m + 1):
        ref = np.zeros((2**m, 2**m), dtype=complex)
        for I in basis:
            J, s = normalize([a] + list(I.indices), m)
            if s:
                ref[pos[J], pos[I]] = s
        assert np.array_equal(ghost_eta(a, m), ref)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_momentum_is_minus_i_left_derivative(m):
    basis = all_multi_indices(m)
    pos = {I: n for n, I in enumerate(basis)}
    for a in range(1, m + 1):
        ref = np.zeros((2**m, 2**m), dtype=complex)
        for I in basis:
            if a in I:
                # bring eta^a to the front, then strip it
                rest = [x for x in I.indices if x != a]
                _, s = normalize([a] + rest, m)
                ref[pos[MultiIndex.of(rest, m)], pos[I]] = -1j * s
        assert np.array_equal(ghost_momentum(a, m), ref)


@pytest.mark.parametrize("m,d", SIZES)
def test_canonical_relations(m, d):
    rng = np.random.default_rng(m * 10 + d)
    gens = abelian_gens(rng, m, d)
    eye = np.eye(gens.space.dim)
    for a, b in product(range(1, m + 1), repeat=2):
        P, E = gens.momentum(a).matrix, gens.eta(b).matrix
        assert max_abs(P @ E + E @ P + 1j * (a == b) * eye) <= 1e-12
        Ea = gens.eta(a).matrix
        Pb = gens.momentum(b).matrix
        assert max_abs(Ea @ E + E @ Ea) <= 1e-12
        assert max_abs(P @ Pb + Pb @ P) <= 1e-12


# -- quantization map -------------------------------------------------------------

def test_symmetrized_coefficients():
    gens = su2_gens()
    G1, G2 = gens.G[0], gens.G[1]
    f = CoefficientPoly.symbol(1, 3) * CoefficientPoly.symbol(2, 3)
    assert max_abs(gens.coefficient_matrix(f) - (G1 @ G2 + G2 @ G1) / 2) < 1e-15
    F = Observable.coefficient(f)
    assert max_abs(quantize(F, gens).matrix - np.kron(np.eye(8), (G1 @ G2 + G2 @ G1) / 2)) < 1e-15


def _check_pairs(pairs, gens, C, product_ok: bool, bracket_ok: bool):
    worst_prod = worst_br = 0.0
    for F, H in pairs:
        qF, qH = quantize(F, gens), quantize(H, gens)
        if product_ok:
            worst_prod = max(worst_prod, max_abs(quantize(multiply(F, H), gens).matrix - (qF @ qH).matrix))
        if bracket_ok:
            comm = graded_commutator(qF, qH).matrix
            worst_br = max(worst_br, max_abs(quantize(poisson(F, H, C), gens).matrix - 1j * comm))
    return worst_prod, worst_br


@given(seeds)
def test_homomorphism_abelian(seed):
    rng = np.random.default_rng(seed)
    gens = abelian_gens(rng, 3, 3)
    p, b = _check_pairs(correspondence_pairs(rng, "abelian", 3, 3), gens, StructureConstants.abelian(3), True, True)
    assert p < 1e-10 and b < 1e-10


@given(seeds)
def test_homomorphism_su2_with_constant_factor(seed):
    rng = np.random.default_rng(seed)
    gens = su2_gens()
    p, _ = _check_pairs(correspondence_pairs(rng, "su2_product", 3, 3), gens, StructureConstants.su2(), True, False)
    assert p < 1e-10


@given(seeds)
def test_bracket_correspondence_su2(seed):
    rng = np.random.default_rng(seed)
    H, S = random_inner(rng, 4)
    gens = su2_gens(H=H, S=S)
    _, b = _check_pairs(correspondence_pairs(rng, "su2_bracket", 3, 3), gens, StructureConstants.su2(), False, True)
    assert b < 1e-10


def test_product_of_two_nonconstant_su2_coefficients_is_not_multiplicative():
    # quantization symmetrizes, so G_1 * G_2 does not map to G1_hat G2_hat
    gens = su2_gens()
    F, H = Observable.constraint(1, 3), Observable.constraint(2, 3)
    assert max_abs(quantize(F * H, gens).matrix - (quantize(F, gens) @ quantize(H, gens)).matrix) > 0.1


# -- adjoints -------------------------------------------------------------------

@pytest.mark.parametrize("m,d", SIZES)
def test_eta_self_adjoint_momentum_skew(m, d):
    rng = np.random.default_rng(100 + 10 * m + d)
    H, S = random_inner(rng, d)
    sp = FockSpace(m, d, H)
    gens = generator_ops(sp, transport(abelian_diagonal(rng, m, d), S), StructureConstants.abelian(m))
    K = sp.gram
    for a in range(1, m + 1):
        E, P = gens.eta(a).matrix, gens.momentum(a).matrix
        # (E psi, phi) = (psi, E phi) for every pair of basis vectors
        assert max_abs(E.conj().T @ K - K @ E) < 1e-12
        assert max_abs(P.conj().T @ K + K @ P) < 1e-12
        assert max_abs(adjoint(gens.eta(a), sp).matrix - E) < 1e-12
        assert max_abs(adjoint(gens.momentum(a), sp).matrix + P) < 1e-12


@given(seeds)
def test_closed_form_adjoint_matches_gram_solve(seed):
    rng = np.random.default_rng(seed)
    H, S = random_inner(rng, 4)
    gens = su2_gens(H=H, S=S)
    F = random_observable(rng, 3, *random_bidegree(rng, 3, 5), nterms=2)
    A = quantize(F, gens)
    ref = adjoint(A, gens.space)
    closed = closed_form_adjoint(F, gens)
    assert max_abs(ref.matrix - closed.matrix) < 1e-10 * max(1.0, max_abs(A.matrix))


# -- ghost number ----------------------------------------------------------------

@pytest.mark.parametrize("m,d", SIZES)
def test_ghost_number_spectrum(m, d):
    sp = FockSpace(m, d)
    G = ghost_number_op(sp)
    eig = np.sort(np.linalg.eigvals(G.matrix).real)
    expected = np.sort(np.concatenate([[k] * n for k, n in ghost_spectrum(sp).items()]))
    assert np.max(np.abs(eig - expected)) < 1e-12
    assert max_abs(adjoint(G, sp).matrix + G.matrix) < 1e-12
    # diagonal in the sector basis
    assert max_abs(G.matrix - np.diag(sp.degree_of_index() - m / 2)) < 1e-12


@given(seeds)
def test_ghost_number_grades_quantized_observables(seed):
    rng = np.random.default_rng(seed)
    gens = su2_gens()
    r, s, deg = random_bidegree(rng, 3, 4)
    F = random_observable(rng, 3, r, s, deg)
    A = quantize(F, gens)
    Gh = ghost_number_op(gens.space).matrix
    assert max_abs(Gh @ A.matrix - A.matrix @ Gh - (r - s) * A.matrix) < 1e-12
    assert block_structure_residual(A, gens.space) == 0.0
    assert A.ghost_shift == r - s and A.parity == (r + s) % 2


# -- configuration errors and operator algebra -------------------------------------

def test_non_hermitian_constraint_rejected():
    G = [np.array([[0, 1], [0, 0]], dtype=complex)]
    with pytest.raises(ConfigurationError, match="self-adjoint"):
        generator_ops(FockSpace(1, 2), G, StructureConstants.abelian(1))


def test_inconsistent_brackets_rejected_with_residual():
    G = su2_generators([1, 0])
    with pytest.raises(ConfigurationError, match="residual"):
        generator_ops(FockSpace(3, 4), G, StructureConstants.abelian(3))


def test_wrong_shapes_rejected():
    with pytest.raises(ConfigurationError):
        generator_ops(FockSpace(1, 2), [np.eye(3)], StructureConstants.abelian(1))
    with pytest.raises(ConfigurationError):
        generator_ops(FockSpace(2, 2), [np.eye(2)], StructureConstants.abelian(2))


def test_graded_operator_algebra():
    A = GradedOperator(np.eye(2), 1, 1)
    B = GradedOperator(2 * np.eye(2), 1, -1)
    assert (A @ B).parity == 0 and (A @ B).ghost_shift == 0
    assert (A + B).ghost_shift is None
    assert np.array_equal((-A).matrix, -np.eye(2))
    assert np.array_equal(graded_commutator(A, B).matrix, 4 * np.eye(2))
    with pytest.raises(ParityError):
        graded_commutator(A + GradedOperator(np.eye(2), 0, 0), B)
    with pytest.raises(DomainError):
        block_structure_residual(A + B, FockSpace(1, 1))
