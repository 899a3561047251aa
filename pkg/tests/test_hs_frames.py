import numpy as np
import pytest
from hypothesis import given, strategies as st

from schattenmult.errors import DimensionError, DomainError, InvalidSpecError, NotAFrameError
from schattenmult.harness.generate import Dims, random_frame, random_invertible, random_riesz
from schattenmult.hs_frames import (
    GeneralizedDualSpec,
    HSFrameSystem,
    analysis,
    canonical_dual,
    dual_family,
    equivalence_operator,
    equivalence_operator_normalized,
    frame_bounds,
    frame_bounds_unsquared,
    generalized_dual,
    is_dual,
    is_generalized_dual,
    is_riesz_basis,
    kernel_bessel,
    kernel_projection,
    range_projection,
    recover_generalized_dual_spec,
    special_probe,
    synthesis,
    systems_equal,
)
from schattenmult.op_sequences import OpSequence, basis_F, seq_inner
from schattenmult.rng import complex_normal
from schattenmult.schatten_core import inner

from conftest import frame_dims, op, riesz_dims, rng_for, seeds


def _frame(dims, seed, cond=5.0):
    return random_frame(dims, rng_for(seed, "frame"), cond)


def _three_vectors():
    rows = np.array([[1, 0], [0, 1], [1 / np.sqrt(2), 1 / np.sqrt(2)]])
    return HSFrameSystem(rows, 3, 1)


# --- construction -----------------------------------------------------------


def test_shapes_and_maps():
    U = np.arange(24).reshape(8, 3)
    G = HSFrameSystem(U, 2, 2)
    assert G.shape == (3, 2, 2) and G.rows == 8
    np.testing.assert_array_equal(G.maps[1], U[4:])
    H = HSFrameSystem.from_maps(G.maps)
    np.testing.assert_array_equal(H.analysis_mat, G.analysis_mat)
    with pytest.raises(DimensionError):
        HSFrameSystem(U, 3, 2)
    with pytest.raises(DimensionError):
        HSFrameSystem.from_maps(np.zeros((2, 3, 3)))


def test_systems_are_read_only():
    G = _three_vectors()
    with pytest.raises(ValueError):
        G.analysis_mat[0, 0] = 5


def test_three_vector_bounds():
    A, B = frame_bounds(_three_vectors())
    assert A == pytest.approx(1.0)
    assert B == pytest.approx(2.0)


def test_duplicating_maps_doubles_bounds():
    G = _frame(Dims(5, 2, 2), 3)
    G2 = HSFrameSystem.from_maps(np.concatenate([G.maps, G.maps]))
    np.testing.assert_allclose(frame_bounds(G2), 2 * np.array(frame_bounds(G)), rtol=1e-12)


def test_not_a_frame():
    G = HSFrameSystem(np.array([[1.0, 0.0], [0.0, 0.0]]), 2, 1)
    assert not G.is_frame
    with pytest.raises(NotAFrameError):
        canonical_dual(G)
    with pytest.raises(NotAFrameError):
        _ = G.frame_op_inv


@given(frame_dims, seeds)
def test_bounds_bracket_quadratic_form(dims, seed):
    G = _frame(dims, seed)
    A, B = frame_bounds(G)
    f = complex_normal(rng_for(seed, "f"), (20, G.d))
    q = np.real(np.einsum("kd,de,ke->k", f.conj(), G.frame_op, f)) / np.sum(np.abs(f) ** 2, axis=1)
    assert np.all(q >= A * (1 - 1e-12)) and np.all(q <= B * (1 + 1e-12))
    w, V = np.linalg.eigh(G.frame_op)
    assert np.real(V[:, 0].conj() @ G.frame_op @ V[:, 0]) == pytest.approx(A, rel=1e-10)
    a, b = frame_bounds_unsquared(G)
    assert a**2 == pytest.approx(A) and b**2 == pytest.approx(B)


@given(frame_dims, seeds)
def test_frame_operator_oracle(dims, seed):
    G = _frame(dims, seed)
    S = sum(Gi.conj().T @ Gi for Gi in G.maps)
    np.testing.assert_allclose(G.frame_op, S, atol=1e-12)


@given(frame_dims, seeds)
def test_analysis_synthesis_adjoint(dims, seed):
    G = _frame(dims, seed)
    rng = rng_for(seed, "adj")
    f = complex_normal(rng, G.d)
    A = OpSequence(complex_normal(rng, (G.n, G.N, G.N)))
    assert seq_inner(analysis(G, f), A) == pytest.approx(inner(f, synthesis(G, A)), rel=1e-12, abs=1e-12)
    np.testing.assert_array_equal(G.synthesis_mat, G.analysis_mat.conj().T)


def test_analysis_shape_errors():
    G = _three_vectors()
    with pytest.raises(DimensionError):
        analysis(G, np.ones(3))
    with pytest.raises(DimensionError):
        synthesis(G, OpSequence.zeros(2, 1))


# --- duals ------------------------------------------------------------------


@given(frame_dims, seeds)
def test_canonical_dual_bounds_and_involution(dims, seed):
    G = _frame(dims, seed)
    Gt = canonical_dual(G)
    A, B = frame_bounds(G)
    np.testing.assert_allclose(frame_bounds(Gt), (1 / B, 1 / A), rtol=1e-9)
    assert op(canonical_dual(Gt).analysis_mat - G.analysis_mat) <= 1e-9
    assert is_dual(Gt, G) and is_dual(G, Gt)


def test_parseval_frame_is_its_own_dual():
    G = _frame(Dims(6, 2, 3), 0)
    P = G.compose(G.frame_op_inv_sqrt)
    np.testing.assert_allclose(frame_bounds(P), (1, 1), atol=1e-12)
    assert op(canonical_dual(P).analysis_mat - P.analysis_mat) <= 1e-12


def test_is_dual_examples():
    G = _frame(Dims(5, 2, 2), 1)
    assert not is_dual(G, G)
    assert not is_dual(canonical_dual(G).scaled(2.0), G)
    with pytest.raises(DimensionError):
        is_dual(_frame(Dims(4, 1, 6), 1), G)


@given(frame_dims, seeds)
def test_dual_family(dims, seed):
    F = _frame(dims, seed)
    assert op(dual_family(F, F.with_analysis(np.zeros_like(F.analysis_mat))).analysis_mat
              - canonical_dual(F).analysis_mat) <= 1e-12
    H = F.with_analysis(complex_normal(rng_for(seed, "H"), F.analysis_mat.shape))
    assert is_dual(dual_family(F, H), F)


def test_special_probe():
    F = _frame(Dims(5, 2, 2), 2)
    e = np.zeros(5, dtype=complex)
    e[2] = 1
    P = special_probe(F, 1, 3, e)
    np.testing.assert_array_equal(analysis(P, e).blocks, basis_F(1, 3, 2, 2).blocks)
    f = np.array([1, 1, 0, 2, -1j])
    assert np.all(analysis(P, f).flat() == 0)
    assert frame_bounds(P)[1] == pytest.approx(1.0)
    with pytest.raises(DomainError):
        special_probe(F, 2, 0)
    with pytest.raises(DomainError):
        special_probe(F, 0, 4)


def test_probe_dual_chase():
    # F^d_{i,k} = canonical dual + probe - canonical dual applied to T_F U_probe
    F = _frame(Dims(5, 2, 2), 4)
    P = special_probe(F, 0, 1)
    D = dual_family(F, P)
    Sinv = F.frame_op_inv
    expect = F.analysis_mat @ Sinv + P.analysis_mat - F.analysis_mat @ Sinv @ F.synthesis_mat @ P.analysis_mat
    assert op(D.analysis_mat - expect) <= 1e-13
    assert is_dual(D, F)


# --- generalized duals, kernel, projections ---------------------------------


@given(frame_dims, seeds)
def test_generalized_dual_algebra(dims, seed):
    G = _frame(dims, seed)
    rng = rng_for(seed, "gd")
    Q = random_invertible(G.d, rng)
    spec = GeneralizedDualSpec(Q, kernel_bessel(G, rng))
    Ggd = generalized_dual(G, spec)
    assert is_generalized_dual(Ggd, G)
    assert op(G.synthesis_mat @ Ggd.analysis_mat - Q) <= 1e-10
    back = recover_generalized_dual_spec(Ggd, G)
    assert op(back.Q - Q) <= 1e-10 and op(back.Psi - spec.Psi) <= 1e-10


def test_generalized_dual_examples():
    G = _frame(Dims(6, 2, 3), 5)
    canon = generalized_dual(G, GeneralizedDualSpec(np.eye(6), np.zeros((12, 6))))
    assert op(canon.analysis_mat - canonical_dual(G).analysis_mat) <= 1e-14
    two = generalized_dual(G, GeneralizedDualSpec(2 * np.eye(6), np.zeros((12, 6))))
    assert op(G.synthesis_mat @ two.analysis_mat - 2 * np.eye(6)) <= 1e-12


def test_generalized_dual_invalid_parameters():
    G = _frame(Dims(6, 2, 3), 6)
    with pytest.raises(InvalidSpecError):
        generalized_dual(G, GeneralizedDualSpec(np.diag([1.0] * 5 + [0.0]), np.zeros((12, 6))))
    with pytest.raises(InvalidSpecError):
        generalized_dual(G, GeneralizedDualSpec(np.eye(6), G.analysis_mat))
    with pytest.raises(InvalidSpecError):
        generalized_dual(G, GeneralizedDualSpec(np.eye(5), np.zeros((12, 5))))


@given(frame_dims, seeds)
def test_kernel_bessel(dims, seed):
    G = _frame(dims, seed)
    Psi = kernel_bessel(G, seed)
    assert op(G.synthesis_mat @ Psi) <= 1e-10
    assert op(kernel_projection(G) @ Psi - Psi) <= 1e-10 * max(1, op(Psi))
    np.testing.assert_array_equal(kernel_bessel(G, seed), Psi)


def test_kernel_bessel_trivial_kernel():
    G = random_riesz(Dims(8, 2, 2), rng_for(0))
    assert np.all(kernel_bessel(G, 0) == 0)


@given(frame_dims, seeds)
def test_range_projection(dims, seed):
    G = _frame(dims, seed)
    P = range_projection(G)
    assert op(P @ P - P) <= 1e-12
    assert op(P - P.conj().T) <= 1e-12
    assert op(P @ G.analysis_mat - G.analysis_mat) <= 1e-12
    assert op(P + kernel_projection(G) - np.eye(G.rows)) <= 1e-12
    assert np.linalg.matrix_rank(P) == G.d


def test_range_projection_orthonormal_is_identity():
    G = HSFrameSystem(np.eye(4), 4, 1)
    np.testing.assert_allclose(range_projection(G), np.eye(4), atol=1e-15)


# --- Riesz and equivalence --------------------------------------------------


def test_riesz_examples():
    rc = is_riesz_basis(HSFrameSystem(np.eye(4), 4, 1))
    assert rc.is_riesz and rc.lower == pytest.approx(1) and rc.upper == pytest.approx(1)
    over = is_riesz_basis(_frame(Dims(4, 1, 6), 0))
    assert not over.is_riesz and over.complete and not over.bounded_below
    under = is_riesz_basis(HSFrameSystem(np.eye(4)[:2], 2, 1))
    assert not under.is_riesz and under.bounded_below and not under.complete


@given(riesz_dims, seeds)
def test_riesz_is_frame_with_squared_bounds(dims, seed):
    G = random_riesz(dims, rng_for(seed), 5.0)
    rc = is_riesz_basis(G)
    assert rc.is_riesz and G.is_frame
    assert rc.lower**2 == pytest.approx(frame_bounds(G)[0], rel=1e-10)
    assert rc.upper**2 == pytest.approx(frame_bounds(G)[1], rel=1e-10)


@given(frame_dims, seeds)
def test_equivalence_operator(dims, seed):
    F = _frame(dims, seed)
    assert op(equivalence_operator(F, F) - np.eye(F.d)) <= 1e-10
    Q0 = random_invertible(F.d, rng_for(seed, "Q"))
    G = F.compose(Q0)
    assert op(equivalence_operator(F, G) - Q0) <= 1e-8
    assert op(equivalence_operator_normalized(F, G) - Q0) <= 1e-8


def test_equivalence_operator_distinct_ranges():
    F = _frame(Dims(4, 1, 6), 0)
    G = _frame(Dims(4, 1, 6), 1)
    assert equivalence_operator(F, G) is None
    assert equivalence_operator_normalized(F, G) is None


def test_systems_equal():
    F = _frame(Dims(5, 2, 2), 0)
    assert systems_equal(F, F)
    assert not systems_equal(F, F.scaled(1 + 1e-6))
    assert not systems_equal(F, _frame(Dims(4, 1, 6), 0))
