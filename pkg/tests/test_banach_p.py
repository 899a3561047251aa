import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schattenmult import banach_p as bp
from schattenmult.errors import DimensionError, DomainError
from schattenmult.harness.generate import Dims, random_frame, random_symbol
from schattenmult.hs_frames import HSFrameSystem
from schattenmult.multipliers import assemble
from schattenmult.op_sequences import Symbol
from schattenmult.rng import complex_normal
from schattenmult.schatten_core import conjugate_exponent

from conftest import rng_for, seeds

R_CHOICES = [1.0, 1.5, 2.0, 3.0, math.inf]


def _diag_system(d, p, r):
    # G_i f = f_i E_0 with N = 1: Phi(f) = ||f||_p
    return bp.PBesselSystem(np.eye(d)[:, None, :], p, bp.NormedSpaceSpec(d, r))


def test_lr_norm_paths():
    x = np.array([[3.0, -4j, 0]])
    assert bp.lr_norm(x, 2)[0] == pytest.approx(5)
    assert bp.lr_norm(x, 1)[0] == pytest.approx(7)
    assert bp.lr_norm(x, math.inf)[0] == pytest.approx(4)
    assert bp.lr_norm(x, 3)[0] == pytest.approx((27 + 64) ** (1 / 3))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_block_singular_values_match_lapack(N):
    A = complex_normal(rng_for(N, "bsv"), (50, N, N))
    got = np.sort(bp.block_singular_values(A), axis=-1)
    ref = np.sort(np.linalg.svd(A, compute_uv=False), axis=-1)
    np.testing.assert_allclose(got, ref, rtol=1e-10, atol=1e-12)


def test_block_singular_values_degenerate_2x2():
    A = np.array([np.zeros((2, 2)), np.eye(2), [[0, 1], [0, 0]]], dtype=complex)
    got = np.sort(bp.block_singular_values(A), axis=-1)
    np.testing.assert_allclose(got, [[0, 0], [1, 1], [0, 1]], atol=1e-12)


def test_normed_space():
    X = bp.NormedSpaceSpec(3, 1.0)
    assert X.dual_r == math.inf
    assert X.norm(np.array([1, -1, 2])) == pytest.approx(4)
    assert X.dual_norm(np.array([1, -1, 2])) == pytest.approx(2)
    with pytest.raises(DomainError):
        bp.NormedSpaceSpec(3, 0.5)


def test_system_validation():
    X = bp.NormedSpaceSpec(2, 2.0)
    with pytest.raises(DimensionError):
        bp.PBesselSystem(np.zeros((1, 3, 2)), 2.0, X)
    with pytest.raises(DimensionError):
        bp.PBesselSystem(np.zeros((1, 4, 3)), 2.0, X)
    with pytest.raises(DomainError):
        bp.PBesselSystem(np.zeros((1, 4, 2)), 1.0, X)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_diagonal_system_has_unit_upper_bound(p):
    G = _diag_system(4, p, p)
    est = bp.p_bessel_estimate(G, 200, 0)
    assert est.B.empirical == pytest.approx(1.0, rel=1e-6)
    assert est.A.empirical == pytest.approx(1.0, rel=1e-6)
    assert est.B.consistent and est.A.consistent


def test_zero_system():
    G = bp.PBesselSystem(np.zeros((2, 4, 3)), 2.0, bp.NormedSpaceSpec(3, 2.0))
    est = bp.p_bessel_estimate(G, 50, 0)
    assert est.B.empirical == 0 and est.B.certified == 0 and est.A.empirical == 0


def test_p2_estimates_match_singular_values():
    H = random_frame(Dims(8, 2, 2), rng_for(1), 4.0)
    s = H.singular_values
    P = bp.PBesselSystem.from_hs(H, 2.0, 2.0)
    fb = bp.p_bessel_estimate(P, 500, 1)
    qr = bp.q_riesz_estimate(P, 500, 1)
    for est, exact in ((fb.B, s[0]), (fb.A, s[-1]), (qr.B, s[0]), (qr.A, s[-1])):
        assert est.empirical == pytest.approx(exact, rel=1e-2)
        assert est.certified == pytest.approx(exact, rel=1e-12)
        assert est.consistent


@settings(max_examples=10)
@given(seeds, st.floats(1.2, 4.0), st.sampled_from(R_CHOICES))
def test_certificates_bracket_estimates(seed, p, r):
    H = random_frame(Dims(4, 1, 6), rng_for(seed), 5.0)
    P = bp.PBesselSystem.from_hs(H, p, r)
    est = bp.p_bessel_estimate(P, 100, seed)
    assert est.A.consistent and est.B.consistent
    assert est.A.empirical <= est.B.empirical * (1 + 1e-12)


@settings(max_examples=10)
@given(seeds, st.floats(1.2, 4.0), st.floats(0.1, 10.0))
def test_homogeneity(seed, p, c):
    H = random_frame(Dims(4, 2, 1), rng_for(seed), 5.0)
    P = bp.PBesselSystem.from_hs(H, p, 2.0)
    base = bp.p_bessel_estimate(P, 80, seed, refine=False)
    scaled = bp.p_bessel_estimate(P.scaled(c), 80, seed, refine=False)
    assert scaled.B.empirical == pytest.approx(c * base.B.empirical, rel=1e-10)
    assert scaled.B.certified == pytest.approx(c * base.B.certified, rel=1e-10)


def test_sampling_is_monotone_in_sample_count():
    H = random_frame(Dims(4, 1, 6), rng_for(3), 5.0)
    P = bp.PBesselSystem.from_hs(H, 3.0, 1.5)
    small = bp.p_bessel_estimate(P, 50, 0, refine=False)
    big = bp.p_bessel_estimate(P, 500, 0, refine=False)
    assert big.B.empirical >= small.B.empirical
    assert big.A.empirical <= small.A.empirical


def test_refinement_never_worsens():
    H = random_frame(Dims(4, 1, 6), rng_for(4), 8.0)
    P = bp.PBesselSystem.from_hs(H, 1.5, 3.0)
    raw = bp.p_bessel_estimate(P, 100, 0, refine=False)
    ref = bp.p_bessel_estimate(P, 100, 0, refine=True)
    assert ref.B.empirical >= raw.B.empirical and ref.A.empirical <= raw.A.empirical


def test_estimates_are_seed_deterministic():
    H = random_frame(Dims(4, 1, 6), rng_for(5), 5.0)
    P = bp.PBesselSystem.from_hs(H, 2.5, 1.0)
    a, b = bp.p_bessel_estimate(P, 60, 7), bp.p_bessel_estimate(P, 60, 7)
    assert a == b
    assert a.B.to_dict()["seed"] == 7 and a.B.to_dict()["sense"] == "sup"


def test_orthonormal_scalar_system_is_q_riesz_with_unit_bounds():
    H = HSFrameSystem(np.eye(4), 4, 1)
    P = bp.PBesselSystem.from_hs(H, 2.0, 2.0)
    qr = bp.q_riesz_estimate(P, 200, 0)
    assert qr.A.empirical == pytest.approx(1, rel=1e-8) and qr.B.empirical == pytest.approx(1, rel=1e-8)


def test_q_riesz_inf_certificate_vanishes_for_redundant_systems():
    H = random_frame(Dims(4, 1, 6), rng_for(6), 5.0)
    qr = bp.q_riesz_estimate(bp.PBesselSystem.from_hs(H, 2.0, 2.0), 100, 0)
    assert qr.A.certified == 0


def test_synthesis_covector_matches_trace():
    H = random_frame(Dims(5, 2, 2), rng_for(7), 5.0)
    P = bp.PBesselSystem.from_hs(H, 2.0, 2.0)
    rng = rng_for(7, "x")
    A = complex_normal(rng, (H.n, 2, 2))
    f = complex_normal(rng, H.d)
    c = P.synthesis_covector(A.reshape(1, -1))[0]
    direct = sum(np.trace(A[i] @ (H.maps[i] @ f).reshape(2, 2)) for i in range(H.n))
    assert c @ f == pytest.approx(direct, rel=1e-12)


def test_transpose_permutation():
    A = np.arange(9).reshape(3, 3)
    np.testing.assert_array_equal(bp.transpose_permutation(3) @ A.reshape(-1), A.T.reshape(-1))


@given(seeds, st.sampled_from([Dims(4, 1, 6), Dims(5, 2, 2), Dims(9, 3, 1)]))
def test_sharp_conjugate_reproduces_hs_multiplier(seed, dims):
    rng = rng_for(seed, "sharp")
    F, G = random_frame(dims, rng), random_frame(dims, rng)
    m = random_symbol(dims.n, rng)
    gen = bp.assemble_general(m, bp.sharp_conjugate(F), bp.PBesselSystem.from_hs(G, 2.0, 2.0))
    np.testing.assert_allclose(gen, assemble(m, F, G).matrix, atol=1e-12)


def test_assemble_general_shape_errors():
    G = bp.PBesselSystem.from_hs(random_frame(Dims(4, 1, 6), rng_for(8)), 2.0, 2.0)
    H = bp.PBesselSystem.from_hs(random_frame(Dims(4, 2, 2), rng_for(8)), 2.0, 2.0)
    with pytest.raises(DimensionError):
        bp.assemble_general(Symbol([1.0] * 6), H, G)
    with pytest.raises(DimensionError):
        bp.assemble_general(Symbol([1.0]), G, G)


def test_op_norm_estimate_at_two():
    M = complex_normal(rng_for(9), (5, 4))
    est = bp.op_norm_estimate(M, 2.0, 2.0, 200, 0)
    assert est.empirical == pytest.approx(np.linalg.norm(M, 2), rel=1e-6)
    assert est.certified == pytest.approx(np.linalg.norm(M, 2), rel=1e-12)


def test_op_norm_estimate_l1_to_l1():
    # the l1 -> l1 norm is the largest column sum, attained at a basis vector
    M = complex_normal(rng_for(10), (4, 4))
    est = bp.op_norm_estimate(M, 1.0, 1.0, 300, 0)
    exact = np.abs(M).sum(axis=0).max()
    assert est.empirical <= exact * (1 + 1e-12)
    assert est.empirical == pytest.approx(exact, rel=2e-2)
    assert est.consistent


@pytest.mark.parametrize("p,r1,r2", [(2.0, 2.0, 2.0), (1.5, 1.0, 3.0), (3.0, math.inf, 1.5)])
def test_inequality_campaign_square(p, r1, r2):
    rng = rng_for(11, f"{p}{r1}{r2}")
    dims = Dims(8, 2, 2)
    G = bp.PBesselSystem.from_hs(random_frame(dims, rng, 4.0), p, r1)
    F = bp.PBesselSystem.from_hs(random_frame(dims, rng, 4.0), conjugate_exponent(p), r2)
    rep = bp.inequality_campaign(random_symbol(2, rng), F, G, 200, 0)
    assert rep.passed, [c.to_dict() for c in rep.failures]
    names = {c.name for c in rep.checks}
    assert {"upper_certified_all_samples", "lower_certified", "injectivity"} <= names


def test_inequality_campaign_non_square_skips_lower():
    rng = rng_for(12)
    dims = Dims(4, 1, 6)
    G = bp.PBesselSystem.from_hs(random_frame(dims, rng), 2.0, 2.0)
    F = bp.PBesselSystem.from_hs(random_frame(dims, rng), 2.0, 2.0)
    rep = bp.inequality_campaign(random_symbol(6, rng), F, G, 100, 0)
    assert rep.passed and rep.skipped


def test_inequality_campaign_needs_conjugate_exponents():
    G = bp.PBesselSystem.from_hs(random_frame(Dims(4, 1, 6), rng_for(13)), 3.0, 2.0)
    with pytest.raises(DomainError):
        bp.inequality_campaign(Symbol([1.0] * 6), G, G, 10, 0)
