import numpy as np
import pytest

import polarkit as pk

from conftest import random_matrix


@pytest.fixture(scope="module")
def model():
    a = pk.build(pk.weighted_shift((1.0, np.sqrt(2.0), np.sqrt(3.0))))
    return pk.graded_model_for(a)


@pytest.fixture(scope="module")
def unit_model():
    return pk.graded_model_for(pk.build(pk.weighted_shift((1.0, 1.0, 1.0))))


def u_plus_ustar(model):
    p1 = model.range_projection(1)
    return model.element({-1: p1, 1: p1}, enforce_support=True)


def test_element_validates_membership(model, rng):
    with pytest.raises(pk.ModelMismatch):
        model.element({0: random_matrix(rng, 4)})


def test_element_validates_support(model):
    # a degree-1 coefficient must live under the one-step range projection
    bad = np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)
    with pytest.raises(pk.SupportViolation):
        model.element({1: bad})
    # with enforce_support the offending part is projected away instead
    g = model.element({1: bad}, enforce_support=True)
    assert g.degrees == ()


def test_realize_u_plus_ustar(model):
    g = u_plus_ustar(model)
    u = model.pair.u
    assert np.allclose(pk.realize(g), u + u.conj().T, atol=1e-12)


def test_square_of_u_plus_ustar_center(unit_model):
    g = u_plus_ustar(unit_model)
    sq = pk.graded_mul(g, g)
    center = pk.extract_N(sq, 0)
    assert np.allclose(center, np.diag([1.0, 2.0, 2.0, 1.0]), atol=1e-12)


def test_gauge_average_matches_center(unit_model):
    g = u_plus_ustar(unit_model)
    sq = pk.graded_mul(g, g)
    avg = pk.gauge_average_N0(pk.realize(sq), bandwidth=2, model=unit_model)
    assert np.allclose(avg, pk.extract_N(sq, 0), atol=1e-12)


def test_gauge_average_never_increases_norm(unit_model, rng):
    m = random_matrix(rng, 4)
    avg = pk.gauge_average_N0(m, bandwidth=3, model=unit_model)
    assert pk.operator_norm(avg) <= pk.operator_norm(m) + 1e-12


def test_graded_mul_matches_dense(model, rng):
    for _ in range(25):
        g1 = pk.random_element(model, rng, bandwidth=3)
        g2 = pk.random_element(model, rng, bandwidth=3)
        lhs = pk.realize(pk.graded_mul(g1, g2))
        rhs = pk.realize(g1) @ pk.realize(g2)
        scale = 1.0 + pk.operator_norm(pk.realize(g1)) * pk.operator_norm(
            pk.realize(g2)
        )
        assert pk.operator_norm(lhs - rhs) <= 1e-9 * scale


def test_graded_adjoint_matches_dense(model, rng):
    g = pk.random_element(model, rng, bandwidth=2)
    assert np.allclose(
        pk.realize(pk.graded_adjoint(g)), pk.realize(g).conj().T, atol=1e-12
    )


def test_graded_mul_rejects_model_mix(model, unit_model, rng):
    g1 = pk.random_element(model, rng, bandwidth=1)
    g2 = pk.random_element(unit_model, rng, bandwidth=1)
    with pytest.raises(pk.ModelMismatch):
        pk.graded_mul(g1, g2)


def test_regrade_round_trip(model, rng):
    g = pk.random_element(model, rng, bandwidth=3)
    m = pk.realize(g)
    back = pk.regrade(model, m)
    assert pk.operator_norm(pk.realize(back) - m) <= 1e-9 * (1 + pk.operator_norm(m))
    assert back.degrees == g.degrees


def test_regrade_needs_banded_shift(rng):
    a = pk.build(pk.normal((1.0, 2.0, 3.0)))
    dense_model = pk.graded_model_for(a)
    with pytest.raises(pk.ModelNotGraded):
        pk.regrade(dense_model, random_matrix(rng, 3))


def test_element_from_right_coefficients(model):
    # beta_d = delta^{|d|}(alpha_d) converts right-form coefficients
    alpha = model.algebra.basis[1]
    g = model.element_from_right_coefficients({1: alpha})
    direct = pk.realize(g)
    want = model.pair.delta(alpha) @ model.pair.u
    assert np.allclose(direct, want, atol=1e-12)


def test_property_star_reference_model(model, rng):
    rep = pk.check_property_star(model, samples=50, rng=rng)
    assert rep.passed
    assert rep.violations == 0


def test_property_star_coefficient_bound_by_hand(model, rng):
    for _ in range(20):
        g = pk.random_element(model, rng, bandwidth=3)
        nb = pk.operator_norm(pk.realize(g))
        for d in g.degrees:
            assert pk.operator_norm(g.coefficient(d)) <= nb + 1e-9 * (1 + nb)


def test_sum_norm_inequalities(rng):
    for m_count in (1, 2, 5):
        ds = [random_matrix(rng, 6) for _ in range(m_count)]
        rep = pk.sum_norm_inequalities(ds)
        assert rep.passed
        assert set(rep.margins) == {
            "square_vs_right_gram",
            "square_vs_left_gram",
            "abs_sum_vs_left_gram",
            "abs_sum_vs_right_gram",
        }
        assert min(rep.margins.values()) >= -1e-9


def test_norm_estimate_unit_shift(unit_model):
    g = u_plus_ustar(unit_model)
    est = pk.norm_estimate(g, kmax=64)
    dense = pk.operator_norm(pk.realize(g))
    assert dense == pytest.approx(2.0 * np.cos(np.pi / 5.0), abs=1e-12)
    assert abs(est.final - dense) / dense <= 0.05
    assert [k for k, _ in est.estimates] == [1, 2, 4, 8, 16, 32, 64]
    for k, s_k in est.estimates:
        assert s_k <= dense + 1e-9
        assert dense <= est.upper_bound(k, s_k) + 1e-9


def test_norm_estimate_scales_linearly(unit_model):
    g = u_plus_ustar(unit_model)
    est1 = pk.norm_estimate(g, kmax=8)
    est2 = pk.norm_estimate(g.scaled(3.0), kmax=8)
    assert est2.final == pytest.approx(3.0 * est1.final, rel=1e-12)


def test_norm_estimate_zero_element(model):
    zero = model.element({})
    with pytest.raises(pk.ZeroElement):
        pk.norm_estimate(zero)


def test_norm_estimate_bandwidth_cap(model, rng):
    g = pk.random_element(model, rng, bandwidth=3)
    with pytest.raises(pk.BandwidthOverflow):
        pk.norm_estimate(g, kmax=512, cap=128)


def test_transport_between_permuted_copies(rng):
    a = pk.build(pk.q_oscillator(6, 0.5, 1.0))
    model_a = pk.graded_model_for(a)
    perm = rng.permutation(6)
    w = np.zeros((6, 6), dtype=complex)
    for i, t in enumerate(perm):
        w[t, i] = 1.0
    a2 = w @ a @ w.conj().T
    model_b = pk.graded_model_for(a2)
    g = pk.random_element(model_a, rng, bandwidth=2)
    rep = pk.transport_compare(g, model_a, model_b, perm, kmax=32)
    assert rep.passed
    assert rep.final_gap <= 1e-6
    assert rep.dense_gap <= 1e-9


def test_transport_rejects_wrong_permutation(rng):
    a = pk.build(pk.q_oscillator(5, 0.5, 1.0))
    model_a = pk.graded_model_for(a)
    g = pk.random_element(model_a, rng, bandwidth=1)
    with pytest.raises(pk.ModelMismatch):
        pk.transport_compare(g, model_a, model_a, [1, 0, 2, 3, 4])
