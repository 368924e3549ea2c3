import numpy as np
import pytest

import polarkit as pk


def test_verify_I1_shift_table(shift4):
    cert = pk.verify_I1(shift4)
    assert cert.holds and cert.conjugate_holds
    table = {round(ev, 9): round(val.real, 9) for ev, val in cert.gamma_table}
    assert table == {0.0: 3.0, 1.0: 0.0, 2.0: 1.0, 3.0: 2.0}


def test_verify_I1_booleans_agree_on_zoo(unit_shift4, q_half_8):
    for a in (
        unit_shift4,
        q_half_8,
        pk.build(pk.normal((1.0, 2.0, 3.0j))),
        pk.build(pk.jordan_block(3)),
    ):
        cert = pk.verify_I1(a)
        assert cert.holds == cert.conjugate_holds


def test_verify_I1_jordan_names_offender():
    cert = pk.verify_I1(pk.build(pk.jordan_block(3)))
    assert not cert.holds
    assert cert.offending_eigenvalue == pytest.approx(1.0)


def test_nonunital_seed_excludes_kernel(shift4):
    pos = pk.polar_decompose(shift4).pos
    seed = pk.nonunital_seed(pos)
    # eigenvalues 1, sqrt2, sqrt3 contribute; the kernel eigenprojection does not
    assert seed.dimension == 3
    eye = np.eye(4, dtype=complex)
    ok, _ = pk.contains(seed, eye)
    assert not ok


def test_theorem22_on_reference_shift(shift4):
    rep = pk.theorem22_report(shift4)
    assert rep.passed
    assert rep.worst <= 1e-9
    names = {c.name for c in rep.checks}
    assert {
        "initial_projection_in_bicommutant",
        "range_projections_in_bicommutant",
        "projection_families_commute",
        "power_reduction",
        "range_projections_idempotent",
        "ordered_products_nest",
        "delta_morphism_on_seed",
        "delta_powers_in_extended_algebra",
        "range_projection_absorbs_image",
        "delta_star_delta_identity",
    } <= names


def test_theorem22_rejects_relation_violator():
    with pytest.raises(pk.RelationViolated):
        pk.theorem22_report(pk.build(pk.jordan_block(3)))


def test_theorem22_q_models():
    for q, dim in ((1.0, 4), (0.5, 8)):
        a = pk.build(pk.q_oscillator(dim, q, 1.0))
        rep = pk.theorem22_report(a)
        assert rep.passed, rep.by_name


def test_coefficient_algebra_reference_shift(shift4):
    rep = pk.coefficient_algebra(shift4)
    assert rep.passed
    assert rep.algebra.dimension == 4  # the full diagonal algebra
    assert rep.tower.hypotheses.weak_holds
    for name, (ok, res) in rep.structure.items():
        assert ok, (name, res)


def test_coefficient_algebra_is_commutative_and_invariant(q_half_8):
    rep = pk.coefficient_algebra(q_half_8)
    alg = rep.algebra
    assert pk.is_commutative(alg)[0]
    pd = pk.polar_decompose(q_half_8)
    pair = pk.endo_pair(pd.u)
    worst = 0.0
    for b in alg.basis:
        for image in (pair.delta(b), pair.delta_star(b)):
            _, res = pk.contains(alg, image)
            worst = max(worst, res)
    assert worst <= 1e-9


def test_graded_model_for_skips_relation_gate(unit_shift4):
    # verify_I1 fails for the unit-weight shift, yet the graded model exists
    assert not pk.verify_I1(unit_shift4).holds
    model = pk.graded_model_for(unit_shift4)
    assert model.dim == 4
    assert model.algebra.dimension == 4


def test_build_calB_reference_shift(shift4):
    alg, graded = pk.build_calB(shift4)
    assert alg.dimension == 16  # {1, |a|, U} generates the full matrix algebra
    assert max(g.bandwidth for g in graded) == 3
    worst = 0.0
    for b, g in zip(alg.basis, graded):
        worst = max(worst, pk.operator_norm(b - pk.realize(g)))
    assert worst <= 1e-9


def test_build_calB_coefficients_live_in_coefficient_algebra(shift4):
    rep = pk.coefficient_algebra(shift4)
    _, graded = pk.build_calB(shift4)
    worst = 0.0
    for g in graded:
        for c in g.coefficients.values():
            _, res = pk.contains(rep.algebra, c)
            worst = max(worst, res)
    assert worst <= 1e-9
