import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import polarkit as pk

from conftest import random_matrix

CONDITION_NAMES = (
    "spec_initial",
    "spec_final",
    "idempotent_initial",
    "idempotent_final",
    "triple_product",
)


def test_five_conditions_on_polar_factor(shift4):
    u = pk.polar_decompose(shift4).u
    rep = pk.partial_isometry_report(u)
    assert tuple(c.name for c in rep.conditions) == CONDITION_NAMES
    assert rep.passed and rep.consistent
    assert all(c.passed for c in rep.conditions)


def test_conditions_fail_together_for_scaled_isometry(shift4):
    u = 1.5 * pk.polar_decompose(shift4).u
    rep = pk.partial_isometry_report(u)
    assert not rep.passed
    assert rep.consistent  # all five verdicts still agree
    ok, res = pk.is_partial_isometry(u)
    assert not ok and res > 1.0


def test_unitary_is_partial_isometry(rng):
    q, _ = np.linalg.qr(random_matrix(rng, 5))
    ok, res = pk.is_partial_isometry(q)
    assert ok and res <= 1e-12


def test_projections_of_polar_factor(shift4):
    pd = pk.polar_decompose(shift4)
    p_init = pk.initial_projection(pd.u)
    p_fin = pk.final_projection(pd.u)
    assert np.allclose(p_init, np.diag([1.0, 1.0, 1.0, 0.0]), atol=1e-12)
    assert np.allclose(p_fin, np.diag([0.0, 1.0, 1.0, 1.0]), atol=1e-12)


def test_power_isometry_equivalence(shift4):
    u = pk.polar_decompose(shift4).u
    rep = pk.power_isometry_check(u, kmax=4)
    assert rep.equivalent
    p_stack, _ = pk.power_projections(u, kmax=4)
    # final projections shrink as the power grows
    for k in range(1, p_stack.shape[0]):
        p, q = p_stack[k - 1], p_stack[k]
        assert pk.operator_norm(p @ q - q) <= 1e-12


def test_power_isometry_flags_failure(rng):
    a = random_matrix(rng, 4)
    u = pk.polar_decompose(a).u + 0.05 * random_matrix(rng, 4)
    rep = pk.power_isometry_check(u, kmax=3)
    assert rep.equivalent  # both sides fail together, so they stay equivalent
    assert not (rep.powers_ok or rep.family_ok)


def test_commuting_projection_properties(shift4):
    u = pk.polar_decompose(shift4).u
    rep = pk.commuting_projection_properties(u, kmax=3)
    assert rep.passed
    assert rep.family_residual <= 1e-12


def test_morphism_check_on_diagonal_algebra(shift4):
    u = pk.polar_decompose(shift4).u
    alg = pk.generate([np.diag([1.0, 2.0, 3.0, 4.0]).astype(complex)], unital=True)
    rep = pk.morphism_check(u, alg)
    assert rep.passed
    assert rep.multiplicative_residual <= 1e-12
    assert rep.intertwine_residual <= 1e-12
    assert rep.equivalence_consistent


def test_morphism_check_rejects_noncommuting_initial(rng):
    q, _ = np.linalg.qr(random_matrix(rng, 3))
    u = q[:, :2] @ q[:, :2].conj().T @ q  # still a partial isometry
    alg = pk.generate([random_matrix(rng, 3)], unital=True)
    with pytest.raises((pk.CommutantViolation, pk.HypothesisViolated)):
        pk.morphism_check(u, alg)


def test_nilpotent_index(shift4):
    u = pk.polar_decompose(shift4).u
    assert pk.nilpotent_index(u) == 4
    assert pk.nilpotent_index(np.eye(3)) is None


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(2, 8),
    kind=st.sampled_from(["polar", "unitary", "perturbed", "raw"]),
)
def test_report_consistency_property(seed, n, kind):
    rng = np.random.default_rng(seed)
    a = random_matrix(rng, n)
    if kind == "polar":
        v = pk.polar_decompose(a).u
    elif kind == "unitary":
        v, _ = np.linalg.qr(a)
    elif kind == "perturbed":
        v = pk.polar_decompose(a).u + 0.2 * random_matrix(rng, n)
    else:
        v = a
    rep = pk.partial_isometry_report(v)
    assert rep.consistent
    prep = pk.power_isometry_check(v, kmax=n)
    assert prep.equivalent
