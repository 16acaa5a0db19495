from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fca.constraints import ConstraintSystem, derive_constraints, linear_sector, verify_solution
from fca.errors import MissingAssignment
from fca.groups import trivial_graph
from fca.matrixrep import synthesize_unitary
from fca.rings import SymPoly
from fca.rules import (
    MonomialDescriptor,
    case_template,
    family_rule,
    family_values,
    random_family_params,
    support_template,
    symbolic_rule,
)

PI = math.pi


@pytest.fixture(scope="module")
def klein_system():
    return derive_constraints(case_template("z2xz2"))


@pytest.fixture(scope="module")
def z5_system():
    return derive_constraints(case_template("z5", False))


def v(name, conj=False):
    return SymPoly.var(name, conj)


def full_assignment(system, values):
    out = {n: 0j for n in system.variables()}
    out.update(values)
    return out


def test_identity_shape_rule():
    rule = symbolic_rule(trivial_graph(), [MonomialDescriptor.of(t=[0])])
    system = derive_constraints(rule)
    assert len(system) == 1
    (eq,) = system.equations
    assert eq.rhs == 1
    assert eq.lhs == v("alpha_0") * v("alpha_0", True)


def test_rhs_one_only_on_self_identity(z5_system):
    for eq in z5_system:
        if eq.rhs == 1:
            assert eq.bracket == "pd" and eq.pair[0] == eq.pair[1] and eq.monomial == ((), ())


def test_klein_system_forces_xi_eab_zero(klein_system):
    assert klein_system.contains(v("xi_eab") * v("xi_eab", True))


def test_klein_system_relates_remaining_xi(klein_system):
    # squares agree and the cross term is real: xi_abe = +-xi_bea
    assert klein_system.contains(v("xi_abe") * v("xi_abe") - v("xi_bea") * v("xi_bea"))
    assert klein_system.contains(v("xi_abe", True) * v("xi_bea") - v("xi_abe") * v("xi_bea", True))


@pytest.mark.parametrize("family", [2, 3])
def test_xi_exclusion(klein_system, rng, family):
    for _ in range(20):
        base = full_assignment(klein_system, family_values("z2xz2", family, random_family_params("z2xz2", family, rng)))
        assert verify_solution(klein_system, base, 1e-12).passed
        t = cmath.rect(rng.uniform(1e-3, 1), rng.uniform(0, 2 * PI))
        for bad in ({"xi_eab": t}, {"xi_abe": t, "xi_bea": t}, {"xi_abe": t}):
            assert not verify_solution(klein_system, dict(base, **bad), 1e-12).passed


def test_mu_nu_product_is_implied_not_listed(z5_system):
    """mu*nu is not a single derived equation; these ones force it to vanish.

    With nu != 0: alpha_x nu = 0 and gamma_x nu = 0 kill alpha_1, alpha_4,
    gamma_1, gamma_4; sum alpha gamma = 0 then gives alpha_0 gamma_0 = 0.  If
    gamma_0 = 0, eta_40^2 = gamma_0 nu forces eta = 0 and then
    beta nu + eta mu + mu nu = 0 gives mu nu = 0.  If alpha_0 = 0 the
    alpha_0* nu = beta* eta relation and the eta-nu equations do the same.
    """
    mu, nu = v("mu_410"), v("nu_410")
    assert not z5_system.contains(mu * nu)
    needed = [
        v("eta_40") * v("eta_40") - v("gamma_0") * nu,
        v("eta_10") * nu - v("eta_40") * nu,
        v("beta_40") * nu + v("eta_10") * mu + mu * nu,
        v("beta_10") * nu + v("eta_40") * mu + mu * nu,
    ]
    reduced = derive_constraints(support_template("z5"))
    for poly in needed:
        assert reduced.contains(poly), str(poly)
    assert reduced.contains(v("alpha_1") * nu) or reduced.contains(v("alpha_1") * v("nu_410", True))


def test_verify_examples(klein_system):
    good = full_assignment(klein_system, {"alpha_e": 1, "beta_ae": -2, "beta_be": -2, "gamma_abe": 4})
    assert verify_solution(klein_system, good, 1e-12).passed
    zero = full_assignment(klein_system, {})
    report = verify_solution(klein_system, zero, 1e-12)
    assert not report.passed
    assert any(eq.rhs == 1 for eq, _ in report.failures)
    bad = dict(good, gamma_abe=3.9)
    assert not verify_solution(klein_system, bad, 1e-12).passed


def test_missing_variable(klein_system):
    with pytest.raises(MissingAssignment):
        verify_solution(klein_system, {"alpha_e": 1}, 1e-12)


def test_report_pass_iff_residual_within_tolerance(klein_system):
    good = full_assignment(klein_system, {"alpha_e": 1, "beta_ae": -2, "beta_be": -2, "gamma_abe": 4.001})
    r = verify_solution(klein_system, good, 1e-12)
    assert r.passed == (r.max_residual <= r.tolerance)
    r2 = verify_solution(klein_system, good, 1.0)
    assert r2.passed


def test_linear_sector_klein_two_alpha():
    rule = family_rule("z2xz2", 3, {"sites": ["e", "a"], "weight": 0.5, "theta_x": 0.0, "theta_y": PI / 2})
    assert rule.coefficient("alpha_e") == pytest.approx(1 / math.sqrt(2))
    assert rule.coefficient("alpha_a") == pytest.approx(1j / math.sqrt(2))
    ls = linear_sector(rule)
    assert np.allclose(ls.A @ ls.A.conj().T, np.eye(4), atol=1e-12)
    assert np.allclose(ls.Gamma, 0)
    assert ls.residual < 1e-12


def test_linear_sector_z5_flipped():
    rule = family_rule("z5", 2, {"omega": 0.0, "phi": PI})
    ls = linear_sector(rule)
    assert np.allclose(ls.A, 0)
    assert np.allclose(np.abs(ls.Gamma) @ np.ones(5), np.ones(5))
    assert ls.residual < 1e-12


def test_linear_sector_all_nonlinear():
    rule = family_rule("z2xz2", 2, {"alpha_site": "e", "phi": PI}).replace(alpha_e=0)
    assert linear_sector(rule).residual == pytest.approx(1.0)


def test_anchored_system_is_contained_in_full(klein_system):
    full = derive_constraints(case_template("z2xz2"), anchored=False)
    keys = {(eq.lhs.monic() if eq.rhs == 0 else eq.lhs, eq.rhs) for eq in full}
    for eq in klein_system:
        assert ((eq.lhs.monic() if eq.rhs == 0 else eq.lhs), eq.rhs) in keys


def test_derivation_is_deterministic():
    a = derive_constraints(case_template("z2xz2")).to_json()
    b = derive_constraints(case_template("z2xz2")).to_json()
    assert a == b


def test_system_json_round_trip(klein_system):
    again = ConstraintSystem.from_json(klein_system.to_json())
    assert again.equations == klein_system.equations


def test_theta_is_locally_forced_to_zero(z5_system, rng):
    """At each family point a small theta or thetabar breaks the system at first order."""
    for family in (1, 2, 3):
        vals = family_values("z5", family, random_family_params("z5", family, rng))
        base = full_assignment(z5_system, vals)
        for name in ("theta", "thetabar"):
            r = verify_solution(z5_system, dict(base, **{name: 1e-6}), 1e-12)
            assert r.max_residual > 5e-7


@given(st.integers(0, 10_000))
def test_soundness_and_qw_universality(seed):
    import random

    rnd = random.Random(seed)
    case, family = rnd.choice([("z2xz2", 2), ("z2xz2", 3), ("z5", 1), ("z5", 2), ("z5", 3)])
    rule = family_rule(case, family, random_family_params(case, family, rnd))
    assert linear_sector(rule).residual < 1e-10
    U = synthesize_unitary(rule)
    assert U.unitarity_residual() < 1e-10
