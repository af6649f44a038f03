"""Symplectization checks: cone form, Liouville scaling, lifts, induced Hamiltonians."""

import numpy as np
import pytest

from contactkit.charts import Chart, basis_field, one_form, vector_field
from contactkit.cone import (
    ConeSystem,
    ContactTransformationError,
    build_cone,
    closure_check,
    commuting_lift_check,
    cone_hamiltonian,
    homogeneity_check,
    lift,
    lift_checks,
    nondegeneracy_check,
    reeb_rate,
    scale_covariance_check,
)
from contactkit.contact import TOLERANCES, ContactConditionError, ContactSystem
from contactkit.expressions import coord, parse, random_polynomial

SEED = 20110615


def darboux3() -> ContactSystem:
    chart = Chart("darboux3", ("x", "y", "z"))
    eta = one_form(chart, {"z": 1.0, "x": "-y"})
    return ContactSystem(chart, eta, reeb=basis_field(chart, "z"), name="darboux3")


def heisenberg(n: int) -> ContactSystem:
    coords = []
    for j in range(1, n + 1):
        coords += [f"x{j}", f"y{j}"]
    coords.append("z")
    chart = Chart(f"heisenberg{2 * n + 1}", tuple(coords))
    coeffs = {"z": 1.0}
    for j in range(1, n + 1):
        coeffs[f"x{j}"] = f"-y{j}"
    eta = one_form(chart, coeffs)
    return ContactSystem(chart, eta, reeb=basis_field(chart, "z"), name=chart.name)


def cosphere2() -> ContactSystem:
    coords = ("x0", "x1", "p1")
    chart = Chart(
        "cosphere2",
        coords,
        bounds=((-2.0, 2.0), (-2.0, 2.0), (-0.9, 0.9)),
        domain=parse("1 - p1^2", coords),
    )
    eta = one_form(chart, {"x0": "sqrt(1 - p1^2)", "x1": "p1"})
    reeb = vector_field(chart, {"x0": "sqrt(1 - p1^2)", "x1": "p1"})
    return ContactSystem(chart, eta, reeb=reeb, name="cosphere2")


def dilation_field(system: ContactSystem):
    """The Hamiltonian pair (y d/dy + z d/dz, z) on the three-dimensional chart."""
    X = vector_field(system.chart, {"y": "y", "z": "z"})
    return X, system.chart.parse("z")


def translation_field(system: ContactSystem):
    """The Hamiltonian pair (d/dx, -y) on the three-dimensional chart."""
    return basis_field(system.chart, "x"), system.chart.parse("-y")


# -- construction ----------------------------------------------------------


class TestBuildCone:
    def test_cone_form_matches_hand_expansion(self):
        cone = build_cone(darboux3())
        pts = cone.cone_chart.sample(32, SEED)
        x, y, z, r = (pts[:, i] for i in range(4))
        slots = cone.omega.coefficient_arrays(pts)
        assert sorted(slots) == [(0, 1), (0, 3), (2, 3)]
        np.testing.assert_allclose(slots[(0, 1)], r**2, rtol=0, atol=1e-12)
        np.testing.assert_allclose(slots[(0, 3)], 2 * r * y, rtol=0, atol=1e-12)
        np.testing.assert_allclose(slots[(2, 3)], -2 * r, rtol=0, atol=1e-12)

    def test_cone_chart_extends_base(self):
        base = cosphere2()
        cone = build_cone(base)
        assert cone.cone_chart.coords == base.chart.coords + ("r",)
        assert cone.radial == "r"
        assert cone.n == base.n
        pts = cone.cone_chart.sample(256, SEED)
        assert pts[:, -1].min() >= 0.1 and pts[:, -1].max() <= 10.0
        assert np.all(1 - pts[:, 2] ** 2 > 0)

    def test_radial_sampling_is_log_uniform(self):
        cone = build_cone(darboux3())
        r = cone.cone_chart.sample(4096, SEED)[:, -1]
        below = np.mean(r < 1.0)
        assert 0.4 < below < 0.6

    def test_closed(self):
        for system in (darboux3(), heisenberg(2)):
            check = closure_check(build_cone(system), samples=64, seed=SEED)
            assert check.passed
            assert check.max_residual < 1e-10

    def test_nondegenerate(self):
        check = nondegeneracy_check(build_cone(heisenberg(2)), samples=64, seed=SEED)
        assert check.passed
        assert check.detail["min_determinant_ratio"] > 1e-10

    def test_degenerate_base_propagates(self):
        chart = Chart("flat3", ("x", "y", "z"))
        degenerate = ContactSystem(chart, one_form(chart, {"z": 1.0}), verify=False)
        with pytest.raises(ContactConditionError, match="not symplectic"):
            build_cone(degenerate)

    def test_radial_name_clash(self):
        chart = Chart("clash", ("x", "r", "z"))
        system = ContactSystem(chart, one_form(chart, {"z": 1.0, "x": "-r"}), verify=False)
        with pytest.raises(ValueError, match="already uses coordinate"):
            build_cone(system)

    def test_bad_radial_bounds(self):
        with pytest.raises(ValueError, match="radial bounds"):
            build_cone(darboux3(), radial_bounds=(0.0, 10.0))


# -- homogeneity and scale covariance --------------------------------------


class TestLiouvilleScaling:
    def test_liouville_doubles_cone_form(self):
        for system in (darboux3(), heisenberg(1), cosphere2()):
            check = homogeneity_check(build_cone(system), samples=64, seed=SEED)
            assert check.passed
            assert check.max_residual < 1e-8

    @pytest.mark.parametrize("factor", [2.0, 5.0])
    def test_scale_covariance(self, factor):
        for system in (darboux3(), heisenberg(1)):
            check = scale_covariance_check(system, factor, samples=64, seed=SEED)
            assert check.passed
            assert check.max_residual < 1e-9
            assert check.detail["factor"] == factor

    def test_scale_factor_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            scale_covariance_check(darboux3(), -2.0)


# -- symbolic Reeb derivative ----------------------------------------------


class TestReebRate:
    def test_vertical_coordinate_has_unit_rate(self):
        system = darboux3()
        assert reeb_rate(system, system.chart.parse("z")).constant_value() == 1.0

    def test_reeb_invariant_hamiltonians_have_zero_rate(self):
        system = darboux3()
        assert reeb_rate(system, system.chart.parse("-y")).constant_value() == 0.0
        h1 = heisenberg(1).chart.parse("(x1^2 + y1^2) / 2")
        assert reeb_rate(heisenberg(1), h1).constant_value() == 0.0

    def test_needs_closed_form_reeb(self):
        chart = Chart("bare3", ("x", "y", "z"))
        system = ContactSystem(chart, one_form(chart, {"z": 1.0, "x": "-y"}))
        with pytest.raises(ValueError, match="closed-form reeb"):
            reeb_rate(system, chart.parse("z"))

    def test_rejects_foreign_coordinates(self):
        with pytest.raises(ValueError, match="coordinates"):
            reeb_rate(darboux3(), parse("z", ("a", "b", "z")))


# -- lifting ---------------------------------------------------------------


class TestLift:
    def test_translation_lifts_unchanged(self):
        system = darboux3()
        cone = build_cone(system)
        lifted = lift(cone, *translation_field(system))
        pts = cone.cone_chart.sample(32, SEED)
        expected = np.zeros((32, 4))
        expected[:, 0] = 1.0
        np.testing.assert_allclose(lifted.evaluate(pts), expected, rtol=0, atol=1e-12)

    def test_dilation_gains_radial_correction(self):
        system = darboux3()
        cone = build_cone(system)
        lifted = lift(cone, *dilation_field(system))
        pts = cone.cone_chart.sample(32, SEED)
        expected = np.zeros((32, 4))
        expected[:, 1] = pts[:, 1]
        expected[:, 2] = pts[:, 2]
        expected[:, 3] = -pts[:, 3] / 2
        np.testing.assert_allclose(lifted.evaluate(pts), expected, rtol=0, atol=1e-12)

    def test_reeb_lifts_to_itself(self):
        system = heisenberg(1)
        cone = build_cone(system)
        lifted = lift(cone, system.reeb, system.chart.parse("1"))
        pts = cone.cone_chart.sample(32, SEED)
        expected = np.zeros((32, 4))
        expected[:, 2] = 1.0
        np.testing.assert_allclose(lifted.evaluate(pts), expected, rtol=0, atol=1e-12)

    def test_lift_checks_pass(self):
        system = darboux3()
        cone = build_cone(system)
        lifted = lift(cone, *dilation_field(system))
        invariance, commutation = lift_checks(cone, lifted, samples=64, seed=SEED)
        assert invariance.name == "lift_invariance"
        assert commutation.name == "lift_liouville_commutation"
        assert invariance.passed and invariance.max_residual < 1e-8
        assert commutation.passed and commutation.max_residual < 1e-8

    def test_non_contact_field_is_rejected(self):
        system = darboux3()
        cone = build_cone(system)
        bad = basis_field(system.chart, "y")
        with pytest.raises(ContactTransformationError, match="not an infinitesimal"):
            lift(cone, bad, system.chart.parse("0"))


# -- induced cone Hamiltonians ---------------------------------------------


class TestConeHamiltonian:
    def expected_cases(self, system):
        r = "r^2"
        return [
            (translation_field(system), f"-({r}) * y"),
            (dilation_field(system), f"({r}) * z"),
            ((system.reeb, system.chart.parse("1")), r),
        ]

    def test_hand_computed_values(self):
        system = darboux3()
        cone = build_cone(system)
        pts = cone.cone_chart.sample(64, SEED)
        for (field, h), expected_source in self.expected_cases(system):
            induced, check = cone_hamiltonian(cone, field, h, samples=64, seed=SEED)
            expected = parse(expected_source, cone.cone_chart.coords)
            np.testing.assert_allclose(
                induced.values(pts), expected.values(pts), rtol=0, atol=1e-12
            )
            assert check.name == "cone_contraction"
            assert check.passed
            assert check.max_residual < 1e-8

    def test_heisenberg_integral(self):
        system = heisenberg(1)
        cone = build_cone(system)
        h1 = system.chart.parse("(x1^2 + y1^2) / 2")
        field = vector_field(
            system.chart, {"x1": "-y1", "y1": "x1", "z": "(x1^2 - y1^2) / 2"}
        )
        induced, check = cone_hamiltonian(cone, field, h1, samples=64, seed=SEED)
        pts = cone.cone_chart.sample(64, SEED)
        expected = parse("r^2 * (x1^2 + y1^2) / 2", cone.cone_chart.coords)
        np.testing.assert_allclose(induced.values(pts), expected.values(pts), rtol=0, atol=1e-12)
        assert check.passed


# -- commuting families ----------------------------------------------------


class TestCommutingLifts:
    def test_darboux_pair(self):
        system = darboux3()
        cone = build_cone(system)
        pairs = [translation_field(system), dilation_field(system)]
        check = commuting_lift_check(cone, pairs, samples=128, seed=SEED)
        assert check.passed
        assert check.max_residual < 1e-8
        assert check.detail["lifted_rank"] == 2
        assert check.detail["expected_rank"] == 2
        assert check.detail["rank_fraction"] > 0.99

    def test_heisenberg_integrable_family(self):
        system = heisenberg(1)
        cone = build_cone(system)
        h1 = system.chart.parse("(x1^2 + y1^2) / 2")
        field = vector_field(
            system.chart, {"x1": "-y1", "y1": "x1", "z": "(x1^2 - y1^2) / 2"}
        )
        pairs = [(system.reeb, system.chart.parse("1")), (field, h1)]
        check = commuting_lift_check(cone, pairs, samples=128, seed=SEED)
        assert check.passed
        assert check.detail["lifted_rank"] == 2 == check.detail["expected_rank"]

    def test_single_field_is_trivially_commuting(self):
        system = darboux3()
        cone = build_cone(system)
        check = commuting_lift_check(cone, [translation_field(system)], samples=32, seed=SEED)
        assert check.passed
        assert check.max_residual == 0.0
        assert check.detail["lifted_rank"] == 1

    def test_needs_at_least_one_pair(self):
        with pytest.raises(ValueError, match="at least one"):
            commuting_lift_check(build_cone(darboux3()), [])


# -- derived vertical families ---------------------------------------------


class TestVerticalHamiltonians:
    """Hamiltonians f(z) on the three-dimensional chart.

    Solving the defining equations by hand for eta = dz - y dx gives
    X = f'(z) y d/dy + f(z) d/dz with rate a = f'(z); these exercise lifts
    with a genuinely nonconstant radial correction.
    """

    def vertical_pair(self, system, f):
        y = coord("y", system.chart.coords)
        fp = f.derivative("z")
        X = vector_field(system.chart, {"y": y * fp, "z": f})
        return X, f

    def test_random_vertical_hamiltonians(self):
        system = darboux3()
        cone = build_cone(system)
        rng = np.random.default_rng(SEED)
        for _ in range(5):
            f = random_polynomial(("z",), 3, rng).rebind(system.chart.coords)
            X, h = self.vertical_pair(system, f)
            lifted = lift(cone, X, h, samples=64, seed=SEED)
            invariance, commutation = lift_checks(cone, lifted, samples=64, seed=SEED)
            assert invariance.passed and commutation.passed
            _, contraction = cone_hamiltonian(cone, X, h, samples=64, seed=SEED)
            assert contraction.passed

    def test_rate_matches_derivative(self):
        system = darboux3()
        f = system.chart.parse("z^3 / 3")
        rate = reeb_rate(system, f)
        pts = system.chart.sample(32, SEED)
        np.testing.assert_allclose(rate.values(pts), pts[:, 2] ** 2, rtol=0, atol=1e-12)


# -- tolerance registry ----------------------------------------------------


class TestToleranceRegistry:
    def test_cone_tolerances_registered(self):
        expected = {
            "cone_closure": 1e-10,
            "cone_nondegeneracy": 1e-10,
            "cone_homogeneity": 1e-8,
            "lift_precondition": 1e-8,
            "lift_invariance": 1e-8,
            "lift_commuting": 1e-8,
            "cone_contraction": 1e-8,
            "scale_covariance": 1e-9,
        }
        for name, value in expected.items():
            assert TOLERANCES[name] == value
