"""Expression DSL: parser goldens, exact jets vs. finite-difference oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactkit.expressions import (
    EvalDomainError,
    ExprSyntaxError,
    Jet2,
    ScalarExpr,
    UnknownCoordinateError,
    coord,
    const,
    parse,
    random_polynomial,
)

XYZ = ("x", "y", "z")


# --- finite-difference oracle (tests only; the library never differences) ---


def fd_gradient(f, point, h=1e-5):
    d = len(point)
    g = np.zeros(d)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        g[i] = (f(point + e)[0] - f(point - e)[0]) / (2 * h)
    return g


def fd_hessian(f, point, h=1e-5):
    d = len(point)
    H = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            ei = np.zeros(d)
            ej = np.zeros(d)
            ei[i] = h
            ej[j] = h
            H[i, j] = (
                f(point + ei + ej)[0]
                - f(point + ei - ej)[0]
                - f(point - ei + ej)[0]
                + f(point - ei - ej)[0]
            ) / (4 * h * h)
    return H


# --- parsing -----------------------------------------------------------------


def test_parse_three_leaves():
    e = parse("z - y*x", XYZ)
    assert set(e.free_coords) == {"x", "y", "z"}
    assert e.values(np.array([1.0, 2.0, 3.0]))[0] == 1.0


def test_parse_constant_one():
    e = parse("1", XYZ)
    assert e.constant_value() == 1.0
    assert e.free_coords == ()


def test_parse_golden_quadratic():
    e = parse("(x^2 + y^2)/2", XYZ)
    assert e.values(np.array([3.0, 4.0, 0.0]))[0] == 12.5


def test_parse_error_offset_4():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("(x^2", XYZ)
    assert exc.value.offset == 4


def test_parse_error_unexpected_char():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("x + $", XYZ)
    assert exc.value.offset == 4


def test_unknown_coordinate():
    with pytest.raises(UnknownCoordinateError) as exc:
        parse("x + w", XYZ)
    assert exc.value.name == "w"
    assert exc.value.offset == 4


def test_unary_minus_binds_as_base():
    # per the grammar "-x^2" is (-x)^2
    e = parse("-x^2", XYZ)
    assert e.values(np.array([3.0, 0.0, 0.0]))[0] == 9.0
    e2 = parse("-(x^2)", XYZ)
    assert e2.values(np.array([3.0, 0.0, 0.0]))[0] == -9.0


def test_integer_exponent_required():
    with pytest.raises(ExprSyntaxError):
        parse("x^y", XYZ)
    with pytest.raises(ExprSyntaxError):
        parse("x^2.5", XYZ)


def test_negative_exponent():
    e = parse("x^-2", XYZ)
    assert e.values(np.array([2.0, 0.0, 0.0]))[0] == 0.25


# --- jets --------------------------------------------------------------------


def test_jet_polynomial_golden():
    e = parse("z - y*x", XYZ)
    jet = e.eval_jet2((1.0, 2.0, 3.0))
    assert jet.value == 1.0
    assert np.array_equal(jet.gradient, [-2.0, -1.0, 1.0])
    expected_h = np.zeros((3, 3))
    expected_h[0, 1] = expected_h[1, 0] = -1.0
    assert np.array_equal(jet.hessian, expected_h)


def test_jet_constant():
    e = parse("1", XYZ)
    jet = e.eval_jet2((5.0, -7.0, 0.3))
    assert jet.value == 1.0
    assert not jet.gradient.any()
    assert not jet.hessian.any()


def test_jet_sin_exp_golden():
    e = parse("sin(x)*exp(y)", ("x", "y"))
    jet = e.eval_jet2((0.0, 0.0))
    assert jet.value == 0.0
    assert np.allclose(jet.gradient, [1.0, 0.0], atol=1e-15)
    assert abs(jet.hessian[0, 1] - 1.0) < 1e-15
    assert abs(jet.hessian[0, 0]) < 1e-15
    # frozen cross-check against the difference oracle
    pt = np.array([0.0, 0.0])
    assert np.allclose(jet.gradient, fd_gradient(e.values, pt), atol=1e-7)
    assert np.allclose(jet.hessian, fd_hessian(e.values, pt), atol=1e-7)


def test_division_by_zero():
    e = parse("1/x", XYZ)
    with pytest.raises(EvalDomainError):
        e.values(np.array([0.0, 1.0, 1.0]))


def test_sqrt_domain():
    e = parse("sqrt(x)", XYZ)
    with pytest.raises(EvalDomainError):
        e.values(np.array([-1.0, 0.0, 0.0]))
    with pytest.raises(EvalDomainError):
        e.eval_jet2((0.0, 0.0, 0.0))  # derivative blows up at 0
    assert e.values(np.array([4.0, 0.0, 0.0]))[0] == 2.0


def test_hessian_built_symmetric():
    e = parse("exp(x*y) * sin(z) + x^3/(2 + y^2)", XYZ)
    _, _, h = e.jets(np.array([[0.3, -0.7, 1.1], [1.0, 2.0, -0.5]]))
    assert np.array_equal(h, np.swapaxes(h, 1, 2))  # exactly symmetric


# --- random expression generator for the difference-oracle sweep -------------


def _random_expr(rng, coords, depth):
    roll = rng.random()
    if depth <= 0 or roll < 0.25:
        if rng.random() < 0.4:
            return const(float(np.round(rng.uniform(-2, 2), 4)), coords)
        return coord(coords[int(rng.integers(len(coords)))], coords)
    a = _random_expr(rng, coords, depth - 1)
    b = _random_expr(rng, coords, depth - 1)
    pick = int(rng.integers(7))
    if pick == 0:
        return a + b
    if pick == 1:
        return a - b
    if pick == 2:
        return a * b
    if pick == 3:
        # denominator kept away from zero
        return a / (b * b + 2.0)
    if pick == 4:
        from contactkit.expressions import sin as esin

        return esin(a)
    if pick == 5:
        from contactkit.expressions import cos as ecos

        return ecos(a)
    # sqrt of a strictly positive expression
    from contactkit.expressions import sqrt as esqrt

    return esqrt(a * a + 1.5)


def _normalized(e, pt):
    # The second-difference oracle carries cancellation noise of roughly
    # eps * (intermediate magnitude) / h^2 ~ 2e-6 per unit of magnitude at
    # h = 1e-5.  Scaling the expression scales that noise linearly, so a
    # small overall factor keeps the oracle itself below the 1e-6 bar the
    # jets are held to.
    v = abs(e.values(pt)[0])
    return e * float(np.round(0.03 / max(1.0, v), 10))


def test_jets_match_finite_differences_1000():
    """Exact jets vs central differences (step 1e-5) for 1000 seeded cases."""
    rng = np.random.default_rng(20110615)
    coords = ("x", "y", "z")
    worst = 0.0
    for _ in range(1000):
        e = _random_expr(rng, coords, int(rng.integers(1, 4)))
        pt = rng.uniform(-0.8, 0.8, size=3)
        e = _normalized(e, pt)
        v, g, h = e.jets(pt)
        scale = max(1.0, abs(v[0]))
        g_fd = fd_gradient(e.values, pt)
        h_fd = fd_hessian(e.values, pt)
        rel_g = np.max(np.abs(g[0] - g_fd)) / scale
        rel_h = np.max(np.abs(h[0] - h_fd)) / scale
        worst = max(worst, rel_g, rel_h)
    assert worst < 1e-6, f"worst relative deviation {worst:.3e}"


def test_exp_jet_against_differences():
    rng = np.random.default_rng(7)
    from contactkit.expressions import exp as eexp

    for _ in range(50):
        a = _random_expr(rng, XYZ, 2)
        pt = rng.uniform(-0.6, 0.6, size=3)
        e = _normalized(eexp(a * 0.25), pt)
        v, g, h = e.jets(pt)
        scale = max(1.0, abs(v[0]))
        assert np.max(np.abs(g[0] - fd_gradient(e.values, pt))) / scale < 1e-6
        assert np.max(np.abs(h[0] - fd_hessian(e.values, pt))) / scale < 1e-6


# --- printing / round trip ---------------------------------------------------


def test_round_trip_exact_values_100_points():
    rng = np.random.default_rng(42)
    exprs = [
        parse("z - y*x", XYZ),
        parse("(x^2 + y^2)/2", XYZ),
        parse("sin(x)*exp(y) - sqrt(z^2 + 1)", XYZ),
        parse("-x^2 + 3*y/(z^2 + 2)", XYZ),
        random_polynomial(XYZ, 3, rng),
        random_polynomial(XYZ, 3, rng),
    ]
    pts = rng.uniform(-2, 2, size=(100, 3))
    for e in exprs:
        back = parse(str(e), XYZ)
        # identical evaluation, bit for bit: same operation tree
        assert np.array_equal(e.values(pts), back.values(pts))


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_round_trip_property(seed):
    rng = np.random.default_rng(seed)
    e = _random_expr(rng, XYZ, int(rng.integers(1, 5)))
    pts = rng.uniform(-1.5, 1.5, size=(16, 3))
    back = parse(str(e), XYZ)
    assert np.array_equal(e.values(pts), back.values(pts))
    # printing is stable under one more round trip
    assert str(back) == str(e)


def test_symbolic_derivative_matches_jets():
    rng = np.random.default_rng(11)
    for _ in range(100):
        e = _random_expr(rng, XYZ, 3)
        pt = rng.uniform(-0.9, 0.9, size=3)
        _, g, _ = e.jets(pt)
        for i, name in enumerate(XYZ):
            dv = e.derivative(name).values(pt)[0]
            assert abs(dv - g[0, i]) <= 1e-12 * max(1.0, abs(dv))


def test_substitute():
    coords = ("u", "v")
    e = parse("x^2 + y", XYZ)
    sub = e.substitute(
        {
            "x": parse("u + v", coords),
            "y": parse("u*v", coords),
            "z": parse("0", coords),
        },
        coords,
    )
    pts = np.array([[1.0, 2.0], [0.5, -0.25]])
    expect = (pts[:, 0] + pts[:, 1]) ** 2 + pts[:, 0] * pts[:, 1]
    assert np.allclose(sub.values(pts), expect, atol=1e-15)


def test_random_polynomial_determinism_and_degree():
    a = random_polynomial(XYZ, 3, np.random.default_rng(5))
    b = random_polynomial(XYZ, 3, np.random.default_rng(5))
    assert str(a) == str(b)
    # third derivatives of a cubic are constant: fourth derivative vanishes
    d4 = a.derivative("x").derivative("x").derivative("x").derivative("x")
    assert d4.constant_value() == 0.0


def test_jet2_fields():
    jet = parse("x*y", ("x", "y")).eval_jet2((2.0, 3.0))
    assert isinstance(jet, Jet2)
    assert jet.value == 6.0
    assert jet.gradient.shape == (2,)
    assert jet.hessian.shape == (2, 2)
