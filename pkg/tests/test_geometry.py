import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from wasserlab.geometry import (BakryEmeryParams, Grid, ManifoldModel, Potential,
                                apply_witten_laplacian, build_model, curvature_profile,
                                decompose, derivatives, gamma2, gamma2_direct, gamma2_field,
                                hessian_decomposition, hessian_norm_sq, laplacian, ricci_mn,
                                traceless_hessian_sq, witten)

finite = dict(allow_nan=False, allow_infinity=False)


def test_grid_spacing_and_weights():
    g = Grid(-1.0, 3.0, 41)
    assert g.h == pytest.approx(0.1)
    assert g.x[0] == -1.0 and g.x[-1] == pytest.approx(3.0)
    assert g.trapezoid_weights().sum() == pytest.approx(4.0)


def test_periodic_grid_excludes_right_end():
    g = Grid(0.0, 2 * np.pi, 64, periodic=True)
    assert g.x[-1] < 2 * np.pi
    assert g.trapezoid_weights().sum() == pytest.approx(2 * np.pi)


@pytest.mark.parametrize("args", [(0.0, 1.0, 8), (1.0, 0.0, 64), (0.0, np.inf, 64)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ValueError):
        Grid(*args)


def test_sphere_model_functions():
    m = ManifoldModel("sphere_radial", 3, Grid(0.1, 3.0, 64))
    assert_allclose(m.c(np.pi / 4), 1.0)
    assert_allclose(m.omega(np.pi / 2), 1.0)
    assert_allclose(m.omega(np.pi / 6), 0.25)
    assert m.ric == 2.0


def test_hyperbolic_and_line_curvature():
    assert ManifoldModel("hyperbolic_radial", 4, Grid(0.1, 3.0, 64)).ric == -3.0
    assert ManifoldModel("line", 1, Grid(-1, 1, 64)).ric == 0.0


def test_weighted_measure_density():
    m = build_model({"kind": "weighted_line", "domain": [-5, 5], "size": 101,
                     "potential": {"preset": "quadratic", "k": 1}})
    assert_allclose(m.measure_density(m.x), np.exp(-m.x**2 / 2))
    # mu has total mass sqrt(2 pi)
    assert m.integrate(np.ones(101)) == pytest.approx(np.sqrt(2 * np.pi), rel=1e-6)


@pytest.mark.parametrize("desc", [
    {"kind": "sphere_radial", "n": 2, "domain": [0.0, 1.0]},
    {"kind": "sphere_radial", "n": 2, "domain": [0.5, 3.5]},
    {"kind": "hyperbolic_radial", "n": 2, "domain": [-1.0, 1.0]},
    {"kind": "line", "n": 2},
    {"kind": "torus"},
    {"kind": "line", "potential": {"preset": "quadratic"}},
])
def test_build_model_rejects_invalid(desc):
    with pytest.raises(ValueError):
        build_model(desc)


def test_potential_presets():
    q = Potential.quartic(a=2.0, b=3.0)
    assert q(2.0) == pytest.approx(2 * 16 / 4 + 3 * 4 / 2)
    assert q.d1(2.0) == pytest.approx(2 * 8 + 3 * 2)
    assert q.d2(2.0) == pytest.approx(3 * 2 * 4 + 3)
    c = Potential.cosine(amplitude=0.5, frequency=2.0)
    assert c.d2(0.0) == pytest.approx(-2.0)
    quad = Potential.quadratic(k=2.0, center=1.0)
    assert quad(3.0) == pytest.approx(4.0) and quad.d1(3.0) == pytest.approx(4.0)


def test_potential_table_reproduces_smooth_potential():
    x = np.linspace(-3, 3, 601)
    t = Potential.table(x, np.cos(x))
    xs = np.linspace(-2, 2, 7)
    assert_allclose(t(xs), np.cos(xs), atol=1e-9)
    assert_allclose(t.d1(xs), -np.sin(xs), atol=1e-6)
    assert_allclose(t.d2(xs), -np.cos(xs), atol=1e-3)


def test_potential_table_rejects_nan():
    with pytest.raises(ValueError):
        Potential.table([0, 1, 2], [0, np.nan, 1])


def test_unknown_potential_preset():
    with pytest.raises(ValueError):
        Potential.from_descriptor({"preset": "sextic"})


def test_derivatives_fourth_order():
    errs = []
    for size in (101, 201):
        x = np.linspace(0, 2, size)
        d1, d2 = derivatives(np.sin(x), x[1] - x[0])
        errs.append(np.max(np.abs(d1 - np.cos(x))[2:-2]))
    assert errs[0] / errs[1] > 14


def test_derivatives_periodic():
    g = Grid(0.0, 2 * np.pi, 128, periodic=True)
    d1, d2 = derivatives(np.sin(g.x), g.h, periodic=True)
    assert_allclose(d1, np.cos(g.x), atol=1e-6)
    assert_allclose(d2, -np.sin(g.x), atol=1e-6)


def test_witten_laplacian_of_quadratic_on_gaussian_space():
    m = build_model({"kind": "weighted_line", "domain": [-4, 4], "size": 257,
                     "potential": {"preset": "quadratic", "k": 1}})
    L = apply_witten_laplacian(m, m.x**2 / 2)
    assert_allclose(L, 1 - m.x**2, atol=1e-10)


def test_sphere_laplacian_of_cosine():
    # cos r is a first eigenfunction on S^n: Delta cos r = -n cos r
    m = ManifoldModel("sphere_radial", 3, Grid(0.2, 2.9, 1025))
    L = apply_witten_laplacian(m, np.cos(m.x))
    assert_allclose(L[5:-5], -3 * np.cos(m.x)[5:-5], atol=1e-9)


def test_bochner_form_matches_direct_gamma2():
    m = ManifoldModel("sphere_radial", 3, Grid(0.3, 2.8, 2049))
    phi = np.cos(m.x) + 0.2 * m.x**2
    a, b = gamma2_field(m, phi), gamma2_direct(m, phi)
    assert_allclose(a[10:-10], b[10:-10], atol=1e-6)


def test_gamma2_direct_weighted():
    m = build_model({"kind": "weighted_line", "domain": [-3, 3], "size": 2049,
                     "potential": {"preset": "quartic", "a": 0.5, "b": 1.0}})
    phi = np.sin(m.x)
    assert_allclose(gamma2_field(m, phi)[10:-10], gamma2_direct(m, phi)[10:-10], atol=1e-6)


def test_ricci_mn_weighted():
    m = build_model({"kind": "weighted_line", "domain": [-3, 3], "size": 65,
                     "potential": {"preset": "quadratic", "k": 1}})
    assert_allclose(ricci_mn(m, m.x, 3.0), 1 - m.x**2 / 2)
    assert_allclose(ricci_mn(m, m.x, np.inf), 1.0)
    ric, ricmn = curvature_profile(m, BakryEmeryParams(m=5))
    assert_allclose(ric, 0.0)
    assert_allclose(ricmn, 1 - m.x**2 / 4)


def test_params_validation():
    w = build_model({"kind": "weighted_line", "domain": [-3, 3], "size": 65,
                     "potential": {"preset": "quadratic"}})
    s = ManifoldModel("sphere_radial", 3, Grid(0.2, 2.9, 65))
    with pytest.raises(ValueError):
        BakryEmeryParams(m=2).validate(s)
    with pytest.raises(ValueError):
        BakryEmeryParams(m=1).validate(w)
    with pytest.raises(ValueError):
        BakryEmeryParams(m=2, p=0.4).validate(w, renyi=True)
    with pytest.raises(ValueError):
        BakryEmeryParams(m=2, N=0.5)
    assert BakryEmeryParams(m=3).validate(s).m == 3
    assert BakryEmeryParams(m=3, K=0).with_K(2.0).K == 2.0


models = st.sampled_from([
    ManifoldModel("line", 1, Grid(-5, 5, 64)),
    ManifoldModel("sphere_radial", 3, Grid(0.1, 3.0, 64)),
    ManifoldModel("hyperbolic_radial", 2, Grid(0.1, 5.0, 64)),
    build_model({"kind": "weighted_line", "domain": [-5, 5], "size": 64,
                 "potential": {"preset": "quartic", "a": 0.3, "b": -1.0}}),
])


@settings(max_examples=200, deadline=None)
@given(models, st.floats(0.2, 2.8), st.floats(-5, 5, **finite), st.floats(-5, 5, **finite))
def test_trace_inequality(model, x, d1, d2):
    n = model.n
    lap = laplacian(model, x, d1, d2)
    assert hessian_norm_sq(model, x, d1, d2) >= lap**2 / n - 1e-9 * (1 + lap**2)
    assert traceless_hessian_sq(model, x, d1, d2) >= -1e-12


@settings(max_examples=200, deadline=None)
@given(models, st.floats(0.2, 2.8), st.floats(-5, 5, **finite), st.floats(-5, 5, **finite),
       st.floats(0.1, 3.0), st.one_of(st.just(0.0), st.floats(0.1, 10.0)))
def test_hessian_decomposition_identity(model, x, d1, d2, t, extra):
    # the split is ill-conditioned as m -> n with a drift, so m - n stays >= 0.1
    m = model.n + (extra if model.has_potential else 0.0)
    if model.has_potential and extra == 0.0:
        m = model.n + 0.5
    dec = decompose(model, np.array([x]), np.array([d1]), np.array([d2]), t, m)
    scale = 1 + abs(dec.hess_minus_g_over_t[0]) + abs(dec.rhs[0])
    assert abs(dec.residual[0]) <= 1e-9 * scale


@settings(max_examples=200, deadline=None)
@given(models, st.floats(0.2, 2.8), st.floats(-5, 5, **finite), st.floats(-5, 5, **finite),
       st.floats(0.5, 20.0))
def test_dimensional_bochner_inequality(model, x, d1, d2, extra):
    # Gamma_2 >= (L phi)^2/m + Ric_{m,n} |grad phi|^2 for m > n
    m = model.n + extra
    G = gamma2(model, x, d1, d2)
    L = witten(model, x, d1, d2)
    rhs = L**2 / m + ricci_mn(model, np.array([x]), m)[0] * d1**2
    assert G >= rhs - 1e-9 * (1 + abs(G) + abs(rhs))


def test_decompose_infinite_and_equal_dimension():
    m = ManifoldModel("sphere_radial", 2, Grid(0.2, 2.9, 65))
    x, d1, d2 = np.array([1.0]), np.array([0.3]), np.array([-0.4])
    assert_allclose(decompose(m, x, d1, d2, 0.7, 2).residual, 0, atol=1e-12)
    assert_allclose(decompose(m, x, d1, d2, 0.7, np.inf).residual, 0, atol=1e-12)
    with pytest.raises(ValueError):
        decompose(m, x, d1, d2, 0.0, 2)


def test_hessian_decomposition_on_grid_model_gaussian():
    # phi = x^2/2t on the line: Hess phi - g/t vanishes
    m = ManifoldModel("line", 1, Grid(-3, 3, 129))
    dec = hessian_decomposition(m, m.x**2 / (2 * 0.8), 0.8, BakryEmeryParams(m=1))
    assert_allclose(dec.hess_minus_g_over_t, 0.0, atol=1e-18)
