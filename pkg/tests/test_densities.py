import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from wasserlab.densities import (Bump, Gaussian, Mixture, Uniform, density_on_grid,
                                 density_preset, phase_on_grid)
from wasserlab.geometry import build_model


def test_gaussian_transport_is_exact_in_both_tails():
    x = np.array([-6.0, -1.0, 0.0, 2.5, 6.0])
    T = Gaussian(0, 2).transport(Gaussian(0, 1), x)
    assert_allclose(T, 2 * x, rtol=1e-12, atol=1e-12)


def test_uniform_transport():
    x = np.linspace(0, 1, 11)
    assert_allclose(Uniform(0, 2).transport(Uniform(0, 1), x), 2 * x, atol=1e-15)
    assert Uniform(0, 1).source_interval() == (0.0, 1.0)


def test_bump_is_a_probability_density():
    b = Bump(center=1.0, width=0.5)
    mass, _ = integrate.quad(b.pdf, 0.5, 1.5, epsabs=1e-13)
    assert mass == pytest.approx(1.0, abs=1e-12)
    assert b.cdf(1.0) == pytest.approx(0.5, abs=1e-15)
    xs = np.linspace(0.55, 1.45, 7)
    assert_allclose(b.cdf(xs) + b.sf(xs), 1.0, atol=1e-14)
    assert_allclose(b.cdf(1.0 + 0.2) , 1 - b.cdf(1.0 - 0.2), atol=1e-14)
    assert b.pdf(0.4) == 0.0


def test_bump_cdf_matches_quadrature():
    b = Bump(center=0.0, width=1.0)
    for x in (-0.7, -0.1, 0.3, 0.8):
        ref, _ = integrate.quad(b.pdf, -1.0, x, epsabs=1e-14)
        assert b.cdf(x) == pytest.approx(ref, abs=1e-13)


@pytest.mark.parametrize("pre", [
    Bump(0.3, 2.0),
    Mixture([{"weight": 0.4, "mean": -1, "std": 0.6}, {"weight": 0.6, "mean": 1.5, "std": 0.9}]),
])
def test_quantile_roundtrip(pre):
    u = np.array([1e-9, 1e-4, 0.2, 0.5, 0.9, 1 - 1e-6])
    assert_allclose(pre.cdf(pre.ppf(u)), u, rtol=1e-9)
    v = np.array([1e-12, 1e-6, 0.3])
    assert_allclose(pre.sf(pre.isf(v)), v, rtol=1e-8)


def test_mixture_pdf_integrates_to_one():
    mix = Mixture([{"weight": 1, "mean": -2, "std": 0.5}, {"weight": 3, "mean": 1, "std": 1}])
    mass, _ = integrate.quad(mix.pdf, -np.inf, np.inf)
    assert mass == pytest.approx(1.0, abs=1e-10)
    assert_allclose(mix.weights, [0.25, 0.75])


@pytest.mark.parametrize("desc", [
    {"preset": "gaussian", "std": -1},
    {"preset": "uniform", "a": 1, "b": 0},
    {"preset": "bump", "width": 0},
    {"preset": "mixture", "components": []},
    {"preset": "cauchy"},
])
def test_invalid_presets(desc):
    with pytest.raises(ValueError):
        density_preset(desc)


def test_table_preset_is_grid_only():
    assert density_preset({"preset": "table", "values": [1, 2]}) is None


def test_density_on_sphere_is_relative_to_mu():
    m = build_model({"kind": "sphere_radial", "n": 3, "domain": [0.2, 2.8], "size": 2049})
    rho = density_on_grid(m, {"preset": "bump", "center": 1.5, "width": 0.8})
    assert m.integrate(rho) == pytest.approx(1.0, abs=1e-9)
    q = Bump(1.5, 0.8).pdf(m.x)
    assert_allclose(rho * np.sin(m.x) ** 2, q, atol=1e-14)


def test_density_table_shape_checked():
    m = build_model({"kind": "line", "domain": [-1, 1], "size": 64})
    with pytest.raises(ValueError):
        density_on_grid(m, {"preset": "table", "values": [1.0, 2.0]})


def test_phase_presets():
    m = build_model({"kind": "line", "domain": [-2, 2], "size": 65})
    phi = phase_on_grid(m, {"preset": "quadratic", "a": 2, "b": 1, "c": 3, "center": 1})
    assert_allclose(phi, (m.x - 1) ** 2 + (m.x - 1) + 3)
    assert_allclose(phase_on_grid(m, {"preset": "zero"}), 0.0)
    with pytest.raises(ValueError):
        phase_on_grid(m, {"preset": "cubic"})
