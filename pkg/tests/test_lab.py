import numpy as np
import pytest
from numpy.testing import assert_allclose

from wasserlab.geometry import BakryEmeryParams
from wasserlab.lab import (CLOSED_FORM_TOL, GRID_TOL, check_edi_epdi, check_ent_infty,
                           check_jacobian, check_niw, check_path_invariants, check_power_bound,
                           check_renyi, check_sn, check_sturm, derivative_set, identity_ij,
                           infer_K, make_report, model_renyi_entropy, resolve_w_sign,
                           rigidity_probe, verdict, w_entropy_profile)


def first(prepared, name):
    _, path, params, series = prepared(name)[0]
    return path, params, series


def test_verdict_logic():
    assert verdict([0.5, 1.0], 1e-6) == "pass"
    assert verdict([1e-8, -1e-8], 1e-6) == "equality"
    assert verdict([0.5, -1e-3], 1e-6) == "fail"
    assert verdict([0.5], 1e-6, residual=[1e-3]) == "fail"
    assert verdict([np.nan, 0.1], 1e-6) == "pass"
    assert verdict([], 1e-6) == "equality"


def test_report_summary():
    r = make_report("x", [0, 1], [0.2, np.nan], 1e-6, residual=[1e-9, 2e-9], note="n")
    assert r.min_margin == 0.2 and r.max_residual == 2e-9
    assert r.passed and r.diagnostics["note"] == "n"


def test_derivative_source_validation(dilation):
    _, _, s = dilation
    with pytest.raises(ValueError):
        derivative_set(s, "spline")


def test_dilation_edi_is_equality(dilation):
    path, params, s = dilation
    edi, epdi = check_edi_epdi(s, params, path.theta)
    # Gamma_2 = 1/(1+t)^2 = I^2: the flat EDI is saturated
    assert edi.verdict == "equality" and abs(edi.min_margin) < 1e-8
    assert epdi.verdict == "equality"
    assert epdi.diagnostics["chain_residual"] < 1e-8


def test_dilation_fd_source_uses_grid_tolerance(dilation):
    _, params, s = dilation
    edi, _ = check_edi_epdi(s, params, source="fd")
    assert edi.tolerance == GRID_TOL and edi.passed


def test_power_bound_flat_dilation(dilation):
    _, params, s = dilation
    rep = check_power_bound(s, params)
    # N_1 = sqrt(2 pi e)(1 + t) is affine, so the bound is attained
    assert rep.verdict == "equality"
    assert rep.diagnostics["ode_agreement"] < 1e-8


def test_renyi_and_sn_on_dilation(dilation):
    _, params, s = dilation
    r4, r5 = check_renyi(s, params)
    assert r4.passed and r5.passed
    assert check_sn(s, params).passed


def test_renyi_rejects_small_p(prepared):
    _, params, s = first(prepared, "weighted-m3")
    small = type(s)(**{**s.__dict__, "p": 0.5})
    with pytest.raises(ValueError):
        check_renyi(small, params)


def test_sn_rejects_N_below_m(prepared):
    _, params, s = first(prepared, "weighted-m3")
    low = type(s)(**{**s.__dict__, "N": 2.0})
    with pytest.raises(ValueError):
        check_sn(low, params)


def test_path_invariants(dilation):
    path, _, _ = dilation
    rep = check_path_invariants(path)
    assert rep.passed and rep.tolerance == 1.0
    assert rep.diagnostics["theta"] == pytest.approx(1.0, abs=1e-6)


def test_sturm_uniform_frozen_value(prepared):
    path, params, _ = first(prepared, "uniform-dilation")
    r1 = check_sturm(path, params, 1)
    assert r1.verdict == "equality" and np.max(np.abs(r1.margin)) < 1e-12
    r2 = check_sturm(path, params, 2)
    k = np.argmin(np.abs(path.times - 0.5))
    assert r2.margin[k] == pytest.approx(0.01763809020504148, abs=1e-9)
    with pytest.raises(ValueError):
        check_sturm(path, params, 0.5)


def test_jacobian_flat_line_is_affine(dilation):
    path, params, _ = dilation
    rep = check_jacobian(path, params, 1)
    assert rep.diagnostics["second_derivative_max"] <= 1e-9
    assert rep.passed
    assert rep.diagnostics["pushforward_residual"] < 1e-6


def test_identity_ij(dilation):
    path, params, _ = dilation
    assert identity_ij(path, params, 2).passed


def test_ent_infty_weighted(prepared):
    _, params, s = first(prepared, "weighted-cd-infty")
    rep = check_ent_infty(s, params, gen="power(1.5)")
    assert rep.passed
    # m = inf: the class is DC_inf, p1(r)/r = r^{1/2} for power(1.5) and 1 for xlogx
    assert rep.diagnostics["dcn_dimension"] == np.inf
    assert rep.diagnostics["K_NU"] == 0.0
    ent = check_ent_infty(s, params, gen="xlogx")
    assert ent.passed and ent.diagnostics["K_NU"] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        check_ent_infty(s, params, gen="power(0.5)")


def test_ent_infty_needs_N_at_least_m(prepared):
    _, params, s = first(prepared, "weighted-m3")
    with pytest.raises(ValueError):
        check_ent_infty(type(s)(**{**s.__dict__, "N": 2.0}), params, gen="xlogx")


def test_infer_K(prepared):
    path, params, _ = first(prepared, "sphere-K1")
    assert infer_K(path, params) == pytest.approx(1.0)


def test_falsification_edi_fails(prepared):
    path, params, s = first(prepared, "falsification-hyperbolic")
    edi, _ = check_edi_epdi(s, params, path.theta)
    assert edi.verdict == "fail" and edi.min_margin < 0


def test_model_renyi_entropy_limit():
    t = np.array([0.5, 1.0])
    assert_allclose(model_renyi_entropy(2, 1 + 1e-8, t), model_renyi_entropy(2, 1.0, t),
                    atol=1e-7)


def test_w_entropy_model_gaussian(prepared):
    path, params, s = first(prepared, "model-gaussian")
    w, rep = w_entropy_profile(s, path, params)
    assert np.max(np.abs(w.Wm)) <= 1e-6
    assert rep.passed
    assert check_niw(s, w, params).passed


def test_w_entropy_rejects_time_zero(dilation):
    path, params, s = dilation
    with pytest.raises(ValueError):
        w_entropy_profile(s, path, params)


def test_resolve_w_sign(prepared):
    path, params, s = first(prepared, "weighted-m3")
    assert resolve_w_sign(s, path, params) == ["plus"]
    w, _ = w_entropy_profile(s, path, params, w_sign="minus")
    assert not check_niw(s, w, params).passed


def test_rigidity_probe(dilation):
    path, params, s = dilation
    edi, _ = check_edi_epdi(s, params, path.theta)
    out = rigidity_probe(path, s, params, edi)
    assert out["applicable"]
    assert out["hessian_soliton"] <= 1e-6 and out["riccati_residual"] <= 1e-6


def test_rigidity_probe_warns_on_strict(prepared):
    path, params, s = first(prepared, "sphere-K1")
    edi, _ = check_edi_epdi(s, params, path.theta)
    assert edi.verdict == "pass"
    with pytest.warns(RuntimeWarning):
        assert rigidity_probe(path, s, params, edi) == {"applicable": False}


def test_closed_form_tolerance_constant():
    assert CLOSED_FORM_TOL == 1e-6
