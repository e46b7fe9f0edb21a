import math

import numpy as np
import pytest

import gelfand.bifurcation as bif
from gelfand import (
    IntegrationError,
    ProblemConfig,
    check_lower_envelope,
    check_separation,
    classify,
    hardy_constant,
    integrate_ivp,
    integrate_singular,
    lambda_second_derivative,
    make_ah,
    parse_weight,
    trace_curve,
    zero_number,
)
from gelfand.bifurcation import TurningPoint

H = hardy_constant()
CONST = parse_weight("const")


# --------------------------------------------------------- curve structure

def test_samples_ordered_and_spaced(curve3):
    betas = curve3.betas
    assert np.all(np.diff(betas) > 0)
    assert np.max(np.diff(betas)) <= 0.25 + 1e-12
    assert curve3.complete and curve3.diagnostic == ""


def test_alpha_identity_on_samples(curve3):
    for s in curve3.samples[:: max(1, len(curve3.samples) // 50)]:
        assert s.alpha == pytest.approx(s.beta - math.log(s.lam), abs=1e-12)


def test_lambda_bounded_by_extremal(curve3, cfg3):
    report = classify(cfg3, curve3, integrate_singular(cfg3)[0])
    assert report.lambda_extremal == max(s.lam for s in curve3.samples)
    assert all(s.lam <= report.lambda_extremal for s in curve3.samples)
    assert math.isfinite(report.lambda_extremal)


def test_turning_points_refined_flat(curve3, cfg3):
    assert len(curve3.turning_points) >= 3
    assert curve3.turning_points[0].kind == "Max"
    for tp in curve3.turning_points:
        sh = integrate_ivp(cfg3, tp.beta)
        assert abs(sh.dlambda_dbeta) <= 1e-8 * max(1.0, sh.lam)


def test_turning_point_kinds_alternate(curve3):
    kinds = [tp.kind for tp in curve3.turning_points]
    assert all(a != b for a, b in zip(kinds, kinds[1:]))


def test_second_derivative_sign_matches_kind(curve3, cfg3):
    # Max folds are maxima of lambda(beta): lambda'' < 0 there
    for tp in curve3.turning_points[:4]:
        lpp = lambda_second_derivative(cfg3, tp.beta)
        assert (lpp < 0.0) == (tp.kind == "Max")


def test_no_turning_points_critical_dim(curve10_h0):
    assert curve10_h0.turning_points == ()
    lams = curve10_h0.lams
    assert lams[-1] > lams[0]


def test_turning_point_kind_validation():
    with pytest.raises(ValueError):
        TurningPoint(beta=1.0, lam=2.0, alpha=0.3, kind="Saddle")


def test_trace_rejects_bad_window(cfg3):
    with pytest.raises(ValueError):
        trace_curve(cfg3, 5.0, 5.0, 0.25)
    with pytest.raises(ValueError):
        trace_curve(cfg3, 0.0, 1.0, 0.0)


def test_trace_truncates_on_integrator_failure(cfg3, monkeypatch):
    real = bif.integrate_ivp

    def failing(cfg, beta, **kw):
        if beta > 1.0:
            raise IntegrationError("stalled", reached=0.5)
        return real(cfg, beta, **kw)

    monkeypatch.setattr(bif, "integrate_ivp", failing)
    curve = trace_curve(cfg3, 0.0, 3.0, 0.25)
    assert not curve.complete
    assert "beta" in curve.diagnostic
    assert len(curve.samples) >= 1
    assert curve.betas[-1] <= 1.0


def test_emanation_sample():
    cfg = ProblemConfig(dim=3, weight=CONST)
    curve = trace_curve(cfg, -10.0, -9.5, 0.25)
    s = curve.samples[0]
    assert s.beta == -10.0
    assert abs(s.lam - math.exp(-10.0)) <= 1e-3 * math.exp(-10.0)
    assert abs(s.alpha - (-10.0 - math.log(s.lam))) <= 1e-3


# ----------------------------------------------------------- classification

def test_classify_type_one(curve3, cfg3):
    lam_star, _ = integrate_singular(cfg3)
    assert lam_star == pytest.approx(2.0, rel=1e-9)
    rep = classify(cfg3, curve3, lam_star)
    assert rep.diagram_type == "I"
    assert rep.oscillation_count >= 3
    assert rep.extremal_bounded
    assert len(rep.turning_points) >= 3


def test_classify_type_two(curve10_h0, cfg10_h0):
    lam_star, _ = integrate_singular(cfg10_h0)
    assert lam_star == pytest.approx(16.0, rel=1e-6)
    rep = classify(cfg10_h0, curve10_h0, lam_star)
    assert rep.diagram_type == "II"
    assert not rep.extremal_bounded
    assert rep.turning_points == ()


def test_classify_type_three(curve10_h40, cfg10_h40):
    lam_star, _ = integrate_singular(cfg10_h40)
    assert lam_star == pytest.approx(16.0 * math.exp(-2.0), rel=1e-6)
    rep = classify(cfg10_h40, curve10_h40, lam_star)
    assert rep.diagram_type == "III"
    assert rep.extremal_bounded
    assert len(rep.turning_points) >= 1
    # no fold in the final third of the window
    b0, b1 = curve10_h40.beta_range
    cutoff = b0 + (b1 - b0) * 2.0 / 3.0
    assert all(tp.beta < cutoff for tp in rep.turning_points)


def test_classify_requires_wide_window(cfg3):
    short = trace_curve(cfg3, -2.0, 8.0, 0.25)
    with pytest.raises(ValueError):
        classify(cfg3, short, 2.0)


def test_convergence_to_singular_level():
    # |lambda(beta) - lambda_*| shrinks as the window grows
    cfg = ProblemConfig(dim=3, weight=CONST)
    lam_star, _ = integrate_singular(cfg)
    d30 = abs(integrate_ivp(cfg, 30.0).lam - lam_star)
    d40 = abs(integrate_ivp(cfg, 40.0).lam - lam_star)
    assert d40 < d30


@pytest.mark.xfail(reason="oscillation amplitude at N=9 decays like "
                   "exp(-7 beta/4); sign changes past beta ~ 13 fall below "
                   "float64 resolution, so the late-window oscillation "
                   "evidence cannot be certified numerically", strict=True)
def test_classify_type_one_nine_dimensions():
    cfg = ProblemConfig(dim=9, weight=CONST)
    curve = trace_curve(cfg, -5.0, 40.0, 0.25)
    lam_star, _ = integrate_singular(cfg)
    rep = classify(cfg, curve, lam_star)
    assert rep.diagram_type == "I"


# ------------------------------------------------------------- zero number

def test_zero_number_low_beta_is_zero():
    cfg = ProblemConfig(dim=3, weight=CONST)
    _, sing = integrate_singular(cfg)
    assert zero_number(cfg, -5.0, sing) == 0


def test_zero_number_grows_along_type_one_curve():
    cfg = ProblemConfig(dim=3, weight=CONST)
    _, sing = integrate_singular(cfg)
    assert zero_number(cfg, 25.0, sing) >= zero_number(cfg, 10.0, sing) + 2


def test_zero_number_borderline_family_separated():
    cfg = ProblemConfig(dim=10, weight=make_ah(H, 10))
    _, sing = integrate_singular(cfg)
    assert zero_number(cfg, 15.0, sing) == 0


# -------------------------------------------------------------- separation

def test_separation_identical_profiles():
    cfg = ProblemConfig(dim=10, weight=make_ah(H, 10))
    gap_v, _, r_h = check_separation(cfg, H, 3.0, 3.0)
    assert gap_v == 0.0
    assert r_h == pytest.approx(1.0)


def test_separation_ordered_profiles_borderline():
    cfg = ProblemConfig(dim=10, weight=make_ah(H, 10))
    gap_v, gap_w, r_h = check_separation(cfg, H, 2.0, 5.0)
    assert gap_v > 0.0
    assert gap_w > 0.0
    assert r_h == pytest.approx(1.0)


def test_separation_window_shrinks_for_strong_weight():
    cfg = ProblemConfig(dim=10, weight=make_ah(3.0, 10))
    _, _, r_h = check_separation(cfg, 3.0, 1.0, 2.0)
    assert r_h == pytest.approx(1.0)  # h < H keeps the full window
    cfg_b = ProblemConfig(dim=10, weight=make_ah(H, 10))
    _, _, r_h2 = check_separation(cfg_b, 4.0 * H, 1.0, 2.0)
    assert r_h2 == pytest.approx(0.5)  # sqrt(H / 4H)


def test_separation_type_one_profiles_intersect():
    cfg = ProblemConfig(dim=3, weight=CONST)
    gap_v, _, _ = check_separation(cfg, 0.0, 5.0, 10.0)
    assert gap_v < 0.0


def test_separation_rejects_wrong_class():
    cfg = ProblemConfig(dim=10, weight=make_ah(40.0, 10))
    with pytest.raises(ValueError):
        check_separation(cfg, H, 1.0, 2.0)
    cfg_ok = ProblemConfig(dim=10, weight=make_ah(H, 10))
    with pytest.raises(ValueError):
        check_separation(cfg_ok, H, 2.0, 1.0)  # gamma < beta


# ------------------------------------------------------------ lower envelope

def test_envelope_positive_gap():
    cfg = ProblemConfig(dim=10, weight=make_ah(40.0, 10))
    assert check_lower_envelope(cfg, 1.0, 2.0, 0.0) > 0.0
    assert check_lower_envelope(cfg, 1.0, 3.0, 0.25) > 0.0


def test_envelope_continuous_in_gamma():
    cfg = ProblemConfig(dim=10, weight=make_ah(40.0, 10))
    g1 = check_lower_envelope(cfg, 1.0, 2.0, 0.0)
    g2 = check_lower_envelope(cfg, 1.0, 2.0 + 1e-4, 0.0)
    assert abs(g2 - g1) < 1e-2


def test_envelope_rejects_bad_inputs():
    cfg = ProblemConfig(dim=10, weight=make_ah(40.0, 10))
    with pytest.raises(ValueError):
        check_lower_envelope(cfg, -1.0, 2.0, 0.0)   # beta <= 0
    with pytest.raises(ValueError):
        check_lower_envelope(cfg, 2.0, 1.0, 0.0)    # gamma <= beta
    with pytest.raises(ValueError):
        check_lower_envelope(cfg, 1.0, 2.0, 1.5)    # eps0 outside [0, 1]
    wrong = ProblemConfig(dim=10, weight=make_ah(0.0, 10))
    with pytest.raises(ValueError):
        check_lower_envelope(wrong, 1.0, 2.0, 0.0)  # decreasing-ratio class
    low = ProblemConfig(dim=9, weight=make_ah(40.0, 9))
    with pytest.raises(ValueError):
        check_lower_envelope(low, 1.0, 2.0, 0.0)    # not the critical dim
