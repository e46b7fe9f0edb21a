"""Bifurcation curve tracing, fold refinement, and diagram classification.

The radial solution branch is the analytic curve beta -> (lambda(beta),
alpha(beta)) with alpha = beta - log lambda. Tracing marches beta with an
adaptive step (capped by the caller), halving whenever lambda moves more
than 1% or dlambda/dbeta flips sign; every sign flip is bracketed and the
fold refined by bisection on the variational derivative. Classification
into diagram types is a windowed decision rule, not a theorem: a window
can only ever certify finitely many oscillations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._stepper import IntegrationError
from .radial_ode import (
    ProblemConfig,
    RadialProfile,
    ShootResult,
    _weight_arrays,
    integrate_ivp,
    integrate_singular,
)
from .weights import make_ah, parse_weight, ratio_derivative_sign

BETA_TOL = 1e-8           # fold bracket width target
FOLD_FLATNESS = 1e-8      # |dlambda/dbeta| <= FOLD_FLATNESS * max(1, lambda)
CHATTER_REL = 1e-9        # |lambda - lambda_star| below this (relative) is noise
STEP_HALVINGS = 12        # step floor = max_step / 2**STEP_HALVINGS


@dataclass(frozen=True)
class TurningPoint:
    beta: float
    lam: float
    alpha: float
    kind: str  # "Max" or "Min"

    def __post_init__(self):
        if self.kind not in ("Max", "Min"):
            raise ValueError(f"turning point kind must be Max or Min, got {self.kind!r}")


@dataclass(frozen=True)
class BifurcationCurve:
    samples: tuple[ShootResult, ...]
    turning_points: tuple[TurningPoint, ...]
    beta_range: tuple[float, float]
    complete: bool = True
    diagnostic: str = ""

    @property
    def betas(self) -> np.ndarray:
        return np.array([s.beta for s in self.samples])

    @property
    def lams(self) -> np.ndarray:
        return np.array([s.lam for s in self.samples])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([s.alpha for s in self.samples])

    @property
    def dlams(self) -> np.ndarray:
        return np.array([s.dlambda_dbeta for s in self.samples])


@dataclass(frozen=True)
class ClassificationReport:
    diagram_type: str  # "I", "II", "III", "Undetermined"
    lambda_star: float
    lambda_extremal: float
    turning_points: tuple[TurningPoint, ...]
    oscillation_count: int
    extremal_bounded: bool
    evidence: str


def _deadband_sign(dlam: float, lam: float, rel_tol: float) -> int:
    """Sign of dlambda/dbeta, zero inside the solver-noise deadband.

    Oscillation amplitudes below the working tolerance cannot be resolved;
    folds whose derivative never leaves the band are dropped rather than
    placed at noise."""
    band = 50.0 * rel_tol * max(1.0, abs(lam))
    if abs(dlam) <= band:
        return 0
    return 1 if dlam > 0.0 else -1


def trace_curve(cfg: ProblemConfig, beta_min: float, beta_max: float,
                max_step: float = 0.25) -> BifurcationCurve:
    """March the solution curve over [beta_min, beta_max].

    Step control: halve on |delta lambda| > 1% of the current lambda or on
    a sign flip of dlambda/dbeta, down to a floor of max_step / 2^12 (the
    floor step is accepted as-is); regrow by 2 after two clean accepts.
    Sign flips between accepted samples are refined by refine_fold. An
    integrator failure truncates the curve and records a diagnostic.
    """
    if not beta_min < beta_max:
        raise ValueError(f"need beta_min < beta_max, got [{beta_min}, {beta_max}]")
    if not 0.0 < max_step <= 1.0:
        raise ValueError(f"max_step must lie in (0, 1], got {max_step}")

    first = integrate_ivp(cfg, beta_min, trace=True)
    samples = [first]
    brackets: list[tuple[ShootResult, ShootResult]] = []
    complete = True
    diagnostic = ""

    floor = max_step / 2.0 ** STEP_HALVINGS
    step = max_step
    clean = 0
    # last accepted sample whose derivative sign is outside the deadband;
    # comparing against it keeps folds visible when a sample lands inside
    # the band right at the fold
    anchor = first
    anchor_sign = _deadband_sign(first.dlambda_dbeta, first.lam, cfg.rel_tol)
    while samples[-1].beta < beta_max - 1e-12:
        prev = samples[-1]
        target = min(prev.beta + step, beta_max)
        try:
            cand = integrate_ivp(cfg, target, trace=True)
        except IntegrationError as exc:
            complete = False
            diagnostic = f"integration failed at beta={target:.6g}: {exc}"
            break
        s_cand = _deadband_sign(cand.dlambda_dbeta, cand.lam, cfg.rel_tol)
        flip = anchor_sign != 0 and s_cand != 0 and s_cand != anchor_sign
        jump = abs(cand.lam - prev.lam) > 0.01 * prev.lam
        if (jump or flip) and step > floor:
            step = max(0.5 * step, floor)
            clean = 0
            continue
        samples.append(cand)
        if flip:
            brackets.append((anchor, cand))
        if s_cand != 0:
            anchor = cand
            anchor_sign = s_cand
        clean += 1
        if clean >= 2:
            step = min(2.0 * step, max_step)

    tps = []
    for lo, hi in brackets:
        tps.append(refine_fold(cfg, lo.beta, hi.beta))
    for a, b in zip(tps, tps[1:]):
        if a.kind == b.kind:
            raise RuntimeError(
                f"turning point kinds failed to alternate: {a} then {b}"
            )
    return BifurcationCurve(
        samples=tuple(samples),
        turning_points=tuple(tps),
        beta_range=(beta_min, beta_max),
        complete=complete,
        diagnostic=diagnostic,
    )


def refine_fold(cfg: ProblemConfig, beta_lo: float, beta_hi: float) -> TurningPoint:
    """Bisect a sign change of dlambda/dbeta down to a 1e-8 beta bracket.

    Uses the variational derivative lambda * e(1) directly, so there is no
    finite-difference tolerance coupling. The returned point satisfies
    |dlambda/dbeta| <= 1e-8 * max(1, lambda).
    """
    lo = integrate_ivp(cfg, beta_lo, trace=True)
    hi = integrate_ivp(cfg, beta_hi, trace=True)
    if not (lo.dlambda_dbeta != 0.0 and
            lo.dlambda_dbeta * hi.dlambda_dbeta < 0.0):
        raise ValueError(
            f"no derivative sign change on [{beta_lo}, {beta_hi}]: "
            f"{lo.dlambda_dbeta} vs {hi.dlambda_dbeta}"
        )
    kind = "Max" if lo.dlambda_dbeta > 0.0 else "Min"
    a, b = beta_lo, beta_hi
    fa = lo.dlambda_dbeta
    mid = lo
    for _ in range(100):
        m = 0.5 * (a + b)
        mid = integrate_ivp(cfg, m, trace=True)
        if mid.dlambda_dbeta == 0.0:
            break
        if fa * mid.dlambda_dbeta < 0.0:
            b = m
        else:
            a = m
            fa = mid.dlambda_dbeta
        if (b - a <= BETA_TOL
                and abs(mid.dlambda_dbeta) <= FOLD_FLATNESS * max(1.0, mid.lam)):
            break
    return TurningPoint(beta=mid.beta, lam=mid.lam, alpha=mid.alpha, kind=kind)


def classify(cfg: ProblemConfig, curve: BifurcationCurve,
             lambda_star: float) -> ClassificationReport:
    """Windowed diagram classification.

    Decision rule (in order): type II iff there are no turning points and
    lambda is strictly increasing across all samples; type I iff
    lambda - lambda_star changes sign at least 3 times (ignoring samples
    within 1e-9 * lambda_star of the center) and at least one change lies
    in the final third of the window; type III iff there is at least one
    turning point, none in the final third, no late sign change, and
    lambda is monotone on the final third; otherwise Undetermined.
    """
    if not curve.samples:
        raise ValueError("cannot classify an empty curve")
    betas = curve.betas
    lams = curve.lams
    b0, b1 = float(betas[0]), float(betas[-1])
    if b1 < 30.0:
        raise ValueError(f"classification window must reach beta >= 30, got {b1}")
    cutoff = b0 + (2.0 / 3.0) * (b1 - b0)
    chatter = CHATTER_REL * abs(lambda_star)

    keep = np.abs(lams - lambda_star) >= chatter
    kb = betas[keep]
    ks = np.sign(lams[keep] - lambda_star)
    flips = np.nonzero(ks[1:] * ks[:-1] < 0.0)[0]
    osc_count = int(len(flips))
    flip_betas = 0.5 * (kb[flips] + kb[flips + 1]) if osc_count else np.array([])
    late_flip = bool(np.any(flip_betas >= cutoff)) if osc_count else False

    # strict increase up to solver resolution: a decrease only counts when
    # it exceeds the chatter scale (converged tails are flat at noise level)
    strictly_increasing = bool(np.all(np.diff(lams) >= -chatter)
                               and lams[-1] > lams[0])
    tail = lams[betas >= cutoff]
    tol = chatter
    tail_mono = bool(len(tail) < 2
                     or np.all(np.diff(tail) >= -tol)
                     or np.all(np.diff(tail) <= tol))
    tp_late = any(tp.beta >= cutoff for tp in curve.turning_points)
    n_tp = len(curve.turning_points)

    if n_tp == 0 and strictly_increasing:
        dtype = "II"
    elif osc_count >= 3 and late_flip:
        dtype = "I"
    elif n_tp >= 1 and not late_flip and not tp_late and tail_mono:
        dtype = "III"
    else:
        dtype = "Undetermined"

    evidence = (
        f"window=[{b0:.6g},{b1:.6g}] cutoff={cutoff:.6g} "
        f"turning_points={n_tp} (late={tp_late}) "
        f"oscillations={osc_count} (late={late_flip}) "
        f"strictly_increasing={strictly_increasing} tail_monotone={tail_mono} "
        f"lambda_star={lambda_star:.12g}"
    )
    return ClassificationReport(
        diagram_type=dtype,
        lambda_star=lambda_star,
        lambda_extremal=float(np.max(lams)),
        turning_points=curve.turning_points,
        oscillation_count=osc_count,
        extremal_bounded=(dtype != "II"),
        evidence=evidence,
    )


def zero_number(cfg: ProblemConfig, beta: float,
                singular_profile: RadialProfile) -> int:
    """Strict sign changes of v(., beta) - V_* on [r_start, 1].

    First pass compares the shot profile against the supplied singular
    profile on an 8192-point geometric grid. Every candidate crossing is
    then re-examined on an 8x locally refined grid with both solutions
    re-integrated there, which rejects interpolation artifacts (a crossing
    fabricated by Hermite evaluation of the singular profile disappears
    when the true values are used).
    """
    base = np.geomspace(cfg.r_start, 1.0, 8192)
    v = integrate_ivp(cfg, beta, radii=base).profile.values
    vs, _ = singular_profile.evaluate_array(base)
    d = v - vs
    cand = _strict_sign_changes_idx(d)
    if not cand:
        return 0

    pieces = [base]
    for i in cand:
        lo = base[max(0, i - 1)]
        hi = base[min(len(base) - 1, i + 2)]
        pieces.append(np.geomspace(lo, hi, 32))
    refined = np.unique(np.concatenate(pieces))
    v2 = integrate_ivp(cfg, beta, radii=refined).profile.values
    _, sing2 = integrate_singular(cfg, radii=refined)
    d2 = v2 - sing2.values
    # crossings count only when the difference is resolved: the excursion
    # on each side must clear the solver-noise floor (profiles that agree
    # to working precision have no certifiable crossing there)
    floor = 100.0 * cfg.rel_tol * max(
        1.0, float(np.max(np.abs(v2))), float(np.max(np.abs(sing2.values)))
    )
    return _resolved_sign_changes(d2, floor)


def _strict_sign_changes_idx(d: np.ndarray) -> list[int]:
    s = np.sign(d)
    nz = np.nonzero(s)[0]
    if len(nz) < 2:
        return []
    flips = np.nonzero(s[nz[1:]] * s[nz[:-1]] < 0.0)[0]
    return [int(nz[i]) for i in flips]


def _resolved_sign_changes(d: np.ndarray, floor: float) -> int:
    """Sign changes between maximal constant-sign blocks whose amplitude
    reaches `floor`; sub-floor blocks are noise and are dropped."""
    s = np.sign(d)
    nz = np.nonzero(s)[0]
    if len(nz) < 2:
        return 0
    block_signs: list[float] = []
    block_amps: list[float] = []
    cur_sign = s[nz[0]]
    cur_amp = abs(d[nz[0]])
    for i in nz[1:]:
        if s[i] == cur_sign:
            cur_amp = max(cur_amp, abs(d[i]))
        else:
            block_signs.append(cur_sign)
            block_amps.append(cur_amp)
            cur_sign = s[i]
            cur_amp = abs(d[i])
    block_signs.append(cur_sign)
    block_amps.append(cur_amp)
    resolved = [sg for sg, amp in zip(block_signs, block_amps) if amp >= floor]
    return sum(1 for a, b in zip(resolved, resolved[1:]) if a != b)


def check_separation(cfg: ProblemConfig, h: float, beta: float, gamma: float):
    """Ordering of shot profiles and the weighted comparison gap.

    Returns (min_gap_v, min_gap_weighted, r_h) where r_h = min(1, sqrt(H/h))
    bounds the comparison window, min_gap_v = min of v(., gamma) - v(., beta)
    on (r_start, r_h), and min_gap_weighted = min of
    [v_H(., gamma) + log a_H] - [v(., beta) + log a] there (a_H the
    borderline member of the explicit family). At dimension 10 the weight
    must be in the (a/a_h)' <= 0 class or the input is rejected; in other
    dimensions the gaps are reported without a hypothesis guarantee.
    """
    if gamma < beta:
        raise ValueError(f"need gamma >= beta, got beta={beta}, gamma={gamma}")
    from .spectral import hardy_constant

    H = hardy_constant()
    if cfg.dim == 10:
        sign_class = ratio_derivative_sign(cfg.weight, 10, reference=make_ah(h, 10))
        if sign_class != "NonPositiveEverywhere":
            raise ValueError(
                f"weight is not in the (a/a_h)' <= 0 class (got {sign_class}); "
                "the separation hypothesis fails"
            )
    r_h = min(1.0, math.sqrt(H / h)) if h > 0.0 else 1.0
    grid = np.geomspace(cfg.r_start, r_h, 4097)

    v_beta = integrate_ivp(cfg, beta, radii=grid).profile.values
    v_gamma = integrate_ivp(cfg, gamma, radii=grid).profile.values
    min_gap_v = float(np.min(v_gamma - v_beta))

    ah_ref = make_ah(H, cfg.dim)
    cfg_ref = ProblemConfig(dim=cfg.dim, weight=ah_ref, rel_tol=cfg.rel_tol,
                            abs_tol=cfg.abs_tol, r_start=cfg.r_start, grid=cfg.grid)
    vh_gamma = integrate_ivp(cfg_ref, gamma, radii=grid).profile.values
    log_a = np.log(_weight_values(cfg.weight, grid))
    log_ah = np.log(_weight_values(ah_ref, grid))
    min_gap_weighted = float(np.min((vh_gamma + log_ah) - (v_beta + log_a)))
    return min_gap_v, min_gap_weighted, r_h


def check_lower_envelope(cfg: ProblemConfig, beta: float, gamma: float,
                         eps0: float) -> float:
    """Minimum of [v(., gamma) + log a] - [v_0(., beta) + log(1 + q r^2)]
    over (r_start, 1), with q = (H + eps0) / (2(N-2)) and v_0 the unweighted
    shot profile. Positive when the increasing-ratio envelope bound holds.
    """
    if cfg.dim != 10:
        raise ValueError("the lower envelope bound is specific to dimension 10")
    if not 0.0 < beta < gamma:
        raise ValueError(f"need 0 < beta < gamma, got beta={beta}, gamma={gamma}")
    if not 0.0 <= eps0 <= 1.0:
        raise ValueError(f"eps0 must lie in [0, 1], got {eps0}")
    sign_class = ratio_derivative_sign(cfg.weight, 10)
    if sign_class != "PositiveEverywhere":
        raise ValueError(
            f"weight is not in the (a/a_H)' > 0 class (got {sign_class}); "
            "the envelope hypothesis fails"
        )
    from .spectral import hardy_constant

    grid = np.geomspace(cfg.r_start, 1.0, 4097)
    v_gamma = integrate_ivp(cfg, gamma, radii=grid).profile.values
    cfg0 = ProblemConfig(dim=cfg.dim, weight=parse_weight("const"),
                         rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                         r_start=cfg.r_start, grid=cfg.grid)
    v0_beta = integrate_ivp(cfg0, beta, radii=grid).profile.values
    q = (hardy_constant() + eps0) / (2.0 * (cfg.dim - 2.0))
    log_a = np.log(_weight_values(cfg.weight, grid))
    gap = (v_gamma + log_a) - (v0_beta + np.log1p(q * grid * grid))
    return float(np.min(gap))


def _weight_values(w, r: np.ndarray) -> np.ndarray:
    return _weight_arrays(w, r)[0]
