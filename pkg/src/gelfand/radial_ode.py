"""Radial ODE layer for -Delta u = lambda a(|x|) e^u on the unit ball.

Everything here works in the shooting normalization

    v'' + (N-1)/r v' = -a(r) e^v,   v(0) = beta, v'(0) = 0,

for which lambda(beta) = e^{v(1)} and u = v - log lambda solves the
boundary-value problem. First and second beta-derivatives of v are
integrated jointly with v. Integration starts at r_start from a matched
Taylor expansion; the singular solution starts from its own matched
expansion around the -2 log r profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _stepper
from .weights import Weight, weight_eval

BETA_MIN_GUARD = -50.0
BETA_MAX_GUARD = 60.0

_EXP_CAP = 500.0  # guards trial stages of rejected steps, not real states


def _exp(x: float) -> float:
    return math.exp(x if x < _EXP_CAP else _EXP_CAP)


@dataclass(frozen=True)
class GridSpec:
    """Output grid: geometric from r_start, then uniform to R."""

    ratio: float = 1.04
    h_uniform: float = 1e-3

    def __post_init__(self):
        if not 1.0 < self.ratio <= 1.05:
            raise ValueError(f"grid ratio {self.ratio} outside (1, 1.05]")
        if not 0.0 < self.h_uniform <= 0.05:
            raise ValueError(f"uniform spacing {self.h_uniform} outside (0, 0.05]")


@dataclass(frozen=True)
class ProblemConfig:
    dim: int
    weight: Weight
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    r_start: float = 1e-4
    grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self):
        if not 3 <= self.dim <= 12:
            raise ValueError(f"dimension {self.dim} outside [3, 12]")
        for name, tol in (("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)):
            if not 1e-13 <= tol <= 1e-6:
                raise ValueError(f"{name}={tol} outside [1e-13, 1e-6]")
        if not 0.0 < self.r_start <= 1e-3:
            raise ValueError(f"r_start={self.r_start} outside (0, 1e-3]")
        if self.weight.dim is not None and self.weight.dim != self.dim:
            raise ValueError(
                f"weight bound to dimension {self.weight.dim}, config says {self.dim}"
            )


def default_grid(cfg: ProblemConfig, R: float = 1.0) -> np.ndarray:
    """Geometric-then-uniform output radii on [r_start, R]."""
    pts = [cfg.r_start]
    r = cfg.r_start
    ratio, h_u = cfg.grid.ratio, cfg.grid.h_uniform
    while r * (ratio - 1.0) < h_u and r * ratio < R:
        r *= ratio
        pts.append(r)
    if pts[-1] < R:
        n = max(1, math.ceil((R - pts[-1]) / h_u))
        h = (R - pts[-1]) / n
        base = pts[-1]
        pts.extend(base + k * h for k in range(1, n + 1))
    pts[-1] = R
    return np.asarray(pts)


class RadialProfile:
    """Sampled radial function with derivatives; cubic Hermite between nodes."""

    __slots__ = ("radii", "values", "derivs", "R")

    def __init__(self, radii, values, derivs, R=None):
        self.radii = np.asarray(radii, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.derivs = np.asarray(derivs, dtype=float)
        self.R = float(R if R is not None else self.radii[-1])

    def __len__(self):
        return len(self.radii)

    def evaluate_array(self, r):
        """Hermite interpolation; quadratic even extension below the first node."""
        r = np.asarray(r, dtype=float)
        if np.any(r > self.R * (1.0 + 1e-12)):
            raise ValueError("evaluation beyond the profile's outer radius")
        rr = np.minimum(r, self.R)
        x, f, d = self.radii, self.values, self.derivs
        idx = np.clip(np.searchsorted(x, rr, side="right") - 1, 0, len(x) - 2)
        x0, x1 = x[idx], x[idx + 1]
        h = x1 - x0
        t = (rr - x0) / h
        t2 = t * t
        t3 = t2 * t
        val = (
            (2.0 * t3 - 3.0 * t2 + 1.0) * f[idx]
            + (t3 - 2.0 * t2 + t) * h * d[idx]
            + (-2.0 * t3 + 3.0 * t2) * f[idx + 1]
            + (t3 - t2) * h * d[idx + 1]
        )
        der = (
            (6.0 * t2 - 6.0 * t) * f[idx] / h
            + (3.0 * t2 - 4.0 * t + 1.0) * d[idx]
            + (6.0 * t - 6.0 * t2) * f[idx + 1] / h
            + (3.0 * t2 - 2.0 * t) * d[idx + 1]
        )
        below = rr < x[0]
        if np.any(below):
            # even quadratic through (x0, f0) with slope d0 there
            c = d[0] / (2.0 * x[0])
            val = np.where(below, f[0] + c * (rr * rr - x[0] * x[0]), val)
            der = np.where(below, 2.0 * c * rr, der)
        return val, der

    def evaluate(self, r: float) -> tuple[float, float]:
        val, der = self.evaluate_array(np.asarray([r]))
        return float(val[0]), float(der[0])


def profile_to_csv(profile: RadialProfile) -> str:
    lines = ["r,v,dv_dr"]
    for r, v, d in zip(profile.radii, profile.values, profile.derivs):
        lines.append(f"{r:.17G},{v:.17G},{d:.17G}")
    return "\n".join(lines) + "\n"


def profile_from_csv(text: str) -> RadialProfile:
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if rows[0] != "r,v,dv_dr":
        raise ValueError("unexpected profile CSV header")
    cols = [tuple(float(tok) for tok in ln.split(",")) for ln in rows[1:]]
    r, v, d = zip(*cols)
    return RadialProfile(r, v, d)


@dataclass(frozen=True)
class ShootResult:
    beta: float
    lam: float
    alpha: float
    v1: float
    dlambda_dbeta: float
    profile: RadialProfile
    variation_profile: RadialProfile


def _series_coeffs(cfg: ProblemConfig, beta: float, frozen: bool = False):
    """Taylor coefficients at r=0 for v, the first variation e, and the
    second variation w; all three share c2 = -e^beta/(2N)."""
    N = cfg.dim
    a2 = 0.5 * cfg.weight.a2pp  # a(r) = 1 + a2 r^2 + ...
    eb = math.exp(beta)
    c2 = -eb / (2.0 * N)
    den = 4.0 * (N + 2.0)
    if frozen:
        c4 = e4 = w4 = -eb * a2 / den
    else:
        c4 = -eb * (c2 + a2) / den
        e4 = -eb * (a2 + 2.0 * c2) / den
        w4 = -eb * (a2 + 4.0 * c2) / den
    return c2, c4, e4, w4


def series_start(cfg: ProblemConfig, beta: float):
    """(v, v', e, e') at r_start from the matched expansion."""
    c2, c4, e4, _ = _series_coeffs(cfg, beta)
    r = cfg.r_start
    r2 = r * r
    v0 = beta + c2 * r2 + c4 * r2 * r2
    dv0 = 2.0 * c2 * r + 4.0 * c4 * r2 * r
    e0 = 1.0 + c2 * r2 + e4 * r2 * r2
    de0 = 2.0 * c2 * r + 4.0 * e4 * r2 * r
    return v0, dv0, e0, de0


def _weight_fn(w: Weight):
    coeffs, tilt = w.coeffs, w.tilt
    if not coeffs and tilt == 0.0:
        return lambda r: 1.0

    def a_of(r):
        p = 1.0
        if coeffs:
            r2 = r * r
            q = r2
            for c in coeffs:
                p += c * q
                q *= r2
        if tilt != 0.0:
            p *= math.exp(tilt * r * r)
        if p <= 0.0:
            raise ValueError(f"weight {w.spec!r} nonpositive at r={r}")
        return p

    return a_of


def _check_beta(beta: float) -> None:
    if not BETA_MIN_GUARD <= beta <= BETA_MAX_GUARD:
        raise ValueError(f"beta={beta} outside guard range [{BETA_MIN_GUARD}, {BETA_MAX_GUARD}]")


def _rhs_ve(cfg: ProblemConfig, frozen: bool, beta: float):
    a_of = _weight_fn(cfg.weight)
    nm1 = float(cfg.dim - 1)
    if frozen:
        gb = math.exp(beta)

        def fun(r, y):
            g = a_of(r) * gb
            c = nm1 / r
            return [y[1], -c * y[1] - g, y[3], -c * y[3] - g]

        return fun

    def fun(r, y):
        g = a_of(r) * _exp(y[0])
        c = nm1 / r
        return [y[1], -c * y[1] - g, y[3], -c * y[3] - g * y[2]]

    return fun


def _rhs_vew(cfg: ProblemConfig, frozen: bool, beta: float):
    a_of = _weight_fn(cfg.weight)
    nm1 = float(cfg.dim - 1)
    if frozen:
        gb = math.exp(beta)

        def fun(r, y):
            g = a_of(r) * gb
            c = nm1 / r
            return [y[1], -c * y[1] - g, y[3], -c * y[3] - g, y[5], -c * y[5] - g]

        return fun

    def fun(r, y):
        g = a_of(r) * _exp(y[0])
        c = nm1 / r
        e = y[2]
        return [
            y[1],
            -c * y[1] - g,
            y[3],
            -c * y[3] - g * e,
            y[5],
            -c * y[5] - g * (e * e + y[4]),
        ]

    return fun


def _init_radius(cfg: ProblemConfig, beta: float) -> float:
    """Where the matched series is trustworthy: e^beta r^2/(2N) must be small.

    For large beta the boundary layer sits below r_start, so integration
    starts deeper; output radii are unaffected.
    """
    layer = 0.05 * math.sqrt(2.0 * cfg.dim) * math.exp(-0.5 * beta)
    return min(cfg.r_start, layer)


def _run(cfg: ProblemConfig, beta: float, nodes, second: bool = False,
         frozen: bool = False, collect: bool = False):
    """Integrate from the matched start through `nodes` (all >= r_start).

    Returns states aligned with nodes, or (states, xs, ys) when collecting
    accepted steps; collected steps below r_start are dropped.
    """
    r0 = _init_radius(cfg, beta)
    c2, c4, e4, w4 = _series_coeffs(cfg, beta, frozen=frozen)
    r2 = r0 * r0
    y0 = [
        beta + c2 * r2 + c4 * r2 * r2,
        2.0 * c2 * r0 + 4.0 * c4 * r2 * r0,
        1.0 + c2 * r2 + e4 * r2 * r2,
        2.0 * c2 * r0 + 4.0 * e4 * r2 * r0,
    ]
    if second:
        y0 += [c2 * r2 + w4 * r2 * r2, 2.0 * c2 * r0 + 4.0 * w4 * r2 * r0]
        fun = _rhs_vew(cfg, frozen, beta)
    else:
        fun = _rhs_ve(cfg, frozen, beta)

    prepend = None
    run_nodes = list(nodes)
    if run_nodes and run_nodes[0] <= r0 * (1.0 + 1e-12):
        # first node is the series start itself
        prepend = list(y0)
        run_nodes = run_nodes[1:]
    try:
        result = _stepper.solve(
            fun, r0, y0, run_nodes, cfg.rel_tol, cfg.abs_tol,
            first_step=0.2 * r0, collect=collect,
        )
    except ValueError as exc:
        # nonpositive weight hit while extending beyond r=1
        raise _stepper.IntegrationError(str(exc), float("nan")) from exc
    if collect:
        states, xs, ys = result
        keep = [i for i, x in enumerate(xs) if x >= cfg.r_start * (1.0 - 1e-12)]
        xs = [xs[i] for i in keep]
        ys = [ys[i] for i in keep]
        if prepend is not None:
            states = [prepend] + states
        return states, xs, ys
    if prepend is not None:
        result = [prepend] + result
    return result


def integrate_ivp(cfg: ProblemConfig, beta: float, radii=None, trace: bool = False) -> ShootResult:
    """Shoot v and its first variation jointly out to r = 1.

    With trace=True the profile is sampled at the integrator's accepted
    steps (cheap, used by curve tracing); otherwise at `radii` (default:
    the config's output grid).
    """
    _check_beta(beta)
    if trace:
        _, xs, ys = _run(cfg, beta, [1.0], collect=True)
        radii_arr = np.asarray(xs)
        states = np.asarray(ys)
    else:
        radii_arr = np.asarray(radii if radii is not None else default_grid(cfg))
        nodes = [float(x) for x in radii_arr]
        if nodes[0] < cfg.r_start * (1.0 - 1e-12):
            raise ValueError("output radii start below r_start")
        states = np.asarray(_run(cfg, beta, nodes))
    v1 = float(states[-1, 0])
    e1 = float(states[-1, 2])
    lam = math.exp(v1)
    profile = RadialProfile(radii_arr, states[:, 0], states[:, 1])
    variation = RadialProfile(radii_arr, states[:, 2], states[:, 3])
    return ShootResult(
        beta=beta,
        lam=lam,
        alpha=beta - v1,
        v1=v1,
        dlambda_dbeta=lam * e1,
        profile=profile,
        variation_profile=variation,
    )


def integrate_second_variation(cfg: ProblemConfig, beta: float, radii=None) -> RadialProfile:
    """Second beta-derivative of v, integrated jointly with v and e."""
    _check_beta(beta)
    radii_arr = np.asarray(radii if radii is not None else default_grid(cfg))
    nodes = [float(x) for x in radii_arr]
    out = _run(cfg, beta, nodes, second=True)
    states = np.asarray(out)
    return RadialProfile(radii_arr, states[:, 4], states[:, 5])


def second_variation_boundary(cfg: ProblemConfig, beta: float):
    """(lambda, v(1), e(1), w(1)) with w the second variation."""
    _check_beta(beta)
    out = _run(cfg, beta, [1.0], second=True)
    v1, _, e1, _, w1, _ = out[0]
    return math.exp(v1), v1, e1, w1


def lambda_second_derivative(cfg: ProblemConfig, beta: float) -> float:
    """d^2 lambda / d beta^2 = lambda (w(1) + e(1)^2)."""
    lam, _, e1, w1 = second_variation_boundary(cfg, beta)
    return lam * (w1 + e1 * e1)


def integrate_frozen(cfg: ProblemConfig, beta: float, radii=None):
    """Coefficient-frozen harness: all three right-hand sides become
    -a(r) e^beta, so v - beta, e - 1 and w solve identical problems.
    Returns the (v, e, w) profiles for that degenerate system."""
    _check_beta(beta)
    radii_arr = np.asarray(radii if radii is not None else default_grid(cfg))
    nodes = [float(x) for x in radii_arr]
    states = np.asarray(_run(cfg, beta, nodes, second=True, frozen=True))
    return (
        RadialProfile(radii_arr, states[:, 0], states[:, 1]),
        RadialProfile(radii_arr, states[:, 2], states[:, 3]),
        RadialProfile(radii_arr, states[:, 4], states[:, 5]),
    )


def singular_series_coefficient(cfg: ProblemConfig) -> float:
    """d2 in V = -2 log r + log 2(N-2) + d2 r^2 + ..."""
    N = cfg.dim
    return -(N - 2.0) * cfg.weight.a2pp / (4.0 * (N - 1.0))


def integrate_singular(cfg: ProblemConfig, radii=None):
    """Integrate the singular radial solution outward from its matched start.

    Returns (lambda_star, profile). Forward integration is stable here:
    perturbations of the -2 log r branch decay like r^{-s} with
    Re s > 0 reversed, i.e. both linearized modes decay as r grows.
    """
    N = cfg.dim
    r0 = cfg.r_start
    d2 = singular_series_coefficient(cfg)
    V0 = -2.0 * math.log(r0) + math.log(2.0 * (N - 2.0)) + d2 * r0 * r0
    dV0 = -2.0 / r0 + 2.0 * d2 * r0
    a_of = _weight_fn(cfg.weight)
    nm1 = float(N - 1)

    def fun(r, y):
        g = a_of(r) * _exp(y[0])
        return [y[1], -nm1 / r * y[1] - g]

    radii_arr = np.asarray(radii if radii is not None else default_grid(cfg))
    nodes = [float(x) for x in radii_arr]
    if abs(nodes[0] - r0) < 1e-15 * r0:
        out = _stepper.solve(fun, r0, [V0, dV0], nodes[1:], cfg.rel_tol, cfg.abs_tol,
                             first_step=0.2 * r0)
        states = np.asarray([[V0, dV0]] + out)
    else:
        states = np.asarray(
            _stepper.solve(fun, r0, [V0, dV0], nodes, cfg.rel_tol, cfg.abs_tol,
                           first_step=0.2 * r0)
        )
    lam_star = math.exp(float(states[-1, 0]))
    return lam_star, RadialProfile(radii_arr, states[:, 0], states[:, 1])


def explicit_lambda_h(dim: int, h: float) -> float:
    return 2.0 * (dim - 2.0) * math.exp(-h / (2.0 * dim))


def residual_Uh(dim: int, h: float, radii) -> float:
    """Max relative residual of the explicit singular pair on a grid.

    U_h = h/(2N) - 2 log r - h r^2/(2N) with weight a_h and
    lambda_h = 2(N-2) e^{-h/(2N)}; checks -Delta U_h = lambda_h a_h e^{U_h}.
    """
    if not 3 <= dim <= 10:
        raise ValueError(f"dimension {dim} outside [3, 10]")
    if h <= -2.0 * (dim - 2):
        raise ValueError(f"h={h} must exceed -2(N-2) = {-2.0 * (dim - 2)}")
    r = np.asarray(radii, dtype=float)
    if np.any(r < 1e-4) or np.any(r > 1.0):
        raise ValueError("grid must lie within [1e-4, 1]")
    N = float(dim)
    t = h / (2.0 * N)
    U = t - 2.0 * np.log(r) - t * r * r
    Up = -2.0 / r - 2.0 * t * r
    Upp = 2.0 / (r * r) - 2.0 * t
    lhs = -(Upp + (N - 1.0) / r * Up)
    a = (1.0 + h * r * r / (2.0 * (N - 2.0))) * np.exp(t * r * r)
    rhs = explicit_lambda_h(dim, h) * a * np.exp(U)
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


def _power_quad_segment(xa, ga, xb, gb, xc, gc, p, q, pw: int):
    """Integral over [p, q] of s^pw * (quadratic through the three g samples).

    Fitting only the smooth factor g and integrating the s^pw measure
    exactly keeps the scheme accurate on geometric grids near 0, where the
    full integrand varies like s^pw across a single cell.
    """
    f1 = (gb - ga) / (xb - xa)
    f2 = ((gc - gb) / (xc - xb) - f1) / (xc - xa)
    # monomial form A + B s + C s^2
    A = ga - f1 * xa + f2 * xa * xb
    B = f1 - f2 * (xa + xb)
    C = f2
    m0 = (q ** (pw + 1) - p ** (pw + 1)) / (pw + 1)
    m1 = (q ** (pw + 2) - p ** (pw + 2)) / (pw + 2)
    m2 = (q ** (pw + 3) - p ** (pw + 3)) / (pw + 3)
    return A * m0 + B * m1 + C * m2


def cumulative_power_integral(x, g, pw: int) -> np.ndarray:
    """Cumulative integral of s^pw g(s) from x[0], g sampled at x.

    Local quadratic fits of g, averaged left/right stencils in the
    interior; the power weight is integrated exactly."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 samples")
    dI = np.empty(n - 1)
    # stencil (i, i+1, i+2) integrated on [x_i, x_{i+1}]
    right = _power_quad_segment(x[:-2], g[:-2], x[1:-1], g[1:-1], x[2:], g[2:],
                                x[:-2], x[1:-1], pw)
    # stencil (i-1, i, i+1) integrated on [x_i, x_{i+1}]
    left = _power_quad_segment(x[:-2], g[:-2], x[1:-1], g[1:-1], x[2:], g[2:],
                               x[1:-1], x[2:], pw)
    dI[0] = right[0]
    dI[-1] = left[-1]
    dI[1:-1] = 0.5 * (left[:-1] + right[1:])
    out = np.empty(n)
    out[0] = 0.0
    np.cumsum(dI, out=out[1:])
    return out


def cumulative_integral(x, f) -> np.ndarray:
    return cumulative_power_integral(x, f, 0)


def _weight_arrays(w: Weight, r: np.ndarray):
    p = np.ones_like(r)
    dp = np.zeros_like(r)
    if w.coeffs:
        r2 = r * r
        q = np.ones_like(r)
        for i, c in enumerate(w.coeffs, start=1):
            dp += (2 * i) * c * q * r
            q = q * r2
            p += c * q
    if w.tilt != 0.0:
        e = np.exp(w.tilt * r * r)
        return p * e, (dp + 2.0 * w.tilt * r * p) * e
    return p, dp


def flux_residual(cfg: ProblemConfig, shoot: ShootResult) -> float:
    """Relative defect in -r^{N-1} v' = int_0^r s^{N-1} a e^v ds.

    The piece of the integral below r_start comes from the series start.
    """
    N = cfg.dim
    r = shoot.profile.radii
    v = shoot.profile.values
    dv = shoot.profile.derivs
    a, _ = _weight_arrays(cfg.weight, r)
    c2, _, _, _ = _series_coeffs(cfg, shoot.beta)
    a2 = 0.5 * cfg.weight.a2pp
    r0 = cfg.r_start
    eb = math.exp(shoot.beta)
    closure = eb * (r0 ** N / N + (a2 + c2) * r0 ** (N + 2) / (N + 2))
    F = closure + cumulative_power_integral(r, a * np.exp(v), N - 1)
    L = -(r ** (N - 1)) * dv
    denom = np.maximum(np.abs(L), np.abs(F))
    return float(np.max(np.abs(L - F) / denom))


def pohozaev_residual(cfg: ProblemConfig, shoot: ShootResult, mu: float) -> float:
    """Relative defect in the one-parameter Pohozaev identity on [r_start, 1].

    d/dr { r^N (v'^2/2 + a(e^v - 1)) + mu r^{N-1} v v' }
      = a'(e^v - 1) r^N
        + r^{N-1} [ N a (e^v - 1) - mu a v e^v + (mu + 1 - N/2) v'^2 ]

    holds pointwise for solutions of the shooting ODE; both sides are
    integrated over the profile's support and compared.
    """
    N = cfg.dim
    r = shoot.profile.radii
    v = shoot.profile.values
    dv = shoot.profile.derivs
    a, da = _weight_arrays(cfg.weight, r)
    ev = np.exp(v)
    T = r ** N * (0.5 * dv * dv + a * (ev - 1.0)) + mu * r ** (N - 1) * v * dv
    boundary = float(T[-1] - T[0])
    IA = float(cumulative_power_integral(r, da * (ev - 1.0), N)[-1])
    IB = float(
        cumulative_power_integral(
            r,
            N * a * (ev - 1.0) - mu * a * v * ev + (mu + 1.0 - 0.5 * N) * dv * dv,
            N - 1,
        )[-1]
    )
    scale = max(abs(boundary), abs(IA), abs(IB), 1e-300)
    return abs(boundary - IA - IB) / scale


@dataclass(frozen=True)
class AsymptoticDiagnostics:
    emden: RadialProfile            # w(t), t = -log r
    rescaled: RadialProfile | None  # v-hat on the window [0, 3], regular shoots only


def asymptotic_diagnostics(cfg: ProblemConfig, profile: RadialProfile, beta=None,
                           lam=None) -> AsymptoticDiagnostics:
    """Emden variable and the rescaled profile.

    w(t) = v + 2 log r - log 2(N-2) (independent of lambda in the shooting
    normalization); singular solutions have w -> 0 as t -> infinity. For
    regular shoots with beta >= 0 the rescaled profile
    v-hat(rho) = v(rho e^{-beta/2}) - beta is sampled on rho in (0, 3],
    using the series start below r_start and the weight's natural formula
    beyond r = 1 if the window requires it. beta=None means a singular
    profile (no rescaling); beta < 0 is an error (empty window).
    """
    N = cfg.dim
    r = profile.radii
    t = -np.log(r)[::-1]
    w = (profile.values + 2.0 * np.log(r) - math.log(2.0 * (N - 2.0)))[::-1]
    dwdt = -(r * profile.derivs + 2.0)[::-1]
    emden = RadialProfile(t, w, dwdt, R=float(t[-1]))

    if beta is None:
        return AsymptoticDiagnostics(emden=emden, rescaled=None)
    if beta < 0.0:
        raise ValueError("rescaling window is empty for beta < 0")

    rescaled = rescaled_profile(cfg, beta, r_max=3.0)
    return AsymptoticDiagnostics(emden=emden, rescaled=rescaled)


def rescaled_profile(cfg: ProblemConfig, beta: float, r_max: float = 3.0) -> RadialProfile:
    """v-hat(rho) = v(rho e^{-beta/2}) - beta on [r_start, r_max].

    The weight family is closed under the rescaling r -> c r, so v-hat is
    computed by shooting the rescaled equation (weight a(c rho), height 0)
    directly. That stays accurate uniformly in beta, including when the
    rescaling window maps below r_start or beyond r = 1 of the original
    problem; beyond r = 1 the weight's natural formula is used, guarded
    for positivity.
    """
    if beta < 0.0:
        raise ValueError("rescaling window is empty for beta < 0")
    w = cfg.weight
    c2 = math.exp(-beta)  # (e^{-beta/2})^2; only even powers of c appear
    scaled = Weight(
        spec=f"{w.spec}@rescaled",
        coeffs=tuple(ci * c2 ** i for i, ci in enumerate(w.coeffs, start=1)),
        tilt=w.tilt * c2,
    )
    cfg_hat = ProblemConfig(
        dim=cfg.dim, weight=scaled, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
        r_start=cfg.r_start, grid=cfg.grid,
    )
    radii = default_grid(cfg_hat, R=r_max)
    states = np.asarray(_run(cfg_hat, 0.0, [float(x) for x in radii]))
    return RadialProfile(radii, states[:, 0], states[:, 1], R=r_max)
