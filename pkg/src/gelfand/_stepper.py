"""Adaptive Dormand-Prince 5(4) integrator with PI step control.

Shared by the radial shooting routines and the Pruefer phase integration.
Kept deliberately small and deterministic: plain float lists, no events,
output nodes are hit exactly by clamping the step. The embedded 4th order
solution is used only for the error estimate (local extrapolation).
"""

from __future__ import annotations

from math import sqrt


class IntegrationError(RuntimeError):
    """Step size underflow or step budget exhausted.

    Carries the independent-variable value reached so callers can report
    how far the integration got before failing.
    """

    def __init__(self, message: str, reached: float):
        super().__init__(message)
        self.reached = reached


# Butcher tableau, Dormand & Prince RK5(4)7M.
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# y5 - y4 error weights (b - bhat)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0
_MAX_STEPS = 2_000_000


def solve(fun, x0, y0, nodes, rtol, atol, first_step=None, collect=False):
    """Integrate y' = fun(x, y) from x0 through each node in `nodes`.

    nodes must be strictly increasing with nodes[0] > x0. Returns the list
    of states at the nodes; with collect=True returns (node_states, xs, ys)
    where xs/ys are every accepted step point including x0 and all nodes.
    """
    n = len(y0)
    x = x0
    y = list(y0)
    k1 = fun(x, y)
    span = nodes[-1] - x0
    if first_step is None:
        h = 1e-2 * span
    else:
        h = first_step
    h = min(h, span)

    out = []
    xs = [x0] if collect else None
    ys = [list(y0)] if collect else None
    err_prev = 1.0
    nsteps = 0

    for target in nodes:
        while x < target:
            if nsteps > _MAX_STEPS:
                raise IntegrationError("step budget exhausted", x)
            clamped = h >= target - x
            if clamped:
                h_try = target - x
            else:
                h_try = h
            if x + h_try == x:
                raise IntegrationError("step size underflow", x)

            k2 = fun(x + _C2 * h_try, [y[i] + h_try * _A21 * k1[i] for i in range(n)])
            k3 = fun(
                x + _C3 * h_try,
                [y[i] + h_try * (_A31 * k1[i] + _A32 * k2[i]) for i in range(n)],
            )
            k4 = fun(
                x + _C4 * h_try,
                [y[i] + h_try * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i]) for i in range(n)],
            )
            k5 = fun(
                x + _C5 * h_try,
                [
                    y[i] + h_try * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
                    for i in range(n)
                ],
            )
            k6 = fun(
                x + h_try,
                [
                    y[i]
                    + h_try
                    * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i])
                    for i in range(n)
                ],
            )
            ynew = [
                y[i]
                + h_try * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i])
                for i in range(n)
            ]
            k7 = fun(x + h_try, ynew)

            err = 0.0
            for i in range(n):
                sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
                e = h_try * (
                    _E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i]
                )
                e /= sc
                err += e * e
            err = sqrt(err / n)
            nsteps += 1

            if err <= 1.0:
                x = x + h_try if not clamped else target
                y = ynew
                k1 = k7
                if collect:
                    xs.append(x)
                    ys.append(list(y))
                if err == 0.0:
                    fac = _MAX_FACTOR
                else:
                    fac = _SAFETY * err ** (-_PI_ALPHA) * err_prev ** (_PI_BETA)
                    fac = min(_MAX_FACTOR, max(_MIN_FACTOR, fac))
                err_prev = max(err, 1e-10)
                if clamped:
                    # node-hitting step: don't let the short segment drag
                    # the controller's preferred step down
                    h = max(h, h_try * fac)
                else:
                    h = h_try * fac
            else:
                fac = max(_MIN_FACTOR, _SAFETY * err ** (-_PI_ALPHA))
                h = h_try * fac
        out.append(list(y))
    if collect:
        return out, xs, ys
    return out
