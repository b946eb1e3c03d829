"""Dormand-Prince 5(4) stepping with the 4th-order continuous extension.

Only the single-step kernel lives here; step-size control, guards and
event handling belong to the caller.
"""

import numpy as np

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th- and embedded 4th-order weights (7 stages, FSAL)
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# dense output: y(t + x*dt) = y + dt * K.T @ (P @ [x, x^2, x^3, x^4])
P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

ORDER = 5


def step(fun, t, y, f, dt):
    """One Dormand-Prince step from ``(t, y)`` with ``f = fun(t, y)``.

    Returns ``(y_new, f_new, err, K)`` where ``err`` is the raw local error
    vector and ``K`` the 7 stage derivatives. Exceptions raised by ``fun``
    propagate unchanged.
    """
    K = np.empty((7, y.size))
    K[0] = f
    for s in range(1, 6):
        K[s] = fun(t + C[s] * dt, y + dt * (A[s] @ K[:s]))
    y_new = y + dt * (B @ K[:6])
    K[6] = fun(t + dt, y_new)
    err = dt * (E @ K)
    return y_new, K[6], err, K


def dense(y, dt, K, x):
    """Evaluate the continuous extension at fraction ``x`` of the step."""
    powers = np.array([x, x * x, x ** 3, x ** 4])
    return y + dt * (K.T @ (P @ powers))
