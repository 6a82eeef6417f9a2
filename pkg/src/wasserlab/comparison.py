"""Reference curves: distortion coefficients, comparison ODEs and the DC_N class."""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .entropy import generator

SERIES_CUTOFF = 1e-4


class ConjugatePointError(ValueError):
    """K theta^2 reaches N pi^2: the sine-type coefficient is infinite."""


@dataclass(frozen=True)
class DistortionQuery:
    K: float
    N: float
    theta: float
    t: float

    def __post_init__(self):
        if not self.N >= 1:
            raise ValueError("N must be at least 1")
        if not self.theta >= 0:
            raise ValueError("theta must be nonnegative")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError("t must lie in [0, 1]")


def sigma(K, N, theta, t):
    """sigma^{(t)}_{K,N}(theta), broadcasting over theta and t.

    sin(t a)/sin(a) with a = theta sqrt(K/N) for K > 0, sinh for K < 0 and t
    for K = 0 or N = inf; +inf once K theta^2 >= N pi^2.
    """
    theta, t = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(t, dtype=float))
    if K == 0 or np.isinf(N):
        return t.copy()
    if N <= 0:
        raise ValueError("sigma needs N > 0")
    a = theta * np.sqrt(abs(K) / N)
    small = a < SERIES_CUTOFF
    sign = 1.0 if K > 0 else -1.0
    out = np.array(t * (1.0 + sign * a * a * (1.0 - t * t) / 6.0), dtype=float, ndmin=1)
    big = np.atleast_1d(~small)
    a, t = np.atleast_1d(a), np.atleast_1d(t)
    if np.any(big):
        ab, tb = a[big], t[big]
        if K > 0:
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = np.sin(tb * ab) / np.sin(ab)
            vals = np.where(ab >= np.pi, np.inf, vals)
        else:
            vals = np.sinh(tb * ab) / np.sinh(ab)
        out[big] = vals
    return out.reshape(theta.shape)


def tau(K, N, theta, t):
    """tau^{(t)}_{K,N}(theta) = t^{1/N} sigma_{K,N-1}^{(t)}(theta)^{1-1/N}; t at N = 1."""
    theta, t = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(t, dtype=float))
    if N == 1:
        return t.copy()
    s = sigma(K, N - 1.0, theta, t)
    return t ** (1.0 / N) * s ** (1.0 - 1.0 / N)


def distortion_coefficients(q):
    """(sigma, tau) for a DistortionQuery; +inf marks the conjugate regime."""
    return float(sigma(q.K, q.N, q.theta, q.t)), float(tau(q.K, q.N, q.theta, q.t))


@dataclass(frozen=True)
class ComparisonProfiles:
    times: np.ndarray
    NmK: np.ndarray
    NmK_ode: np.ndarray
    HprimeK: np.ndarray
    blowup_time: float = None


def _rk4_linear(times, kappa, y0, substeps=64):
    """RK4 for N'' = -kappa N, sampled at the (sorted) times."""
    def f(y):
        return np.array([y[1], -kappa * y[0]])

    out = np.empty((len(times), 2))
    y = np.array(y0, dtype=float)
    t_prev = 0.0
    for i, t in enumerate(times):
        span = t - t_prev
        if span > 0:
            h = span / substeps
            for _ in range(substeps):
                k1 = f(y)
                k2 = f(y + 0.5 * h * k1)
                k3 = f(y + 0.5 * h * k2)
                k4 = f(y + h * k3)
                y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i] = y
        t_prev = t
    return out


def two_point_solution(K, m, theta, times, N0, N1):
    """Solve N'' = -(K theta^2/m) N, N(0) = N0, N(1) = N1 by RK4 shooting."""
    kappa = 0.0 if np.isinf(m) else K * theta**2 / m
    grid = np.unique(np.concatenate([[0.0, 1.0], np.asarray(times, dtype=float)]))
    a = _rk4_linear(grid, kappa, (1.0, 0.0))[:, 0]
    b = _rk4_linear(grid, kappa, (0.0, 1.0))[:, 0]
    if abs(b[-1]) < 1e-14:
        raise ConjugatePointError("two-point problem is singular")
    slope = (N1 - N0 * a[-1]) / b[-1]
    sol = N0 * a + slope * b
    return np.interp(times, grid, sol)


def riccati_profile(K, m, theta, times, h0, blowup=-1e8):
    """H'' + H'^2/m + K theta^2 = 0 with H'(times[0]) = h0, by adaptive RK.

    Samples after a finite-time blow-up to -inf are returned as -inf.
    """
    times = np.asarray(times, dtype=float)
    inv_m = 0.0 if np.isinf(m) else 1.0 / m
    kt = K * theta**2

    def rhs(_, y):
        return [-inv_m * y[0] ** 2 - kt]

    def hit(_, y):
        return y[0] - blowup

    hit.terminal = True
    hit.direction = -1
    if len(times) == 1 or times[-1] == times[0]:
        return np.full(times.shape, float(h0)), None
    sol = solve_ivp(rhs, (times[0], times[-1]), [float(h0)], method="DOP853", t_eval=times,
                    rtol=1e-11, atol=1e-13, events=hit)
    out = np.full(times.shape, -np.inf)
    out[: sol.y.shape[1]] = sol.y[0]
    t_blow = float(sol.t_events[0][0]) if sol.t_events[0].size else None
    return out, t_blow


def comparison_profiles(K, m, theta, times, boundary=None, h_initial=None):
    """Comparison entropy power N_{m,K} and Riccati profile H'_{m,K} on [0, 1].

    ``boundary`` = (N0, N1) gives N_{m,K} in closed form and by the two-point
    ODE; ``h_initial`` starts the Riccati profile at times[0].
    """
    times = np.asarray(times, dtype=float)
    if K > 0 and not np.isinf(m) and K * theta**2 >= m * np.pi**2:
        raise ConjugatePointError(f"K theta^2 = {K * theta**2:.6g} >= m pi^2")
    nmk = nmk_ode = hprime = None
    t_blow = None
    if boundary is not None:
        N0, N1 = boundary
        nmk = sigma(K, m, theta, 1.0 - times) * N0 + sigma(K, m, theta, times) * N1
        nmk_ode = two_point_solution(K, m, theta, times, N0, N1)
    if h_initial is not None:
        hprime, t_blow = riccati_profile(K, m, theta, times, h_initial)
    return ComparisonProfiles(times, nmk, nmk_ode, hprime, t_blow)


@dataclass(frozen=True)
class DCNClassification:
    generator: str
    N: float
    member: bool
    conditions: dict
    ratio_infimum: float
    diagnostics: dict = field(default_factory=dict)


def _holds(values, scale, tol):
    return bool(np.all(values >= -tol * scale))


def dcn_classify(gen, N, probe=None, tol=1e-10):
    """Evaluate the four DC_N conditions on a log-spaced probe grid.

    (a) r p1'(r) >= (1 - 1/N) p1(r), with p1' by finite differences in log r
    (b) p2(r) + p1(r)/N >= 0
    (c) r -> p1(r)/r^{1-1/N} is nondecreasing
    (d) delta -> delta^N e(delta^{-N}) is convex (s -> e^s e(e^{-s}) for N = inf)

    All four must agree.  Also returns inf_{r>0} p1(r)/r^{1-1/N}, i.e. K_{N,U}/K.
    """
    gen = generator(gen)
    N = float(N)
    r = np.logspace(-6, 6, 2001) if probe is None else np.asarray(probe, dtype=float)
    q = 1.0 - 1.0 / N
    p1 = gen.p1(r)

    d = 1e-3
    rp1 = (gen.p1(r * np.exp(-2 * d)) - 8 * gen.p1(r * np.exp(-d))
           + 8 * gen.p1(r * np.exp(d)) - gen.p1(r * np.exp(2 * d))) / (12 * d)
    cond_a = _holds(rp1 - q * p1, np.abs(rp1) + np.abs(p1), tol)

    p2 = gen.p2(r)
    cond_b = _holds(p2 + p1 / N, np.abs(p2) + np.abs(p1) / N, tol)

    ratio = p1 / r**q
    dr = np.diff(ratio)
    cond_c = _holds(dr, np.maximum(np.abs(ratio[1:]), np.abs(ratio[:-1])), tol)

    if np.isinf(N):
        # N = inf limit: s -> e^s e(e^{-s}) is convex
        delta = np.sort(-np.log(r))
        u = np.exp(delta) * gen.e(np.exp(-delta))
    else:
        delta = np.sort(r ** (-1.0 / N))
        u = delta**N * gen.e(delta ** (-N))
    slope = np.diff(u) / np.diff(delta)
    ds = np.diff(slope)
    cond_d = _holds(ds, np.abs(slope[1:]) + np.abs(slope[:-1]), tol)

    conditions = {"a": cond_a, "b": cond_b, "c": cond_c, "d": cond_d}
    if len(set(conditions.values())) != 1:
        raise ValueError(f"DC_N conditions disagree for {gen.name}, N = {N:g}: {conditions}")

    # infimum over r > 0: follow power-law trends past the probe ends
    logr = np.log(r)
    inf = float(ratio.min())
    positive = np.all(ratio > 0)
    if positive:
        lr = np.log(ratio)
        left = (lr[1] - lr[0]) / (logr[1] - logr[0])
        right = (lr[-1] - lr[-2]) / (logr[-1] - logr[-2])
        if left > 1e-8 or right < -1e-8:
            inf = 0.0
    # the ratio read as a convex function of r (recorded, not part of the verdict)
    rs = np.diff(ratio) / np.diff(r)
    convex = _holds(np.diff(rs), np.abs(rs[1:]) + np.abs(rs[:-1]), tol)
    return DCNClassification(gen.name, N, cond_a, conditions, inf,
                             {"ratio_convex": convex, "probe": (float(r[0]), float(r[-1]))})
