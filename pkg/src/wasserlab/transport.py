"""Wasserstein geodesics on the radial models.

Two engines build a GeodesicPath.  The monotone (quantile) engine couples
the endpoints by monotone rearrangement in the coordinate and moves mass
along the straight lines F_t(x) = x + (t - t0) v(x).  The Hopf-Lax engine
starts from an initial phase, evolves it by inf-convolution and transports
the density along the characteristics.

Besides the Eulerian fields on the model grid, every path keeps a
Lagrangian frame: the source nodes with their density, quadrature weights
and velocity.  Integrals along the path are then taken over the moving
nodes F_t(x_j) with weights w_j J_t(x_j), which needs no differentiation
of the transported density.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .densities import TAIL, density_preset
from .geometry import BakryEmeryParams, Grid, ManifoldModel, derivatives


def simpson_weights(size, h):
    """Composite Simpson weights; a 3/8 panel closes an even node count."""
    if size < 4:
        raise ValueError("need at least 4 nodes")
    w = np.zeros(size)
    n = size if size % 2 == 1 else size - 3
    w[:n:2] += 2.0
    w[1:n:2] = 4.0
    w[0] = w[n - 1] = 1.0
    w[:n] *= h / 3.0
    if n < size:
        w[n - 1] += 3.0 * h / 8.0
        w[n:] = 3.0 * h / 8.0 * np.array([3.0, 3.0, 1.0])
    return w


@dataclass(frozen=True)
class TransportMap:
    source_grid: Grid
    map_values: np.ndarray
    map_derivative: np.ndarray
    source_density: np.ndarray = field(repr=False)
    source_weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        if np.any(self.map_derivative < 0):
            raise ValueError("transport map is not monotone")

    @property
    def x(self):
        return self.source_grid.x


@dataclass(frozen=True)
class Slice:
    """One time sample as quadrature nodes: positions, mu-weights, rho, phi', phi''."""

    t: float
    x: np.ndarray
    w: np.ndarray
    rho: np.ndarray
    dphi: np.ndarray
    d2phi: np.ndarray

    def integrate(self, values):
        return float(np.dot(self.w, values))

    @property
    def mass(self):
        return self.integrate(self.rho)


@dataclass(frozen=True)
class LagrangianFrame:
    """Source nodes x_j moving as F_t(x) = x + (t - t0) v(x)."""

    x: np.ndarray
    rho0: np.ndarray
    weights: np.ndarray
    velocity: np.ndarray
    dvelocity: np.ndarray
    t0: float

    def positions(self, t):
        return self.x + (t - self.t0) * self.velocity

    def stretch(self, t):
        """dF_t/dx."""
        return 1.0 + (t - self.t0) * self.dvelocity

    def volume_jacobian(self, model, t):
        y = self.positions(t)
        return self.stretch(t) * model.omega(y) / model.omega(self.x)

    def jacobian(self, model, t):
        """Jacobian with respect to mu: rho0(x) = rho_t(F_t x) J_t(x)."""
        y = self.positions(t)
        return self.volume_jacobian(model, t) * np.exp(model.V(self.x) - model.V(y))

    def slice(self, model, t):
        J = self.jacobian(model, t)
        if np.any(J <= 0):
            raise ValueError(f"Jacobian is not positive at t = {t:g}")
        return Slice(t, self.positions(t), self.weights * J, self.rho0 / J,
                     self.velocity, self.dvelocity / self.stretch(t))


@dataclass(frozen=True)
class GeodesicPath:
    model: ManifoldModel
    params: BakryEmeryParams
    times: np.ndarray
    densities: np.ndarray
    phases: np.ndarray
    jacobians: np.ndarray
    theta: float
    engine: str = "quantile"
    window: tuple = (0.0, 1.0)
    frame: LagrangianFrame = field(default=None, repr=False)
    representation: str = "lagrangian"

    @property
    def duration(self):
        return self.window[1] - self.window[0]

    @property
    def normalized_times(self):
        return (self.times - self.window[0]) / self.duration

    def slice(self, k, representation=None):
        rep = representation or self.representation
        if rep == "lagrangian" and self.frame is not None:
            return self.frame.slice(self.model, self.times[k])
        if rep not in ("lagrangian", "eulerian"):
            raise ValueError(f"unknown representation {rep!r}")
        m = self.model
        d1, d2 = derivatives(self.phases[k], m.grid.h, m.grid.periodic)
        return Slice(self.times[k], m.x, m.mu_weights, self.densities[k], d1, d2)

    def slices(self, representation=None):
        return [self.slice(k, representation) for k in range(len(self.times))]

    def with_representation(self, representation):
        return GeodesicPath(self.model, self.params, self.times, self.densities, self.phases,
                            self.jacobians, self.theta, self.engine, self.window, self.frame,
                            representation)

    def support_mask(self, threshold=1e-10):
        """Grid nodes where some density of the path is non-negligible."""
        peak = self.densities.max(axis=1, keepdims=True)
        return np.any(self.densities > threshold * peak, axis=0)

    def support_points(self):
        """Coordinates covered by the path (Lagrangian nodes if available)."""
        if self.frame is not None:
            return np.concatenate([self.frame.positions(t) for t in self.times])
        return self.model.x[self.support_mask()]


def _check_inside(model, values, what):
    if np.any(values <= model.grid.a) or np.any(values >= model.grid.b):
        raise ValueError(f"{what} leaves the model domain [{model.grid.a}, {model.grid.b}]")


def _mass_check(model, rho, tol=1e-4):
    mass = model.integrate(rho)
    if abs(mass - 1.0) > tol:
        raise ValueError(f"density mass {mass:.8f} differs from 1")
    if np.any(rho < 0):
        raise ValueError("density is negative somewhere")


def monotone_map(model, rho0, rho1, tail=TAIL):
    """Monotone rearrangement between two densities sampled on the model grid.

    Cumulative masses by the trapezoid rule, inverted by piecewise-linear
    interpolation; the source nodes are the grid nodes whose cumulative
    mass lies in [tail, 1 - tail].
    """
    rho0, rho1 = model.field(rho0), model.field(rho1)
    _mass_check(model, rho0)
    _mass_check(model, rho1)
    x = model.x
    dens = model.measure_density(x)
    q0, q1 = rho0 * dens, rho1 * dens
    h = model.grid.h
    G0 = np.concatenate([[0.0], np.cumsum(0.5 * h * (q0[1:] + q0[:-1]))])
    G1 = np.concatenate([[0.0], np.cumsum(0.5 * h * (q1[1:] + q1[:-1]))])
    G0 /= G0[-1]
    G1 /= G1[-1]
    for q, name in ((q0, "rho0"), (q1, "rho1")):
        peak = q.max()
        if q[0] > 1e-8 * peak or q[-1] > 1e-8 * peak:
            raise ValueError(f"{name} support touches the domain boundary")
    keep = (G0 >= tail) & (G0 <= 1.0 - tail) & (q0 > 0)
    idx = np.flatnonzero(keep)
    idx = np.arange(idx[0], idx[-1] + 1)
    xs = x[idx]
    # strictly increasing part of G1 for the inverse
    inc = np.concatenate([[True], np.diff(G1) > 0])
    T = np.interp(G0[idx], G1[inc], x[inc])
    q1T = np.interp(T, x, q1)
    if np.any(q1T <= 0):
        raise ValueError("target density vanishes inside the transported range")
    dT = q0[idx] / q1T
    grid = Grid(float(xs[0]), float(xs[-1]), len(xs))
    weights = grid.trapezoid_weights() * dens[idx]
    return TransportMap(grid, T, dT, rho0[idx], weights)


def closed_form_map(model, pre0, pre1, size=None, tail=TAIL):
    """Monotone map between two density presets using their exact quantiles."""
    if isinstance(pre0, dict):
        pre0 = density_preset(pre0)
    if isinstance(pre1, dict):
        pre1 = density_preset(pre1)
    size = size or model.grid.size
    size += 1 - size % 2
    lo, hi = pre0.source_interval(tail)
    grid = Grid(lo, hi, size)
    xs = grid.x
    T = pre1.transport(pre0, xs)
    q0, q1T = pre0.pdf(xs), pre1.pdf(T)
    dT = q0 / q1T
    _check_inside(model, xs, "source support")
    _check_inside(model, T, "target support")
    dens = model.measure_density(xs)
    weights = simpson_weights(size, grid.h) * dens
    return TransportMap(grid, T, dT, q0 / dens, weights)


def _spline(y, values, x):
    return CubicSpline(y, values)(x)


def eulerian_fields(model, y, rho, dphi, d2phi):
    """Grid density, phase and phase gradient from values at moving nodes y.

    The phase gradient is extended affinely outside [y_0, y_last]; the phase is
    integrated from the left boundary (phi = 0 there) with the end-corrected
    trapezoid rule.
    """
    x = model.x
    inside = (x >= y[0]) & (x <= y[-1])
    rho_g = np.zeros_like(x)
    dphi_g = np.empty_like(x)
    d2_g = np.empty_like(x)
    xi = x[inside]
    if xi.size:
        rho_g[inside] = np.maximum(_spline(y, rho, xi), 0.0)
        dphi_g[inside] = _spline(y, dphi, xi)
        d2_g[inside] = _spline(y, d2phi, xi)
    left, right = x < y[0], x > y[-1]
    dphi_g[left] = dphi[0] + (x[left] - y[0]) * d2phi[0]
    d2_g[left] = d2phi[0]
    dphi_g[right] = dphi[-1] + (x[right] - y[-1]) * d2phi[-1]
    d2_g[right] = d2phi[-1]
    h = model.grid.h
    steps = 0.5 * h * (dphi_g[1:] + dphi_g[:-1]) - h * h / 12.0 * (d2_g[1:] - d2_g[:-1])
    phi = np.concatenate([[0.0], np.cumsum(steps)])
    return rho_g, phi, dphi_g


def _path_from_frame(model, params, times, frame, engine, window, theta):
    dens, phases, jacs = [], [], []
    for t in times:
        y = frame.positions(t)
        if np.any(np.diff(y) <= 0):
            raise ValueError(f"F_t is not monotone at t = {t:g}")
        _check_inside(model, y[[0, -1]], "F_t")
        J = frame.jacobian(model, t)
        if np.any(J <= 0):
            raise ValueError(f"J_t <= 0 at t = {t:g}")
        rho, phi, _ = eulerian_fields(model, y, frame.rho0 / J, frame.velocity,
                                      frame.dvelocity / frame.stretch(t))
        dens.append(rho)
        phases.append(phi)
        jacs.append(J)
    return GeodesicPath(model, params, np.asarray(times, dtype=float), np.array(dens),
                        np.array(phases), np.array(jacs), float(theta), engine,
                        tuple(float(w) for w in window), frame)


def _window(times, window):
    times = np.asarray(times, dtype=float)
    if window is None:
        window = (0.0, 1.0)
    t0, t1 = window
    if not t1 > t0:
        raise ValueError("time window must have positive length")
    if np.any(times < t0 - 1e-12) or np.any(times > t1 + 1e-12):
        raise ValueError("times outside the time window")
    return times, (float(t0), float(t1))


def interpolate_path(model, tmap, rho0=None, times=None, params=None, window=None,
                     engine="quantile"):
    """Displacement interpolation along the straight lines of the map.

    ``times`` lie in ``window`` (default [0, 1]); the geodesic parameter is the
    affine rescaling of the window onto [0, 1], so the velocity is
    (T(x) - x)/(t1 - t0).
    """
    if times is None:
        times = np.linspace(0.0, 1.0, 65)
    times, window = _window(times, window)
    params = params or BakryEmeryParams(m=max(model.n, 1))
    duration = window[1] - window[0]
    xs = tmap.x
    src = tmap.source_density
    if rho0 is not None:
        src = np.interp(xs, model.x, model.field(rho0))
    v = (tmap.map_values - xs) / duration
    dv = (tmap.map_derivative - 1.0) / duration
    frame = LagrangianFrame(xs, src, tmap.source_weights, v, dv, window[0])
    theta = np.sqrt(np.dot(tmap.source_weights * src, (tmap.map_values - xs) ** 2))
    return _path_from_frame(model, params, times, frame, engine, window, theta)


def recover_phase(model, tmap, t):
    """Phase at geodesic time t in [0, 1], with phi_t(left boundary) = 0."""
    xs = tmap.x
    F = xs + t * (tmap.map_values - xs)
    dF = 1.0 + t * (tmap.map_derivative - 1.0)
    if np.any(np.diff(F) <= 0) or np.any(dF <= 0):
        raise ValueError(f"F_t is not monotone at t = {t:g}")
    v = tmap.map_values - xs
    _, phi, _ = eulerian_fields(model, F, np.zeros_like(F), v, (tmap.map_derivative - 1.0) / dF)
    return phi


def hopf_lax_phase(model, phi0, s):
    """inf_y phi0(y) + |x - y|^2 / 2s over the grid nodes, refined by a parabola."""
    phi0 = model.field(phi0)
    x = model.x
    if s == 0:
        return phi0.copy()
    out = np.empty_like(x)
    G = x.size
    h = model.grid.h
    chunk = max(1, int(4_000_000 // G))
    for start in range(0, G, chunk):
        xi = x[start:start + chunk]
        cost = phi0[None, :] + (xi[:, None] - x[None, :]) ** 2 / (2 * s)
        j = np.argmin(cost, axis=1)
        rows = np.arange(xi.size)
        best = cost[rows, j]
        inner = (j > 0) & (j < G - 1)
        jc = np.clip(j, 1, G - 2)
        fm, f0, fp = cost[rows, jc - 1], cost[rows, jc], cost[rows, jc + 1]
        curv = fm - 2 * f0 + fp
        ok = inner & (curv > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            refined = f0 - (fp - fm) ** 2 / (8 * curv)
        best = np.where(ok, np.minimum(best, refined), best)
        out[start:start + chunk] = best
    return out


def hopf_lax_evolve(model, phi0, rho0, times, params=None, window=None, threshold=1e-12):
    """Hopf-Lax phases and characteristic transport from (phi0, rho0) at times[0].

    The evolution time of sample t is s = t - times[0].  Raises if the
    characteristics cross before the last time.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    if window is None:
        window = (times[0], times[-1])
    times, window = _window(times, window)
    params = params or BakryEmeryParams(m=max(model.n, 1))
    phi0, rho0 = model.field(phi0), model.field(rho0)
    _mass_check(model, rho0)
    d1, d2 = derivatives(phi0, model.grid.h, model.grid.periodic)
    keep = rho0 > threshold * rho0.max()
    idx = np.flatnonzero(keep)
    idx = np.arange(idx[0], idx[-1] + 1)
    xs = model.x[idx]
    s_max = times[-1] - times[0]
    dv = d2[idx]
    if np.any(1.0 + s_max * dv <= 0):
        caustic = float(np.min(-1.0 / dv[dv < 0]))
        raise ValueError(f"characteristics cross at evolution time {caustic:.6g} "
                         f"before the final time {s_max:.6g}")
    weights = model.grid.trapezoid_weights()[idx] * model.measure_density(xs)
    frame = LagrangianFrame(xs, rho0[idx], weights, d1[idx], dv, times[0])
    path = _path_from_frame(model, params, times, frame, "hopf_lax", window, 0.0)
    phases = np.array([hopf_lax_phase(model, phi0, t - times[0]) for t in times])
    duration = window[1] - window[0]
    theta = duration * np.sqrt(np.dot(weights * rho0[idx], d1[idx] ** 2))
    return GeodesicPath(model, params, times, path.densities, phases, path.jacobians, theta,
                        "hopf_lax", window, frame, "eulerian")


def hamilton_jacobi_residual(path, interior=0.1):
    """|d_t phi + phi'^2/2| on grid nodes inside the transported support.

    Returns (times, residual array, mask) for the interior time samples.
    """
    m = path.model
    t = path.times
    from .entropy import fd1

    dt = np.apply_along_axis(fd1, 0, path.phases, t, True)
    res = np.empty_like(path.phases)
    for k in range(len(t)):
        d1, _ = derivatives(path.phases[k], m.grid.h, m.grid.periodic)
        res[k] = np.abs(dt[k] + 0.5 * d1**2)
    mask = np.zeros_like(path.phases, dtype=bool)
    for k in range(len(t)):
        y = path.frame.positions(t[k]) if path.frame is not None else m.x[path.densities[k] > 0]
        span = y[-1] - y[0]
        mask[k] = (m.x >= y[0] + interior * span) & (m.x <= y[-1] - interior * span)
    return t, res, mask


def wasserstein_speed(path, representation=None, rtol=1e-3):
    """Kinetic energy per sample and theta = W2 between the window endpoints."""
    if len(path.times) < 2:
        raise ValueError("need at least two time samples")
    energy = np.array([s.integrate(s.dphi**2 * s.rho) for s in path.slices(representation)])
    mean = energy.mean()
    theta = path.duration * np.sqrt(mean)
    if mean > 0 and np.max(np.abs(energy - mean)) > rtol * mean:
        warnings.warn("kinetic energy is not constant along the path", RuntimeWarning)
    return float(theta), energy


def model_gaussian_path(n, times, grid, params=None, tail=TAIL):
    """The exact pair rho = exp(-x^2/4t^2)/(4 pi t^2)^{1/2}, phi = x^2/2t on the line."""
    if n != 1:
        raise NotImplementedError("only the one-dimensional model path is available")
    times = np.asarray(times, dtype=float)
    if np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise ValueError("times must be positive and increasing")
    model = ManifoldModel("line", 1, grid)
    params = params or BakryEmeryParams(m=1)
    x = model.x
    t0, t1 = float(times[0]), float(times[-1])
    std = np.sqrt(2.0) * times
    from scipy.stats import norm
    lo, hi = norm.ppf(tail / 2) * std[-1], norm.isf(tail / 2) * std[-1]
    if lo <= grid.a or hi >= grid.b:
        raise ValueError("grid does not hold the model mass at the final time")
    src = density_preset({"preset": "gaussian", "mean": 0.0, "std": std[0]})
    size = grid.size + 1 - grid.size % 2
    a, b = src.source_interval(tail)
    sg = Grid(a, b, size)
    xs = sg.x
    frame = LagrangianFrame(xs, src.pdf(xs), simpson_weights(size, sg.h), xs / t0,
                            np.full(size, 1.0 / t0), t0)
    dens = np.array([np.exp(-x**2 / (4 * t**2)) / np.sqrt(4 * np.pi * t**2) for t in times])
    phases = np.array([x**2 / (2 * t) for t in times])
    jacs = np.array([frame.jacobian(model, t) for t in times])
    # W2 between the Gaussians at t0 and t1
    theta = abs(std[-1] - std[0])
    return GeodesicPath(model, params, times, dens, phases, jacs, theta, "model",
                        (t0, t1), frame)
