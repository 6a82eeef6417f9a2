"""Endpoint density and phase presets.

A density preset describes the law of the coordinate r with respect to dr
(written q).  The density with respect to the model measure mu is
rho = q / (omega e^{-V}).  Presets expose pdf, cdf, sf and ppf so that the
closed-form engine can build monotone maps without grid integration.
"""

import numpy as np
from scipy import special, stats

TAIL = 1e-9

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _invert(cdf, sf, pdf, target, upper, lo, hi, tol=1e-14, maxiter=200):
    """Vectorized bracketed Newton solve of cdf(x) = target (or sf(x) = target
    where ``upper`` is set), so that tiny tail masses keep their relative
    accuracy.
    """
    target = np.asarray(target, dtype=float)
    upper = np.broadcast_to(np.asarray(upper, dtype=bool), target.shape)
    a = np.full(target.shape, float(lo))
    b = np.full(target.shape, float(hi))
    x = 0.5 * (a + b)

    def g(y):
        return np.where(upper, target - sf(y), cdf(y) - target)

    for _ in range(maxiter):
        gx = g(x)
        a = np.where(gx < 0, x, a)
        b = np.where(gx >= 0, x, b)
        d = pdf(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = gx / d
        xn = x - step
        bad = ~np.isfinite(xn) | (xn <= a) | (xn >= b)
        xn = np.where(bad, 0.5 * (a + b), xn)
        done = np.abs(xn - x) <= tol * (1.0 + np.abs(x))
        x = xn
        if np.all(done):
            break
    return x


class Preset:
    name = "preset"
    # True when the density is bounded away from zero on a compact support,
    # so the exact support can serve as the source interval.
    solid_support = False

    def support(self):
        return -np.inf, np.inf

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        upper = u > 0.5
        return self._solve(np.where(upper, 1.0 - u, u), upper)

    def isf(self, v):
        v = np.asarray(v, dtype=float)
        upper = v <= 0.5
        return self._solve(np.where(upper, v, 1.0 - v), upper)

    def _solve(self, target, upper):
        raise NotImplementedError

    def transport(self, source, x):
        """Monotone rearrangement T = Q_self^{-1} o Q_source, accurate in both tails."""
        c = np.asarray(source.cdf(x), dtype=float)
        s = np.asarray(source.sf(x), dtype=float)
        upper = s < c
        return self._solve(np.where(upper, s, c), upper)

    def source_interval(self, eps=TAIL):
        if self.solid_support:
            return self.support()
        return float(self.ppf(eps)), float(self.ppf(1.0 - eps))

    def describe(self):
        return {"preset": self.name}


class Gaussian(Preset):
    name = "gaussian"

    def __init__(self, mean=0.0, std=1.0):
        if not std > 0:
            raise ValueError("gaussian std must be positive")
        self.mean, self.std = float(mean), float(std)
        self._d = stats.norm(self.mean, self.std)

    def pdf(self, x):
        return self._d.pdf(x)

    def cdf(self, x):
        return self._d.cdf(x)

    def sf(self, x):
        return self._d.sf(x)

    def _solve(self, target, upper):
        return np.where(upper, self._d.isf(target), self._d.ppf(target))

    def describe(self):
        return {"preset": self.name, "mean": self.mean, "std": self.std}


class Uniform(Preset):
    name = "uniform"
    solid_support = True

    def __init__(self, a=0.0, b=1.0):
        if not b > a:
            raise ValueError("uniform needs a < b")
        self.a, self.b = float(a), float(b)

    def support(self):
        return self.a, self.b

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.a) & (x <= self.b), 1.0 / (self.b - self.a), 0.0)

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.a) / (self.b - self.a), 0.0, 1.0)

    def sf(self, x):
        return np.clip((self.b - np.asarray(x, dtype=float)) / (self.b - self.a), 0.0, 1.0)

    def _solve(self, target, upper):
        span = self.b - self.a
        return np.where(upper, self.b - target * span, self.a + target * span)

    def describe(self):
        return {"preset": self.name, "a": self.a, "b": self.b}


def _bump_kernel(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def _bump_partial(s):
    """Integral of the bump kernel over (-1, s), by Gauss-Legendre on [-1, s]."""
    s = np.clip(np.asarray(s, dtype=float), -1.0, 1.0)
    half = 0.5 * (s + 1.0)
    nodes = -1.0 + half[..., None] * (_GL_NODES + 1.0)
    return half * (_bump_kernel(nodes) @ _GL_WEIGHTS)


class Bump(Preset):
    """Smooth compactly supported bump exp(-1/(1-s^2)), s = (x - center)/width."""

    name = "bump"

    def __init__(self, center=0.0, width=1.0):
        if not width > 0:
            raise ValueError("bump width must be positive")
        self.center, self.width = float(center), float(width)
        # split at 0 so each half is integrated on a short interval
        self._half = float(_bump_partial(0.0))
        self._mass = 2.0 * self._half

    def support(self):
        return self.center - self.width, self.center + self.width

    def _s(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.width

    def pdf(self, x):
        return _bump_kernel(self._s(x)) / (self._mass * self.width)

    def _lower(self, s):
        # mass of (-1, s) for s <= 0, computed directly; symmetric otherwise
        s = np.asarray(s, dtype=float)
        left = _bump_partial(np.minimum(s, 0.0))
        right = self._mass - _bump_partial(-np.maximum(s, 0.0))
        return np.where(s <= 0, left, right) / self._mass

    def cdf(self, x):
        return self._lower(self._s(x))

    def sf(self, x):
        return self._lower(-self._s(x))

    def _solve(self, target, upper):
        lo, hi = self.support()
        return _invert(self.cdf, self.sf, self.pdf, target, upper, lo, hi)

    def describe(self):
        return {"preset": self.name, "center": self.center, "width": self.width}


class Mixture(Preset):
    """Finite Gaussian mixture."""

    name = "mixture"

    def __init__(self, components):
        w = np.array([float(c.get("weight", 1.0)) for c in components])
        if w.size == 0 or np.any(w <= 0):
            raise ValueError("mixture needs positive component weights")
        self.weights = w / w.sum()
        self.means = np.array([float(c.get("mean", 0.0)) for c in components])
        self.stds = np.array([float(c.get("std", 1.0)) for c in components])
        if np.any(self.stds <= 0):
            raise ValueError("mixture stds must be positive")

    def _z(self, x):
        return (np.asarray(x, dtype=float)[..., None] - self.means) / self.stds

    def pdf(self, x):
        return (stats.norm.pdf(self._z(x)) / self.stds) @ self.weights

    def cdf(self, x):
        return special.ndtr(self._z(x)) @ self.weights

    def sf(self, x):
        return special.ndtr(-self._z(x)) @ self.weights

    def _solve(self, target, upper):
        lo = float(np.min(self.means - 40 * self.stds))
        hi = float(np.max(self.means + 40 * self.stds))
        return _invert(self.cdf, self.sf, self.pdf, target, upper, lo, hi)

    def describe(self):
        comps = [{"weight": float(w), "mean": float(m), "std": float(s)}
                 for w, m, s in zip(self.weights, self.means, self.stds)]
        return {"preset": self.name, "components": comps}


def density_preset(desc):
    """Preset from a descriptor such as {"preset": "gaussian", "mean": 0, "std": 1}.

    Returns None for table descriptors, which only the grid engines accept.
    """
    desc = dict(desc)
    name = desc.pop("preset", None)
    if name == "gaussian":
        return Gaussian(**desc)
    if name == "uniform":
        return Uniform(**desc)
    if name == "bump":
        return Bump(**desc)
    if name == "mixture":
        return Mixture(desc["components"])
    if name == "table":
        return None
    raise ValueError(f"unknown density preset {name!r}")


def density_on_grid(model, desc):
    """Density with respect to mu sampled on the model grid."""
    desc = dict(desc)
    if desc.get("preset") == "table":
        values = np.asarray(desc["values"], dtype=float)
        return model.field(values)
    q = density_preset(desc).pdf(model.x)
    return model.field(q / model.measure_density(model.x))


def phase_on_grid(model, desc):
    """Initial phase for the Hopf-Lax engine.

    Presets: quadratic (phi = a x^2/2 + b x + c, optionally about a center),
    zero, table.
    """
    desc = dict(desc)
    name = desc.pop("preset", "quadratic")
    x = model.x
    if name == "zero":
        return np.zeros_like(x)
    if name == "quadratic":
        a = float(desc.get("a", 0.0))
        b = float(desc.get("b", 0.0))
        c = float(desc.get("c", 0.0))
        x0 = float(desc.get("center", 0.0))
        y = x - x0
        return a * y * y / 2 + b * y + c
    if name == "table":
        return model.field(np.asarray(desc["values"], dtype=float))
    raise ValueError(f"unknown phase preset {name!r}")
