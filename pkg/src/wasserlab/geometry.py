"""Model weighted manifolds and the radial differential operators on them.

Every model is reduced to a single coordinate ``r`` (or ``x`` on the line).
A radial function f(r) has gradient f' along the unit radial direction and
Hessian eigenvalues f'' (radial) and c(r) f' (the n-1 tangential
directions), where c = cot, coth or 0 depending on the model.  The volume
density is omega(r) = sin^{n-1} r, sinh^{n-1} r or 1, and the reference
measure is mu = omega e^{-V} dr.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

KINDS = ("line", "weighted_line", "sphere_radial", "hyperbolic_radial")


@dataclass(frozen=True)
class Grid:
    a: float
    b: float
    size: int
    periodic: bool = False

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 16:
            raise ValueError(f"grid needs at least 16 nodes, got {self.size}")
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.b <= self.a:
            raise ValueError(f"invalid grid interval [{self.a}, {self.b}]")

    @property
    def h(self):
        n = self.size if self.periodic else self.size - 1
        return (self.b - self.a) / n

    @property
    def x(self):
        return self.a + self.h * np.arange(self.size)

    def trapezoid_weights(self):
        w = np.full(self.size, self.h)
        if not self.periodic:
            w[0] = w[-1] = 0.5 * self.h
        return w


class Potential:
    """Potential V with analytic first and second derivatives."""

    def __init__(self, name, value, d1, d2, params=None):
        self.name = name
        self._v, self._d1, self._d2 = value, d1, d2
        self.params = dict(params or {})

    def __call__(self, x):
        return self._v(np.asarray(x, dtype=float))

    def d1(self, x):
        return self._d1(np.asarray(x, dtype=float))

    def d2(self, x):
        return self._d2(np.asarray(x, dtype=float))

    @property
    def is_constant(self):
        return self.name == "zero"

    @classmethod
    def zero(cls):
        z = np.zeros_like
        return cls("zero", z, z, z)

    @classmethod
    def quadratic(cls, k=1.0, center=0.0):
        return cls(
            "quadratic",
            lambda x: 0.5 * k * (x - center) ** 2,
            lambda x: k * (x - center),
            lambda x: np.full_like(x, float(k)),
            {"k": k, "center": center},
        )

    @classmethod
    def quartic(cls, a=1.0, b=0.0):
        # V = a x^4/4 + b x^2/2
        return cls(
            "quartic",
            lambda x: a * x**4 / 4 + b * x**2 / 2,
            lambda x: a * x**3 + b * x,
            lambda x: 3 * a * x**2 + b,
            {"a": a, "b": b},
        )

    @classmethod
    def cosine(cls, amplitude=1.0, frequency=1.0):
        A, w = amplitude, frequency
        return cls(
            "cosine",
            lambda x: A * np.cos(w * x),
            lambda x: -A * w * np.sin(w * x),
            lambda x: -A * w * w * np.cos(w * x),
            {"amplitude": A, "frequency": w},
        )

    @classmethod
    def table(cls, x, values):
        x = np.asarray(x, dtype=float)
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError("potential table contains non-finite samples")
        if np.ptp(values) == 0.0:
            return cls.zero() if values[0] == 0.0 else cls(
                "constant", lambda y: np.full_like(y, values[0]), np.zeros_like, np.zeros_like)
        s = CubicSpline(x, values)
        return cls("table", s, s.derivative(1), s.derivative(2))

    @classmethod
    def from_descriptor(cls, desc, grid=None):
        if desc is None:
            return cls.zero()
        if isinstance(desc, str):
            desc = {"preset": desc}
        desc = dict(desc)
        preset = desc.pop("preset", None)
        if preset in (None, "zero", "none"):
            return cls.zero()
        if preset == "quadratic":
            return cls.quadratic(**desc)
        if preset == "quartic":
            return cls.quartic(**desc)
        if preset == "cosine":
            return cls.cosine(**desc)
        if preset == "table":
            if "x" in desc:
                return cls.table(desc["x"], desc["values"])
            if grid is None:
                raise ValueError("potential table without coordinates needs a grid")
            return cls.table(grid.x, desc["values"])
        raise ValueError(f"unknown potential preset {preset!r}")


@dataclass(frozen=True)
class ManifoldModel:
    kind: str
    n: int
    grid: Grid
    potential_fn: Potential = field(default_factory=Potential.zero, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("dimension n must be a positive integer")
        if self.kind in ("line", "weighted_line") and self.n != 1:
            raise ValueError(f"{self.kind} models are one-dimensional")
        a, b = self.grid.a, self.grid.b
        if self.kind == "sphere_radial" and not (0.0 < a and b < np.pi):
            raise ValueError("sphere_radial domain must lie strictly inside (0, pi)")
        if self.kind == "hyperbolic_radial" and not a > 0.0:
            raise ValueError("hyperbolic_radial domain must lie inside (0, inf)")
        if self.kind != "weighted_line" and not self.potential_fn.is_constant:
            raise ValueError("only weighted_line models carry a potential")
        v = self.potential_fn(self.grid.x)
        if not np.all(np.isfinite(v)):
            raise ValueError("potential is not finite on the grid")

    # pointwise model functions, valid at any coordinate in the domain
    def c(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "sphere_radial":
            return 1.0 / np.tan(x)
        if self.kind == "hyperbolic_radial":
            return 1.0 / np.tanh(x)
        return np.zeros_like(x)

    def omega(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "sphere_radial":
            return np.sin(x) ** (self.n - 1)
        if self.kind == "hyperbolic_radial":
            return np.sinh(x) ** (self.n - 1)
        return np.ones_like(x)

    def V(self, x):
        return self.potential_fn(x)

    def dV(self, x):
        return self.potential_fn.d1(x)

    def d2V(self, x):
        return self.potential_fn.d2(x)

    def measure_density(self, x):
        """omega e^{-V}: density of mu with respect to dr."""
        return self.omega(x) * np.exp(-self.V(x))

    @property
    def ric(self):
        """Ricci curvature in the radial direction (constant on every model)."""
        if self.kind == "sphere_radial":
            return float(self.n - 1)
        if self.kind == "hyperbolic_radial":
            return -float(self.n - 1)
        return 0.0

    @property
    def has_potential(self):
        return not self.potential_fn.is_constant

    # grid fields
    @property
    def x(self):
        return self.grid.x

    @property
    def volume_density(self):
        return self.omega(self.grid.x)

    @property
    def potential(self):
        return self.V(self.grid.x)

    @property
    def mu_weights(self):
        """Trapezoid quadrature weights for integrals against mu."""
        return self.grid.trapezoid_weights() * self.measure_density(self.grid.x)

    def integrate(self, values):
        return float(np.dot(self.mu_weights, values))

    def field(self, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (self.grid.size,):
            raise ValueError(f"field of shape {values.shape} does not match grid size {self.grid.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite values")
        return values


@dataclass(frozen=True)
class BakryEmeryParams:
    m: float
    K: float = 0.0
    p: float = 2.0
    N: float = 2.0

    def __post_init__(self):
        if not self.N >= 1:
            raise ValueError("N must be at least 1")

    def validate(self, model, renyi=False):
        if self.m < model.n:
            raise ValueError(f"m = {self.m} is below the dimension n = {model.n}")
        if self.m == model.n and model.has_potential:
            raise ValueError("m = n requires a constant potential")
        if renyi and self.p < 1.0 - 1.0 / self.m:
            raise ValueError(f"Renyi exponent p = {self.p} is below 1 - 1/m")
        return self

    def with_K(self, K):
        return BakryEmeryParams(self.m, K, self.p, self.N)


def build_model(desc):
    """Build a ManifoldModel from a descriptor dictionary.

    Keys: kind, n (default 1), domain [a, b], size, periodic, potential.
    """
    desc = dict(desc)
    kind = desc.get("kind", "line")
    a, b = desc.get("domain", (-10.0, 10.0))
    grid = Grid(float(a), float(b), int(desc.get("size", 2048)), bool(desc.get("periodic", False)))
    pot = Potential.from_descriptor(desc.get("potential"), grid)
    return ManifoldModel(kind, int(desc.get("n", 1)), grid, pot)


def derivatives(values, h, periodic=False):
    """First and second derivatives on a uniform grid.

    Fourth-order central stencils in the interior, second-order one-sided
    stencils at the two outermost nodes on each side.
    """
    f = np.asarray(values, dtype=float)
    if periodic:
        fp1, fm1 = np.roll(f, -1), np.roll(f, 1)
        fp2, fm2 = np.roll(f, -2), np.roll(f, 2)
        d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
        d2 = (-fm2 + 16 * fm1 - 30 * f + 16 * fp1 - fp2) / (12 * h * h)
        return d1, d2
    if f.size < 5:
        raise ValueError("need at least 5 nodes to differentiate")
    d1 = np.empty_like(f)
    d2 = np.empty_like(f)
    d1[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d2[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)
    d1[1] = (f[2] - f[0]) / (2 * h)
    d1[-2] = (f[-1] - f[-3]) / (2 * h)
    d2[1] = (f[0] - 2 * f[1] + f[2]) / (h * h)
    d2[-2] = (f[-3] - 2 * f[-2] + f[-1]) / (h * h)
    d1[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    d1[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    d2[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h)
    d2[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / (h * h)
    return d1, d2


def grid_derivatives(model, f):
    return derivatives(model.field(f), model.grid.h, model.grid.periodic)


# Pointwise operators on radial functions, given (x, f', f'').

def laplacian(model, x, d1, d2):
    return d2 + (model.n - 1) * model.c(x) * d1


def witten(model, x, d1, d2):
    return laplacian(model, x, d1, d2) - model.dV(x) * d1


def hessian_norm_sq(model, x, d1, d2):
    return d2**2 + (model.n - 1) * (model.c(x) * d1) ** 2


def ricci_L(model, x):
    return model.ric + model.d2V(x)


def ricci_mn(model, x, m):
    x = np.asarray(x, dtype=float)
    out = model.ric + np.zeros_like(x)
    if not model.has_potential:
        return out
    out = out + model.d2V(x)
    if np.isfinite(m):
        if m <= model.n:
            raise ValueError("m = n with a non-constant potential")
        out = out - model.dV(x) ** 2 / (m - model.n)
    return out


def gamma2(model, x, d1, d2):
    """Bochner form of Gamma_2(phi, phi) = |Hess phi|^2 + Ric(L)(grad phi, grad phi)."""
    return hessian_norm_sq(model, x, d1, d2) + ricci_L(model, x) * d1**2


def traceless_hessian_sq(model, x, d1, d2):
    """|Hess phi - (Delta phi / n) g|^2."""
    lap = laplacian(model, x, d1, d2)
    n = model.n
    return (d2 - lap / n) ** 2 + (n - 1) * (model.c(x) * d1 - lap / n) ** 2


@dataclass(frozen=True)
class HessianDecomposition:
    hess_minus_g_over_t: np.ndarray
    laplacian: np.ndarray
    witten: np.ndarray
    drift: np.ndarray
    traceless: np.ndarray
    cross: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray


def decompose(model, x, d1, d2, t, m):
    """Split |Hess phi - g/t|^2 into trace, potential, cross and traceless parts.

    The identity

        |Hess phi - g/t|^2 = (1/m)(L phi - m/t)^2 - (1/(m-n))(V'phi' + (m-n)/t)^2
                             + ((m-n)/(mn))(L phi + (m/(m-n)) V'phi')^2
                             + |Hess phi - (Delta phi/n) g|^2

    holds for finite m > n; for m = n the two middle terms are absent and for
    m = inf they reduce to the limits of each term.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    n = model.n
    x = np.asarray(x, dtype=float)
    lap = laplacian(model, x, d1, d2)
    L = lap - model.dV(x) * d1
    drift = model.dV(x) * d1
    traceless = traceless_hessian_sq(model, x, d1, d2)
    c = model.c(x)
    hg = (d2 - 1 / t) ** 2 + (n - 1) * (c * d1 - 1 / t) ** 2
    if np.isinf(m):
        # limits: (1/m)(.)^2 -> 0, the potential term -> -(drift^2 + 2 drift (m-n)/t ...)
        # is not well defined separately; use the m = inf form (Delta phi - n/t)^2 / n
        cross = lap**2
        rhs = (lap - n / t) ** 2 / n + traceless
    elif m == n:
        cross = np.zeros_like(x)
        rhs = (L - m / t) ** 2 / m + traceless
    else:
        k = m - n
        cross = (L + (m / k) * drift) ** 2
        rhs = (L - m / t) ** 2 / m - (drift + k / t) ** 2 / k + (k / (m * n)) * cross + traceless
    return HessianDecomposition(hg, lap, L, drift, traceless, cross, rhs, hg - rhs)


# Grid operators.

def apply_witten_laplacian(model, f):
    d1, d2 = grid_derivatives(model, f)
    out = witten(model, model.x, d1, d2)
    if not np.all(np.isfinite(out)):
        raise ValueError("Witten Laplacian produced non-finite values")
    return out


def curvature_profile(model, params):
    x = model.x
    ric = np.full(x.shape, model.ric)
    return ric, ricci_mn(model, x, params.m)


def gamma2_field(model, phi, params=None):
    d1, d2 = grid_derivatives(model, phi)
    out = gamma2(model, model.x, d1, d2)
    if not np.all(np.isfinite(out)):
        raise ValueError("Gamma_2 produced non-finite values")
    return out


def gamma2_direct(model, phi):
    """Gamma_2 as (1/2) L|grad phi|^2 - <grad phi, grad L phi> by repeated differencing."""
    d1, _ = grid_derivatives(model, phi)
    Lphi = apply_witten_laplacian(model, phi)
    dL, _ = grid_derivatives(model, Lphi)
    return 0.5 * apply_witten_laplacian(model, d1**2) - d1 * dL


def hessian_decomposition(model, phi, t, params):
    d1, d2 = grid_derivatives(model, phi)
    return decompose(model, model.x, d1, d2, t, params.m)
