"""Entropy functionals along a geodesic and their time derivatives.

Each functional is available on a density sampled on the model grid and on
a path Slice (quadrature nodes with mu-weights).  The analytic first and
second derivatives along the geodesic follow from the continuity equation:

    d/dt  int e(rho) dmu = -int L phi p1(rho) dmu
    d2/dt2 int e(rho) dmu = int Gamma_2(phi) p1(rho) dmu + int (L phi)^2 p2(rho) dmu

with p1(r) = r e'(r) - e(r) and p2(r) = r p1'(r) - p1(r).
"""

import re
from dataclasses import dataclass, field

import numpy as np

from .geometry import derivatives, gamma2, ricci_mn, witten
from .transport import Slice

FLOOR = 1e-300


@dataclass(frozen=True)
class EntropyGenerator:
    name: str
    e: callable = field(repr=False)
    p1: callable = field(repr=False)
    p2: callable = field(repr=False)
    exponent: float = None  # p for the power family, 1 for r log r

    def __call__(self, r):
        return self.e(r)


def power(p):
    """e(r) = r^p/(p-1), with p1 = r^p and p2 = (p-1) r^p."""
    p = float(p)
    if p == 1.0:
        return xlogx()
    return EntropyGenerator(f"power({p:g})", lambda r: r**p / (p - 1), lambda r: r**p,
                            lambda r: (p - 1) * r**p, p)


def xlogx():
    return EntropyGenerator("xlogx", lambda r: r * np.log(r), lambda r: r,
                            lambda r: 0.0 * r, 1.0)


def sturm(N):
    """e(r) = -N r^{1-1/N}, so that U = N S_N."""
    gen = power(1.0 - 1.0 / float(N))
    return EntropyGenerator(f"sturm({float(N):g})", gen.e, gen.p1, gen.p2, gen.exponent)


def generator(desc):
    """Generator from a name such as 'xlogx', 'power(1.5)' or 'sturm(3)'."""
    if isinstance(desc, EntropyGenerator):
        return desc
    desc = str(desc).replace(" ", "")
    if desc == "xlogx":
        return xlogx()
    match = re.fullmatch(r"(power|sturm)\(([-+0-9.eE/]+)\)", desc)
    if not match:
        raise ValueError(f"unknown generator {desc!r}")
    num, _, den = match.group(2).partition("/")
    value = float(num) / (float(den) if den else 1.0)
    return power(value) if match.group(1) == "power" else sturm(value)


def generator_consistency(gen, probe=None):
    """Largest relative mismatch between (p1, p2) and their definitions from e.

    Derivatives are taken by the complex step, which is exact to rounding.
    """
    r = np.logspace(-6, 6, 2001) if probe is None else np.asarray(probe, dtype=float)
    h = 1e-20 * r
    de = np.imag(gen.e(r + 1j * h)) / h
    p1 = r * de - gen.e(r)
    dp1 = np.imag(gen.p1(r + 1j * h)) / h
    p2 = r * dp1 - gen.p1(r)
    scale1 = np.abs(gen.p1(r)) + np.abs(r * de) + 1e-300
    scale2 = np.abs(gen.p2(r)) + np.abs(r * dp1) + 1e-300
    err1 = np.abs(p1 - gen.p1(r)) / scale1
    err2 = np.abs(p2 - gen.p2(r)) / scale2
    return float(max(err1.max(), err2.max()))


# quadrature kernels on (weights, rho)

def _entropy(w, rho):
    pos = rho > FLOOR
    return -float(np.dot(w[pos], rho[pos] * np.log(rho[pos])))


def _log_power_integral(w, rho, p):
    pos = rho > FLOOR
    top = rho[pos].max()
    if p <= 0 and not np.all(pos):
        raise ValueError(f"integral of rho^{p:g} diverges on the support boundary")
    return float(np.log(np.dot(w[pos], (rho[pos] / top) ** p)) + p * np.log(top))


def _renyi(w, rho, p):
    if p == 1.0:
        return _entropy(w, rho)
    return _log_power_integral(w, rho, p) / (1.0 - p)


def _gamma_weights(w, rho, p):
    pos = rho > FLOOR
    g = np.zeros_like(rho)
    top = rho[pos].max()
    g[pos] = w[pos] * (rho[pos] / top) ** p
    return g / g.sum()


def _sn(w, rho, N):
    pos = rho > FLOOR
    return -float(np.dot(w[pos], rho[pos] ** (1.0 - 1.0 / N)))


def _apply(fn, rho):
    out = np.zeros_like(rho)
    pos = rho > FLOOR
    out[pos] = fn(rho[pos])
    return out


def _mass_ok(model, rho, tol=1e-4):
    mass = model.integrate(rho)
    if abs(mass - 1.0) > tol:
        raise ValueError(f"density is not normalized (mass {mass:.8f})")


def shannon_entropy(model, rho):
    rho = model.field(rho)
    _mass_ok(model, rho)
    return _entropy(model.mu_weights, rho)


def renyi_entropy(model, rho, p):
    """(1/(1-p)) log int rho^p dmu; p = 1 returns the Shannon limit."""
    rho = model.field(rho)
    return _renyi(model.mu_weights, rho, float(p))


def sn_functional(model, rho, N):
    if not N >= 1:
        raise ValueError("N must be at least 1")
    return _sn(model.mu_weights, model.field(rho), float(N))


def sn_entropy_gap(model, rho, N):
    """N (1 + S_N(rho)) written without cancellation, for large N."""
    w, rho = model.mu_weights, model.field(rho)
    pos = rho > FLOOR
    mass = float(np.dot(w, rho))
    body = -float(np.dot(w[pos], rho[pos] * np.expm1(-np.log(rho[pos]) / N)))
    return N * (1.0 - mass) + N * body


def fisher_information(model, rho, phi, p=2.0):
    """(I, I_p) for a density and phase sampled on the model grid."""
    rho, phi = model.field(rho), model.field(phi)
    d1, d2 = derivatives(phi, model.grid.h, model.grid.periodic)
    return slice_fisher(Slice(0.0, model.x, model.mu_weights, rho, d1, d2), model, p)


def slice_fisher(s, model, p=2.0):
    L = witten(model, s.x, s.dphi, s.d2phi)
    g = _gamma_weights(s.w, s.rho, p)
    return s.integrate(L * s.rho), float(np.dot(g, L))


def slice_dissipation(s, model, gen):
    L = witten(model, s.x, s.dphi, s.d2phi)
    G2 = gamma2(model, s.x, s.dphi, s.d2phi)
    p1 = _apply(gen.p1, s.rho)
    p2 = _apply(gen.p2, s.rho)
    return -s.integrate(L * p1), s.integrate(G2 * p1) + s.integrate(L**2 * p2)


def generalized_dissipation(model, path, gen, k, representation=None):
    """Analytic (dU/dt, d2U/dt2) of U = int e(rho) dmu at sample k."""
    return slice_dissipation(path.slice(k, representation), model, generator(gen))


def _uniform_step(t):
    t = np.asarray(t, dtype=float)
    h = np.diff(t)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("finite differences need a uniform time grid")
    return float(h[0])


def fd1(f, t, richardson=False):
    """First time derivative: central in the interior, one-sided at the ends.

    Second order by default; ``richardson`` switches to the fourth-order
    stencils (the extrapolated combination of steps h and 2h).
    """
    h = _uniform_step(t)
    f = np.asarray(f, dtype=float)
    if not richardson:
        return np.gradient(f, h, edge_order=2)
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    for i, sign in ((0, 1), (-1, -1)):
        g = f if sign == 1 else f[::-1]
        e0 = (-25 * g[0] + 48 * g[1] - 36 * g[2] + 16 * g[3] - 3 * g[4]) / (12 * h)
        e1 = (-3 * g[0] - 10 * g[1] + 18 * g[2] - 6 * g[3] + g[4]) / (12 * h)
        if sign == 1:
            d[0], d[1] = e0, e1
        else:
            d[-1], d[-2] = -e0, -e1
    return d


def fd2(f, t, richardson=False):
    """Second time derivative: central in the interior, one-sided at the ends.

    The default interior stencil is the 3-point one; the end nodes use the
    5-point one-sided stencil so their error stays below the interior one.
    ``richardson`` switches to fourth-order stencils throughout.
    """
    h = _uniform_step(t)
    f = np.asarray(f, dtype=float)
    d = np.empty_like(f)
    if not richardson:
        d[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
        for g, i in ((f, 0), (f[::-1], -1)):
            d[i] = (35 * g[0] - 104 * g[1] + 114 * g[2] - 56 * g[3] + 11 * g[4]) / (12 * h**2)
        return d
    d[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h**2)
    for g, i, j in ((f, 0, 1), (f[::-1], -1, -2)):
        d[i] = (45 * g[0] - 154 * g[1] + 214 * g[2] - 156 * g[3] + 61 * g[4] - 10 * g[5]) / (12 * h**2)
        d[j] = (10 * g[0] - 15 * g[1] - 4 * g[2] + 14 * g[3] - 6 * g[4] + g[5]) / (12 * h**2)
    return d


@dataclass(frozen=True)
class EntropySeries:
    times: np.ndarray
    m: float
    p: float
    N: float
    H: np.ndarray
    Ent: np.ndarray
    Hp: np.ndarray
    SN: np.ndarray
    Nm: np.ndarray
    Nmp: np.ndarray
    I: np.ndarray
    Ip: np.ndarray
    var_gamma: np.ndarray
    dH: np.ndarray
    d2H: np.ndarray
    dHp: np.ndarray
    d2Hp: np.ndarray
    dSN: np.ndarray
    d2SN: np.ndarray
    # analytic companions
    gamma2_rho: np.ndarray
    gamma2_gamma: np.ndarray
    d2Hp_analytic: np.ndarray
    dSN_analytic: np.ndarray
    d2SN_analytic: np.ndarray
    kinetic: np.ndarray
    kinetic_gamma: np.ndarray
    kinetic_sn: np.ndarray
    var_rho: np.ndarray
    L2_rho: np.ndarray
    ricmn_rho: np.ndarray
    ricmn_gamma: np.ndarray
    mass: np.ndarray
    U: dict = field(default_factory=dict)
    dU: dict = field(default_factory=dict)
    d2U: dict = field(default_factory=dict)
    U1: dict = field(default_factory=dict)
    U2: dict = field(default_factory=dict)
    window: tuple = (0.0, 1.0)

    @property
    def duration(self):
        return self.window[1] - self.window[0]

    def columns(self):
        """Flat name -> array mapping for CSV export."""
        cols = {}
        for name in ("times", "H", "Ent", "Hp", "SN", "Nm", "Nmp", "I", "Ip", "var_gamma",
                     "dH", "d2H", "dHp", "d2Hp", "dSN", "d2SN", "gamma2_rho", "gamma2_gamma",
                     "d2Hp_analytic", "dSN_analytic", "d2SN_analytic", "kinetic",
                     "kinetic_gamma", "kinetic_sn", "var_rho", "L2_rho", "ricmn_rho",
                     "ricmn_gamma", "mass"):
            cols[name] = getattr(self, name)
        for key in self.U:
            cols[f"U[{key}]"] = self.U[key]
            cols[f"dU[{key}]"] = self.dU[key]
            cols[f"d2U[{key}]"] = self.d2U[key]
            cols[f"U1[{key}]"] = self.U1[key]
            cols[f"U2[{key}]"] = self.U2[key]
        return cols


def build_series(model, path, params, generators=(), representation=None, richardson=False):
    """Evaluate every functional along the path and differentiate in time."""
    t = path.times
    if len(t) < 5:
        raise ValueError("need at least 5 time samples")
    m, p, N = float(params.m), float(params.p), float(params.N)
    gens = [generator(g) for g in generators]
    rows = {k: [] for k in ("H", "Hp", "SN", "I", "Ip", "var_gamma", "gamma2_rho",
                            "gamma2_gamma", "kinetic", "kinetic_gamma", "kinetic_sn", "var_rho",
                            "L2_rho", "ricmn_rho", "ricmn_gamma", "L2_sn", "g2_sn", "L_sn",
                            "mass")}
    U = {g.name: [] for g in gens}
    U1 = {g.name: [] for g in gens}
    U2 = {g.name: [] for g in gens}
    q = 1.0 - 1.0 / N
    for s in path.slices(representation):
        w, rho = s.w, s.rho
        L = witten(model, s.x, s.dphi, s.d2phi)
        G2 = gamma2(model, s.x, s.dphi, s.d2phi)
        kin = s.dphi**2
        ric = ricci_mn(model, s.x, m) * kin
        g = _gamma_weights(w, rho, p)
        I = s.integrate(L * rho)
        Ip = float(np.dot(g, L))
        rq = _apply(lambda r: r**q, rho)
        rows["H"].append(_entropy(w, rho))
        rows["Hp"].append(_renyi(w, rho, p))
        rows["SN"].append(-s.integrate(rq))
        rows["I"].append(I)
        rows["Ip"].append(Ip)
        rows["var_gamma"].append(float(np.dot(g, (L - Ip) ** 2)))
        rows["gamma2_rho"].append(s.integrate(G2 * rho))
        rows["gamma2_gamma"].append(float(np.dot(g, G2)))
        rows["kinetic"].append(s.integrate(kin * rho))
        rows["kinetic_gamma"].append(float(np.dot(g, kin)))
        rows["kinetic_sn"].append(s.integrate(kin * rq))
        rows["var_rho"].append(s.integrate((L - I) ** 2 * rho))
        rows["L2_rho"].append(s.integrate(L**2 * rho))
        rows["ricmn_rho"].append(s.integrate(ric * rho))
        rows["ricmn_gamma"].append(float(np.dot(g, ric)))
        rows["L_sn"].append(s.integrate(L * rq))
        rows["g2_sn"].append(s.integrate(G2 * rq))
        rows["L2_sn"].append(s.integrate(L**2 * rq))
        rows["mass"].append(s.mass)
        for gen in gens:
            U[gen.name].append(s.integrate(_apply(gen.e, rho)))
            u1, u2 = slice_dissipation(s, model, gen)
            U1[gen.name].append(u1)
            U2[gen.name].append(u2)
    r = {k: np.array(v) for k, v in rows.items()}
    H, Hp, SN = r["H"], r["Hp"], r["SN"]
    inv_m = 0.0 if np.isinf(m) else 1.0 / m
    U = {k: np.array(v) for k, v in U.items()}
    return EntropySeries(
        times=t, m=m, p=p, N=N, H=H, Ent=-H, Hp=Hp, SN=SN,
        Nm=np.exp(H * inv_m), Nmp=np.exp(Hp * inv_m),
        I=r["I"], Ip=r["Ip"], var_gamma=r["var_gamma"],
        dH=fd1(H, t, richardson), d2H=fd2(H, t, richardson),
        dHp=fd1(Hp, t, richardson), d2Hp=fd2(Hp, t, richardson),
        dSN=fd1(SN, t, richardson), d2SN=fd2(SN, t, richardson),
        gamma2_rho=r["gamma2_rho"], gamma2_gamma=r["gamma2_gamma"],
        d2Hp_analytic=-r["gamma2_gamma"] - (p - 1.0) * r["var_gamma"],
        # U = N S_N for e = r^q/(q-1): p1 = r^q, p2 = -r^q/N
        dSN_analytic=-r["L_sn"] / N,
        d2SN_analytic=(r["g2_sn"] - r["L2_sn"] / N) / N,
        kinetic=r["kinetic"], kinetic_gamma=r["kinetic_gamma"], kinetic_sn=r["kinetic_sn"],
        var_rho=r["var_rho"], L2_rho=r["L2_rho"], ricmn_rho=r["ricmn_rho"],
        ricmn_gamma=r["ricmn_gamma"], mass=r["mass"],
        U=U, dU={k: fd1(v, t, richardson) for k, v in U.items()},
        d2U={k: fd2(v, t, richardson) for k, v in U.items()},
        U1={k: np.array(v) for k, v in U1.items()}, U2={k: np.array(v) for k, v in U2.items()},
        window=path.window,
    )
