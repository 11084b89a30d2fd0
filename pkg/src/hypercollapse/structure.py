"""Structure function t(x) = -log(1-x)/rho'(x), its envelopes and predictors.

The lower envelope g(s) = inf{x : t(x) > s} and upper envelope
g*(s) = sup{x : t(x) < s} v 0 are found by scanning a fixed x-grid for the
bracketing cell and bisecting on the sign of s*rho'(x) + log(1-x). Jumps of
g sit at record local maxima of t, jumps of g* at right-record local minima;
both are located from sign changes of the closed-form derivative numerator
rho'(x)/(1-x) + log(1-x)*rho''(x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import AssumptionViolated, DomainError
from .mixing import MixingDistribution

X_CAP = 1.0 - 1e-12
DEFAULT_RESOLUTION = 1e-4
DEFAULT_TOLERANCE = 1e-12

GRAPH_LIKE = "graph-like"
BICRITICAL = "bicritical"
EXCEPTIONAL = "exceptional"


def _bisect(pred, lo, hi, tol):
    """Shrink [lo, hi] with pred(lo) False and pred(hi) True, elementwise.

    ``tol=0`` runs to adjacent floats.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(1100):
        mid = 0.5 * (lo + hi)
        done = (hi - lo <= tol) | (mid <= lo) | (mid >= hi)
        if np.all(done):
            break
        p = pred(mid)
        hi = np.where(~done & p, mid, hi)
        lo = np.where(~done & ~p, mid, lo)
    return lo, hi


def _x_grid(resolution):
    steps = int(round(1.0 / resolution))
    base = np.arange(1, steps) / steps
    tail = 1.0 - np.logspace(math.log10(1.0 / steps), -12, 200)[1:]
    return np.concatenate([base, tail])


def structure_values(m: MixingDistribution, x):
    """t(x) for x in (0, 1), vectorised, no domain check."""
    _, d1, _ = m.values(x)
    return -np.log1p(-x) / d1


def structure_function(m: MixingDistribution, x: float) -> float:
    if not 0.0 < x < 1.0:
        raise DomainError(f"x={x} must lie strictly inside (0, 1)")
    m.require_process_ready()
    return float(structure_values(m, min(x, X_CAP)))


def structure_limit_at_zero(m: MixingDistribution) -> float:
    """Continuous extension t(0+): 0 if rho_1 > 0, else 1/(2 rho_2)."""
    m.require_process_ready()
    return 0.0 if m.rho1 > 0 else 1.0 / (2.0 * m.rho2)


def _derivative_numerator(m, x):
    _, d1, d2 = m.values(x)
    return d1 / (1.0 - x) + np.log1p(-x) * d2


def _root_residual(m, s, x):
    return s * m.derivative(x) + np.log1p(-x)


@dataclass(frozen=True)
class Jump:
    """A jump of an envelope at time ``s`` from ``left`` to ``right``.

    ``left_log1m``/``right_log1m`` hold log(1 - x) for the endpoints, which
    stays exact for roots too close to 1 to be told apart from 1.0.
    """

    s: float
    left: float
    right: float
    left_log1m: Optional[float] = None
    right_log1m: Optional[float] = None

    def __post_init__(self):
        if self.left_log1m is None:
            object.__setattr__(self, "left_log1m", float(np.log1p(-self.left)))
        if self.right_log1m is None:
            object.__setattr__(self, "right_log1m", float(np.log1p(-self.right)))

    def residuals(self, m: MixingDistribution):
        """s*rho'(x) + log(1-x) at both endpoints."""
        return (self.s * float(m.derivative(self.left)) + self.left_log1m,
                self.s * float(m.derivative(self.right)) + self.right_log1m)


@dataclass(frozen=True, eq=False)
class StructureProfile:
    mixing: MixingDistribution
    grid_resolution: float
    root_tolerance: float
    xi: tuple
    xi_star: tuple
    classification: str
    stationary_points: tuple
    t_zero: float
    starts_rising: bool
    _x: np.ndarray = field(repr=False)
    _t: np.ndarray = field(repr=False)
    _run_max: np.ndarray = field(repr=False)
    _run_min: np.ndarray = field(repr=False)

    def t(self, x):
        return structure_values(self.mixing, np.minimum(x, X_CAP))

    def residual(self, s, x):
        """s*rho'(x) + log(1-x); negative exactly where t(x) > s."""
        return _root_residual(self.mixing, s, x)

    def g(self, s, tol=None):
        """Lower envelope, scalar or array."""
        tol = self.root_tolerance if tol is None else tol
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s_arr < 0):
            raise DomainError("s must be non-negative")
        x, run_max = self._x, self._run_max
        idx = np.searchsorted(run_max, s_arr, side="right")
        lo = np.where(idx > 0, x[np.maximum(idx - 1, 0)], 0.0)
        hi = np.where(idx < len(x), x[np.minimum(idx, len(x) - 1)], X_CAP)
        lo = np.where(idx == len(x), x[-1], lo)
        m = self.mixing
        _, hi = _bisect(lambda z: _root_residual(m, s_arr, z) < 0, lo, hi, tol)
        beyond = (idx == len(x)) & (self.t(X_CAP) <= s_arr)
        out = np.where(beyond, X_CAP, hi)
        flat = (s_arr <= self.t_zero) if self.starts_rising else (s_arr < self.t_zero)
        out = np.where(flat | (s_arr == 0), 0.0, out)
        return float(out[0]) if np.ndim(s) == 0 else out

    def g_star(self, s, tol=None):
        """Upper envelope, scalar or array."""
        tol = self.root_tolerance if tol is None else tol
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s_arr < 0):
            raise DomainError("s must be non-negative")
        x, run_min = self._x, self._run_min
        j = np.searchsorted(run_min, s_arr, side="left")
        lo = np.where(j > 0, x[np.maximum(j - 1, 0)], 0.0)
        hi = np.where(j < len(x), x[np.minimum(j, len(x) - 1)], X_CAP)
        m = self.mixing
        lo, _ = _bisect(lambda z: _root_residual(m, s_arr, z) <= 0, lo, hi, tol)
        out = np.where((j == len(x)) & (self.t(X_CAP) < s_arr), X_CAP, lo)
        out = np.where((j == 0) & (self.t_zero >= s_arr), 0.0, out)
        out = np.where(s_arr == 0, 0.0, out)
        return float(out[0]) if np.ndim(s) == 0 else out

    def jump_at(self, s, rel_tol=1e-9) -> Optional[Jump]:
        for j in self.xi:
            if abs(j.s - s) <= rel_tol * max(1.0, j.s):
                return j
        return None

    def g_left(self, s):
        """g(s-), which differs from g(s) only on the discontinuity set."""
        j = self.jump_at(s)
        if j is not None:
            return j.left
        return self.g(s)

    def envelope_table(self, s_values):
        s_values = np.asarray(s_values, dtype=float)
        return np.column_stack([s_values, self.g(s_values), self.g_star(s_values)])

    def to_dict(self):
        return {
            "coefficients": list(self.mixing.coeffs),
            "classification": self.classification,
            "grid_resolution": self.grid_resolution,
            "root_tolerance": self.root_tolerance,
            "t_zero": self.t_zero,
            "xi": [{"s": j.s, "g_left": j.left, "g": j.right} for j in self.xi],
            "xi_star": [{"s": j.s, "g_star": j.left, "g_star_right": j.right} for j in self.xi_star],
            "stationary_points": [{"x": x, "kind": k} for x, k in self.stationary_points],
        }


def _stationary_points(m, x, tol):
    d = _derivative_numerator(m, x)
    pos = d > 0
    change = np.flatnonzero(pos[:-1] != pos[1:])
    points = []
    for i in change:
        rising = bool(pos[i])
        lo, hi = _bisect(lambda z: (_derivative_numerator(m, z) > 0) != rising, x[i], x[i + 1], 0.0)
        points.append((float(0.5 * (lo + hi)), "max" if rising else "min"))
    return points, bool(pos[0])


def _far_root(m, s, xa, lo, hi):
    """Jump from xa to the first root of s*rho'(x) + log(1-x) in [lo, hi].

    Bisection runs in u = -log(1-x), which resolves roots near 1 that x
    itself cannot; ``hi=None`` searches beyond X_CAP.
    """
    def resid(u):
        return s * m.derivative(-np.expm1(-u)) - u

    lo = -math.log1p(-lo)
    if hi is None:
        lo = max(lo, -math.log1p(-X_CAP))
        hi = 2.0 * lo
        while resid(hi) >= 0:
            hi *= 2.0
    else:
        hi = -math.log1p(-hi)
    _, u = _bisect(lambda z: resid(z) < 0, lo, hi, 0.0)
    u = float(u)
    return Jump(s, xa, float(-np.expm1(-u)), right_log1m=-u)


def _check_interior(stationary, t_of, left, right, level, label):
    bad = []
    for xs, kind in stationary:
        if left < xs < right and kind == "max":
            if abs(t_of(xs) - level) <= 1e-9 * max(1.0, level):
                bad.append((label, level, xs))
    return bad


@lru_cache(maxsize=128)
def analyze(m: MixingDistribution, grid_resolution: float = DEFAULT_RESOLUTION,
            root_tolerance: float = DEFAULT_TOLERANCE) -> StructureProfile:
    """Build the structure profile of ``m``: envelopes, jumps, classification."""
    m.require_process_ready()
    x = _x_grid(grid_resolution)
    t = structure_values(m, x)
    t_zero = structure_limit_at_zero(m)
    stationary, starts_rising = _stationary_points(m, x, root_tolerance)
    # narrow peaks and dips between grid points must still bound the envelopes
    fine = np.unique(np.concatenate([x, [xs for xs, _ in stationary]]))
    fine_t = structure_values(m, fine)
    run_max = np.maximum.accumulate(np.maximum(fine_t, t_zero))
    run_min = np.minimum.accumulate(fine_t[::-1])[::-1]

    def t_of(z):
        return float(structure_values(m, min(z, X_CAP)))

    delta = 2.0 * grid_resolution
    violations = []

    maxima = [(xs, t_of(xs)) for xs, kind in stationary if kind == "max"]
    if m.rho1 == 0 and not starts_rising:
        maxima.insert(0, (0.0, t_zero))
    xi = []
    for xa, ta in maxima:
        before = x < xa - delta
        prior = max(t_zero, float(t[before].max())) if before.any() else t_zero
        if xa > 0 and ta < prior:
            continue
        eps = 1e-11 * max(1.0, ta)
        above = np.flatnonzero((x > xa) & (t > ta + eps))
        if len(above):
            i = int(above[0])
            lo = max(xa, float(x[i - 1])) if i > 0 else xa
            jump = _far_root(m, ta, xa, lo, float(x[i]))
        else:
            jump = _far_root(m, ta, xa, max(xa, float(x[-1])), None)
        violations += _check_interior(stationary, t_of, xa, jump.right, ta, "g")
        xi.append(jump)

    minima = [(xs, t_of(xs)) for xs, kind in stationary if kind == "min"]
    xi_star = []
    for xb, tb in reversed(minima):
        after = x > xb + delta
        if after.any() and tb > float(t[after].min()):
            continue
        eps = 1e-11 * max(1.0, tb)
        below = np.flatnonzero((x < xb) & (t < tb - eps))
        if len(below):
            i = int(below[-1])
            xd, _ = _bisect(lambda z: _root_residual(m, tb, z) <= 0, float(x[i]), min(xb, float(x[i + 1])), 0.0)
            xd = float(xd)
        elif t_zero < tb:
            xd, _ = _bisect(lambda z: _root_residual(m, tb, z) <= 0, 0.0, float(x[0]), 0.0)
            xd = float(xd)
        else:
            xd = 0.0
        xi_star.append(Jump(tb, xd, xb))
    xi_star.reverse()

    if violations:
        raise AssumptionViolated("a third root lies strictly inside a jump", violations)

    if not xi and not xi_star:
        cls = GRAPH_LIKE
    elif len(xi) == 1 and len(xi_star) == 1:
        cls = BICRITICAL
    else:
        cls = EXCEPTIONAL
    return StructureProfile(
        m, grid_resolution, root_tolerance, tuple(xi), tuple(xi_star), cls,
        tuple(stationary), t_zero, starts_rising, fine, fine_t, run_max, run_min,
    )


def lower_envelope(m, s, grid_resolution=DEFAULT_RESOLUTION, root_tolerance=DEFAULT_TOLERANCE):
    return analyze(m, grid_resolution, root_tolerance).g(s)


def upper_envelope(m, s, grid_resolution=DEFAULT_RESOLUTION, root_tolerance=DEFAULT_TOLERANCE):
    return analyze(m, grid_resolution, root_tolerance).g_star(s)


def discontinuity_set(m, grid_resolution=DEFAULT_RESOLUTION, root_tolerance=DEFAULT_TOLERANCE):
    return analyze(m, grid_resolution, root_tolerance).xi


def classify(m, grid_resolution=DEFAULT_RESOLUTION, root_tolerance=DEFAULT_TOLERANCE):
    return analyze(m, grid_resolution, root_tolerance).classification


def largest_root_phi(t: float, rho2: float, tol: float = DEFAULT_TOLERANCE) -> float:
    """Largest root in [0, 1] of 2*t*rho2*x + log(1-x) = 0."""
    return phi(2.0 * t * rho2, tol)


def phi(mu: float, tol: float = DEFAULT_TOLERANCE) -> float:
    """Largest root in [0, 1] of mu*x + log(1-x) = 0 (survival probability)."""
    if mu <= 1.0:
        return 0.0
    # divide by x so the trivial root at 0 drops out
    _, hi = _bisect(lambda z: mu + np.log1p(-z) / z < 0, 0.0, X_CAP, tol)
    return float(hi)


def graph_envelope(rho2: float, s: float) -> float:
    """Lower envelope of t2(x) = -log(1-x)/(2*rho2*x)."""
    if rho2 <= 0:
        raise DomainError("rho2 must be positive")
    if s < 0:
        raise DomainError("s must be non-negative")
    return largest_root_phi(s, rho2)


@dataclass(frozen=True)
class Atom:
    probability: float
    vertices: float
    edges: float
    essential: float


def _atom(m, t, x, p):
    ess = 0.0 if x == 0 else -(1.0 - x) * math.log1p(-x)
    return Atom(p, x, t * float(m(x)) + ess, ess)


@dataclass(frozen=True)
class FluidPrediction:
    """Limit law of the rescaled identifiable counts at one time.

    ``atoms`` is the law with patches; ``macro_atoms`` the domain law for
    patch-free processes (rho_1 = 0).
    """

    t: float
    atoms: tuple
    macro_atoms: Optional[tuple] = None

    @property
    def is_jump(self):
        return len(self.atoms) == 2

    def mean(self):
        return (sum(a.probability * a.vertices for a in self.atoms),
                sum(a.probability * a.edges for a in self.atoms))


def fluid_prediction(m: MixingDistribution, t: float, profile: Optional[StructureProfile] = None,
                     jump_tol: float = 1e-9) -> FluidPrediction:
    if t < 0:
        raise DomainError("t must be non-negative")
    prof = profile or analyze(m)
    jump = prof.jump_at(t, jump_tol)
    if jump is not None:
        atoms = (_atom(m, t, jump.left, 0.5), _atom(m, t, jump.right, 0.5))
        g_t = jump.right
    else:
        g_t = prof.g(t)
        atoms = (_atom(m, t, g_t, 1.0),)
    macro = None
    if m.rho1 == 0 and m.rho2 > 0:
        p = graph_envelope(m.rho2, t)
        big = _atom(m, t, g_t, p)
        macro = (Atom(1.0 - p, 0.0, 0.0, 0.0), big) if p > 0 else (Atom(1.0, 0.0, 0.0, 0.0),)
    return FluidPrediction(t, atoms, macro)


def _hyper_fraction(n, m_id, k):
    """(C(m,k) + (n-m) C(m,k-1)) / C(n,k): chance a k-subset has at most one
    vertex outside an m-set."""
    return (math.comb(m_id, k) + (n - m_id) * math.comb(m_id, k - 1)) / math.comb(n, k)


def nonidentifiable_mean(m: MixingDistribution, n: int, t: float, m_id: int) -> float:
    """Conditional mean number of non-identifiable edges given m_id identifiable vertices."""
    if not 0 <= m_id <= n:
        raise DomainError("need 0 <= m_id <= n")
    total = 0.0
    for k in range(1, min(m.max_degree, n) + 1):
        rk = m.coeff(k)
        if rk:
            total += rk * (1.0 - _hyper_fraction(n, m_id, k))
    return n * t * total


def nonidentifiable_mean_asymptotic(m: MixingDistribution, n: int, t: float, gamma: float) -> float:
    r, d1, _ = m.values(gamma)
    return n * t * (1.0 - float(r) - (1.0 - gamma) * float(d1))


def conditional_beta(m: MixingDistribution, n: int, t: float, m_id: int) -> tuple:
    """Intensities beta_1..beta_K of the hypergraph left after deleting the
    m_id identifiable vertices (a Poisson(beta) hypergraph on n - m_id vertices)."""
    if not 0 <= m_id < n:
        raise DomainError("need 0 <= m_id < n")
    k_max = m.max_degree
    out = [0.0]
    for j in range(2, k_max + 1):
        if j > n - m_id:
            out.append(0.0)
            continue
        acc = 0.0
        for i in range(0, k_max - j + 1):
            if j + i > n:
                break
            r = m.coeff(i + j)
            if r:
                acc += r * math.comb(m_id, i) / math.comb(n, j + i)
        out.append(t / (1.0 - m_id / n) * math.comb(n - m_id, j) * acc)
    return tuple(out)


def collapse_fluid_path(beta: MixingDistribution, s):
    """Rescaled (patches, debris) along randomized collapse after a fraction s
    of vertices has been removed."""
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s >= 1)):
        raise DomainError("s must lie in [0, 1)")
    r, d1, _ = beta.values(s)
    lg = np.log1p(-s)
    y = (1.0 - s) * (d1 + lg)
    z = r - (1.0 - s) * lg
    if np.ndim(y) == 0:
        return float(y), float(z)
    return y, z
