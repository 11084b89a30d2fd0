"""Borel law, first-passage walks, coupled walk families and the (Y, Z) chain."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ChainStopped, DomainError
from .mixing import MixingDistribution
from .rng import make_rng
from .structure import phi

ESCAPED = math.inf
ESCAPE_ERROR = 1e-12


@dataclass(frozen=True)
class BorelLaw:
    """Total progeny of a Poisson(mu) branching process started from one individual."""

    mu: float
    tolerance: float = 1e-12

    def __post_init__(self):
        if not self.mu >= 0:
            raise DomainError("mu must be non-negative")

    def log_pmf(self, n):
        n = np.asarray(n, dtype=float)
        if np.any(n < 1):
            raise DomainError("n must be at least 1")
        if self.mu == 0:
            return np.where(n == 1, 0.0, -np.inf)
        lg = np.vectorize(math.lgamma, otypes=[float])(n + 1.0)
        return -self.mu * n + (n - 1.0) * np.log(self.mu * n) - lg

    def pmf(self, n):
        out = np.exp(self.log_pmf(n))
        return float(out) if np.ndim(n) == 0 else out

    @property
    def infinity_mass(self) -> float:
        return phi(self.mu, self.tolerance)

    def tail_bound(self, n_max: int) -> float:
        """Upper bound on the finite mass beyond n_max, from Stirling's bound on n!."""
        if self.mu == 0:
            return 0.0
        r = self.mu * math.exp(1.0 - self.mu)
        c = 1.0 / (self.mu * math.sqrt(2.0 * math.pi))
        k = n_max + 1
        bound = c * (2.0 / math.sqrt(n_max) if n_max >= 1 else math.inf)
        if r < 1.0:
            bound = min(bound, c * r ** k / (k ** 1.5 * (1.0 - r)))
        return bound

    def window(self, n_max: int) -> np.ndarray:
        """pmf on 1..n_max."""
        return self.pmf(np.arange(1, n_max + 1))

    def sample(self, size, rng=None):
        """Exact finite-part draws by inversion; escape is drawn with the infinity mass."""
        rng = make_rng(rng)
        n_max = 64
        while self.tail_bound(n_max) > 1e-13 and n_max < 10 ** 7:
            n_max *= 2
        cdf = np.cumsum(self.window(n_max))
        u = rng.random(size)
        idx = np.searchsorted(cdf, u, side="right")
        return np.where(idx < n_max, idx + 1.0, ESCAPED)


def borel_pmf(law, n):
    if not isinstance(law, BorelLaw):
        law = BorelLaw(float(law))
    return law.pmf(n)


def default_n_cap(mu: float) -> int:
    if mu > 1:
        return max(10 ** 4, 50 * math.ceil(1.0 / (mu - 1.0) ** 2))
    return 10 ** 4


def escape_level(mu: float, error: float = ESCAPE_ERROR) -> float:
    """Height from which a Poisson(mu) - 1 walk returns to 0 with chance below ``error``.

    From height L the return probability is (1 - phi(mu))**L, so walks crossing
    this level are declared escaped. Infinite when mu <= 1.
    """
    p = phi(mu) if mu > 1 else 0.0
    if p <= 0.0:
        return math.inf
    if p >= 1.0:
        return 1.0
    return float(max(1, math.ceil(math.log(error) / math.log1p(-p))))


def first_passage_times(mu: float, runs: int, n_cap: Optional[int] = None, seed=None) -> np.ndarray:
    """First passage of xi to 0 from xi_0 = 1 with Poisson(mu) - 1 steps, for many walks.

    Escaped walks (past n_cap steps or above ``escape_level``) are ``inf``.
    """
    if mu < 0:
        raise DomainError("mu must be non-negative")
    rng = make_rng(seed)
    cap = default_n_cap(mu) if n_cap is None else int(n_cap)
    if cap < 1:
        raise DomainError("n_cap must be at least 1")
    level = escape_level(mu)
    out = np.full(runs, ESCAPED)
    idx = np.arange(runs)
    xi = np.ones(runs, dtype=np.int64)
    for step in range(1, cap + 1):
        if idx.size == 0:
            break
        xi += rng.poisson(mu, size=idx.size) - 1
        dead = xi == 0
        out[idx[dead]] = step
        keep = ~dead & (xi < level)
        idx, xi = idx[keep], xi[keep]
    return out


def simulate_first_passage(mu: float, n_cap: Optional[int] = None, seed=None):
    """One walk; returns its first passage time or ``math.inf`` when escaped."""
    m = first_passage_times(mu, 1, n_cap, seed)[0]
    return ESCAPED if math.isinf(m) else int(m)


@dataclass(frozen=True)
class WalkFamily:
    """One realization of the coupled walks over ``time_grid``.

    ``passage[j]`` is M at ``time_grid[j]``; ``inf`` marks an escaped walk.
    """

    time_grid: tuple
    rho2: float
    n_cap: int
    passage: tuple

    @property
    def chi(self) -> Optional[float]:
        """First grid time whose walk escapes, or None."""
        for t, m in zip(self.time_grid, self.passage):
            if math.isinf(m):
                return t
        return None

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.passage, self.passage[1:]))


def _check_grid(time_grid, rho2):
    grid = np.asarray(time_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise DomainError("time grid must be a non-empty sequence")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("time grid must be positive and strictly increasing")
    if rho2 <= 0:
        raise DomainError("rho2 must be positive")
    return grid


def coupled_families(time_grid, rho2: float, count: int, n_cap: Optional[int] = None,
                     seed=None) -> np.ndarray:
    """First passage times of ``count`` independent coupled families, shape (count, len(grid)).

    Step n of every walk in a family shares one rate-2*rho2 Poisson process
    P(n) in t: its count at grid time t_j is the sum of independent increments
    over the grid cells up to t_j. Larger t therefore sees pointwise larger
    steps, which keeps M non-decreasing along the grid.
    """
    grid = _check_grid(time_grid, rho2)
    rng = make_rng(seed)
    mus = 2.0 * rho2 * grid
    rates = 2.0 * rho2 * np.diff(np.concatenate([[0.0], grid]))
    cap = max(default_n_cap(mu) for mu in mus) if n_cap is None else int(n_cap)
    # non-increasing in t, so an escape at t_j forces one at every later time
    levels = np.array([escape_level(mu) for mu in mus])
    r = len(grid)
    out = np.full((count, r), ESCAPED)
    idx = np.arange(count)
    xi = np.ones((count, r), dtype=np.int64)
    running = np.ones((count, r), dtype=bool)
    for step in range(1, cap + 1):
        if idx.size == 0:
            break
        counts = rng.poisson(rates, size=(idx.size, r)).cumsum(axis=1)
        xi += np.where(running, counts - 1, 0)
        dead = running & (xi == 0)
        rows, cols = np.nonzero(dead)
        out[idx[rows], cols] = step
        running &= ~dead & (xi < levels)
        keep = running.any(axis=1)
        idx, xi, running = idx[keep], xi[keep], running[keep]
    return out


def coupled_family(time_grid, rho2: float, n_cap: Optional[int] = None, seed=None) -> WalkFamily:
    grid = _check_grid(time_grid, rho2)
    cap = max(default_n_cap(mu) for mu in 2.0 * rho2 * grid) if n_cap is None else int(n_cap)
    row = coupled_families(grid, rho2, 1, cap, seed)[0]
    return WalkFamily(tuple(grid.tolist()), float(rho2), cap,
                      tuple(ESCAPED if math.isinf(m) else int(m) for m in row))


def _log_comb(a, b):
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def lambda2(m: MixingDistribution, big_n: int, n: int) -> float:
    """N * sum_i rho_{2+i} C(n, i) / C(N, i+2), with binomials in log space."""
    if not 0 <= n < big_n:
        raise DomainError("need 0 <= n < N")
    total = 0.0
    for i in range(0, min(n, m.max_degree - 2) + 1):
        r = m.coeff(2 + i)
        if r and i + 2 <= big_n:
            total += r * math.exp(_log_comb(n, i) - _log_comb(big_n, i + 2))
    return big_n * total


def lambda2_settling_size(m: MixingDistribution, n: int = 5, tol: float = 0.01,
                          n_max: int = 10 ** 9) -> int:
    """Smallest N with |(N-n-1) lambda2(N, n) - 2 rho_2| < tol, located by doubling
    then bisection (the error decays like 1/N once N is well above n)."""
    def ok(big_n):
        return abs((big_n - n - 1) * lambda2(m, big_n, n) - 2.0 * m.rho2) < tol

    hi = max(n + 2, 4)
    while not ok(hi):
        hi *= 2
        if hi > n_max:
            raise DomainError("no settling size below n_max")
    lo = max(n + 1, hi // 2)
    if lo == hi or ok(lo):
        return lo if ok(lo) else hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class ChainState:
    """State of the patch/debris chain after n collapse steps."""

    n: int
    y: int
    z: int
    big_n: int
    t: float
    history: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        if self.y < 0 or self.z < 0 or not 0 <= self.n <= self.big_n:
            raise DomainError("invalid chain state")

    @property
    def stopped(self) -> bool:
        return self.y == 0 or self.n >= self.big_n


def chain_step(state: ChainState, m: MixingDistribution, seed=None) -> ChainState:
    if state.y == 0:
        raise ChainStopped("no patches left")
    if state.n >= state.big_n:
        raise ChainStopped("all vertices removed")
    rng = make_rng(seed)
    big_n, n = state.big_n, state.n
    w = int(rng.binomial(state.y - 1, 1.0 / (big_n - n)))
    u = int(rng.poisson((big_n - n - 1) * state.t * lambda2(m, big_n, n)))
    hist = None if state.history is None else state.history + ((state.y, state.z),)
    return replace(state, n=n + 1, y=state.y - 1 - w + u, z=state.z + 1 + w, history=hist)


def initial_patches(m: MixingDistribution, big_n: int, t: float, size, rng=None):
    """Patch count of a Poisson(t*rho) hypergraph plus one added patch."""
    return 1 + make_rng(rng).poisson(big_n * t * m.rho1, size=size)


def chain_paths(m: MixingDistribution, big_n: int, t: float, steps: int, samples: int,
                seed=None, y0=None, z0=0):
    """Vectorised chain runs; returns (Y, Z) arrays of shape (samples, steps + 1).

    Runs that stop keep their final state. ``y0`` defaults to a single patch.
    """
    rng = make_rng(seed)
    y = np.ones(samples, dtype=np.int64) if y0 is None else np.broadcast_to(np.asarray(y0, dtype=np.int64), (samples,)).copy()
    z = np.broadcast_to(np.asarray(z0, dtype=np.int64), (samples,)).copy()
    ys = np.empty((samples, steps + 1), dtype=np.int64)
    zs = np.empty_like(ys)
    ys[:, 0], zs[:, 0] = y, z
    for n in range(steps):
        if n < big_n:
            act = y > 0
            k = int(act.sum())
            w = rng.binomial(y[act] - 1, 1.0 / (big_n - n))
            u = rng.poisson((big_n - n - 1) * t * lambda2(m, big_n, n), size=k)
            y[act] += -1 - w + u
            z[act] += 1 + w
        ys[:, n + 1], zs[:, n + 1] = y, z
    return ys, zs
