"""Comparisons between Monte Carlo samples and analytic targets."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import EmptySample


@dataclass(frozen=True)
class Comparison:
    """One statistic against one analytic target.

    ``outside_empirical``/``outside_target`` report the mass each side puts
    outside the support window, so nothing is dropped silently.
    """

    name: str
    statistic: str
    value: float
    sample_size: int
    target: str
    provenance: str
    threshold: Optional[float] = None
    passed: Optional[bool] = None
    window: Optional[tuple] = None
    outside_empirical: float = 0.0
    outside_target: float = 0.0

    def to_dict(self):
        d = asdict(self)
        if d["window"] is not None:
            d["window"] = list(d["window"])
        return d


def _nonempty(samples):
    samples = np.asarray(samples)
    if samples.size == 0:
        raise EmptySample("no samples to compare")
    return samples


def histogram(samples, support) -> np.ndarray:
    """Empirical frequencies of each value in ``support``."""
    samples = _nonempty(samples)
    support = np.asarray(support)
    counts = Counter(samples.tolist())
    return np.array([counts.get(s, 0) for s in support.tolist()], dtype=float) / len(samples)


def tv_window(samples, support, pmf):
    """TV distance restricted to ``support``; returns (tv, outside_emp, outside_target)."""
    emp = histogram(samples, support)
    pmf = np.asarray(pmf, dtype=float)
    tv = 0.5 * float(np.abs(emp - pmf).sum())
    return tv, max(0.0, 1.0 - float(emp.sum())), max(0.0, 1.0 - float(pmf.sum()))


def tv_empirical(a, b) -> float:
    """TV distance between two empirical laws of hashable values (rows of 2-D arrays ok)."""
    a = _nonempty(a)
    b = _nonempty(b)
    ca = Counter(map(tuple, a.reshape(len(a), -1).tolist()))
    cb = Counter(map(tuple, b.reshape(len(b), -1).tolist()))
    keys = set(ca) | set(cb)
    return 0.5 * sum(abs(ca[k] / len(a) - cb[k] / len(b)) for k in keys)


def ks_statistic(samples, cdf) -> float:
    """sup |F_n - F| for a continuous target cdf."""
    x = np.sort(_nonempty(samples).astype(float))
    n = len(x)
    f = np.asarray(cdf(x), dtype=float)
    hi = np.arange(1, n + 1) / n - f
    lo = f - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


def binomial_z(successes: int, trials: int, p: float) -> float:
    """Two-sided binomial z-score of an observed frequency against p."""
    if trials <= 0:
        raise EmptySample("no trials")
    if p <= 0.0 or p >= 1.0:
        return 0.0 if successes == trials * p else math.copysign(math.inf, successes - trials * p)
    return (successes - trials * p) / math.sqrt(trials * p * (1.0 - p))


def tv_noise_bound(support_size: int, sample_size: int) -> float:
    """Multinomial fluctuation scale 4*sqrt(support/size) for a TV distance."""
    return 4.0 * math.sqrt(support_size / sample_size)


def compare_distributions(samples, target, *, name="comparison", target_name="", provenance="",
                          threshold=None, support=None) -> Comparison:
    """Dispatch on the target type.

    * array-like pmf with ``support``: TV on that window
    * callable cdf: KS statistic
    * float p with boolean samples: binomial z-score (threshold is on |z|)
    """
    samples = _nonempty(samples)
    if callable(target):
        val = ks_statistic(samples, target)
        return Comparison(name, "ks", val, len(samples), target_name, provenance, threshold,
                          None if threshold is None else val <= threshold)
    if np.ndim(target) == 0:
        succ = int(np.count_nonzero(samples))
        z = binomial_z(succ, len(samples), float(target))
        return Comparison(name, "z", z, len(samples), target_name, provenance, threshold,
                          None if threshold is None else abs(z) <= threshold)
    if support is None:
        support = np.arange(1, len(target) + 1)
    tv, out_e, out_t = tv_window(samples, support, target)
    win = (int(np.min(support)), int(np.max(support))) if len(support) else None
    return Comparison(name, "tv", tv, len(samples), target_name, provenance, threshold,
                      None if threshold is None else tv < threshold, win, out_e, out_t)
