"""Edge-cardinality laws and their generating functions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError


@dataclass(frozen=True)
class MixingDistribution:
    """Coefficients rho_1..rho_K of rho(x) = sum_k rho_k x^k.

    With ``is_probability`` the coefficients are a law for the cardinality of
    an arriving edge; otherwise they are intensities beta_k of a static
    Poisson(beta) hypergraph.
    """

    coeffs: tuple
    is_probability: bool = True

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)
        if not c:
            raise ValueError("at least one coefficient is required")
        if any(x < 0 or not np.isfinite(x) for x in c):
            raise ValueError("coefficients must be finite and non-negative")
        if self.is_probability and abs(sum(c) - 1.0) > 1e-9:
            raise ValueError(f"probability coefficients sum to {sum(c)}, not 1")

    @classmethod
    def from_dict(cls, terms: dict, is_probability=True) -> "MixingDistribution":
        """Build from ``{k: rho_k}``."""
        k_max = max(terms)
        return cls(tuple(terms.get(k, 0.0) for k in range(1, k_max + 1)), is_probability)

    @property
    def max_degree(self) -> int:
        return len(self.coeffs)

    def coeff(self, k: int) -> float:
        return self.coeffs[k - 1] if 1 <= k <= len(self.coeffs) else 0.0

    @property
    def rho1(self) -> float:
        return self.coeff(1)

    @property
    def rho2(self) -> float:
        return self.coeff(2)

    def scaled(self, t: float) -> "MixingDistribution":
        """Intensities t*rho_k, the law of the process snapshot at time t."""
        return MixingDistribution(tuple(t * x for x in self.coeffs), is_probability=False)

    def require_process_ready(self):
        if self.rho1 + self.rho2 <= 0:
            raise DomainError("need rho_1 + rho_2 > 0")

    @property
    def _poly(self):
        return np.concatenate([[0.0], self.coeffs])

    def values(self, x):
        """Vectorised (rho(x), rho'(x), rho''(x)); no domain check."""
        c = self._poly
        d1 = P.polyder(c)
        d2 = P.polyder(c, 2) if len(c) > 2 else np.zeros(1)
        return P.polyval(x, c), P.polyval(x, d1), P.polyval(x, d2)

    def eval(self, x: float):
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x={x} outside [0, 1]")
        r, d1, d2 = self.values(x)
        return float(r), float(d1), float(d2)

    def __call__(self, x):
        return P.polyval(x, self._poly)

    def derivative(self, x, order=1):
        return P.polyval(x, P.polyder(self._poly, order))

    def to_json(self):
        return list(self.coeffs)
