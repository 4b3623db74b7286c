"""Named one-dimensional densities and symmetric kernels.

Everything here is a plain closed-form density on the real line with a
matching sampler on numpy Generators.  The change-of-variable machinery
deliberately does NOT use the closed-form cdfs below (it inverts densities
numerically); the closed forms exist for samplers, support radii, and tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Density:
    """A named density on the real line with a sampler.

    name: one of "normal", "laplace", "cauchy", "student_t3".
    sigma applies to "normal" only (scale; the others are unit-scale).
    """

    name: str
    sigma: float = 1.0

    def __post_init__(self):
        if self.name not in ("normal", "laplace", "cauchy", "student_t3"):
            raise PreconditionError(f"unknown density name: {self.name!r}")
        if self.sigma <= 0.0:
            raise PreconditionError("sigma must be positive")

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.name == "normal":
            s = self.sigma
            return np.exp(-0.5 * (x / s) ** 2) / (s * SQRT_2PI)
        if self.name == "laplace":
            return 0.5 * np.exp(-np.abs(x))
        if self.name == "cauchy":
            return 1.0 / (math.pi * (1.0 + x * x))
        # student_t3
        return 2.0 / (math.pi * SQRT3 * (1.0 + x * x / 3.0) ** 2)

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.name == "normal":
            from math import erf

            vec_erf = np.vectorize(erf)
            return 0.5 * (1.0 + vec_erf(x / (self.sigma * math.sqrt(2.0))))
        if self.name == "laplace":
            return np.where(x < 0, 0.5 * np.exp(x), 1.0 - 0.5 * np.exp(-x))
        if self.name == "cauchy":
            return 0.5 + np.arctan(x) / math.pi
        u = x / SQRT3
        return 0.5 + (np.arctan(u) + u / (1.0 + u * u)) / math.pi

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.name == "normal":
            return rng.normal(0.0, self.sigma, size=n)
        if self.name == "laplace":
            return rng.laplace(0.0, 1.0, size=n)
        if self.name == "cauchy":
            return rng.standard_cauchy(size=n)
        return rng.standard_t(3, size=n)

    def tail_mass(self, a: float) -> float:
        """P(X > a) for a >= 0 (one-sided)."""
        a = float(a)
        if self.name == "normal":
            return 0.5 * math.erfc(a / (self.sigma * math.sqrt(2.0)))
        if self.name == "laplace":
            return 0.5 * math.exp(-a)
        if self.name == "cauchy":
            return 0.5 - math.atan(a) / math.pi
        u = a / SQRT3
        return 0.5 - (math.atan(u) + u / (1.0 + u * u)) / math.pi

    def support_radius(self, tail_tol: float) -> float:
        """Radius r with P(|X| > r) < tail_tol, from the closed-form tails."""
        r = 1.0
        while 2.0 * self.tail_mass(r) >= tail_tol:
            r *= 2.0
            if r > 1e15:  # pragma: no cover - no shipped density gets here
                raise PreconditionError("density tail too heavy to bracket")
        return r


def get_density(name: str, sigma: float = 1.0) -> Density:
    return Density(name, sigma) if name == "normal" else Density(name)


@dataclass(frozen=True)
class Kernel:
    """Symmetric unimodal continuous density used as a shift kernel.

    name: "normal", "laplace", or "triangular" (support [-1, 1]).
    """

    name: str

    def __post_init__(self):
        if self.name not in ("normal", "laplace", "triangular"):
            raise PreconditionError(f"unknown kernel name: {self.name!r}")

    def pdf(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        if self.name == "normal":
            return np.exp(-0.5 * u * u) / SQRT_2PI
        if self.name == "laplace":
            return 0.5 * np.exp(-np.abs(u))
        return np.maximum(1.0 - np.abs(u), 0.0)

    @property
    def peak(self) -> float:
        """pdf(0), the unimodal maximum."""
        if self.name == "normal":
            return 1.0 / SQRT_2PI
        if self.name == "laplace":
            return 0.5
        return 1.0

    def tail_mass(self, a: float) -> float:
        """Integral of the kernel over (a, inf), a >= 0."""
        a = float(a)
        if self.name == "normal":
            return 0.5 * math.erfc(a / math.sqrt(2.0))
        if self.name == "laplace":
            return 0.5 * math.exp(-a)
        if a >= 1.0:
            return 0.0
        return 0.5 * (1.0 - a) ** 2

    def radius(self, tail_tol: float) -> float:
        if self.name == "triangular":
            return 1.0
        r = 1.0
        while self.tail_mass(r) >= tail_tol:
            r *= 2.0
        return r


def get_kernel(name: str) -> Kernel:
    return Kernel(name)
