"""Generator processes: nonnegative paths with unit means.

A generator is a random field Z = (Z_t) over t in [0, 1] with Z_t >= 0 and
E[Z_t] = 1 for every t.  Each one induces a D-norm through
E[sup_t |f(t)| Z_t]; very different generators can induce the same norm, so
equivalence is a statistical question, answered here by comparing induced
norms on a probe set.

Three constructions:

  * ConstantGenerator: a single nonnegative mean-one scalar multiplies the
    whole path; always induces the sup-norm.
  * RatioGenerator: Z_t = base(X, t) / h(X) with X drawn from the auxiliary
    density h.  The induced norm does not depend on h.  When the base is the
    Gaussian shifted-kernel family and h matches its scale, sampling goes
    through the algebraic form exp(t (2X - t) / (2 sigma^2)), which avoids
    the 0/0 failure of the raw ratio in the far tails.
  * SpectralGenerator: Z_t = g(U, t) with U uniform on (0, 1), for a family
    on the unit interval.  Slice normalization gives the unit means, and a
    bounded family yields an almost-sure path bound (certified stopping in
    the max-stable simulator depends on it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .densities import Density, get_density
from .efunc import EFunction
from .errors import PreconditionError
from .numerics import ALPHA_3SIGMA, SeedSpec, bonferroni_critical
from .spectral import (
    REAL_LINE,
    UNIT_INTERVAL,
    SpectralFamily,
    family_from_descriptor,
)

_PDF_FLOOR = 1e-300


class GeneratorProcess:
    """Base class.  Subclasses draw paths restricted to given index points.

    Sampling is split in two: `sample_inputs` consumes randomness (one scalar
    per path for every shipped construction) and `values_from_inputs` maps
    inputs to path values deterministically.  The split lets the max-stable
    simulator keep one stream per replicate while batching the expensive
    evaluation across replicates.
    """

    label: str = "generator"
    #: Almost-sure upper bound for sup_t Z_t, when one is declared.
    path_bound: float | None = None

    def sample_inputs(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def values_from_inputs(self, inputs: np.ndarray, t_points) -> np.ndarray:
        """Path values for the given inputs; shape (len(inputs), len(t_points)).

        May return a read-only broadcast view when paths are constant in t.
        """
        raise NotImplementedError

    def sample_values(self, rng: np.random.Generator, n: int, t_points) -> np.ndarray:
        """n paths at the given index points; shape (n, len(t_points))."""
        return self.values_from_inputs(self.sample_inputs(rng, n), t_points)

    def descriptor(self) -> dict:
        raise NotImplementedError


_LAW_BOUNDS = {"unit": 1.0, "uniform": 2.0, "exponential": None}


@dataclass(frozen=True)
class ScalarLaw:
    """Nonnegative scalar law with mean exactly 1.

    unit: the constant 1.  uniform: U[0, 2].  exponential: Exp(1).
    """

    name: str

    def __post_init__(self):
        if self.name not in _LAW_BOUNDS:
            raise PreconditionError(
                f"scalar law must be one of {tuple(_LAW_BOUNDS)}, got {self.name!r}"
            )

    @property
    def upper_bound(self) -> float | None:
        return _LAW_BOUNDS[self.name]

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.name == "unit":
            return np.ones(n)
        if self.name == "uniform":
            return 2.0 * rng.random(n)
        return rng.standard_exponential(n)


class ConstantGenerator(GeneratorProcess):
    """Z_t = W for all t, W from a mean-one scalar law."""

    def __init__(self, law: ScalarLaw | str):
        self.law = law if isinstance(law, ScalarLaw) else ScalarLaw(law)
        self.path_bound = self.law.upper_bound
        self.label = f"constant({self.law.name})"

    def sample_inputs(self, rng, n) -> np.ndarray:
        return self.law.sample(rng, n)

    def values_from_inputs(self, inputs, t_points) -> np.ndarray:
        t_points = np.atleast_1d(np.asarray(t_points, dtype=np.float64))
        return np.broadcast_to(inputs[:, None], (len(inputs), len(t_points)))

    def descriptor(self) -> dict:
        return {"type": "constant", "law": self.law.name}


class RatioGenerator(GeneratorProcess):
    """Z_t = base(X, t) / h(X), X ~ h, for a real-line base family.

    No almost-sure path bound is ever declared on this route, even when the
    ratio happens to be bounded (heavy-tailed h under a normal base): bound
    certification lives in the transported spectral construction, and the
    certified simulators refuse a generator without a declared bound rather
    than trust an unverified one.
    """

    def __init__(self, base: SpectralFamily, h: Density):
        if base.domain != REAL_LINE:
            raise PreconditionError(
                "ratio construction expects a base family on the real line"
            )
        self.base = base
        self.h = h
        self._gauss_sigma = None
        if h.name == "normal" and base.gaussian_sigma is not None:
            if math.isclose(h.sigma, base.gaussian_sigma, rel_tol=1e-12):
                self._gauss_sigma = float(h.sigma)
        self.label = f"ratio({base.label}, h={h.name})"

    def _draw_x(self, rng, n: int) -> np.ndarray:
        x = self.h.sample(rng, n)
        redrawn = 0
        for _ in range(100):
            bad = self.h.pdf(x) < _PDF_FLOOR
            k = int(bad.sum())
            if k == 0:
                break
            redrawn += k
            x[bad] = self.h.sample(rng, k)
        else:
            raise PreconditionError(
                "sampling density underflows persistently; pick a heavier h"
            )
        if redrawn > max(1, int(0.001 * n)):
            raise PreconditionError(
                f"{redrawn} of {n} draws hit the density floor; "
                "the auxiliary density is too thin for this base family"
            )
        return x

    def sample_inputs(self, rng, n) -> np.ndarray:
        if self._gauss_sigma is not None:
            return rng.normal(0.0, self._gauss_sigma, size=n)
        return self._draw_x(rng, n)

    def values_from_inputs(self, inputs, t_points) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t_points, dtype=np.float64))
        x = np.asarray(inputs, dtype=np.float64)
        if self._gauss_sigma is not None:
            sig2 = self._gauss_sigma**2
            return np.exp(t[None, :] * (2.0 * x[:, None] - t[None, :]) / (2.0 * sig2))
        return self.base.slice_matrix(x, t) / self.h.pdf(x)[:, None]

    def descriptor(self) -> dict:
        return {"type": "ratio", "base": self.base.descriptor(), "h": self.h.name}


class SpectralGenerator(GeneratorProcess):
    """Z_t = g(U, t), U uniform on (0, 1), for a unit-interval family."""

    def __init__(self, family: SpectralFamily):
        if family.domain != UNIT_INTERVAL:
            raise PreconditionError(
                "spectral sampling expects a family on the unit interval; "
                "transport real-line families by change of variable first"
            )
        self.family = family
        self.path_bound = family.sup_bound
        self.label = f"spectral({family.label})"

    def sample_inputs(self, rng, n) -> np.ndarray:
        return rng.random(n)

    def values_from_inputs(self, inputs, t_points) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t_points, dtype=np.float64))
        return self.family.slice_matrix_sampled(inputs, t)

    def descriptor(self) -> dict:
        return {"type": "spectral", "family": self.family.descriptor()}


def generator_from_descriptor(d: dict, quad_cfg=None) -> GeneratorProcess:
    if not isinstance(d, dict) or "type" not in d:
        raise PreconditionError("generator descriptor must be an object with 'type'")
    kind = d["type"]
    if kind == "constant":
        return ConstantGenerator(str(d["law"]))
    if kind == "ratio":
        base = family_from_descriptor(d["base"], quad_cfg)
        h = get_density(str(d["h"]), float(d.get("h_sigma", 1.0)))
        return RatioGenerator(base, h)
    if kind == "spectral":
        return SpectralGenerator(family_from_descriptor(d["family"], quad_cfg))
    raise PreconditionError(f"unknown generator type: {kind!r}")


def simulation_generator(family: SpectralFamily, quad_cfg=None) -> SpectralGenerator:
    """A generator inducing the family's D-norm, suitable for simulation.

    Unit-interval families sample directly.  A real-line family is first
    transported onto (0, 1) by change of variable through the Cauchy density,
    which preserves the norm and (for the shipped kernels) yields a bounded
    generator, so certified max-stable simulation stays available.
    """
    from .spectral import change_of_variable_family

    if family.domain == UNIT_INTERVAL:
        return SpectralGenerator(family)
    return SpectralGenerator(change_of_variable_family(family, "cauchy", quad_cfg))


# -- diagnostics -------------------------------------------------------------


@dataclass
class GeneratorCheckReport:
    label: str
    n: int
    t_points: list[float]
    means: list[float]
    std_errors: list[float]
    critical: float
    max_abs_z: float
    min_value: float
    max_value: float
    declared_bound: float | None
    mean_ok: bool
    nonneg_ok: bool
    bound_ok: bool

    @property
    def passed(self) -> bool:
        return self.mean_ok and self.nonneg_ok and self.bound_ok

    def as_dict(self) -> dict:
        return {
            "generator": self.label,
            "passed": self.passed,
            "n": self.n,
            "t_points": self.t_points,
            "means": self.means,
            "std_errors": self.std_errors,
            "critical": self.critical,
            "max_abs_z": self.max_abs_z,
            "min_value": self.min_value,
            "max_value": self.max_value,
            "declared_bound": self.declared_bound,
            "mean_ok": self.mean_ok,
            "nonneg_ok": self.nonneg_ok,
            "bound_ok": self.bound_ok,
        }


def check_generator(
    gen: GeneratorProcess,
    *,
    n: int = 20000,
    t_points=None,
    seed: int = 0,
    stream: int = 900,
) -> GeneratorCheckReport:
    """Sample-based sanity check: nonnegativity, unit means, declared bound.

    Means are tested per index point at the three-sigma level with a
    Bonferroni-adjusted critical value; a degenerate point (zero sample
    variance) passes only when its mean is exactly 1.
    """
    if t_points is None:
        t_points = np.arange(5) / 4.0
    t_points = np.atleast_1d(np.asarray(t_points, dtype=np.float64))
    rng = SeedSpec(seed, stream).rng()
    vals = gen.sample_values(rng, n, t_points)
    means = vals.mean(axis=0)
    ses = vals.std(axis=0, ddof=1) / math.sqrt(n)
    crit = bonferroni_critical(ALPHA_3SIGMA, len(t_points))
    zs = np.zeros(len(t_points))
    for i in range(len(t_points)):
        diff = means[i] - 1.0
        if ses[i] == 0.0:
            zs[i] = 0.0 if diff == 0.0 else math.inf
        else:
            zs[i] = diff / ses[i]
    max_abs_z = float(np.max(np.abs(zs)))
    vmin = float(vals.min())
    vmax = float(vals.max())
    bound = gen.path_bound
    return GeneratorCheckReport(
        label=gen.label,
        n=n,
        t_points=[float(t) for t in t_points],
        means=[float(m) for m in means],
        std_errors=[float(s) for s in ses],
        critical=crit,
        max_abs_z=max_abs_z,
        min_value=vmin,
        max_value=vmax,
        declared_bound=bound,
        mean_ok=max_abs_z <= crit,
        nonneg_ok=vmin >= 0.0,
        bound_ok=bound is None or vmax <= bound * (1.0 + 1e-9),
    )


VERDICT_EQUIVALENT = "EQUIVALENT-CONSISTENT"
VERDICT_DISTINGUISHED = "DISTINGUISHED"


@dataclass
class ProbeComparison:
    probe_id: str
    value1: float
    se1: float
    value2: float
    se2: float
    z: float

    def as_dict(self) -> dict:
        return {
            "probe_id": self.probe_id,
            "value1": self.value1,
            "se1": self.se1,
            "value2": self.value2,
            "se2": self.se2,
            "z": self.z,
        }


@dataclass
class EquivalenceReport:
    verdict: str
    generator1: str
    generator2: str
    critical: float
    n: int
    comparisons: list[ProbeComparison] = field(default_factory=list)

    @property
    def distinguished_probes(self) -> list[str]:
        return [
            c.probe_id for c in self.comparisons if abs(c.z) > self.critical
        ]

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "generator1": self.generator1,
            "generator2": self.generator2,
            "critical": self.critical,
            "n": self.n,
            "comparisons": [c.as_dict() for c in self.comparisons],
            "distinguished_probes": self.distinguished_probes,
        }


def generators_equivalent(
    gen1: GeneratorProcess,
    gen2: GeneratorProcess,
    probes: dict[str, EFunction],
    *,
    n: int = 200000,
    seed: int = 0,
    alpha: float = ALPHA_3SIGMA,
    workers: int | None = None,
) -> EquivalenceReport:
    """Compare the induced D-norms of two generators on a probe set.

    Verdicts are deliberately asymmetric: a significant difference on any
    probe DISTINGUISHES the generators, while agreement everywhere is only
    consistency with equivalence, never proof.  Estimates use independent
    streams; z combines both standard errors, and identical-zero probes
    (difference 0 with zero variance) count as agreement.
    """
    from .dnorm import dnorm_monte_carlo, probe_items  # deferred: dnorm imports this module

    items = probe_items(probes)
    if not items:
        raise PreconditionError("probe set must not be empty")
    crit = bonferroni_critical(alpha, len(items))
    comparisons = []
    for i, (pid, f) in enumerate(items):
        e1 = dnorm_monte_carlo(
            f, gen1, n=n, seed=seed, stream=2 * i, workers=workers
        )
        e2 = dnorm_monte_carlo(
            f, gen2, n=n, seed=seed, stream=2 * i + 1, workers=workers
        )
        diff = e1.value - e2.value
        denom = math.hypot(e1.se, e2.se)
        if denom == 0.0:
            z = 0.0 if diff == 0.0 else math.inf
        else:
            z = diff / denom
        comparisons.append(
            ProbeComparison(pid, e1.value, e1.se, e2.value, e2.se, float(z))
        )
    verdict = (
        VERDICT_DISTINGUISHED
        if any(abs(c.z) > crit for c in comparisons)
        else VERDICT_EQUIVALENT
    )
    return EquivalenceReport(
        verdict=verdict,
        generator1=gen1.label,
        generator2=gen2.label,
        critical=crit,
        n=n,
        comparisons=comparisons,
    )
