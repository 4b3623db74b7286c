"""D-norm evaluation: quadrature and Monte Carlo routes.

The norm of f is E[sup_t |f(t)| Z_t].  Off a function's support the product
is zero, so both routes reduce the sup to f's finitely many support points;
no discretization beyond that point set is involved, which is what makes
route agreement a sharp test.

Quadrature route: integrate s -> max_j |f(p_j)| g(s, p_j) over the family's
s-domain.  Monte Carlo route: average max_j |f(p_j)| Z_{p_j} over generator
paths, in fixed-size chunks with one substream per chunk, so results do not
depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .efunc import (
    EFunction,
    GridConfig,
    pointwise_add,
    scale,
    standard_probes,
    sup_norm,
)
from .errors import PreconditionError
from .generator import GeneratorProcess
from .numerics import DEFAULT_QUAD, IntegralResult, QuadConfig, SeedSpec, integrate
from .spectral import SpectralFamily

DEFAULT_CHUNK = 100000


def probe_items(probes) -> list[tuple[str, EFunction]]:
    """Normalize a probe collection to (name, function) pairs."""
    return list(probes.items()) if isinstance(probes, dict) else list(probes)


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo mean with its standard error."""

    value: float
    se: float
    n: int

    def half_width(self, k: float = 3.0) -> float:
        return k * self.se

    def as_dict(self) -> dict:
        return {"value": self.value, "se": self.se, "n": self.n}


def _support_weights(f: EFunction) -> tuple[np.ndarray, np.ndarray]:
    pts = f.support_t
    w = np.abs(f.support_values)
    keep = w > 0.0
    return pts[keep], w[keep]


def dnorm_quadrature(
    f: EFunction,
    family: SpectralFamily,
    cfg: QuadConfig | None = None,
) -> IntegralResult:
    """Norm of f under the family's induced D-norm, by adaptive quadrature."""
    cfg = cfg or DEFAULT_QUAD
    pts, w = _support_weights(f)
    if pts.size == 0:
        return IntegralResult(0.0, 0.0)

    def integrand(s):
        return (family.slice_matrix(s, pts) * w[None, :]).max(axis=1)

    hints = [family.slice_support(float(p)) for p in pts]
    if all(h is not None for h in hints):
        hint = (min(h[0] for h in hints), max(h[1] for h in hints))
    else:
        hint = family.envelope_support_hint()

    wmax = float(w.max())

    def tail(lo, hi):
        m = family.envelope_tail_mass(lo, hi)
        return None if m is None else wmax * m

    return integrate(
        integrand,
        family.domain,
        cfg,
        support_hint=hint,
        envelope_tail=tail,
        initial_panels=16,
    )


def _mc_chunk(args):
    gen, pts, w, seed, stream, index, size = args
    rng = SeedSpec(seed, stream).rng(index)
    vals = gen.sample_values(rng, size, pts)
    y = (vals * w[None, :]).max(axis=1)
    return index, float(y.sum()), float(np.dot(y, y))


def dnorm_monte_carlo(
    f: EFunction,
    gen: GeneratorProcess,
    *,
    n: int = 200000,
    seed: int = 0,
    stream: int = 0,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int | None = None,
) -> MCEstimate:
    """Norm of f estimated from generator paths.

    The chunk layout is a function of (n, chunk_size) alone and every chunk
    owns a dedicated substream, so the estimate is bit-identical for any
    worker count.
    """
    if n < 2:
        raise PreconditionError("monte carlo estimation needs n >= 2")
    pts, w = _support_weights(f)
    if pts.size == 0:
        return MCEstimate(0.0, 0.0, n)
    sizes = [chunk_size] * (n // chunk_size)
    if n % chunk_size:
        sizes.append(n % chunk_size)
    tasks = [
        (gen, pts, w, seed, stream, i, size) for i, size in enumerate(sizes)
    ]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_mc_chunk, tasks))
    else:
        results = [_mc_chunk(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    total = 0.0
    total_sq = 0.0
    for _, s, ss in results:
        total += s
        total_sq += ss
    value = total / n
    var = max(total_sq - n * value * value, 0.0) / (n - 1)
    return MCEstimate(value, math.sqrt(var / n), n)


def generator_constant(
    gen: GeneratorProcess,
    *,
    grid: GridConfig | None = None,
    n: int = 200000,
    seed: int = 0,
    stream: int = 100,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int | None = None,
) -> MCEstimate:
    """E[sup_t Z_t] over the grid points: the norm of the constant -1."""
    from .efunc import constant_function

    grid = grid or GridConfig()
    return dnorm_monte_carlo(
        constant_function(-1.0, grid),
        gen,
        n=n,
        seed=seed,
        stream=stream,
        chunk_size=chunk_size,
        workers=workers,
    )


# -- norm axiom suite --------------------------------------------------------


@dataclass
class AxiomCheck:
    axiom: str
    subject: str
    lhs: float
    rhs: float
    passed: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def as_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "subject": self.subject,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "passed": self.passed,
        }


@dataclass
class AxiomSuiteReport:
    generator: str
    n: int
    checks: list[AxiomCheck] = field(default_factory=list)
    estimates: dict[str, MCEstimate] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "generator": self.generator,
            "n": self.n,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "estimates": {k: e.as_dict() for k, e in self.estimates.items()},
        }


_TRIANGLE_PAIRS = (("spike_0", "spike_1"), ("const_-0.5", "ramp"))
_DOMINANCE_PAIRS = (("const_-0.5", "const_-1"), ("ramp", "const_-1"))
_HOMOGENEITY_SCALE = 2.5


def norm_axiom_suite(
    gen: GeneratorProcess,
    grid: GridConfig | None = None,
    *,
    n: int = 200000,
    seed: int = 0,
    stream: int = 400,
    chunk_size: int = 20000,
    rel_tol: float = 1e-9,
) -> AxiomSuiteReport:
    """Check the norm axioms on the standard probes with shared paths.

    Every check here is an exact path-by-path inequality or identity, so a
    single simulated ensemble verifies all of them up to floating-point
    roundoff (rel_tol); no statistical tolerance is involved.  Homogeneity
    scales a probe, the triangle inequality uses pointwise sums, dominance
    compares |f| <= |g| pairs, and the sandwich brackets each norm between
    the largest |f| value (times the path value there) and the path
    supremum over the probe's support.
    """
    grid = grid or GridConfig()
    probes = dict(standard_probes(grid))

    derived: dict[str, EFunction] = {}
    for pid, f in probes.items():
        if pid != "zero":
            derived[f"scale:{pid}"] = scale(f, _HOMOGENEITY_SCALE)
    for a, b in _TRIANGLE_PAIRS:
        derived[f"sum:{a}+{b}"] = pointwise_add(probes[a], probes[b])
    everything = {**probes, **derived}

    meta: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    support_union: list[np.ndarray] = []
    for pid, f in everything.items():
        pts, w = _support_weights(f)
        meta[pid] = (pts, w)
        support_union.append(pts)
    union = np.unique(np.concatenate(support_union))

    cols = {}
    argmax_col = {}
    for pid, (pts, w) in meta.items():
        cols[pid] = np.searchsorted(union, pts)
        if pts.size:
            argmax_col[pid] = int(np.searchsorted(union, pts[np.argmax(w)]))

    acc = {
        pid: {"sum": 0.0, "sumsq": 0.0, "supz": 0.0, "ztstar": 0.0}
        for pid in everything
    }
    sizes = [chunk_size] * (n // chunk_size)
    if n % chunk_size:
        sizes.append(n % chunk_size)
    spec = SeedSpec(seed, stream)
    for index, size in enumerate(sizes):
        vals = gen.sample_values(spec.rng(index), size, union)
        for pid, (pts, w) in meta.items():
            a = acc[pid]
            if pts.size == 0:
                continue
            block = vals[:, cols[pid]]
            y = (block * w[None, :]).max(axis=1)
            a["sum"] += float(y.sum())
            a["sumsq"] += float(np.dot(y, y))
            a["supz"] += float(block.max(axis=1).sum())
            a["ztstar"] += float(vals[:, argmax_col[pid]].sum())

    means = {pid: acc[pid]["sum"] / n for pid in everything}
    estimates = {}
    for pid in probes:
        m = means[pid]
        var = max(acc[pid]["sumsq"] - n * m * m, 0.0) / (n - 1)
        estimates[pid] = MCEstimate(m, math.sqrt(var / n), n)

    def tol(ref: float) -> float:
        return rel_tol * max(1.0, abs(ref))

    checks = []
    checks.append(
        AxiomCheck("zero", "zero", means["zero"], 0.0, means["zero"] == 0.0)
    )
    for pid, f in probes.items():
        if pid == "zero":
            continue
        lhs = means[f"scale:{pid}"]
        rhs = _HOMOGENEITY_SCALE * means[pid]
        checks.append(
            AxiomCheck(
                "homogeneity",
                f"{_HOMOGENEITY_SCALE}*{pid}",
                lhs,
                rhs,
                abs(lhs - rhs) <= tol(rhs),
            )
        )
    for a, b in _TRIANGLE_PAIRS:
        lhs = means[f"sum:{a}+{b}"]
        rhs = means[a] + means[b]
        checks.append(
            AxiomCheck("triangle", f"{a}+{b}", lhs, rhs, lhs <= rhs + tol(rhs))
        )
    for small, large in _DOMINANCE_PAIRS:
        lhs = means[small]
        rhs = means[large]
        checks.append(
            AxiomCheck(
                "monotonicity",
                f"{small}<={large}",
                lhs,
                rhs,
                lhs <= rhs + tol(rhs),
            )
        )
    for pid, f in probes.items():
        if pid == "zero":
            continue
        sup = sup_norm(f)
        lower = sup * acc[pid]["ztstar"] / n
        upper = sup * acc[pid]["supz"] / n
        v = means[pid]
        checks.append(
            AxiomCheck(
                "sandwich_lower", pid, lower, v, lower <= v + tol(v)
            )
        )
        checks.append(
            AxiomCheck("sandwich_upper", pid, v, upper, v <= upper + tol(upper))
        )
    return AxiomSuiteReport(gen.label, n, checks, estimates)
