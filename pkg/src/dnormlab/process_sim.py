"""Simulation of standard max-stable and generalized Pareto processes.

Max-stable construction: with Gamma_k the partial sums of iid standard
exponentials, the points R_k = 1/Gamma_k form a Poisson process on (0, inf)
with mean measure r^-2 dr.  Attaching an independent generator path Z_k to
each point and taking A(t) = max_k R_k Z_k(t), the field eta = -1/A is
max-stable with completely negative paths, and for every nonpositive f the
void-probability computation gives, exactly on any finite point set,

    P(eta <= f at all points) = exp(-E[max_j |f(t_j)| Z_{t_j}]).

The series is truncated.  When the generator declares an almost-sure path
bound M, truncation can be certified: points arrive with decreasing R, so
once the next R times M falls below the current pointwise minimum of A no
later point can alter the maximum, and the simulated vector carries the
exact distribution.  Without a bound the series is capped after a fixed
number of points and every affected path is flagged as uncertified.

Every replicate owns a seed substream keyed by its global index, and the
per-round draw schedule is fixed, so a replicate's draws are independent of
batching, worker count, and truncation policy; a capped rerun of the same
seed reproduces certified paths bit for bit.

Pareto construction: V = -U/Z with U uniform on (0, 1] independent of Z.
When sup_t Z_t <= M almost surely, every nonpositive f with sup |f| <= 1/M
satisfies P(V <= f at all points) = 1 - E[max_j |f(t_j)| Z_{t_j}], again
exactly on the point set.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dnorm import dnorm_quadrature, probe_items
from .efunc import EFunction, GridConfig, scale, standard_probes, sup_norm
from .errors import (
    DnormLabError,
    GridMismatchError,
    PreconditionError,
)
from .generator import GeneratorProcess
from .numerics import ALPHA_3SIGMA, QuadConfig, SeedSpec, bonferroni_critical
from .spectral import SpectralFamily

_ROUND_SIZES = (16, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096)
_MAX_ROUNDS = 10000
DEFAULT_BLOCK = 1024


@dataclass(frozen=True)
class TruncationPolicy:
    """How the Poisson point series is cut off.

    certified: run each path until no further point can change it (needs a
    declared path bound).  capped: stop after max_points and flag paths that
    did not certify along the way.
    """

    mode: str = "certified"
    max_points: int = 4096

    def __post_init__(self):
        if self.mode not in ("certified", "capped"):
            raise PreconditionError(
                f"truncation mode must be 'certified' or 'capped', got {self.mode!r}"
            )
        if self.max_points < 16:
            raise PreconditionError("max_points must be at least 16")


@dataclass
class PathEnsemble:
    """Simulated max-stable paths restricted to a point set."""

    t_points: np.ndarray
    values: np.ndarray
    points_used: np.ndarray
    certified: np.ndarray
    policy: TruncationPolicy
    generator_label: str
    seed: int
    stream: int

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def fraction_certified(self) -> float:
        return float(self.certified.mean()) if self.n else 0.0


@dataclass
class GPPEnsemble:
    """Simulated generalized Pareto paths restricted to a point set."""

    t_points: np.ndarray
    values: np.ndarray
    x0: float
    generator_label: str
    seed: int
    stream: int
    zero_z_count: int = 0  # grid points replaced by the sentinel value

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _default_policy(gen: GeneratorProcess, policy: TruncationPolicy | None):
    policy = policy or TruncationPolicy("certified")
    if policy.mode == "certified" and gen.path_bound is None:
        raise PreconditionError(
            "certified truncation needs a generator with a declared "
            "almost-sure path bound; rerun with a capped policy"
        )
    return policy


def _msp_block(task):
    gen, t_points, policy, seed, stream, start, size = task
    n_t = len(t_points)
    spec = SeedSpec(seed, stream)
    rngs = [spec.rng(start + i) for i in range(size)]
    a_field = np.zeros((size, n_t))
    gam = np.zeros(size)
    used = np.zeros(size, dtype=np.int64)
    certified = np.zeros(size, dtype=bool)
    active = np.arange(size)
    bound = gen.path_bound
    round_idx = 0
    while active.size:
        k = _ROUND_SIZES[min(round_idx, len(_ROUND_SIZES) - 1)]
        if policy.mode == "capped":
            # all active paths have consumed the same rounds so far
            k = max(1, min(k, policy.max_points - int(used[active[0]])))
        exp_inc = np.empty((active.size, k))
        inputs = np.empty((active.size, k))
        for j, p in enumerate(active):
            r = rngs[p]
            exp_inc[j] = r.standard_exponential(k)
            inputs[j] = gen.sample_inputs(r, k)
        gam_steps = gam[active, None] + np.cumsum(exp_inc, axis=1)
        vals = gen.values_from_inputs(inputs.reshape(-1), t_points)
        vals = np.asarray(vals).reshape(active.size, k, n_t)
        contrib = ((1.0 / gam_steps)[:, :, None] * vals).max(axis=1)
        a_field[active] = np.maximum(a_field[active], contrib)
        gam[active] = gam_steps[:, -1]
        used[active] += k
        done = np.zeros(active.size, dtype=bool)
        if bound is not None:
            # no later point can exceed the current minimum anywhere
            ok = bound / gam[active] <= a_field[active].min(axis=1)
            certified[active[ok]] = True
            done |= ok
        if policy.mode == "capped":
            done |= used[active] >= policy.max_points
        active = active[~done]
        round_idx += 1
        if round_idx > _MAX_ROUNDS:
            raise DnormLabError("point series failed to terminate")
    with np.errstate(divide="ignore"):
        values = -1.0 / a_field
    return start, values, used, certified


def _block_tasks(gen, t_points, n, seed, stream, policy, block_size):
    return [
        (gen, t_points, policy, seed, stream, s, min(block_size, n - s))
        for s in range(0, n, block_size)
    ]


def _run_tasks(fn, tasks, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(fn, tasks)
    else:
        for t in tasks:
            yield fn(t)


def simulate_msp(
    gen: GeneratorProcess,
    *,
    t_points=None,
    grid: GridConfig | None = None,
    n: int = 1,
    seed: int = 0,
    stream: int = 200,
    policy: TruncationPolicy | None = None,
    workers: int | None = None,
    block_size: int = DEFAULT_BLOCK,
) -> PathEnsemble:
    """n max-stable paths on the grid (or explicit t_points)."""
    if n < 1:
        raise PreconditionError("need n >= 1 paths")
    policy = _default_policy(gen, policy)
    if t_points is None:
        t_points = (grid or GridConfig()).points
    t_points = np.asarray(t_points, dtype=np.float64)
    tasks = _block_tasks(gen, t_points, n, seed, stream, policy, block_size)
    values = np.empty((n, len(t_points)))
    used = np.empty(n, dtype=np.int64)
    certified = np.empty(n, dtype=bool)
    for start, v, u, c in _run_tasks(_msp_block, tasks, workers):
        values[start : start + len(v)] = v
        used[start : start + len(u)] = u
        certified[start : start + len(c)] = c
    return PathEnsemble(
        t_points, values, used, certified, policy, gen.label, seed, stream
    )


# a path value where Z hit exactly 0; far below any threshold a nonpositive
# probe bounded away from -inf can set, so df counts are unaffected
GPP_SENTINEL = -1e300


def _gpp_chunk(task):
    gen, t_points, seed, stream, index, size = task
    rng = SeedSpec(seed, stream).rng(index)
    u = 1.0 - rng.random(size)  # uniform on (0, 1]
    z = gen.sample_values(rng, size, t_points)
    zero = z == 0.0
    with np.errstate(divide="ignore", over="ignore"):
        values = -u[:, None] / z
    # a zero or denormal Z puts the ratio past float range; both collapse
    # to the sentinel so paths stay finite
    bad = ~np.isfinite(values)
    if bad.any():
        values[bad] = GPP_SENTINEL
    np.maximum(values, GPP_SENTINEL, out=values)
    return index, values, int(zero.sum())


def simulate_gpp(
    gen: GeneratorProcess,
    *,
    t_points=None,
    grid: GridConfig | None = None,
    n: int = 1,
    seed: int = 0,
    stream: int = 600,
    workers: int | None = None,
    chunk_size: int = 20000,
) -> GPPEnsemble:
    """n generalized Pareto paths V = -U/Z on the grid."""
    if n < 1:
        raise PreconditionError("need n >= 1 paths")
    if gen.path_bound is None:
        raise PreconditionError(
            "the Pareto construction needs a generator with a declared "
            "almost-sure path bound (x0 = 1/bound would otherwise be 0)"
        )
    if t_points is None:
        t_points = (grid or GridConfig()).points
    t_points = np.asarray(t_points, dtype=np.float64)
    tasks = [
        (gen, t_points, seed, stream, i, min(chunk_size, n - i * chunk_size))
        for i in range((n + chunk_size - 1) // chunk_size)
    ]
    values = np.empty((n, len(t_points)))
    pos = 0
    zero_z = 0
    for _, v, nz in _run_tasks(_gpp_chunk, tasks, workers):
        values[pos : pos + len(v)] = v
        pos += len(v)
        zero_z += nz
    return GPPEnsemble(
        t_points, values, 1.0 / gen.path_bound, gen.label, seed, stream, zero_z
    )


# -- empirical distribution functions ----------------------------------------


@dataclass(frozen=True)
class EmpiricalDF:
    p_hat: float
    count: int
    n: int


def _thresholds(f: EFunction, t_points: np.ndarray) -> np.ndarray:
    if not f.is_nonpositive():
        raise PreconditionError(
            "the distribution identities hold for nonpositive functions only"
        )
    off = [t for t, _ in f.spikes if not np.any(t_points == t)]
    if off:
        raise GridMismatchError(
            f"probe has spikes off the simulated point set at t={off}"
        )
    return f.values_at(t_points)


def empirical_fdf(ensemble: PathEnsemble | GPPEnsemble, f: EFunction) -> EmpiricalDF:
    """Fraction of simulated paths lying below f everywhere on the point set."""
    thr = _thresholds(f, ensemble.t_points)
    below = (ensemble.values <= thr[None, :]).all(axis=1)
    return EmpiricalDF(float(below.mean()), int(below.sum()), ensemble.n)


# -- distribution verification -----------------------------------------------


@dataclass
class DFCheckRow:
    probe_id: str
    norm_value: float
    quad_error: float
    p_theory: float
    p_hat: float
    se: float
    z: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "probe_id": self.probe_id,
            "norm_value": self.norm_value,
            "quad_error": self.quad_error,
            "theoretical": self.p_theory,
            "empirical": self.p_hat,
            "se": self.se,
            "z": self.z,
            "pass": self.passed,
        }


@dataclass
class DFReport:
    kind: str
    generator: str
    family: str
    n: int
    critical: float
    rows: list[DFCheckRow] = field(default_factory=list)
    fraction_certified: float | None = None
    x0: float | None = None
    probe_margin: float | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def as_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "generator": self.generator,
            "family": self.family,
            "n": self.n,
            "critical": self.critical,
            "passed": self.passed,
            "rows": [r.as_dict() for r in self.rows],
        }
        if self.fraction_certified is not None:
            out["fraction_certified"] = self.fraction_certified
        if self.x0 is not None:
            out["x0"] = self.x0
            out["probe_margin"] = self.probe_margin
        return out


def _z_score(p_hat: float, p_theory: float, se: float) -> float:
    diff = p_hat - p_theory
    if se == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / se


def verify_msp_df(
    gen: GeneratorProcess,
    family: SpectralFamily,
    probes: dict[str, EFunction] | None = None,
    *,
    grid: GridConfig | None = None,
    n: int = 100000,
    seed: int = 0,
    stream: int = 500,
    policy: TruncationPolicy | None = None,
    workers: int | None = None,
    quad_cfg: QuadConfig | None = None,
    alpha: float = ALPHA_3SIGMA,
    block_size: int = DEFAULT_BLOCK,
) -> DFReport:
    """Empirical P(eta <= f) against exp(-norm) for every probe.

    The reference probability uses the quadrature route, so a pass ties the
    simulator to the analytic family with no shared code path.  Standard
    errors come from the theoretical probability (binomial), and the pass
    threshold is Bonferroni-adjusted across probes at the alpha level.
    Paths are shared across probes; each probe's test is marginal.
    """
    policy = _default_policy(gen, policy)
    grid = grid or GridConfig()
    items = probe_items(probes if probes is not None else standard_probes(grid))
    t_points = grid.points
    thr = np.stack([_thresholds(f, t_points) for _, f in items])
    counts = np.zeros(len(items), dtype=np.int64)
    certified_total = 0
    tasks = _block_tasks(gen, t_points, n, seed, stream, policy, block_size)
    for _, values, _, cert in _run_tasks(_msp_block, tasks, workers):
        below = (values[None, :, :] <= thr[:, None, :]).all(axis=2)
        counts += below.sum(axis=1)
        certified_total += int(cert.sum())
    crit = bonferroni_critical(alpha, len(items))
    rows = []
    for i, (pid, f) in enumerate(items):
        quad = dnorm_quadrature(f, family, quad_cfg)
        p_theory = math.exp(-quad.value)
        se = math.sqrt(p_theory * (1.0 - p_theory) / n)
        p_hat = counts[i] / n
        z = _z_score(p_hat, p_theory, se)
        rows.append(
            DFCheckRow(
                pid, quad.value, quad.error_estimate, p_theory, p_hat, se, z,
                abs(z) <= crit,
            )
        )
    return DFReport(
        kind="msp",
        generator=gen.label,
        family=family.label,
        n=n,
        critical=crit,
        rows=rows,
        fraction_certified=certified_total / n,
    )


def verify_gpp_df(
    gen: GeneratorProcess,
    family: SpectralFamily,
    probes: dict[str, EFunction] | None = None,
    *,
    grid: GridConfig | None = None,
    n: int = 200000,
    seed: int = 0,
    stream: int = 600,
    workers: int | None = None,
    quad_cfg: QuadConfig | None = None,
    alpha: float = ALPHA_3SIGMA,
    chunk_size: int = 20000,
    probe_margin: float = 0.9,
) -> DFReport:
    """Empirical P(V <= f) against 1 - norm near the validity boundary.

    Each nonzero probe is rescaled to probe_margin times x0 = 1/bound in the
    sup-norm, the largest scale at which the identity is exact; the zero
    probe stays put and pins the df at 1.
    """
    if gen.path_bound is None:
        raise PreconditionError(
            "the Pareto identity needs a generator with a declared bound"
        )
    if not 0.0 < probe_margin <= 1.0:
        raise PreconditionError("probe_margin must lie in (0, 1]")
    x0 = 1.0 / gen.path_bound
    grid = grid or GridConfig()
    items = probe_items(probes if probes is not None else standard_probes(grid))
    t_points = grid.points
    scaled = []
    for pid, f in items:
        sup = sup_norm(f)
        if sup > 0.0:
            f = scale(f, probe_margin * x0 / sup)
        scaled.append((pid, f))
    thr = np.stack([_thresholds(f, t_points) for _, f in scaled])
    counts = np.zeros(len(scaled), dtype=np.int64)
    tasks = [
        (gen, t_points, seed, stream, i, min(chunk_size, n - i * chunk_size))
        for i in range((n + chunk_size - 1) // chunk_size)
    ]
    for _, values, _nz in _run_tasks(_gpp_chunk, tasks, workers):
        below = (values[None, :, :] <= thr[:, None, :]).all(axis=2)
        counts += below.sum(axis=1)
    crit = bonferroni_critical(alpha, len(scaled))
    rows = []
    for i, (pid, f) in enumerate(scaled):
        quad = dnorm_quadrature(f, family, quad_cfg)
        p_theory = 1.0 - quad.value
        se = math.sqrt(max(p_theory * (1.0 - p_theory), 0.0) / n)
        p_hat = counts[i] / n
        z = _z_score(p_hat, p_theory, se)
        rows.append(
            DFCheckRow(
                pid, quad.value, quad.error_estimate, p_theory, p_hat, se, z,
                abs(z) <= crit,
            )
        )
    return DFReport(
        kind="gpp",
        generator=gen.label,
        family=family.label,
        n=n,
        critical=crit,
        rows=rows,
        x0=x0,
        probe_margin=probe_margin,
    )


# -- max-stability ------------------------------------------------------------


@dataclass
class MaxStabilityRow:
    probe_id: str
    p_group_max: float
    p_rescaled: float
    z: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "probe_id": self.probe_id,
            "p_group_max": self.p_group_max,
            "p_rescaled": self.p_rescaled,
            "z": self.z,
            "passed": self.passed,
        }


@dataclass
class MaxStabilityReport:
    generator: str
    k: int
    n: int
    critical: float
    rows: list[MaxStabilityRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def as_dict(self) -> dict:
        return {
            "generator": self.generator,
            "k": self.k,
            "n": self.n,
            "critical": self.critical,
            "passed": self.passed,
            "rows": [r.as_dict() for r in self.rows],
        }


def max_stability_check(
    gen: GeneratorProcess,
    probes: dict[str, EFunction] | None = None,
    *,
    k: int = 2,
    grid: GridConfig | None = None,
    n: int = 50000,
    seed: int = 0,
    stream: int = 700,
    policy: TruncationPolicy | None = None,
    workers: int | None = None,
    alpha: float = ALPHA_3SIGMA,
    block_size: int = DEFAULT_BLOCK,
) -> MaxStabilityReport:
    """Pointwise maxima of k independent copies against the 1/k rescaling.

    Max-stability says the two sides share a distribution; per probe a pooled
    two-proportion z-test compares P(group max <= f) with P(eta <= k f),
    which is the 1/k rescaling pushed through the threshold.  Needs k >= 2.
    """
    if k < 2:
        raise PreconditionError("max-stability comparison needs k >= 2")
    policy = _default_policy(gen, policy)
    grid = grid or GridConfig()
    items = probe_items(probes if probes is not None else standard_probes(grid))
    t_points = grid.points
    thr_single = np.stack([_thresholds(f, t_points) for _, f in items])
    thr_scaled = np.stack(
        [_thresholds(scale(f, float(k)), t_points) for _, f in items]
    )

    # side one: n groups of k paths each, maxima taken inside each group
    group_block = max(k, (block_size // k) * k)
    counts_group = np.zeros(len(items), dtype=np.int64)
    tasks = _block_tasks(gen, t_points, n * k, seed, stream, policy, group_block)
    for _, values, _, _ in _run_tasks(_msp_block, tasks, workers):
        gmax = values.reshape(-1, k, len(t_points)).max(axis=1)
        below = (gmax[None, :, :] <= thr_single[:, None, :]).all(axis=2)
        counts_group += below.sum(axis=1)

    # side two: n single paths against the scaled thresholds
    counts_single = np.zeros(len(items), dtype=np.int64)
    tasks = _block_tasks(gen, t_points, n, seed, stream + 1, policy, block_size)
    for _, values, _, _ in _run_tasks(_msp_block, tasks, workers):
        below = (values[None, :, :] <= thr_scaled[:, None, :]).all(axis=2)
        counts_single += below.sum(axis=1)

    crit = bonferroni_critical(alpha, len(items))
    rows = []
    for i, (pid, _) in enumerate(items):
        p1 = counts_group[i] / n
        p2 = counts_single[i] / n
        pooled = (counts_group[i] + counts_single[i]) / (2 * n)
        se = math.sqrt(max(pooled * (1.0 - pooled), 0.0) * 2.0 / n)
        z = _z_score(p1, p2, se)
        rows.append(MaxStabilityRow(pid, p1, p2, z, abs(z) <= crit))
    return MaxStabilityReport(gen.label, k, n, crit, rows)
