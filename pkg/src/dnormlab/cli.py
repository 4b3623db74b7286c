"""Command line interface.

Subcommands mirror the library: `eval` (quadrature route), `mc` (Monte Carlo
route), `simulate msp|gpp`, and the `verify` battery.  Families, generators,
and probes are given as JSON (inline or @file) or as colon shorthands like
`gaussian:1`, `cov:cauchy:gaussian:1`, `spectral:uniform_wedge`.

Every run writes a config echo plus its tables into --out-dir; reruns with
identical arguments produce byte-identical files (worker count and output
location are deliberately excluded from the echo).  Exit codes: 0 success,
1 a verification check failed, 2 bad inputs or violated preconditions,
3 quadrature non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .dnorm import dnorm_monte_carlo, dnorm_quadrature, norm_axiom_suite
from .efunc import (
    DEFAULT_RESOLUTION,
    GridConfig,
    from_dict,
    standard_probes,
    to_dict,
)
from .errors import (
    DnormLabError,
    GridMismatchError,
    PreconditionError,
    QuadratureNonConvergence,
)
from .generator import (
    generator_from_descriptor,
    generators_equivalent,
    simulation_generator,
)
from .numerics import ALPHA_3SIGMA, QuadConfig
from .process_sim import (
    TruncationPolicy,
    max_stability_check,
    simulate_gpp,
    simulate_msp,
    verify_gpp_df,
    verify_msp_df,
)
from .report import (
    ensure_out_dir,
    render_axiom_margins,
    render_df_check,
    render_paths,
    render_validation,
    render_value_rows,
    render_z_scores,
    write_csv,
    write_dat,
    write_json,
    write_jsonl,
)
from .spectral import family_from_descriptor, validate_family

SEED_ENV = "DNORM_LAB_SEED"


# -- argument parsing helpers ------------------------------------------------


def _read_arg_text(text: str) -> str:
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return fh.read()
    return text


def parse_family_descriptor(text: str) -> dict:
    raw = _read_arg_text(text).strip()
    if raw.startswith("{"):
        d = json.loads(raw)
        if not isinstance(d, dict):
            raise PreconditionError("family descriptor must be a JSON object")
        return d
    parts = raw.split(":")
    kind = parts[0]
    if kind == "uniform_wedge" and len(parts) == 1:
        return {"type": "uniform_wedge"}
    if kind == "gaussian" and len(parts) == 2:
        return {"type": "gaussian", "sigma": float(parts[1])}
    if kind == "kernel_shift" and len(parts) == 3:
        return {"type": "kernel_shift", "psi": parts[1], "beta": float(parts[2])}
    if kind == "cov" and len(parts) >= 3:
        return {
            "type": "change_of_variable",
            "h": parts[1],
            "base": parse_family_descriptor(":".join(parts[2:])),
        }
    raise PreconditionError(f"cannot parse family argument: {text!r}")


def parse_generator_descriptor(text: str) -> dict:
    raw = _read_arg_text(text).strip()
    if raw.startswith("{"):
        d = json.loads(raw)
        if not isinstance(d, dict):
            raise PreconditionError("generator descriptor must be a JSON object")
        return d
    parts = raw.split(":")
    if parts[0] == "constant" and len(parts) == 2:
        return {"type": "constant", "law": parts[1]}
    if parts[0] == "spectral" and len(parts) >= 2:
        return {
            "type": "spectral",
            "family": parse_family_descriptor(":".join(parts[1:])),
        }
    if parts[0] == "ratio" and len(parts) >= 3:
        return {
            "type": "ratio",
            "h": parts[1],
            "base": parse_family_descriptor(":".join(parts[2:])),
        }
    raise PreconditionError(f"cannot parse generator argument: {text!r}")


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise PreconditionError(
                f"{SEED_ENV} must be an integer, got {env!r}"
            ) from None
    return 0


def _quad_cfg(args) -> QuadConfig | None:
    tol = getattr(args, "quad_tol", None)
    if tol is None:
        return None
    return QuadConfig(abs_tol=tol, rel_tol=tol)


def _load_probes(args, grid: GridConfig):
    """Returns (items, echo): probe pairs plus what to put in the config."""
    texts = getattr(args, "probe", None)
    if not texts:
        return standard_probes(grid), "standard"
    items = []
    echo = []
    for i, text in enumerate(texts):
        d = json.loads(_read_arg_text(text))
        if not isinstance(d, dict):
            raise PreconditionError("probe descriptor must be a JSON object")
        pid = str(d.pop("id", f"probe_{i}"))
        d.setdefault("grid_resolution", grid.resolution)
        f = from_dict(d)
        if f.grid.resolution != grid.resolution:
            raise GridMismatchError(
                f"probe {pid} lives on resolution {f.grid.resolution}, "
                f"run uses {grid.resolution}"
            )
        items.append((pid, f))
        echo.append({"id": pid, **to_dict(f)})
    return items, echo


def _resolve_generator(args, quad_cfg):
    """Generator plus the descriptors to echo.

    --generator wins; otherwise a sampling generator is derived from
    --family (real-line families are transported onto the unit interval).
    """
    gen_text = getattr(args, "generator", None)
    fam_text = getattr(args, "family", None)
    fam = fam_desc = None
    if fam_text:
        fam_desc = parse_family_descriptor(fam_text)
        fam = family_from_descriptor(fam_desc, quad_cfg)
    if gen_text:
        gen_desc = parse_generator_descriptor(gen_text)
        gen = generator_from_descriptor(gen_desc, quad_cfg)
        return gen, fam, gen_desc, fam_desc
    if fam is None:
        raise PreconditionError("provide --family or --generator")
    gen = simulation_generator(fam, quad_cfg)
    return gen, fam, gen.descriptor(), fam_desc


def _policy(args) -> TruncationPolicy:
    return TruncationPolicy(
        getattr(args, "policy", "certified"),
        getattr(args, "max_points", 4096),
    )


# -- output helpers ----------------------------------------------------------

_ROUTE_HEADER = ["probe_id", "route", "value", "se", "n", "seed"]


def _write_route_rows(args, out: str, rows: list[dict]) -> None:
    if args.format == "json":
        write_json(os.path.join(out, "results.json"), {"rows": rows})
    else:
        write_csv(
            os.path.join(out, "results.csv"),
            _ROUTE_HEADER,
            [[r[k] for k in _ROUTE_HEADER] for r in rows],
        )


def _write_config(out: str, config: dict) -> None:
    write_json(os.path.join(out, "config.json"), config)


def _value_figure(args, out: str, rows: list[dict]) -> None:
    if args.figures:
        render_value_rows(os.path.join(out, "values.png"), rows)
    if args.plot_data:
        write_dat(
            os.path.join(out, "values.dat"),
            {
                "probe_index": np.arange(len(rows), dtype=np.float64),
                "value": np.asarray([r["value"] for r in rows]),
                "three_se": np.asarray([3.0 * (r["se"] or 0.0) for r in rows]),
            },
        )


# -- commands ----------------------------------------------------------------


def cmd_eval(args) -> int:
    cfg = _quad_cfg(args)
    fam_desc = parse_family_descriptor(args.family)
    fam = family_from_descriptor(fam_desc, cfg)
    grid = GridConfig(args.grid_resolution)
    probes, probe_echo = _load_probes(args, grid)
    out = ensure_out_dir(args.out_dir)
    rows = []
    for pid, f in probes:
        res = dnorm_quadrature(f, fam, cfg)
        rows.append(
            {
                "probe_id": pid,
                "route": "quadrature",
                "value": res.value,
                "se": res.error_estimate,
                "n": None,
                "seed": None,
            }
        )
    _write_route_rows(args, out, rows)
    _write_config(
        out,
        {
            "command": "eval",
            "family": fam_desc,
            "grid_resolution": grid.resolution,
            "probes": probe_echo,
            "quad_tol": getattr(args, "quad_tol", None),
            "format": args.format,
            "figures": args.figures,
            "plot_data": args.plot_data,
        },
    )
    _value_figure(args, out, rows)
    return 0


def cmd_mc(args) -> int:
    cfg = _quad_cfg(args)
    gen, _, gen_desc, fam_desc = _resolve_generator(args, cfg)
    grid = GridConfig(args.grid_resolution)
    probes, probe_echo = _load_probes(args, grid)
    seed = _resolve_seed(args)
    out = ensure_out_dir(args.out_dir)
    rows = []
    for i, (pid, f) in enumerate(probes):
        est = dnorm_monte_carlo(
            f,
            gen,
            n=args.n,
            seed=seed,
            stream=i,
            chunk_size=args.chunk_size,
            workers=args.workers,
        )
        rows.append(
            {
                "probe_id": pid,
                "route": "monte_carlo",
                "value": est.value,
                "se": est.se,
                "n": est.n,
                "seed": seed,
            }
        )
    _write_route_rows(args, out, rows)
    _write_config(
        out,
        {
            "command": "mc",
            "generator": gen_desc,
            "family": fam_desc,
            "grid_resolution": grid.resolution,
            "probes": probe_echo,
            "n": args.n,
            "chunk_size": args.chunk_size,
            "seed": seed,
            "format": args.format,
            "figures": args.figures,
            "plot_data": args.plot_data,
        },
    )
    _value_figure(args, out, rows)
    return 0


def _write_paths_csv(path: str, t_points, values) -> None:
    header = ["t"] + [f"path_{i}" for i in range(values.shape[0])]
    rows = []
    for j, t in enumerate(t_points):
        rows.append([float(t)] + [float(v) for v in values[:, j]])
    write_csv(path, header, rows)


def _paths_outputs(args, out, t_points, values, per_path=None) -> None:
    _write_paths_csv(os.path.join(out, "paths.csv"), t_points, values)

    def records():
        for i in range(values.shape[0]):
            rec = {"replicate": i}
            for key, col in (per_path or {}).items():
                rec[key] = col[i]
            rec["values"] = [float(v) for v in values[i]]
            yield rec

    write_jsonl(os.path.join(out, "paths.jsonl"), records())
    if args.figures:
        render_paths(os.path.join(out, "paths.png"), t_points, values)
    if args.plot_data:
        shown = values[:20]
        cols = {"t": np.asarray(t_points, dtype=np.float64)}
        for i in range(shown.shape[0]):
            cols[f"path_{i}"] = shown[i]
        write_dat(os.path.join(out, "paths.dat"), cols)


def cmd_simulate(args) -> int:
    gen, _, gen_desc, fam_desc = _resolve_generator(args, None)
    grid = GridConfig(args.grid_resolution)
    seed = _resolve_seed(args)
    out = ensure_out_dir(args.out_dir)
    if args.kind == "msp":
        policy = _policy(args)
        ens = simulate_msp(
            gen,
            grid=grid,
            n=args.n,
            seed=seed,
            policy=policy,
            workers=args.workers,
        )
        summary = {
            "kind": "msp",
            "n": ens.n,
            "fraction_certified": ens.fraction_certified,
            "points_used_max": int(ens.points_used.max()),
            "points_used_mean": float(ens.points_used.mean()),
            "generator": gen.label,
        }
        config_extra = {"policy": {"mode": policy.mode, "max_points": policy.max_points}}
        values = ens.values
        t_points = ens.t_points
        per_path = {
            "points": [int(p) for p in ens.points_used],
            "certified": [bool(c) for c in ens.certified],
        }
    else:
        ens = simulate_gpp(
            gen, grid=grid, n=args.n, seed=seed, workers=args.workers
        )
        summary = {
            "kind": "gpp",
            "n": ens.n,
            "x0": ens.x0,
            "zero_z_count": ens.zero_z_count,
            "generator": gen.label,
        }
        config_extra = {}
        values = ens.values
        t_points = ens.t_points
        per_path = None
    write_json(os.path.join(out, "summary.json"), summary)
    _write_config(
        out,
        {
            "command": f"simulate {args.kind}",
            "generator": gen_desc,
            "family": fam_desc,
            "grid_resolution": grid.resolution,
            "n": args.n,
            "seed": seed,
            "format": args.format,
            "figures": args.figures,
            "plot_data": args.plot_data,
            **config_extra,
        },
    )
    _paths_outputs(args, out, t_points, values, per_path)
    return 0


def _verify_outputs(args, out, report_dict, rows_header, rows) -> None:
    write_json(os.path.join(out, "report.json"), report_dict)
    if args.format == "csv" and rows_header:
        write_csv(os.path.join(out, "rows.csv"), rows_header, rows)


def cmd_verify(args) -> int:
    check = args.check
    cfg = _quad_cfg(args)
    grid = GridConfig(getattr(args, "grid_resolution", DEFAULT_RESOLUTION))
    seed = _resolve_seed(args)
    out = ensure_out_dir(args.out_dir)
    config = {
        "command": f"verify {check}",
        "format": args.format,
        "figures": args.figures,
        "plot_data": args.plot_data,
    }
    if check != "validate-family":
        config["grid_resolution"] = grid.resolution
        config["seed"] = seed

    if check == "validate-family":
        fam_desc = parse_family_descriptor(args.family)
        fam = family_from_descriptor(fam_desc, cfg)
        rep = validate_family(fam, cfg)
        d = rep.as_dict()
        rows = [
            [c["name"], c["passed"], json.dumps(c["details"], sort_keys=True)]
            for c in d["conditions"]
        ]
        _verify_outputs(args, out, d, ["condition", "passed", "details"], rows)
        config.update({"family": fam_desc, "quad_tol": getattr(args, "quad_tol", None)})
        _write_config(out, config)
        if args.figures:
            render_validation(os.path.join(out, "validation.png"), d)
        if args.plot_data:
            cont = rep.condition("continuity_in_t").details
            write_dat(
                os.path.join(out, "validation.dat"),
                {
                    "t_resolution": np.asarray(
                        cont["t_resolutions"], dtype=np.float64
                    ),
                    "max_jump": np.asarray(cont["max_jumps"]),
                },
            )
        return 0 if rep.passed else 1

    if check == "equivalence":
        g1 = generator_from_descriptor(
            parse_generator_descriptor(args.generator1), cfg
        )
        g2 = generator_from_descriptor(
            parse_generator_descriptor(args.generator2), cfg
        )
        probes, probe_echo = _load_probes(args, grid)
        rep = generators_equivalent(
            g1,
            g2,
            probes,
            n=args.n,
            seed=seed,
            alpha=args.alpha,
            workers=args.workers,
        )
        d = rep.as_dict()
        rows = [
            [c["probe_id"], c["value1"], c["se1"], c["value2"], c["se2"], c["z"]]
            for c in d["comparisons"]
        ]
        _verify_outputs(
            args, out, d, ["probe_id", "value1", "se1", "value2", "se2", "z"], rows
        )
        config.update(
            {
                "generator1": parse_generator_descriptor(args.generator1),
                "generator2": parse_generator_descriptor(args.generator2),
                "probes": probe_echo,
                "n": args.n,
                "alpha": args.alpha,
            }
        )
        _write_config(out, config)
        if args.figures:
            render_z_scores(
                os.path.join(out, "zscores.png"),
                [c["probe_id"] for c in d["comparisons"]],
                [c["z"] for c in d["comparisons"]],
                rep.critical,
            )
        if args.plot_data:
            write_dat(
                os.path.join(out, "zscores.dat"),
                {
                    "probe_index": np.arange(
                        len(d["comparisons"]), dtype=np.float64
                    ),
                    "abs_z": np.asarray(
                        [abs(c["z"]) for c in d["comparisons"]]
                    ),
                    "critical": np.full(len(d["comparisons"]), rep.critical),
                },
            )
        return 0 if rep.verdict == "EQUIVALENT-CONSISTENT" else 1

    if check == "norm-axioms":
        gen, _, gen_desc, fam_desc = _resolve_generator(args, cfg)
        rep = norm_axiom_suite(gen, grid, n=args.n, seed=seed)
        d = rep.as_dict()
        rows = [
            [c["axiom"], c["subject"], c["lhs"], c["rhs"], c["margin"], c["passed"]]
            for c in d["checks"]
        ]
        _verify_outputs(
            args,
            out,
            d,
            ["axiom", "subject", "lhs", "rhs", "margin", "passed"],
            rows,
        )
        config.update(
            {"generator": gen_desc, "family": fam_desc, "n": args.n}
        )
        _write_config(out, config)
        if args.figures:
            render_axiom_margins(os.path.join(out, "axioms.png"), d["checks"])
        if args.plot_data:
            write_dat(
                os.path.join(out, "axioms.dat"),
                {
                    "check_index": np.arange(len(d["checks"]), dtype=np.float64),
                    "margin": np.asarray([c["margin"] for c in d["checks"]]),
                },
            )
        return 0 if rep.passed else 1

    if check == "max-stability":
        gen, _, gen_desc, fam_desc = _resolve_generator(args, cfg)
        probes, probe_echo = _load_probes(args, grid)
        rep = max_stability_check(
            gen,
            probes,
            k=args.k,
            grid=grid,
            n=args.n,
            seed=seed,
            policy=_policy(args),
            workers=args.workers,
            alpha=args.alpha,
        )
        d = rep.as_dict()
        rows = [
            [r["probe_id"], r["p_group_max"], r["p_rescaled"], r["z"], r["passed"]]
            for r in d["rows"]
        ]
        _verify_outputs(
            args,
            out,
            d,
            ["probe_id", "p_group_max", "p_rescaled", "z", "passed"],
            rows,
        )
        config.update(
            {
                "generator": gen_desc,
                "family": fam_desc,
                "probes": probe_echo,
                "k": args.k,
                "n": args.n,
                "alpha": args.alpha,
                "policy": {
                    "mode": args.policy,
                    "max_points": args.max_points,
                },
            }
        )
        _write_config(out, config)
        if args.figures:
            render_z_scores(
                os.path.join(out, "zscores.png"),
                [r["probe_id"] for r in d["rows"]],
                [r["z"] for r in d["rows"]],
                rep.critical,
            )
        if args.plot_data:
            write_dat(
                os.path.join(out, "zscores.dat"),
                {
                    "probe_index": np.arange(len(d["rows"]), dtype=np.float64),
                    "abs_z": np.asarray([abs(r["z"]) for r in d["rows"]]),
                    "critical": np.full(len(d["rows"]), rep.critical),
                },
            )
        return 0 if rep.passed else 1

    # msp-df and gpp-df
    if not getattr(args, "family", None):
        raise PreconditionError(f"verify {check} needs --family for the reference norm")
    gen, fam, gen_desc, fam_desc = _resolve_generator(args, cfg)
    probes, probe_echo = _load_probes(args, grid)
    if check == "msp-df":
        rep = verify_msp_df(
            gen,
            fam,
            probes,
            grid=grid,
            n=args.n,
            seed=seed,
            policy=_policy(args),
            workers=args.workers,
            quad_cfg=cfg,
            alpha=args.alpha,
        )
        config["policy"] = {"mode": args.policy, "max_points": args.max_points}
    else:
        rep = verify_gpp_df(
            gen,
            fam,
            probes,
            grid=grid,
            n=args.n,
            seed=seed,
            workers=args.workers,
            quad_cfg=cfg,
            alpha=args.alpha,
            probe_margin=args.probe_margin,
        )
        config["probe_margin"] = args.probe_margin
    d = rep.as_dict()
    header = [
        "probe_id",
        "norm_value",
        "quad_error",
        "theoretical",
        "empirical",
        "se",
        "z",
        "pass",
    ]
    rows = [[r[k] for k in header] for r in d["rows"]]
    _verify_outputs(args, out, d, header, rows)
    config.update(
        {
            "generator": gen_desc,
            "family": fam_desc,
            "probes": probe_echo,
            "n": args.n,
            "alpha": args.alpha,
            "quad_tol": getattr(args, "quad_tol", None),
        }
    )
    _write_config(out, config)
    if args.figures:
        render_df_check(os.path.join(out, "check.png"), d["rows"])
    if args.plot_data:
        write_dat(
            os.path.join(out, "check.dat"),
            {
                "probe_index": np.arange(len(d["rows"]), dtype=np.float64),
                "p_theory": np.asarray([r["theoretical"] for r in d["rows"]]),
                "p_hat": np.asarray([r["empirical"] for r in d["rows"]]),
                "three_se": np.asarray([3.0 * r["se"] for r in d["rows"]]),
            },
        )
    return 0 if rep.passed else 1


# -- parser ------------------------------------------------------------------


def _add_out(sp):
    sp.add_argument("--out-dir", default="out", help="output directory")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument(
        "--figures",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="render figures (--no-figures to skip)",
    )
    sp.add_argument(
        "--plot-data",
        action="store_true",
        help="also write plotted series as delimited text",
    )


def _add_grid(sp):
    sp.add_argument("--grid-resolution", type=int, default=DEFAULT_RESOLUTION)


def _add_probes(sp):
    sp.add_argument(
        "--probes",
        choices=("standard",),
        default="standard",
        help="named probe battery",
    )
    sp.add_argument(
        "--probe",
        action="append",
        metavar="JSON",
        help="explicit probe (JSON or @file); repeatable, overrides --probes",
    )


def _add_seed_workers(sp):
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=None)


def _add_alpha(sp):
    sp.add_argument("--alpha", type=float, default=ALPHA_3SIGMA)


def _add_policy(sp):
    sp.add_argument("--policy", choices=("certified", "capped"), default="certified")
    sp.add_argument("--max-points", type=int, default=4096)


def _add_quad(sp):
    sp.add_argument("--quad-tol", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dnorm",
        description="evaluate, simulate, and verify D-norms and their processes",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", help="quadrature route values")
    pe.add_argument("--family", required=True)
    _add_grid(pe)
    _add_probes(pe)
    _add_quad(pe)
    _add_out(pe)
    pe.set_defaults(func=cmd_eval)

    pm = sub.add_parser("mc", help="monte carlo route values")
    pm.add_argument("--generator")
    pm.add_argument("--family")
    pm.add_argument("--n", type=int, default=200000)
    pm.add_argument("--chunk-size", type=int, default=100000)
    _add_grid(pm)
    _add_probes(pm)
    _add_seed_workers(pm)
    _add_quad(pm)
    _add_out(pm)
    pm.set_defaults(func=cmd_mc)

    ps = sub.add_parser("simulate", help="simulate process ensembles")
    ssub = ps.add_subparsers(dest="kind", required=True)
    for kind in ("msp", "gpp"):
        pk = ssub.add_parser(kind)
        pk.add_argument("--generator")
        pk.add_argument("--family")
        pk.add_argument("--n", type=int, default=10)
        if kind == "msp":
            _add_policy(pk)
        _add_grid(pk)
        _add_seed_workers(pk)
        _add_out(pk)
        pk.set_defaults(func=cmd_simulate, kind=kind)

    pv = sub.add_parser("verify", help="verification battery")
    vsub = pv.add_subparsers(dest="check", required=True)

    vm = vsub.add_parser("msp-df", help="max-stable df identity")
    vm.add_argument("--family", required=True)
    vm.add_argument("--generator")
    vm.add_argument("--n", type=int, default=100000)
    _add_policy(vm)
    _add_grid(vm)
    _add_probes(vm)
    _add_seed_workers(vm)
    _add_alpha(vm)
    _add_quad(vm)
    _add_out(vm)

    vg = vsub.add_parser("gpp-df", help="generalized Pareto df identity")
    vg.add_argument("--family", required=True)
    vg.add_argument("--generator")
    vg.add_argument("--n", type=int, default=200000)
    vg.add_argument("--probe-margin", type=float, default=0.9)
    _add_grid(vg)
    _add_probes(vg)
    _add_seed_workers(vg)
    _add_alpha(vg)
    _add_quad(vg)
    _add_out(vg)

    vs = vsub.add_parser("max-stability", help="k-fold maxima vs rescaling")
    vs.add_argument("--family")
    vs.add_argument("--generator")
    vs.add_argument("--k", type=int, default=2)
    vs.add_argument("--n", type=int, default=20000)
    _add_policy(vs)
    _add_grid(vs)
    _add_probes(vs)
    _add_seed_workers(vs)
    _add_alpha(vs)
    _add_quad(vs)
    _add_out(vs)

    ve = vsub.add_parser("equivalence", help="do two generators induce one norm")
    ve.add_argument("--generator1", required=True)
    ve.add_argument("--generator2", required=True)
    ve.add_argument("--n", type=int, default=200000)
    _add_grid(ve)
    _add_probes(ve)
    _add_seed_workers(ve)
    _add_alpha(ve)
    _add_quad(ve)
    _add_out(ve)

    va = vsub.add_parser("norm-axioms", help="norm axioms on shared paths")
    va.add_argument("--family")
    va.add_argument("--generator")
    va.add_argument("--n", type=int, default=200000)
    _add_grid(va)
    _add_seed_workers(va)
    _add_quad(va)
    _add_out(va)

    vf = vsub.add_parser("validate-family", help="the three family conditions")
    vf.add_argument("--family", required=True)
    _add_quad(vf)
    _add_out(vf)

    for sp in (vm, vg, vs, ve, va, vf):
        sp.set_defaults(func=cmd_verify)
    vm.set_defaults(check="msp-df")
    vg.set_defaults(check="gpp-df")
    vs.set_defaults(check="max-stability")
    ve.set_defaults(check="equivalence")
    va.set_defaults(check="norm-axioms")
    vf.set_defaults(check="validate-family")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QuadratureNonConvergence as exc:
        print(
            f"non-convergence: {exc} (partial value {exc.partial_value!r})",
            file=sys.stderr,
        )
        return 3
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DnormLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
