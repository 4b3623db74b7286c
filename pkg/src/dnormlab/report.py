"""Output rendering: delimited tables, JSON reports, figures.

Everything written here is byte-deterministic for a fixed input: floats are
serialized with repr (shortest round-trip), JSON keys are sorted, no
timestamps appear anywhere, and the PNG writer's software tag is stripped.
Rerunning a command with the same arguments must reproduce identical files.
"""

from __future__ import annotations

import csv
import io
import json
import os

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_SAVEFIG = {"dpi": 110, "metadata": {"Software": None}}


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(float(x))
    if isinstance(x, np.generic):
        return _fmt(x.item())
    return str(x)


def _json_default(o):
    # numpy scalars arriving through report dicts
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_json(path: str, obj: dict) -> None:
    with open(path, "w") as fh:
        json.dump(
            obj, fh, indent=2, sort_keys=True, allow_nan=True, default=_json_default
        )
        fh.write("\n")


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_jsonl(path: str, records) -> None:
    """One compact JSON object per line."""
    with open(path, "w") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    rec,
                    sort_keys=True,
                    allow_nan=True,
                    separators=(",", ":"),
                    default=_json_default,
                )
            )
            fh.write("\n")


def write_dat(path: str, columns: dict[str, np.ndarray]) -> None:
    """Tab-separated series with a commented header line."""
    names = list(columns)
    arrays = [np.asarray(columns[k]).ravel() for k in names]
    with open(path, "w") as fh:
        fh.write("# " + "\t".join(names) + "\n")
        for i in range(len(arrays[0]) if arrays else 0):
            fh.write("\t".join(repr(float(a[i])) for a in arrays) + "\n")


def _save(fig, path: str) -> None:
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def render_value_rows(path: str, rows: list[dict]) -> None:
    """Estimates per probe with 3-se whiskers, grouped by route."""
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    routes = sorted({r["route"] for r in rows})
    offsets = np.linspace(-0.15, 0.15, len(routes)) if len(routes) > 1 else [0.0]
    probe_ids = sorted({r["probe_id"] for r in rows})
    xpos = {p: i for i, p in enumerate(probe_ids)}
    for route, off in zip(routes, offsets):
        sel = [r for r in rows if r["route"] == route]
        x = [xpos[r["probe_id"]] + off for r in sel]
        y = [r["value"] for r in sel]
        e = [3.0 * (r["se"] or 0.0) for r in sel]
        ax.errorbar(x, y, yerr=e, fmt="o", capsize=3, label=route)
    ax.set_xticks(range(len(probe_ids)))
    ax.set_xticklabels(probe_ids, rotation=30, ha="right")
    ax.set_ylabel("norm value")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_paths(path: str, t_points: np.ndarray, values: np.ndarray,
                 max_paths: int = 20) -> None:
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    shown = values[:max_paths]
    for row in shown:
        ax.plot(t_points, row, lw=0.9, alpha=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("path value")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_df_check(path: str, rows: list[dict]) -> None:
    """Theoretical vs empirical probability with 3-se whiskers."""
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ids = [r["probe_id"] for r in rows]
    x = np.arange(len(ids))
    p_th = [r["theoretical"] for r in rows]
    p_hat = [r["empirical"] for r in rows]
    band = [3.0 * r["se"] for r in rows]
    ax.errorbar(x - 0.08, p_th, yerr=band, fmt="s", capsize=3,
                label="theory (3 se band)")
    ax.plot(x + 0.08, p_hat, "o", label="empirical")
    ax.set_xticks(x)
    ax.set_xticklabels(ids, rotation=30, ha="right")
    ax.set_ylabel("probability")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_z_scores(path: str, labels: list[str], zs: list[float],
                    critical: float) -> None:
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    x = np.arange(len(labels))
    finite = [min(abs(z), 10.0 * critical) for z in zs]
    ax.bar(x, finite, width=0.6)
    ax.axhline(critical, color="red", ls="--", label="critical")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("|z|")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_axiom_margins(path: str, checks: list[dict]) -> None:
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    labels = [f"{c['axiom']}:{c['subject']}" for c in checks]
    margins = [c["margin"] for c in checks]
    colors = ["tab:green" if c["passed"] else "tab:red" for c in checks]
    y = np.arange(len(labels))
    ax.barh(y, margins, color=colors)
    ax.set_yticks(y)
    ax.set_yticklabels(labels, fontsize=7)
    ax.set_xlabel("slack (rhs - lhs)")
    ax.axvline(0.0, color="black", lw=0.8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_validation(path: str, report: dict) -> None:
    """Continuity jump decay across t-resolutions, one panel per condition."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    cont = next(c for c in report["conditions"] if c["name"] == "continuity_in_t")
    res = cont["details"]["t_resolutions"]
    jumps = cont["details"]["max_jumps"]
    ax1.plot(res, jumps, "o-")
    ax1.set_xscale("log")
    if min(jumps) > 0:
        ax1.set_yscale("log")
    ax1.set_xlabel("t resolution")
    ax1.set_ylabel("largest adjacent jump")
    ax1.set_title("continuity refinement")
    ax1.grid(True, alpha=0.3)
    names = [c["name"] for c in report["conditions"]]
    passed = [1.0 if c["passed"] else 0.0 for c in report["conditions"]]
    colors = ["tab:green" if p else "tab:red" for p in passed]
    ax2.barh(np.arange(len(names)), passed, color=colors)
    ax2.set_yticks(np.arange(len(names)))
    ax2.set_yticklabels(names, fontsize=8)
    ax2.set_xlim(0, 1.2)
    ax2.set_xticks([])
    ax2.set_title("conditions")
    fig.tight_layout()
    _save(fig, path)


def ensure_out_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def dumps_config(config: dict) -> str:
    buf = io.StringIO()
    json.dump(config, buf, indent=2, sort_keys=True)
    return buf.getvalue() + "\n"
