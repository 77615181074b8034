"""SVG figures rendered from the pipeline's CSV outputs.

Each renderer validates its CSV header first and raises :class:`SchemaError`
naming the offending column. Output is byte-stable: fixed hash salt, no
timestamps, text kept as SVG text.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

ANTI_COLOR = "#d62728"
PRO_COLOR = "#1f77b4"
GROUP_COLORS = {"Anti": ANTI_COLOR, "Pro": PRO_COLOR}

_RC = {
    "svg.hashsalt": "vaxnet",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 9,
}


class SchemaError(ValueError):
    pass


def read_csv(path, required: Sequence[str]) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise SchemaError(f"{path}: missing column {col!r} (found: {', '.join(header) or 'none'})")
        rows = list(reader)
    for i, row in enumerate(rows, start=2):
        for col in required:
            if row.get(col) is None:
                raise SchemaError(f"{path}: line {i}: column {col!r} is empty")
    return rows


def _float(row, col, path):
    try:
        return float(row[col])
    except ValueError as exc:
        raise SchemaError(f"{path}: column {col!r} has non-numeric value {row[col]!r}") from exc


def _save(fig, out) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return out


def render_top_domains(csv_path, out) -> Path:
    """Mirrored bars: anti to the right in red, pro to the left in blue."""
    rows = read_csv(csv_path, ["group", "base_url", "percent"])
    share = {"Anti": {}, "Pro": {}}
    for r in rows:
        if r["group"] in share:
            share[r["group"]][r["base_url"]] = _float(r, "percent", csv_path)
    domains = sorted(set(share["Anti"]) | set(share["Pro"]),
                     key=lambda d: (-(share["Anti"].get(d, 0) + share["Pro"].get(d, 0)), d))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.5, 0.3 * max(len(domains), 3) + 1.2))
        ys = list(range(len(domains)))[::-1]
        ax.barh(ys, [share["Anti"].get(d, 0.0) for d in domains], color=ANTI_COLOR, label="Anti", gid="bars-anti")
        ax.barh(ys, [-share["Pro"].get(d, 0.0) for d in domains], color=PRO_COLOR, label="Pro", gid="bars-pro")
        ax.set_yticks(ys)
        ax.set_yticklabels(domains)
        ax.axvline(0, color="black", linewidth=0.6)
        ax.set_xlabel("Share of group's links (%)")
        ax.set_ylabel("Base URL")
        lim = max([abs(v) for g in share.values() for v in g.values()] + [1.0]) * 1.05
        ax.set_xlim(-lim, lim)
        ax.legend(loc="lower right", frameon=False)
        fig.tight_layout()
        return _save(fig, out)


def render_category_timeseries(csv_path, out, categories: Sequence[str] | None = None) -> Path:
    rows = read_csv(csv_path, ["group", "bin"])
    header = list(rows[0].keys()) if rows else []
    cats = list(categories) if categories else [c for c in header if c not in ("group", "bin", "start")]
    for c in cats:
        if c not in header:
            raise SchemaError(f"{csv_path}: missing column {c!r}")
    groups = ["Anti", "Pro"]
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.4), sharey=True)
        for ax, group in zip(axes, groups):
            sub = [r for r in rows if r["group"] == group]
            xs = [int(r["bin"]) for r in sub]
            for c in cats:
                ax.plot(xs, [_float(r, c, csv_path) for r in sub], marker="o", markersize=2.5, label=c,
                        gid=f"series-{group}-{c}")
            ax.set_title(f"{group} profiles")
            ax.set_xlabel("Time bin")
        axes[0].set_ylabel("Share of links in bin")
        axes[1].legend(fontsize=7, frameon=False, loc="upper right")
        fig.tight_layout()
        return _save(fig, out)


def render_activity(csv_paths: dict, out) -> Path:
    """Log-log profile counts per activity level, colored by median group probability."""
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, len(csv_paths), figsize=(4.2 * len(csv_paths), 3.4), squeeze=False)
        for ax, (group, path) in zip(axes[0], sorted(csv_paths.items())):
            rows = read_csv(path, ["n_tweets", "profiles", "median_probability"])
            xs = [_float(r, "n_tweets", path) for r in rows]
            ys = [_float(r, "profiles", path) for r in rows]
            cs = [_float(r, "median_probability", path) for r in rows]
            sc = ax.scatter(xs, ys, c=cs, cmap="coolwarm" if group == "Anti" else "coolwarm_r",
                            vmin=0, vmax=1, s=14, gid=f"activity-{group}")
            if xs:
                ax.set_xscale("log")
                ax.set_yscale("log")
            ax.set_title(f"{group} profiles")
            ax.set_xlabel("Vaccine-related tweets per profile")
            ax.set_ylabel("Number of profiles")
            fig.colorbar(sc, ax=ax, label="Median probability")
        fig.tight_layout()
        return _save(fig, out)


def lorenz_gini(points) -> float:
    area = sum((x1 - x0) * (y0 + y1) / 2 for (x0, y0), (x1, y1) in zip(points, points[1:]))
    return 1.0 - 2.0 * area


def render_lorenz(csv_paths: dict, out) -> Path:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.4, 4.2))
        ax.plot([0, 1], [0, 1], color="gray", linestyle="--", linewidth=0.8, label="Equality", gid="diagonal")
        for group, path in sorted(csv_paths.items()):
            rows = read_csv(path, ["population_share", "content_share"])
            pts = [(_float(r, "population_share", path), _float(r, "content_share", path)) for r in rows]
            ax.plot([p[0] for p in pts], [p[1] for p in pts], color=GROUP_COLORS.get(group, "black"),
                    label=f"{group} (g = {lorenz_gini(pts):.3f})", gid=f"lorenz-{group}")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_xlabel("Cumulative share of profiles")
        ax.set_ylabel("Cumulative share of tweets")
        ax.legend(frameon=False, loc="upper left")
        fig.tight_layout()
        return _save(fig, out)


def render_network(layout_csv, edges_csv, out) -> Path:
    nodes = read_csv(layout_csv, ["node", "x", "y", "stance"])
    edges = read_csv(edges_csv, ["source", "target"])
    pos = {r["node"]: (_float(r, "x", layout_csv), _float(r, "y", layout_csv)) for r in nodes}
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.5, 5.5))
        segments = [(pos[e["source"]], pos[e["target"]]) for e in edges if e["source"] in pos and e["target"] in pos]
        ax.add_collection(LineCollection(segments, colors="#999999", linewidths=0.3, alpha=0.6, gid="edges"))
        for group in ("Pro", "Anti"):
            pts = [pos[r["node"]] for r in nodes if r["stance"] == group]
            ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=10, color=GROUP_COLORS[group],
                       label=group, zorder=3, gid=f"nodes-{group}")
        ax.set_xlabel("Layout x")
        ax.set_ylabel("Layout y")
        ax.set_aspect("equal", adjustable="datalim")
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, out)


def render_degree(degree_csv, fit_csv, out) -> Path:
    rows = read_csv(degree_csv, ["degree", "count", "ccdf"])
    fits = read_csv(fit_csv, ["lambda", "beta"])
    ks = [_float(r, "degree", degree_csv) for r in rows]
    cc = [_float(r, "ccdf", degree_csv) for r in rows]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.6, 3.8))
        ax.scatter(ks, cc, s=12, color="black", label="Observed P(K ≥ k)", gid="ccdf")
        if fits and ks:
            lam, beta = _float(fits[0], "lambda", fit_csv), _float(fits[0], "beta", fit_csv)
            lo, hi = max(min(ks), 1.0), max(ks)
            grid = [lo * (hi / lo) ** (i / 99) for i in range(100)] if hi > lo else [lo]
            ax.plot(grid, [math.exp(-((k / lam) ** beta)) for k in grid], "--", color="#d62728",
                    label=f"Stretched exp. (λ={lam:.2f}, β={beta:.2f})", gid="fit")
        if ks and min(ks) > 0:
            ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("Degree k")
        ax.set_ylabel("P(K ≥ k)")
        ax.legend(frameon=False, fontsize=7)
        fig.tight_layout()
        return _save(fig, out)


def render_jaccard(csv_path, out) -> Path:
    """Heatmap drawn as one rectangle per cell (gid ``cell-i-j``)."""
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "window":
            raise SchemaError(f"{csv_path}: missing column 'window'")
        ids = header[1:]
        matrix = []
        for row in reader:
            if len(row) != len(header):
                raise SchemaError(f"{csv_path}: row for window {row[:1]} has {len(row)} columns, expected {len(header)}")
            try:
                matrix.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise SchemaError(f"{csv_path}: non-numeric value in row {row[0]!r}") from exc
    cmap = matplotlib.colormaps["viridis"]
    n = len(ids)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.8, 4.2))
        for i in range(n):
            for j in range(n):
                ax.add_patch(Rectangle((j, n - 1 - i), 1, 1, facecolor=cmap(matrix[i][j]), edgecolor="none",
                                       gid=f"cell-{i}-{j}"))
        ax.set_xlim(0, n)
        ax.set_ylim(0, n)
        ax.set_xticks([k + 0.5 for k in range(n)])
        ax.set_xticklabels(ids)
        ax.set_yticks([n - 1 - k + 0.5 for k in range(n)])
        ax.set_yticklabels(ids)
        ax.set_xlabel("Window")
        ax.set_ylabel("Window")
        sm = matplotlib.cm.ScalarMappable(cmap=cmap, norm=matplotlib.colors.Normalize(0, 1))
        fig.colorbar(sm, ax=ax, label="Edge-set Jaccard index")
        fig.tight_layout()
        return _save(fig, out)


BUNDLE_FIGURES = {
    "fig_top_domains.svg": (render_top_domains, ["links/top_domains.csv"]),
    "fig_link_categories.svg": (render_category_timeseries, ["links/category_timeseries.csv"]),
    "fig_activity.svg": (lambda a, p, out: render_activity({"Anti": a, "Pro": p}, out),
                         ["profiles/activity_anti.csv", "profiles/activity_pro.csv"]),
    "fig_lorenz.svg": (lambda a, p, out: render_lorenz({"Anti": a, "Pro": p}, out),
                       ["profiles/lorenz_anti.csv", "profiles/lorenz_pro.csv"]),
    "fig_network.svg": (render_network, ["graph/layout.csv", "graph/mmr_edges.csv"]),
    "fig_degree.svg": (render_degree, ["graph/degree_distribution.csv", "graph/weibull_fit.csv"]),
    "fig_jaccard.svg": (render_jaccard, ["graph/jaccard.csv"]),
}


def render_bundle(bundle_dir, out_dir=None) -> list[Path]:
    """Render every figure whose input CSVs exist under ``bundle_dir``."""
    bundle_dir = Path(bundle_dir)
    out_dir = Path(out_dir) if out_dir else bundle_dir / "figures"
    written = []
    for name, (fn, inputs) in BUNDLE_FIGURES.items():
        paths = [bundle_dir / p for p in inputs]
        if all(p.exists() for p in paths):
            written.append(fn(*paths, out_dir / name))
    return written
