"""Figures for CLI reports, rendered off-screen to PNG files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update({
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
})


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def flow_loads(net, sol, path) -> Path:
    """Per-edge load of a flow solution against capacity."""
    n_e = len(net.edges)
    load = [0.0] * n_e
    for a, (_, _, idx) in enumerate(sol.arcs):
        load[idx] += float(sol.flows[:, a].sum())
    names = [f"{net.label(e.u)}-{net.label(e.v)}" for e in net.edges]
    fig, ax = plt.subplots(figsize=(max(4, 0.5 * n_e + 1), 3))
    xs = range(n_e)
    ax.bar(xs, [e.cap for e in net.edges], color="0.85", label="capacity")
    ax.bar(xs, load, color="tab:blue", width=0.5, label="flow")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=60, ha="right")
    ax.set_ylabel("units")
    ax.set_title(f"flow rate {sol.rate:.4g}")
    ax.legend(frameon=False)
    return _save(fig, path)


def layered_network(red, path) -> Path:
    """Three layers s / v / u, pruned vertices marked, targets highlighted."""
    n = red.n
    fig, ax = plt.subplots(figsize=(max(4, 0.45 * n + 1), 3.2))
    pos = {}
    for layer, y in enumerate((2, 1, 0)):
        for i in range(n):
            pos[layer * n + i] = (i, y)
    for u, v in red.graph.edges:
        kept = (u, v) in set(red.edges)
        (x0, y0), (x1, y1) = pos[u], pos[v]
        ax.plot([x0, x1], [y0, y1], color="0.3" if kept else "0.85", lw=0.8, zorder=1)
    targets = set(red.targets())
    for v, (x, y) in pos.items():
        color = "tab:red" if v in red.W else ("tab:green" if v in targets else "white")
        ax.scatter([x], [y], s=40, c=color, edgecolors="black", zorder=2)
    ax.set_yticks([0, 1, 2])
    ax.set_yticklabels(["u", "v", "s"])
    ax.set_xticks(range(n))
    ax.set_title(f"n={n} q={red.q} b={red.b} d={red.d} delta={red.delta:.3g}")
    return _save(fig, path)


def hellman_tradeoff(rows, path) -> Path:
    """rows: (n, t, max s*t, bound)."""
    fig, ax = plt.subplots(figsize=(4.5, 3))
    for n in sorted({r[0] for r in rows}):
        sub = [r for r in rows if r[0] == n]
        line, = ax.plot([r[1] for r in sub], [r[2] for r in sub], marker="o", label=f"n={n}")
        ax.axhline(sub[0][3], color=line.get_color(), ls="--", lw=0.8)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log", base=2)
    ax.set_xlabel("t")
    ax.set_ylabel("s*t (bits)")
    ax.legend(frameon=False, fontsize=7)
    return _save(fig, path)


def correction_lengths(totals, eq1: float, quarter: float, path) -> Path:
    fig, ax = plt.subplots(figsize=(4.5, 3))
    lo, hi = min(totals), max(totals)
    ax.hist(totals, bins=range(lo, hi + 2), color="tab:blue", align="left")
    ax.axvline(eq1, color="tab:red", ls="--", label="length target")
    ax.axvline(quarter, color="tab:green", ls=":", label="m*l/4")
    ax.set_xlabel("total message bits")
    ax.set_ylabel("instances")
    ax.legend(frameon=False)
    return _save(fig, path)


def cut_connectivity(before, after, path) -> Path:
    fig, ax = plt.subplots(figsize=(max(4, 0.4 * len(before) + 1), 3))
    xs = range(len(before))
    ax.bar([x - 0.2 for x in xs], before, width=0.4, color="0.7", label="no cut")
    ax.bar([x + 0.2 for x in xs], after, width=0.4, color="tab:blue", label="with cut")
    ax.set_xlabel("output block")
    ax.set_ylabel("input bits reached")
    ax.legend(frameon=False)
    return _save(fig, path)
