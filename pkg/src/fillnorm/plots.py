"""Figure and CSV rendering for tower reports.

The report path can render per-level series (Betti numbers, expansion values,
systole and filling-ratio data) as PNG figures next to a levels.csv with the
same rows.  JSON stays the canonical output; figures are derived views, and
rational values are converted to floats only here.
"""

import csv
import os
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _as_float(value):
    if value is None:
        return None
    return float(Fraction(value))


def tower_levels_rows(report):
    """Flat per-level rows used for both the CSV and the figures."""
    rows = []
    for lvl in report.levels:
        rows.append({
            "level": lvl.level,
            "degree": lvl.degree,
            "cumulative_degree": lvl.cumulative_degree,
            "vertices": lvl.cells[0],
            "edges": lvl.cells[1],
            "twocells": lvl.cells[2],
            "chi": lvl.chi,
            "b1": lvl.b1,
            "state": lvl.state,
            "rho_real": str(lvl.rho_real) if lvl.rho_real is not None else "",
            "rho_integer": (str(lvl.rho_integer)
                            if lvl.rho_integer is not None else ""),
            "systole": lvl.systole.length if lvl.systole else "",
            "fill_ratio": (str(lvl.fill_ratio)
                           if lvl.fill_ratio is not None else ""),
        })
    return rows


def write_tower_csv(report, path):
    rows = tower_levels_rows(report)
    fields = list(rows[0].keys()) if rows else ["level"]
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def render_tower_figures(report, outdir):
    """Write levels.csv and the per-level series figures into outdir."""
    os.makedirs(outdir, exist_ok=True)
    write_tower_csv(report, os.path.join(outdir, "levels.csv"))
    levels = [lvl.level for lvl in report.levels]
    written = [os.path.join(outdir, "levels.csv")]

    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(levels, [lvl.b1 for lvl in report.levels], "o-", color="#1f6f8b")
    ax.set_xlabel("level")
    ax.set_ylabel("$b_1$")
    ax.set_title("first Betti number by level")
    ax.set_xticks(levels)
    fig.tight_layout()
    path = os.path.join(outdir, "b1_by_level.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    rho_pts = [(lvl.level, _as_float(lvl.rho_integer))
               for lvl in report.levels if lvl.rho_integer is not None]
    if rho_pts:
        fig, ax = plt.subplots(figsize=(5, 3.2))
        ax.plot([p[0] for p in rho_pts], [p[1] for p in rho_pts],
                "s-", color="#9b2335")
        ax.axhline(_as_float(report.config.eps), ls="--", color="gray",
                   label="eps")
        ax.set_xlabel("level")
        ax.set_ylabel(r"$\rho$ (integer)")
        ax.set_title("expansion constant by level")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(outdir, "rho_by_level.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    sys_pts = [(lvl.level, lvl.systole.length)
               for lvl in report.levels if lvl.systole]
    ratio_pts = [(lvl.level, _as_float(lvl.fill_ratio))
                 for lvl in report.levels if lvl.fill_ratio is not None]
    if sys_pts or ratio_pts:
        fig, ax = plt.subplots(figsize=(5, 3.2))
        if sys_pts:
            ax.plot([p[0] for p in sys_pts], [p[1] for p in sys_pts],
                    "o-", color="#2a7f62", label="systole bound")
        if ratio_pts:
            ax.plot([p[0] for p in ratio_pts], [p[1] for p in ratio_pts],
                    "^-", color="#e08f2e", label=r"$\|A\|/(dL)$")
        ax.set_xlabel("level")
        ax.set_title("loop data by level")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(outdir, "loops_by_level.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
