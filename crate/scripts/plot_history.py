#!/usr/bin/env python3
"""Replot the exponent-history timelines from the CSV the CLI emits.

Usage:
    fastmm exponent --history > history.csv
    python3 scripts/plot_history.py history.csv out.png

Convenience only; the CSV schema (table,exponent,citation,year) is the
stable interface.
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> None:
    src = sys.argv[1] if len(sys.argv) > 1 else "history.csv"
    dst = sys.argv[2] if len(sys.argv) > 2 else "history.png"
    rows = list(csv.DictReader(open(src)))
    fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
    for ax, table, title in [
        (axes[0], "1", "unrestricted sizes"),
        (axes[1], "2", "sizes up to 10^6"),
    ]:
        pts = [(int(r["year"]), float(r["exponent"]), r["citation"])
               for r in rows if r["table"] == table]
        pts.sort()
        years = [p[0] for p in pts]
        exps = [p[1] for p in pts]
        ax.step(years, exps, where="post", marker="o")
        for y, e, c in pts:
            ax.annotate(c, (y, e), textcoords="offset points",
                        xytext=(4, 4), fontsize=7)
        ax.set_title(title)
        ax.set_xlabel("year")
        ax.grid(alpha=0.3)
    axes[0].set_ylabel("exponent")
    fig.tight_layout()
    fig.savefig(dst, dpi=150)
    print(f"wrote {dst}")


if __name__ == "__main__":
    main()
