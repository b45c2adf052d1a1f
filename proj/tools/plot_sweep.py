#!/usr/bin/env python3
"""Plot a sweep_summary.csv produced by `mvmc ... --sweep` (dev tool).

Usage: plot_sweep.py SWEEP_SUMMARY_CSV [-x lambda1] [-o out.png]
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("summary", help="sweep_summary.csv path")
    ap.add_argument("-x", default="lambda1",
                    choices=["lambda1", "lambda2", "h"],
                    help="swept parameter (x axis)")
    ap.add_argument("-o", default="sweep.png", help="output image")
    args = ap.parse_args()

    df = pd.read_csv(args.summary)
    fig, (ax_q, ax_d) = plt.subplots(1, 2, figsize=(10, 4))

    for col, label in [("mean_sc", "SC"), ("mean_di", "DI")]:
        if df[col].notna().any():
            ax_q.plot(df[args.x], df[col], marker="o", label=label)
    ax_q.set_xlabel(args.x)
    ax_q.set_title("quality")
    ax_q.legend()

    if df["mean_nmi"].notna().any():
        ax_d.plot(df[args.x], 1.0 - df["mean_nmi"], marker="o", label="1 - NMI")
    if df["mean_jc"].notna().any():
        ax_d.plot(df[args.x], 1.0 - df["mean_jc"], marker="s", label="1 - JC")
    ax_d.set_xlabel(args.x)
    ax_d.set_title("diversity")
    ax_d.legend()

    if args.x.startswith("lambda"):
        ax_q.set_xscale("log")
        ax_d.set_xscale("log")

    fig.tight_layout()
    fig.savefig(args.o, dpi=150)
    print(f"wrote {args.o}")


if __name__ == "__main__":
    main()
