# SPDX-License-Identifier: Apache-2.0
"""Plot mean SCNR curves from a sweep CSV produced by `fasisac run`.

Usage: python3 tools/plot_results.py results.csv [out.png]
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

LABELS = {"fas": "FAS (proposed)", "aps": "APS", "rula": "RULA", "fpa": "FPA"}
XLABELS = {
    "region": "region side A [m]",
    "power": "power budget P0 [W]",
    "gamma": "SINR target (linear)",
}


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 2
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else "results.png"

    df = pd.read_csv(path)
    df = df[df["converged"] == 1]
    if df.empty:
        print("no converged records in", path)
        return 1
    sweep_var = df["sweep_var"].iloc[0]

    fig, ax = plt.subplots(figsize=(6, 4))
    for scheme, group in df.groupby("scheme"):
        mean_db = (
            group.groupby("sweep_value")["scnr_db"].mean().sort_index()
        )
        ax.plot(mean_db.index, mean_db.values, marker="o",
                label=LABELS.get(scheme, scheme))
    ax.set_xlabel(XLABELS.get(sweep_var, sweep_var))
    ax.set_ylabel("mean SCNR [dB]")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print("wrote", out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
