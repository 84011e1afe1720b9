"""Plot a sweep CSV (analytic lines, MC markers). Needs matplotlib.

    python scripts/plot_sweep.py results/fig6.csv fig6.png
"""

import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from pinchlink.experiment import read_csv  # noqa: E402

LABELS = {"bs_only": "BS-only", "sd": "SD", "scd": "SCD", "fcd": "FCD"}


def main(src, dst):
    rows = read_csv(src)
    curves = defaultdict(lambda: ([], [], []))
    for r in rows:
        x, a, m = curves[r["scheme"]]
        x.append(float(r["value"]))
        a.append(float(r["analytic_snr_db"]))
        m.append(float(r["mc_snr_db"]) if r["mc_snr_db"] else float("nan"))
    fig, ax = plt.subplots(figsize=(5, 4))
    for scheme, (x, a, m) in curves.items():
        (line,) = ax.plot(x, a, label=LABELS.get(scheme, scheme))
        ax.plot(x, m, "o", ms=3, mfc="none", color=line.get_color())
    ax.set_xlabel(rows[0]["variable"])
    ax.set_ylabel("average received SNR [dB]")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(dst, dpi=150)


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
