"""Minimal reader for jcesd CSV output.

Loads a dynamics or sweep file into columns and hands them to whatever
plotting tool is at hand. With matplotlib installed it draws C(t); without
it, it prints a short summary.
"""

import csv
import sys
from collections import defaultdict


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    cols = defaultdict(list)
    for row in rows:
        for key, value in row.items():
            try:
                cols[key].append(float(value))
            except ValueError:
                cols[key].append(value)
    return dict(cols)


def group_sweep(cols):
    """Split a sweep file into one series per (g, delta) point."""
    series = defaultdict(lambda: defaultdict(list))
    for i, t in enumerate(cols["t"]):
        key = (cols["g"][i], cols["delta"][i])
        series[key]["t"].append(t)
        for name in ("C_exact", "C_rwa", "C_transformed", "n_ph1", "n_ph2"):
            series[key][name].append(cols[name][i])
    return series


def main(path):
    cols = load(path)
    series = group_sweep(cols) if "g" in cols else {(None, None): cols}
    try:
        import matplotlib.pyplot as plt
    except ImportError:
        for (g, delta), s in series.items():
            print(f"g={g} delta={delta}: {len(s['t'])} samples, min C {min(s['C_exact']):.4f}")
        return
    for (g, delta), s in series.items():
        label = "exact" if g is None else f"g={g}, delta={delta}"
        plt.plot(s["t"], s["C_exact"], label=label)
    plt.xlabel("t")
    plt.ylabel("concurrence")
    plt.legend(fontsize="small")
    plt.show()


if __name__ == "__main__":
    main(sys.argv[1])
