"""Sweep the six-site band curve and print the coupling branches.

For each trial energy E the implicit secular relation pins the squared
coupling r^2(E); energies whose r^2 lands in [0, 1] belong to the band.
The sweep prints a compact table and drops a CSV next to this script.
"""

import csv
from pathlib import Path

import numpy as np

from nipsqw import spectral_curve
from nipsqw.errors import NoSlope

N_SITES = 6
ENERGIES = np.linspace(0.05, 3.95, 79)


def main() -> None:
    out_path = Path(__file__).with_suffix(".csv")
    rows = []
    for e in ENERGIES:
        try:
            point = spectral_curve(N_SITES, float(e))
        except NoSlope:
            rows.append((float(e), None, None, None))
            continue
        rows.append((float(e), point.r_squared, point.r_plus, point.r_minus))

    in_band = sum(1 for row in rows if row[2] is not None)
    print(f"six-site well, {len(rows)} trial energies, {in_band} inside the band")
    print(f"{'E':>8s} {'r^2':>12s} {'r_plus':>12s} {'r_minus':>12s}")
    for e, r2, rp, rm in rows[::6]:
        cells = [f"{v:12.6f}" if v is not None else " " * 10 + "--" for v in (r2, rp, rm)]
        print(f"{e:8.3f} " + " ".join(cells))

    with out_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("energy", "r_squared", "r_plus", "r_minus"))
        for row in rows:
            writer.writerow(["" if v is None else repr(v) for v in row])
    print(f"full sweep written to {out_path.name}")


if __name__ == "__main__":
    main()
