"""Write a synthetic target spectrum for the ``invert`` command.

The generator is qhat(y) = c0 + 0.3 cos(2 pi y / L) - 0.1 cos(4 pi y / L) in
normal form with the cosine-bump velocity of configs/invert.ini; c0 is chosen
so that E_0 = 0.

    python scripts/make_inverse_target.py configs/invert_target.csv
"""
import csv
import sys

import numpy as np

from pwtransfer.inverse import forward_lambdas
from pwtransfer.profiles import FourierSeries, SystemGeometry, coordinate_map

COEFFICIENTS = (0.3, -0.1)
N_MODES = 16


def target_energies(geometry: SystemGeometry, v, coefficients=COEFFICIENTS, n_max: int = N_MODES) -> np.ndarray:
    v0 = coordinate_map(v, geometry=geometry).v0
    params = np.array([0.0, *coefficients])
    params[0] = -forward_lambdas(params, v0, geometry, 0)[0]
    lam = forward_lambdas(params, v0, geometry, n_max)
    return np.sqrt(np.clip(lam, 0.0, None))


def main(path: str) -> None:
    g = SystemGeometry(1.0, 1001)
    v = FourierSeries(cos=(1.0, 0.0, 0.3), L=g.L)
    E = target_energies(g, v)
    with open(path, "w", newline="") as fh:
        fh.write(f"# synthetic spectrum, qhat cosine coefficients {COEFFICIENTS}\n")
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["n", "E"])
        for n, e in enumerate(E):
            wr.writerow([n, repr(float(e))])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "invert_target.csv")
