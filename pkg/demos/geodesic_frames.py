"""Frames of transport alpha-geodesics between a logistic and a Gaussian.

Each geodesic is linear in the alpha-coordinate ``Q'(u)**(-alpha)``
(``log Q'`` at alpha = 0). alpha = -1 is displacement interpolation, so
quantiles move linearly and W2 grows linearly in t.
"""

import numpy as np

from transport_alpha import Gaussian, Logistic, geodesic_path, wasserstein2
from transport_alpha.geodesics import geodesic_point

P, Q = Logistic(2, 0.5), Gaussian(0, 1)
U = np.linspace(0.1, 0.9, 5)


def main():
    for alpha in (-1.0, 0.0, 1.0):
        path = geodesic_path(P, Q, alpha, 5, U)
        print(f"alpha = {alpha:+.0f}: Q'(u) on u = {np.round(U, 2).tolist()}")
        for t, row in zip(path.t_grid, path.qdf_array()):
            print(f"  t = {t:.2f}  " + "  ".join(f"{v:8.4f}" for v in row))

    total = wasserstein2(Q, P)
    print(f"\nW2(Q, P) = {total:.6f}")
    for t in (0.25, 0.5, 0.75):
        r = geodesic_point(P, Q, -1.0, t)
        print(f"  t = {t:.2f}: W2(Q, gamma_t) = {wasserstein2(Q, r):.6f}  (t * W2 = {t * total:.6f})")


if __name__ == "__main__":
    main()
