#!/usr/bin/env python3
"""What goes wrong when the response function h saturates.

The ``singular-h`` preset drives two nodes into hard saturation: their
h-responses are (almost) constant, so two columns of the zero-lag
moment matrix F0 are (almost) linearly dependent and the estimator has
to invert a numerically singular matrix.  The package refuses with a
NearSingularError carrying the measured condition number instead of
returning garbage.
"""

import numpy as np

from granet import (NearSingularError, NoiseModel, WeightingConfig,
                    build_combination_matrix, egg_estimate, finalize,
                    from_trajectory, generate_binomial_graph, simulate,
                    triple_preset)

N_NODES = 50
N_STEPS = 50_000


def main() -> None:
    graph = generate_binomial_graph(N_NODES, 0.2, 101)
    matrix = build_combination_matrix(graph, 0.5)
    noise = NoiseModel.uniform(N_NODES)

    for preset in ("example2", "singular-h"):
        triple = triple_preset(preset, N_NODES)
        traj = simulate(matrix, triple, noise, 0.0, N_STEPS, seed=3001)
        lag = from_trajectory(traj, triple, WeightingConfig())
        f0, f1 = finalize(lag)
        cond = np.linalg.cond(f0)
        print(f"\npreset {preset!r}: cond(F0) = {cond:.3e}")
        try:
            report = egg_estimate(f0, f1, n_samples=lag.count)
        except NearSingularError as exc:
            print(f"  estimation refused: {exc}")
            print(f"  (condition number carried on the error: {exc.cond:.3e})")
        else:
            print(f"  estimate OK, largest entry {np.abs(report.A_hat).max():.3f}")

    print("\nnodes 0 and 1 of singular-h sit beyond the limiter bounds, so "
          "their h-responses are the constants +1 and -1: two proportional "
          "columns, hence a (numerically) singular F0")


if __name__ == "__main__":
    main()
