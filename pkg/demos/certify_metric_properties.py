"""Numeric certification of the inequalities the walk's guarantees rest on:
metric stability under small moves (both metric kinds) and the symmetric-body
sandwich of the barrier metric, plus the polytope distances that phrase them.
"""

import numpy as np

from dikinwalk import (
    RegularizedLewis,
    SoftThreshold,
    certify_ssc,
    certify_symmetry,
    cross_ratio,
    hilbert,
    make_box,
)
from dikinwalk.diagnostics import random_polytope_with_interior


def main():
    rng = np.random.default_rng(0)
    P, x0 = random_polytope_with_interior(3, 8, rng)

    for kind in (SoftThreshold(lam=1.0), RegularizedLewis(lam=1.0, c1=2.0)):
        rep = certify_ssc(P, x0, kind, trials=500, rng=rng)
        print(
            f"{rep.name}: {rep.trials} checks, {rep.violations} violations, "
            f"max slack ratio {rep.max_slack:.3f}"
        )

    rep = certify_symmetry(P, x0, trials=500, rng=rng)
    print(
        f"{rep.name}: {rep.trials} checks, {rep.violations} violations, "
        f"max slack ratio {rep.max_slack:.3f}"
    )

    # the distances shrink near the boundary faster than Euclidean ones
    box = make_box([0.0], [1.0])
    for x, y in ((0.45, 0.55), (0.05, 0.15), (0.005, 0.105)):
        xa, ya = np.array([x]), np.array([y])
        print(
            f"x={x:5.3f} y={y:5.3f}: |x-y|=0.1, "
            f"cross-ratio {cross_ratio(box, xa, ya):7.3f}, "
            f"hilbert {hilbert(box, xa, ya):6.3f}"
        )


if __name__ == "__main__":
    main()
