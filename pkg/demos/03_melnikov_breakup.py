"""Which resonant circles survive a given perturbation? Ask the potential.

For the oval r = rho0 + eps cos(3 theta) the first-order potential of an
(m, n) resonance is non-constant exactly when n divides 3, i.e. only n = 3
resonances are predicted to break at first order.  This script tabulates the
verdict for several resonances on all three surfaces, then plots the
subharmonic potential itself (computed from actual billiard orbits at small
eps) against the first-order prediction for one breaking and one surviving
case.

Writes demos/output/melnikov_breakup.png.
"""

from __future__ import annotations

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from geobilliards import (
    RadialCurve,
    Surface,
    Verdict,
    breakup_verdict,
    find_resonance,
    melnikov_potential,
    subharmonic_potential,
    validate_oval,
)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

RHO0 = {Surface.EUCLIDEAN: 1.0, Surface.SPHERE: 0.8, Surface.HYPERBOLIC: 1.0}
PAIRS = ((1, 2), (1, 3), (2, 3), (1, 4), (2, 5), (1, 6))

print("verdicts for the mode-3 perturbation rho1 = cos(3 theta):")
print(f"{'surface':11s} " + " ".join(f"({m},{n})" for m, n in PAIRS))
for surface, rho0 in RHO0.items():
    curve = RadialCurve(surface, rho0, [(3, 1.0)], 0.0)
    row = []
    for m, n in PAIRS:
        res = find_resonance(m, n, rho0, surface)
        verdict = breakup_verdict(melnikov_potential(res, curve))
        row.append("break" if verdict is Verdict.BREAKS_UP else "keep ")
    print(f"{surface.value:11s} " + "  ".join(row))

# Potential vs. measurement for one breaking and one surviving resonance.
surface, rho0 = Surface.EUCLIDEAN, 1.0
curve = RadialCurve(surface, rho0, [(3, 1.0)], 0.0)
eps = 1e-3
grid = 128

fig, axes = plt.subplots(1, 2, figsize=(11, 4))
for ax, (m, n) in zip(axes, ((1, 3), (1, 2))):
    res = find_resonance(m, n, rho0, surface)
    predicted = melnikov_potential(res, curve, grid=grid)
    samples = subharmonic_potential(validate_oval(curve.with_epsilon(eps)), res, grid=grid)
    measured = (samples.values - np.mean(samples.values)) / eps
    first_order = predicted.values - np.mean(predicted.values)
    ax.plot(samples.thetas, measured, "o", ms=3, label=f"measured at eps = {eps}")
    ax.plot(predicted.thetas, first_order, "-", label="first-order prediction")
    verdict = breakup_verdict(predicted)
    ax.set_title(f"(m, n) = ({m}, {n}): {verdict.value}")
    ax.set_xlabel("theta")
    ax.legend(fontsize=8)
    print(f"(m,n)=({m},{n}): sup |measured - predicted| = "
          f"{np.max(np.abs(measured - first_order)):.2e}")

axes[0].set_ylabel("(L_eps - mean) / eps")
fig.suptitle("Subharmonic potential: orbits vs. first-order formula (Euclidean, rho1 = cos 3t)")
fig.tight_layout()
fig.savefig(OUT / "melnikov_breakup.png", dpi=150)
print(f"wrote {OUT / 'melnikov_breakup.png'}")
