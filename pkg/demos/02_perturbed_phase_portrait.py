"""Phase portrait of a perturbed oval: invariant circles, islands, chaos.

Perturbs the Euclidean unit circle by a small two-mode radial profile and
iterates a sweep of initial conditions.  Near resonant rotation numbers the
horizontal lines of the integrable portrait break into island chains; away
from them, slightly wavy invariant circles survive.

Writes demos/output/perturbed_phase_portrait.png.
"""

from __future__ import annotations

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from geobilliards import RadialCurve, Surface, iterate_many, validate_oval

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

EPSILONS = (0.0, 0.01, 0.05)

fig, axes = plt.subplots(1, len(EPSILONS), figsize=(14, 4.2), sharey=True)
rng = np.random.default_rng(2)

for ax, epsilon in zip(axes, EPSILONS):
    curve = RadialCurve(Surface.EUCLIDEAN, 1.0, [(2, 0.5), (3, 0.25j)], epsilon)
    oval = validate_oval(curve)
    count = 60
    theta0 = rng.uniform(0.0, 2.0 * np.pi, count)
    psi0 = np.linspace(0.25, np.pi - 0.25, count)
    thetas, psis, _ = iterate_many(oval, theta0, psi0, 400)
    ax.plot(thetas.ravel() % (2.0 * np.pi), psis.ravel(), ",", color="k", alpha=0.45)
    ax.set_title(f"epsilon = {epsilon}")
    ax.set_xlabel("theta")
    print(f"epsilon = {epsilon}: plotted {count} orbits x 400 bounces")

axes[0].set_ylabel("psi")
fig.suptitle("Euclidean oval r = 1 + eps(0.5 cos 2t - 0.25 sin 3t): break-up of resonant circles")
fig.tight_layout()
fig.savefig(OUT / "perturbed_phase_portrait.png", dpi=150)
print(f"wrote {OUT / 'perturbed_phase_portrait.png'}")
