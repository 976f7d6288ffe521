"""The circular billiard is integrable: every launch angle is conserved.

Runs a fan of orbits on the unperturbed circle of each surface through the
generic stepper (no closed form involved) and plots the phase portrait: the
orbits trace perfectly horizontal lines psi = const, and the worst drift of
psi over a thousand bounces is printed — it sits at roundoff level.

Writes demos/output/circle_integrability.png.
"""

from __future__ import annotations

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from geobilliards import Surface, circle_oval, iterate_many

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

CASES = (
    (Surface.EUCLIDEAN, 1.0),
    (Surface.SPHERE, 0.8),
    (Surface.HYPERBOLIC, 1.0),
)

fig, axes = plt.subplots(1, 3, figsize=(13, 4), sharey=True)
rng = np.random.default_rng(1)

for ax, (surface, rho0) in zip(axes, CASES):
    oval = circle_oval(surface, rho0)
    count = 18
    theta0 = rng.uniform(0.0, 2.0 * np.pi, count)
    psi0 = np.linspace(0.15, np.pi - 0.15, count)
    thetas, psis, _ = iterate_many(oval, theta0, psi0, 1000)
    drift = float(np.max(np.abs(psis - psis[0])))
    ax.plot(thetas.ravel(), psis.ravel(), ",", color="tab:blue", alpha=0.6)
    ax.set_title(f"{surface.value}, rho0 = {rho0}\nsup psi drift = {drift:.1e}")
    ax.set_xlabel("theta")
    print(f"{surface.value:11s} sup |psi_k - psi_0| = {drift:.3e}")

axes[0].set_ylabel("psi")
fig.suptitle("Circular billiards: the generic stepper conserves psi")
fig.tight_layout()
fig.savefig(OUT / "circle_integrability.png", dpi=150)
print(f"wrote {OUT / 'circle_integrability.png'}")
