"""The classical radiationless ball.

A constant source on a ball of radius r radiates a far field whose
magnitude is proportional to |J_1(k r)| in the plane.  Sweep the radius
through the first zeros of J_1 and watch the pattern switch off exactly
there, then verify with the exterior field that the silent
configurations are genuinely invisible, not just quiet in one
direction.
"""

import numpy as np

from invisiscat.geometry import BallComponent, Domain
from invisiscat.source import SourceScene, far_field, radiationless_radius, solve_field

k = 1.0

print("Radius sweep of the constant-intensity ball source (k = 1):")
print(f"{'radius':>10} {'far-field sup':>15}")
for r in np.linspace(0.5, 8.0, 16):
    scene = SourceScene(Domain([BallComponent([0.0, 0.0], r)]), 1.0, k, 2)
    sup = far_field(scene, 64).sup_norm()
    print(f"{r:10.4f} {sup:15.6e}")

print("\nZeros of J_1 mark the radiationless radii:")
for m in (1, 2, 3):
    r0 = radiationless_radius(k, 2, m)
    scene = SourceScene(Domain([BallComponent([0.0, 0.0], r0)]), 1.0, k, 2)
    sup = far_field(scene, 64).sup_norm()
    print(f"  branch {m}: r0 = {r0:.10f}, far-field sup = {sup:.3e}")

r0 = radiationless_radius(k, 2, 1)
scene = SourceScene(Domain([BallComponent([0.0, 0.0], r0)]), 1.0, k, 2)
probes = np.array([[r0 + 1.0, 0.0], [0.0, -r0 - 2.0], [r0 + 4.0, r0]])
u = solve_field(scene, probes, spacing=0.02)
print("\nExterior field of the first silent ball (Rellich consistency):")
for p, v in zip(probes, u):
    print(f"  u({p[0]:+.2f}, {p[1]:+.2f}) = {abs(v):.3e}")
print("\nThe source mass is", np.pi * r0**2, "- the exterior field is")
print("smaller by nine orders of magnitude: no radiation escapes.")
