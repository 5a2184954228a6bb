"""Billiard ball map on convex domains: orbits, invariants, glancing scaling.

On the unit disk the tangential momentum xi is conserved exactly and
every chord equals 2 sqrt(1 - xi^2); on a generic convex domain both
hold only to first order near glancing, with remainders O(eps) in
eps = 1 - xi^2.  The script prints both behaviours.
"""
import numpy as np

from qsabine import ConvexDomain, PhasePoint, glancing_expansion_check, mean_chord, orbit

disk = ConvexDomain.disk()
seg = orbit(disk, PhasePoint(0.0, 0.6), 8)
print("disk orbit at xi = 0.6 (8 bounces):")
print(f"  xi spread      : {max(p.xi for p in seg.points) - min(p.xi for p in seg.points):.2e}")
print(f"  chord spread   : {max(seg.chords) - min(seg.chords):.2e}")
print(f"  chord value    : {seg.chords[0]:.12f}  (2 sqrt(1-xi^2) = {2*np.sqrt(1-0.36):.12f})")
print(f"  mean chord     : {mean_chord(seg):.12f}")

ellipse = ConvexDomain.ellipse(1.5, 1.0)
seg = orbit(ellipse, PhasePoint(0.0, 0.6), 8)
print("\nellipse(1.5, 1.0) orbit at xi = 0.6 (8 bounces):")
print(f"  xi spread      : {max(p.xi for p in seg.points) - min(p.xi for p in seg.points):.3f}")
print(f"  chords         : {np.array2string(np.array(seg.chords), precision=3)}")

qs = [PhasePoint(0.37 * ellipse.perimeter, 1.0 - e) for e in np.logspace(-1, -4, 10)]
rep = glancing_expansion_check(ellipse, qs)
print("\nnear-glancing remainders on the ellipse (fitted exponents in eps):")
print(f"  |xi' - xi|           ~ eps^{rep.normal_exponent:.2f}")
print(f"  |chord - 2 nu / kappa| ~ eps^{rep.chord_exponent:.2f}")
