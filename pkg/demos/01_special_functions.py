"""Rotated Airy pair, Bessel quadruple, and the glancing symbol functions.

Prints the identity residuals that the heavier machinery relies on:
the connection formula that splits Ai into outgoing/incoming parts,
the cross-order Wronskian of the Bessel quadruple, and the symbol
ratios deep in the oscillatory region.
"""
import cmath
import math

import numpy as np

from qsabine import airy, airy_minus, airy_zeros, bessel_quad, friedlander_symbols

# connection: Ai(s) = e^{-i pi/3} A_-(s) + e^{i pi/3} conj(A_-(s))
worst = 0.0
for s in np.linspace(-20.0, 5.0, 200):
    am = airy_minus(s).value
    rec = cmath.exp(-1j * math.pi / 3) * am + cmath.exp(1j * math.pi / 3) * am.conjugate()
    worst = max(worst, abs(airy(s).value - rec))
print(f"connection formula residual on [-20, 5]: {worst:.2e}")

q = bessel_quad(120, 130.0 - 4.0j)
print(f"bessel quadruple at n=120, z=130-4i: wronskian defect {q.wronskian_defect():.2e}")

table = airy_zeros(5)
print("\nfirst Airy zeros and the band heights they generate:")
for j, (z, imphi) in enumerate(zip(table.zeros, table.im_phi_minus), start=1):
    print(f"  j={j}: zeta_j = {z:+.6f}, Im Phi_-(zeta_j) = {imphi:.6e}")

print("\nsymbol functions (values at the first zero, then the x=-25 ratios):")
s0 = friedlander_symbols(table.zeros[0])
print(f"  single layer at zeta_1: {s0.single_layer:.12f} (exactly 1 at every zero)")
s = friedlander_symbols(-25.0)
print(f"  x=-25: single {s.single_layer:.4f} ~ 1, double {s.double_layer:.4f} ~ 25, "
      f"|mixed| {abs(s.mixed):.4f} ~ 5")
