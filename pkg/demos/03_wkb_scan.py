"""
Large-parameter behaviour of traces
===================================

For the family D + t Psi the trace of the transport grows like
exp(-t int sqrt(det Psi)) along an admissible loop.  Multiplying by the
inverse exponential should make the trace settle down as t grows.
"""

import numpy as np

from holomon import HiggsFamily, LogarithmicSystem, Path, RationalMatrixForm, wkb_exponent, wkb_scan

E = np.array([[0, 1], [0, 0]])
F = E.T
H = np.diag([1.0, -1.0])

###############################################################################
# Diagonal case.  With Psi = diag(c, -c) dz / z the transport is diagonal and
# the normalized trace is exactly 1 + exp(2 t I) with I = 2 pi i c.

c = 0.05 + 0.1j
psi = RationalMatrixForm([0.0], [np.diag([c, -c])])
scan = wkb_scan(HiggsFamily(RationalMatrixForm.zero(2), psi), Path.circle(), [1, 2, 5, 10, 20])
I = 2j * np.pi * c
for row in scan.rows:
    print(f"t = {row.t:5.1f}  normalized {row.normalized:.8f}  closed form {1 + np.exp(2 * row.t * I):.8f}")

###############################################################################
# A genuine example: a three-pole system with a three-pole traceless Higgs
# field.  No closed form here; we only look at how fast the normalized trace
# stops moving.

poles = [0.0, 2.0, -2.5j]
base = LogarithmicSystem.random(poles, genus=2, rng=1).form
higgs = RationalMatrixForm(poles, [0.1j * H, 0.05 * E + 0.02 * F, 0.03 * F - 0.04 * E])
print(wkb_exponent(higgs, Path.circle()))

scan = wkb_scan(HiggsFamily(base, higgs), Path.circle(), list(range(1, 41)))
for row in scan.rows[4::5]:
    print(f"t = {row.t:4.0f}  rel_change {row.rel_change:.3e}")

###############################################################################
# The same scan as CSV, ready for an external plotting tool.

print(scan.to_csv().splitlines()[0])
