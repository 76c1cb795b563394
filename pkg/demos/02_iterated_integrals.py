"""
Iterated integrals and the monodromy series
===========================================

Chen's iterated integrals along a loop assemble into a series whose partial
sums converge to the monodromy.  We watch that happen and check a couple of
algebraic identities along the way.
"""

from math import factorial

import numpy as np

from holomon import (LogarithmicSystem, Path, RationalMatrixForm, chen_parshin, iterated_integral,
                     monodromy, monodromy_series)

###############################################################################
# For dz/z on the unit circle every iterated integral is known:
# int (dz/z)^n = (2 pi i)^n / n!.

J = chen_parshin([RationalMatrixForm.scalar([0.0], [1.0])], Path.circle(), 6)
for n in range(7):
    print(n, J[(0,) * n], (2j * np.pi) ** n / factorial(n))

###############################################################################
# The shuffle identity: a product of two iterated integrals is the sum over
# interleavings of their words.

a = RationalMatrixForm.scalar([2.0], [0.3 + 0.1j])
b = RationalMatrixForm.scalar([-2.0j], [0.2], [0.1])
path = Path.polyline([0.1, 0.6 + 0.5j, -0.4 + 0.3j])
I = lambda *forms: complex(np.asarray(iterated_integral(list(forms), path)).reshape(()))
print("shuffle residual:", abs(I(a) * I(b) - I(a, b) - I(b, a)))

###############################################################################
# Partial sums of the monodromy series for a small three-pole system.  The
# error falls factorially until it reaches the solver floor.

poles = [0.0, 1.0, 0.5 + 1.0j]
form = LogarithmicSystem.random(poles, rng=0).form * 0.25
loop = Path.circle(0.5 + 0.4j, 1.3)
ref = monodromy(form, loop, tol=1e-13)
for N in range(2, 21, 2):
    err = np.max(np.abs(monodromy_series(form, loop, N, tol=1e-13) - ref))
    print(f"N = {N:2d}  error {err:.3e}")
