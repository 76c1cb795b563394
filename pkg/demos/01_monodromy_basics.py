"""
Monodromy of a rational connection
==================================

Transport a flat frame around loops in the punctured plane and check what
comes back against things we know in closed form.
"""

import numpy as np

from holomon import LogarithmicSystem, LoopWord, Path, RationalMatrixForm, monodromy, representation
from holomon.transport import word_path

###############################################################################
# The scalar form a dz/z is the simplest example: going once around the
# origin multiplies by exp(2 pi i a).

for a in (1 / 3, 0.1 + 0.2j):
    M = monodromy(RationalMatrixForm.scalar([0.0], [a]), Path.circle())
    print(f"a = {a}: computed {M[0, 0]:.12f}, exact {np.exp(2j * np.pi * a):.12f}")

###############################################################################
# A rank-2 system with three poles.  Residues are conjugates of
# diag(1/3, -1/3), the values attached to genus 2.

poles = [0.0, 1.0, 0.5 + 1.0j]
system = LogarithmicSystem.random(poles, genus=2, rng=5)
base = -0.6 - 0.5j
loops = [Path.keyhole(base, p, 0.3) for p in poles]

rep = representation(system.form, loops)
for k, M in enumerate(rep.generators):
    ev = np.linalg.eigvals(M)
    print(f"loop {k}: det = {np.linalg.det(M):.10f}, eigenvalues {np.round(ev, 8)}")

###############################################################################
# Each local monodromy has eigenvalues exp(+-2 pi i / 3), inherited from its
# residue.  Words in the loops multiply like the matrices do:

w1, w2 = LoopWord.parse("0 1^-1"), LoopWord.parse("2 0")
lhs = monodromy(system.form, word_path(loops, w1 * w2))
rhs = monodromy(system.form, word_path(loops, w1)) @ monodromy(system.form, word_path(loops, w2))
print("homomorphism residual:", np.max(np.abs(lhs - rhs)))

###############################################################################
# A loop that encloses all three poles sees the residue at infinity.  Here
# the residues do not sum to zero, so the big loop has nontrivial monodromy.

big = monodromy(system.form, Path.circle(0.5 + 0.4j, 1.6))
print("trace around all poles:", np.trace(big))
