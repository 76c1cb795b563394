"""
Holonomy algebras and quotient algebras
=======================================

Two finite-dimensional shadows of a connection: the Lie algebra generated by
its coefficient matrices, and the image of the Chen-Parshin series in a
quotient of the tensor algebra.
"""

import numpy as np

from holomon import (Path, RationalMatrixForm, RelationSet, chen_parshin, chen_parshin_limit, graded_dimension,
                     lie_closure, monodromy, project, quotient_basis, reduction_check, validate_hom)

###############################################################################
# E and F generate all of sl(2); a strictly upper triangular connection stays
# inside a one-dimensional algebra, and its monodromy stays unipotent.

E = np.array([[0, 1], [0, 0]])
print("dim <E, F> =", lie_closure([E, E.T]).dim)

N = np.triu(np.ones((3, 3)), 1)
form = RationalMatrixForm([0.0, 1.0], [N, 0.5 * N])
L = lie_closure(form.coefficients())
print("dim =", L.dim, " connection lies in it:", reduction_check(form, L))
print(np.round(monodromy(form, Path.circle(0.5, 1.2)), 8))

###############################################################################
# The commutator relation t0 t1 = t1 t0 turns the free algebra into
# polynomials in two variables, with n + 1 monomials in degree n.

rel = RelationSet.commutator()
print([graded_dimension(rel, n) for n in range(6)])
print("degree 2 basis:", quotient_basis(rel, 2))

###############################################################################
# A homomorphism into commuting matrices only sees the projected series.

theta = [RationalMatrixForm.scalar([0.0], [1.0]), RationalMatrixForm.scalar([0.5], [1.0])]
loop = Path.circle(0.2, 1.0)
f = validate_hom([np.diag([0.2, -0.1]), np.diag([0.05j, 0.3])], rel)
J = chen_parshin(theta, loop, 4)
print("difference after projection:", np.max(np.abs(f.apply(J) - f.apply(project(J, rel)))))

###############################################################################
# Summing f applied to the series recovers the monodromy of the induced
# connection.  For nilpotent images the sum is exact at finite order.

g = validate_hom([np.triu(np.random.default_rng(3).standard_normal((3, 3)), 1) for _ in range(2)],
                 RelationSet(2))
print("nilpotent residual at N = 2:", chen_parshin_limit(g, theta, loop, 2).residual)
