"""
Shearing a nilpotent leading term
=================================

A 5x5 system with a double pole whose leading matrix is nilpotent.  A
shearing with ramification 2 turns it into a system with an invertible
2x2 block next to a nilpotent 3x3 block.
"""

from formred.cli import describe_series
from formred.conlinalg import char_poly, is_nilpotent
from formred.polynomials import format_poly
from formred.samples import two_slope_system
from formred.shearing import certify_commutative_from_shearing, search_shearing

a = two_slope_system(known_exponent=8)
print(describe_series(a, "input"))
print("leading matrix nilpotent:", is_nilpotent(a.leading_matrix))

###############################################################################
# The search walks q = 1, 2, ... and exponent vectors in a fixed order, so
# the answer is reproducible.

shear = search_shearing(a, q_max=4)
print("\nshearing:", shear)

###############################################################################
# The sheared system has a fractional pole.  Its coefficients commute with
# the monodromy matrix up to powers of w, which is what later lets the
# splitting avoid fractional powers altogether.

a_hat, p_mat, ok = certify_commutative_from_shearing(a, shear)
print("monodromy:", [str(p_mat[i, i]) for i in range(5)])
print("pole of the sheared system:", -a_hat.valuation)
print("leading characteristic polynomial:", format_poly(char_poly(a_hat.leading_matrix)))
print("commutativity certified:", ok)
