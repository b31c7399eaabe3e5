"""
Splitting without roots of x
============================

Block-diagonalize the two-slope system along its shearing while keeping
every exponent an integer, then check ``H[A] = B`` independently.
"""

from formred.cli import describe_series, format_matrix
from formred.reduction import rootfree_split, verify_equivalence
from formred.samples import TWO_SLOPE_SHEAR, two_slope_system

a = two_slope_system(known_exponent=30)
res = rootfree_split(a, TWO_SLOPE_SHEAR, order=6)

print("blocks:", res.partition.n1, "+", res.partition.n2)
print("H ramification:", res.H.q, " B ramification:", res.B.q)

###############################################################################
# The first coefficients of the transformation.  Every exponent is an
# integer even though the shearing used ramification 2.

for e in range(3):
    print(f"\nH coefficient of x^{e}")
    print(format_matrix(res.H.coeff(e)))

print()
print(describe_series(res.B, "block-diagonal result"))

###############################################################################
# The gauge check recomputes ``H^-1 A H - H^-1 x H'`` from scratch.

cert = verify_equivalence(a, res.H, res.B)
print("\n" + cert.describe())
