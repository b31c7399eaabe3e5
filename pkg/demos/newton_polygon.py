"""
Slopes of an irregular singularity
==================================

The driver alternates shearing searches and root-free splits until every
block has a single slope.  The slopes with their lengths make up the
Newton polygon, and each leaf also fixes the leading exponential terms.
"""

from formred.cli import describe_tree
from formred.conlinalg import as_matrix
from formred.pseries import PuiseuxMatrix
from formred.reduction import leading_exponentials, newton_polygon, reduce
from formred.samples import two_slope_system

tree = reduce(two_slope_system(known_exponent=30), order=8)
print(describe_tree(tree))

for slope, length in newton_polygon(tree):
    print(f"slope {slope}, length {length}")

for fam in leading_exponentials(tree):
    print(f"exp({', '.join(fam['terms'])}) with λ a root of {fam['root_of']}")

###############################################################################
# Diagonal input gives integer slopes straight away.

diag = PuiseuxMatrix(2, 1, 2, {0: as_matrix([[1, 0], [0, 0]]),
                                1: as_matrix([[0, 0], [0, 3]])}, 6)
print(newton_polygon(reduce(diag)))
