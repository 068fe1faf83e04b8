"""
Classifying characteristic matrices
===================================

A group G in the class is determined by its exponent type (m1, m2, m3) and a
3x3 matrix w over F_p recording the p^{m_i}-th powers of the generators in
the commutator basis.  Different matrices can give isomorphic groups; the
classifier reduces any w to a family representative and returns the
transform that does it.
"""

from pgcm.classifier import classify, enumerate_families, representative
from pgcm.invariants import invariants
from pgcm.iso_action import ExponentType, apply
from pgcm.matrices import format_matrix

# an odd prime and the three-distinct-exponents case
e = ExponentType(3, (3, 2, 1))
w = ((0, 0, 0), (0, 0, 1), (0, 2, 0))
res = classify(e, w)
print(e, format_matrix(w), "->", res.label, "via", res.method)

# the witness maps w onto the representative exactly
assert apply(res.witness, w) == res.representative
print("witness params", res.witness.params)

###############################################################################
# Any matrix in the same orbit gets the same label.

from pgcm.classifier import random_transform
import random

rng = random.Random(1)
t = random_transform(e, rng)
u = apply(t, w)
print(format_matrix(u), "->", classify(e, u).label)

###############################################################################
# Families and their invariants at p = 5, m = (1, 1, 1)

e5 = ExponentType(5, (1, 1, 1))
for label in enumerate_families(e5):
    rep = representative(e5, label)
    inv = invariants(e5, rep)
    print(f"{str(label):<14} {format_matrix(rep):<20} i_min={inv.i_min} i_max={inv.i_max}")
