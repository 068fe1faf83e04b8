"""
Checking a family list against the true orbits
==============================================

For small p all p^9 matrices can be partitioned into orbits of the
isomorphism action with numpy.  The family list is correct when each orbit
holds exactly one representative, and the classifier agrees with the orbit
of every matrix.
"""

import numpy as np

from pgcm.classifier import verify_transversal
from pgcm.iso_action import ExponentType, orbit_labels

e = ExponentType(3, (2, 1, 1))
lab = orbit_labels(e)
keys, sizes = np.unique(lab, return_counts=True)
print(f"{e}: {len(keys)} orbits, largest {sizes.max()}, smallest {sizes.min()}")

report = verify_transversal(e)
print(report.summary())
for name, size in sorted(report.orbit_sizes.items(), key=lambda kv: -kv[1])[:5]:
    print(f"  {name:<12} orbit size {size}")

###############################################################################
# At p = 2 with m = (2, 1, 1) the 23-entry list has one isomorphic pair:
# M7 and N10 lie in a single orbit, and a search over group isomorphisms
# agrees.

from pgcm.classifier import parse_label, representative
from pgcm.group_model import GroupSpec, brute_isomorphic

e2 = ExponentType(2, (2, 1, 1))
r2 = verify_transversal(e2)
print(r2.summary())
print(r2.violations)
a = representative(e2, parse_label("M7", 2))
b = representative(e2, parse_label("N10", 2))
found, images = brute_isomorphic(GroupSpec(e2, a), GroupSpec(e2, b))
print("M7 ~ N10 as groups:", found, "generator images", images)
