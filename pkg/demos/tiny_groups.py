"""
The ten groups of order 64 with three generators
================================================

At p = 2 and m = (1, 1, 1) the matrix action does not apply, so matrices
are compared by constructing the groups and searching for isomorphisms.
"""

from pgcm.classifier import TINY_PRESENTATIONS, classify_tiny, tiny_partition
from pgcm.group_model import MetaMode, Presentation, metahamiltonian_oracle
from pgcm.matrices import format_matrix

classes = tiny_partition()
print(len(classes), "classes among 512 matrices")
for members in classes:
    label = classify_tiny(members[0]).label
    print(f"{str(label):<4} {len(members):>3} matrices, e.g. {format_matrix(members[0])}")

###############################################################################
# Only one of them is metahamiltonian: every non-abelian subgroup is normal.

for name, text in TINY_PRESENTATIONS.items():
    pres = Presentation(text, 2, (1, 1, 1), generators=("a", "b", "c"))
    meta = metahamiltonian_oracle(pres.spec(), MetaMode.FULL)
    print(f"{name:<4} metahamiltonian={meta.value} ({meta.subgroups_examined} subgroups examined)")
