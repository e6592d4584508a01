"""Which digit-wise additions give the same group?

Every partition of m defines an addition on length-m digit strings: carries
travel inside a block and stop at its edge.  Run this to see that the
element-order counts tell the resulting groups apart, while the largest
order alone does not.
"""

from equilens.digits import AdditionSpec, enumerate_partitions, max_element_order, order_profile, verify_group_axioms

BASE, M = 2, 4

print(f"base {BASE}, strings of length {M}\n")
print(f"{'partition':<14}{'axioms':<9}{'max order':<11}order counts")
for part in enumerate_partitions(M):
    spec = AdditionSpec(BASE, part)
    ok = verify_group_axioms(spec).ok
    counts = ", ".join(f"{o}:{c}" for o, c in order_profile(spec))
    print(f"{str(part.parts):<14}{'ok' if ok else 'FAIL':<9}{max_element_order(spec):<11}{counts}")

# (2, 2) and (2, 1, 1) share their largest order but not their order counts
