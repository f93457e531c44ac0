"""Ordered groups, finite trees, distances, and quotients.

Builds a rank-2 tree whose edge lengths mix an infinitesimal and an
ordinary coordinate, walks through distances and medians, checks the
tree axioms on a good tree and on a graph with a cycle, and finally
collapses the infinitesimal direction with a convex-subgroup quotient.
"""

from lambdatrees.ordered import ConvexSubgroup, LambdaGroup
from lambdatrees.tree import LambdaTree, check_axioms

Z2 = LambdaGroup(2)

# lengths are lexicographic pairs: (1, 0) dwarfs (0, n) for every n
tree = LambdaTree(
    Z2,
    ["hub", "near", "far", "tip"],
    [
        ("hub", "near", Z2.element(0, 3)),
        ("hub", "far", Z2.element(1, 0)),
        ("far", "tip", Z2.element(0, 2)),
    ],
)

print("vertex distances")
for a in ["hub", "near", "far", "tip"]:
    row = []
    for b in ["hub", "near", "far", "tip"]:
        d = tree.distance(tree.vertex_point(a), tree.vertex_point(b))
        row.append(f"{str(d):>8}")
    print(f"  {a:>5}: {' '.join(row)}")

median = tree.median(
    tree.vertex_point("near"), tree.vertex_point("tip"), tree.vertex_point("far")
)
print("median of near, tip, far:", median)

report = check_axioms(tree)
print("axiom check on the tree:", report["valid"], "after", report["samples"], "samples")

cycle = {
    "group": {"rank": 1, "dyadic": False},
    "vertices": ["a", "b", "c"],
    "edges": [
        {"a": "a", "b": "b", "len": ["1"]},
        {"a": "b", "b": "c", "len": ["1"]},
        {"a": "c", "b": "a", "len": ["1"]},
    ],
}
report = check_axioms(cycle)
print("axiom check on a triangle:", report["valid"])
print("  violated axiom:", report["axiom"])
print("  witness:", report["witness"])

# collapsing the first coordinate merges hub with near and far with tip
quotient = tree.convex_quotient_tree(ConvexSubgroup(Z2, 1))
print("quotient by the infinitesimal coordinate:")
print("  vertices:", quotient.tree.vertices)
for survivor, fiber in sorted(quotient.fibers.items()):
    print(f"  fiber over {survivor}: {sorted(fiber.vertices)}")
