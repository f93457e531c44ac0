"""The three kinds of tree isometry, with the displacement identity.

Shows an elliptic leg swap, a hyperbolic partial translation, and an
inversion that becomes elliptic once half-integer lengths are allowed.
Each classification is checked against the displacement identity
d(p, image of p) = 2 d(p, characteristic set) + translation length.
"""

import random

from lambdatrees.isometry import (
    NoCommonFixedPoint,
    TreeIsometry,
    common_fixed_point,
)
from lambdatrees.ordered import LambdaGroup
from lambdatrees.tree import LambdaTree, random_point

Z1 = LambdaGroup(1)


def vertex_map(tree, pairs):
    return TreeIsometry(tree, {v: tree.vertex_point(w) for v, w in pairs.items()})


# a three-legged star: swapping two legs fixes the center
star = LambdaTree(
    Z1,
    ["c", "t0", "t1", "t2"],
    [("c", f"t{i}", Z1.element(2)) for i in range(3)],
)
swap = vertex_map(star, {"c": "c", "t0": "t1", "t1": "t0", "t2": "t2"})
cls = swap.classify()
print("leg swap:", cls.kind, "with length", cls.length)
print("  fixed vertices:", cls.fixed_set.to_json()["vertices"])

# a partial translation along a path: hyperbolic with the path as axis;
# the thorn at v2 rides along to the identical thorn at v4
path = LambdaTree(
    Z1,
    [f"v{i}" for i in range(9)] + ["S", "T"],
    [(f"v{i}", f"v{i+1}", Z1.element(1)) for i in range(8)]
    + [("v2", "S", Z1.element(2)), ("v4", "T", Z1.element(2))],
)
images = {f"v{i}": f"v{i+2}" for i in range(7)}
images["S"] = "T"
shift = vertex_map(path, images)
cls = shift.classify()
print("path shift:", cls.kind, "with length", cls.length)

rng = random.Random(11)
print("  displacement identity at sampled points:")
for _ in range(6):
    p = random_point(path, rng)
    if not shift.domain_contains(p):
        continue
    moved = shift.displacement(p)
    away = cls.axis.distance_to(p)
    print(f"    d(p, image) = {moved} = 2*{away} + {cls.length} at p = {p}")

# a flip of a length-3 edge wants to fix the midpoint, which is not a
# group point until lengths may be halved
edge = LambdaTree(Z1, ["a", "b"], [("a", "b", Z1.element(3))])
flip = vertex_map(edge, {"a": "b", "b": "a"})
cls = flip.classify()
print("edge flip over integers:", cls.kind, "flipping length", cls.flipped_length)

halved = edge.base_change(LambdaGroup(1, dyadic=True))
flip2 = vertex_map(halved, {"a": "b", "b": "a"})
cls2 = flip2.classify()
print("same flip over half-integers:", cls2.kind)
print("  fixed set:", flip2.fixed_set())

# two rotations of a shared star meet in the center
rot = vertex_map(star, {"c": "c", "t0": "t1", "t1": "t2", "t2": "t0"})
shared = common_fixed_point(swap, rot)
print("common fixed point of swap and rotation:", shared)

# two partial reflections of the path have disjoint fixed points, so
# their product translates and the bridge witness reports by how much
left = vertex_map(path, {f"v{i}": f"v{4-i}" for i in range(5)})
right = vertex_map(path, {f"v{i}": f"v{8-i}" for i in range(9)})
witness = common_fixed_point(left, right)
assert isinstance(witness, NoCommonFixedPoint)
print("reflections about v2 and v4:")
print("  bridge:", witness.bridge_start, "to", witness.bridge_end,
      "of length", witness.bridge_length)
print("  product displacement:", witness.composite_displacement)
