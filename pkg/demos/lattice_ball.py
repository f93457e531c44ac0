"""The lattice tree of SL2 over the 2-adic rationals.

Walks outward from the base homothety class, draws the radius-2 ball
as DOT text, and compares matrix translation lengths with the fixed
vertex search: a matrix moves every vertex exactly when its trace has
negative valuation.
"""

from lambdatrees.sl2 import (
    Mat2,
    act,
    ball,
    ball_to_dot,
    base_vertex,
    find_fixed_vertex,
    lattice_distance,
    neighbors,
    sl2_translation_length,
)
from lambdatrees.valuation import ValuedField

Q2 = ValuedField.from_json({"field": "Q", "p": 2})
origin = base_vertex(Q2)

print("base vertex:", origin.label())
print("its neighbors:", [n.label() for n in neighbors(origin)])

around = ball(origin, 2)
print(f"radius-2 ball: {len(around.vertices)} vertices, {len(around.edges)} edges")
print(ball_to_dot(around))

samples = {
    "diag(2, 1/2)": Mat2.from_json(Q2, ["2", "0", "0", "1/2"]),
    "diag(4, 1/4)": Mat2.from_json(Q2, ["4", "0", "0", "1/4"]),
    "upper shear": Mat2.from_json(Q2, ["1", "1", "0", "1"]),
    "rotation": Mat2.from_json(Q2, ["0", "1", "-1", "0"]),
    "shear conjugate": Mat2.from_json(Q2, ["1/2", "1", "-1/4", "3/2"]),
}
print("translation lengths and fixed vertices:")
for name, g in samples.items():
    tau = sl2_translation_length(g)
    fixed = find_fixed_vertex(g)
    where = fixed.label() if fixed is not None else "none in the search ball"
    print(f"  {name:>15}: length {str(tau):>4}, fixed vertex {where}")
    if fixed is not None:
        assert act(g, fixed) == fixed

# a diagonal matrix walks the base vertex down its axis two steps at a time
g = samples["diag(2, 1/2)"]
spot = origin
print("orbit of the base vertex under diag(2, 1/2):")
for _ in range(4):
    print(f"  {spot.label()}, at distance {lattice_distance(origin, spot)}")
    spot = act(g, spot)
