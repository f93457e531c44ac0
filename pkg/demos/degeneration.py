"""Length functions, projective normalization, and degeneration.

Measures word lengths two ways: combinatorially on a Cayley ball of
the rank-2 free group, and through valuations of matrix traces for a
one-parameter family of representations. As the parameter grows, the
normalized trace lengths converge to the valuation lengths; the report
table below shows the sup-distance shrinking by one decade per step.
"""

from lambdatrees.lengths import (
    converge_check,
    converge_csv,
    enumerate_classes,
    free_group_action,
    length_function,
    mu,
    projectivize,
    theta,
)
from lambdatrees.sl2 import Mat2
from lambdatrees.valuation import ValuedField

classes = enumerate_classes(["a", "b"], 3)
print(f"conjugacy classes of cyclic length <= 3: {len(classes)}")

tree, gens = free_group_action(["a", "b"], 5)
lengths = length_function(gens, classes)
print("cyclic word lengths on the radius-5 Cayley ball:")
for cls, value in list(zip(lengths.classes, lengths.values))[:8]:
    print(f"  {cls.text or '1':>8}: {value}")

point = projectivize(lengths)
print("projectivized (first coords):", [str(c) for c in point.coords[:6]])

# the same classes measured through a matrix family over Q(t) at infinity
K = ValuedField.from_json({"field": "Q(t)", "at": "inf"})
diag = Mat2.from_json(K, ["t", "0", "0", "1/t"])
shear = Mat2.from_json(K, ["1", "1", "0", "1"])
rep = {"a": diag, "b": shear * diag * shear.inverse()}

short = ["a", "b", "a b", "a a"]
limit, raw = mu(rep, short)
print("valuation lengths:", {c.text: str(v) for c, v in zip(raw.classes, raw.values)})
print("mu limit coords:", [str(c) for c in limit.coords])

spot = theta(
    {"a": [[1000.0, 0.0], [0.0, 0.001]],
     "b": [[1000.0, 0.001 - 1000.0], [0.0, 0.001]]},
    short,
)
print("theta at t=1000:", [round(c, 5) for c in spot.coords])

report = converge_check(rep, [10, 100, 1000, 10000], short, tolerance=1e-6)
print("convergence toward mu:")
print(converge_csv(report))
print("converged within tolerance:", report["converged"])
