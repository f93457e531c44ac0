"""Graphs of groups, their fundamental groups, and Schreier ranks.

Builds the three standard one-edge examples, reads off presentations,
decomposes along an edge, and closes with the index formula for
subgroups of free groups read from a coset action.
"""

from lambdatrees.graph_of_groups import (
    CosetAction,
    GraphOfGroups,
    GroupEdge,
    Presentation,
    decompose_along_edge,
    fundamental_group_presentation,
    schreier_graph_dot,
    schreier_rank,
    validate_graph_of_groups,
)


def edge(eid, tail, head, group, into_tail, into_head):
    return GroupEdge.make(eid, tail, head, group, into_tail, into_head)


# a loop at one vertex whose edge group maps to the vertex group on
# both ends: the stable letter conjugates one copy onto the other
loop = GraphOfGroups.make(
    {"v": Presentation.free("a")},
    [edge("e", "v", "v", Presentation.free("c"), {"c": "a"}, {"c": "a"})],
)
print("loop with infinite cyclic edge group:")
print("  presentation:", fundamental_group_presentation(loop).to_json())
print("  validation:", validate_graph_of_groups(loop)["valid"])

# one edge between two vertices: the relator glues a squared generator
# to a cubed one
pair = GraphOfGroups.make(
    {"u": Presentation.free("a"), "v": Presentation.free("b")},
    [edge("e", "u", "v", Presentation.free("c"), {"c": "a a"}, {"c": "b b b"})],
)
print("two vertices with a square-cube edge:")
print("  presentation:", fundamental_group_presentation(pair).to_json())
desc = decompose_along_edge(pair, "e")
print("  cutting the edge gives:", desc.to_json()["kind"])

# a loop with trivial edge group contributes a free letter
free_loop = GraphOfGroups.make(
    {"v": Presentation.trivial()},
    [edge("e", "v", "v", Presentation.trivial(), {}, {})],
)
print("free loop:")
print("  presentation:", fundamental_group_presentation(free_loop).to_json())

# a two-coset action of a rank-2 free group: the point stabilizer is
# free of rank 2*(2-1)+1 = 3
action = CosetAction.make(2, {"a": [2, 1], "b": [1, 2]})
record = schreier_rank(2, action)
print("index-2 subgroup of the rank-2 free group:")
print("  rank:", record.rank)
print("  generators:", [" ".join(f"{s}{'-' if k < 0 else ''}" for s, k in w)
                        for w in record.generators])
print(schreier_graph_dot(action))
