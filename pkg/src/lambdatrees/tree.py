"""Finite trees with edge lengths drawn from an ordered abelian group.

Points are vertices or interior positions on an edge, addressed by an
exact offset from the edge's first endpoint.  All geometry (distances,
segments, medians) is computed exactly; the realized tree is never
discretized.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    DomainError,
    EmbeddingError,
    GroupMismatch,
    InvalidEdge,
    InvalidPoint,
    TreeMismatch,
)
from .ordered import (
    ConvexSubgroup,
    LambdaElement,
    LambdaGroup,
    convex_quotient,
    half_in_group,
    in_two_lambda,
)


@dataclass(frozen=True)
class TreePoint:
    """A vertex or an interior edge point with an exact offset."""

    kind: str  # "vertex" | "interior"
    vertex: Optional[str] = None
    edge: Optional[str] = None
    offset: Optional[LambdaElement] = None

    @staticmethod
    def at_vertex(v: str) -> "TreePoint":
        return TreePoint("vertex", vertex=v)

    @staticmethod
    def on_edge(edge: str, offset: LambdaElement) -> "TreePoint":
        return TreePoint("interior", edge=edge, offset=offset)

    def is_vertex(self) -> bool:
        return self.kind == "vertex"

    def to_json(self):
        if self.is_vertex():
            return self.vertex
        return {"edge": self.edge, "offset": self.offset.to_json()}

    def __str__(self):
        if self.is_vertex():
            return self.vertex
        return f"{self.edge}@{self.offset}"


@dataclass(frozen=True)
class Edge:
    id: str
    a: str
    b: str
    length: LambdaElement

    def other(self, v: str) -> str:
        return self.b if v == self.a else self.a


class LambdaTree:
    """Immutable finite tree over an ordered abelian group."""

    def __init__(self, group: LambdaGroup, vertices: Iterable[str], edges, edge_ids=None):
        self.group = group
        self.vertices = tuple(dict.fromkeys(str(v) for v in vertices))
        vertex_set = set(self.vertices)
        if len(vertex_set) != len(self.vertices):
            raise DomainError("duplicate vertex identifiers")
        if not self.vertices:
            raise DomainError("a tree needs at least one vertex")
        self.edges: Dict[str, Edge] = {}
        self.adjacency: Dict[str, List[Tuple[str, str]]] = {v: [] for v in self.vertices}
        edges = list(edges)
        if edge_ids is None:
            edge_ids = [f"e{i}" for i in range(len(edges))]
        for eid, (a, b, length) in zip(edge_ids, edges):
            a, b = str(a), str(b)
            if eid in self.edges:
                raise InvalidEdge(f"duplicate edge id {eid}")
            if a not in vertex_set or b not in vertex_set:
                raise InvalidEdge(f"edge {eid} touches unknown vertex")
            if a == b:
                raise InvalidEdge(f"edge {eid} is a self-loop")
            if not isinstance(length, LambdaElement) or length.group != group:
                raise GroupMismatch(f"edge {eid} length is not in the tree's group")
            if not length.is_positive():
                raise InvalidEdge(f"edge {eid} has nonpositive length")
            edge = Edge(eid, a, b, length)
            self.edges[eid] = edge
            self.adjacency[a].append((eid, b))
            self.adjacency[b].append((eid, a))
        self._check_tree_shape()
        self._parent: Optional[Dict[str, Optional[Tuple[str, str]]]] = None
        self._depth: Optional[Dict[str, int]] = None
        self._wdepth: Optional[Dict[str, LambdaElement]] = None

    def _check_tree_shape(self) -> None:
        if len(self.edges) != len(self.vertices) - 1:
            raise DomainError("edge count does not match a tree")
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for _, w in self.adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self.vertices):
            raise DomainError("graph is not connected")

    # -- point handling ------------------------------------------------

    def vertex_point(self, v: str) -> TreePoint:
        if v not in self.adjacency:
            raise InvalidPoint(f"unknown vertex {v!r}")
        return TreePoint.at_vertex(v)

    def edge_point(self, eid: str, offset) -> TreePoint:
        edge = self.edges.get(eid)
        if edge is None:
            raise InvalidPoint(f"unknown edge {eid!r}")
        if not isinstance(offset, LambdaElement):
            try:
                coords = offset if isinstance(offset, (list, tuple)) else [offset]
                offset = self.group.element(*coords)
            except DomainError as exc:
                raise InvalidPoint(f"offset {offset} is not representable") from exc
        if offset.group != self.group:
            raise InvalidPoint("offset is not in the tree's group")
        zero = self.group.zero()
        if offset < zero or offset > edge.length:
            raise InvalidPoint(f"offset {offset} outside edge {eid}")
        if offset == zero:
            return TreePoint.at_vertex(edge.a)
        if offset == edge.length:
            return TreePoint.at_vertex(edge.b)
        return TreePoint.on_edge(eid, offset)

    def validate_point(self, p: TreePoint) -> TreePoint:
        if not isinstance(p, TreePoint):
            raise InvalidPoint(f"not a tree point: {p!r}")
        if p.is_vertex():
            return self.vertex_point(p.vertex)
        return self.edge_point(p.edge, p.offset)

    def point_from_json(self, obj) -> TreePoint:
        if isinstance(obj, str):
            return self.vertex_point(obj)
        if isinstance(obj, dict) and "edge" in obj and "offset" in obj:
            offset = LambdaElement.from_json(obj["offset"], self.group)
            return self.edge_point(str(obj["edge"]), offset)
        raise InvalidPoint(f"unrecognized point description {obj!r}")

    # -- rooted bookkeeping ---------------------------------------------

    def _ensure_rooted(self) -> None:
        if self._parent is not None:
            return
        root = self.vertices[0]
        parent: Dict[str, Optional[Tuple[str, str]]] = {root: None}
        depth = {root: 0}
        wdepth = {root: self.group.zero()}
        queue = [root]
        while queue:
            v = queue.pop()
            for eid, w in self.adjacency[v]:
                if w not in parent:
                    parent[w] = (v, eid)
                    depth[w] = depth[v] + 1
                    wdepth[w] = wdepth[v] + self.edges[eid].length
                    queue.append(w)
        self._parent, self._depth, self._wdepth = parent, depth, wdepth

    def lowest_common_ancestor(self, u: str, v: str) -> str:
        self._ensure_rooted()
        depth = self._depth
        parent = self._parent
        while depth[u] > depth[v]:
            u = parent[u][0]
        while depth[v] > depth[u]:
            v = parent[v][0]
        while u != v:
            u = parent[u][0]
            v = parent[v][0]
        return u

    def vertex_distance(self, u: str, v: str) -> LambdaElement:
        if u == v:
            return self.group.zero()
        self._ensure_rooted()
        w = self.lowest_common_ancestor(u, v)
        wd = self._wdepth
        return (wd[u] - wd[w]) + (wd[v] - wd[w])

    def vertex_path(self, u: str, v: str) -> List[str]:
        """Vertices along the unique path, endpoints included."""
        self._ensure_rooted()
        w = self.lowest_common_ancestor(u, v)
        up = []
        x = u
        while x != w:
            up.append(x)
            x = self._parent[x][0]
        down = []
        x = v
        while x != w:
            down.append(x)
            x = self._parent[x][0]
        return up + [w] + list(reversed(down))

    # -- metric ----------------------------------------------------------

    def _exit_costs(self, p: TreePoint) -> List[Tuple[str, LambdaElement]]:
        """Vertices through which paths leave p, with the cost of reaching them."""
        if p.is_vertex():
            return [(p.vertex, self.group.zero())]
        edge = self.edges[p.edge]
        return [(edge.a, p.offset), (edge.b, edge.length - p.offset)]

    def distance(self, p: TreePoint, q: TreePoint) -> LambdaElement:
        p = self.validate_point(p)
        q = self.validate_point(q)
        if not p.is_vertex() and not q.is_vertex() and p.edge == q.edge:
            return (p.offset - q.offset).abs()
        best = None
        for ep, cp in self._exit_costs(p):
            for eq, cq in self._exit_costs(q):
                cand = cp + self.vertex_distance(ep, eq) + cq
                if best is None or cand < best:
                    best = cand
        return best

    def path_walk(self, p: TreePoint, q: TreePoint) -> "PathWalk":
        p = self.validate_point(p)
        q = self.validate_point(q)
        if p == q:
            return PathWalk(self, p, q, [], self.group.zero())
        if not p.is_vertex() and not q.is_vertex() and p.edge == q.edge:
            arcs = [(p.edge, p.offset, q.offset)]
            return PathWalk(self, p, q, arcs, (p.offset - q.offset).abs())
        best = None
        for ep, cp in self._exit_costs(p):
            for eq, cq in self._exit_costs(q):
                cand = cp + self.vertex_distance(ep, eq) + cq
                if best is None or cand < best[0]:
                    best = (cand, ep, eq)
        total, ep, eq = best
        arcs: List[Tuple[str, LambdaElement, LambdaElement]] = []
        if not p.is_vertex():
            edge = self.edges[p.edge]
            target = self.group.zero() if ep == edge.a else edge.length
            arcs.append((p.edge, p.offset, target))
        spine = self.vertex_path(ep, eq)
        for u, v in zip(spine, spine[1:]):
            eid = self.edge_between(u, v)
            edge = self.edges[eid]
            if edge.a == u:
                arcs.append((eid, self.group.zero(), edge.length))
            else:
                arcs.append((eid, edge.length, self.group.zero()))
        if not q.is_vertex():
            edge = self.edges[q.edge]
            start = self.group.zero() if eq == edge.a else edge.length
            arcs.append((q.edge, start, q.offset))
        return PathWalk(self, p, q, arcs, total)

    def edge_between(self, u: str, v: str) -> Optional[str]:
        for eid, w in self.adjacency[u]:
            if w == v:
                return eid
        return None

    def segment(self, p: TreePoint, q: TreePoint) -> "Segment":
        walk = self.path_walk(p, q)
        return Segment(self, p, q, walk)

    def median(self, p: TreePoint, q: TreePoint, r: TreePoint) -> TreePoint:
        p = self.validate_point(p)
        q = self.validate_point(q)
        r = self.validate_point(r)
        spread = self.distance(p, q) + self.distance(p, r) - self.distance(q, r)
        alpha = half_in_group(spread)
        return self.path_walk(p, q).point_at(alpha)

    def classify_point(self, p: TreePoint) -> Tuple[str, int]:
        p = self.validate_point(p)
        if not p.is_vertex():
            return ("regular", 2)
        count = len(self.adjacency[p.vertex])
        if count >= 3:
            return ("branch", count)
        if count == 2:
            return ("regular", 2)
        return ("dead_end", count)

    # -- structural transforms --------------------------------------------

    def base_change(self, target: LambdaGroup) -> "LambdaTree":
        src = self.group
        if target.rank < src.rank:
            raise EmbeddingError("target group rank is smaller than the source rank")
        if src.dyadic and not target.dyadic:
            raise EmbeddingError("dyadic lengths do not embed in an integer group")

        def embed(x: LambdaElement) -> LambdaElement:
            pad = (Fraction(0),) * (target.rank - src.rank)
            return LambdaElement(x.coords + pad, target)

        edges = [(e.a, e.b, embed(e.length)) for e in self._edge_list()]
        return LambdaTree(target, self.vertices, edges, [e.id for e in self._edge_list()])

    def embed_length(self, x: LambdaElement, target: LambdaGroup) -> LambdaElement:
        pad = (Fraction(0),) * (target.rank - x.group.rank)
        return LambdaElement(x.coords + pad, target)

    def convex_quotient_tree(self, subgroup: ConvexSubgroup) -> "QuotientResult":
        if subgroup.group != self.group:
            raise GroupMismatch("subgroup is over a different group")
        rep = {v: v for v in self.vertices}

        def find(v: str) -> str:
            while rep[v] != v:
                rep[v] = rep[rep[v]]
                v = rep[v]
            return v

        for edge in self._edge_list():
            if subgroup.contains(edge.length):
                ra, rb = find(edge.a), find(edge.b)
                if ra != rb:
                    high, low = (ra, rb) if ra > rb else (rb, ra)
                    rep[high] = low
        component: Dict[str, List[str]] = {}
        for v in self.vertices:
            component.setdefault(find(v), []).append(v)
        quotient_group = subgroup.quotient_group()
        new_vertices = sorted(component)
        new_edges = []
        new_ids = []
        vertex_map = {v: find(v) for v in self.vertices}
        for edge in self._edge_list():
            if not subgroup.contains(edge.length):
                new_edges.append(
                    (find(edge.a), find(edge.b), convex_quotient(edge.length, subgroup))
                )
                new_ids.append(edge.id)
        quotient = LambdaTree(quotient_group, new_vertices, new_edges, new_ids)
        fibers = {}
        for root, members in component.items():
            member_set = set(members)
            fiber_edges = [
                (e.a, e.b, e.length)
                for e in self._edge_list()
                if subgroup.contains(e.length) and e.a in member_set
            ]
            fiber_ids = [
                e.id
                for e in self._edge_list()
                if subgroup.contains(e.length) and e.a in member_set
            ]
            fibers[root] = LambdaTree(self.group, sorted(member_set), fiber_edges, fiber_ids)
        return QuotientResult(quotient, fibers, vertex_map)

    def _edge_list(self) -> List[Edge]:
        return [self.edges[eid] for eid in self.edges]

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "vertices": list(self.vertices),
            "edges": [
                {"a": e.a, "b": e.b, "len": e.length.to_json()} for e in self._edge_list()
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "LambdaTree":
        group = LambdaGroup.from_json(obj["group"])
        vertices = [str(v) for v in obj["vertices"]]
        edges = []
        for rec in obj["edges"]:
            length = LambdaElement.from_json(rec["len"], group)
            edges.append((str(rec["a"]), str(rec["b"]), length))
        return LambdaTree(group, vertices, edges)

    def to_dot(self) -> str:
        lines = ["graph tree {"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for e in self._edge_list():
            lines.append(f'  "{e.a}" -- "{e.b}" [label="{e.length}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __str__(self):
        return f"LambdaTree({len(self.vertices)} vertices, {len(self.edges)} edges)"


class PathWalk:
    """The unique reduced path between two points, as traversable arcs.

    Each arc is (edge id, start offset, end offset); offsets are measured
    from the edge's first endpoint, and the traversal runs monotonically
    from start to end within each arc.
    """

    def __init__(self, tree: LambdaTree, start: TreePoint, end: TreePoint, arcs, length):
        self.tree = tree
        self.start = start
        self.end = end
        self.arcs = arcs
        self.length = length

    def point_at(self, s: LambdaElement) -> TreePoint:
        zero = self.tree.group.zero()
        if s < zero or s > self.length:
            raise InvalidPoint(f"arc position {s} outside [0, {self.length}]")
        if s == zero:
            return self.start
        acc = zero
        for eid, a, b in self.arcs:
            arc_len = (b - a).abs()
            nxt = acc + arc_len
            if s <= nxt:
                rem = s - acc
                offset = a + rem if b > a else a - rem
                return self.tree.edge_point(eid, offset)
            acc = nxt
        return self.end

    def interior_vertices(self) -> List[str]:
        """Vertices strictly between the endpoints, in traversal order."""
        out: List[str] = []
        zero = self.tree.group.zero()
        for i in range(len(self.arcs) - 1):
            eid, a, b = self.arcs[i]
            edge = self.tree.edges[eid]
            out.append(edge.a if b == zero else edge.b)
        return out


class Segment:
    """The unique segment between two points of the tree."""

    def __init__(self, tree: LambdaTree, p: TreePoint, q: TreePoint, walk: PathWalk):
        self.tree = tree
        self.p = walk.start
        self.q = walk.end
        self.walk = walk
        self.length = walk.length
        self.vertex_path = walk.interior_vertices()

    def is_nondegenerate(self) -> bool:
        return self.length.is_positive()

    def point_at(self, s: LambdaElement) -> TreePoint:
        return self.walk.point_at(s)

    def contains(self, x: TreePoint) -> bool:
        x = self.tree.validate_point(x)
        d = self.tree.distance
        return d(self.p, x) + d(x, self.q) == self.length

    def __str__(self):
        return f"Segment({self.p} .. {self.q}, length {self.length})"


@dataclass
class QuotientResult:
    """A quotient tree, its fibers keyed by quotient vertex, and the vertex map."""

    tree: LambdaTree
    fibers: Dict[str, LambdaTree]
    vertex_map: Dict[str, str]


def _structural_report(group, vertices, edges) -> Optional[dict]:
    """Connectivity/acyclicity/positivity screening for raw graph data."""
    ids = [str(v) for v in vertices]
    if len(set(ids)) != len(ids):
        return {"valid": False, "axiom": "b", "witness": "duplicate vertex identifiers"}
    if not ids:
        return {"valid": False, "axiom": "a", "witness": "empty vertex set"}
    vertex_set = set(ids)
    zero = group.zero()
    adjacency = {v: [] for v in ids}
    for i, (a, b, length) in enumerate(edges):
        a, b = str(a), str(b)
        if a not in vertex_set or b not in vertex_set:
            return {
                "valid": False,
                "axiom": "a",
                "witness": f"edge {i} touches a vertex outside the tree",
            }
        if not length.is_positive():
            return {
                "valid": False,
                "axiom": "metric",
                "witness": f"edge {i} has nonpositive length {length}",
            }
        if a == b:
            return {
                "valid": False,
                "axiom": "b",
                "witness": f"self-loop at {a}: two distinct segments from {a} to itself",
            }
        adjacency[a].append((i, b))
        adjacency[b].append((i, a))
    # connectivity
    seen = {ids[0]}
    stack = [ids[0]]
    while stack:
        v = stack.pop()
        for _, w in adjacency[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(ids):
        inside = ids[0]
        outside = next(v for v in ids if v not in seen)
        return {
            "valid": False,
            "axiom": "a",
            "witness": f"no segment joins {inside} and {outside}: graph is disconnected",
        }
    # acyclicity: a connected graph with more than n-1 edges has a cycle
    if len(edges) >= len(ids):
        cycle = _find_cycle(ids, adjacency)
        u, v = cycle
        return {
            "valid": False,
            "axiom": "b",
            "witness": f"two distinct segments join {u} and {v}: cycle detected",
        }
    return None


def _find_cycle(ids, adjacency) -> Tuple[str, str]:
    """Two vertices joined by distinct arcs in a connected non-forest."""
    parent = {ids[0]: (None, None)}
    stack = [ids[0]]
    while stack:
        v = stack.pop()
        for eid, w in adjacency[v]:
            if w not in parent:
                parent[w] = (v, eid)
                stack.append(w)
            elif parent[v][1] != eid:
                return (v, w)
    raise AssertionError("cycle expected but not found")


def random_point(tree: LambdaTree, rng: random.Random) -> TreePoint:
    """A random vertex or representable interior point, for sampling."""
    choices = list(tree.vertices)
    if tree.edges and rng.random() < 0.5:
        eid = rng.choice(sorted(tree.edges))
        edge = tree.edges[eid]
        if in_two_lambda(edge.length):
            return tree.edge_point(eid, half_in_group(edge.length))
        unit = tree.group.element(
            *([0] * (tree.group.rank - 1) + [1])
        )
        if tree.group.zero() < unit < edge.length:
            return tree.edge_point(eid, unit)
    return tree.vertex_point(rng.choice(choices))


def check_axioms(candidate, sample_size: int = 50, seed: int = 0) -> dict:
    """Validate tree axioms on a raw graph description or a LambdaTree.

    The structural screen (connectivity, acyclicity, positive lengths) is
    complete; segment axioms are then spot-checked on sampled points.
    Returns a report dict with keys valid, axiom, witness, samples.
    """
    if isinstance(candidate, LambdaTree):
        group = candidate.group
        vertices = candidate.vertices
        edges = [(e.a, e.b, e.length) for e in candidate._edge_list()]
    elif isinstance(candidate, dict):
        group = LambdaGroup.from_json(candidate["group"])
        vertices = [str(v) for v in candidate["vertices"]]
        edges = [
            (str(r["a"]), str(r["b"]), LambdaElement.from_json(r["len"], group))
            for r in candidate["edges"]
        ]
    else:
        group, vertices, edges = candidate

    bad = _structural_report(group, vertices, edges)
    if bad is not None:
        bad["samples"] = 0
        return bad

    tree = LambdaTree(group, vertices, edges)
    rng = random.Random(seed)
    performed = 0
    for _ in range(sample_size):
        p = random_point(tree, rng)
        q = random_point(tree, rng)
        r = random_point(tree, rng)
        # axiom (a): a segment exists and realizes the distance
        seg = tree.segment(p, q)
        if seg.length != tree.distance(p, q):
            return {
                "valid": False,
                "axiom": "a",
                "witness": f"segment {p}..{q} does not realize the distance",
                "samples": performed,
            }
        # axiom (b): segments from a common endpoint meet in a segment
        m = tree.median(p, q, r)
        sq = tree.segment(p, q)
        sr = tree.segment(p, r)
        if not (sq.contains(m) and sr.contains(m)):
            return {
                "valid": False,
                "axiom": "b",
                "witness": f"median of {p},{q},{r} escapes a defining segment",
                "samples": performed,
            }
        # axiom (c): segments overlapping in exactly one point concatenate
        if tree.distance(q, m) + tree.distance(m, r) != tree.distance(q, r):
            return {
                "valid": False,
                "axiom": "c",
                "witness": f"segments {q}..{m} and {m}..{r} do not concatenate",
                "samples": performed,
            }
        performed += 1
    return {"valid": True, "axiom": None, "witness": None, "samples": performed}
