"""Self-isometries of finite trees, given by images of vertices.

An isometry here is the restriction of an isometry of an ambient tree:
it maps each vertex of its domain to a tree point, preserving all
pairwise distances.  The domain may omit vertices (a translation of a
finite path cannot map the last vertex anywhere), and applying the map
to a point outside the spanned subtree raises OrbitEscapesTree.

Displacement along any edge is a convex piecewise-linear function whose
slopes are -2, 0 or 2 and whose kinks sit at parameters where the image
path crosses a vertex, plus possibly one unattained dip toward zero.
All classification work (fixed sets, translation lengths, axes) reduces
to exact linear algebra on these profiles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import (
    DomainError,
    InvalidPoint,
    NotAnIsometry,
    OrbitEscapesTree,
    TreeMismatch,
)
from .ordered import LambdaElement, half_in_group, in_two_lambda
from .tree import LambdaTree, Segment, TreePoint


class Subtree:
    """A closed subtree given by member vertices and closed edge arcs.

    Arcs are (lo, hi) offset intervals in edge coordinates, lo <= hi,
    possibly degenerate (a single interior point).
    """

    def __init__(self, tree: LambdaTree, vertices=(), arcs: Optional[Dict[str, list]] = None):
        self.tree = tree
        self.vertices = frozenset(vertices)
        merged: Dict[str, list] = {}
        for eid, spans in (arcs or {}).items():
            spans = sorted(spans, key=lambda ab: (ab[0].coords, ab[1].coords))
            out = []
            for lo, hi in spans:
                if out and lo <= out[-1][1]:
                    if hi > out[-1][1]:
                        out[-1] = (out[-1][0], hi)
                else:
                    out.append((lo, hi))
            if out:
                merged[eid] = out
        self.arcs = merged

    def is_empty(self) -> bool:
        return not self.vertices and not self.arcs

    def contains(self, p: TreePoint) -> bool:
        p = self.tree.validate_point(p)
        if p.is_vertex():
            if p.vertex in self.vertices:
                return True
            for eid, _ in self.tree.adjacency[p.vertex]:
                edge = self.tree.edges[eid]
                offset = self.tree.group.zero() if edge.a == p.vertex else edge.length
                for lo, hi in self.arcs.get(eid, []):
                    if lo <= offset <= hi:
                        return True
            return False
        for lo, hi in self.arcs.get(p.edge, []):
            if lo <= p.offset <= hi:
                return True
        return False

    def boundary_points(self) -> List[TreePoint]:
        """Member vertices plus arc endpoints; includes every extreme point."""
        out = [self.tree.vertex_point(v) for v in sorted(self.vertices)]
        for eid in sorted(self.arcs):
            for lo, hi in self.arcs[eid]:
                out.append(self.tree.edge_point(eid, lo))
                if hi != lo:
                    out.append(self.tree.edge_point(eid, hi))
        seen = []
        for p in out:
            if p not in seen:
                seen.append(p)
        return seen

    def canonical_point(self) -> TreePoint:
        if self.vertices:
            return self.tree.vertex_point(min(self.vertices))
        if self.arcs:
            eid = min(self.arcs)
            lo, hi = self.arcs[eid][0]
            return self.tree.edge_point(eid, lo)
        raise DomainError("empty subtree has no points")

    def distance_to(self, p: TreePoint) -> LambdaElement:
        p = self.tree.validate_point(p)
        if self.is_empty():
            raise DomainError("distance to an empty subtree")
        best = None
        for v in self.vertices:
            d = self.tree.distance(p, self.tree.vertex_point(v))
            if best is None or d < best:
                best = d
        for eid, spans in self.arcs.items():
            for lo, hi in spans:
                a = self.tree.edge_point(eid, lo)
                b = self.tree.edge_point(eid, hi)
                z = self.tree.median(a, b, p) if a != b else a
                d = self.tree.distance(p, z)
                if best is None or d < best:
                    best = d
        return best

    def total_length(self) -> LambdaElement:
        total = self.tree.group.zero()
        for spans in self.arcs.values():
            for lo, hi in spans:
                total = total + (hi - lo)
        return total

    def diameter(self) -> LambdaElement:
        pts = self.boundary_points()
        best = self.tree.group.zero()
        for i, p in enumerate(pts):
            for q in pts[i + 1 :]:
                d = self.tree.distance(p, q)
                if d > best:
                    best = d
        return best

    def intersection(self, other: "Subtree") -> "Subtree":
        if other.tree is not self.tree:
            raise TreeMismatch("subtrees over different trees")
        vertices = set()
        for v in set(self.vertices) | set(other.vertices):
            p = self.tree.vertex_point(v)
            if self.contains(p) and other.contains(p):
                vertices.add(v)
        arcs: Dict[str, list] = {}
        for eid in set(self.arcs) & set(other.arcs):
            spans = []
            for lo1, hi1 in self.arcs[eid]:
                for lo2, hi2 in other.arcs[eid]:
                    lo = max(lo1, lo2)
                    hi = min(hi1, hi2)
                    if lo <= hi:
                        spans.append((lo, hi))
            if spans:
                arcs[eid] = spans
        return Subtree(self.tree, vertices, arcs)

    def to_json(self) -> dict:
        return {
            "vertices": sorted(self.vertices),
            "arcs": [
                {"edge": eid, "from": lo.to_json(), "to": hi.to_json()}
                for eid in sorted(self.arcs)
                for lo, hi in self.arcs[eid]
            ],
        }

    def __str__(self):
        if self.is_empty():
            return "Subtree(empty)"
        return f"Subtree({sorted(self.vertices)}, {len(self.arcs)} arc-bearing edges)"


@dataclass(frozen=True)
class IsometryClass:
    """Classification outcome: kind, invariant data, and the length value."""

    kind: str  # "elliptic" | "inversion" | "hyperbolic"
    length: LambdaElement
    fixed_set: Optional[Subtree] = None
    flipped_segment: Optional[Segment] = None
    flipped_length: Optional[LambdaElement] = None
    tau: Optional[LambdaElement] = None
    axis: Optional[Subtree] = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "length": self.length.to_json()}
        if self.kind == "elliptic":
            out["fixed_set"] = self.fixed_set.to_json()
        elif self.kind == "inversion":
            out["flipped_length"] = self.flipped_length.to_json()
            out["flipped_segment"] = {
                "from": self.flipped_segment.p.to_json(),
                "to": self.flipped_segment.q.to_json(),
            }
        else:
            out["tau"] = self.tau.to_json()
            out["axis"] = self.axis.to_json()
        return out


@dataclass(frozen=True)
class NoCommonFixedPoint:
    """Witness that two elliptic isometries share no fixed point.

    The bridge runs from the first fixed set to the second.  The product
    translates along a line through the bridge by twice the bridge length,
    and the witness point realizes that minimum displacement.
    """

    bridge_start: TreePoint
    bridge_end: TreePoint
    bridge_length: LambdaElement
    composite_displacement: LambdaElement
    witness_point: TreePoint


class TreeIsometry:
    """A distance-preserving vertex map into the same tree.

    vertex_images maps a nonempty subset of vertices to tree points; the
    map extends uniquely over the subtree those vertices span.
    """

    def __init__(self, tree: LambdaTree, vertex_images: Dict[str, TreePoint], _trusted=False):
        if not isinstance(tree, LambdaTree):
            raise TreeMismatch("first argument must be a LambdaTree")
        self.tree = tree
        images = {}
        for v, p in vertex_images.items():
            if v not in tree.adjacency:
                raise InvalidPoint(f"unknown domain vertex {v!r}")
            images[v] = tree.validate_point(p)
        if not images:
            raise OrbitEscapesTree("isometry with empty domain")
        self.vertex_images = images
        self._hull_cache: Optional[Tuple[set, Dict[str, Tuple[str, str]]]] = None
        self._image_cache: Dict[str, TreePoint] = {}
        if not _trusted:
            self._validate()

    def _validate(self) -> None:
        dom = sorted(self.vertex_images)
        for i, u in enumerate(dom):
            pu = self.tree.vertex_point(u)
            for v in dom[i + 1 :]:
                pv = self.tree.vertex_point(v)
                want = self.tree.distance(pu, pv)
                got = self.tree.distance(self.vertex_images[u], self.vertex_images[v])
                if want != got:
                    raise NotAnIsometry(
                        f"distance {u}..{v} is {want} but the images are {got} apart"
                    )

    # -- domain geometry ---------------------------------------------------

    def _hull(self) -> Tuple[set, Dict[str, Tuple[str, str]]]:
        """Vertices spanned by the domain, each with a bracketing witness pair."""
        if self._hull_cache is not None:
            return self._hull_cache
        dom = sorted(self.vertex_images)
        root = dom[0]
        members = {root}
        witness: Dict[str, Tuple[str, str]] = {root: (root, root)}
        for d in dom:
            path = self.tree.vertex_path(d, root)
            for v in path:
                if v in members and v != d:
                    continue
                members.add(v)
                witness[v] = (d, root)
        self._hull_cache = (members, witness)
        return self._hull_cache

    def domain_contains(self, p: TreePoint) -> bool:
        p = self.tree.validate_point(p)
        members, _ = self._hull()
        if p.is_vertex():
            return p.vertex in members
        edge = self.tree.edges[p.edge]
        return edge.a in members and edge.b in members

    def hull_vertices(self) -> set:
        return set(self._hull()[0])

    def hull_edges(self) -> List[str]:
        members, _ = self._hull()
        return [
            eid for eid, e in self.tree.edges.items() if e.a in members and e.b in members
        ]

    # -- application ---------------------------------------------------------

    def _vertex_image(self, v: str) -> TreePoint:
        got = self.vertex_images.get(v)
        if got is not None:
            return got
        cached = self._image_cache.get(v)
        if cached is not None:
            return cached
        members, witness = self._hull()
        if v not in members:
            raise OrbitEscapesTree(f"vertex {v} is outside the mapped subtree")
        d, r = witness[v]
        walk = self.tree.path_walk(self.vertex_images[d], self.vertex_images[r])
        s = self.tree.vertex_distance(d, v)
        image = walk.point_at(s)
        self._image_cache[v] = image
        return image

    def apply(self, p: TreePoint) -> TreePoint:
        p = self.tree.validate_point(p)
        if p.is_vertex():
            return self._vertex_image(p.vertex)
        if not self.domain_contains(p):
            raise OrbitEscapesTree(f"point {p} is outside the mapped subtree")
        edge = self.tree.edges[p.edge]
        ia = self._vertex_image(edge.a)
        ib = self._vertex_image(edge.b)
        walk = self.tree.path_walk(ia, ib)
        return walk.point_at(p.offset)

    def displacement(self, p: TreePoint) -> LambdaElement:
        return self.tree.distance(p, self.apply(p))

    # -- algebra ---------------------------------------------------------------

    @staticmethod
    def identity(tree: LambdaTree) -> "TreeIsometry":
        return TreeIsometry(
            tree, {v: tree.vertex_point(v) for v in tree.vertices}, _trusted=True
        )

    def compose(self, other: "TreeIsometry") -> "TreeIsometry":
        """self after other: x maps to self(other(x))."""
        if other.tree is not self.tree:
            raise TreeMismatch("isometries act on different trees")
        images = {}
        for v in other.vertex_images:
            try:
                mid = other._vertex_image(v)
                images[v] = self.apply(mid)
            except OrbitEscapesTree:
                continue
        if not images:
            raise OrbitEscapesTree("composite has empty domain")
        return TreeIsometry(self.tree, images, _trusted=True)

    def inverse(self) -> "TreeIsometry":
        if all(img.is_vertex() for img in self.vertex_images.values()):
            # vertex-to-vertex maps invert by swapping the pairs
            images = {
                img.vertex: self.tree.vertex_point(v)
                for v, img in self.vertex_images.items()
            }
            return TreeIsometry(self.tree, images, _trusted=True)
        members, _ = self._hull()
        image_points = [self._vertex_image(v) for v in sorted(members)]
        dom_points = [self.tree.vertex_point(v) for v in sorted(members)]
        images = {}
        for w in self.tree.vertices:
            pw = self.tree.vertex_point(w)
            preimage = self._inverse_point(pw, image_points, dom_points)
            if preimage is not None:
                images[w] = preimage
        if not images:
            raise OrbitEscapesTree("inverse has empty domain")
        return TreeIsometry(self.tree, images, _trusted=True)

    def _inverse_point(self, target: TreePoint, image_points, dom_points):
        """Preimage of a point of the image subtree, or None."""
        for i, a in enumerate(image_points):
            for j, b in enumerate(image_points):
                da = self.tree.distance(a, target)
                if self.tree.distance(a, b) == da + self.tree.distance(target, b):
                    walk = self.tree.path_walk(dom_points[i], dom_points[j])
                    return walk.point_at(da)
        return None

    def is_identity(self) -> bool:
        return all(
            img.is_vertex() and img.vertex == v for v, img in self.vertex_images.items()
        )

    def __eq__(self, other):
        return (
            isinstance(other, TreeIsometry)
            and other.tree is self.tree
            and other.vertex_images == self.vertex_images
        )

    # -- displacement profiles ---------------------------------------------------

    def _edge_pieces(self, eid: str):
        """Exact simple pieces of the displacement along a hull edge.

        The edge is parametrized by the offset s from its first endpoint.
        Each piece is (lo, hi, f_lo, f_hi, bottom2): on [lo, hi] the
        displacement is affine with slope -2, 0 or +2 between the endpoint
        values, unless bottom2 is set, in which case the image runs back
        along this very edge and f(s) = |2s - bottom2| exactly (the zero at
        bottom2/2 may or may not be a group point).
        """
        edge = self.tree.edges[eid]
        ia = self._vertex_image(edge.a)
        ib = self._vertex_image(edge.b)
        walk = self.tree.path_walk(ia, ib)
        if not walk.arcs:
            raise NotAnIsometry("edge endpoints share an image")
        pieces = []
        c = self.tree.group.zero()
        for aid, o1, o2 in walk.arcs:
            c2 = c + (o2 - o1).abs()
            if aid == eid and o2 < o1:
                # image moves backward along the edge itself
                bottom2 = o1 + c
                f_lo = (c - o1).abs()
                f_hi = (c2 - o2).abs()
                if 2 * c < bottom2 < 2 * c2:
                    pieces.append((c, c2, f_lo, f_hi, bottom2))
                else:
                    pieces.append((c, c2, f_lo, f_hi, None))
            elif aid == eid:
                # image moves forward along the edge: constant offset
                f = (c - o1).abs()
                pieces.append((c, c2, f, f, None))
            else:
                x1 = self.tree.edge_point(eid, c)
                x2 = self.tree.edge_point(eid, c2)
                f_lo = self.tree.distance(x1, walk.point_at(c))
                f_hi = self.tree.distance(x2, walk.point_at(c2))
                pieces.append((c, c2, f_lo, f_hi, None))
            c = c2
        return pieces

    def minimum_displacement(self) -> Tuple[LambdaElement, TreePoint]:
        """Exact minimum of d(x, phi x) over the mapped subtree, with witness."""
        members, _ = self._hull()
        best = None
        witness = None
        for v in sorted(members):
            p = self.tree.vertex_point(v)
            d = self.displacement(p)
            if best is None or d < best:
                best, witness = d, p
        for eid in self.hull_edges():
            for lo, hi, f_lo, f_hi, bottom2 in self._edge_pieces(eid):
                if bottom2 is None:
                    continue  # affine: endpoints already cover the minimum
                if in_two_lambda(bottom2):
                    s = half_in_group(bottom2)
                    return (self.tree.group.zero(), self.tree.edge_point(eid, s))
                # zero approached but unattained: no group point realizes
                # the infimum here, so a blanket minimum claim would lie
                raise DomainError(
                    "displacement minimum is not attained at group points"
                )
        return (best, witness)

    def level_set(self, target: LambdaElement) -> Subtree:
        """All points of the mapped subtree displaced by exactly target."""
        members, _ = self._hull()
        zero = self.tree.group.zero()
        vertices = set()
        for v in members:
            if self.displacement(self.tree.vertex_point(v)) == target:
                vertices.add(v)
        arcs: Dict[str, list] = {}
        for eid in self.hull_edges():
            spans = []
            for lo, hi, f_lo, f_hi, bottom2 in self._edge_pieces(eid):
                if bottom2 is not None:
                    # f(s) = |2s - bottom2|: candidates 2s = bottom2 -+ target
                    for num in (bottom2 - target, bottom2 + target):
                        if in_two_lambda(num):
                            s = half_in_group(num)
                            if lo <= s <= hi:
                                spans.append((s, s))
                    continue
                ds = hi - lo
                diff = f_hi - f_lo
                if diff.is_zero():
                    if f_lo == target:
                        spans.append((lo, hi))
                elif diff == 2 * ds or diff == -(2 * ds):
                    num = f_lo - target if f_lo > target else target - f_lo
                    matches = (f_lo > target) == (diff < zero) or f_lo == target
                    if matches and in_two_lambda(num):
                        s = lo + half_in_group(num)
                        if lo <= s <= hi:
                            spans.append((s, s))
                else:
                    raise NotAnIsometry(
                        "displacement along an edge is not piecewise linear"
                        " with slopes 0, +-2"
                    )
            if spans:
                arcs[eid] = spans
        sub = Subtree(self.tree, vertices, arcs)
        return _absorb_arc_endpoints(sub)

    def fixed_set(self) -> Subtree:
        return self.level_set(self.tree.group.zero())

    # -- classification --------------------------------------------------------------

    def classify(self) -> IsometryClass:
        zero = self.tree.group.zero()
        fixed = self.fixed_set()
        if not fixed.is_empty():
            return IsometryClass("elliptic", zero, fixed_set=fixed)
        squared = self.compose(self)
        fixed2 = squared.fixed_set()
        if not fixed2.is_empty():
            lam = fixed2.total_length()
            ends = _diameter_pair(fixed2)
            if self.tree.distance(*ends) != lam:
                raise NotAnIsometry("flipped point set is not a segment")
            if in_two_lambda(lam):
                raise NotAnIsometry("flipped segment length is divisible by 2")
            return IsometryClass(
                "inversion",
                zero,
                flipped_segment=self.tree.segment(*ends),
                flipped_length=lam,
            )
        tau2, _ = squared.minimum_displacement()
        if tau2 == zero or not in_two_lambda(tau2):
            raise OrbitEscapesTree("translation length of the square is not doubled")
        tau = half_in_group(tau2)
        own_min, _ = self.minimum_displacement()
        if own_min != tau:
            raise OrbitEscapesTree(
                "the axis does not meet the mapped subtree; supply a larger tree"
            )
        axis = self.level_set(tau)
        if axis.diameter() != axis.total_length():
            raise OrbitEscapesTree("translation axis is not a path inside the tree")
        return IsometryClass("hyperbolic", tau, tau=tau, axis=axis)

    # -- serialization ------------------------------------------------------------------

    def to_json(self) -> dict:
        return {"map": {v: img.to_json() for v, img in sorted(self.vertex_images.items())}}

    @staticmethod
    def from_json(tree: LambdaTree, obj: dict) -> "TreeIsometry":
        images = {}
        for v, target in obj["map"].items():
            images[v] = tree.point_from_json(target)
        return TreeIsometry(tree, images)

    def __str__(self):
        return f"TreeIsometry({len(self.vertex_images)} mapped vertices)"


def _diameter_pair(sub: Subtree) -> Tuple[TreePoint, TreePoint]:
    """The pair of extreme points realizing the subtree's diameter."""
    pts = sub.boundary_points()
    best = (pts[0], pts[0])
    best_d = sub.tree.group.zero()
    for i, p in enumerate(pts):
        for q in pts[i:]:
            d = sub.tree.distance(p, q)
            if d > best_d:
                best, best_d = (p, q), d
    return best


def _absorb_arc_endpoints(sub: Subtree) -> Subtree:
    """Move arc endpoints that sit on vertices into the vertex set."""
    vertices = set(sub.vertices)
    arcs: Dict[str, list] = {}
    zero = sub.tree.group.zero()
    for eid, spans in sub.arcs.items():
        edge = sub.tree.edges[eid]
        keep = []
        for lo, hi in spans:
            if lo == zero:
                vertices.add(edge.a)
            if hi == edge.length:
                vertices.add(edge.b)
            if lo == hi and (lo == zero or lo == edge.length):
                continue
            keep.append((lo, hi))
        if keep:
            arcs[eid] = keep
    return Subtree(sub.tree, vertices, arcs)


def compose(phi: TreeIsometry, psi: TreeIsometry) -> TreeIsometry:
    """The isometry sending x to phi(psi(x))."""
    return phi.compose(psi)


def classify(phi: TreeIsometry) -> IsometryClass:
    return phi.classify()


def common_fixed_point(phi: TreeIsometry, psi: TreeIsometry):
    """A point fixed by both, or a NoCommonFixedPoint bridge witness."""
    if psi.tree is not phi.tree:
        raise TreeMismatch("isometries act on different trees")
    f_phi = phi.fixed_set()
    f_psi = psi.fixed_set()
    if f_phi.is_empty() or f_psi.is_empty():
        raise DomainError("common_fixed_point needs two elliptic isometries")
    common = f_phi.intersection(f_psi)
    if not common.is_empty():
        return common.canonical_point()
    # bridge from F_phi to F_psi: project each boundary point of one set
    # onto the other and keep the closest pair
    best = None
    for p in f_phi.boundary_points():
        d = f_psi.distance_to(p)
        if best is None or d < best[0]:
            best = (d, p)
    gap, start = best
    # the matching endpoint on F_psi is the projection of start
    end = None
    for q in f_psi.boundary_points():
        if phi.tree.distance(start, q) == gap:
            end = q
            break
    if end is None:
        for eid, spans in f_psi.arcs.items():
            for lo, hi in spans:
                a = phi.tree.edge_point(eid, lo)
                b = phi.tree.edge_point(eid, hi)
                z = phi.tree.median(a, b, start) if a != b else a
                if phi.tree.distance(start, z) == gap:
                    end = z
                    break
            if end is not None:
                break
    composite = phi.compose(psi)
    disp, at = composite.minimum_displacement()
    return NoCommonFixedPoint(
        bridge_start=start,
        bridge_end=end,
        bridge_length=gap,
        composite_displacement=disp,
        witness_point=at,
    )
