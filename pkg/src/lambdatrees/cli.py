"""Command-line front end: JSON task files in, JSON documents and DOT out.

A task file either wraps a command with its payload,

    {"command": "sl2-ball", "payload": {"field": {...}, "radius": 2}}

or is the bare payload, with the command named on the command line.
Results are deterministic JSON (sorted keys); exit status 0 means
success, 1 a parse or usage error, and 2 a domain error, in which case
the result document carries the error code and message.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from .errors import DomainError, LambdaTreeError
from .graph_of_groups import (
    CosetAction,
    GraphOfGroups,
    decompose_along_edge,
    fundamental_group_presentation,
    schreier_graph_dot,
    schreier_rank,
    validate_graph_of_groups,
)
from .isometry import TreeIsometry
from .lengths import (
    ProjectivePoint,
    canonical_class,
    converge_check,
    converge_csv,
    free_group_action,
    length_function,
    mu,
    theta,
)
from .ordered import ConvexSubgroup, LambdaGroup
from .sl2 import (
    Mat2,
    act,
    ball,
    ball_to_dot,
    base_vertex,
    canonical_vertex,
    find_fixed_vertex,
    sl2_translation_length,
)
from .tree import LambdaTree, check_axioms
from .valuation import ValuedField


class PayloadError(Exception):
    """The payload does not match the command's schema."""


def _need(payload: dict, key: str):
    if not isinstance(payload, dict) or key not in payload:
        raise PayloadError(f"payload needs a {key!r} field")
    return payload[key]


def _tree(payload: dict) -> LambdaTree:
    return LambdaTree.from_json(_need(payload, "tree"))


def _field(obj) -> ValuedField:
    if not isinstance(obj, dict):
        raise PayloadError("field description must be an object")
    return ValuedField.from_json(obj)


def _matrix(field: ValuedField, entries) -> Mat2:
    return Mat2.from_json(field, entries)


def _point_from_json(obj) -> ProjectivePoint:
    classes = [canonical_class(c) for c in _need(obj, "classes")]
    exact = bool(obj.get("exact", True))
    raw = _need(obj, "coords")
    coords = [Fraction(str(c)) for c in raw] if exact else [float(c) for c in raw]
    return ProjectivePoint.make(classes, coords, exact)


def _run_tree_distance(payload, args):
    tree = _tree(payload)
    p = tree.point_from_json(_need(payload, "p"))
    q = tree.point_from_json(_need(payload, "q"))
    return {"distance": tree.distance(p, q).to_json()}, None


def _run_classify_isometry(payload, args):
    tree = _tree(payload)
    iso = TreeIsometry.from_json(tree, _need(payload, "isometry"))
    return iso.classify().to_json(), None


def _run_check_axioms(payload, args):
    candidate = _need(payload, "tree")
    samples = payload.get("samples", 50)
    if not isinstance(samples, int) or samples < 0:
        raise PayloadError("samples must be a nonnegative integer")
    seed = args.seed if args.seed is not None else 0
    return check_axioms(candidate, sample_size=samples, seed=seed), None


def _run_base_change(payload, args):
    tree = _tree(payload)
    target = LambdaGroup.from_json(_need(payload, "target"))
    return {"tree": tree.base_change(target).to_json()}, None


def _run_quotient(payload, args):
    tree = _tree(payload)
    depth = _need(payload, "depth")
    if not isinstance(depth, int):
        raise PayloadError("depth must be an integer")
    result = tree.convex_quotient_tree(ConvexSubgroup(tree.group, depth))
    return {
        "tree": result.tree.to_json(),
        "vertex_map": result.vertex_map,
        "fibers": {root: fiber.to_json() for root, fiber in sorted(result.fibers.items())},
    }, None


def _run_sl2_act(payload, args):
    field = _field(_need(payload, "field"))
    g = _matrix(field, _need(payload, "matrix"))
    if "vertex" in payload:
        x = canonical_vertex(_matrix(field, payload["vertex"]))
    else:
        x = base_vertex(field)
    image = act(g, x)
    return {"vertex": image.to_json(), "label": image.label()}, None


def _run_sl2_ball(payload, args):
    field = _field(_need(payload, "field"))
    radius = _need(payload, "radius")
    if not isinstance(radius, int):
        raise PayloadError("radius must be an integer")
    if "center" in payload:
        center = canonical_vertex(_matrix(field, payload["center"]))
    else:
        center = base_vertex(field)
    b = ball(center, radius)
    result = {
        "center": b.center.label(),
        "radius": b.radius,
        "vertices": [v.label() for v in b.vertices],
        "edges": [[a.label(), c.label()] for a, c in b.edges],
    }
    return result, ball_to_dot(b)


def _run_sl2_length(payload, args):
    field = _field(_need(payload, "field"))
    g = _matrix(field, _need(payload, "matrix"))
    tau = sl2_translation_length(g)
    fixed = find_fixed_vertex(g)
    return {
        "translation_length": tau.to_json(),
        "fixed_vertex": None if fixed is None else fixed.label(),
    }, None


def _run_fundamental_group(payload, args):
    gog = GraphOfGroups.from_json(_need(payload, "graph"))
    tree_edges = payload.get("tree_edges")
    if tree_edges is not None:
        tree_edges = [str(e) for e in tree_edges]
    presentation = fundamental_group_presentation(gog, tree_edges)
    return {
        "presentation": presentation.to_json(),
        "report": validate_graph_of_groups(gog),
    }, None


def _run_decompose_edge(payload, args):
    gog = GraphOfGroups.from_json(_need(payload, "graph"))
    return decompose_along_edge(gog, str(_need(payload, "edge"))).to_json(), None


def _run_schreier_rank(payload, args):
    rank = _need(payload, "rank")
    if not isinstance(rank, int):
        raise PayloadError("rank must be an integer")
    action = CosetAction.from_json(_need(payload, "action"))
    record = schreier_rank(rank, action)
    return record.to_json(), schreier_graph_dot(action)


def _length_action(spec) -> dict:
    if not isinstance(spec, dict):
        raise PayloadError("action must be an object")
    kind = spec.get("type")
    if kind == "cayley":
        _, action = free_group_action(
            [str(s) for s in _need(spec, "generators")], _need(spec, "radius")
        )
        return action
    if kind == "tree":
        tree = LambdaTree.from_json(_need(spec, "tree"))
        return {
            str(sym): TreeIsometry.from_json(tree, iso)
            for sym, iso in _need(spec, "isometries").items()
        }
    if kind == "matrix":
        field = _field(_need(spec, "field"))
        return {
            str(sym): _matrix(field, entries)
            for sym, entries in _need(spec, "matrices").items()
        }
    raise PayloadError("action type must be cayley, tree, or matrix")


def _run_length_function(payload, args):
    action = _length_action(_need(payload, "action"))
    return length_function(action, _need(payload, "classes")).to_json(), None


def _run_theta(payload, args):
    matrices = _need(payload, "matrices")
    if not isinstance(matrices, dict):
        raise PayloadError("matrices must map generator symbols to 2x2 arrays")
    point = theta(matrices, _need(payload, "classes"))
    return point.to_json(), None


def _run_mu(payload, args):
    field = _field(_need(payload, "field"))
    matrices = {
        str(sym): _matrix(field, entries)
        for sym, entries in _need(payload, "matrices").items()
    }
    point, raw = mu(matrices, _need(payload, "classes"))
    return {"point": point.to_json(), "raw": raw.to_json()}, None


def _run_converge_check(payload, args):
    field = _field(_need(payload, "field"))
    family = {
        str(sym): _matrix(field, entries)
        for sym, entries in _need(payload, "family").items()
    }
    limit = None
    if payload.get("limit") is not None:
        limit = _point_from_json(payload["limit"])
    tolerance = args.tolerance if args.tolerance is not None else 1e-6
    report = converge_check(
        family,
        _need(payload, "parameters"),
        _need(payload, "classes"),
        tolerance=tolerance,
        limit=limit,
    )
    csv_path = payload.get("csv")
    if csv_path and report["distance"]:
        with open(csv_path, "w") as handle:
            handle.write(converge_csv(report))
    return report, None


COMMANDS = {
    "tree-distance": _run_tree_distance,
    "classify-isometry": _run_classify_isometry,
    "check-axioms": _run_check_axioms,
    "base-change": _run_base_change,
    "quotient": _run_quotient,
    "sl2-act": _run_sl2_act,
    "sl2-ball": _run_sl2_ball,
    "sl2-length": _run_sl2_length,
    "fundamental-group": _run_fundamental_group,
    "decompose-edge": _run_decompose_edge,
    "schreier-rank": _run_schreier_rank,
    "length-function": _run_length_function,
    "theta": _run_theta,
    "mu": _run_mu,
    "converge-check": _run_converge_check,
}

TOLERANCE_COMMANDS = {"converge-check"}
SEED_COMMANDS = {"check-axioms"}
DOT_COMMANDS = {"sl2-ball", "schreier-rank"}


def _emit(document: dict, out: Optional[str]) -> None:
    text = json.dumps(document, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lambdatrees",
        description="Run a JSON task against the tree library.",
    )
    parser.add_argument("command", nargs="?", choices=sorted(COMMANDS), metavar="command")
    parser.add_argument("--task", required=True, help="path to the JSON task file")
    parser.add_argument("--out", help="write the result document here instead of stdout")
    parser.add_argument("--dot", help="write DOT output here (graph commands only)")
    parser.add_argument("--tolerance", type=float, help="tolerance for numeric commands")
    parser.add_argument("--seed", type=int, help="seed for sampling commands")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0

    try:
        with open(args.task) as handle:
            task = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read task file: {exc}", file=sys.stderr)
        return 1

    if not isinstance(task, dict):
        print("task file must hold a JSON object", file=sys.stderr)
        return 1
    file_command = task.get("command")
    if file_command is not None and not isinstance(file_command, str):
        print("task command must be a string", file=sys.stderr)
        return 1
    command = args.command or file_command
    if command is None:
        print("no command given on the command line or in the task file", file=sys.stderr)
        return 1
    if args.command and file_command and args.command != file_command:
        print(
            f"command line says {args.command!r} but the task file says {file_command!r}",
            file=sys.stderr,
        )
        return 1
    if command not in COMMANDS:
        print(f"unknown command {command!r}", file=sys.stderr)
        return 1
    payload = task.get("payload", task if file_command is None else {})
    if args.tolerance is not None and command not in TOLERANCE_COMMANDS:
        print(f"--tolerance does not apply to {command}", file=sys.stderr)
        return 1
    if args.seed is not None and command not in SEED_COMMANDS:
        print(f"--seed does not apply to {command}", file=sys.stderr)
        return 1
    if args.dot and command not in DOT_COMMANDS:
        print(f"{command} produces no DOT output", file=sys.stderr)
        return 1

    try:
        result, dot = COMMANDS[command](payload, args)
    except PayloadError as exc:
        print(f"bad payload for {command}: {exc}", file=sys.stderr)
        return 1
    except LambdaTreeError as exc:
        _emit({"error": exc.code, "message": str(exc)}, args.out)
        return 2
    except (KeyError, TypeError, ValueError) as exc:
        print(f"bad payload for {command}: {exc!r}", file=sys.stderr)
        return 1

    if args.dot and dot is not None:
        with open(args.dot, "w") as handle:
            handle.write(dot)
    _emit(result, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
