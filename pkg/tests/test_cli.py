import json
import subprocess
import sys

import pytest

from lambdatrees.cli import main


def write_task(tmp_path, name, document):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


LINE_TREE = {
    "group": {"rank": 1, "dyadic": False},
    "vertices": ["u", "v", "w"],
    "edges": [
        {"a": "u", "b": "v", "len": ["1"]},
        {"a": "v", "b": "w", "len": ["2"]},
    ],
}

UNIT_EDGE_TREE = {
    "group": {"rank": 1, "dyadic": False},
    "vertices": ["u", "v"],
    "edges": [{"a": "u", "b": "v", "len": ["1"]}],
}

Q2 = {"field": "Q", "p": 2}
QT_INF = {"field": "Q(t)", "at": "inf"}


def test_classify_isometry_unit_flip(tmp_path, capsys):
    task = write_task(tmp_path, "flip.json", {
        "command": "classify-isometry",
        "payload": {
            "tree": UNIT_EDGE_TREE,
            "isometry": {"map": {"u": "v", "v": "u"}},
        },
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "inversion"
    assert doc["length"] == ["0"]
    assert doc["flipped_length"] == ["1"]
    # exact-arithmetic output is byte-identical across runs
    code2, out2, _ = run_cli(["--task", task], capsys)
    assert code2 == 0 and out2 == out


def test_tree_distance_with_interior_point(tmp_path, capsys):
    task = write_task(tmp_path, "dist.json", {
        "command": "tree-distance",
        "payload": {
            "tree": LINE_TREE,
            "p": "u",
            "q": {"edge": "e1", "offset": ["1"]},
        },
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    assert json.loads(out) == {"distance": ["2"]}


def test_check_axioms_accepts_seed_and_reports_cycles(tmp_path, capsys):
    good = write_task(tmp_path, "good.json", {"tree": LINE_TREE, "samples": 8})
    code, out, _ = run_cli(["check-axioms", "--task", good, "--seed", "5"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["valid"] is True and doc["samples"] == 8

    cyclic = dict(LINE_TREE)
    cyclic["edges"] = LINE_TREE["edges"] + [{"a": "w", "b": "u", "len": ["1"]}]
    bad = write_task(tmp_path, "bad.json", {"tree": cyclic})
    code, out, _ = run_cli(["check-axioms", "--task", bad], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["valid"] is False and doc["axiom"] == "b"
    assert "cycle" in doc["witness"]


def test_base_change_and_quotient(tmp_path, capsys):
    task = write_task(tmp_path, "bc.json", {
        "command": "base-change",
        "payload": {"tree": UNIT_EDGE_TREE, "target": {"rank": 2, "dyadic": False}},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["tree"]["group"] == {"rank": 2, "dyadic": False}
    assert doc["tree"]["edges"][0]["len"] == ["1", "0"]

    rank2 = {
        "group": {"rank": 2, "dyadic": False},
        "vertices": ["x", "y", "z"],
        "edges": [
            {"a": "x", "b": "y", "len": ["0", "1"]},
            {"a": "y", "b": "z", "len": ["1", "0"]},
        ],
    }
    task = write_task(tmp_path, "quot.json", {
        "command": "quotient",
        "payload": {"tree": rank2, "depth": 1},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["vertex_map"] == {"x": "x", "y": "x", "z": "z"}
    assert doc["tree"]["vertices"] == ["x", "z"]
    assert sorted(doc["fibers"]) == ["x", "z"]


def test_sl2_ball_counts_and_dot(tmp_path, capsys):
    task = write_task(tmp_path, "ball.json", {"field": Q2, "radius": 2})
    dot_path = tmp_path / "ball.dot"
    out_path = tmp_path / "ball_result.json"
    code, _, _ = run_cli(
        ["sl2-ball", "--task", task, "--dot", str(dot_path), "--out", str(out_path)],
        capsys,
    )
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert len(doc["vertices"]) == 10
    assert len(doc["edges"]) == 9
    assert doc["center"] == "L(0; 0)"
    dot = dot_path.read_text()
    assert dot.count("[label=") == 10
    assert dot.count(" -- ") == 9


def test_sl2_act_and_length(tmp_path, capsys):
    task = write_task(tmp_path, "act.json", {
        "command": "sl2-act",
        "payload": {"field": Q2, "matrix": ["2", "0", "0", "1/2"]},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    assert json.loads(out)["label"] == "L(2; 0)"

    task = write_task(tmp_path, "len.json", {
        "command": "sl2-length",
        "payload": {"field": Q2, "matrix": ["2", "0", "0", "1/2"]},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["translation_length"] == ["2"]
    assert doc["fixed_vertex"] is None

    task = write_task(tmp_path, "ell.json", {
        "command": "sl2-length",
        "payload": {"field": Q2, "matrix": ["0", "1", "-1", "0"]},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["translation_length"] == ["0"]
    assert doc["fixed_vertex"] is not None


def test_fundamental_group_and_decompose(tmp_path, capsys):
    hnn_graph = {
        "vertices": {"v": {"gens": ["a"], "rels": []}},
        "edges": [{
            "id": "e", "from": "v", "to": "v",
            "group": {"gens": ["c"], "rels": []},
            "into_from": {"c": "a"}, "into_to": {"c": "a"},
        }],
    }
    task = write_task(tmp_path, "fg.json", {
        "command": "fundamental-group",
        "payload": {"graph": hnn_graph},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["presentation"] == {"gens": ["a", "s"], "rels": ["s- a s a-"]}
    assert doc["report"]["valid"] is True

    amalgam_graph = {
        "vertices": {"v": {"gens": ["a"], "rels": []},
                     "w": {"gens": ["b"], "rels": []}},
        "edges": [{
            "id": "e", "from": "v", "to": "w",
            "group": {"gens": ["c"], "rels": []},
            "into_from": {"c": "a a"}, "into_to": {"c": "b b b"},
        }],
    }
    task = write_task(tmp_path, "dec.json", {
        "command": "decompose-edge",
        "payload": {"graph": amalgam_graph, "edge": "e"},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "amalgam"
    assert doc["nontrivial"] is True


def test_schreier_rank_with_dot(tmp_path, capsys):
    task = write_task(tmp_path, "sch.json", {
        "rank": 2,
        "action": {"degree": 2, "perms": {"a": [2, 1], "b": [1, 2]}},
    })
    dot_path = tmp_path / "sch.dot"
    code, out, _ = run_cli(
        ["schreier-rank", "--task", task, "--dot", str(dot_path)], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["rank"] == 3
    assert doc["generators"] == ["b", "a a", "a b a-"]
    assert dot_path.read_text().startswith("digraph")


def test_length_function_action_types(tmp_path, capsys):
    task = write_task(tmp_path, "cayley.json", {
        "command": "length-function",
        "payload": {
            "action": {"type": "cayley", "generators": ["a", "b"], "radius": 5},
            "classes": ["a b a- b-", "a"],
        },
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    assert json.loads(out)["values"] == [["4"], ["1"]]

    task = write_task(tmp_path, "mat.json", {
        "command": "length-function",
        "payload": {
            "action": {"type": "matrix", "field": {"field": "Q(t)", "at": "0"},
                       "matrices": {"a": ["t", "0", "0", "1/t"]}},
            "classes": ["a", "a a"],
        },
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    assert json.loads(out)["values"] == [["2"], ["4"]]

    task = write_task(tmp_path, "tree_action.json", {
        "command": "length-function",
        "payload": {
            "action": {"type": "tree", "tree": LINE_TREE,
                       "isometries": {"a": {"map": {"u": "u", "v": "v", "w": "w"}}}},
            "classes": ["a"],
        },
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    assert json.loads(out)["values"] == [["0"]]

    task = write_task(tmp_path, "badtype.json", {
        "command": "length-function",
        "payload": {"action": {"type": "nope"}, "classes": ["a"]},
    })
    code, _, err = run_cli(["--task", task], capsys)
    assert code == 1
    assert "action type" in err


def test_theta_mu_converge(tmp_path, capsys):
    task = write_task(tmp_path, "theta.json", {
        "command": "theta",
        "payload": {"matrices": {"a": [[100.0, 0.0], [0.0, 0.01]]},
                    "classes": ["a", "a a"]},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["exact"] is False
    assert doc["coords"][1] == 1.0
    assert abs(doc["coords"][0] - 0.5) < 1e-4

    task = write_task(tmp_path, "mu.json", {
        "command": "mu",
        "payload": {"field": QT_INF,
                    "matrices": {"a": ["t", "0", "0", "1/t"]},
                    "classes": ["a", "a a"]},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["point"]["coords"] == ["1/2", "1"]
    assert doc["raw"]["values"] == [["1"], ["2"]]

    csv_path = tmp_path / "conv.csv"
    task = write_task(tmp_path, "conv.json", {
        "command": "converge-check",
        "payload": {"field": QT_INF,
                    "family": {"a": ["t", "0", "0", "1/t"]},
                    "parameters": [10, 100, 1000],
                    "classes": ["a", "a a"],
                    "csv": str(csv_path)},
    })
    code, out, _ = run_cli(["--task", task, "--tolerance", "1e-6"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["converged"] is True
    assert doc["tolerance"] == 1e-6
    assert len(doc["distance"]) == 3
    assert csv_path.read_text().startswith("k,distance\n10.0,")

    # a supplied limit reproduces the same distances
    task = write_task(tmp_path, "convlim.json", {
        "command": "converge-check",
        "payload": {"field": QT_INF,
                    "family": {"a": ["t", "0", "0", "1/t"]},
                    "parameters": [10, 100, 1000],
                    "classes": ["a", "a a"],
                    "limit": {"classes": ["a", "a a"],
                              "coords": ["1/2", "1"], "exact": True}},
    })
    code, out2, _ = run_cli(["--task", task], capsys)
    assert code == 0
    assert json.loads(out2)["distance"] == doc["distance"]

    task = write_task(tmp_path, "flat.json", {
        "command": "converge-check",
        "payload": {"field": QT_INF,
                    "family": {"a": ["2", "0", "0", "1/2"]},
                    "parameters": [10, 100],
                    "classes": ["a"]},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["converged"] is False
    assert doc["distance"] == []
    assert "no degeneration" in doc["note"]


def test_parse_error_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(["--task", str(bad)], capsys)
    assert code == 1 and "cannot read task file" in err

    code, _, err = run_cli(["--task", str(tmp_path / "missing.json")], capsys)
    assert code == 1

    task = write_task(tmp_path, "nocmd.json", {"payload": {}})
    code, _, err = run_cli(["--task", task], capsys)
    assert code == 1 and "no command" in err

    task = write_task(tmp_path, "unknown.json", {"command": "explode", "payload": {}})
    code, _, err = run_cli(["--task", task], capsys)
    assert code == 1 and "unknown command" in err

    task = write_task(tmp_path, "mismatch.json", {"command": "mu", "payload": {}})
    code, _, err = run_cli(["theta", "--task", task], capsys)
    assert code == 1 and "task file says" in err

    task = write_task(tmp_path, "shape.json", {
        "command": "sl2-ball",
        "payload": {"field": Q2, "radius": "two"},
    })
    code, _, err = run_cli(["--task", task], capsys)
    assert code == 1 and "radius" in err

    task = write_task(tmp_path, "missingkey.json", {
        "command": "tree-distance",
        "payload": {"tree": LINE_TREE},
    })
    code, _, err = run_cli(["--task", task], capsys)
    assert code == 1 and "payload needs" in err


def test_domain_error_exit_code_and_document(tmp_path, capsys):
    task = write_task(tmp_path, "sing.json", {
        "command": "sl2-length",
        "payload": {"field": Q2, "matrix": ["1", "1", "1", "1"]},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 2
    doc = json.loads(out)
    assert doc["error"] == "DeterminantNotOne"

    task = write_task(tmp_path, "bigp.json", {
        "command": "sl2-ball",
        "payload": {"field": {"field": "Q", "p": 17}, "radius": 1},
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 2
    assert json.loads(out)["error"] == "DomainError"

    task = write_task(tmp_path, "badsym.json", {
        "command": "length-function",
        "payload": {
            "action": {"type": "cayley", "generators": ["a"], "radius": 2},
            "classes": ["z"],
        },
    })
    code, out, _ = run_cli(["--task", task], capsys)
    assert code == 2
    assert json.loads(out)["error"] == "SymbolError"


def test_flag_applicability(tmp_path, capsys):
    task = write_task(tmp_path, "dist.json", {
        "command": "tree-distance",
        "payload": {"tree": LINE_TREE, "p": "u", "q": "w"},
    })
    code, _, err = run_cli(["--task", task, "--seed", "3"], capsys)
    assert code == 1 and "--seed" in err
    code, _, err = run_cli(["--task", task, "--tolerance", "0.1"], capsys)
    assert code == 1 and "--tolerance" in err
    code, _, err = run_cli(["--task", task, "--dot", "x.dot"], capsys)
    assert code == 1 and "DOT" in err


def test_module_entry_point(tmp_path):
    task = tmp_path / "flip.json"
    task.write_text(json.dumps({
        "command": "classify-isometry",
        "payload": {
            "tree": UNIT_EDGE_TREE,
            "isometry": {"map": {"u": "v", "v": "u"}},
        },
    }))
    proc = subprocess.run(
        [sys.executable, "-m", "lambdatrees", "--task", str(task)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kind"] == "inversion"
