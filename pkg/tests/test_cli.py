import json

import pytest

from orbicover import cli, coxeter, covers, orbicore, serialize
from orbicover.serialize import (
    covering_map_from_json,
    covering_map_to_json,
    defining_graph_from_json,
    defining_graph_to_json,
    marked_graph_from_json,
    marked_graph_to_json,
    orbicomplex_from_json,
    orbicomplex_to_json,
    presentation_from_json,
    presentation_to_json,
)


# ---------------------------------------------------------------------------
# round trips


def test_defining_graph_roundtrip():
    g = coxeter.demo_defining_graph()
    assert defining_graph_from_json(defining_graph_to_json(g)) == g


def test_presentation_roundtrip():
    pres = coxeter.racg_presentation(coxeter.demo_defining_graph())
    assert presentation_from_json(presentation_to_json(pres)) == pres


def test_marked_graph_roundtrip(chain):
    g = orbicore.singular_subspace(chain.base)
    back = marked_graph_from_json(json.loads(json.dumps(marked_graph_to_json(g))))
    assert back == g


def test_orbicomplex_roundtrips(chain):
    for c in (chain.base, chain.cover1, chain.cover2, chain.y, chain.y_hat):
        data = json.loads(serialize.dumps(orbicomplex_to_json(c)))
        assert orbicomplex_from_json(data) == c


def test_covering_map_roundtrip(chain):
    f = chain.map1
    data = json.loads(serialize.dumps(covering_map_to_json(f)))
    back = covering_map_from_json(data)
    assert back.degree == f.degree
    assert back.source == f.source
    assert back.target == f.target
    assert back.edge_map == f.edge_map
    assert back.piece_map == f.piece_map
    assert back.segment_map == f.segment_map
    assert back.cone_fibers == f.cone_fibers
    assert covers.verify_covering(back).passed


def test_schema_error_on_garbage():
    with pytest.raises(serialize.SchemaError):
        defining_graph_from_json({"nope": []})


# ---------------------------------------------------------------------------
# command surface


@pytest.fixture()
def demo_graph_file(tmp_path):
    path = tmp_path / "graph.json"
    path.write_text(serialize.dumps(defining_graph_to_json(coxeter.demo_defining_graph())))
    return str(path)


def run_cli(*argv):
    return cli.main(list(argv))


def test_cmd_racg(demo_graph_file, capsys):
    code = run_cli("racg", demo_graph_file)
    out = capsys.readouterr().out
    assert code == 0
    assert "generators: 25" in out
    assert "one-ended: true" in out


def test_cmd_racg_triangle_exits_three(tmp_path, capsys):
    g = coxeter.DefiningGraph.from_edges(
        ["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")]
    )
    path = tmp_path / "k3.json"
    path.write_text(serialize.dumps(defining_graph_to_json(g)))
    code = run_cli("racg", str(path))
    out = capsys.readouterr().out
    assert code == 3
    assert "one-ended: false" in out


def test_cmd_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run_cli("racg", str(path)) == 2


def test_cmd_davis_then_euler(demo_graph_file, tmp_path, capsys):
    out_file = tmp_path / "davis.json"
    assert run_cli("davis", demo_graph_file, "--out", str(out_file)) == 0
    assert run_cli("euler", str(out_file)) == 0
    assert capsys.readouterr().out.strip() == "-9/2"


def test_cmd_singular_dot(demo_graph_file, tmp_path, capsys):
    out_file = tmp_path / "davis.json"
    run_cli("davis", demo_graph_file, "--out", str(out_file))
    assert run_cli("singular", str(out_file), "--dot") == 0
    out = capsys.readouterr().out
    assert out.startswith("graph")
    assert "x4" in out


def test_cmd_pi1_ab(demo_graph_file, tmp_path, capsys):
    out_file = tmp_path / "davis.json"
    run_cli("davis", demo_graph_file, "--out", str(out_file))
    assert run_cli("pi1", str(out_file), "--ab") == 0
    out = capsys.readouterr().out
    assert out.count("Z/2") == 25


def test_cmd_verify_pass_and_fail(chain, tmp_path, capsys):
    cover_file = tmp_path / "cover.json"
    cover_file.write_text(serialize.dumps(covering_map_to_json(chain.map1)))
    assert run_cli("verify", str(cover_file)) == 0
    assert "PASS" in capsys.readouterr().out

    data = json.loads(cover_file.read_text())
    pid = next(iter(data["piece_map"]))
    data["piece_map"][pid][1] = 3
    bad_file = tmp_path / "bad_cover.json"
    bad_file.write_text(serialize.dumps(data))
    assert run_cli("verify", str(bad_file)) == 4
    assert "FAIL" in capsys.readouterr().out


def test_cmd_covers_enumeration(chain, tmp_path, capsys):
    cx_file = tmp_path / "cover1.json"
    cx_file.write_text(serialize.dumps(orbicomplex_to_json(chain.cover1)))
    assert run_cli("covers", str(cx_file)) == 0
    assert "3 connected double covers" in capsys.readouterr().out


def test_cmd_covers_precondition(chain, tmp_path, capsys):
    cx_file = tmp_path / "base.json"
    cx_file.write_text(serialize.dumps(orbicomplex_to_json(chain.base)))
    assert run_cli("covers", str(cx_file)) == 3


def test_cmd_compare_pair(chain, tmp_path, capsys):
    a = tmp_path / "y.json"
    b = tmp_path / "z.json"
    a.write_text(serialize.dumps(orbicomplex_to_json(chain.y)))
    b.write_text(serialize.dumps(orbicomplex_to_json(chain.z)))
    assert run_cli("compare", str(a), str(b)) == 0
    out = capsys.readouterr().out
    assert "singular subspaces isomorphic: no" in out
    assert "homotopy certificate: present" in out
    assert "not homeomorphic" in out


def test_cmd_compare_with_rotation_file(chain, tmp_path, capsys):
    a = tmp_path / "y.json"
    b = tmp_path / "z.json"
    a.write_text(serialize.dumps(orbicomplex_to_json(chain.y)))
    b.write_text(serialize.dumps(orbicomplex_to_json(chain.z)))
    rotations = tmp_path / "rot.json"
    rotations.write_text(
        serialize.dumps(
            {
                "a": serialize.rotation_to_json(chain.y.rotation),
                "b": serialize.rotation_to_json(chain.z.rotation),
            }
        )
    )
    assert run_cli("compare", str(a), str(b), "--rotations", str(rotations)) == 0
    assert "homotopy certificate: present" in capsys.readouterr().out


def test_cmd_paper_demo_json_deterministic(tmp_path):
    f1 = tmp_path / "r1.json"
    f2 = tmp_path / "r2.json"
    assert run_cli("paper-demo", "--json", "--out", str(f1)) == 0
    assert run_cli("paper-demo", "--json", "--out", str(f2)) == 0
    assert f1.read_text() == f2.read_text()
    report = json.loads(f1.read_text())
    assert "timings" not in report
    assert report["stages"]["pair_search"]["pairs_found"] >= 1


def test_cmd_paper_demo_text(capsys):
    assert run_cli("paper-demo") == 0
    out = capsys.readouterr().out
    assert "all stages passed" in out
