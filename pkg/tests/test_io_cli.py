"""File formats and the command-line surface."""
import io
import json
from pathlib import Path

import pytest

from grainnet import cli
from grainnet import io as gio
from grainnet.cli import main
from grainnet.dot import export_dot
from grainnet.errors import ParseError
from grainnet.fixtures import marking_fork, net_ex, net_fork
from grainnet.net import Marking, SitosNet
from grainnet.unfolding import unfold

FIX = Path(__file__).resolve().parent.parent / "fixtures"
NETS = ["net_ex", "net_fork", "net_hw", "net_q", "net_uv"]


def run(args, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in args], out, err, io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


def net(name):
    return FIX / f"{name}.json"


def marking(name):
    return FIX / f"{name}_marking.json"


# serialization

@pytest.mark.parametrize("path", sorted(FIX.glob("*.json")), ids=lambda p: p.name)
def test_roundtrip_is_byte_identical(path):
    data = path.read_bytes()
    obj = gio.load_any(str(path))
    ref = json.loads(data).get("net")
    if isinstance(obj, SitosNet):
        again = gio.serialize_net(obj)
    elif isinstance(obj, Marking):
        again = gio.serialize_marking(obj, ref)
    else:
        again = gio.serialize_process(obj, ref)
    assert again == data


def test_net_ex_sizes():
    assert gio.load_net(str(net("net_ex"))).sizes == (3, 4, 2, 4)


def test_empty_net_file():
    n = gio.parse_net_file(b'{"places": [], "transitions": [], "in_arcs": [], "out_arcs": []}')
    assert n.sizes == (0, 0, 0, 0)


def test_missing_place_names_the_arc():
    bad = {"places": ["s"], "transitions": ["t"], "in_arcs": [{"id": "zz9", "place": "nope", "transition": "t"}],
           "out_arcs": []}
    with pytest.raises(ParseError, match="zz9"):
        gio.parse_net_file(json.dumps(bad).encode())


def test_duplicate_id_is_parse_error():
    bad = {"places": ["s", "s"], "transitions": [], "in_arcs": [], "out_arcs": []}
    with pytest.raises(ParseError):
        gio.parse_net_file(json.dumps(bad).encode())


def test_malformed_json_is_parse_error():
    with pytest.raises(ParseError):
        gio.parse_net_file(b"{not json")


# DOT

def test_dot_counts():
    assert export_dot(SitosNet.build([], [], [], [])).count("->") == 0
    d = export_dot(net_ex())
    assert d.count("shape=circle") == 3 and d.count("shape=square") == 2 and d.count("->") == 8
    u = unfold(net_fork(), marking_fork(), 3)
    d = export_dot(u)
    assert d.count("shape=circle") == 5 and d.count("shape=square") == 5 and d.count("->") == 11


# exit codes

def test_parse_error_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, _, err = run(["check", bad])
    assert code == 2 and "parse error" in err
    assert run(["check", tmp_path / "missing.json"])[0] == 2
    assert run(["enumerate", net("net_fork"), marking("net_fork")])[0] == 2  # --max-nodes missing


def test_precondition_exit_3_on_ungrounded(tmp_path):
    src = {"places": ["s"], "transitions": ["t"], "in_arcs": [],
           "out_arcs": [{"id": "o", "transition": "t", "place": "s"}]}
    (tmp_path / "n.json").write_text(json.dumps(src))
    (tmp_path / "m.json").write_text(json.dumps({"net": "n.json", "tokens": []}))
    code, _, err = run(["unfold", tmp_path / "n.json", tmp_path / "m.json", "--depth", 1])
    assert code == 3 and "grounded" in err


def test_state_cap_exit_3(monkeypatch):
    monkeypatch.setenv("GRAINNET_MAX_STATES", "3")
    assert run(["enumerate", net("net_ex"), marking("net_ex"), "--max-nodes", 3])[0] == 3
    assert run(["unfold", net("net_ex"), marking("net_ex"), "--depth", 3])[0] == 3
    monkeypatch.delenv("GRAINNET_MAX_STATES")
    assert run(["enumerate", net("net_ex"), marking("net_ex"), "--max-nodes", 3])[0] == 0


def test_segal_failure_exit_1(monkeypatch):
    monkeypatch.setattr(cli, "check_segal", lambda tr: False)
    code, out, _ = run(["segal", net("net_uv"), "--max-nodes", 1, "--max-tokens", 2])
    assert code == 1 and "segal=FAIL" in out


def test_segal_pass_exit_0():
    code, out, _ = run(["segal", net("net_uv"), "--max-nodes", 2, "--max-tokens", 2])
    assert code == 0 and "FAIL" not in out


def test_dot_format_unsupported_is_exit_3():
    assert run(["species", net("net_ex"), "--format", "dot"])[0] == 3


# commands in every format

COMMANDS = [
    (["check", net("net_ex")], True),
    (["fire", net("net_fork"), marking("net_fork")], False),
    (["fire", net("net_fork"), marking("net_fork"), "--apply", "t1:a=b3"], True),
    (["enumerate", net("net_fork"), marking("net_fork"), "--max-nodes", 3], False),
    (["unfold", net("net_fork"), marking("net_fork"), "--depth", 3, "--oracle"], True),
    (["events", net("net_uv"), marking("net_uv"), "--depth", 2], False),
    (["homs", net("net_fork"), marking("net_fork"), marking("net_fork"), "--max-nodes", 1], False),
    (["species", net("net_ex"), "--roundtrip"], False),
    (["segal", net("net_hw"), "--max-nodes", 1, "--max-tokens", 2], False),
]


@pytest.mark.parametrize("args,has_dot", COMMANDS, ids=lambda a: a[0] if isinstance(a, list) else None)
@pytest.mark.parametrize("fmt", ["text", "json", "dot"])
def test_command_formats_and_determinism(args, has_dot, fmt):
    if fmt == "dot" and not has_dot:
        return
    first = run(args + ["--format", fmt])
    assert first[0] == 0, first[2]
    assert first[1]
    if fmt == "json":
        json.loads(first[1])
    if fmt == "dot":
        assert first[1].startswith("digraph")
    assert run(args + ["--format", fmt]) == first


@pytest.mark.parametrize("name", NETS)
def test_dot_command_on_every_fixture(name):
    for path in (net(name), marking(name)):
        code, out, _ = run(["dot", path])
        assert code == 0 and out.startswith("digraph")
    code, out, _ = run(["dot", FIX / "process_p.json"])
    assert code == 0 and out.startswith("digraph")


def test_unfold_text_fork():
    code, out, _ = run(["unfold", net("net_fork"), marking("net_fork"), "--depth", 3, "--oracle"])
    assert code == 0
    assert out.splitlines() == ["events=5 conditions=5 in_arcs=9 out_arcs=2 saturated=true", "oracle=agree"]


def test_events_uv_conflict():
    code, out, _ = run(["events", net("net_uv"), marking("net_uv"), "--depth", 3])
    data = json.loads(run(["events", net("net_uv"), marking("net_uv"), "--depth", 3, "--format", "json"])[1])
    assert code == 0 and len(data["events"]) == 2 and len(data["conflict"]) == 1


# firing and binding syntax

def test_fire_lists_bindings():
    code, out, _ = run(["fire", net("net_fork"), marking("net_fork")])
    assert out.splitlines() == ["0: t1:a=b3", "1: t2:p=b1,q=b2"]


def test_fire_apply_sequence():
    code, out, _ = run(["fire", net("net_fork"), marking("net_fork"), "--apply", "t2:p=b1,q=b2",
                        "--format", "json"])
    data = json.loads(out)
    assert code == 0
    assert len(data["process"]["nodes"]) == 1
    assert [t["place"] for t in data["marking"]["tokens"]] == ["s3"]


@pytest.mark.parametrize("spec,code", [
    ("t2", 2),                 # no colon
    ("t2:p=b1,q", 2),          # pair without '='
    ("t9:a=b3", 3),            # unknown transition
    ("t2:p=b1", 3),            # arc missing
    ("t1:a=b1", 3),            # token on the wrong place
    ("t1:a=zz", 3),            # token not in the marking
])
def test_fire_bad_bindings(spec, code):
    assert run(["fire", net("net_fork"), marking("net_fork"), "--apply", spec])[0] == code


# interactive stepper

def test_step_fire_undo_quit():
    code, out, _ = run(["step", net("net_fork"), marking("net_fork")], stdin="0\nu\n1\nq\n")
    assert code == 0
    assert "process nodes=1" in out
    dumped = json.loads(out[out.rindex("\n{") + 1:])
    assert [x["transition"] for x in dumped["nodes"]] == ["t2"]


def test_step_bad_choice_and_eof():
    code, out, _ = run(["step", net("net_fork"), marking("net_fork")], stdin="7\nzz\n")
    assert code == 0
    assert "no binding '7'" in out and "no binding 'zz'" in out
    dumped = json.loads(out[out.rindex("\n{") + 1:])
    assert dumped["nodes"] == []
