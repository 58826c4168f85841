import json
import subprocess
import sys

import pytest
from conftest import THREE_FRAMES

from x3dui.cli import main
from x3dui.xmltree import canonical, parse_xml

RIG = {"ProximitySensor", "ROUTE"}


@pytest.fixture
def spec(tmp_path):
    p = tmp_path / "ui.xml"
    p.write_text(THREE_FRAMES)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok_and_bad(capsys, spec, tmp_path):
    assert run(capsys, "validate", spec)[0] == 0
    bad = tmp_path / "bad.xml"
    bad.write_text("<Display><Panel/></Display>")
    code, out, err = run(capsys, "validate", bad)
    assert code == 2 and "root-frame" in err


def test_compile_writes_x3d(capsys, spec, tmp_path):
    out = tmp_path / "ui.x3d"
    code, _, _ = run(capsys, "compile", spec, "-o", out)
    assert code == 0
    doc = parse_xml(out.read_bytes())
    assert doc.root.name == "X3D" and doc.root.attrs["profile"] == "Immersive"


def test_compile_panel_root_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.xml"
    bad.write_text("<Panel/>")
    code, _, err = run(capsys, "compile", bad, "-o", tmp_path / "x.x3d")
    assert code == 2 and "root-frame" in err and not (tmp_path / "x.x3d").exists()


def test_malformed_spec_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.xml"
    bad.write_text("<Frame>")
    assert run(capsys, "validate", bad)[0] == 2


def test_io_errors_exit_3(capsys, spec, tmp_path):
    assert run(capsys, "compile", tmp_path / "missing.xml", "-o", tmp_path / "o.x3d")[0] == 3
    assert run(capsys, "compile", spec, "-o", tmp_path / "no" / "dir" / "o.x3d")[0] == 3


def test_bad_flag_value_exits_2(spec, tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["compile", str(spec), "-o", str(tmp_path / "o"), "--hud", "magic"])
    assert info.value.code == 2


def _without_rig(node):
    kids = [_without_rig(c) for c in node.children if c.name not in RIG]
    flat = []
    for k in kids:
        # the rig's wrappers only hold the GUI content
        if k.name == "Layer3D" or (k.name == "Transform" and k.attrs.get("DEF") in ("X3DUI_HUD", "X3DUI_SCREEN")):
            flat += k.children
        else:
            flat.append(k)
    return node.__class__(node.name, node.attrs, flat, node.text)


def test_hud_flag_only_changes_the_rig(capsys, spec, tmp_path):
    a, b = tmp_path / "a.x3d", tmp_path / "b.x3d"
    run(capsys, "compile", spec, "-o", a, "--hud", "proximity")
    run(capsys, "compile", spec, "-o", b, "--hud", "layer3d")
    da, db = parse_xml(a.read_bytes()), parse_xml(b.read_bytes())
    assert canonical(da) != canonical(db)
    assert canonical(_without_rig(da.root)) == canonical(_without_rig(db.root))


def test_compact_compile_is_one_line(capsys, spec, tmp_path):
    out, pretty = tmp_path / "c.x3d", tmp_path / "p.x3d"
    run(capsys, "compile", spec, "-o", out, "--compact")
    run(capsys, "compile", spec, "-o", pretty)
    assert len(out.read_text().splitlines()) == 1
    assert canonical(parse_xml(out.read_bytes())) == canonical(parse_xml(pretty.read_bytes()))


def _events(tmp_path, records):
    p = tmp_path / "events.json"
    p.write_text(json.dumps(records))
    return p


def test_simulate_empty_script(capsys, spec, tmp_path):
    out = tmp_path / "trace.jsonl"
    code, _, _ = run(capsys, "simulate", spec, "--events", _events(tmp_path, []), "-o", out)
    lines = out.read_text().splitlines()
    assert code == 0 and len(lines) == 1 and json.loads(lines[0])["kind"] == "initial"


def test_simulate_taskbar_minimize(capsys, spec, tmp_path):
    events = _events(tmp_path, [
        {"seq": 1, "type": "click", "band": 0},
        {"seq": 2, "type": "click", "band": 0},
    ])
    out = tmp_path / "trace.jsonl"
    assert run(capsys, "simulate", spec, "--events", events, "-o", out)[0] == 0
    records = [json.loads(line) for line in out.read_text().splitlines()]
    first, second = records[1], records[2]
    assert first["active"] == 1 and first["frameStatus"]["1"] == "normal"
    assert second["frameStatus"]["1"] == "minimized" and second["active"] is None
    assert {"event": "frameStatus", "id": 1, "value": "minimized"} in second["outputs"]
    assert records[-1]["kind"] == "final"


def test_simulate_is_byte_identical(capsys, spec, tmp_path):
    events = _events(tmp_path, [{"type": "click", "target": "ok"}, {"type": "click", "target": "field"},
                                {"type": "key", "key": "a"}, {"type": "resize", "width": 640, "height": 480}])
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run(capsys, "simulate", spec, "--events", events, "-o", a)
    run(capsys, "simulate", spec, "--events", events, "-o", b)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("records, fragment", [
    ([{"type": "click", "x": 1, "y": 2}, {"x": 3}], "event 1"),
    ([{"type": "fly"}], "event 0"),
    ([{"seq": 2, "type": "key", "key": "a"}, {"seq": 1, "type": "key", "key": "b"}], "event 1"),
    ([{"type": "click", "target": "nobody"}], "event 0"),
])
def test_simulate_bad_records_exit_2(capsys, spec, tmp_path, records, fragment):
    code, _, err = run(capsys, "simulate", spec, "--events", _events(tmp_path, records), "-o", tmp_path / "t")
    assert code == 2 and fragment in err


def test_simulate_accepts_json_lines(capsys, spec, tmp_path):
    p = tmp_path / "events.jsonl"
    p.write_text('{"type": "click", "band": 1}\n\n{"type": "mousedown", "x": 5, "y": 5}\n')
    out = tmp_path / "t.jsonl"
    assert run(capsys, "simulate", spec, "--events", p, "-o", out)[0] == 0
    assert len(out.read_text().splitlines()) == 4


def test_layout_tsv(capsys, spec, tmp_path):
    code, out, _ = run(capsys, "layout", spec, "-o", tmp_path / "l.json")
    rows = [line.split("\t") for line in out.splitlines()]
    assert code == 0 and rows[0] == ["id", "kind", "name", "x", "y", "w", "h"]
    ok = next(r for r in rows if r[2] == "ok")
    assert ok[3:] == ["105", "40", "24", "20"]
    data = json.loads((tmp_path / "l.json").read_text())
    assert len(data) == len(rows) - 1


def test_corpus_bundle_minify_docs(capsys, tmp_path):
    corpus = tmp_path / "corpus"
    code, out, _ = run(capsys, "corpus", corpus)
    assert code == 0 and out == "prototypes: 27\n"

    bundled = tmp_path / "lib.x3d"
    code, out, _ = run(capsys, "bundle", corpus, "-o", bundled, "--report", "--json", tmp_path / "r.json")
    reduction = float(out.splitlines()[-1].removeprefix("reduction: ").rstrip("%"))
    assert code == 0 and reduction >= 30.0
    assert json.loads((tmp_path / "r.json").read_text())["reduction"] == reduction

    again = tmp_path / "lib.min.x3d"
    code, out, _ = run(capsys, "minify", bundled, "-o", again)
    assert code == 0 and out.splitlines()[-1] == "reduction: 0.0%"

    code, out, err = run(capsys, "docs", corpus, "-o", tmp_path / "docs")
    assert code == 0 and out.splitlines()[0] == "pages: 28" and err == ""
    assert len(list((tmp_path / "docs").glob("*.html"))) == 28


def test_bundle_errors_exit_2(capsys, tmp_path):
    assert run(capsys, "bundle", tmp_path, "-o", tmp_path / "o.x3d")[0] == 2
    (tmp_path / "visual").mkdir()
    (tmp_path / "visual" / "A.x3d").write_text("<X3D><Scene><ProtoDeclare name='A'>"
                                              "<ProtoBody><ProtoInstance name='Ghost'/></ProtoBody>"
                                              "</ProtoDeclare></Scene></X3D>")
    code, _, err = run(capsys, "bundle", tmp_path, "-o", tmp_path / "o.x3d")
    assert code == 2 and "Ghost" in err


def test_minify_errors(capsys, tmp_path):
    empty = tmp_path / "e.x3d"
    empty.write_text("")
    assert run(capsys, "minify", empty, "-o", tmp_path / "o")[0] == 2
    broken = tmp_path / "b.x3d"
    broken.write_text("<a>")
    assert run(capsys, "minify", broken, "-o", tmp_path / "o")[0] == 2
    assert run(capsys, "minify", tmp_path / "missing", "-o", tmp_path / "o")[0] == 3


def test_verbose_changes_stderr_only(capsys, spec, tmp_path):
    quiet, loud = tmp_path / "q.x3d", tmp_path / "l.x3d"
    _, out_q, err_q = run(capsys, "compile", spec, "-o", quiet)
    _, out_l, err_l = run(capsys, "-v", "compile", spec, "-o", loud)
    assert quiet.read_bytes() == loud.read_bytes() and out_q == out_l
    assert err_q == "" and "DEBUG" in err_l


def test_theme_flag(capsys, spec, tmp_path):
    theme = tmp_path / "t.theme"
    theme.write_text("fontSize = 14\n")
    out = tmp_path / "t.x3d"
    assert run(capsys, "compile", spec, "-o", out, "--theme", theme)[0] == 0
    assert 'name="fontSize" value="14"' in out.read_text()
    theme.write_text("bogus = 1\n")
    assert run(capsys, "compile", spec, "-o", out, "--theme", theme)[0] == 2


def test_figures(capsys, spec, tmp_path):
    corpus = tmp_path / "corpus"
    run(capsys, "corpus", corpus)
    assert run(capsys, "bundle", corpus, "-o", tmp_path / "b.x3d", "--figure", tmp_path / "b.png")[0] == 0
    assert run(capsys, "layout", spec, "--figure", tmp_path / "l.png")[0] == 0
    for name in ("b.png", "l.png"):
        assert (tmp_path / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_module_entry_point(spec):
    proc = subprocess.run([sys.executable, "-m", "x3dui", "validate", str(spec)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip().endswith("ok")
