import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import is_topological

from x3dui.toolchain import (
    BundleError,
    DocWarning,
    ToolchainError,
    bundle,
    bundle_directory,
    count_rendered_entries,
    extract_docs,
    load_corpus,
    load_proto_file,
    minify,
    render_docs,
    size_report,
    topological_order,
    write_pages,
)
from x3dui.widgets import WidgetKind
from x3dui.xmltree import canonical, parse_xml, strip_comments


def proto_text(name, uses=(), fields=("size",), docs=(), script=""):
    externs = "".join(f'<ExternProtoDeclare name="{u}" url=\'"lib.x3d#{u}"\'/>' for u in uses)
    instances = "".join(f'<ProtoInstance name="{u}"/>' for u in uses)
    iface = "".join(f'<field name="{f}" type="SFFloat" accessType="inputOutput"/>' for f in fields)
    comments = "".join(f"<!-- {d} -->" for d in docs)
    body = f"<Group>{instances}{script}</Group>"
    return (f'<?xml version="1.0"?>\n<X3D>\n  <Scene>\n    {externs}\n    <ProtoDeclare name="{name}">\n'
            f"      <ProtoInterface>{comments}{iface}</ProtoInterface>\n"
            f"      <ProtoBody>{body}</ProtoBody>\n    </ProtoDeclare>\n  </Scene>\n</X3D>\n")


def write(tmp_path, category, name, **kw):
    d = tmp_path / category
    d.mkdir(exist_ok=True)
    p = d / f"{name}.x3d"
    p.write_text(proto_text(name, **kw))
    return p


# -- minify


PRETTY = '<a>\n  <b x="1   2"/>\n  <!-- note -->\n  <c>keep  this</c>\n</a>\n'


def test_minify_pretty_element():
    out = minify(PRETTY)
    assert "\n" not in out.split("?>", 1)[1].strip()
    assert 'x="1   2"' in out and "keep  this" in out and "note" not in out
    assert canonical(parse_xml(out)) == canonical(strip_comments(parse_xml(PRETTY).root))


def test_minify_keep_comments():
    assert "<!-- note -->" in minify(PRETTY, keep_comments=True)


def test_minify_rejects_malformed():
    with pytest.raises(ValueError):
        minify("<a>")


def test_minify_idempotent_on_corpus(corpus_dir):
    for path in sorted(corpus_dir.rglob("*.x3d"))[:5]:
        once = minify(path.read_bytes())
        assert minify(once) == once


@given(st.lists(st.sampled_from(["<b/>", "<c k='v'/>", "\n  ", "<!--x-->", "<d>t</d>", " "]), max_size=10))
def test_minify_idempotent_and_canonical(parts):
    text = "<a>" + "".join(parts) + "</a>"
    once = minify(text)
    assert minify(once) == once
    assert canonical(parse_xml(once)) == canonical(strip_comments(parse_xml(text).root))


# -- size report


@pytest.mark.parametrize("before, after, expected", [(430000, 280000, 34.9), (1000, 700, 30.0), (500, 500, 0.0)])
def test_size_report(before, after, expected):
    assert size_report(before, after) == expected


def test_size_report_rejects_zero():
    with pytest.raises(ValueError):
        size_report(0, 10)


# -- bundling


def test_two_file_bundle(tmp_path):
    b = load_proto_file(write(tmp_path, "visual", "B", uses=["A"]))
    a = load_proto_file(write(tmp_path, "visual", "A"))
    doc, report = bundle([b, a])
    names = [n.attrs["name"] for n in doc.root.iter("ProtoDeclare")]
    assert names == ["A", "B"] and report.order == ["A", "B"]
    assert list(doc.root.iter("ExternProtoDeclare")) == []
    assert report.removed_externs == 1 and report.files == 2


def test_single_file_passthrough(tmp_path):
    f = load_proto_file(write(tmp_path, "system", "Solo"))
    doc, report = bundle([f])
    assert canonical(next(doc.root.iter("ProtoDeclare"))) == canonical(f.declaration)
    assert report.order == ["Solo"] and report.removed_externs == 0


def test_duplicate_names_both_paths(tmp_path):
    a1 = load_proto_file(write(tmp_path, "visual", "A"))
    (tmp_path / "group").mkdir()
    other = tmp_path / "group" / "Dup.x3d"
    other.write_text(proto_text("A"))
    with pytest.raises(BundleError) as info:
        bundle([a1, load_proto_file(other)])
    assert str(a1.path) in str(info.value) and str(other) in str(info.value)


def test_unresolved_reference(tmp_path):
    f = load_proto_file(write(tmp_path, "visual", "B", uses=["Ghost"]))
    with pytest.raises(BundleError, match="Ghost"):
        bundle([f])


def test_cycle_rejected(tmp_path):
    a = load_proto_file(write(tmp_path, "visual", "A", uses=["B"]))
    b = load_proto_file(write(tmp_path, "visual", "B", uses=["A"]))
    with pytest.raises(BundleError, match="cycle"):
        bundle([a, b])


def test_file_with_two_declarations_rejected(tmp_path):
    p = tmp_path / "x.x3d"
    p.write_text('<X3D><Scene><ProtoDeclare name="a"/><ProtoDeclare name="b"/></Scene></X3D>')
    with pytest.raises(ToolchainError, match="exactly one"):
        load_proto_file(p)


def test_load_corpus_errors(tmp_path):
    with pytest.raises(ToolchainError):
        load_corpus(tmp_path / "missing")
    with pytest.raises(ToolchainError):
        load_corpus(tmp_path)


@st.composite
def dags(draw):
    n = draw(st.integers(1, 12))
    names = [f"P{i:02d}" for i in range(n)]
    graph = {}
    for i, name in enumerate(names):
        graph[name] = draw(st.lists(st.sampled_from(names[:i]), unique=True)) if i else []
    # shuffle key order so insertion order carries no hint
    keys = draw(st.permutations(names))
    return {k: graph[k] for k in keys}


@given(dags())
def test_topological_order_is_valid(graph):
    order = topological_order(graph)
    assert is_topological(order, graph)


def test_corpus_bundle(corpus_dir):
    files = load_corpus(corpus_dir)
    assert len(files) == 27
    assert {f.name for f in files} == {k.proto for k in WidgetKind}
    doc, report = bundle(files)
    declared = [n.attrs["name"] for n in doc.root.iter("ProtoDeclare")]
    assert sorted(declared) == sorted(k.proto for k in WidgetKind)
    assert list(doc.root.iter("ExternProtoDeclare")) == []
    assert is_topological(report.order, {f.name: f.references for f in files})
    assert report.reduction >= 30.0
    assert report.to_text().endswith(f"reduction: {report.reduction:.1f}%\n")


def test_bundle_directory_is_deterministic(corpus_dir):
    assert bundle_directory(corpus_dir) == bundle_directory(corpus_dir)


# -- docs


DOCS = [
    "@doc proto W: a widget",
    "@doc field maxLength: caps the message",
    "@doc method reset: clears it",
    "just a comment",
]
SCRIPT = "<Script><![CDATA[ecmascript: function reset(a, b) {}]]></Script>"


def test_extract_docs_example(tmp_path):
    f = load_proto_file(write(tmp_path, "visual", "W", fields=("maxLength",), docs=DOCS, script=SCRIPT))
    model = extract_docs([f])
    doc = model.protos["W"]
    assert doc.summary == "a widget"
    assert [(d.name, d.description) for d in doc.fields] == [("maxLength", "caps the message")]
    assert [(m.name, m.params) for m in doc.methods] == [("reset", ["a", "b"])]
    assert model.entry_count == 3 and model.warnings == []


def test_no_doc_comments_gives_empty_entry(tmp_path):
    model = extract_docs([load_proto_file(write(tmp_path, "visual", "W"))])
    assert model.protos["W"].entry_count == 0


def test_undeclared_field_warns_and_drops(tmp_path):
    f = load_proto_file(write(tmp_path, "visual", "W", docs=["@doc field nope: missing", "@doc method gone: x"]))
    with pytest.warns(DocWarning) as record:
        model = extract_docs([f])
    assert len(record) == 2 and len(model.warnings) == 2
    assert "nope" in model.warnings[0] and model.entry_count == 0


def test_render_docs_pages(tmp_path):
    files = [load_proto_file(write(tmp_path, "visual", n, docs=[f"@doc proto {n}: x"])) for n in ("A", "B")]
    pages = render_docs(extract_docs(files))
    assert sorted(pages) == ["A.html", "B.html", "index.html"]
    assert list(render_docs(extract_docs([]))) == ["index.html"]
    written = write_pages(pages, tmp_path / "out")
    assert sorted(p.name for p in written) == sorted(pages)


def test_rendered_count_matches_model_on_corpus(corpus_dir):
    with warnings.catch_warnings():
        warnings.simplefilter("error", DocWarning)
        model = extract_docs(load_corpus(corpus_dir))
    pages = render_docs(model)
    assert len(pages) == 28
    assert count_rendered_entries(pages) == model.entry_count > 27


def test_render_escapes_markup(tmp_path):
    f = load_proto_file(write(tmp_path, "visual", "W", docs=["@doc proto W: a <b> & c"]))
    page = render_docs(extract_docs([f]))["W.html"]
    assert "a &lt;b&gt; &amp; c" in page
