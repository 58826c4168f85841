import pytest
from hypothesis import given
from hypothesis import strategies as st

from x3dui.xmltree import (
    CDATA,
    COMMENT,
    TEXT,
    X3DDocument,
    X3DNode,
    XMLSyntaxError,
    canonical,
    element,
    parse_xml,
    quote_attr,
    serialize,
)


def test_two_node_tree():
    doc = parse_xml("<X3D><Scene/></X3D>")
    assert doc.root.name == "X3D"
    assert [c.name for c in doc.root.children] == ["Scene"]
    assert doc.root.count() == 2


def test_comments_preserved():
    doc = parse_xml("<a><!-- hi --><b/></a>")
    assert doc.root.children[0].name == COMMENT
    assert doc.root.children[0].text == " hi "


def test_whitespace_tallied_not_kept():
    doc = parse_xml("<a>\n  <b/>\n</a>")
    assert [c.name for c in doc.root.children] == ["b"]
    assert doc.dropped_whitespace == 4  # "\n  " and "\n"


def test_cdata_and_text():
    doc = parse_xml("<a>x<![CDATA[<y>]]></a>")
    assert [(c.name, c.text) for c in doc.root.children] == [(TEXT, "x"), (CDATA, "<y>")]


def test_syntax_error_position():
    with pytest.raises(XMLSyntaxError) as info:
        parse_xml("<a>\n<b></a>")
    assert info.value.line == 2


def test_single_empty_element():
    assert serialize(element("Foo")) == '<?xml version="1.0" encoding="UTF-8"?>\n<Foo/>\n'


def test_attribute_order_preserved():
    node = element("N", {"b": "2", "a": "1"})
    assert '<N b="2" a="1"/>' in serialize(node)


def test_two_space_indent():
    text = serialize(element("A", {}, element("B", {}, element("C"))))
    assert text.splitlines()[1:] == ["<A>", "  <B>", "    <C/>", "  </B>", "</A>"]


def test_quote_choice():
    assert quote_attr('"a" "b"') == "'\"a\" \"b\"'"
    assert quote_attr("it's") == '"it\'s"'
    assert quote_attr("x\"'y") == '"x&quot;\'y"'
    assert quote_attr("a&b<c>\n") == '"a&amp;b&lt;c&gt;&#10;"'


def test_cdata_terminator_split():
    node = element("S", {}, X3DNode(CDATA, text="a]]>b"))
    back = parse_xml(serialize(node))
    assert canonical(back) == canonical(node)


# -- round trip on random documents

NAMES = st.sampled_from(["Transform", "Shape", "Group", "fieldValue", "ProtoInstance", "X"])
ATTR_NAMES = st.sampled_from(["DEF", "name", "value", "url", "translation"])
ATTR_VALUES = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc"), blacklist_characters="\x00") | st.sampled_from("\n\t\r\"'&<>"),
    max_size=12,
)
TEXTS = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=10).filter(
    lambda s: s.strip() != ""
)


def nodes(depth=3):
    leaf_elem = st.builds(lambda n, a: X3DNode(n, a), NAMES, st.dictionaries(ATTR_NAMES, ATTR_VALUES, max_size=3))
    comment = TEXTS.filter(lambda s: "--" not in s and not s.endswith("-")).map(X3DNode.comment)
    if depth == 0:
        return st.one_of(leaf_elem, comment)
    return st.one_of(
        leaf_elem,
        comment,
        st.builds(
            lambda n, a, kids: X3DNode(n, a, _merge_text(kids)),
            NAMES,
            st.dictionaries(ATTR_NAMES, ATTR_VALUES, max_size=3),
            st.lists(st.one_of(nodes(depth - 1), TEXTS.map(lambda t: X3DNode(TEXT, text=t))), max_size=4),
        ),
    )


def _merge_text(kids):
    # adjacent text runs are indistinguishable once serialized
    out = []
    for k in kids:
        if k.name == TEXT and out and out[-1].name == TEXT:
            out[-1] = X3DNode(TEXT, text=out[-1].text + k.text)
        else:
            out.append(k)
    return out


def _normalise_newlines(node):
    # XML parsers turn a literal CR in text into LF; attribute CRs are escaped
    if node.name == TEXT:
        return X3DNode(TEXT, text=node.text.replace("\r\n", "\n").replace("\r", "\n"))
    return X3DNode(node.name, node.attrs, [_normalise_newlines(c) for c in node.children], node.text)


roots = st.builds(
    lambda n, a, kids: X3DNode(n, a, _merge_text(kids)),
    NAMES,
    st.dictionaries(ATTR_NAMES, ATTR_VALUES, max_size=3),
    st.lists(nodes(), max_size=5),
)


@given(roots, st.booleans())
def test_round_trip_random_documents(root, pretty):
    doc = X3DDocument(root)
    back = parse_xml(serialize(doc, pretty=pretty))
    # pretty printing only adds whitespace-only text, which the parser drops
    assert _normalise_newlines(back.root) == _normalise_newlines(root)


@given(roots)
def test_serialize_is_deterministic(root):
    assert serialize(X3DDocument(root)) == serialize(X3DDocument(root))
