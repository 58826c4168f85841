"""Generic XML element tree used by the emitter and the deployment tools.

The tree keeps element order, attribute order, comments and CDATA sections.
Whitespace-only character data between elements is not part of the tree; the
parser tallies it on the document so the minifier can report what it drops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator
from xml.parsers import expat

COMMENT = "#comment"
TEXT = "#text"
CDATA = "#cdata"

XML_DECL = '<?xml version="1.0" encoding="UTF-8"?>'


class XMLSyntaxError(ValueError):
    """Malformed XML, with a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass
class X3DNode:
    name: str
    attrs: dict[str, str] = field(default_factory=dict)
    children: list[X3DNode] = field(default_factory=list)
    # payload for comment / text / cdata pseudo-nodes
    text: str | None = None
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)

    @classmethod
    def comment(cls, text: str) -> X3DNode:
        return cls(COMMENT, text=text)

    @property
    def is_element(self) -> bool:
        return not self.name.startswith("#")

    def append(self, child: X3DNode) -> X3DNode:
        self.children.append(child)
        return child

    def elements(self) -> Iterator[X3DNode]:
        return (c for c in self.children if c.is_element)

    def iter(self, name: str | None = None) -> Iterator[X3DNode]:
        """Pre-order walk over this node and all descendants."""
        if name is None or self.name == name:
            yield self
        for child in self.children:
            yield from child.iter(name)

    def find(self, name: str) -> X3DNode | None:
        return next((c for c in self.children if c.name == name), None)

    def count(self) -> int:
        return 1 + sum(c.count() for c in self.children)


@dataclass
class X3DDocument:
    root: X3DNode
    doctype: str | None = None
    # bytes of whitespace-only character data seen by the parser
    dropped_whitespace: int = field(default=0, compare=False)


def element(name: str, attrs: dict[str, str] | None = None, *children: X3DNode) -> X3DNode:
    return X3DNode(name, dict(attrs or {}), list(children))


# --------------------------------------------------------------------------
# parsing


class _Builder:
    def __init__(self, parser: expat.XMLParserType):
        self.parser = parser
        self.stack: list[X3DNode] = []
        self.root: X3DNode | None = None
        self.doctype: str | None = None
        self.pending: list[str] = []
        self.in_cdata = False
        self.dropped = 0

    def _flush(self) -> None:
        if not self.pending:
            return
        data = "".join(self.pending)
        self.pending = []
        if not self.stack:
            return
        if data.strip():
            self.stack[-1].children.append(X3DNode(TEXT, text=data))
        else:
            self.dropped += len(data.encode("utf-8"))

    def start(self, name: str, attrs: list[str]) -> None:
        self._flush()
        node = X3DNode(
            name,
            dict(zip(attrs[::2], attrs[1::2])),
            line=self.parser.CurrentLineNumber,
            column=self.parser.CurrentColumnNumber + 1,
        )
        if self.stack:
            self.stack[-1].children.append(node)
        else:
            self.root = node
        self.stack.append(node)

    def end(self, name: str) -> None:
        self._flush()
        self.stack.pop()

    def chars(self, data: str) -> None:
        if self.in_cdata:
            self.stack[-1].children[-1].text += data
        else:
            self.pending.append(data)

    def comment(self, data: str) -> None:
        self._flush()
        if self.stack:
            self.stack[-1].children.append(
                X3DNode(COMMENT, text=data, line=self.parser.CurrentLineNumber)
            )

    def start_cdata(self) -> None:
        self._flush()
        self.stack[-1].children.append(X3DNode(CDATA, text=""))
        self.in_cdata = True

    def end_cdata(self) -> None:
        self.in_cdata = False

    def doctype_decl(self, name, sysid, pubid, has_internal) -> None:
        parts = [name]
        if pubid:
            parts += ["PUBLIC", f'"{pubid}"', f'"{sysid}"']
        elif sysid:
            parts += ["SYSTEM", f'"{sysid}"']
        self.doctype = " ".join(parts)


def parse_xml(text: str | bytes) -> X3DDocument:
    """Parse XML text into an :class:`X3DDocument`.

    Raises :class:`XMLSyntaxError` carrying the expat position on failure.
    """
    parser = expat.ParserCreate()
    builder = _Builder(parser)
    parser.ordered_attributes = True
    parser.buffer_text = True
    parser.StartElementHandler = builder.start
    parser.EndElementHandler = builder.end
    parser.CharacterDataHandler = builder.chars
    parser.CommentHandler = builder.comment
    parser.StartCdataSectionHandler = builder.start_cdata
    parser.EndCdataSectionHandler = builder.end_cdata
    parser.StartDoctypeDeclHandler = builder.doctype_decl
    try:
        parser.Parse(text, True)
    except expat.ExpatError as exc:
        raise XMLSyntaxError(expat.errors.messages[exc.code], exc.lineno, exc.offset + 1) from None
    assert builder.root is not None
    return X3DDocument(builder.root, builder.doctype, builder.dropped)


# --------------------------------------------------------------------------
# serialization

_TEXT_ESCAPES = str.maketrans({"&": "&amp;", "<": "&lt;", ">": "&gt;", "\r": "&#13;"})
_ATTR_ESCAPES = {
    "&": "&amp;",
    "<": "&lt;",
    ">": "&gt;",
    "\n": "&#10;",
    "\r": "&#13;",
    "\t": "&#9;",
}


def quote_attr(value: str) -> str:
    # single quotes keep MFString values like '"a" "b"' free of &quot; noise
    quote = "'" if '"' in value and "'" not in value else '"'
    out = "".join(_ATTR_ESCAPES.get(ch, ch) for ch in value)
    if quote == '"':
        out = out.replace('"', "&quot;")
    return f"{quote}{out}{quote}"


def _open_tag(node: X3DNode) -> str:
    attrs = "".join(f" {k}={quote_attr(v)}" for k, v in node.attrs.items())
    return f"<{node.name}{attrs}"


def _leaf(node: X3DNode) -> str:
    if node.name == COMMENT:
        return f"<!--{node.text}-->"
    if node.name == CDATA:
        return "<![CDATA[" + node.text.replace("]]>", "]]]]><![CDATA[>") + "]]>"
    return node.text.translate(_TEXT_ESCAPES)


def _compact(node: X3DNode, out: list[str]) -> None:
    if not node.is_element:
        out.append(_leaf(node))
        return
    out.append(_open_tag(node))
    if not node.children:
        out.append("/>")
        return
    out.append(">")
    for child in node.children:
        _compact(child, out)
    out.append(f"</{node.name}>")


def _pretty(node: X3DNode, depth: int, out: list[str], indent: str) -> None:
    pad = indent * depth
    if not node.is_element:
        out.append(pad + _leaf(node))
        return
    # mixed content cannot be re-indented without changing the text
    if not node.children or any(c.name in (TEXT, CDATA) for c in node.children):
        parts: list[str] = []
        _compact(node, parts)
        out.append(pad + "".join(parts))
        return
    out.append(pad + _open_tag(node) + ">")
    for child in node.children:
        _pretty(child, depth + 1, out, indent)
    out.append(f"{pad}</{node.name}>")


def serialize(doc: X3DDocument | X3DNode, pretty: bool = True, indent: str = "  ") -> str:
    """Deterministic XML text. Pretty mode indents by two spaces per level."""
    if isinstance(doc, X3DNode):
        doc = X3DDocument(doc)
    head = [XML_DECL]
    if doc.doctype:
        head.append(f"<!DOCTYPE {doc.doctype}>")
    if pretty:
        lines = list(head)
        _pretty(doc.root, 0, lines, indent)
        return "\n".join(lines) + "\n"
    parts: list[str] = []
    _compact(doc.root, parts)
    return "".join(head) + "".join(parts)


def strip_comments(node: X3DNode) -> X3DNode:
    """Copy of ``node`` with every comment removed."""
    return X3DNode(
        node.name,
        dict(node.attrs),
        [strip_comments(c) for c in node.children if c.name != COMMENT],
        node.text,
    )


def canonical(doc: X3DDocument | X3DNode) -> X3DNode:
    """Comparison form: comments removed, adjacent text/CDATA runs merged."""
    root = doc.root if isinstance(doc, X3DDocument) else doc
    return _canon(root)


def _canon(node: X3DNode) -> X3DNode:
    if not node.is_element:
        return X3DNode(TEXT if node.name == CDATA else node.name, text=node.text)
    kids: list[X3DNode] = []
    for child in node.children:
        if child.name == COMMENT:
            continue
        c = _canon(child)
        if c.name == TEXT and kids and kids[-1].name == TEXT:
            kids[-1] = X3DNode(TEXT, text=kids[-1].text + c.text)
        else:
            kids.append(c)
    return X3DNode(node.name, dict(node.attrs), kids)
