"""Deployment tools: minify, bundle, size report, doc extraction, corpus."""

from __future__ import annotations

import heapq
import html
import json
import logging
import random
import re
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .widgets import Category, K, WidgetKind
from .xmltree import (
    CDATA,
    COMMENT,
    TEXT,
    X3DDocument,
    X3DNode,
    element,
    parse_xml,
    serialize,
    strip_comments,
)

log = logging.getLogger("x3dui")

CATEGORIES = tuple(c.value for c in Category)
IMAGES_DIR = "images"


class ToolchainError(ValueError):
    pass


class BundleError(ToolchainError):
    pass


class DocWarning(UserWarning):
    """A @doc comment names something the prototype does not declare."""


def parse_x3d(text: str | bytes) -> X3DDocument:
    return parse_xml(text)


def minify(text: str | bytes, keep_comments: bool = False) -> str:
    """Whitespace-free serialization of ``text``.

    Attribute values and non-blank character data are kept as parsed.
    Comments are dropped unless ``keep_comments``.
    """
    doc = parse_xml(text)
    if not keep_comments:
        doc = X3DDocument(strip_comments(doc.root), doc.doctype)
    return serialize(doc, pretty=False)


def size_report(before: int, after: int) -> float:
    """Percent reduction from ``before`` to ``after`` bytes, one decimal."""
    if before <= 0:
        raise ValueError("before must be positive")
    return round((1 - after / before) * 100, 1)


# --------------------------------------------------------------------------
# prototype files


@dataclass
class ProtoFile:
    path: Path
    category: str
    document: X3DDocument
    name: str
    references: tuple[str, ...]
    size: int = 0

    @property
    def declaration(self) -> X3DNode:
        return next(self.document.root.iter("ProtoDeclare"))


def _references(doc: X3DDocument, own: str) -> tuple[str, ...]:
    names = {n.attrs.get("name") for n in doc.root.iter("ExternProtoDeclare")}
    names |= {n.attrs.get("name") for n in doc.root.iter("ProtoInstance")}
    names.discard(None)
    names.discard(own)
    return tuple(sorted(names))


def load_proto_file(path: str | Path, category: str | None = None) -> ProtoFile:
    path = Path(path)
    raw = path.read_bytes()
    try:
        doc = parse_xml(raw)
    except ValueError as exc:
        raise ToolchainError(f"{path}: {exc}") from None
    decls = list(doc.root.iter("ProtoDeclare"))
    if len(decls) != 1:
        raise ToolchainError(f"{path}: expected exactly one ProtoDeclare, found {len(decls)}")
    name = decls[0].attrs.get("name")
    if not name:
        raise ToolchainError(f"{path}: ProtoDeclare without a name")
    return ProtoFile(path, category or path.parent.name, doc, name, _references(doc, name), len(raw))


def load_corpus(root: str | Path, workers: int = 4) -> list[ProtoFile]:
    """Parse every ``*.x3d`` under the category subdirectories of ``root``."""
    root = Path(root)
    if not root.is_dir():
        raise ToolchainError(f"{root}: not a directory")
    paths = []
    for category in CATEGORIES:
        paths += [(p, category) for p in sorted((root / category).glob("*.x3d"))]
    if not paths:
        raise ToolchainError(f"{root}: no prototype files under {', '.join(CATEGORIES)}")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda pc: load_proto_file(*pc), paths))


# --------------------------------------------------------------------------
# bundling


@dataclass
class BundleReport:
    files: int
    order: list[str]
    before: int
    after: int
    removed_externs: int

    @property
    def reduction(self) -> float:
        return size_report(self.before, self.after)

    def to_text(self) -> str:
        return "\n".join([
            f"files: {self.files}",
            f"externs removed: {self.removed_externs}",
            f"before: {self.before} bytes",
            f"after: {self.after} bytes",
            f"reduction: {self.reduction:.1f}%",
        ]) + "\n"

    def to_json(self) -> dict:
        return {
            "files": self.files,
            "order": self.order,
            "before": self.before,
            "after": self.after,
            "removedExterns": self.removed_externs,
            "reduction": self.reduction,
        }


def topological_order(graph: dict[str, Sequence[str]]) -> list[str]:
    """Dependencies first. ``graph`` maps each name to the names it uses.

    Ties are broken alphabetically so the order is deterministic.
    """
    users: dict[str, list[str]] = {n: [] for n in graph}
    pending = {n: 0 for n in graph}
    for name, deps in graph.items():
        for dep in set(deps):
            users[dep].append(name)
            pending[name] += 1
    ready = [n for n, c in pending.items() if c == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        n = heapq.heappop(ready)
        order.append(n)
        for user in users[n]:
            pending[user] -= 1
            if pending[user] == 0:
                heapq.heappush(ready, user)
    if len(order) != len(graph):
        stuck = sorted(n for n in graph if n not in order)
        raise BundleError(f"dependency cycle among: {', '.join(stuck)}")
    return order


def bundle(files: Sequence[ProtoFile]) -> tuple[X3DDocument, BundleReport]:
    by_name: dict[str, ProtoFile] = {}
    for f in files:
        if f.name in by_name:
            raise BundleError(f"duplicate prototype {f.name!r} in {by_name[f.name].path} and {f.path}")
        by_name[f.name] = f
    for f in files:
        missing = [r for r in f.references if r not in by_name]
        if missing:
            raise BundleError(f"{f.path}: unresolved prototype reference(s): {', '.join(missing)}")
    order = topological_order({f.name: f.references for f in files})
    scene = element("Scene")
    removed = 0
    for name in order:
        f = by_name[name]
        removed += sum(1 for _ in f.document.root.iter("ExternProtoDeclare"))
        scene.append(strip_comments(f.declaration))
    head = element("head", {}, element("meta", {"name": "generator", "content": "x3dui bundle"}))
    doc = X3DDocument(element("X3D", {"profile": "Immersive", "version": "3.2"}, head, scene))
    before = sum(f.size for f in files)
    after = len(serialize(doc, pretty=False).encode("utf-8"))
    return doc, BundleReport(len(files), order, before, after, removed)


def bundle_directory(root: str | Path) -> tuple[str, BundleReport]:
    doc, report = bundle(load_corpus(root))
    return serialize(doc, pretty=False), report


# --------------------------------------------------------------------------
# documentation

DOC_RE = re.compile(r"^\s*@doc\s+(proto|field|method)\s+([A-Za-z_][\w.]*)\s*:\s*(.*?)\s*$", re.S)
FUNC_RE = re.compile(r"function\s+([A-Za-z_]\w*)\s*\(([^)]*)\)")


@dataclass
class FieldDoc:
    name: str
    type: str
    description: str


@dataclass
class MethodDoc:
    name: str
    params: list[str]
    description: str


@dataclass
class ProtoDoc:
    name: str
    category: str = ""
    summary: str = ""
    fields: list[FieldDoc] = field(default_factory=list)
    methods: list[MethodDoc] = field(default_factory=list)

    @property
    def entry_count(self) -> int:
        return (1 if self.summary else 0) + len(self.fields) + len(self.methods)


@dataclass
class DocModel:
    protos: dict[str, ProtoDoc] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def entry_count(self) -> int:
        return sum(p.entry_count for p in self.protos.values())


def _script_methods(decl: X3DNode) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for script in decl.iter("Script"):
        for node in script.iter():
            if node.name in (TEXT, CDATA) and node.text:
                for m in FUNC_RE.finditer(node.text):
                    params = [p.strip() for p in m.group(2).split(",") if p.strip()]
                    out.setdefault(m.group(1), params)
    return out


def _proto_doc(f: ProtoFile, model: DocModel) -> ProtoDoc:
    decl = f.declaration
    doc = ProtoDoc(f.name, f.category)
    interface = decl.find("ProtoInterface")
    declared = {}
    if interface is not None:
        declared = {n.attrs["name"]: n.attrs.get("type", "") for n in interface.elements() if n.name == "field"}
    methods = _script_methods(decl)
    seen: set[tuple[str, str]] = set()

    def warn(msg: str) -> None:
        model.warnings.append(f"{f.path}: {msg}")
        warnings.warn(msg, DocWarning, stacklevel=3)

    # comments before the declaration describe it as well
    outside = [n for n in f.document.root.iter(COMMENT) if not any(n is c for c in decl.iter(COMMENT))]
    for node in outside + list(decl.iter(COMMENT)):
        m = DOC_RE.match(node.text or "")
        if not m:
            continue
        kind, name, text = m.group(1), m.group(2), " ".join(m.group(3).split())
        if (kind, name) in seen:
            warn(f"duplicate @doc {kind} {name} in {f.name}; keeping the first")
            continue
        if kind == "proto":
            if name != f.name:
                warn(f"@doc proto {name} inside prototype {f.name}")
                continue
            doc.summary = text
        elif kind == "field":
            if name not in declared:
                warn(f"@doc field {name}: {f.name} declares no such field")
                continue
            doc.fields.append(FieldDoc(name, declared[name], text))
        else:
            if name not in methods:
                warn(f"@doc method {name}: {f.name} defines no such method")
                continue
            doc.methods.append(MethodDoc(name, methods[name], text))
        seen.add((kind, name))
    return doc


def extract_docs(files: Iterable[ProtoFile]) -> DocModel:
    """Collect ``@doc`` comments per prototype. Entries naming undeclared
    fields or methods are dropped and reported as warnings."""
    model = DocModel()
    for f in sorted(files, key=lambda f: f.name):
        model.protos[f.name] = _proto_doc(f, model)
    return model


_PAGE = """<!DOCTYPE html>
<html>
<head><meta charset="utf-8"><title>{title}</title></head>
<body>
{body}
</body>
</html>
"""


def _page(title: str, body: list[str]) -> str:
    return _PAGE.format(title=html.escape(title), body="\n".join(body))


def render_docs(model: DocModel) -> dict[str, str]:
    """File name -> HTML text; ``index.html`` plus one page per prototype.

    Every documented entry carries a ``data-doc-entry`` attribute so the
    output can be counted against the model.
    """
    e = html.escape
    pages: dict[str, str] = {}
    index = ["<h1>X3DUI prototypes</h1>"]
    for category in CATEGORIES:
        names = sorted(n for n, p in model.protos.items() if p.category == category)
        if not names:
            continue
        index.append(f'<h2 id="{category}">{category}</h2>')
        index.append("<ul>")
        index += [f'<li><a href="{e(n)}.html">{e(n)}</a></li>' for n in names]
        index.append("</ul>")
    other = sorted(n for n, p in model.protos.items() if p.category not in CATEGORIES)
    if other:
        index.append("<h2>other</h2><ul>")
        index += [f'<li><a href="{e(n)}.html">{e(n)}</a></li>' for n in other]
        index.append("</ul>")
    pages["index.html"] = _page("X3DUI prototypes", index)

    for name in sorted(model.protos):
        p = model.protos[name]
        body = [f"<h1>{e(name)}</h1>", '<p><a href="index.html">index</a></p>']
        if p.summary:
            body.append(f'<p class="summary" data-doc-entry="proto">{e(p.summary)}</p>')
        if p.fields:
            body.append("<h2>Fields</h2>")
            body.append("<dl>")
            for fd in p.fields:
                body.append(f'<dt data-doc-entry="field"><code>{e(fd.type)} {e(fd.name)}</code></dt>')
                body.append(f"<dd>{e(fd.description)}</dd>")
            body.append("</dl>")
        if p.methods:
            body.append("<h2>Methods</h2>")
            body.append("<dl>")
            for md in p.methods:
                sig = f"{md.name}({', '.join(md.params)})"
                body.append(f'<dt data-doc-entry="method"><code>{e(sig)}</code></dt>')
                body.append(f"<dd>{e(md.description)}</dd>")
            body.append("</dl>")
        pages[f"{name}.html"] = _page(name, body)
    return pages


def count_rendered_entries(pages: dict[str, str]) -> int:
    return sum(text.count("data-doc-entry=") for text in pages.values())


def write_pages(pages: dict[str, str], outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in pages.items():
        path = outdir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


# --------------------------------------------------------------------------
# synthetic library corpus

DEPENDENCIES: dict[WidgetKind, tuple[WidgetKind, ...]] = {
    K.DISPLAY: (K.SETTINGS, K.TASK_BAR, K.LAYOUT_MANAGER),
    K.TASK_BAR: (K.TEXT_TOGGLE_BUTTON,),
    K.FRAME: (K.CONTROL_BUTTON, K.LAYOUT_MANAGER, K.FLOW_LAYOUT, K.LABEL),
    K.PANEL: (K.RECTANGLE, K.FLOW_LAYOUT),
    K.RECTANGLE: (K.LAYOUT_MANAGER,),
    K.LAYER: (K.LAYOUT_MANAGER,),
    K.PLANE: (K.LAYOUT_MANAGER,),
    K.TAB_PANEL: (K.PANEL, K.TEXT_TOGGLE_BUTTON),
    K.COMBO_BOX: (K.TEXT_BUTTON, K.LABEL),
    K.HORIZONTAL_SLIDER: (K.HORIZONTAL_RUNNER, K.LABEL),
    K.TEXT_TOGGLE_BUTTON: (K.TOGGLE_BUTTON,),
    K.TOGGLE_BUTTON: (K.BUTTON,),
    K.TEXT_BUTTON: (K.BUTTON,),
    K.CONTROL_BUTTON: (K.BUTTON,),
    K.CHECK_BOX: (K.LABEL,),
    K.RADIO_BUTTON: (K.CHECK_BOX,),
    K.RADIO_BUTTON_GROUP: (K.RADIO_BUTTON,),
    K.TEXT_FIELD: (K.LABEL,),
    K.BORDER_LAYOUT: (K.LAYOUT_MANAGER,),
    K.BOX_LAYOUT: (K.LAYOUT_MANAGER,),
    K.GRID_LAYOUT: (K.LAYOUT_MANAGER,),
    K.FLOW_LAYOUT: (K.LAYOUT_MANAGER,),
}

_COMMON_FIELDS = [
    ("size", "SFVec2f", "0 0", "outer width and height in pixels"),
    ("color", "SFColor", "0.8 0.8 0.8", "fill color of the body"),
    ("transparency", "SFFloat", "0", "0 is opaque, 1 is invisible"),
    ("visible", "SFBool", "true", "hides the widget and its sensors when false"),
]
_EXTRA_FIELDS: dict[WidgetKind, list[tuple[str, str, str, str]]] = {
    K.SETTINGS: [
        ("activeFrameColor", "SFColor", "0.2 0.35 0.7", "title bar color of the active frame"),
        ("inactiveFrameColor", "SFColor", "0.5 0.5 0.55", "title bar color of other frames"),
        ("fontSize", "SFFloat", "10", "default text size"),
        ("DEBUG", "SFBool", "false", "prints layout traces to the console"),
    ],
    K.DISPLAY: [("imagePath", "SFString", '"images/"', "directory holding the widget textures")],
    K.TEXT_BUTTON: [("text", "SFString", '""', "caption drawn on the button")],
    K.TEXT_TOGGLE_BUTTON: [("text", "SFString", '""', "caption"), ("pressed", "SFBool", "false", "toggle status")],
    K.TOGGLE_BUTTON: [("pressed", "SFBool", "false", "toggle status")],
    K.CHECK_BOX: [("text", "SFString", '""', "caption"), ("checked", "SFBool", "false", "check status")],
    K.RADIO_BUTTON: [("text", "SFString", '""', "caption"), ("checked", "SFBool", "false", "check status")],
    K.CONTROL_BUTTON: [("type", "SFString", '"CLOSE"', "MINIMIZE, MAXIMIZE, NORMALIZE or CLOSE")],
    K.LABEL: [("text", "MFString", "", "one string per line"), ("justify", "SFString", '"begin"', "alignment")],
    K.TEXT_FIELD: [("text", "SFString", '""', "current message"), ("maxLength", "SFInt32", "0", "caps the message, 0 means no limit")],
    K.COMBO_BOX: [("items", "MFString", "", "selectable entries"), ("selected", "SFInt32", "-1", "selected index")],
    K.HORIZONTAL_SLIDER: [
        ("min", "SFFloat", "0", "lower bound"),
        ("max", "SFFloat", "1", "upper bound"),
        ("value", "SFFloat", "0", "current value"),
        ("intervals", "SFInt32", "0", "number of marks"),
        ("discrete", "SFBool", "false", "snap to the marks"),
    ],
    K.FRAME: [("title", "SFString", '""', "title bar text"), ("resizable", "SFBool", "true", "edges can be dragged")],
    K.TAB_PANEL: [("titles", "MFString", "", "tab captions"), ("activeTab", "SFInt32", "0", "visible tab")],
    K.GRID_LAYOUT: [("rows", "SFInt32", "1", "row count"), ("cols", "SFInt32", "1", "column count")],
    K.BOX_LAYOUT: [("orientation", "SFString", '"row"', "main axis"), ("gap", "SFFloat", "5", "space between children")],
    K.BORDER_LAYOUT: [("hgap", "SFFloat", "5", "horizontal gap"), ("vgap", "SFFloat", "5", "vertical gap")],
    K.FLOW_LAYOUT: [("hgap", "SFFloat", "5", "horizontal gap"), ("vgap", "SFFloat", "5", "vertical gap")],
}
_METHODS = [
    ("initialize", "", "builds the geometry once the scene is loaded"),
    ("set_size", "value, time", "resizes the body and notifies the parent"),
    ("set_color", "value, time", "updates the material"),
    ("touch", "value, time", "forwards sensor activity to the state machine"),
    ("doLayout", "", "recomputes the placement of every child"),
    ("computeMinSize", "width, height", "reports the smallest acceptable size"),
]


def _script_body(methods: list[tuple[str, str, str]], rng: random.Random) -> str:
    lines = ["", "ecmascript:", ""]
    for name, params, _ in methods:
        lines.append(f"function {name}({params}) {{")
        for i in range(rng.randint(3, 8)):
            lines.append(f"    state{i} = state{i} + {rng.randint(1, 9)};")
        lines.append("    return true;")
        lines.append("}")
        lines.append("")
    return "\n".join(lines) + "\n      "


def _bevel(rng: random.Random) -> tuple[str, str]:
    """Coordinate points and quad indices for a bevel strip."""
    quads = rng.randint(10, 16)
    points = ", ".join(f"{rng.uniform(-1, 1):.4f} {rng.uniform(-1, 1):.4f} 0" for _ in range(quads * 4))
    index = " ".join(f"{i} {i + 1} {i + 2} {i + 3} -1" for i in range(0, quads * 4, 4))
    return points, index


def synthetic_proto_file(kind: WidgetKind, rng: random.Random, library_url: str = "../x3dui.x3d") -> str:
    """X3D source for one prototype in a hand-written style."""
    deps = DEPENDENCIES.get(kind, ())
    fields = _COMMON_FIELDS + _EXTRA_FIELDS.get(kind, [])
    methods = _METHODS[: rng.randint(2, len(_METHODS))]
    points, index = _bevel(rng)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<!DOCTYPE X3D PUBLIC "ISO//Web3D//DTD X3D 3.2//EN" "http://www.web3d.org/specifications/x3d-3.2.dtd">',
        '<X3D profile="Immersive" version="3.2">',
        "  <head>",
        f'    <meta name="title" content="{kind.proto}.x3d"/>',
        '    <meta name="description" content="X3DUI widget prototype"/>',
        "  </head>",
        "  <Scene>",
        f"    <!-- {kind.proto} ({kind.category.value}) -->",
    ]
    for dep in deps:
        lines.append(f'    <ExternProtoDeclare name="{dep.proto}" url=\'"{library_url}#{dep.proto}"\'>')
        lines.append('      <field name="size" type="SFVec2f" accessType="inputOutput"/>')
        lines.append("    </ExternProtoDeclare>")
    lines += [
        f"    <!-- @doc proto {kind.proto}: {kind.category.value} prototype of the widget library -->",
        f'    <ProtoDeclare name="{kind.proto}">',
        "      <ProtoInterface>",
    ]
    for name, x3d_type, default, desc in fields:
        lines.append(f"        <!-- @doc field {name}: {desc} -->")
        value = f" value='{default}'" if default else ""
        lines.append(f'        <field name="{name}" type="{x3d_type}" accessType="inputOutput"{value}/>')
    lines += [
        "      </ProtoInterface>",
        "      <ProtoBody>",
        '        <Transform DEF="Root">',
        "          <!-- body shape -->",
        "          <Shape>",
        "            <Appearance>",
        '              <Material DEF="BodyMaterial" diffuseColor="0.8 0.8 0.8"/>',
        "            </Appearance>",
        '            <Rectangle2D DEF="Body" size="1 1"/>',
        "          </Shape>",
        "          <!-- bevel -->",
        "          <Shape>",
        '            <IndexedFaceSet DEF="Bevel" solid="false" coordIndex="' + index + '">',
        '              <Coordinate point="' + points + '"/>',
        "            </IndexedFaceSet>",
        "          </Shape>",
    ]
    for dep in deps:
        lines += [
            f'          <ProtoInstance name="{dep.proto}" DEF="Part{dep.proto}">',
            '            <fieldValue name="size" value="0 0"/>',
            "          </ProtoInstance>",
        ]
    lines += [
        '          <TouchSensor DEF="Sensor"/>',
        "        </Transform>",
    ]
    for name, _, desc in methods:
        lines.append(f"        <!-- @doc method {name}: {desc} -->")
    lines.append('        <Script DEF="Logic" directOutput="true">')
    lines.append("          <field name=\"touched\" type=\"SFBool\" accessType=\"inputOnly\"/>")
    lines.append("          <![CDATA[" + _script_body(methods, rng) + "]]>")
    lines += [
        "        </Script>",
        '        <ROUTE fromNode="Sensor" fromField="isActive" toNode="Logic" toField="touched"/>',
        "      </ProtoBody>",
        "    </ProtoDeclare>",
        "  </Scene>",
        "</X3D>",
    ]
    return "\n".join(lines) + "\n"


def generate_corpus(outdir: str | Path, seed: int = 0) -> list[Path]:
    """Write the 27-prototype library in category directories plus images."""
    outdir = Path(outdir)
    rng = random.Random(seed)
    written = []
    for kind in WidgetKind:
        folder = outdir / kind.category.value
        folder.mkdir(parents=True, exist_ok=True)
        path = folder / f"{kind.proto}.x3d"
        path.write_text(synthetic_proto_file(kind, rng), encoding="utf-8")
        written.append(path)
    images = outdir / IMAGES_DIR
    images.mkdir(parents=True, exist_ok=True)
    for name in ("close", "minimize", "maximize", "normalize", "runner"):
        (images / f"{name}.png").write_bytes(b"\x89PNG\r\n\x1a\n" + bytes(rng.randrange(256) for _ in range(64)))
    return written


def report_json(report: BundleReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
