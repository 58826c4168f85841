"""Back-end: widget tree + computed layouts -> X3D scene graph."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import layout as lay
from .layout import ComputedLayout, Rect, Size
from .runtime import DEFAULT_VIEWPORT, FrameState, Scene, initial_state
from .widgets import (
    CONTAINERS,
    TAB,
    TEXT_KINDS,
    K,
    WidgetKind,
    WidgetNode,
    WidgetTree,
    ellipsize_lines,
    layout_children,
    validate_tree,
)
from .xmltree import X3DDocument, X3DNode, element, serialize

log = logging.getLogger("x3dui")

DOCTYPE = 'X3D PUBLIC "ISO//Web3D//DTD X3D 3.2//EN" "http://www.web3d.org/specifications/x3d-3.2.dtd"'
HUD_SENSOR = "X3DUI_HUD_SENSOR"
HUD_ROOT = "X3DUI_HUD"
HUD_STRATEGIES = ("proximityRoute", "layer3d")


class EmitError(ValueError):
    pass


class DepthRangeWarning(UserWarning):
    """Sibling depth dispersion exceeds the gap between frame layers."""


@dataclass(frozen=True)
class EmitConfig:
    hud_strategy: str = "proximityRoute"
    z_epsilon: float = 0.001
    frame_layer_gap: float = 0.1
    use_texture_text: bool = True
    library_url: str = "x3dui.x3d"
    image_path: str | None = None
    strict_standard: bool = False
    viewport: Size = DEFAULT_VIEWPORT
    # pixels -> scene units for the proximity rig
    hud_scale: float = 0.001
    hud_distance: float = 1.0

    def __post_init__(self):
        if self.hud_strategy not in HUD_STRATEGIES:
            raise ValueError(f"hud strategy must be one of {HUD_STRATEGIES}")
        if not self.z_epsilon > 0:
            raise ValueError("zEpsilon must be positive")
        if not self.frame_layer_gap > self.z_epsilon:
            raise ValueError("frameLayerGap must exceed zEpsilon")


# --------------------------------------------------------------------------
# depth and order


def assign_depths(
    siblings: Sequence | int, z_epsilon: float = 0.001, frame_layer_gap: float = 0.1
) -> tuple[list[float], float]:
    """z offset ``i * z_epsilon`` per sibling and the total separation range.

    Warns with :class:`DepthRangeWarning` when the range is wider than the
    gap between frame layers.
    """
    if not z_epsilon > 0:
        raise ValueError("zEpsilon must be positive")
    n = siblings if isinstance(siblings, int) else len(siblings)
    depths = [i * z_epsilon for i in range(n)]
    spread = max(n - 1, 0) * z_epsilon
    if spread > frame_layer_gap:
        warnings.warn(
            f"{n} siblings span {spread:.6g} scene units, more than the frame layer gap {frame_layer_gap}",
            DepthRangeWarning,
            stacklevel=2,
        )
    return depths, spread


def assign_order(overlays: Sequence[bool]) -> list[int]:
    """OrderedGroup ``order`` values; larger renders later, i.e. on top.

    Plain children keep document order and overlays are ranked after all of
    them, also in document order.
    """
    plain = [i for i, o in enumerate(overlays) if not o]
    raised = [i for i, o in enumerate(overlays) if o]
    order = [0] * len(overlays)
    for rank, i in enumerate(plain + raised):
        order[i] = rank
    return order


# --------------------------------------------------------------------------
# coordinates


def to_scene(rect: Rect, parent: Size, z: float = 0.0) -> tuple[float, float, float]:
    """Top-left/y-down layout rect -> translation of its centre in a
    y-up frame centred on the parent."""
    pw, ph = parent
    return rect.x + rect.w / 2 - pw / 2, ph / 2 - (rect.y + rect.h / 2), z


def from_scene(translation: Sequence[float], size: Size, parent: Size) -> Rect:
    tx, ty = translation[0], translation[1]
    w, h = size
    pw, ph = parent
    return Rect(tx - w / 2 + pw / 2, ph / 2 - ty - h / 2, w, h)


# --------------------------------------------------------------------------
# value encoding


def fmt(value: float) -> str:
    value = float(value) + 0.0
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def vec(*values: float) -> str:
    return " ".join(fmt(v) for v in values)


def sfstring(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def mfstring(items: Iterable[str]) -> str:
    return " ".join(sfstring(i) for i in items)


def sfbool(value: bool) -> str:
    return "true" if value else "false"


def proto_url(library_url: str, name: str) -> str:
    return f"{library_url}#{name}"


# --------------------------------------------------------------------------
# prototype plumbing


@dataclass
class _Interfaces:
    """Fields used per instantiated prototype, for ExternProtoDeclare."""

    fields: dict[WidgetKind, dict[str, str]] = field(default_factory=dict)

    def use(self, kind: WidgetKind, name: str, x3d_type: str) -> None:
        self.fields.setdefault(kind, {})[name] = x3d_type

    def touch(self, kind: WidgetKind) -> None:
        self.fields.setdefault(kind, {})


def emit_extern_protos(
    used: Iterable[WidgetKind],
    library_url: str,
    interfaces: dict[WidgetKind, dict[str, str]] | None = None,
) -> list[X3DNode]:
    """One ExternProtoDeclare per used prototype, in catalog order."""
    used = set(used)
    out = []
    for kind in WidgetKind:
        if kind not in used:
            continue
        decl = element(
            "ExternProtoDeclare",
            {"name": kind.proto, "url": sfstring(proto_url(library_url, kind.proto))},
        )
        for name, x3d_type in sorted((interfaces or {}).get(kind, {}).items()):
            decl.append(element("field", {"name": name, "type": x3d_type, "accessType": "inputOutput"}))
        out.append(decl)
    return out


class _Emitter:
    def __init__(self, tree: WidgetTree, frames: dict[int, tuple[Rect, dict[int, ComputedLayout]]],
                 config: EmitConfig):
        self.tree = tree
        self.settings = tree.settings
        self.frames = frames
        self.config = config
        self.ifaces = _Interfaces()
        self.header = lay.header_height(self.settings)

    # ---- instance helpers

    def instance(self, kind: WidgetKind, def_name: str | None = None) -> X3DNode:
        self.ifaces.touch(kind)
        attrs = {"name": kind.proto}
        if def_name:
            attrs["DEF"] = def_name
        return element("ProtoInstance", attrs)

    def value(self, inst: X3DNode, kind: WidgetKind, name: str, x3d_type: str, value: str) -> None:
        self.ifaces.use(kind, name, x3d_type)
        inst.append(element("fieldValue", {"name": name, "value": value}))

    def nodes(self, inst: X3DNode, kind: WidgetKind, name: str, x3d_type: str, *children: X3DNode) -> X3DNode:
        self.ifaces.use(kind, name, x3d_type)
        holder = element("fieldValue", {"name": name}, *children)
        inst.append(holder)
        return holder

    def def_name(self, node: WidgetNode) -> str:
        return node.get("name") or f"W{node.id}"

    def font_style(self, node: WidgetNode) -> X3DNode:
        attrs = {"size": fmt(lay.font_size(node, self.settings))}
        justify = node.get("justify")
        if justify:
            attrs["justify"] = sfstring(justify.upper())
        if self.config.use_texture_text and not self.config.strict_standard:
            attrs["style"] = "USE_TEXTURE"
        return element("FontStyle", attrs)

    def group(self, children: list[X3DNode], overlays: list[bool]) -> X3DNode:
        if self.config.strict_standard:
            return element("Group", {}, *children)
        order = assign_order(overlays)
        return element("OrderedGroup", {"order": " ".join(map(str, order))}, *children)

    # ---- widgets

    def widget(self, node: WidgetNode, rect: Rect, layouts: dict[int, ComputedLayout]) -> X3DNode:
        kind = node.kind
        inst = self.instance(kind, self.def_name(node))
        p = node.props
        self.value(inst, kind, "size", "SFVec2f", vec(rect.w, rect.h))
        if "color" in p:
            self.value(inst, kind, "color", "SFColor", p["color"])
        if "transparency" in p:
            self.value(inst, kind, "transparency", "SFFloat", fmt(p["transparency"]))
        if "border" in p:
            self.value(inst, kind, "border", "SFString", sfstring(p["border"]))
        if "visible" in p:
            self.value(inst, kind, "visible", "SFBool", sfbool(p["visible"]))
        if kind in TEXT_KINDS:
            self.nodes(inst, kind, "fontStyle", "SFNode", self.font_style(node))

        if kind is K.LABEL:
            lines = p.get("text", "").split("\n")
            if "width" in p:
                lines, _, _ = ellipsize_lines(lines, p["width"], lay.font_size(node, self.settings))
            self.value(inst, kind, "text", "MFString", mfstring(lines))
        elif kind is K.FRAME:
            self.value(inst, kind, "title", "SFString", sfstring(p.get("title", "")))
        elif "text" in p:
            self.value(inst, kind, "text", "SFString", sfstring(p["text"]))
        if kind in (K.TOGGLE_BUTTON, K.TEXT_TOGGLE_BUTTON) and "pressed" in p:
            self.value(inst, kind, "pressed", "SFBool", sfbool(p["pressed"]))
        if kind in (K.CHECK_BOX, K.RADIO_BUTTON) and "checked" in p:
            self.value(inst, kind, "checked", "SFBool", sfbool(p["checked"]))
        if kind is K.TEXT_FIELD and "maxLength" in p:
            self.value(inst, kind, "maxLength", "SFInt32", str(p["maxLength"]))
        if kind is K.COMBO_BOX:
            self.value(inst, kind, "items", "MFString", mfstring(p.get("items", ())))
            if "selected" in p:
                self.value(inst, kind, "selected", "SFInt32", str(p["selected"]))
        if kind is K.HORIZONTAL_SLIDER:
            self.slider(inst, node)
        if kind in CONTAINERS or kind == TAB:
            self.container(inst, kind, node, layouts)
        if kind is K.TAB_PANEL:
            self.tab_panel(inst, node, layouts)
        return inst

    def slider(self, inst: X3DNode, node: WidgetNode) -> None:
        kind = K.HORIZONTAL_SLIDER
        types = {"min": "SFFloat", "max": "SFFloat", "value": "SFFloat", "intervals": "SFInt32",
                 "discrete": "SFBool", "showMarks": "SFBool", "leftCaption": "SFString",
                 "rightCaption": "SFString"}
        for name, x3d_type in types.items():
            if name not in node.props:
                continue
            raw = node.props[name]
            text = {"SFFloat": fmt, "SFInt32": str, "SFBool": sfbool, "SFString": sfstring}[x3d_type](raw)
            self.value(inst, kind, name, x3d_type, text)
        for child in node.children:
            runner = self.instance(K.HORIZONTAL_RUNNER, self.def_name(child))
            for name, x3d_type in (("color", "SFColor"), ("transparency", "SFFloat")):
                if name in child.props:
                    raw = child.props[name]
                    self.value(runner, K.HORIZONTAL_RUNNER, name, x3d_type,
                               raw if x3d_type == "SFColor" else fmt(raw))
            self.nodes(inst, kind, "runner", "SFNode", runner)

    def layout_instance(self, node: WidgetNode) -> X3DNode:
        spec = lay.layout_spec_for(node, self.settings)
        if isinstance(spec, lay.BorderSpec):
            kind, values = K.BORDER_LAYOUT, [("hgap", "SFFloat", fmt(spec.hgap)), ("vgap", "SFFloat", fmt(spec.vgap))]
        elif isinstance(spec, lay.BoxSpec):
            kind, values = K.BOX_LAYOUT, [
                ("orientation", "SFString", sfstring(spec.orientation)),
                ("hAlign", "SFString", sfstring(spec.h_align)),
                ("vAlign", "SFString", sfstring(spec.v_align)),
                ("gap", "SFFloat", fmt(spec.gap)),
            ]
        elif isinstance(spec, lay.GridSpec):
            kind, values = K.GRID_LAYOUT, [
                ("rows", "SFInt32", str(spec.rows)), ("cols", "SFInt32", str(spec.cols)),
                ("hgap", "SFFloat", fmt(spec.hgap)), ("vgap", "SFFloat", fmt(spec.vgap)),
                ("compressHorizontally", "SFBool", sfbool(spec.compress_h)),
                ("compressVertically", "SFBool", sfbool(spec.compress_v)),
            ]
        else:
            kind, values = K.FLOW_LAYOUT, [("hgap", "SFFloat", fmt(spec.hgap)), ("vgap", "SFFloat", fmt(spec.vgap))]
        inst = self.instance(kind)
        for name, x3d_type, text in values:
            self.value(inst, kind, name, x3d_type, text)
        return inst

    def placed_children(self, node: WidgetNode, kids: list[WidgetNode], layouts: dict[int, ComputedLayout],
                        overlays: list[bool]) -> X3DNode:
        computed = layouts.get(node.id)
        if computed is None:
            raise EmitError(f"missing layout for {node.name} #{node.id}")
        parent = (computed.width, computed.height)
        # surplus grid children are not rendered
        placed = [(k, o) for k, o in zip(kids, overlays) if k.id in computed.placements]
        overlays = [o for _, o in placed]
        order = assign_order(overlays)
        assign_depths(len(placed), self.config.z_epsilon, self.config.frame_layer_gap)
        holders = []
        for (child, _), rank in zip(placed, order):
            rect = computed.placements[child.id]
            holders.append(element(
                "Transform", {"translation": vec(*to_scene(rect, parent, rank * self.config.z_epsilon))},
                self.widget(child, rect, layouts),
            ))
        return self.group(holders, overlays)

    def container(self, inst: X3DNode, kind: WidgetKind, node: WidgetNode,
                  layouts: dict[int, ComputedLayout]) -> None:
        self.nodes(inst, kind, "layout", "SFNode", self.layout_instance(node))
        kids = layout_children(node)
        overlays = [k.kind is K.COMBO_BOX for k in kids]
        self.nodes(inst, kind, "children", "MFNode", self.placed_children(node, kids, layouts, overlays))
        groups = [c for c in node.children if c.kind is K.RADIO_BUTTON_GROUP]
        if groups:
            holder = self.nodes(inst, kind, "groups", "MFNode")
            for g in groups:
                ginst = self.instance(K.RADIO_BUTTON_GROUP, self.def_name(g))
                refs = [element("ProtoInstance", {"USE": self.def_name(r)}) for r in g.children]
                self.nodes(ginst, K.RADIO_BUTTON_GROUP, "buttons", "MFNode", *refs)
                holder.append(ginst)

    def tab_panel(self, inst: X3DNode, node: WidgetNode, layouts: dict[int, ComputedLayout]) -> None:
        kind = K.TAB_PANEL
        self.value(inst, kind, "titles", "MFString", mfstring(t.get("title", "") for t in node.children))
        self.value(inst, kind, "activeTab", "SFInt32", "0")
        computed = layouts.get(node.id)
        if computed is None:
            raise EmitError(f"missing layout for TabPanel #{node.id}")
        parent = (computed.width, computed.height)
        overlays = [i == 0 for i in range(len(node.children))]
        order = assign_order(overlays)
        pages = []
        for i, tab in enumerate(node.children):
            rect = computed.placements[tab.id]
            page = element("Transform", {"DEF": self.def_name(tab),
                                         "translation": vec(*to_scene(rect, parent, order[i] * self.config.z_epsilon))})
            kids = layout_children(tab)
            page.append(self.placed_children(tab, kids, layouts, [k.kind is K.COMBO_BOX for k in kids]))
            pages.append(page)
        self.nodes(inst, kind, "tabs", "MFNode", self.group(pages, overlays))

    # ---- frames, display, rig

    def frame(self, node: WidgetNode, rect: Rect, layouts: dict[int, ComputedLayout], depth: float) -> X3DNode:
        content = Rect(rect.x, rect.y + self.header, rect.w, rect.h - self.header)
        inst = self.widget(node, content, layouts)
        self.value(inst, K.FRAME, "resizable", "SFBool", sfbool(node.get("resizable", True)))
        self.value(inst, K.FRAME, "floating", "SFBool", sfbool(node.get("floating", True)))
        controls = [c for c in node.children if c.kind is K.CONTROL_BUTTON]
        if controls:
            buttons = []
            for c in controls:
                b = self.instance(K.CONTROL_BUTTON, self.def_name(c))
                self.value(b, K.CONTROL_BUTTON, "type", "SFString", sfstring(c.get("type")))
                buttons.append(b)
            self.nodes(inst, K.FRAME, "controls", "MFNode", *buttons)
        return element(
            "Transform",
            {"DEF": f"X3DUI_FRAME_{node.id}", "translation": vec(*to_scene(content, self.config.viewport, -depth))},
            inst,
        )

    def display(self) -> X3DNode:
        s = self.settings
        inst = self.instance(K.DISPLAY, "X3DUI_DISPLAY")
        image_path = self.config.image_path or self.tree.image_path or s.image_path
        self.value(inst, K.DISPLAY, "imagePath", "SFString", sfstring(image_path))
        settings = self.instance(K.SETTINGS, "X3DUI_SETTINGS")
        for name, x3d_type, text in (
            ("activeFrameColor", "SFColor", s.active_frame_color),
            ("inactiveFrameColor", "SFColor", s.inactive_frame_color),
            ("buttonColor", "SFColor", s.button_color),
            ("textColor", "SFColor", s.text_color),
            ("fontSize", "SFFloat", fmt(s.font_size)),
            ("hgap", "SFFloat", fmt(s.hgap)),
            ("vgap", "SFFloat", fmt(s.vgap)),
            ("DEBUG", "SFBool", sfbool(s.debug)),
        ):
            self.value(settings, K.SETTINGS, name, x3d_type, text)
        self.nodes(inst, K.DISPLAY, "settings", "SFNode", settings)
        self.nodes(inst, K.DISPLAY, "taskBar", "SFNode", self.instance(K.TASK_BAR, "X3DUI_TASKBAR"))
        frames = list(self.frames.items())
        holders = []
        for k, (fid, (rect, layouts)) in enumerate(frames):
            node = next(r for r in self.tree.roots if r.id == fid)
            depth = (len(frames) - 1 - k) * self.config.frame_layer_gap
            holders.append(self.frame(node, rect, layouts, depth))
        self.nodes(inst, K.DISPLAY, "children", "MFNode", *holders)
        return inst


def emit_hud_rig(config: EmitConfig, content: X3DNode | None = None) -> list[X3DNode]:
    """Nodes that keep ``content`` glued to the viewer.

    ``proximityRoute`` routes a ProximitySensor's position and orientation
    into the GUI root Transform; ``layer3d`` makes the content the sole child
    of a Layer3D overlay. Strict-standard output always uses the former.
    """
    content = content if content is not None else element("Group", {"DEF": "X3DUI_CONTENT"})
    strategy = config.hud_strategy
    if strategy == "layer3d" and config.strict_standard:
        log.warning("Layer3D is a vendor extension; falling back to the ProximitySensor rig")
        strategy = "proximityRoute"
    if strategy == "layer3d":
        return [element("Layer3D", {"DEF": "X3DUI_LAYER", "position": "0 0", "size": "-1 -1"}, content)]
    s = fmt(config.hud_scale)
    screen = element(
        "Transform",
        {"DEF": "X3DUI_SCREEN", "translation": vec(0, 0, -config.hud_distance), "scale": f"{s} {s} {s}"},
        content,
    )
    return [
        element("ProximitySensor", {"DEF": HUD_SENSOR, "size": "1000000 1000000 1000000"}),
        element("Transform", {"DEF": HUD_ROOT}, screen),
        element("ROUTE", {"fromNode": HUD_SENSOR, "fromField": "position_changed",
                          "toNode": HUD_ROOT, "toField": "set_translation"}),
        element("ROUTE", {"fromNode": HUD_SENSOR, "fromField": "orientation_changed",
                          "toNode": HUD_ROOT, "toField": "set_rotation"}),
    ]


FrameLayouts = dict[int, tuple[Rect, dict[int, ComputedLayout]]]


def desktop_layouts(tree: WidgetTree, viewport: Size = DEFAULT_VIEWPORT) -> FrameLayouts:
    """Initial frame rects and the nested layouts of each frame's content."""
    scene = Scene(tree)
    state = initial_state(scene, viewport)
    return {fid: (fs.rect, _layouts_for(scene, fs)) for fid, fs in state.frames.items()}


def _layouts_for(scene: Scene, fs: FrameState) -> dict[int, ComputedLayout]:
    content = scene.content_rect(fs.rect)
    return scene.layout(fs.id, (content.w, content.h))


def emit_scene(tree: WidgetTree, layouts: FrameLayouts | None, config: EmitConfig = EmitConfig()) -> X3DDocument:
    """Compile a validated, numbered tree into an X3D document."""
    report = validate_tree(tree)
    if not report.ok:
        raise EmitError(f"tree does not validate:\n{report}")
    if any(n.id < 0 for n in tree.walk()):
        raise EmitError("tree has no ids; run assign_ids first")
    if layouts is None:
        layouts = desktop_layouts(tree, config.viewport)
    missing = [r.id for r in tree.roots if r.id not in layouts]
    if missing:
        raise EmitError(f"missing layout for frames {missing}")
    em = _Emitter(tree, {r.id: layouts[r.id] for r in tree.roots}, config)
    display = em.display()
    if tree.settings.debug:
        log.debug("emitted %d prototype kinds", len(em.ifaces.fields))
    scene = element("Scene")
    for decl in emit_extern_protos(em.ifaces.fields, config.library_url, em.ifaces.fields):
        scene.append(decl)
    for node in emit_hud_rig(config, display):
        scene.append(node)
    head = element("head", {}, element("meta", {"name": "generator", "content": "x3dui"}))
    root = element("X3D", {"profile": "Immersive", "version": "3.2"}, head, scene)
    return X3DDocument(root, DOCTYPE)


def serialize_xml(doc: X3DDocument, pretty: bool = True) -> str:
    return serialize(doc, pretty=pretty)


def instantiated_kinds(doc: X3DDocument | X3DNode) -> set[str]:
    root = doc.root if isinstance(doc, X3DDocument) else doc
    return {n.attrs["name"] for n in root.iter("ProtoInstance") if "name" in n.attrs}


def declared_kinds(doc: X3DDocument | X3DNode) -> set[str]:
    root = doc.root if isinstance(doc, X3DDocument) else doc
    return {n.attrs["name"] for n in root.iter("ExternProtoDeclare")}
