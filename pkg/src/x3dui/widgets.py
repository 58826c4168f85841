"""Widget catalog, UIDL front-end, structural validation and id assignment."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Any, Callable, Iterator, Mapping

from .xmltree import X3DNode, XMLSyntaxError, parse_xml

log = logging.getLogger("x3dui")


class Category(Enum):
    SYSTEM = "system"
    VISUAL = "visual"
    GROUP = "group"
    LAYOUT = "layout"


class WidgetKind(Enum):
    DISPLAY = ("Display", Category.SYSTEM)
    SETTINGS = ("Settings", Category.SYSTEM)
    RECTANGLE = ("Rectangle", Category.VISUAL)
    LAYER = ("Layer", Category.VISUAL)
    PLANE = ("Plane", Category.VISUAL)
    BUTTON = ("Button", Category.VISUAL)
    TOGGLE_BUTTON = ("ToggleButton", Category.VISUAL)
    TEXT_BUTTON = ("TextButton", Category.VISUAL)
    TEXT_TOGGLE_BUTTON = ("TextToggleButton", Category.VISUAL)
    CHECK_BOX = ("CheckBox", Category.VISUAL)
    RADIO_BUTTON = ("RadioButton", Category.VISUAL)
    CONTROL_BUTTON = ("ControlButton", Category.VISUAL)
    LABEL = ("Label", Category.VISUAL)
    TEXT_FIELD = ("TextField", Category.VISUAL)
    COMBO_BOX = ("ComboBox", Category.VISUAL)
    HORIZONTAL_SLIDER = ("HorizontalSlider", Category.VISUAL)
    HORIZONTAL_RUNNER = ("HorizontalRunner", Category.VISUAL)
    PANEL = ("Panel", Category.VISUAL)
    TAB_PANEL = ("TabPanel", Category.VISUAL)
    FRAME = ("Frame", Category.VISUAL)
    TASK_BAR = ("TaskBar", Category.VISUAL)
    RADIO_BUTTON_GROUP = ("RadioButtonGroup", Category.GROUP)
    LAYOUT_MANAGER = ("LayoutManager", Category.LAYOUT)
    BORDER_LAYOUT = ("BorderLayout", Category.LAYOUT)
    BOX_LAYOUT = ("BoxLayout", Category.LAYOUT)
    GRID_LAYOUT = ("GridLayout", Category.LAYOUT)
    FLOW_LAYOUT = ("FlowLayout", Category.LAYOUT)

    def __init__(self, proto: str, category: Category):
        self.proto = proto
        self.category = category

    @classmethod
    def from_name(cls, name: str) -> WidgetKind:
        return _BY_NAME[name]

    def __repr__(self) -> str:
        return f"<{self.proto}>"


_BY_NAME = {k.proto: k for k in WidgetKind}

# structural wrapper for TabPanel pages; not a library prototype
TAB = "Tab"

K = WidgetKind
CONTAINERS = frozenset({K.FRAME, K.PANEL, K.RECTANGLE, K.LAYER, K.PLANE})
TOGGLES = frozenset({K.TOGGLE_BUTTON, K.TEXT_TOGGLE_BUTTON})
TEXT_KINDS = frozenset(
    {K.TEXT_BUTTON, K.TEXT_TOGGLE_BUTTON, K.CHECK_BOX, K.RADIO_BUTTON, K.LABEL,
     K.TEXT_FIELD, K.COMBO_BOX, K.HORIZONTAL_SLIDER, K.FRAME}
)
LAYOUT_KINDS = {
    "border": K.BORDER_LAYOUT,
    "box": K.BOX_LAYOUT,
    "grid": K.GRID_LAYOUT,
    "flow": K.FLOW_LAYOUT,
}
CONTROL_TYPES = ("MINIMIZE", "MAXIMIZE", "NORMALIZE", "CLOSE")
REGIONS = ("NORTH", "SOUTH", "WEST", "EAST", "CENTER")


# --------------------------------------------------------------------------
# settings and text metrics


@dataclass(frozen=True)
class Settings:
    active_frame_color: str = "0.2 0.35 0.7"
    inactive_frame_color: str = "0.5 0.5 0.55"
    button_color: str = "0.8 0.8 0.8"
    text_color: str = "0 0 0"
    font_size: float = 10.0
    hgap: float = 5.0
    vgap: float = 5.0
    debug: bool = False
    image_path: str = "images/"

    def __post_init__(self):
        if self.font_size <= 0:
            raise ValueError("fontSize must be positive")
        if self.hgap < 0 or self.vgap < 0:
            raise ValueError("gaps must be non-negative")

    @property
    def char_width(self) -> float:
        return 0.6 * self.font_size

    @property
    def line_height(self) -> float:
        return 1.2 * self.font_size


THEME_KEYS = {
    "activeFrameColor": "active_frame_color",
    "inactiveFrameColor": "inactive_frame_color",
    "buttonColor": "button_color",
    "textColor": "text_color",
    "fontSize": "font_size",
    "hgap": "hgap",
    "vgap": "vgap",
    "DEBUG": "debug",
    "imagePath": "image_path",
}


def settings_from_mapping(values: Mapping[str, str], base: Settings | None = None) -> Settings:
    """Build Settings from theme-style keys (``fontSize``, ``DEBUG``, ...)."""
    base = base or Settings()
    types = {f.name: f.type for f in fields(Settings)}
    changes: dict[str, Any] = {}
    for key, raw in values.items():
        if key not in THEME_KEYS:
            raise ValueError(f"unknown theme key {key!r}")
        attr = THEME_KEYS[key]
        kind = types[attr]
        if kind == "float":
            changes[attr] = float(raw)
        elif kind == "bool":
            changes[attr] = _parse_bool(raw)
        else:
            changes[attr] = raw
    return replace(base, **changes)


def load_theme(path: str | Path, base: Settings | None = None) -> Settings:
    """Read a flat ``key=value`` theme file. ``#`` starts a comment line."""
    values = {}
    for num, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{num}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return settings_from_mapping(values, base)


ELLIPSIS = "..."


def measure_text(text: str, font_size: float) -> tuple[float, float]:
    if font_size <= 0:
        raise ValueError("font size must be positive")
    return 0.6 * font_size * len(text), 1.2 * font_size


def ellipsize_lines(
    lines: list[str], max_width: float, font_size: float
) -> tuple[list[str], float, float]:
    """Truncate overlong lines with an ellipsis.

    Returns the new lines plus the component width and height. The width
    grows past ``max_width`` only when not even the ellipsis fits.
    """
    char_w = 0.6 * font_size
    # tolerate float noise in width = k * char_w
    budget = math.floor(max_width / char_w + 1e-9)
    width = max_width
    out = []
    for line in lines:
        if len(line) <= budget:
            out.append(line)
        elif budget >= len(ELLIPSIS):
            out.append(line[: budget - len(ELLIPSIS)] + ELLIPSIS)
        else:
            out.append(ELLIPSIS)
            width = max(width, len(ELLIPSIS) * char_w)
    return out, width, len(lines) * 1.2 * font_size


# --------------------------------------------------------------------------
# tree


@dataclass(frozen=True)
class WidgetNode:
    kind: WidgetKind | str
    props: Mapping[str, Any] = field(default_factory=dict)
    children: tuple[WidgetNode, ...] = ()
    id: int = -1
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "props", MappingProxyType(dict(self.props)))
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def name(self) -> str:
        return self.kind if isinstance(self.kind, str) else self.kind.proto

    def get(self, key: str, default: Any = None) -> Any:
        return self.props.get(key, default)

    def walk(self) -> Iterator[WidgetNode]:
        yield self
        for child in self.children:
            yield from child.walk()

    def __repr__(self) -> str:
        return f"WidgetNode({self.name}#{self.id}, children={len(self.children)})"


@dataclass(frozen=True)
class WidgetTree:
    """Desktop: the implicit Display (id 0) owning the root-level nodes."""

    roots: tuple[WidgetNode, ...] = ()
    settings: Settings = Settings()
    image_path: str | None = None

    def walk(self) -> Iterator[WidgetNode]:
        for root in self.roots:
            yield from root.walk()

    def by_id(self) -> dict[int, WidgetNode]:
        return {n.id: n for n in self.walk()}

    def parents(self) -> dict[int, WidgetNode]:
        out = {}
        for node in self.walk():
            for child in node.children:
                out[child.id] = node
        return out

    def by_name(self) -> dict[str, WidgetNode]:
        return {n.props["name"]: n for n in self.walk() if "name" in n.props}


# --------------------------------------------------------------------------
# attribute schema


class UIDLError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})" if line else message)
        self.line = line
        self.column = column


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _positive(raw: str) -> float:
    value = float(raw)
    if not value > 0:
        raise ValueError("must be > 0")
    return value


def _non_negative(raw: str) -> float:
    value = float(raw)
    if value < 0:
        raise ValueError("must be >= 0")
    return value


def _unit(raw: str) -> float:
    value = float(raw)
    if not 0 <= value <= 1:
        raise ValueError("must be within [0, 1]")
    return value


def _count(raw: str) -> int:
    value = int(raw)
    if value < 0:
        raise ValueError("must be >= 0")
    return value


def _at_least_one(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise ValueError("must be >= 1")
    return value


def _choice(*options: str) -> Callable[[str], str]:
    def check(raw: str) -> str:
        if raw not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return raw

    return check


def _color(raw: str) -> str:
    parts = raw.split()
    if len(parts) != 3 or not all(0 <= float(p) <= 1 for p in parts):
        raise ValueError("expected three components in [0, 1]")
    return " ".join(parts)


def _items(raw: str) -> tuple[str, ...]:
    return tuple(item.strip() for item in raw.split("|")) if raw else ()


RECT_ATTRS: dict[str, Callable[[str], Any]] = {
    "name": str,
    "width": _positive,
    "height": _positive,
    "color": _color,
    "transparency": _unit,
    "border": _choice("lowered", "raised", "edging", "none"),
    "visible": _parse_bool,
    "region": _choice(*REGIONS),
}
LAYOUT_ATTRS: dict[str, Callable[[str], Any]] = {
    "layout": _choice(*LAYOUT_KINDS),
    "hgap": _non_negative,
    "vgap": _non_negative,
    "gap": _non_negative,
    "rows": _at_least_one,
    "cols": _at_least_one,
    "orientation": _choice("row", "column"),
    "hAlign": _choice("left", "center", "right"),
    "vAlign": _choice("top", "center", "bottom"),
    "compressHorizontally": _parse_bool,
    "compressVertically": _parse_bool,
}
TEXT_ATTRS = {"text": str, "fontSize": _positive}

SCHEMA: dict[WidgetKind | str, dict[str, Callable[[str], Any]]] = {
    K.DISPLAY: {"imagePath": str},
    K.SETTINGS: {key: str for key in THEME_KEYS},
    K.RECTANGLE: {**RECT_ATTRS, **LAYOUT_ATTRS},
    K.LAYER: {**RECT_ATTRS, **LAYOUT_ATTRS, "x": float, "y": float},
    K.PLANE: {**RECT_ATTRS, **LAYOUT_ATTRS, "x": float, "y": float},
    K.BUTTON: dict(RECT_ATTRS),
    K.TOGGLE_BUTTON: {**RECT_ATTRS, "pressed": _parse_bool},
    K.TEXT_BUTTON: {**RECT_ATTRS, **TEXT_ATTRS},
    K.TEXT_TOGGLE_BUTTON: {**RECT_ATTRS, **TEXT_ATTRS, "pressed": _parse_bool},
    K.CHECK_BOX: {**RECT_ATTRS, **TEXT_ATTRS, "checked": _parse_bool},
    K.RADIO_BUTTON: {**RECT_ATTRS, **TEXT_ATTRS, "checked": _parse_bool},
    K.CONTROL_BUTTON: {"name": str, "type": _choice(*CONTROL_TYPES)},
    K.LABEL: {**RECT_ATTRS, **TEXT_ATTRS, "justify": _choice("begin", "middle", "end")},
    K.TEXT_FIELD: {**RECT_ATTRS, **TEXT_ATTRS, "maxLength": _count},
    K.COMBO_BOX: {**RECT_ATTRS, **TEXT_ATTRS, "items": _items, "selected": int},
    K.HORIZONTAL_SLIDER: {
        **RECT_ATTRS,
        "fontSize": _positive,
        "min": float,
        "max": float,
        "value": float,
        "intervals": _count,
        "showMarks": _parse_bool,
        "discrete": _parse_bool,
        "leftCaption": str,
        "rightCaption": str,
    },
    K.HORIZONTAL_RUNNER: {"name": str, "color": _color, "transparency": _unit},
    K.PANEL: {**RECT_ATTRS, **LAYOUT_ATTRS},
    K.TAB_PANEL: dict(RECT_ATTRS),
    TAB: {"name": str, "title": str, **LAYOUT_ATTRS},
    K.FRAME: {
        **RECT_ATTRS,
        **LAYOUT_ATTRS,
        "title": str,
        "x": float,
        "y": float,
        "resizable": _parse_bool,
        "floating": _parse_bool,
        "fontSize": _positive,
    },
    K.TASK_BAR: {"name": str},
    K.RADIO_BUTTON_GROUP: {"name": str},
    K.LAYOUT_MANAGER: {},
    K.BORDER_LAYOUT: {"hgap": _non_negative, "vgap": _non_negative},
    K.BOX_LAYOUT: {
        "orientation": _choice("row", "column"),
        "hAlign": _choice("left", "center", "right"),
        "vAlign": _choice("top", "center", "bottom"),
        "gap": _non_negative,
    },
    K.GRID_LAYOUT: {
        "rows": _at_least_one,
        "cols": _at_least_one,
        "hgap": _non_negative,
        "vgap": _non_negative,
        "compressHorizontally": _parse_bool,
        "compressVertically": _parse_bool,
    },
    K.FLOW_LAYOUT: {"hgap": _non_negative, "vgap": _non_negative},
}


# --------------------------------------------------------------------------
# parsing


def _convert(xml: X3DNode) -> WidgetNode:
    if xml.name == TAB:
        kind: WidgetKind | str = TAB
    else:
        try:
            kind = WidgetKind.from_name(xml.name)
        except KeyError:
            raise UIDLError(f"unknown element {xml.name}", xml.line, xml.column) from None
    schema = SCHEMA[kind]
    props: dict[str, Any] = {}
    for key, raw in xml.attrs.items():
        if key not in schema:
            raise UIDLError(f"unknown attribute {key!r} on {xml.name}", xml.line, xml.column)
        try:
            props[key] = schema[key](raw)
        except ValueError as exc:
            raise UIDLError(
                f"attribute {key!r} on {xml.name}: {exc}", xml.line, xml.column
            ) from None
    children = []
    for child in xml.children:
        if child.is_element:
            children.append(_convert(child))
        elif child.name != "#comment":
            raise UIDLError(f"unexpected text inside {xml.name}", xml.line, xml.column)
    # a child layout element is folded into the container's props
    if kind in CONTAINERS or kind == TAB:
        layouts = [c for c in children if isinstance(c.kind, WidgetKind)
                   and c.kind.category is Category.LAYOUT and c.kind is not K.LAYOUT_MANAGER]
        if len(layouts) == 1 and "layout" not in props:
            lay = layouts[0]
            children.remove(lay)
            props["layout"] = next(k for k, v in LAYOUT_KINDS.items() if v is lay.kind)
            props.update(lay.props)
    if (kind in CONTAINERS or kind == TAB) and "layout" not in props:
        props["layout"] = "flow"
    return WidgetNode(kind, props, tuple(children), line=xml.line, column=xml.column)


def parse_ui_spec(source: str | bytes) -> WidgetTree:
    """Parse UIDL text.

    The document element is either ``<Display>`` (optionally holding a
    ``<Settings>`` element) or a single desktop-level widget.
    """
    try:
        doc = parse_xml(source)
    except XMLSyntaxError as exc:
        raise UIDLError(f"malformed XML: {exc.args[0].split(' (line')[0]}", exc.line, exc.column) from None
    root = doc.root
    settings = Settings()
    image_path = None
    if root.name == K.DISPLAY.proto:
        display = _convert(root)
        image_path = display.get("imagePath")
        roots = []
        seen_settings = False
        for child in display.children:
            if child.kind is K.SETTINGS:
                if seen_settings:
                    raise UIDLError("Settings is a singleton; declared twice", child.line, child.column)
                seen_settings = True
                try:
                    settings = settings_from_mapping(child.props, settings)
                except ValueError as exc:
                    raise UIDLError(f"Settings: {exc}", child.line, child.column) from None
            else:
                roots.append(child)
    else:
        roots = [_convert(root)]
    if image_path:
        settings = replace(settings, image_path=image_path)
    return WidgetTree(tuple(roots), settings, image_path)


def parse_ui_file(path: str | Path) -> WidgetTree:
    return parse_ui_spec(Path(path).read_bytes())


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    line: int = 0

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line else ""
        return f"{where}[{self.rule}] {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def add(self, rule: str, message: str, node: WidgetNode | None = None) -> None:
        self.violations.append(Violation(rule, message, node.line if node else 0))

    def __str__(self) -> str:
        return "\n".join(map(str, self.violations)) or "ok"


LEAVES = frozenset(
    {K.BUTTON, K.TOGGLE_BUTTON, K.TEXT_BUTTON, K.TEXT_TOGGLE_BUTTON, K.CHECK_BOX,
     K.RADIO_BUTTON, K.CONTROL_BUTTON, K.LABEL, K.TEXT_FIELD, K.COMBO_BOX,
     K.HORIZONTAL_RUNNER}
)
IMPLICIT = frozenset({K.DISPLAY, K.SETTINGS, K.TASK_BAR, K.LAYOUT_MANAGER})


def validate_tree(tree: WidgetTree) -> ValidationReport:
    """Collect every structural rule violation; an empty report means compilable."""
    report = ValidationReport()
    for root in tree.roots:
        if root.kind is not K.FRAME:
            report.add("root-frame", f"root must be Frame, found {root.name}", root)
    names: dict[str, WidgetNode] = {}
    for root in tree.roots:
        _check(root, None, report, names)
    return report


def _check(node: WidgetNode, parent: WidgetNode | None, report: ValidationReport,
           names: dict[str, WidgetNode]) -> None:
    kind = node.kind
    name = node.get("name")
    if name is not None:
        if name in names:
            report.add("unique-name", f"duplicate name {name!r}", node)
        names[name] = node
    parent_kind = parent.kind if parent else None

    if kind in IMPLICIT:
        report.add("implicit", f"{node.name} is synthesized and cannot be declared", node)
    if isinstance(kind, WidgetKind) and kind.category is Category.LAYOUT and kind not in IMPLICIT:
        report.add("layout-placement", f"{node.name} must be the only layout of a container", node)
    if kind is K.FRAME and parent is not None:
        report.add("root-frame", "Frame is only allowed at the desktop root", node)
    if kind is K.CONTROL_BUTTON and parent_kind is not K.FRAME:
        report.add("control-button", "ControlButton belongs in a Frame header", node)
    if kind is K.RADIO_BUTTON and parent_kind is not K.RADIO_BUTTON_GROUP:
        report.add("radio-group", "RadioButton must sit under a RadioButtonGroup", node)
    if kind is K.HORIZONTAL_RUNNER and parent_kind is not K.HORIZONTAL_SLIDER:
        report.add("runner", "HorizontalRunner only under HorizontalSlider", node)
    if kind == TAB and parent_kind is not K.TAB_PANEL:
        report.add("tab-panel", "Tab wrappers only under TabPanel", node)
    if (parent is not None and "region" in node.props
            and parent_kind is not K.RADIO_BUTTON_GROUP and parent.get("layout") != "border"):
        report.add("region", f"region tag on {node.name} outside a border layout", node)

    if kind is K.FRAME:
        controls = [c.get("type") for c in node.children if c.kind is K.CONTROL_BUTTON]
        if len(controls) > 3:
            report.add("control-button", "at most three control buttons per Frame", node)
        if "MAXIMIZE" in controls and "NORMALIZE" in controls:
            report.add("maximize-normalize", "MAXIMIZE and NORMALIZE must not be declared together", node)
        if len(set(controls)) != len(controls):
            report.add("control-button", "duplicate control button subtype", node)
        if any(c.get("type") is None for c in node.children if c.kind is K.CONTROL_BUTTON):
            report.add("control-button", "ControlButton needs a type", node)
    if kind in LEAVES and node.children:
        report.add("leaf", f"{node.name} cannot have children", node)
    if kind is K.HORIZONTAL_SLIDER:
        if any(c.kind is not K.HORIZONTAL_RUNNER for c in node.children):
            report.add("runner", "HorizontalSlider may only hold a HorizontalRunner", node)
        if sum(c.kind is K.HORIZONTAL_RUNNER for c in node.children) > 1:
            report.add("runner", "at most one HorizontalRunner", node)
    if kind is K.TAB_PANEL:
        if not node.children:
            report.add("tab-panel", "TabPanel needs at least one Tab", node)
        for child in node.children:
            if child.kind != TAB:
                report.add("tab-panel", f"TabPanel children must be Tab, found {child.name}", child)
    if kind is K.RADIO_BUTTON_GROUP:
        radios = [c for c in node.children if c.kind is K.RADIO_BUTTON]
        if not radios:
            report.add("radio-group", "RadioButtonGroup needs at least one RadioButton", node)
        if sum(bool(r.get("checked")) for r in radios) > 1:
            report.add("radio-group", "more than one RadioButton declared checked", node)
        for child in node.children:
            if child.kind is not K.RADIO_BUTTON:
                report.add("radio-group", f"RadioButtonGroup holds only RadioButtons, found {child.name}", child)
    if kind is K.COMBO_BOX and "selected" in node.props:
        if not 0 <= node.get("selected") < len(node.get("items", ())):
            report.add("combo-box", "selected index outside items", node)
    if node.get("layout") == "border":
        seen = set()
        for child in _layout_children(node):
            region = child.get("region", "CENTER")
            if region in seen:
                report.add("region", f"region {region} used twice", child)
            seen.add(region)

    for child in node.children:
        _check(child, node, report, names)


def _layout_children(node: WidgetNode) -> list[WidgetNode]:
    out = []
    for child in node.children:
        if child.kind is K.RADIO_BUTTON_GROUP:
            out.extend(_layout_children(child))
        elif child.kind is not K.CONTROL_BUTTON:
            out.append(child)
    return out


def layout_children(node: WidgetNode) -> list[WidgetNode]:
    """Children that take part in ``node``'s layout.

    RadioButtonGroup is transparent (its radios are laid out in place) and
    ControlButtons live in the Frame header.
    """
    return _layout_children(node)


# --------------------------------------------------------------------------
# ids


def assign_ids(tree: WidgetTree) -> WidgetTree:
    """Pre-order ids from 1; the implicit Display owns 0."""
    counter = iter(range(1, 1 << 62))

    def number(node: WidgetNode) -> WidgetNode:
        own = next(counter)
        kids = tuple(number(c) for c in node.children)
        return replace(node, id=own, children=kids)

    roots = tuple(number(r) for r in tree.roots)
    if tree.settings.debug:
        log.debug("assigned %d ids", sum(1 for _ in WidgetTree(roots).walk()))
    return replace(tree, roots=roots)


DISPLAY_ID = 0


def compile_tree(source: str | bytes, settings: Settings | None = None) -> tuple[WidgetTree, ValidationReport]:
    """Parse, validate and number a UIDL document in one step."""
    tree = parse_ui_spec(source)
    if settings is not None:
        tree = replace(tree, settings=settings)
    report = validate_tree(tree)
    return assign_ids(tree), report
