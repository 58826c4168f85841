"""Headless desktop: hit testing, event dispatch and widget state machines.

Everything here is a pure function of its inputs. ``dispatch`` takes a
:class:`DesktopState` and returns a new one together with the notifications
the widgets emitted, so an event script can be replayed byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Iterator, Union

from . import layout as lay
from .layout import PAD_X, PAD_Y, Rect, Size
from .widgets import CONTROL_TYPES, TAB, K, TOGGLES, WidgetNode, WidgetTree, measure_text

EDGE = 4.0
BAND_WIDTH = 150.0
DEFAULT_VIEWPORT = (800.0, 600.0)

NORMAL = "normal"
MINIMIZED = "minimized"
MAXIMIZED = "maximized"
CLOSED = "closed"


# --------------------------------------------------------------------------
# events


@dataclass(frozen=True)
class MouseDown:
    x: float
    y: float


@dataclass(frozen=True)
class MouseUp:
    x: float
    y: float


@dataclass(frozen=True)
class MouseDrag:
    x: float
    y: float


@dataclass(frozen=True)
class KeyPress:
    key: str


@dataclass(frozen=True)
class ViewportResize:
    width: float
    height: float


UiEvent = Union[MouseDown, MouseUp, MouseDrag, KeyPress, ViewportResize]
NAMED_KEYS = ("Backspace", "Enter", "Escape", "Home", "End", "Left", "Right")


@dataclass(frozen=True)
class Output:
    event: str
    id: int
    value: Any = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"event": self.event, "id": self.id}
        if self.value is not None:
            out["value"] = self.value
        return out


# --------------------------------------------------------------------------
# state


@dataclass(frozen=True)
class ButtonState:
    id: int
    pressed: bool = False


@dataclass(frozen=True)
class ToggleState:
    id: int
    on: bool = False
    check_box: bool = False


@dataclass(frozen=True)
class RadioGroupState:
    id: int
    members: tuple[int, ...]
    selected: int


@dataclass(frozen=True)
class TextFieldState:
    id: int
    text: str = ""
    cursor: int = 0
    offset: int = 0
    max_length: int | None = None
    visible_chars: int = 10
    editing: bool = False

    @property
    def visible_text(self) -> str:
        return self.text[self.offset:self.offset + self.visible_chars]


@dataclass(frozen=True)
class SliderState:
    id: int
    minimum: float = 0.0
    maximum: float = 100.0
    value: float = 0.0
    intervals: int = 0
    discrete: bool = False
    track_x: float = PAD_X
    track_w: float = 100.0

    @property
    def disabled(self) -> bool:
        return self.minimum == self.maximum

    @property
    def bounds(self) -> tuple[float, float]:
        return min(self.minimum, self.maximum), max(self.minimum, self.maximum)

    def runner_x(self) -> float:
        if self.disabled:
            return self.track_x
        t = (self.value - self.minimum) / (self.maximum - self.minimum)
        return self.track_x + t * self.track_w


@dataclass(frozen=True)
class ComboState:
    id: int
    items: tuple[str, ...] = ()
    selected: int = -1
    text: str = ""
    open: bool = False


@dataclass(frozen=True)
class TabPanelState:
    id: int
    tabs: tuple[int, ...]
    active: int = 0


@dataclass(frozen=True)
class FrameState:
    id: int
    rect: Rect
    status: str = NORMAL
    saved: Rect | None = None
    restore: str = NORMAL
    declared: tuple[str, ...] = ()
    resizable: bool = True
    floating: bool = True

    @property
    def controls(self) -> tuple[str, ...]:
        """Visible header buttons; the maximize slot follows the status."""
        out = []
        for kind in CONTROL_TYPES:
            if kind in ("MAXIMIZE", "NORMALIZE"):
                if kind == "MAXIMIZE" and ({"MAXIMIZE", "NORMALIZE"} & set(self.declared)):
                    out.append("NORMALIZE" if self.status == MAXIMIZED else "MAXIMIZE")
            elif kind in self.declared:
                out.append(kind)
        return tuple(out)

    @property
    def visible(self) -> bool:
        return self.status in (NORMAL, MAXIMIZED)


@dataclass(frozen=True)
class Band:
    frame: int
    pressed: bool = False


@dataclass(frozen=True)
class Hit:
    path: tuple[int, ...]
    part: str = "widget"
    frame: int | None = None
    index: int | None = None
    detail: str | None = None

    @property
    def target(self) -> int | None:
        return self.path[-1] if self.path else None

    def same(self, other: Hit | None) -> bool:
        return other is not None and (self.path, self.part, self.index, self.detail) == (
            other.path, other.part, other.index, other.detail)


@dataclass(frozen=True)
class Drag:
    mode: str  # move | resize | slider
    target: int
    start: tuple[float, float]
    rect: Rect
    edge: str = ""


@dataclass(frozen=True)
class DesktopState:
    viewport: tuple[float, float]
    frames: dict[int, FrameState]
    stack: tuple[int, ...]
    bands: tuple[Band, ...]
    active: int | None = None
    widgets: dict[int, Any] = field(default_factory=dict)
    focus: int | None = None
    pressed: Hit | None = None
    drag: Drag | None = None

    def frame(self, frame_id: int) -> FrameState:
        return self.frames[frame_id]

    def with_widget(self, ws: Any) -> DesktopState:
        return replace(self, widgets={**self.widgets, ws.id: ws})

    def with_frame(self, fs: FrameState) -> DesktopState:
        return replace(self, frames={**self.frames, fs.id: fs})


# --------------------------------------------------------------------------
# scene: static structure plus cached layouts


class Scene:
    """Compiled widget tree with lazily computed, size-keyed frame layouts."""

    def __init__(self, tree: WidgetTree):
        self.tree = tree
        self.settings = tree.settings
        self.nodes = tree.by_id()
        self.parents = tree.parents()
        self.frames = {r.id: r for r in tree.roots if r.kind is K.FRAME}
        self.header = lay.header_height(self.settings)
        self._layouts: dict[tuple[int, float, float], dict[int, lay.ComputedLayout]] = {}
        self._rects: dict[tuple[int, Rect], dict[int, Rect]] = {}

    def frame_of(self, widget_id: int) -> int:
        node_id = widget_id
        while node_id in self.parents:
            node_id = self.parents[node_id].id
        return node_id

    def content_size(self, frame_id: int) -> Size:
        """Initial content size; undeclared widths also fit the title bar."""
        frame = self.frames[frame_id]
        w, h = lay.container_size(frame, self.settings)
        if "width" not in frame.props:
            w = max(w, self.title_bar_width(frame_id))
        return w, h

    def title_bar_width(self, frame_id: int) -> float:
        frame = self.frames[frame_id]
        text_w, _ = measure_text(frame.get("title", ""), lay.font_size(frame, self.settings))
        n = sum(1 for c in frame.children if c.kind is K.CONTROL_BUTTON)
        return text_w + 2 * PAD_X + n * (self.settings.line_height + PAD_Y)

    def layout(self, frame_id: int, size: Size) -> dict[int, lay.ComputedLayout]:
        key = (frame_id, size[0], size[1])
        if key not in self._layouts:
            self._layouts[key] = lay.layout_tree(self.frames[frame_id], size, self.settings)
        return self._layouts[key]

    def content_rect(self, rect: Rect) -> Rect:
        return Rect(rect.x, rect.y + self.header, rect.w, max(rect.h - self.header, 0.0))

    def widget_rects(self, frame_id: int, rect: Rect) -> dict[int, Rect]:
        """Absolute viewport rects for every laid-out widget of a frame."""
        key = (frame_id, rect)
        if key in self._rects:
            return self._rects[key]
        content = self.content_rect(rect)
        layouts = self.layout(frame_id, (content.w, content.h))
        out: dict[int, Rect] = {frame_id: rect}

        def place(node_id: int, ox: float, oy: float) -> None:
            computed = layouts.get(node_id)
            if computed is None:
                return
            for child_id, r in computed.placements.items():
                out[child_id] = r.moved(ox, oy)
                place(child_id, ox + r.x, oy + r.y)

        place(frame_id, content.x, content.y)
        if len(self._rects) > 4096:
            self._rects.clear()
        self._rects[key] = out
        return out

    def control_rects(self, fs: FrameState) -> dict[str, Rect]:
        size = self.settings.line_height
        out = {}
        x = fs.rect.right
        for kind in reversed(fs.controls):
            x -= size + PAD_Y
            out[kind] = Rect(x, fs.rect.y + PAD_Y, size, size)
        return out

    def control_id(self, frame_id: int, kind: str) -> int:
        for child in self.frames[frame_id].children:
            if child.kind is K.CONTROL_BUTTON:
                declared = child.get("type")
                if declared == kind or {declared, kind} == {"MAXIMIZE", "NORMALIZE"}:
                    return child.id
        raise KeyError(kind)

    def tab_headers(self, frame_id: int, rect: Rect, panel_id: int) -> dict[int, Rect]:
        layouts = self.layout(frame_id, (rect.w, max(rect.h - self.header, 0.0)))
        origin = self.widget_rects(frame_id, rect)[panel_id]
        return {tab: r.moved(origin.x, origin.y) for tab, r in layouts[panel_id].areas.items()}

    def item_height(self) -> float:
        return self.settings.line_height + 2 * PAD_Y

    def dropdown_rects(self, combo: Rect, count: int) -> list[Rect]:
        h = self.item_height()
        return [Rect(combo.x, combo.bottom + i * h, combo.w, h) for i in range(count)]


def taskbar_rect(viewport: tuple[float, float], scene: Scene) -> Rect:
    return Rect(0, viewport[1] - scene.header, viewport[0], scene.header)


def band_rects(state: DesktopState, scene: Scene) -> list[Rect]:
    bar = taskbar_rect(state.viewport, scene)
    n = len(state.bands)
    if not n:
        return []
    width = min(BAND_WIDTH, bar.w / n)
    return [Rect(i * width, bar.y, width, bar.h) for i in range(n)]


# --------------------------------------------------------------------------
# initial state


def layer_constrain(position: tuple[float, float], child: Size, viewport: Size) -> tuple[float, float]:
    """Clamp a floating layer so it stays fully on screen.

    An axis on which the child is larger than the viewport pins to 0.
    """
    out = []
    for pos, size, avail in zip(position, child, viewport):
        out.append(0.0 if size > avail else min(max(pos, 0.0), avail - size))
    return out[0], out[1]


def make_slider(node: WidgetNode, width: float) -> SliderState:
    lo = node.get("min", 0.0)
    hi = node.get("max", 100.0)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        lo, hi = 0.0, 0.0
    base = SliderState(
        node.id, lo, hi, lo, max(int(node.get("intervals", 0)), 0),
        bool(node.get("discrete", False)), PAD_X, max(width - 2 * PAD_X, 1.0),
    )
    return replace(base, value=_slider_value(base, node.get("value", lo)))


def make_text_field(node: WidgetNode, width: float, char_w: float) -> TextFieldState:
    max_len = node.get("maxLength")
    text = node.get("text", "")
    if max_len is not None:
        text = text[:max_len]
    visible = max(1, int((width - 2 * PAD_X) // char_w))
    return _scroll(TextFieldState(node.id, text, len(text), 0, max_len, visible))


def initial_state(scene: Scene, viewport: Size = DEFAULT_VIEWPORT) -> DesktopState:
    settings = scene.settings
    frames: dict[int, FrameState] = {}
    widgets: dict[int, Any] = {}
    for k, frame in enumerate(scene.frames.values()):
        w, h = scene.content_size(frame.id)
        outer = (w, h + scene.header)
        pos = (frame.get("x", 20.0 + 30.0 * k), frame.get("y", 20.0 + 30.0 * k))
        pos = layer_constrain(pos, outer, viewport)
        frames[frame.id] = FrameState(
            frame.id,
            Rect(pos[0], pos[1], *outer),
            declared=tuple(c.get("type") for c in frame.children if c.kind is K.CONTROL_BUTTON),
            resizable=frame.get("resizable", True),
            floating=frame.get("floating", True),
        )
        rects = scene.widget_rects(frame.id, frames[frame.id].rect)
        for node in frame.walk():
            kind = node.kind
            width = rects[node.id].w if node.id in rects else lay.measure_widget(node, settings)[0]
            if kind in (K.BUTTON, K.TEXT_BUTTON):
                widgets[node.id] = ButtonState(node.id)
            elif kind in TOGGLES:
                widgets[node.id] = ToggleState(node.id, bool(node.get("pressed", False)))
            elif kind is K.CHECK_BOX:
                widgets[node.id] = ToggleState(node.id, bool(node.get("checked", False)), True)
            elif kind is K.RADIO_BUTTON_GROUP:
                members = tuple(c.id for c in node.children if c.kind is K.RADIO_BUTTON)
                checked = [c.id for c in node.children if c.get("checked")]
                widgets[node.id] = RadioGroupState(node.id, members, (checked or members)[0])
            elif kind is K.TEXT_FIELD:
                fs = lay.font_size(node, settings)
                widgets[node.id] = make_text_field(node, width, 0.6 * fs)
            elif kind is K.HORIZONTAL_SLIDER:
                widgets[node.id] = make_slider(node, width)
            elif kind is K.COMBO_BOX:
                items = tuple(node.get("items", ()))
                sel = node.get("selected", -1)
                text = node.get("text", items[sel] if 0 <= sel < len(items) else "")
                widgets[node.id] = ComboState(node.id, items, sel, text)
            elif kind is K.TAB_PANEL:
                widgets[node.id] = TabPanelState(node.id, tuple(t.id for t in node.children))
    stack = tuple(frames)
    bands = tuple(Band(f) for f in frames)
    return DesktopState((float(viewport[0]), float(viewport[1])), frames, stack, bands, None, widgets)


# --------------------------------------------------------------------------
# hit testing


def render_order(scene: Scene, state: DesktopState, node: WidgetNode) -> list[WidgetNode]:
    """Layout children of ``node`` from back to front.

    Document order, except that ComboBoxes (whose drop-down may cover their
    siblings) and the active tab are raised above everything else.
    """
    if node.kind is K.TAB_PANEL:
        panel = state.widgets[node.id]
        kids = list(node.children)
        active = kids[panel.active]
        return [t for t in kids if t is not active] + [active]
    kids = lay.layout_children(node)
    plain = [k for k in kids if k.kind is not K.COMBO_BOX]
    return plain + [k for k in kids if k.kind is K.COMBO_BOX]


def _frame_regions(scene: Scene, state: DesktopState, fs: FrameState) -> Iterator[tuple[Rect, Hit]]:
    """Hit regions of a frame, back to front."""
    fid = fs.id
    rects = scene.widget_rects(fid, fs.rect)
    yield fs.rect, Hit((fid,), "body", fid)
    yield Rect(fs.rect.x, fs.rect.y, fs.rect.w, scene.header), Hit((fid,), "header", fid)
    for kind, r in scene.control_rects(fs).items():
        yield r, Hit((fid, scene.control_id(fid, kind)), "control", fid, detail=kind)

    combos: list[tuple[Rect, WidgetNode]] = []

    def content(node: WidgetNode, path: tuple[int, ...]) -> Iterator[tuple[Rect, Hit]]:
        for child in render_order(scene, state, node):
            if not child.get("visible", True) or child.id not in rects:
                continue
            sub = path + (child.id,)
            if child.kind == TAB:
                panel = state.widgets[node.id]
                if child.id != panel.tabs[panel.active]:
                    continue
            yield rects[child.id], Hit(sub, "widget", fid)
            if child.kind is K.TAB_PANEL:
                for i, (tab_id, r) in enumerate(scene.tab_headers(fid, fs.rect, child.id).items()):
                    yield r, Hit(sub + (tab_id,), "tab", fid, i)
            if child.kind is K.COMBO_BOX:
                combos.append((rects[child.id], child))
                continue
            yield from content(child, sub)

    yield from content(scene.frames[fid], (fid,))
    if fs.resizable and fs.status == NORMAL:
        r = fs.rect
        yield Rect(r.right - EDGE, r.y + scene.header, EDGE, r.h - scene.header), Hit((fid,), "edge", fid, detail="right")
        yield Rect(r.x, r.bottom - EDGE, r.w, EDGE), Hit((fid,), "edge", fid, detail="bottom")
        yield Rect(r.right - EDGE, r.bottom - EDGE, EDGE, EDGE), Hit((fid,), "edge", fid, detail="corner")
    for rect, combo in combos:
        cs = state.widgets[combo.id]
        if cs.open:
            path = _path_to(scene, combo.id)
            for i, r in enumerate(scene.dropdown_rects(rect, len(cs.items))):
                yield r, Hit(path, "item", fid, i)


def _path_to(scene: Scene, node_id: int) -> tuple[int, ...]:
    path = [node_id]
    while path[-1] in scene.parents:
        path.append(scene.parents[path[-1]].id)
    return tuple(reversed(path))


def hit_test(state: DesktopState, scene: Scene, point: tuple[float, float]) -> Hit | None:
    """Topmost target under ``point``: taskbar, then frames front to back."""
    x, y = point
    for i, r in enumerate(band_rects(state, scene)):
        if r.contains(x, y):
            return Hit((), "band", None, i)
    if taskbar_rect(state.viewport, scene).contains(x, y):
        return Hit((), "taskbar")
    for fid in reversed(state.stack):
        fs = state.frames[fid]
        if not fs.visible:
            continue
        found = None
        for rect, hit in _frame_regions(scene, state, fs):
            if rect.contains(x, y):
                found = hit
        if found is not None:
            return found
    return None


# --------------------------------------------------------------------------
# widget reducers


def toggle_widget(ws: ToggleState) -> tuple[ToggleState, list[Output]]:
    new = replace(ws, on=not ws.on)
    name = "statusChanged" if ws.check_box else "isPressed"
    return new, [Output(name, ws.id, new.on)]


def radio_select(group: RadioGroupState, member: int) -> tuple[RadioGroupState, list[Output]]:
    if member not in group.members:
        raise ValueError(f"{member} is not a member of radio group {group.id}")
    if member == group.selected:
        return group, []
    outputs = [Output("statusChanged", group.selected, False), Output("statusChanged", member, True)]
    return replace(group, selected=member), outputs


def combobox_step(combo: ComboState, action: str, index: int | None = None) -> tuple[ComboState, list[Output]]:
    """``action`` is ``open`` (toggles the list), ``select`` or ``dismiss``."""
    if action == "open":
        return replace(combo, open=not combo.open), []
    if action == "dismiss":
        return replace(combo, open=False), []
    if action == "select":
        if index is None or not 0 <= index < len(combo.items):
            raise IndexError(f"combo item {index} out of range")
        new = replace(combo, open=False, selected=index, text=combo.items[index])
        return new, [Output("selectionChanged", combo.id, index)]
    raise ValueError(f"unknown combo action {action!r}")


def tab_select(panel: TabPanelState, index: int) -> TabPanelState:
    if not 0 <= index < len(panel.tabs):
        raise IndexError(f"tab {index} out of range")
    return replace(panel, active=index)


def _scroll(tf: TextFieldState) -> TextFieldState:
    offset = tf.offset
    if tf.cursor < offset:
        offset = tf.cursor
    elif tf.cursor > offset + tf.visible_chars:
        offset = tf.cursor - tf.visible_chars
    offset = max(0, min(offset, max(len(tf.text) - tf.visible_chars, 0)))
    return replace(tf, offset=offset)


def textfield_key(tf: TextFieldState, key: str) -> tuple[TextFieldState, list[Output]]:
    text, cur = tf.text, tf.cursor
    if key in ("Enter", "Escape"):
        return replace(tf, editing=False), []
    if key == "Backspace":
        if cur == 0:
            return tf, []
        text, cur = text[: cur - 1] + text[cur:], cur - 1
    elif key == "Home":
        cur = 0
    elif key == "End":
        cur = len(text)
    elif key == "Left":
        cur = max(cur - 1, 0)
    elif key == "Right":
        cur = min(cur + 1, len(text))
    elif len(key) == 1 and key.isprintable():
        if tf.max_length is not None and len(text) >= tf.max_length:
            return tf, []
        text, cur = text[:cur] + key + text[cur:], cur + 1
    else:
        return tf, []
    new = _scroll(replace(tf, text=text, cursor=cur))
    return new, ([Output("textChanged", tf.id, text)] if text != tf.text else [])


def _snap(s: SliderState, value: float) -> float:
    span = s.maximum - s.minimum
    t = (value - s.minimum) / span * s.intervals
    k = math.floor(t)
    # ties go to the mark nearer the minimum
    if t - k > 0.5 + 1e-12:
        k += 1
    k = min(max(k, 0), s.intervals)
    if k == s.intervals:
        return s.maximum  # exact end mark; the sum below can round past it
    lo, hi = s.bounds
    return min(max(s.minimum + k * span / s.intervals, lo), hi)


def _slider_value(s: SliderState, value: float) -> float:
    if s.disabled or not math.isfinite(value):
        return s.minimum
    lo, hi = s.bounds
    value = min(max(value, lo), hi)
    if s.discrete and s.intervals > 0:
        value = _snap(s, value)
    return value


def slider_update(s: SliderState, value: float | None = None, drag_x: float | None = None) -> tuple[SliderState, list[Output]]:
    """Set a value directly or from a runner position (widget-local x)."""
    if drag_x is not None:
        if s.disabled:
            return s, []
        t = min(max((drag_x - s.track_x) / s.track_w, 0.0), 1.0)
        value = s.minimum + t * (s.maximum - s.minimum)
    if value is None:
        raise ValueError("slider_update needs a value or a drag position")
    new_value = _slider_value(s, value)
    if new_value == s.value:
        return s, []
    return replace(s, value=new_value), [Output("valueChanged", s.id, new_value)]


# --------------------------------------------------------------------------
# window management


def _sync_bands(state: DesktopState) -> DesktopState:
    bands = tuple(Band(b.frame, b.frame == state.active) for b in state.bands)
    return replace(state, bands=bands)


def _activate(state: DesktopState, frame_id: int) -> tuple[DesktopState, list[Output]]:
    fs = state.frames.get(frame_id)
    if fs is None or fs.status == CLOSED:
        raise KeyError(f"no open frame {frame_id}")
    outputs = []
    if fs.status == MINIMIZED:
        fs = replace(fs, status=fs.restore)
        state = state.with_frame(fs)
        outputs.append(Output("frameStatus", frame_id, fs.status))
    stack = tuple(f for f in state.stack if f != frame_id) + (frame_id,)
    changed = state.active != frame_id
    state = _sync_bands(replace(state, stack=stack, active=frame_id))
    if changed:
        outputs.insert(0, Output("frameActivated", frame_id))
    return state, outputs


def activate_frame(state: DesktopState, frame_id: int) -> DesktopState:
    """Make ``frame_id`` the single active frame and bring it to the front."""
    return _activate(state, frame_id)[0]


def _drop_frame_refs(state: DesktopState, frame_id: int, scene: Scene | None) -> DesktopState:
    def inside(wid: int | None) -> bool:
        return wid is not None and scene is not None and scene.frame_of(wid) == frame_id

    pressed = state.pressed
    if pressed is not None and pressed.frame == frame_id:
        pressed = None
    drag = state.drag
    if drag is not None and (drag.target == frame_id or inside(drag.target)):
        drag = None
    focus = None if inside(state.focus) else state.focus
    widgets = state.widgets
    if focus is None and state.focus is not None:
        tf = widgets[state.focus]
        widgets = {**widgets, tf.id: replace(tf, editing=False)}
    return replace(state, pressed=pressed, drag=drag, focus=focus, widgets=widgets)


def control_button_action(
    state: DesktopState, frame_id: int, subtype: str, scene: Scene | None = None
) -> tuple[DesktopState, list[Output]]:
    fs = state.frames[frame_id]
    if subtype not in fs.controls:
        raise ValueError(f"frame {frame_id} has no visible {subtype} button")
    vw, vh = state.viewport
    if subtype == "MINIMIZE":
        fs = replace(fs, status=MINIMIZED, restore=fs.status)
        state = state.with_frame(fs)
        if state.active == frame_id:
            state = _sync_bands(replace(state, active=None))
        state = _drop_frame_refs(state, frame_id, scene)
    elif subtype == "MAXIMIZE":
        fs = replace(fs, status=MAXIMIZED, saved=fs.rect, rect=Rect(0, 0, vw, vh))
        state = state.with_frame(fs)
    elif subtype == "NORMALIZE":
        saved = fs.saved or fs.rect
        pos = layer_constrain((saved.x, saved.y), (saved.w, saved.h), state.viewport)
        fs = replace(fs, status=NORMAL, rect=Rect(pos[0], pos[1], saved.w, saved.h), saved=None)
        state = state.with_frame(fs)
    elif subtype == "CLOSE":
        fs = replace(fs, status=CLOSED)
        state = state.with_frame(fs)
        state = replace(
            state,
            stack=tuple(f for f in state.stack if f != frame_id),
            bands=tuple(b for b in state.bands if b.frame != frame_id),
            active=None if state.active == frame_id else state.active,
        )
        state = _drop_frame_refs(_sync_bands(state), frame_id, scene)
    return state, [Output("frameStatus", frame_id, fs.status)]


def taskbar_click(state: DesktopState, band_index: int, scene: Scene | None = None) -> tuple[DesktopState, list[Output]]:
    if not 0 <= band_index < len(state.bands):
        raise IndexError(f"band {band_index} out of range")
    frame_id = state.bands[band_index].frame
    fs = state.frames[frame_id]
    if state.active == frame_id and fs.status != MINIMIZED:
        fs = replace(fs, status=MINIMIZED, restore=fs.status)
        state = _sync_bands(replace(state.with_frame(fs), active=None))
        return _drop_frame_refs(state, frame_id, scene), [Output("frameStatus", frame_id, MINIMIZED)]
    return _activate(state, frame_id)


def frame_resize_drag(
    state: DesktopState, scene: Scene, frame_id: int, edge: str, delta: tuple[float, float]
) -> DesktopState:
    """Resize a normal, resizable frame by dragging one of its edges."""
    fs = state.frames[frame_id]
    if not fs.resizable or fs.status != NORMAL:
        return state
    dx = delta[0] if edge in ("right", "corner") else 0.0
    dy = delta[1] if edge in ("bottom", "corner") else 0.0
    content = scene.content_rect(fs.rect)
    vw, vh = state.viewport
    requested = (
        min(content.w + dx, vw - fs.rect.x),
        min(content.h + dy, vh - fs.rect.y - scene.header),
    )
    w, h = lay.clamp_resize(scene.frames[frame_id], requested, scene.settings, (content.w, content.h))
    if (w, h) == (content.w, content.h):
        return state
    outer = (w, h + scene.header)
    pos = layer_constrain((fs.rect.x, fs.rect.y), outer, state.viewport)
    scene.layout(frame_id, (w, h))
    return state.with_frame(replace(fs, rect=Rect(pos[0], pos[1], *outer)))


def viewport_resize(state: DesktopState, width: float, height: float) -> DesktopState:
    viewport = (float(width), float(height))
    frames = {}
    for fid, fs in state.frames.items():
        if fs.status == MAXIMIZED:
            fs = replace(fs, rect=Rect(0, 0, *viewport))
        elif fs.status != CLOSED:
            pos = layer_constrain((fs.rect.x, fs.rect.y), (fs.rect.w, fs.rect.h), viewport)
            fs = replace(fs, rect=Rect(pos[0], pos[1], fs.rect.w, fs.rect.h))
        frames[fid] = fs
    return replace(state, viewport=viewport, frames=frames)


# --------------------------------------------------------------------------
# dispatch


def _end_editing(state: DesktopState) -> DesktopState:
    if state.focus is None:
        return state
    tf = state.widgets[state.focus]
    return replace(state.with_widget(replace(tf, editing=False)), focus=None)


def _close_dropdowns(state: DesktopState, keep: int | None) -> DesktopState:
    for ws in state.widgets.values():
        if isinstance(ws, ComboState) and ws.open and ws.id != keep:
            state = state.with_widget(combobox_step(ws, "dismiss")[0])
    return state


def _mouse_down(state: DesktopState, scene: Scene, ev: MouseDown) -> tuple[DesktopState, list[Output]]:
    hit = hit_test(state, scene, (ev.x, ev.y))
    target = hit.target if hit else None
    node = scene.nodes.get(target) if target is not None else None
    keep = target if node is not None and node.kind is K.COMBO_BOX else None
    state = _close_dropdowns(state, keep)
    if state.focus is not None and target != state.focus:
        state = _end_editing(state)
    state = replace(state, pressed=None, drag=None)
    if hit is None or hit.part == "taskbar":
        return state, []
    outputs: list[Output] = []
    if hit.frame is not None:
        state, outputs = _activate(state, hit.frame)
    fs = state.frames.get(hit.frame) if hit.frame is not None else None

    if hit.part in ("band", "control"):
        return replace(state, pressed=hit), outputs
    if hit.part == "header":
        if fs.floating and fs.status == NORMAL:
            state = replace(state, drag=Drag("move", fs.id, (ev.x, ev.y), fs.rect))
        return state, outputs
    if hit.part == "edge":
        return replace(state, drag=Drag("resize", fs.id, (ev.x, ev.y), fs.rect, hit.detail)), outputs
    if hit.part == "tab":
        panel_id = hit.path[-2]
        panel = state.widgets[panel_id]
        new = tab_select(panel, hit.index)
        if new != panel:
            outputs.append(Output("selectionChanged", panel_id, hit.index))
        return state.with_widget(new), outputs
    if hit.part == "item":
        combo, outs = combobox_step(state.widgets[target], "select", hit.index)
        return state.with_widget(combo), outputs + outs
    if hit.part != "widget" or node is None:
        return state, outputs

    kind = node.kind
    ws = state.widgets.get(target)
    if kind in (K.BUTTON, K.TEXT_BUTTON):
        state = state.with_widget(replace(ws, pressed=True))
        return replace(state, pressed=hit), outputs + [Output("isPressed", target, True)]
    if kind in TOGGLES or kind in (K.CHECK_BOX, K.RADIO_BUTTON):
        return replace(state, pressed=hit), outputs
    if kind is K.COMBO_BOX:
        combo, outs = combobox_step(ws, "open")
        return state.with_widget(combo), outputs + outs
    if kind is K.TEXT_FIELD:
        rect = scene.widget_rects(fs.id, fs.rect)[target]
        char_w = 0.6 * lay.font_size(node, scene.settings)
        col = ws.offset + round((ev.x - rect.x - PAD_X) / char_w)
        col = min(max(col, ws.offset), min(len(ws.text), ws.offset + ws.visible_chars))
        state = state.with_widget(replace(ws, editing=True, cursor=col))
        return replace(state, focus=target), outputs
    if kind is K.HORIZONTAL_SLIDER:
        rect = scene.widget_rects(fs.id, fs.rect)[target]
        slider, outs = slider_update(ws, drag_x=ev.x - rect.x)
        state = state.with_widget(slider)
        return replace(state, drag=Drag("slider", target, (ev.x, ev.y), rect)), outputs + outs
    return state, outputs


def _mouse_up(state: DesktopState, scene: Scene, ev: MouseUp) -> tuple[DesktopState, list[Output]]:
    pressed = state.pressed
    state = replace(state, pressed=None, drag=None)
    if pressed is None:
        return state, []
    hit = hit_test(state, scene, (ev.x, ev.y))
    same = pressed.same(hit)
    target = pressed.target
    if pressed.part == "band":
        if same and pressed.index < len(state.bands):
            return taskbar_click(state, pressed.index, scene)
        return state, []
    if pressed.part == "control":
        fs = state.frames.get(pressed.frame)
        if same and fs is not None and pressed.detail in fs.controls:
            return control_button_action(state, pressed.frame, pressed.detail, scene)
        return state, []
    node = scene.nodes[target]
    ws = state.widgets.get(target)
    if node.kind in (K.BUTTON, K.TEXT_BUTTON):
        state = state.with_widget(replace(ws, pressed=False))
        outputs = [Output("isPressed", target, False)]
        if same:
            outputs.append(Output("isClicked", target))
        return state, outputs
    if not same:
        return state, []
    if node.kind in TOGGLES or node.kind is K.CHECK_BOX:
        new, outputs = toggle_widget(ws)
        return state.with_widget(new), outputs
    if node.kind is K.RADIO_BUTTON:
        group = state.widgets[scene.parents[target].id]
        new, outputs = radio_select(group, target)
        return state.with_widget(new), outputs
    return state, []


def _mouse_drag(state: DesktopState, scene: Scene, ev: MouseDrag) -> tuple[DesktopState, list[Output]]:
    drag = state.drag
    if drag is None:
        return state, []
    dx, dy = ev.x - drag.start[0], ev.y - drag.start[1]
    if drag.mode == "move":
        fs = state.frames[drag.target]
        pos = layer_constrain((drag.rect.x + dx, drag.rect.y + dy), (fs.rect.w, fs.rect.h), state.viewport)
        return state.with_frame(replace(fs, rect=Rect(pos[0], pos[1], fs.rect.w, fs.rect.h))), []
    if drag.mode == "resize":
        fs = state.frames[drag.target]
        delta = (drag.rect.w + dx - fs.rect.w, drag.rect.h + dy - fs.rect.h)
        return frame_resize_drag(state, scene, drag.target, drag.edge, delta), []
    slider, outs = slider_update(state.widgets[drag.target], drag_x=ev.x - drag.rect.x)
    return state.with_widget(slider), outs


def dispatch(state: DesktopState, scene: Scene, event: UiEvent) -> tuple[DesktopState, list[Output]]:
    """Apply one event. Pure: equal inputs give equal results."""
    if isinstance(event, MouseDown):
        return _mouse_down(state, scene, event)
    if isinstance(event, MouseUp):
        return _mouse_up(state, scene, event)
    if isinstance(event, MouseDrag):
        return _mouse_drag(state, scene, event)
    if isinstance(event, KeyPress):
        if state.focus is None:
            return state, []
        tf, outputs = textfield_key(state.widgets[state.focus], event.key)
        state = state.with_widget(tf)
        if not tf.editing:
            state = replace(state, focus=None)
        return state, outputs
    if isinstance(event, ViewportResize):
        return viewport_resize(state, event.width, event.height), []
    raise TypeError(f"not a UI event: {event!r}")


# --------------------------------------------------------------------------
# serialization and invariants


def state_to_json(state: DesktopState) -> dict:
    def widget(ws: Any) -> dict:
        out = asdict(ws)
        out["type"] = type(ws).__name__
        out.pop("id")
        return out

    return {
        "viewport": list(state.viewport),
        "frames": {
            str(fid): {"status": fs.status, "rect": fs.rect.as_list(), "controls": list(fs.controls)}
            for fid, fs in state.frames.items()
        },
        "stack": list(state.stack),
        "bands": [[b.frame, b.pressed] for b in state.bands],
        "active": state.active,
        "focus": state.focus,
        "widgets": {str(wid): widget(ws) for wid, ws in sorted(state.widgets.items())},
    }


def state_digest(state: DesktopState) -> str:
    blob = json.dumps(state_to_json(state), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def check_invariants(state: DesktopState, creation_order: tuple[int, ...] | None = None) -> list[str]:
    """Every broken desktop invariant, as readable strings."""
    problems = []
    open_frames = [f for f, fs in state.frames.items() if fs.status != CLOSED]
    if state.active is not None:
        fs = state.frames.get(state.active)
        if fs is None or not fs.visible:
            problems.append(f"active frame {state.active} is not visible")
    band_frames = tuple(b.frame for b in state.bands)
    if creation_order is not None:
        expected = tuple(f for f in creation_order if f in open_frames)
        if band_frames != expected:
            problems.append(f"band order {band_frames} != creation order {expected}")
    if set(band_frames) != set(open_frames) or set(state.stack) != set(open_frames):
        problems.append("closed frame still listed, or open frame missing")
    for band in state.bands:
        if band.pressed != (band.frame == state.active):
            problems.append(f"band of frame {band.frame} out of sync")
    vw, vh = state.viewport
    for fid in open_frames:
        r = state.frames[fid].rect
        for pos, size, avail, axis in ((r.x, r.w, vw, "x"), (r.y, r.h, vh, "y")):
            if size > avail:
                if pos != 0:
                    problems.append(f"oversized frame {fid} not pinned on {axis}")
            elif pos < 0 or pos + size > avail:
                problems.append(f"frame {fid} leaves the viewport on {axis}")
    for ws in state.widgets.values():
        if isinstance(ws, RadioGroupState) and ws.selected not in ws.members:
            problems.append(f"radio group {ws.id} has no valid selection")
        elif isinstance(ws, TextFieldState):
            if ws.max_length is not None and len(ws.text) > ws.max_length:
                problems.append(f"text field {ws.id} exceeds maxLength")
            if not 0 <= ws.cursor <= len(ws.text):
                problems.append(f"text field {ws.id} cursor out of range")
            if not ws.offset <= ws.cursor <= ws.offset + ws.visible_chars:
                problems.append(f"text field {ws.id} cursor scrolled out of view")
        elif isinstance(ws, SliderState):
            lo, hi = ws.bounds
            if not lo <= ws.value <= hi:
                problems.append(f"slider {ws.id} value out of bounds")
            if ws.discrete and ws.intervals and not ws.disabled:
                t = (ws.value - ws.minimum) / (ws.maximum - ws.minimum) * ws.intervals
                if abs(t - round(t)) > 1e-9:
                    problems.append(f"slider {ws.id} value off the marks")
    return problems
