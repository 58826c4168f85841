"""Layout managers: flow, border, box and grid placement plus minimum sizes.

Coordinates are abstract pixels with the origin at the container's top-left
corner, x growing right and y growing down. Gaps separate neighbours only;
nothing is inserted at container edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence, Union

from .widgets import (
    CONTAINERS,
    REGIONS,
    TAB,
    K,
    Settings,
    WidgetNode,
    ellipsize_lines,
    layout_children,
    measure_text,
)

PAD_X = 6.0
PAD_Y = 4.0
CHECK_GAP = 4.0

Size = tuple[float, float]


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def bottom(self) -> float:
        return self.y + self.h

    @property
    def center(self) -> tuple[float, float]:
        return self.x + self.w / 2, self.y + self.h / 2

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px < self.right and self.y <= py < self.bottom

    def overlaps(self, other: Rect) -> bool:
        return (
            self.x < other.right and other.x < self.right
            and self.y < other.bottom and other.y < self.bottom
            and self.w > 0 and self.h > 0 and other.w > 0 and other.h > 0
        )

    def within(self, other: Rect) -> bool:
        return (
            self.x >= other.x and self.y >= other.y
            and self.right <= other.right and self.bottom <= other.bottom
        )

    def moved(self, dx: float, dy: float) -> Rect:
        return Rect(self.x + dx, self.y + dy, self.w, self.h)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True)
class FlowSpec:
    hgap: float = 5.0
    vgap: float = 5.0


@dataclass(frozen=True)
class BorderSpec:
    hgap: float = 5.0
    vgap: float = 5.0


@dataclass(frozen=True)
class BoxSpec:
    orientation: str = "row"
    h_align: str = "left"
    v_align: str = "top"
    gap: float = 5.0


@dataclass(frozen=True)
class GridSpec:
    rows: int = 1
    cols: int = 1
    hgap: float = 5.0
    vgap: float = 5.0
    compress_h: bool = False
    compress_v: bool = False

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid needs at least one row and one column")


LayoutSpec = Union[FlowSpec, BorderSpec, BoxSpec, GridSpec]


@dataclass
class ComputedLayout:
    placements: dict[Hashable, Rect]
    min_width: float
    min_height: float
    width: float
    height: float
    # border regions, tab header strips and similar named sub-areas
    areas: dict[Hashable, Rect] = field(default_factory=dict)

    @property
    def min_size(self) -> Size:
        return self.min_width, self.min_height

    @property
    def size(self) -> Size:
        return self.width, self.height

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "minWidth": self.min_width,
            "minHeight": self.min_height,
            "placements": {str(k): r.as_list() for k, r in self.placements.items()},
            "areas": {str(k): r.as_list() for k, r in self.areas.items()},
        }


def _span(sizes: Iterable[float], gap: float) -> float:
    sizes = list(sizes)
    return sum(sizes) + gap * max(len(sizes) - 1, 0)


def _centered(avail: float, size: float) -> float:
    # floor keeps integer inputs on integer coordinates
    return (avail - size) // 2


def _align(mode: str, avail: float, size: float) -> float:
    if mode in ("center", "middle"):
        return _centered(avail, size)
    if mode in ("right", "bottom"):
        return avail - size
    return 0


# --------------------------------------------------------------------------
# the four algorithms


def flow_rows(container_w: float, children: Sequence[Size], hgap: float) -> list[list[int]]:
    """Indices of ``children`` grouped into rows for a given width."""
    rows: list[list[int]] = []
    x = 0.0
    for i, (w, _) in enumerate(children):
        if not rows or (x > 0 and x + w > container_w):
            rows.append([])
            x = 0.0
        rows[-1].append(i)
        x += w + hgap
    return rows


def layout_flow(
    container_w: float,
    children: Sequence[Size],
    hgap: float = 5.0,
    vgap: float = 5.0,
    container_h: float = 0.0,
) -> ComputedLayout:
    widest = max((w for w, _ in children), default=0.0)
    width = max(container_w, widest)
    placements: dict[Hashable, Rect] = {}
    y = 0.0
    heights = []
    for row in flow_rows(width, children, hgap):
        x = 0.0
        row_h = max(children[i][1] for i in row)
        for i in row:
            w, h = children[i]
            placements[i] = Rect(x, y, w, h)
            x += w + hgap
        heights.append(row_h)
        y += row_h + vgap
    min_h = _span(heights, vgap)
    return ComputedLayout(placements, widest, min_h, width, max(container_h, min_h))


def layout_border(
    container: Size,
    regions: dict[str, Size],
    hgap: float = 5.0,
    vgap: float = 5.0,
) -> ComputedLayout:
    """NORTH/SOUTH span the full width; WEST/EAST fill the middle band.

    Leftover space goes to CENTER and the CENTER child is centred in it.
    """
    for tag in regions:
        if tag not in REGIONS:
            raise ValueError(f"unknown region {tag!r}")
    zero = (0.0, 0.0)
    north, south = regions.get("NORTH"), regions.get("SOUTH")
    middle = [regions[t] for t in ("WEST", "CENTER", "EAST") if t in regions]
    middle_w = _span((w for w, _ in middle), hgap)
    middle_h = max((h for _, h in middle), default=0.0)
    bands = []
    if north:
        bands.append(north[1])
    if middle:
        bands.append(middle_h)
    if south:
        bands.append(south[1])
    min_w = max((north or zero)[0], (south or zero)[0], middle_w)
    min_h = _span(bands, vgap)
    width, height = max(container[0], min_w), max(container[1], min_h)

    placements: dict[Hashable, Rect] = {}
    areas: dict[Hashable, Rect] = {}
    top, bottom = 0.0, height
    if north:
        placements["NORTH"] = areas["NORTH"] = Rect(0, 0, width, north[1])
        top = north[1] + (vgap if middle or south else 0)
    if south:
        placements["SOUTH"] = areas["SOUTH"] = Rect(0, height - south[1], width, south[1])
        bottom = height - south[1] - (vgap if middle else 0)
    band_h = max(bottom - top, 0.0)
    left, right = 0.0, width
    if "WEST" in regions:
        w = regions["WEST"][0]
        placements["WEST"] = areas["WEST"] = Rect(0, top, w, band_h)
        left = w + hgap
    if "EAST" in regions:
        w = regions["EAST"][0]
        placements["EAST"] = areas["EAST"] = Rect(width - w, top, w, band_h)
        right = width - w - hgap
    if middle:
        area = Rect(left, top, max(right - left, 0.0), band_h)
        areas["CENTER"] = area
        if "CENTER" in regions:
            w, h = regions["CENTER"]
            placements["CENTER"] = Rect(
                left + _centered(area.w, w), top + _centered(area.h, h), w, h
            )
    return ComputedLayout(placements, min_w, min_h, width, height, areas)


def layout_box(
    orientation: str,
    children: Sequence[Size],
    gap: float = 5.0,
    h_align: str = "left",
    v_align: str = "top",
    container: Size = (0.0, 0.0),
) -> ComputedLayout:
    """Single row or column. The run as a whole is aligned on the main axis
    and each child individually on the cross axis."""
    if orientation not in ("row", "column"):
        raise ValueError(f"orientation must be row or column, not {orientation!r}")
    column = orientation == "column"
    main = [h if column else w for w, h in children]
    cross = [w if column else h for w, h in children]
    main_len = _span(main, gap)
    cross_len = max(cross, default=0.0)
    min_w, min_h = (cross_len, main_len) if column else (main_len, cross_len)
    width, height = max(container[0], min_w), max(container[1], min_h)
    main_avail, cross_avail = (height, width) if column else (width, height)
    main_align, cross_align = (v_align, h_align) if column else (h_align, v_align)

    pos = _align(main_align, main_avail, main_len)
    placements: dict[Hashable, Rect] = {}
    for i, (w, h) in enumerate(children):
        off = _align(cross_align, cross_avail, cross[i])
        placements[i] = Rect(off, pos, w, h) if column else Rect(pos, off, w, h)
        pos += main[i] + gap
    return ComputedLayout(placements, min_w, min_h, width, height)


def layout_grid(
    rows: int,
    cols: int,
    children: Sequence[Size],
    hgap: float = 5.0,
    vgap: float = 5.0,
    compress_h: bool = False,
    compress_v: bool = False,
    container: Size = (0.0, 0.0),
) -> ComputedLayout:
    """Row-major cells. Children past ``rows * cols`` are not placed.

    Without compression every column takes the widest child and every row the
    tallest; with it each column/row takes its own maximum. A placed child
    fills its cell.
    """
    GridSpec(rows, cols)
    placed = list(children[: rows * cols])
    col_w = [0.0] * cols
    row_h = [0.0] * rows
    for i, (w, h) in enumerate(placed):
        r, c = divmod(i, cols)
        col_w[c] = max(col_w[c], w)
        row_h[r] = max(row_h[r], h)
    if not compress_h:
        col_w = [max(col_w)] * cols
    if not compress_v:
        row_h = [max(row_h)] * rows
    xs = [sum(col_w[:c]) + hgap * c for c in range(cols)]
    ys = [sum(row_h[:r]) + vgap * r for r in range(rows)]
    placements: dict[Hashable, Rect] = {}
    areas: dict[Hashable, Rect] = {}
    for r in range(rows):
        for c in range(cols):
            areas[(r, c)] = Rect(xs[c], ys[r], col_w[c], row_h[r])
    for i in range(len(placed)):
        placements[i] = areas[divmod(i, cols)]
    min_w, min_h = _span(col_w, hgap), _span(row_h, vgap)
    return ComputedLayout(
        placements, min_w, min_h, max(container[0], min_w), max(container[1], min_h), areas
    )


# --------------------------------------------------------------------------
# widget-level entry points


def layout_spec_for(node: WidgetNode, settings: Settings) -> LayoutSpec:
    p = node.props
    hgap = p.get("hgap", settings.hgap)
    vgap = p.get("vgap", settings.vgap)
    kind = p.get("layout", "flow")
    if kind == "border":
        return BorderSpec(hgap, vgap)
    if kind == "box":
        return BoxSpec(
            p.get("orientation", "row"), p.get("hAlign", "left"), p.get("vAlign", "top"),
            p.get("gap", settings.hgap),
        )
    if kind == "grid":
        return GridSpec(
            p.get("rows", 1), p.get("cols", 1), hgap, vgap,
            p.get("compressHorizontally", False), p.get("compressVertically", False),
        )
    return FlowSpec(hgap, vgap)


def run_layout(
    spec: LayoutSpec,
    children: Sequence[Size],
    container: Size,
    regions: Sequence[str] | None = None,
) -> ComputedLayout:
    """Dispatch to one algorithm; placements are keyed by child index."""
    if isinstance(spec, FlowSpec):
        return layout_flow(container[0], children, spec.hgap, spec.vgap, container[1])
    if isinstance(spec, BoxSpec):
        return layout_box(spec.orientation, children, spec.gap, spec.h_align, spec.v_align, container)
    if isinstance(spec, GridSpec):
        return layout_grid(spec.rows, spec.cols, children, spec.hgap, spec.vgap,
                           spec.compress_h, spec.compress_v, container)
    tags = list(regions or ["CENTER"] * len(children))
    out = layout_border(container, dict(zip(tags, children)), spec.hgap, spec.vgap)
    out.placements = {tags.index(t): r for t, r in out.placements.items()}
    return out


def _empty_floor(spec: LayoutSpec) -> Size:
    if isinstance(spec, BoxSpec):
        return 2 * spec.gap, 2 * spec.gap
    return 2 * spec.hgap, 2 * spec.vgap


def font_size(node: WidgetNode, settings: Settings) -> float:
    return node.get("fontSize", settings.font_size)


def header_height(settings: Settings) -> float:
    """Height of a Frame title bar or a TabPanel tab strip."""
    return settings.line_height + 2 * PAD_Y


def _child_sizes(node: WidgetNode, settings: Settings) -> tuple[list[WidgetNode], list[Size]]:
    kids = layout_children(node)
    return kids, [measure_widget(k, settings) for k in kids]


def compute_min_size(container: WidgetNode, proposed: Size, settings: Settings) -> Size:
    """Minimum content size given a proposed size.

    Only the flow layout depends on the proposal (its row count follows the
    width); an empty container reports its gap border.
    """
    spec = layout_spec_for(container, settings)
    kids, sizes = _child_sizes(container, settings)
    if not kids:
        return _empty_floor(spec)
    regions = [k.get("region", "CENTER") for k in kids]
    out = run_layout(spec, sizes, (proposed[0], 0.0), regions)
    return out.min_width, out.min_height


def _natural_width(container: WidgetNode, settings: Settings) -> float:
    spec = layout_spec_for(container, settings)
    if "width" in container.props:
        return container.props["width"]
    if isinstance(spec, FlowSpec):
        _, sizes = _child_sizes(container, settings)
        return _span((w for w, _ in sizes), spec.hgap)
    return 0.0


def container_size(container: WidgetNode, settings: Settings) -> Size:
    """Declared size enlarged to the layout minimum at that size."""
    width = _natural_width(container, settings)
    min_w, _ = compute_min_size(container, (width, 0.0), settings)
    width = max(width, min_w)
    _, min_h = compute_min_size(container, (width, 0.0), settings)
    return width, max(container.get("height", 0.0), min_h)


def tab_header_widths(panel: WidgetNode, settings: Settings) -> list[float]:
    return [measure_text(t.get("title", ""), settings.font_size)[0] + 2 * PAD_X
            for t in panel.children]


def measure_widget(node: WidgetNode, settings: Settings) -> Size:
    """Intrinsic size of a widget under the fixed-pitch text model."""
    kind = node.kind
    fs = font_size(node, settings)
    line_h = 1.2 * fs
    text = node.get("text", "")
    declared_w, declared_h = node.get("width"), node.get("height")

    def override(w: float, h: float) -> Size:
        return (declared_w if declared_w is not None else w,
                declared_h if declared_h is not None else h)

    if kind in CONTAINERS or kind == TAB:
        return container_size(node, settings)
    if kind is K.TAB_PANEL:
        strip = _span(tab_header_widths(node, settings), 0.0)
        pages = [container_size(t, settings) for t in node.children]
        content_w = max((w for w, _ in pages), default=0.0)
        content_h = max((h for _, h in pages), default=0.0)
        return (max(strip, content_w, declared_w or 0.0),
                max(header_height(settings) + content_h, declared_h or 0.0))
    if kind in (K.TEXT_BUTTON, K.TEXT_TOGGLE_BUTTON):
        return override(measure_text(text, fs)[0] + 2 * PAD_X, line_h + 2 * PAD_Y)
    if kind in (K.BUTTON, K.TOGGLE_BUTTON):
        return override(line_h + 2 * PAD_Y, line_h + 2 * PAD_Y)
    if kind in (K.CHECK_BOX, K.RADIO_BUTTON):
        return override(fs + CHECK_GAP + measure_text(text, fs)[0], max(fs, line_h))
    if kind is K.LABEL:
        lines = text.split("\n")
        if declared_w is not None:
            _, w, h = ellipsize_lines(lines, declared_w, fs)
        else:
            w = max(measure_text(line, fs)[0] for line in lines)
            h = len(lines) * line_h
        return w, max(h, declared_h or 0.0)
    if kind is K.TEXT_FIELD:
        return override(10 * 0.6 * fs + 2 * PAD_X, line_h + 2 * PAD_Y)
    if kind is K.COMBO_BOX:
        items = list(node.get("items", ())) + [text]
        widest = max(measure_text(i, fs)[0] for i in items)
        return override(widest + 2 * PAD_X + line_h + 2 * PAD_Y, line_h + 2 * PAD_Y)
    if kind is K.HORIZONTAL_SLIDER:
        return override(120.0, 2 * line_h + 2 * PAD_Y)
    if kind is K.CONTROL_BUTTON:
        return line_h, line_h
    if kind is K.HORIZONTAL_RUNNER:
        return 0.8 * line_h, line_h
    return override(0.0, 0.0)


def do_layout(container: WidgetNode, size: Size, settings: Settings) -> ComputedLayout:
    """Place ``container``'s layout children; placements keyed by widget id."""
    if container.kind is K.TAB_PANEL:
        return _tab_panel_layout(container, size, settings)
    spec = layout_spec_for(container, settings)
    kids, sizes = _child_sizes(container, settings)
    if not kids:
        fw, fh = _empty_floor(spec)
        return ComputedLayout({}, fw, fh, max(size[0], fw), max(size[1], fh))
    regions = [k.get("region", "CENTER") for k in kids]
    out = run_layout(spec, sizes, size, regions)
    out.placements = {kids[i].id: r for i, r in out.placements.items()}
    if isinstance(spec, BorderSpec):
        tag_to_id = {regions[i]: kids[i].id for i in range(len(kids))}
        out.areas = {tag_to_id.get(t, t): r for t, r in out.areas.items()}
    return out


def _tab_panel_layout(panel: WidgetNode, size: Size, settings: Settings) -> ComputedLayout:
    min_w, min_h = measure_widget(panel, settings)
    width, height = max(size[0], min_w), max(size[1], min_h)
    strip = header_height(settings)
    page = Rect(0, strip, width, height - strip)
    placements = {tab.id: page for tab in panel.children}
    areas: dict[Hashable, Rect] = {}
    x = 0.0
    for tab, w in zip(panel.children, tab_header_widths(panel, settings)):
        areas[tab.id] = Rect(x, 0, w, strip)
        x += w
    return ComputedLayout(placements, min_w, min_h, width, height, areas)


def is_layout_container(node: WidgetNode) -> bool:
    return node.kind in CONTAINERS or node.kind == TAB or node.kind is K.TAB_PANEL


def layout_tree(root: WidgetNode, size: Size, settings: Settings) -> dict[int, ComputedLayout]:
    """Layouts for ``root`` and every nested container.

    A nested container is laid out at the size of the rect its parent gave
    it, so stretched cells and border bands propagate downwards.
    """
    out: dict[int, ComputedLayout] = {}

    def visit(node: WidgetNode, node_size: Size) -> None:
        computed = do_layout(node, node_size, settings)
        out[node.id] = computed
        for child in _all_layout_children(node):
            if is_layout_container(child) and child.id in computed.placements:
                rect = computed.placements[child.id]
                visit(child, (rect.w, rect.h))

    visit(root, size)
    return out


def _all_layout_children(node: WidgetNode) -> list[WidgetNode]:
    if node.kind is K.TAB_PANEL:
        return list(node.children)
    return layout_children(node)


# --------------------------------------------------------------------------
# resizing


def clamp_resize(
    frame: WidgetNode,
    requested: Size,
    settings: Settings,
    current: Size | None = None,
) -> Size:
    """Accept a requested content size, never going below the minimum.

    Width is clamped first; height is then clamped against the minimum at the
    accepted width. Static frames keep ``current``.
    """
    if not frame.get("resizable", True):
        return current if current is not None else container_size(frame, settings)
    min_w, _ = compute_min_size(frame, requested, settings)
    width = max(requested[0], min_w)
    _, min_h = compute_min_size(frame, (width, requested[1]), settings)
    return width, max(requested[1], min_h)
