"""Seeded generator of valid UIDL documents for fuzz and acceptance tests."""

from __future__ import annotations

import random

LEAVES = ["Button", "TextButton", "ToggleButton", "TextToggleButton", "CheckBox", "Label",
          "TextField", "ComboBox", "HorizontalSlider"]
BOXES = ["Panel", "Rectangle", "Layer", "Plane"]
LAYOUTS = ["flow", "box", "grid", "border"]
REGIONS = ["NORTH", "SOUTH", "WEST", "EAST", "CENTER"]


class SpecGen:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.count = 0

    def words(self, n=2):
        return " ".join(self.rng.choice(["ok", "file", "edit", "a", "zoom", "x"]) for _ in range(self.rng.randint(1, n)))

    def size(self):
        r = self.rng
        if r.random() < 0.3:
            return f' width="{r.randint(10, 120)}" height="{r.randint(10, 60)}"'
        return ""

    def leaf(self, extra=""):
        r = self.rng
        kind = r.choice(LEAVES)
        self.count += 1
        extra += self.size()
        if kind in ("TextButton", "TextToggleButton", "CheckBox", "Label"):
            extra += f' text="{self.words()}"'
        if kind == "ComboBox":
            extra += ' items="a|b|c"'
        if kind == "TextField":
            extra += f' maxLength="{r.randint(1, 20)}"'
        if kind == "HorizontalSlider":
            extra += f' min="{r.randint(-5, 5)}" max="{r.randint(-5, 20)}" intervals="{r.randint(0, 4)}"'
            if r.random() < 0.3:
                self.count += 1
                return f"<{kind}{extra}><HorizontalRunner/></{kind}>"
        if r.random() < 0.2:
            extra += f' transparency="{r.choice(["0", "0.25", "0.5"])}"'
        return f"<{kind}{extra}/>"

    def layout_attrs(self, layout):
        r = self.rng
        if layout == "grid":
            return f' layout="grid" rows="{r.randint(1, 3)}" cols="{r.randint(1, 3)}"'
        if layout == "box":
            return f' layout="box" orientation="{r.choice(["row", "column"])}"'
        return f' layout="{layout}"'

    def children(self, layout, depth, budget):
        r = self.rng
        n = r.randint(0, budget)
        regions = r.sample(REGIONS, min(n, 5)) if layout == "border" else None
        if regions is not None:
            n = len(regions)
        out = []
        for i in range(n):
            extra = f' region="{regions[i]}"' if regions else ""
            roll = r.random()
            if depth > 0 and roll < 0.2:
                out.append(self.container(r.choice(BOXES), depth - 1, budget, extra))
            elif depth > 0 and roll < 0.27:
                out.append(self.tabs(depth - 1, budget, extra))
            elif roll < 0.33 and not regions:
                out.append(self.radio())
            else:
                out.append(self.leaf(extra))
        return "".join(out)

    def container(self, kind, depth, budget, extra=""):
        self.count += 1
        layout = self.rng.choice(LAYOUTS)
        return f"<{kind}{extra}{self.layout_attrs(layout)}>{self.children(layout, depth, budget)}</{kind}>"

    def tabs(self, depth, budget, extra=""):
        self.count += 1
        pages = []
        for i in range(self.rng.randint(1, 3)):
            self.count += 1
            layout = self.rng.choice(["flow", "box"])
            pages.append(f'<Tab title="t{i}"{self.layout_attrs(layout)}>{self.children(layout, depth, budget)}</Tab>')
        return f"<TabPanel{extra}>{''.join(pages)}</TabPanel>"

    def radio(self, extra=""):
        n = self.rng.randint(1, 3)
        self.count += 1 + n
        buttons = "".join(f'<RadioButton text="r{i}"/>' for i in range(n))
        return f"<RadioButtonGroup{extra}>{buttons}</RadioButtonGroup>"

    def frame(self, depth=2, budget=4):
        r = self.rng
        self.count += 1
        layout = r.choice(LAYOUTS)
        controls = [t for t in ("MINIMIZE", r.choice(["MAXIMIZE", "NORMALIZE"]), "CLOSE") if r.random() < 0.6]
        self.count += len(controls)
        head = "".join(f'<ControlButton type="{t}"/>' for t in controls)
        attrs = f' title="{self.words()}"{self.layout_attrs(layout)}'
        if r.random() < 0.2:
            attrs += ' resizable="false"'
        return f"<Frame{attrs}>{head}{self.children(layout, depth, budget)}</Frame>"

    def document(self, frames=None, depth=2, budget=4):
        frames = self.rng.randint(1, 3) if frames is None else frames
        return "<Display>" + "".join(self.frame(depth, budget) for _ in range(frames)) + "</Display>"


def random_spec(seed: int, **kw) -> str:
    return SpecGen(seed).document(**kw)


NODE_NAMES = ["Transform", "Shape", "Group", "fieldValue", "ProtoInstance", "Script", "X"]
ATTR_NAMES = ["DEF", "USE", "name", "value", "url", "translation"]
ATTR_CHARS = "abc xyz019.-_\"'&<>\n\t\ré中"
TEXT_CHARS = "abc 12<>&\"'é]"


def random_document(rng: random.Random, max_nodes: int = 500):
    """Random X3DNode tree with at most ``max_nodes`` nodes (text and comments included)."""
    from x3dui.xmltree import TEXT, X3DNode

    budget = rng.randint(1, max_nodes)
    count = 1
    root = X3DNode(rng.choice(NODE_NAMES), _attrs(rng))
    open_nodes = [root]
    while count < budget:
        parent = rng.choice(open_nodes)
        roll = rng.random()
        if roll < 0.1:
            text = "".join(rng.choice("abc -") for _ in range(rng.randint(1, 8))).replace("--", "- ").rstrip("-")
            child = X3DNode.comment(text or "c")
        elif roll < 0.2 and not (parent.children and parent.children[-1].name == TEXT):
            child = X3DNode(TEXT, text="x" + "".join(rng.choice(TEXT_CHARS) for _ in range(rng.randint(0, 8))))
        else:
            child = X3DNode(rng.choice(NODE_NAMES), _attrs(rng))
            open_nodes.append(child)
        parent.children.append(child)
        count += 1
    return root, count


def _attrs(rng):
    names = rng.sample(ATTR_NAMES, rng.randint(0, 3))
    return {n: "".join(rng.choice(ATTR_CHARS) for _ in range(rng.randint(0, 10))) for n in names}
