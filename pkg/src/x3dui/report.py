"""Figures for the bundle and layout reports (written to PNG files)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle as Patch  # noqa: E402

from .runtime import DEFAULT_VIEWPORT, Scene, initial_state, taskbar_rect  # noqa: E402
from .toolchain import CATEGORIES, ProtoFile  # noqa: E402
from .widgets import WidgetTree  # noqa: E402
from .xmltree import serialize, strip_comments  # noqa: E402


def category_sizes(files: Sequence[ProtoFile]) -> dict[str, tuple[int, int]]:
    """Source bytes and minified declaration bytes per category directory."""
    out = {c: (0, 0) for c in CATEGORIES}
    for f in files:
        after = len(serialize(strip_comments(f.declaration), pretty=False).encode("utf-8"))
        before0, after0 = out.get(f.category, (0, 0))
        out[f.category] = (before0 + f.size, after0 + after)
    return out


def bundle_figure(files: Sequence[ProtoFile], path: str | Path) -> Path:
    sizes = category_sizes(files)
    names = [c for c in sizes if sizes[c][0]]
    before = [sizes[c][0] / 1024 for c in names]
    after = [sizes[c][1] / 1024 for c in names]
    xs = range(len(names))
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar([x - 0.2 for x in xs], before, width=0.4, label="source")
    ax.bar([x + 0.2 for x in xs], after, width=0.4, label="bundled")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names)
    ax.set_ylabel("KB")
    ax.set_title("Prototype bytes per category")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def layout_figure(tree: WidgetTree, path: str | Path, viewport=DEFAULT_VIEWPORT) -> Path:
    """Outline of every frame and laid-out widget in the initial desktop."""
    scene = Scene(tree)
    state = initial_state(scene, viewport)
    fig, ax = plt.subplots(figsize=(8, 6))
    W, H = state.viewport
    ax.add_patch(Patch((0, 0), W, H, fill=False, lw=1.5, ec="black"))
    bar = taskbar_rect(state.viewport, scene)
    ax.add_patch(Patch((bar.x, bar.y), bar.w, bar.h, fc="0.85", ec="0.5"))
    for fid in state.stack:
        fs = state.frames[fid]
        if not fs.visible:
            continue
        r = fs.rect
        ax.add_patch(Patch((r.x, r.y), r.w, scene.header, fc="tab:blue", alpha=0.4))
        for wid, wr in scene.widget_rects(fid, r).items():
            ax.add_patch(Patch((wr.x, wr.y), wr.w, wr.h, fill=False, lw=0.8,
                               ec="tab:blue" if wid == fid else "tab:orange"))
        ax.text(r.x + 3, r.y + scene.header * 0.7, scene.nodes[fid].get("title", ""), fontsize=7)
    ax.set_xlim(0, W)
    ax.set_ylim(H, 0)
    ax.set_aspect("equal")
    ax.set_title("Initial desktop layout")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
