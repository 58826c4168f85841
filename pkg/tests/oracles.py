"""Brute-force reference implementations written from the layout rules.

They avoid the library's helpers on purpose: placements are found by
scanning, carving and counting rather than by the arithmetic shortcuts the
production code uses.
"""

from __future__ import annotations


def flow_oracle(width, sizes, hgap, vgap):
    """Returns (placements list of (x, y, w, h), min_w, min_h, used_w)."""
    widest = max([w for w, _ in sizes], default=0)
    width = max(width, widest)
    rows = [[]]
    for i, (w, h) in enumerate(sizes):
        row = rows[-1]
        used = sum(sizes[j][0] for j in row) + hgap * len(row)
        if row and used + w > width:
            rows.append([i])
        else:
            row.append(i)
    out = [None] * len(sizes)
    top = 0
    heights = []
    for row in rows:
        if not row:
            continue
        left = 0
        for j in row:
            out[j] = (left, top, sizes[j][0], sizes[j][1])
            left += sizes[j][0] + hgap
        tallest = max(sizes[j][1] for j in row)
        heights.append(tallest)
        top += tallest + vgap
    min_h = sum(heights) + vgap * (len(heights) - 1) if heights else 0
    return out, widest, min_h, width


def border_oracle(container, regions, hgap, vgap):
    """Carve the container: north strip, south strip, west/east columns of
    the remaining band, centre gets what is left."""
    n, s = regions.get("NORTH"), regions.get("SOUTH")
    mids = [regions[k] for k in ("WEST", "CENTER", "EAST") if k in regions]
    need_w = max([n[0] if n else 0, s[0] if s else 0,
                  sum(m[0] for m in mids) + hgap * max(len(mids) - 1, 0)])
    strips = ([n[1]] if n else []) + ([max(m[1] for m in mids)] if mids else []) + ([s[1]] if s else [])
    need_h = sum(strips) + vgap * max(len(strips) - 1, 0)
    W, H = max(container[0], need_w), max(container[1], need_h)
    free = [0, 0, W, H]  # x0, y0, x1, y1
    out = {}
    if n:
        out["NORTH"] = (0, 0, W, n[1])
        free[1] = n[1] + (vgap if (mids or s) else 0)
    if s:
        out["SOUTH"] = (0, H - s[1], W, s[1])
        free[3] = H - s[1] - (vgap if mids else 0)
    band = max(free[3] - free[1], 0)
    if "WEST" in regions:
        w = regions["WEST"][0]
        out["WEST"] = (free[0], free[1], w, band)
        free[0] = w + hgap
    if "EAST" in regions:
        w = regions["EAST"][0]
        out["EAST"] = (W - w, free[1], w, band)
        free[2] = W - w - hgap
    if "CENTER" in regions:
        cw, ch = regions["CENTER"]
        aw = max(free[2] - free[0], 0)
        # centred, rounding toward the top-left
        x = free[0]
        while (x + 1 - free[0]) * 2 <= aw - cw:
            x += 1
        y = free[1]
        while (y + 1 - free[1]) * 2 <= band - ch:
            y += 1
        out["CENTER"] = (x, y, cw, ch)
    return out, need_w, need_h, (W, H)


def box_oracle(orientation, sizes, gap, h_align, v_align, container):
    col = orientation == "column"
    along = [(h if col else w) for w, h in sizes]
    across = [(w if col else h) for w, h in sizes]
    run = sum(along) + gap * max(len(sizes) - 1, 0)
    thick = max(across, default=0)
    min_w, min_h = (thick, run) if col else (run, thick)
    W, H = max(container[0], min_w), max(container[1], min_h)

    def start(mode, avail, size):
        if mode in ("center", "middle"):
            return (avail - size) // 2
        if mode in ("right", "bottom"):
            return avail - size
        return 0

    out = []
    cursor = start(v_align if col else h_align, H if col else W, run)
    for i, (w, h) in enumerate(sizes):
        if col:
            out.append((start(h_align, W, w), cursor, w, h))
            cursor += h + gap
        else:
            out.append((cursor, start(v_align, H, h), w, h))
            cursor += w + gap
    return out, min_w, min_h


def grid_oracle(rows, cols, sizes, hgap, vgap, compress_h, compress_v):
    placed = sizes[: rows * cols]
    cells = {}
    for i in range(len(placed)):
        cells[(i // cols, i % cols)] = placed[i]
    widths, heights = [], []
    for c in range(cols):
        col = [cells[(r, c)][0] for r in range(rows) if (r, c) in cells]
        widths.append(max(col, default=0))
    for r in range(rows):
        row = [cells[(r, c)][1] for c in range(cols) if (r, c) in cells]
        heights.append(max(row, default=0))
    if not compress_h:
        widths = [max(widths)] * cols
    if not compress_v:
        heights = [max(heights)] * rows
    out = []
    for i in range(len(placed)):
        r, c = i // cols, i % cols
        x = sum(widths[:c]) + c * hgap
        y = sum(heights[:r]) + r * vgap
        out.append((x, y, widths[c], heights[r]))
    min_w = sum(widths) + hgap * (cols - 1)
    min_h = sum(heights) + vgap * (rows - 1)
    return out, min_w, min_h


def is_topological(order, graph):
    """True when every name appears after all the names it uses."""
    position = {n: i for i, n in enumerate(order)}
    if sorted(position) != sorted(graph):
        return False
    return all(position[d] < position[n] for n, deps in graph.items() for d in deps)


def rects_overlap(a, b):
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah
