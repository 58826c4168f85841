"""Scripted replay of UI events against a compiled desktop."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable

from . import runtime as rt
from .runtime import DesktopState, Scene
from .widgets import WidgetTree


class EventScriptError(ValueError):
    def __init__(self, index: int, message: str):
        super().__init__(f"event {index}: {message}")
        self.index = index


def load_events(text: str) -> list[dict]:
    """A JSON array of records, or one JSON object per line."""
    stripped = text.strip()
    if not stripped:
        return []
    if stripped.startswith("["):
        try:
            records = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise EventScriptError(0, f"bad JSON: {exc}") from None
    else:
        records = []
        for i, line in enumerate(l for l in stripped.splitlines() if l.strip()):
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise EventScriptError(i, f"bad JSON: {exc}") from None
    for i, r in enumerate(records):
        if not isinstance(r, dict) or "type" not in r:
            raise EventScriptError(i, "each event must be an object with a 'type'")
    # optional sequence numbers must increase
    last = None
    for i, r in enumerate(records):
        if "seq" not in r:
            continue
        seq = r["seq"]
        if isinstance(seq, bool) or not isinstance(seq, int) or (last is not None and seq <= last):
            raise EventScriptError(i, f"sequence number {seq!r} is not increasing")
        last = seq
    return records


def _number(record: dict, key: str, index: int) -> float:
    value = record.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise EventScriptError(index, f"'{key}' must be a number")
    return float(value)


@dataclass
class Simulator:
    scene: Scene
    state: DesktopState

    @classmethod
    def from_tree(cls, tree: WidgetTree, viewport: tuple[float, float] = rt.DEFAULT_VIEWPORT) -> Simulator:
        scene = Scene(tree)
        return cls(scene, rt.initial_state(scene, viewport))

    # ---- target resolution

    def _node_id(self, ref: Any, index: int) -> int:
        if isinstance(ref, int) and not isinstance(ref, bool):
            if ref in self.scene.nodes:
                return ref
        elif isinstance(ref, str):
            node = self.scene.tree.by_name().get(ref)
            if node is not None:
                return node.id
        raise EventScriptError(index, f"unknown target {ref!r}")

    def point_of(self, record: dict, index: int) -> tuple[float, float]:
        if "band" in record:
            rects = rt.band_rects(self.state, self.scene)
            b = record["band"]
            if not isinstance(b, int) or not 0 <= b < len(rects):
                raise EventScriptError(index, f"no taskbar band {b!r}")
            return rects[b].center
        if "control" in record:
            fid = self._node_id(record.get("target"), index)
            fs = self.state.frames.get(fid)
            rects = self.scene.control_rects(fs) if fs else {}
            if record["control"] not in rects:
                raise EventScriptError(index, f"frame has no {record['control']!r} button")
            return rects[record["control"]].center
        if "target" in record:
            wid = self._node_id(record["target"], index)
            fid = self.scene.frame_of(wid)
            fs = self.state.frames.get(fid)
            if fs is None or not fs.visible:
                raise EventScriptError(index, f"target {record['target']!r} is not on screen")
            if wid == fid:
                r = fs.rect
                return r.x + r.w / 2, r.y + self.scene.header / 2
            rect = self.scene.widget_rects(fid, fs.rect).get(wid)
            if rect is None:
                raise EventScriptError(index, f"target {record['target']!r} is not laid out")
            return rect.center
        return _number(record, "x", index), _number(record, "y", index)

    # ---- replay

    def expand(self, record: dict, index: int) -> list[rt.UiEvent]:
        kind = record["type"]
        if kind in ("mousedown", "mouseup", "drag", "click"):
            x, y = self.point_of(record, index)
            if kind == "mousedown":
                return [rt.MouseDown(x, y)]
            if kind == "mouseup":
                return [rt.MouseUp(x, y)]
            if kind == "drag":
                return [rt.MouseDrag(x, y)]
            return [rt.MouseDown(x, y), rt.MouseUp(x, y)]
        if kind == "key":
            key = record.get("key")
            if not isinstance(key, str) or not key:
                raise EventScriptError(index, "'key' must be a non-empty string")
            return [rt.KeyPress(key)]
        if kind == "resize":
            return [rt.ViewportResize(_number(record, "width", index), _number(record, "height", index))]
        raise EventScriptError(index, f"unknown event type {kind!r}")

    def step(self, record: dict, index: int) -> list[rt.Output]:
        outputs: list[rt.Output] = []
        # a click resolves its point once, before the press changes the state
        for event in self.expand(record, index):
            self.state, out = rt.dispatch(self.state, self.scene, event)
            outputs += out
        return outputs


def frame_status(state: DesktopState) -> dict[str, str]:
    return {str(fid): fs.status for fid, fs in sorted(state.frames.items())}


def run_trace(tree: WidgetTree, records: Iterable[dict],
              viewport: tuple[float, float] = rt.DEFAULT_VIEWPORT) -> list[dict]:
    """Trace records: initial state, one entry per event, final digest.

    An empty script yields the initial record alone.
    """
    records = list(records)
    sim = Simulator.from_tree(tree, viewport)
    trace: list[dict] = [{
        "kind": "initial",
        "digest": rt.state_digest(sim.state),
        "state": rt.state_to_json(sim.state),
    }]
    for i, record in enumerate(records):
        outputs = sim.step(record, i)
        trace.append({
            "kind": "event",
            "index": i,
            "event": record,
            "outputs": [o.to_json() for o in outputs],
            "active": sim.state.active,
            "frameStatus": frame_status(sim.state),
        })
    if records:
        trace.append({"kind": "final", "digest": rt.state_digest(sim.state),
                      "state": rt.state_to_json(sim.state)})
    return trace


def dump_trace(trace: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in trace)
