"""Compile declarative GUI descriptions into X3D scenes for the X3DUI widget
library, simulate the widgets headlessly, and package the library."""

from .emitter import EmitConfig, emit_scene, serialize_xml
from .layout import Rect, compute_min_size, do_layout
from .runtime import Scene, dispatch, initial_state
from .toolchain import bundle, extract_docs, minify, render_docs, size_report
from .widgets import Settings, WidgetKind, compile_tree, parse_ui_spec, validate_tree

__version__ = "0.1.0"

__all__ = [
    "EmitConfig", "Rect", "Scene", "Settings", "WidgetKind", "bundle", "compile_tree",
    "compute_min_size", "dispatch", "do_layout", "emit_scene", "extract_docs",
    "initial_state", "minify", "parse_ui_spec", "render_docs", "serialize_xml",
    "size_report", "validate_tree",
]
