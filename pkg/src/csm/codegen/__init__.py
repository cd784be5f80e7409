"""Back-ends: Graphviz rendering and Lustre program generation."""

from .dot import emit_graph
from .lustre import CodegenError, SyncProgram, emit_sync_program

__all__ = ["emit_graph", "emit_sync_program", "SyncProgram", "CodegenError"]
