"""
Exporting graphs
================

Any expanded graph can be written as JSON for other tools or as DOT for
Graphviz.
"""

import tempfile
from pathlib import Path

from sbcpa import expand, export_dot, export_json, import_json, load_bundled

model = load_bundled("counter.sbc")
g = expand(model, "s81")

text = export_json(g)
print(text[:400], "...")
assert import_json(text) == g  # lossless

out = Path(tempfile.mkdtemp()) / "s81.dot"
out.write_text(export_dot(g), encoding="utf-8")
print("wrote", out, "- render with: dot -Tsvg", out.name)
print(export_dot(model.itg("ITG_41")))
