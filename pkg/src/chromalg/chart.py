"""Bigraded charts: the output form of every Ext computation.

A chart stores per-(s,t) dimensions, generator names and product
records, serializes to a stable JSON document, and renders to SVG in
the classical (t-s, s) layout.  Output is deterministic: cells and
products are emitted in sorted order and the SVG carries no timestamps.
"""

from __future__ import annotations

import json


class BigradedChart:
    def __init__(self, prime, method):
        self.prime = prime
        self.method = method
        self.cells = {}     # (s, t) -> {"dim": int, "names": [str]}
        self.products = []  # {"a": name, "b": name, "result": [names]}

    def set_cell(self, s, t, dim, names=None):
        if dim < 0:
            raise ValueError("negative dimension")
        self.cells[(s, t)] = {"dim": dim, "names": list(names or [])}

    def dim(self, s, t):
        cell = self.cells.get((s, t))
        return cell["dim"] if cell else None

    def names(self, s, t):
        cell = self.cells.get((s, t))
        return list(cell["names"]) if cell else []

    def add_product(self, a, b, result):
        self.products.append({"a": a, "b": b, "result": list(result)})

    def computed_cells(self):
        return sorted(self.cells)

    def to_json_dict(self):
        cells = []
        for (s, t) in sorted(self.cells):
            cell = self.cells[(s, t)]
            cells.append({"s": s, "t": t, "dim": cell["dim"],
                          "names": list(cell["names"])})
        products = sorted(self.products,
                          key=lambda pr: (pr["a"], pr["b"], pr["result"]))
        return {"prime": self.prime, "method": self.method,
                "cells": cells, "products": products}

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True,
                          separators=(",", ":")) + "\n"

    @classmethod
    def from_json_dict(cls, doc):
        chart = cls(doc["prime"], doc["method"])
        for cell in doc["cells"]:
            chart.set_cell(cell["s"], cell["t"], cell["dim"], cell["names"])
        for pr in doc.get("products", []):
            chart.add_product(pr["a"], pr["b"], pr["result"])
        return chart

    # -- rendering ----------------------------------------------------------
    def to_svg(self, cell_px=28, radius=3):
        """Classical Adams-chart layout: stem t-s rightward, s upward."""
        cells = [(t - s, s, data) for (s, t), data in self.cells.items()]
        if not cells:
            return "<svg xmlns='http://www.w3.org/2000/svg'/>"
        max_stem = max(c[0] for c in cells)
        max_s = max(c[1] for c in cells)
        pad = 36
        width = pad * 2 + (max_stem + 1) * cell_px
        height = pad * 2 + (max_s + 1) * cell_px

        def xpos(stem):
            return pad + stem * cell_px

        def ypos(s):
            return height - pad - s * cell_px

        out = [
            f"<svg xmlns='http://www.w3.org/2000/svg' width='{width}' "
            f"height='{height}' font-family='monospace' font-size='9'>",
            f"<desc>method={self.method} prime={self.prime}</desc>",
        ]
        for u in range(max_stem + 1):
            out.append(
                f"<line x1='{xpos(u)}' y1='{ypos(0) + 12}' x2='{xpos(u)}' "
                f"y2='{ypos(max_s) - 12}' stroke='#eee'/>")
            out.append(
                f"<text x='{xpos(u) - 3}' y='{height - 14}'>{u}</text>")
        for s in range(max_s + 1):
            out.append(
                f"<line x1='{xpos(0) - 12}' y1='{ypos(s)}' "
                f"x2='{xpos(max_stem) + 12}' y2='{ypos(s)}' stroke='#eee'/>")
            out.append(f"<text x='6' y='{ypos(s) + 3}'>{s}</text>")
        for stem, s, data in sorted(cells):
            dim = data["dim"]
            if dim == 0:
                continue
            cx, cy = xpos(stem), ypos(s)
            for k in range(dim):
                dx = (k - (dim - 1) / 2) * (2 * radius + 2)
                out.append(
                    f"<circle cx='{cx + dx:.1f}' cy='{cy}' r='{radius}' "
                    f"fill='black'/>")
            label = ",".join(data["names"][:2])
            if label:
                out.append(
                    f"<text x='{cx + 4}' y='{cy - 5}'>{label}</text>")
        out.append("</svg>")
        return "\n".join(out) + "\n"
