"""DOT and GEXF writers carrying per-node attributes (community, agreement)."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Mapping

from .graph import Graph

AGREEMENT_COLORS = {"agree": "green", "disagree": "red"}
_RGB = {"green": (0, 160, 0), "red": (220, 0, 0)}


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: Graph, node_attrs: Mapping[int, Mapping[str, object]], name: str = "clan") -> str:
    lines = [f"graph {_q(name)} {{"]
    for node, ext in enumerate(graph.external_ids):
        attrs = dict(node_attrs.get(node, {}))
        if attrs.get("agreement") in AGREEMENT_COLORS:
            attrs["color"] = AGREEMENT_COLORS[attrs["agreement"]]
        body = ", ".join(f"{k}={_q(v)}" for k, v in sorted(attrs.items()))
        lines.append(f"  {_q(ext)}" + (f" [{body}];" if body else ";"))
    for u, v, w in graph.edges:
        ids = graph.external_ids
        lines.append(f"  {_q(ids[u])} -- {_q(ids[v])} [weight={w!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_gexf(graph: Graph, node_attrs: Mapping[int, Mapping[str, object]]) -> str:
    keys = sorted({k for a in node_attrs.values() for k in a})
    root = ET.Element("gexf", {"xmlns": "http://gexf.net/1.3",
                               "xmlns:viz": "http://gexf.net/1.3/viz", "version": "1.3"})
    g = ET.SubElement(root, "graph", {"defaultedgetype": "undirected", "mode": "static"})
    decl = ET.SubElement(g, "attributes", {"class": "node", "mode": "static"})
    for i, k in enumerate(keys):
        ET.SubElement(decl, "attribute", {"id": str(i), "title": k, "type": "string"})
    nodes = ET.SubElement(g, "nodes")
    for node, ext in enumerate(graph.external_ids):
        el = ET.SubElement(nodes, "node", {"id": str(node), "label": ext})
        attrs = node_attrs.get(node, {})
        if attrs:
            vals = ET.SubElement(el, "attvalues")
            for i, k in enumerate(keys):
                if k in attrs:
                    ET.SubElement(vals, "attvalue", {"for": str(i), "value": str(attrs[k])})
            color = AGREEMENT_COLORS.get(attrs.get("agreement"))
            if color:
                r, gg, b = _RGB[color]
                ET.SubElement(el, "viz:color", {"r": str(r), "g": str(gg), "b": str(b)})
    edges = ET.SubElement(g, "edges")
    for i, (u, v, w) in enumerate(graph.edges):
        ET.SubElement(edges, "edge", {"id": str(i), "source": str(u), "target": str(v),
                                      "weight": repr(w)})
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def write_graph(graph: Graph, node_attrs, path, fmt: str) -> None:
    text = to_dot(graph, node_attrs) if fmt == "dot" else to_gexf(graph, node_attrs)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
