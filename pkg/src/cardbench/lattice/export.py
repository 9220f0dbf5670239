"""Hasse-diagram exports.

JSON layout::

    {"level": n,
     "elements": [{"id": i, "name": str, "height": h,
                   "proj": null | [stamp, rank, parent_id | null, base_id, tag]}, ...],
     "covers": [[lower_id, upper_id], ...]}

Ids are creation indices, so they are stable across runs and across levels
(A_k occupies ids 0..|A_k|-1 inside every larger level).  Covers are sorted.

DOT output draws covers as edges from lower to upper, with one ``rank=same``
group per height.
"""

from __future__ import annotations

import json
from collections import defaultdict

from .engine import _heights
from .levels import LatticeLevel


def level_dict(level: LatticeLevel) -> dict:
    ids = {x: i for i, x in enumerate(level.created)}
    heights = _heights(level)
    elements = []
    for x in level.created:
        if x.is_bottom:
            proj = None
        else:
            s, r, parent, base, tag = x.proj
            proj = [s, r, None if parent is None else ids[parent], ids[base], tag]
        elements.append({"id": ids[x], "name": x.name, "height": heights[x], "proj": proj})
    covers = sorted([ids[level.elements[lo]], ids[level.elements[hi]]] for lo, hi in level.edges)
    return {"level": level.level, "elements": elements, "covers": covers}


def to_json(level: LatticeLevel) -> str:
    return json.dumps(level_dict(level), indent=1)


def to_dot(level: LatticeLevel) -> str:
    d = level_dict(level)
    lines = [f"digraph A{level.level} {{", "  rankdir=BT;", "  node [shape=circle, fontsize=10];"]
    ranks = defaultdict(list)
    for el in d["elements"]:
        label = el["name"] if el["proj"] is None or el["name"].startswith("e") else f"{el['proj'][1]}.{el['proj'][4]}"
        lines.append(f'  n{el["id"]} [label="{label}"];')
        ranks[el["height"]].append(f"n{el['id']}")
    for h in sorted(ranks):
        lines.append("  { rank=same; " + " ".join(ranks[h]) + "; }")
    for lo, hi in d["covers"]:
        lines.append(f"  n{lo} -> n{hi};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_text(level: LatticeLevel) -> str:
    heights = _heights(level)
    rows = [f"A_{level.level}: {level.n} elements, {len(level.edges)} covers, sizes {level.sizes}"]
    for x in level.created:
        rows.append(f"  {x.name:>6}  h={heights[x]}  {x.describe()}")
    return "\n".join(rows) + "\n"
