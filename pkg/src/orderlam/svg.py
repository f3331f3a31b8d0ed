"""SVG pictures of 2-dimensional oriented spines and of leaf patches.

The spine picture has two panels: the fundamental polygon drawn as a
regular n-gon with its sides marked by sign, and the quotient train track
with one marker per switch. At each switch a small wedge sits between the
two branches that meet at the cusp.

The leaf picture draws a tiling by copies of the polygon with the faces of
each leaf as polylines, pushed off the tile sides by their chart value. For
Z^2 the tiles are placed in the plane by the group itself; for other groups
only the polygon around the identity is drawn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .branched import OrientedSpine
from .errors import WrongDimension
from .group_order import Family, GroupElement

_HEAD = ('<?xml version="1.0" encoding="UTF-8"?>\n'
         '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
         'width="{w}" height="{h}" viewBox="0 0 {w} {h}">\n')
_STYLE = """<style>
.side-pos {stroke:#1f5fa8;stroke-width:3;fill:none}
.side-neg {stroke:#b0412e;stroke-width:3;stroke-dasharray:8 5;fill:none}
.branch {stroke:#333;stroke-width:2;fill:none}
.switch {fill:#fff;stroke:#000;stroke-width:2}
.cusp {fill:#d4881c;stroke:none}
.cusp-corner {fill:#d4881c}
.tile {stroke:#999;stroke-width:1;fill:none}
.leaf {stroke:#2a7d3b;stroke-width:1.5;fill:none}
text {font-family:sans-serif;font-size:12px}
</style>
"""


def _f(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def _pts(points) -> str:
    return " ".join(f"{_f(x)},{_f(y)}" for x, y in points)


def _write(text: str, out_path) -> str:
    if out_path is not None:
        Path(out_path).write_bytes(text.encode("utf-8"))
    return text


def _regular(n: int, cx: float, cy: float, r: float) -> list:
    # corner 0 at the bottom left, counterclockwise on screen
    start = -math.pi / 2 - math.pi / n
    return [(cx + r * math.cos(start - 2 * math.pi * k / n),
             cy - r * math.sin(start - 2 * math.pi * k / n)) for k in range(n)]


# ---------------------------------------------------------------------------
# spines


def _half_edges(p, spine) -> dict:
    """Side s at its start or end corner -> (edge id, end index)."""
    out = {}
    for e in spine.edges:
        i, j = e.faces
        out[(i, "start")] = (e.id, 0)
        out[(i, "end")] = (e.id, 1)
        out[(j, "start")] = (e.id, 1)
        out[(j, "end")] = (e.id, 0)
    return out


def _spine_svg(osp: OrientedSpine) -> str:
    p = osp.complex
    sp = osp.spine
    n = len(p)
    W, H = 760, 380
    parts = [_HEAD.format(w=W, h=H), _STYLE]
    parts.append(f'<text x="10" y="20">domain: {n} sides, '
                 f'{len(osp.branch_cells)} switches</text>\n')

    # left panel: the polygon
    poly = _regular(n, 190, 200, 140)
    cusps = {c.cusp for c in osp.branch_cells}
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        cls = "side-pos" if osp.sign(i) > 0 else "side-neg"
        parts.append(f'<line class="{cls}" data-side="{i}" x1="{_f(a[0])}" y1="{_f(a[1])}" '
                     f'x2="{_f(b[0])}" y2="{_f(b[1])}"/>\n')
        mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
        tx, ty = 190 + (mx - 190) * 1.18, 200 + (my - 200) * 1.18
        parts.append(f'<text x="{_f(tx)}" y="{_f(ty)}" text-anchor="middle">'
                     f'{escape(str(p.label(i)))}</text>\n')
    for c in sorted(cusps):
        x, y = poly[c]
        parts.append(f'<circle class="cusp-corner" data-corner="{c}" cx="{_f(x)}" cy="{_f(y)}" r="5"/>\n')

    # right panel: the track
    k = len(sp.vertices)
    cx0, cy0, R = 560, 200, 110
    pos = [(cx0 + R * math.cos(math.pi + 2 * math.pi * v / k),
            cy0 - R * math.sin(math.pi + 2 * math.pi * v / k)) for v in range(k)]
    seen: dict = {}
    direction: dict = {}
    for e in sp.edges:
        u, v = e.ends
        key = (min(u, v), max(u, v))
        idx = seen.get(key, 0)
        seen[key] = idx + 1
        pu, pv = pos[u], pos[v]
        if u == v:
            # a loop, pushed away from the centre
            ox, oy = pu[0] - cx0, pu[1] - cy0
            norm = math.hypot(ox, oy) or 1.0
            ox, oy = ox / norm, oy / norm
            s = 50 + 20 * idx
            q0 = (pu[0] + s * ox - 0.6 * s * oy, pu[1] + s * oy + 0.6 * s * ox)
            q1 = (pu[0] + s * ox + 0.6 * s * oy, pu[1] + s * oy - 0.6 * s * ox)
            d = f"M {_pts([pu])} C {_pts([q0, q1, pu])}"
            direction[(e.id, 0)] = (pu, q0)
            direction[(e.id, 1)] = (pv, q1)
        else:
            mx, my = (pu[0] + pv[0]) / 2, (pu[1] + pv[1]) / 2
            dx, dy = pv[0] - pu[0], pv[1] - pu[1]
            L = math.hypot(dx, dy) or 1.0
            off = (idx - 1) * 45 if u < v else -(idx - 1) * 45
            q = (mx - dy / L * off, my + dx / L * off)
            d = f"M {_pts([pu])} Q {_pts([q, pv])}"
            direction[(e.id, 0)] = (pu, q)
            direction[(e.id, 1)] = (pv, q)
        parts.append(f'<path class="branch" data-edge="{e.id}" data-sides="{e.faces[0]},{e.faces[1]}" '
                     f'd="{d}"/>\n')
    half = _half_edges(p, sp)
    corner_vertex = {c: v.id for v in sp.vertices for c in v.corners}
    for cell in sorted(osp.branch_cells, key=lambda c: c.id):
        c = cell.cusp
        v = corner_vertex[c]
        small = [half[(c, "start")], half[((c - 1) % n, "end")]]
        vec = [0.0, 0.0]
        for he in small:
            (ax, ay), (bx, by) = direction[he]
            L = math.hypot(bx - ax, by - ay) or 1.0
            vec[0] += (bx - ax) / L
            vec[1] += (by - ay) / L
        L = math.hypot(*vec) or 1.0
        ux, uy = vec[0] / L, vec[1] / L
        x, y = pos[v]
        tip = (x + 22 * ux, y + 22 * uy)
        w1 = (x + 10 * ux - 6 * uy, y + 10 * uy + 6 * ux)
        w2 = (x + 10 * ux + 6 * uy, y + 10 * uy - 6 * ux)
        parts.append(f'<path class="cusp" data-switch="{v}" data-corner="{c}" '
                     f'd="M {_pts([w1])} L {_pts([tip])} L {_pts([w2])} Z"/>\n')
    for v in sp.vertices:
        x, y = pos[v.id]
        parts.append(f'<circle class="switch" data-switch="{v.id}" data-valency="{v.valency}" '
                     f'cx="{_f(x)}" cy="{_f(y)}" r="7"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)


# ---------------------------------------------------------------------------
# leaves


@dataclass
class LeafPicture:
    """What to draw: the complex, the tiles of the patch and some leaves.

    `patches` holds (division, CoverPatch) pairs. `charts` maps positive
    faces to their SectorChart; when present a leaf face is pushed off its
    tile side according to its chart value.
    """

    complex: object
    tiles: Sequence[GroupElement]
    patches: Sequence = ()
    charts: dict = field(default_factory=dict)


def _planar(cx) -> bool:
    return cx.spec.family is Family.FREE_ABELIAN and cx.spec.rank == 2


def _corner_offsets(cx) -> list:
    """Corner positions of the identity tile as centroids of the tiles around each vertex."""
    pos = [None] * len(cx)
    for cyc in cx.corner_cycles():
        tiles = cx.cycle_tiles(cyc)[:-1]
        for i, c in enumerate(cyc):
            base = tiles[i].inverse()
            rel = [(base * t).exponents for t in tiles]
            pos[c] = (sum(r[0] for r in rel) / len(rel), sum(r[1] for r in rel) / len(rel))
    return pos


def _chain(segments: list) -> list:
    """Order segments ((key_a, key_b), payload) into paths through shared keys."""
    adj: dict = {}
    for i, (ends, _) in enumerate(segments):
        for k in ends:
            adj.setdefault(k, []).append(i)
    used = [False] * len(segments)
    out = []

    def walk(i, start):
        path = []
        k = start
        while i is not None and not used[i]:
            used[i] = True
            a, b = segments[i][0]
            fwd = a == k
            path.append((segments[i][1], fwd))
            k = b if fwd else a
            nxt = [j for j in adj[k] if not used[j]]
            i = nxt[0] if len(nxt) == 1 else None
        return path

    for i, (ends, _) in enumerate(segments):
        if not used[i] and any(len(adj[k]) != 2 for k in ends):
            k = ends[0] if len(adj[ends[0]]) != 2 else ends[1]
            out.append(walk(i, k))
    for i, (ends, _) in enumerate(segments):
        if not used[i]:
            out.append(walk(i, ends[0]))
    return out


def _leaves_svg(pic: LeafPicture) -> str:
    cx = pic.complex
    n = len(cx)
    W, H = 640, 640
    parts = [_HEAD.format(w=W, h=H), _STYLE]
    one = cx.spec.identity()
    if _planar(cx):
        offs = _corner_offsets(cx)
        tiles = sorted(set(pic.tiles) | {one}, key=lambda t: (t.length(), t.word))
        span = max([max(abs(t.exponents[0]), abs(t.exponents[1])) for t in tiles] + [1]) + 1
        scale = (W / 2 - 20) / span

        def corner(t, c):
            x, y = t.exponents
            ox, oy = offs[c]
            return (W / 2 + (x + ox) * scale, H / 2 - (y + oy) * scale)
    else:
        tiles = [one]
        poly = _regular(n, W / 2, H / 2, W / 2 - 60)

        def corner(t, c):
            return poly[c]
    for t in tiles:
        pts = [corner(t, c) for c in range(n)]
        parts.append(f'<polygon class="tile" data-tile="{escape(str(t))}" points="{_pts(pts)}"/>\n')
    shown = set(tiles)
    for k, (C, patch) in enumerate(pic.patches):
        segs = []
        for lf in patch.faces:
            if lf.inside not in shown and lf.outside not in shown:
                continue
            t, f = (lf.inside, lf.face) if lf.inside in shown else (lf.outside, cx.pair(lf.face))
            a, b = corner(t, f), corner(t, (f + 1) % n)
            key = lambda q: (round(q[0], 3), round(q[1], 3))
            segs.append(((key(a), key(b)), (a, b, _leaf_value(pic, C, lf))))
        for path in _chain(segs):
            pts = []
            for (a, b, v), fwd in path:
                a2, b2 = _push(a, b, v)
                pts += [a2, b2] if fwd else [b2, a2]
            parts.append(f'<polyline class="leaf" data-leaf="{escape(patch.division)}" '
                         f'data-index="{k}" points="{_pts(pts)}"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def _leaf_value(pic: LeafPicture, C, lf) -> float:
    """Chart value of the leaf at face lf, or 1/2 when no chart holds it."""
    ch = pic.charts.get(lf.face)
    if ch is None:
        return 0.5
    key = (C.kind, lf.inside.inverse() * C.g)
    v = ch.values.get(key)
    return 0.5 if v is None else float(v)


def _push(a, b, v: float):
    """Shift segment ab to the right of its direction by (v - 1/2) of a small width."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    L = math.hypot(dx, dy) or 1.0
    s = (v - 0.5) * 0.3 * L
    nx, ny = dy / L * s, -dx / L * s
    return (a[0] + nx, a[1] + ny), (b[0] + nx, b[1] + ny)


def render_svg(obj, out_path=None) -> str:
    """Render an OrientedSpine or a LeafPicture of a 2-dimensional complex."""
    cx = obj.complex
    if cx.dimension != 2:
        raise WrongDimension("only 2-dimensional complexes are drawn")
    if isinstance(obj, OrientedSpine):
        return _write(_spine_svg(obj), out_path)
    if isinstance(obj, LeafPicture):
        return _write(_leaves_svg(obj), out_path)
    raise TypeError(f"cannot render {type(obj).__name__}")
