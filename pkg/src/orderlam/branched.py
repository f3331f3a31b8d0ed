"""Co-orientation of the spine by the order, branched local models and cusp data.

A face F of the domain with F inside Gamma and t_h(Gamma) is positive when
h > 1, so every sheet of the lifted spine is co-oriented from the smaller
tile towards the larger one. Around a trivalent branch cell the three tiles
m0 < m1 < m2 meet; the middle tile sees one positive and one negative side,
and that corner (or wedge, in dimension 3) is the cusp.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from .complex import Spine, ValidationReport, spine as build_spine
from .errors import BadLocalModel, UndecidedOrder, WrongDimension
from .group_order import Cmp, GroupElement, OrderOracle, Undecided, compare


@dataclass(frozen=True)
class Sheet:
    """A lifted face t_tile(F) with F positive, so it separates tile from tile * label(F)."""

    tile: GroupElement
    face: int


@dataclass(frozen=True)
class BranchCell:
    """A switch (dimension 2) or branch edge (dimension 3) in the local model.

    The sheets big, small_1 and small_2 are written in the frame of the
    smallest tile: big = F joins 1 to M, small_2 = F2 joins 1 to m, and
    small_1 = t_m(F1) joins m to M, with 1 < m < M. The cusp points out of
    F1 and F2 and into F.
    """

    id: int
    F: int
    F1: int
    F2: int
    h1: GroupElement
    h2: GroupElement
    cusp: object  # domain corner (2D) or domain edge (3D) sitting in the middle tile
    tiles: tuple  # min, mid, max in the frame of the domain copy used to find them


@dataclass(frozen=True)
class DoublePoint:
    id: int
    vertex: int
    sheets: tuple  # Sheets in the frame of the smallest tile
    tiles: tuple  # the four tiles in increasing order, smallest is 1


@dataclass
class OrientedSpine:
    complex: object
    spine: Spine
    oracle: OrderOracle | None
    sector_signs: dict
    branch_cells: list = field(default_factory=list)
    double_points: list = field(default_factory=list)
    vertical_boundary: list = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.complex.dimension

    @property
    def cusp_data(self) -> list:
        return self.branch_cells

    @property
    def branch_sectors(self) -> list:
        return sorted(f for f, s in self.sector_signs.items() if s > 0)

    def sign(self, face: int) -> int:
        return self.sector_signs[face]


class Verdict(str, enum.Enum):
    EXTENDS = "ExtendsToTautFoliation"
    OBSTRUCTED = "Obstructed"


@dataclass(frozen=True)
class Extendability:
    verdict: Verdict
    components: int
    regions: tuple | None = None  # (positive, negative) face-region counts in 3D

    @property
    def extends(self) -> bool:
        return self.verdict is Verdict.EXTENDS

    def __str__(self):
        if self.extends:
            return self.verdict.value
        return f"{self.verdict.value}({self.components} components)"


# ---------------------------------------------------------------------------


def _is_less(a: GroupElement, b: GroupElement, oracle: OrderOracle) -> bool:
    c = compare(a, b, oracle)
    if isinstance(c, Undecided):
        raise UndecidedOrder(f"cannot compare {a} and {b}: {c}")
    return c is Cmp.LT


def _face_ids(cx) -> list:
    return list(range(len(cx.sides))) if cx.dimension == 2 else sorted(cx.faces)


def _label(cx, f) -> GroupElement:
    return cx.label(f) if cx.dimension == 2 else cx.label[f]


def _pair(cx, f) -> int:
    return cx.pair(f) if cx.dimension == 2 else cx.pair[f]


def face_signs(cx, oracle: OrderOracle) -> dict:
    """+1 for faces whose label is > 1; the sign is queried once per face pair."""
    signs = {}
    for f in _face_ids(cx):
        if f in signs:
            continue
        c = compare(cx.spec.identity(), _label(cx, f), oracle)
        if isinstance(c, Undecided):
            raise UndecidedOrder(f"sign of face {f} label {_label(cx, f)} is undecided")
        s = 1 if c is Cmp.LT else -1
        signs[f] = s
        signs[_pair(cx, f)] = -s
    return signs


def _positive_sheet(cx, signs, tile, face) -> Sheet:
    if signs[face] > 0:
        return Sheet(tile, face)
    return Sheet(tile * _label(cx, face), _pair(cx, face))


def _cell_from_ring(cx, signs, oracle, ident, ring, cusp_of):
    """Build the local model from tiles g_0..g_2 and the faces crossed between them.

    ring[m] = (g_m, face crossed from g_m to g_{m+1}, domain cell at g_m).
    """
    tiles = [g for g, _, _ in ring]
    order = sorted(range(3), key=lambda m: _Key(tiles[m], oracle))
    lo, mid, hi = order
    m0 = tiles[lo]
    inv = m0.inverse()
    sheets = {}
    for m, (g, f, _) in enumerate(ring):
        a, b = m, (m + 1) % 3
        sh = _positive_sheet(cx, signs, g, f)
        sheets[frozenset((a, b))] = Sheet(inv * sh.tile, sh.face)
    big = sheets[frozenset((lo, hi))]
    s2 = sheets[frozenset((lo, mid))]
    s1 = sheets[frozenset((mid, hi))]
    one = cx.spec.identity()
    if big.tile != one or s2.tile != one:
        raise BadLocalModel(f"branch cell {ident}: sheets at the smallest tile are misplaced")
    return BranchCell(ident, big.face, s1.face, s2.face, s1.tile, s2.tile,
                      cusp_of(ring[mid][2]), (tiles[lo], tiles[mid], tiles[hi]))


class _Key:
    __slots__ = ("g", "o")

    def __init__(self, g, o):
        self.g, self.o = g, o

    def __lt__(self, other):
        return _is_less(self.g, other.g, self.o)


def orient(cx, oracle: OrderOracle) -> OrientedSpine:
    sp = build_spine(cx)
    signs = face_signs(cx, oracle)
    out = OrientedSpine(cx, sp, oracle, signs)
    if cx.dimension == 2:
        _orient_2d(out)
    else:
        _orient_3d(out)
    return out


def _orient_2d(osp: OrientedSpine) -> None:
    cx, signs, oracle = osp.complex, osp.sector_signs, osp.oracle
    for k, cyc in enumerate(cx.corner_cycles()):
        if len(cyc) != 3:
            continue
        tiles = cx.cycle_tiles(cyc)
        ring = [(tiles[m], cyc[m], cyc[m]) for m in range(3)]
        osp.branch_cells.append(_cell_from_ring(cx, signs, oracle, k, ring, lambda c: c))
    osp.vertical_boundary = [[c] for c in cusp_corners(osp)]


def _orient_3d(osp: OrientedSpine) -> None:
    cx, signs, oracle = osp.complex, osp.sector_signs, osp.oracle
    for se in osp.spine.edges:
        if se.valency != 3:
            continue
        start = min(s for e in se.faces for s in cx.edge_slots[e])
        wings = cx.wing_cycle(start)
        g = cx.spec.identity()
        ring = []
        for w in wings:
            f = cx.slot_face[cx.other(w)]
            ring.append((g, f, cx.slots[w][0]))
            g = g * cx.label[f]
        osp.branch_cells.append(_cell_from_ring(cx, signs, oracle, se.id, ring, lambda e: e))
    for sv in osp.spine.vertices:
        if sv.valency != 4:
            continue
        tiles = cx.vertex_tiles(sv.corners)
        sheets = set()
        for c in cx.corners():
            u = cx.corner_vertex(c)
            if u in tiles:
                sheets.add(_positive_sheet(cx, signs, tiles[u], c[0]))
        ts = sorted(set(tiles.values()), key=lambda x: _Key(x, oracle))
        inv = ts[0].inverse()
        norm = tuple(sorted((Sheet(inv * s.tile, s.face) for s in sheets), key=lambda s: (s.face, s.tile.word)))
        osp.double_points.append(DoublePoint(sv.id, min(sv.corners), norm, tuple(inv * t for t in ts)))
    osp.vertical_boundary = interface_cycles(cx, signs)


# ---------------------------------------------------------------------------
# diagnostics


def cusp_corners(osp: OrientedSpine) -> list:
    """Corners of the polygon whose two sides carry opposite signs."""
    cx, s = osp.complex, osp.sector_signs
    n = len(cx.sides)
    return [c for c in range(n) if s[(c - 1) % n] != s[c]]


def interface_edges(cx, signs) -> list:
    """Domain edges where a positive face meets a negative one."""
    out = []
    for e in sorted(cx.edges):
        a, b = cx.edge_slots[e]
        if signs[cx.slot_face[a]] != signs[cx.slot_face[b]]:
            out.append(e)
    return out


def interface_cycles(cx, signs) -> list:
    """Closed curves on the domain boundary separating positive and negative faces.

    Each curve is the trace of one component of the vertical boundary on
    the cut-open manifold. Curves must be disjoint, so every vertex meets
    zero or two interface edges.
    """
    edges = interface_edges(cx, signs)
    at: dict = {}
    for e in edges:
        for v in cx.edges[e]:
            at.setdefault(v, []).append(e)
    for v, es in at.items():
        if len(es) != 2:
            raise BadLocalModel(f"{len(es)} cusp arcs meet at domain vertex {v}")
    seen = set()
    cycles = []
    for e in edges:
        if e in seen:
            continue
        cyc = []
        v = cx.edges[e][0]
        cur = e
        while cur not in seen:
            seen.add(cur)
            cyc.append(cur)
            t, h = cx.edges[cur]
            v = h if v == t else t
            a, b = at[v]
            cur = b if a == cur else a
        cycles.append(cyc)
    return cycles


def face_regions(cx, signs) -> tuple[int, int]:
    """Connected components of the union of positive, and of negative, faces."""
    parent = {f: f for f in cx.faces}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in cx.edges:
        a, b = cx.edge_slots[e]
        fa, fb = cx.slot_face[a], cx.slot_face[b]
        if signs[fa] == signs[fb]:
            parent[find(fa)] = find(fb)
    pos = {find(f) for f in cx.faces if signs[f] > 0}
    neg = {find(f) for f in cx.faces if signs[f] < 0}
    return len(pos), len(neg)


def cusp_count(osp: OrientedSpine) -> int:
    if osp.dimension != 2:
        raise WrongDimension("cusps of the complementary region are counted for train tracks")
    return len(cusp_corners(osp))


def vertical_boundary_components(osp: OrientedSpine) -> int:
    if osp.dimension != 3:
        raise WrongDimension("the vertical boundary is traced on branched surfaces")
    return len(osp.vertical_boundary)


def extendability(osp: OrientedSpine) -> Extendability:
    if osp.dimension == 2:
        k = cusp_count(osp)
        return Extendability(Verdict.EXTENDS if k == 2 else Verdict.OBSTRUCTED, k)
    k = vertical_boundary_components(osp)
    pos, neg = face_regions(osp.complex, osp.sector_signs)
    if (k == 1) != (pos == 1 and neg == 1):
        raise BadLocalModel("cusp curves disagree with the face regions")
    return Extendability(Verdict.EXTENDS if k == 1 else Verdict.OBSTRUCTED, k, (pos, neg))


# ---------------------------------------------------------------------------
# local model check


def check_branched(osp: OrientedSpine) -> ValidationReport:
    rep = ValidationReport()
    cx, signs = osp.complex, osp.sector_signs
    for f in _face_ids(cx):
        if signs[f] == signs[_pair(cx, f)]:
            rep.add("OppositeSignViolation", f"faces {f} and {_pair(cx, f)} both have sign {signs[f]}")
    if osp.dimension == 2:
        _check_switches(osp, rep)
    else:
        _check_edges(osp, rep)
        _check_double_points(osp, rep)
    return rep


def _check_switches(osp, rep):
    cx, signs = osp.complex, osp.sector_signs
    n = len(cx.sides)
    for k, cyc in enumerate(cx.corner_cycles()):
        if len(cyc) != 3:
            rep.add("NotTrivalent", f"vertex {k} has valency {len(cyc)}")
            continue
        mixed = [c for c in cyc if signs[(c - 1) % n] != signs[c]]
        if len(mixed) != 1:
            rep.add("SwitchModel", f"switch {k} has {len(mixed)} cusp corners")
    cells = {c.id: c for c in osp.branch_cells}
    for k, cyc in enumerate(cx.corner_cycles()):
        if k in cells and signs[(cells[k].cusp - 1) % n] == signs[cells[k].cusp]:
            rep.add("CuspPlacement", f"switch {k}: the middle tile corner is not a cusp")


def _check_edges(osp, rep):
    cx, signs = osp.complex, osp.sector_signs
    for se in osp.spine.edges:
        if se.valency != 3:
            rep.add("NotTrivalent", f"spine edge {se.id} has valency {se.valency}")
            continue
        mixed = []
        for e in se.faces:
            a, b = cx.edge_slots[e]
            if signs[cx.slot_face[a]] != signs[cx.slot_face[b]]:
                mixed.append(e)
        if len(mixed) != 1:
            rep.add("EdgeModel", f"spine edge {se.id} has {len(mixed)} cusp wedges")
    for cell in osp.branch_cells:
        a, b = cx.edge_slots[cell.cusp]
        if signs[cx.slot_face[a]] == signs[cx.slot_face[b]]:
            rep.add("CuspPlacement", f"branch edge {cell.id}: the middle tile wedge is not a cusp")


def _check_double_points(osp, rep):
    cx, signs = osp.complex, osp.sector_signs
    for sv in osp.spine.vertices:
        if sv.valency not in (2, 4):
            rep.add("VertexModel", f"spine vertex {sv.id} has valency {sv.valency}")
    corners = cx.corners()
    for dp in osp.double_points:
        orbit = set(next(v.corners for v in osp.spine.vertices if v.id == dp.id))
        patterns = []
        for u in sorted(orbit):
            ss = [signs[c[0]] for c in corners if cx.corner_vertex(c) == u]
            patterns.append((min(ss), max(ss)))
        # the four tiles at a double point are ordered: the smallest sees only
        # positive faces, the largest only negative ones, the other two both
        if sorted(patterns) != [(-1, -1), (-1, 1), (-1, 1), (1, 1)]:
            rep.add("DoublePointModel", f"spine vertex {dp.id} corner signs {sorted(patterns)}")
        if len(dp.sheets) != 6:
            rep.add("DoublePointModel", f"spine vertex {dp.id} has {len(dp.sheets)} sheets")


def with_signs(osp: OrientedSpine, signs: dict) -> OrientedSpine:
    """A copy with replaced face signs and recomputed cusp curves (for tests and tooling)."""
    out = OrientedSpine(osp.complex, osp.spine, osp.oracle, dict(signs),
                        list(osp.branch_cells), list(osp.double_points))
    if osp.dimension == 2:
        out.vertical_boundary = [[c] for c in cusp_corners(out)]
    else:
        out.vertical_boundary = interface_cycles(osp.complex, out.sector_signs)
    return out


def unoriented(cx, signs: dict) -> OrientedSpine:
    """An oriented spine from explicit face signs, without an order oracle."""
    sp = build_spine(cx)
    return with_signs(OrientedSpine(cx, sp, None, {}), signs)
