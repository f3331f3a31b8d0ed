"""Leaves through the branch sectors, their gluing across branch cells, and the leaf space.

For a positive face F of the domain with label g, the leaves l_C through F
are those with Hbar <= C <= gH: C holds 1 and misses g. Each chart numbers
them by rescaling e affinely onto [0, 1]. Crossing a branch cell, a leaf
through t_h(F_i) is carried to the leaf of hC through F, which gives the
point maps d and their extensions delta across gaps.

Gap leaves (leaves of the lamination lying strictly inside a gap of e) are
kept symbolically as (g, mu): the gap between gH and gHbar and a position
mu in (0, 1).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .branched import BranchCell, DoublePoint, OrientedSpine, _label
from .divisions import CheckReport, DivisionFamily, Kind, TruncatedDivision
from .errors import (
    BadLocalModel,
    GapTypeMismatch,
    InconsistentMu,
    MemberNotFound,
    PairingOutsideBall,
    UndecidedOrder,
)
from .group_order import Cmp, GroupElement, OrderOracle, Undecided, ball


class GapType(str, enum.Enum):
    OPEN = "(a,b)"
    CLOSED_LEFT = "[a,b)"
    CLOSED_RIGHT = "(a,b]"


def mu_in_gap(t: Fraction, a: Fraction, b: Fraction, kind: GapType = GapType.OPEN) -> Fraction:
    """The transverse parameter of t in the gap from a to b.

    Closed ends carry mu = 0 on the left and mu = 1 on the right.
    """
    if not a < b:
        raise ValueError("empty gap")
    lo_ok = a < t or (kind is GapType.CLOSED_LEFT and t == a)
    hi_ok = t < b or (kind is GapType.CLOSED_RIGHT and t == b)
    if not (lo_ok and hi_ok):
        raise ValueError(f"{t} is not in the {kind.value} gap from {a} to {b}")
    return (t - a) / (b - a)


def point_in_gap(mu: Fraction, a: Fraction, b: Fraction) -> Fraction:
    return a + mu * (b - a)


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class SectorChart:
    face: int
    g: GroupElement
    psi: tuple
    values: dict
    doubled: bool = False

    def value(self, C: TruncatedDivision) -> Fraction:
        return self.values[C.key]

    def __contains__(self, key) -> bool:
        return key in self.values

    @property
    def sorted_values(self) -> list:
        return [self.values[m.key] for m in self.psi]

    def gaps(self) -> list:
        """Consecutive members gH, gHbar of the chart."""
        return [
            (a, b) for a, b in zip(self.psi, self.psi[1:])
            if a.kind is Kind.OPEN and b.kind is Kind.CLOSED and a.g == b.g
        ]

    def locate(self, t: Fraction):
        """('value', C), ('gap', a, b) for a partner gap, or ('open', a, b) otherwise."""
        vals = self.sorted_values
        if not 0 <= t <= 1:
            raise ValueError(f"{t} is outside the chart")
        for k, v in enumerate(vals):
            if v == t:
                return ("value", self.psi[k])
            if v > t:
                a, b = self.psi[k - 1], self.psi[k]
                if a.kind is Kind.OPEN and b.kind is Kind.CLOSED and a.g == b.g:
                    return ("gap", a, b)
                return ("open", a, b)
        raise ValueError(f"{t} is past the last chart value")

    def as_dict(self) -> dict:
        return {
            "face": self.face,
            "g": str(self.g),
            "doubled": self.doubled,
            "psi": [[str(m), self.values[m.key]] for m in self.psi],
        }


def chart_for_label(F: int, g: GroupElement, family: DivisionFamily) -> SectorChart:
    """The chart of a face labelled g > 1, straight from the family.

    Membership is tested on witnesses: Hbar <= C <= gH. When the chart has
    only two members with the same witness (g follows 1 in the ball) the
    chart is a doubled pair carrying a single leaf, numbered 0 and 1.
    """
    if g not in family.rank:
        raise PairingOutsideBall(f"label {g} of face {F} is outside the radius-{family.radius} ball")
    lo = family.H_bar
    hi = family.find(Kind.OPEN, g)
    if not family.position(lo) < family.position(hi):
        raise BadLocalModel(f"face {F}: label {g} is not positive")
    psi = tuple(m for m in family if lo.witness <= m.witness <= hi.witness)
    e0, e1 = family.e(lo), family.e(hi)
    values = {m.key: (family.e(m) - e0) / (e1 - e0) for m in psi}
    doubled = len({m.witness for m in psi}) == 1
    return SectorChart(F, g, psi, values, doubled)


def build_chart(F: int, family: DivisionFamily, osp: OrientedSpine) -> SectorChart:
    """The leaves through a positive face, numbered by e rescaled onto [0, 1]."""
    if osp.sign(F) <= 0:
        raise BadLocalModel(f"face {F} is not positive")
    return chart_for_label(F, _label(osp.complex, F), family)


def build_charts(osp: OrientedSpine, family: DivisionFamily) -> dict:
    return {F: build_chart(F, family, osp) for F in osp.branch_sectors}


# ---------------------------------------------------------------------------
# gluing maps


@dataclass
class GluingMap:
    """d: e_dom(l_C) -> e_cod(l_{hC}) on the truncation, and its extension delta."""

    domain: SectorChart
    codomain: SectorChart
    h: GroupElement
    table: dict
    unknown: list = field(default_factory=list)
    missing: list = field(default_factory=list)

    def d(self, t: Fraction) -> Fraction | None:
        return self.table.get(t)

    def delta(self, t: Fraction) -> Fraction | None:
        """Exact on chart values, affine across partner gaps; None when not decided."""
        if t in self.table:
            return self.table[t]
        where = self.domain.locate(t)
        if where[0] != "gap":
            return None
        a, b = (self.table.get(self.domain.value(m)) for m in where[1:])
        if a is None or b is None:
            return None
        ta, tb = (self.domain.value(m) for m in where[1:])
        return point_in_gap(mu_in_gap(t, ta, tb), a, b)

    def order_preserving(self) -> bool:
        items = sorted(self.table.items())
        return all(x[1] < y[1] for x, y in zip(items, items[1:]))

    def summary(self) -> dict:
        return {
            "domain": self.domain.face,
            "codomain": self.codomain.face,
            "h": str(self.h),
            "decided": len(self.table),
            "unknown": len(self.unknown),
            "order_preserving": self.order_preserving(),
        }


class GluingAtlas:
    """Point maps between charts, built on demand and cached.

    get(F1, F2, h) maps the leaves through t_h(F1) to their numbers in the
    chart of F2. A member whose translate leaves the ball is recorded as
    unknown; one whose translate lands outside the target chart is skipped,
    or recorded as missing when the map is expected to be total.
    """

    def __init__(self, charts: dict, family: DivisionFamily):
        self.charts = charts
        self.family = family
        self._maps: dict = {}

    def chart(self, F: int) -> SectorChart:
        try:
            return self.charts[F]
        except KeyError:
            raise BadLocalModel(f"no chart for face {F}") from None

    def get(self, F1: int, F2: int, h: GroupElement, total: bool = False) -> GluingMap:
        key = (F1, F2, h, total)
        if key not in self._maps:
            dom, cod = self.chart(F1), self.chart(F2)
            m = GluingMap(dom, cod, h, {})
            for C in dom.psi:
                hC = self.family.translate(h, C)
                if hC is None:
                    m.unknown.append(C)
                elif hC.key in cod:
                    m.table[dom.value(C)] = cod.value(hC)
                elif total:
                    m.missing.append(C)
            self._maps[key] = m
        return self._maps[key]


def build_gluing(cell: BranchCell, osp: OrientedSpine, atlas: GluingAtlas) -> tuple:
    """The two maps at a branch cell: from F1 through h1 and from F2 through h2 = 1."""
    cx = osp.complex
    one = cx.spec.identity()
    if cell.h2 != one:
        raise BadLocalModel(f"branch cell {cell.id}: the sheet F2 is not on the domain")
    if _label(cx, cell.F2) != cell.h1 or cell.h1 * _label(cx, cell.F1) != _label(cx, cell.F):
        raise BadLocalModel(f"branch cell {cell.id}: sheets do not share an edge")
    if not all(osp.sign(f) > 0 for f in (cell.F, cell.F1, cell.F2)):
        raise BadLocalModel(f"branch cell {cell.id}: a sheet is negative")
    return (atlas.get(cell.F1, cell.F, cell.h1, total=True),
            atlas.get(cell.F2, cell.F, cell.h2, total=True))


def gluing_check(cell: BranchCell, maps: tuple, family: DivisionFamily) -> CheckReport:
    """Order, injectivity, coverage of the codomain chart, and gap matching."""
    rep = CheckReport()
    cod = maps[0].codomain
    for i, m in enumerate(maps, 1):
        rep.count("maps")
        if not m.order_preserving():
            rep.add("NotOrderPreserving", f"cell {cell.id} side {i}")
        if len(set(m.table.values())) != len(m.table):
            rep.add("NotInjective", f"cell {cell.id} side {i}")
        for C in m.missing:
            rep.add("TranslateOutsideChart", f"cell {cell.id} side {i}: {C}")
        rep.unknown += [(cell.id, i, str(C)) for C in m.unknown]
        # partner gaps go to partner gaps
        for a, b in m.domain.gaps():
            ha, hb = family.translate(m.h, a), family.translate(m.h, b)
            if ha is None or hb is None:
                continue
            rep.count("gaps")
            if ha.key not in cod or hb.key not in cod:
                continue
            where = cod.locate((cod.value(ha) + cod.value(hb)) / 2)
            if where[0] != "gap" or where[1].key != ha.key or where[2].key != hb.key:
                rep.add("GapTypeMismatch", f"cell {cell.id} side {i}: {a}, {b}")
    image = set(maps[0].table.values()) | set(maps[1].table.values())
    inv1 = maps[0].h.inverse()
    for C in cod.psi:
        rep.count("coverage")
        if cod.value(C) in image:
            continue
        # leaves above m Hbar come from the F1 side, the rest from F2
        back = family.translate(inv1, C)
        mH_bar = family.get(Kind.CLOSED, maps[0].h)
        above = mH_bar is not None and mH_bar.witness <= C.witness
        if (above and back is None) or mH_bar is None:
            rep.unknown.append((cell.id, "coverage", str(C)))
        else:
            rep.add("NotCovered", f"cell {cell.id}: {C}")
    return rep


# ---------------------------------------------------------------------------
# double points


def double_point_compatibility(dp: DoublePoint, atlas: GluingAtlas) -> CheckReport:
    """The cocycle identity d13 = d23 . d12 for every triple of sheets at a double point.

    Sheets t_x(F) are read in the frame of the third sheet. The common
    family Psi of leaves through all three sheets is formed in the chart of
    the third; triples with empty Psi are counted as vacuous.
    """
    rep = CheckReport()
    fam = atlas.family
    rep.checked["vacuous"] = 0
    for s1, s2, s3 in itertools.permutations(dp.sheets, 3):
        base = s3.tile.inverse()
        h1, h2 = base * s1.tile, base * s2.tile
        ch1, ch2, ch3 = atlas.chart(s1.face), atlas.chart(s2.face), atlas.chart(s3.face)
        psi = []
        for C in ch3.psi:
            c1, c2 = fam.translate(h1.inverse(), C), fam.translate(h2.inverse(), C)
            if c1 is None or c2 is None:
                rep.unknown.append((dp.id, str(C)))
                continue
            if c1.key in ch1 and c2.key in ch2:
                psi.append((C, c1))
        if not psi:
            rep.checked["vacuous"] += 1
            continue
        d13 = atlas.get(s1.face, s3.face, h1)
        d23 = atlas.get(s2.face, s3.face, h2)
        d12 = atlas.get(s1.face, s2.face, h2.inverse() * h1)
        for C, c1 in psi:
            t1 = ch1.value(c1)
            direct = d13.d(t1)
            mid = d12.d(t1)
            composed = None if mid is None else d23.d(mid)
            rep.count("compositions")
            if mid is not None and composed is None and mid not in ch2.values.values():
                rep.add("Cocycle", f"double point {dp.id}: {C} is sent off the chart of face {s2.face}")
            elif direct is None or composed is None:
                rep.unknown.append((dp.id, str(C)))
            elif direct != composed:
                rep.add("Cocycle", f"double point {dp.id}: {C} goes to {direct} and {composed}")
        # the extensions agree across the partner gaps inside the common range
        keys = {c1.key for _, c1 in psi}
        for a, b in ch1.gaps():
            if a.key in keys and b.key in keys:
                t = (ch1.value(a) + ch1.value(b)) / 2
                mid = d12.delta(t)
                direct = d13.delta(t)
                composed = None if mid is None else d23.delta(mid)
                rep.count("gap_compositions")
                if direct is None or composed is None:
                    rep.unknown.append((dp.id, f"gap {a.g}"))
                elif direct != composed:
                    rep.add("Cocycle", f"double point {dp.id}: gap at {a.g} goes to {direct} and {composed}")
    return rep


# ---------------------------------------------------------------------------
# leaves in the cover


def contains(C: TruncatedDivision, x: GroupElement, oracle: OrderOracle) -> bool:
    c = oracle.compare(x, C.g)
    if isinstance(c, Undecided):
        raise UndecidedOrder(f"{x} vs {C.g}: {c}")
    return c is Cmp.LT or (C.kind is Kind.CLOSED and c is Cmp.EQ)


@dataclass(frozen=True)
class LeafFace:
    inside: GroupElement
    face: int
    outside: GroupElement


@dataclass
class CoverPatch:
    """The part of l_C = boundary of R_C seen in the tiles of a Cayley ball.

    faces are co-oriented from `inside` (in R_C) to `outside`. Faces whose
    outer tile lies beyond the patch are listed in `horizon`; components
    touching a cell not surrounded by patch tiles are open at the horizon,
    the others are closed.
    """

    division: str
    radius: int
    tiles: frozenset
    region: frozenset
    faces: tuple
    horizon: tuple
    components: list
    closed: list
    sign_violations: list

    def translated(self, h: GroupElement) -> set:
        return {(h * f.inside, f.face, h * f.outside) for f in self.faces}

    def summary(self) -> dict:
        return {
            "division": self.division,
            "radius": self.radius,
            "tiles": len(self.tiles),
            "region": len(self.region),
            "faces": len(self.faces),
            "horizon_faces": len(self.horizon),
            "components": len(self.components),
            "closed_components": len(self.closed),
            "sign_violations": len(self.sign_violations),
        }


def _cover_cells_2d(cx, x: GroupElement, f: int) -> list:
    """Cover vertices at the two ends of side f of tile x, as sets of (tile, corner)."""
    out = []
    n = len(cx.sides)
    for c in (f, (f + 1) % n):
        cyc = next(cy for cy in cx.corner_cycles() if c in cy)
        tiles = cx.cycle_tiles(cyc)
        base = x * tiles[cyc.index(c)].inverse()
        out.append(frozenset((base * tiles[m], cyc[m]) for m in range(len(cyc))))
    return out


def _cover_cells_3d(cx, x: GroupElement, f: int) -> list:
    """Cover edges along face f of tile x, as sets of (tile, domain edge)."""
    out = []
    for s in cx.faces[f]:
        wings = cx.wing_cycle(s)
        g = x
        cell = []
        for w in wings:
            cell.append((g, cx.slots[w][0]))
            g = g * cx.label[cx.slot_face[cx.other(w)]]
        out.append(frozenset(cell))
    return out


def assemble_leaf(C: TruncatedDivision, radius: int, oracle: OrderOracle, complex,
                  signs: dict | None = None) -> CoverPatch:
    cx = complex
    tiles = frozenset(ball(cx.spec, radius))
    region = frozenset(x for x in tiles if contains(C, x, oracle))
    face_ids = list(range(len(cx.sides))) if cx.dimension == 2 else sorted(cx.faces)
    faces, horizon, bad_sign = [], [], []
    for x in sorted(region, key=lambda t: (t.length(), t.word)):
        for f in face_ids:
            y = x * _label(cx, f)
            if y not in tiles:
                horizon.append((x, f))
                continue
            if y in region:
                continue
            faces.append(LeafFace(x, f, y))
            if signs is not None and signs[f] <= 0:
                bad_sign.append((x, f))
    cells = _cover_cells_2d if cx.dimension == 2 else _cover_cells_3d
    parent = list(range(len(faces)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict = {}
    open_faces = set()
    for i, lf in enumerate(faces):
        for cell in cells(cx, lf.inside, lf.face):
            if not all(t in tiles for t, _ in cell):
                open_faces.add(i)
                continue
            if cell in owner:
                parent[find(i)] = find(owner[cell])
            else:
                owner[cell] = i
    comps: dict = {}
    for i in range(len(faces)):
        comps.setdefault(find(i), []).append(i)
    components = [tuple(faces[i] for i in idx) for idx in comps.values()]
    closed = [k for k, idx in enumerate(comps.values()) if not open_faces.intersection(idx)]
    return CoverPatch(str(C), radius, tiles, region, tuple(faces), tuple(horizon),
                      components, closed, bad_sign)


# ---------------------------------------------------------------------------
# the leaf space and the immersion


@dataclass(frozen=True)
class GapLeaf:
    g: GroupElement
    mu: Fraction


@dataclass
class LeafSpacePatch:
    family: DivisionFamily
    gaps: dict
    report: CheckReport

    def i_division(self, C: TruncatedDivision) -> Fraction:
        return self.family.e(C)

    def i_gap(self, leaf: GapLeaf) -> Fraction:
        a, b, kind = self.gaps[leaf.g]
        if kind is GapType.OPEN and not 0 < leaf.mu < 1:
            raise ValueError("a leaf inside an open gap has 0 < mu < 1")
        return point_in_gap(leaf.mu, a, b)

    def summary(self) -> dict:
        return {
            "division_leaves": len(self.family),
            "gap_components": len(self.gaps),
            "check": self.report.as_dict(),
        }


SAMPLE_MU = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))


def build_immersion(charts: dict, atlas: GluingAtlas, family: DivisionFamily) -> LeafSpacePatch:
    """i = e on division leaves; each gap (gH, gHbar) is filled affinely in mu.

    Every gap of a coset family has both ends attained, the first of the
    three cases, so its target is the open interval (e(gH), e(gHbar)).
    """
    rep = CheckReport()
    gaps = {}
    for a, b in family.gaps:
        gaps[a.g] = (family.e(a), family.e(b), GapType.OPEN)
    patch = LeafSpacePatch(family, gaps, rep)
    # gap types seen in the charts agree with the global ones
    for F, ch in sorted(charts.items()):
        for a, b in ch.gaps():
            if gaps.get(a.g, (None, None, None))[2] is not GapType.OPEN:
                raise GapTypeMismatch(f"chart {F}: gap at {a.g} has no open target")
            rep.count("chart_gaps")
        # strict monotonicity of i along each chart, gap leaves included
        seq = []
        for m in ch.psi:
            seq.append((ch.value(m), patch.i_division(m)))
        for a, b in ch.gaps():
            for mu in SAMPLE_MU:
                t = point_in_gap(mu, ch.value(a), ch.value(b))
                seq.append((t, patch.i_gap(GapLeaf(a.g, mu))))
        seq.sort()
        if any(x[1] >= y[1] for x, y in zip(seq, seq[1:])):
            rep.add("NotMonotone", f"chart {F}")
        rep.count("charts")
    # i = e on division leaves, by construction; checked against e directly
    for m in family:
        if patch.i_division(m) != family.e_values[m.key]:
            rep.add("NotE", str(m))
    # equivariance: t_h carries the gap at g to the gap at hg with the same mu
    for g in gaps:
        for h in family.ball:
            hg = h * g
            if hg not in gaps:
                continue
            for mu in SAMPLE_MU:
                v = patch.i_gap(GapLeaf(hg, mu))
                a, b, kind = gaps[hg]
                if not a < v < b or mu_in_gap(v, a, b, kind) != mu:
                    rep.add("Equivariance", f"gap {g} moved by {h}")
            rep.count("equivariance")
    return patch


def leaf_incidences(leaf: GapLeaf, charts: dict, family: DivisionFamily) -> list:
    """(x, F): the gap leaf crosses t_x(F), read in the chart of F at the gap x^-1 g."""
    out = []
    for x in family.ball:
        k = x.inverse() * leaf.g
        for F, ch in sorted(charts.items()):
            if (Kind.OPEN, k) in ch and (Kind.CLOSED, k) in ch:
                out.append((x, F))
    return out


def mu_of_leaf(leaf: GapLeaf, charts: dict, atlas: GluingAtlas, family: DivisionFamily,
               gluings: Iterable = ()) -> Fraction:
    """mu of a gap leaf, read in every chart it crosses and through every gluing.

    Each reading locates the chart coordinate of the leaf among the chart
    values and takes its position in the gap found there. All readings must
    agree.
    """
    readings = []
    incid = leaf_incidences(leaf, charts, family)
    if not incid:
        raise MemberNotFound(f"no chart carries the gap at {leaf.g}")
    for x, F in incid:
        ch = charts[F]
        k = x.inverse() * leaf.g
        a, b = ch.values[(Kind.OPEN, k)], ch.values[(Kind.CLOSED, k)]
        t = point_in_gap(leaf.mu, a, b)
        where = ch.locate(t)
        if where[0] != "gap":
            raise InconsistentMu(f"chart {F} does not see a gap at {t}")
        readings.append(("chart", F, mu_in_gap(t, ch.value(where[1]), ch.value(where[2]))))
        for m in gluings:
            if m.domain.face != F:
                continue
            t2 = m.delta(t)
            if t2 is None:
                continue
            w2 = m.codomain.locate(t2)
            if w2[0] != "gap":
                raise InconsistentMu(f"delta from chart {F} lands on {w2[0]} in chart {m.codomain.face}")
            readings.append(("delta", m.codomain.face,
                             mu_in_gap(t2, m.codomain.value(w2[1]), m.codomain.value(w2[2]))))
    values = {r[2] for r in readings}
    if len(values) != 1:
        raise InconsistentMu(f"gap leaf at {leaf.g}: readings {sorted(values)}")
    return values.pop()
