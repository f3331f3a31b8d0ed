"""Fundamental-domain complexes with face pairings, their spines, and standardization.

A 2-dimensional domain is a polygon whose sides are glued in pairs; a
3-dimensional one is a polyhedron (see polyhedron.py). Each face F of the
domain is labelled by the unique h with F inside Gamma and t_h(Gamma), so
paired faces carry h and h^-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import AlreadyTrivalent, InvalidComplex, VertexAlreadyGood, WrongDimension
from .group_order import Family, GroupElement, GroupSpec


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    euler_characteristic: int | None = None
    genus: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: str) -> None:
        self.violations.append((kind, detail))

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"kind": k, "detail": d} for k, d in self.violations],
            "euler_characteristic": self.euler_characteristic,
            "genus": self.genus,
        }


def declared_genus(spec: GroupSpec) -> int | None:
    if spec.family is Family.SURFACE:
        return spec.rank
    if spec.family is Family.FREE_ABELIAN and spec.rank == 2:
        return 1
    return None


# ---------------------------------------------------------------------------
# polygons


@dataclass(frozen=True)
class Side:
    label: GroupElement
    pair: int
    name: str


@dataclass(frozen=True)
class Polygon:
    """A polygon with sides s_0 .. s_{n-1}; s_i runs from corner i to corner i+1.

    Sides are listed counterclockwise. Side i is glued to side pair(i) with
    reversed direction, and label(i) is the element whose tile lies across
    side i.
    """

    spec: GroupSpec
    sides: tuple
    genus: int | None = None

    dimension = 2

    @staticmethod
    def from_word(spec: GroupSpec, labels: Sequence, pairs: Sequence[int] | None = None,
                  names: Sequence[str] | None = None, genus: int | None = None) -> "Polygon":
        """Build from per-side labels (words or elements) and an optional pairing.

        Without `pairs`, side i is paired with the side carrying the inverse
        label; this must be unambiguous.
        """
        elems = [x if isinstance(x, GroupElement) else spec.element(x) for x in labels]
        n = len(elems)
        if pairs is None:
            pairs = []
            for i, x in enumerate(elems):
                js = [j for j, y in enumerate(elems) if j != i and y == x.inverse()]
                if len(js) != 1:
                    raise InvalidComplex(f"cannot infer the partner of side {i}")
                pairs.append(js[0])
        names = list(names) if names is not None else [f"s{i}" for i in range(n)]
        sides = tuple(Side(elems[i], pairs[i], names[i]) for i in range(n))
        return Polygon(spec, sides, genus if genus is not None else declared_genus(spec))

    def __len__(self):
        return len(self.sides)

    def label(self, i: int) -> GroupElement:
        return self.sides[i].label

    def pair(self, i: int) -> int:
        return self.sides[i].pair

    def next_corner(self, c: int) -> int:
        # crossing side c lands on side pair(c) in the next tile, whose
        # start is our corner c and whose end is corner pair(c) + 1
        return (self.sides[c].pair + 1) % len(self.sides)

    def corner_cycles(self) -> list[list[int]]:
        """Corners grouped by quotient vertex, each starting at its smallest corner."""
        n = len(self.sides)
        seen = [False] * n
        out = []
        for c in range(n):
            if seen[c]:
                continue
            cyc = []
            x = c
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = self.next_corner(x)
            if x != c:
                raise InvalidComplex("corner map is not a permutation")
            out.append(cyc)
        return out

    def cycle_tiles(self, cycle: Sequence[int]) -> list[GroupElement]:
        """Tiles g_0 = 1, g_1, ... met going around a vertex; the last entry returns to g_0."""
        g = self.spec.identity()
        out = [g]
        for c in cycle:
            g = g * self.sides[c].label
            out.append(g)
        return out


def _validate_polygon(p: Polygon) -> ValidationReport:
    rep = ValidationReport()
    n = len(p.sides)
    if n < 2 or n % 2:
        rep.add("OddSideCount", f"{n} sides")
    for i, s in enumerate(p.sides):
        if not 0 <= s.pair < n:
            rep.add("UnmatchedFace", f"side {i} has no partner")
            continue
        j = s.pair
        if j == i:
            rep.add("UnmatchedFace", f"side {i} is paired with itself")
        elif p.sides[j].pair != i:
            rep.add("NotInvolution", f"sides {i} and {j}")
        elif p.sides[j].label != s.label.inverse():
            rep.add("LabelMismatch", f"sides {i} and {j} are not labelled h, h^-1")
        if s.label.is_identity():
            rep.add("IdentityLabel", f"side {i}")
    if rep.violations:
        return rep
    try:
        cycles = p.corner_cycles()
    except InvalidComplex as exc:
        rep.add("CornerCycle", str(exc))
        return rep
    for cyc in cycles:
        if not p.cycle_tiles(cyc)[-1].is_identity():
            rep.add("VertexCycle", f"corners {cyc} do not close up")
    chi = len(cycles) - n // 2 + 1
    rep.euler_characteristic = chi
    if chi % 2 == 0 and chi <= 2:
        rep.genus = (2 - chi) // 2
    if p.genus is not None and chi != 2 - 2 * p.genus:
        rep.add("EulerCharacteristic", f"chi = {chi}, declared genus {p.genus}")
    return rep


@dataclass(frozen=True)
class SpineVertex:
    id: int
    corners: tuple
    valency: int


@dataclass(frozen=True)
class SpineEdge:
    id: int
    faces: tuple
    valency: int
    ends: tuple = ()


@dataclass
class Spine:
    """The quotient of the domain boundary with valency annotations.

    In dimension 2 sectors are the quotient edges (one per side pair) and
    vertices are the corner cycles. In dimension 3 see polyhedron.py.
    """

    dimension: int
    vertices: list
    edges: list
    sectors: list
    smoothed_vertices: int | None = None
    smoothed_edges: int | None = None
    vertexless_circles: int = 0

    def census(self) -> dict:
        out = {
            "vertices": len(self.vertices),
            "edges": len(self.edges),
            "sectors": len(self.sectors),
            "vertex_valencies": sorted(v.valency for v in self.vertices),
            "edge_valencies": sorted(e.valency for e in self.edges),
        }
        if self.smoothed_vertices is not None:
            out["smoothed_vertices"] = self.smoothed_vertices
            out["smoothed_edges"] = self.smoothed_edges
            out["vertexless_circles"] = self.vertexless_circles
        return out


def _polygon_spine(p: Polygon) -> Spine:
    cycles = p.corner_cycles()
    corner_vertex = {}
    verts = []
    for k, cyc in enumerate(cycles):
        verts.append(SpineVertex(k, tuple(cyc), len(cyc)))
        for c in cyc:
            corner_vertex[c] = k
    edges = []
    n = len(p.sides)
    for i in range(n):
        j = p.pair(i)
        if i < j:
            edges.append(
                SpineEdge(len(edges), (i, j), 2, (corner_vertex[i], corner_vertex[(i + 1) % n]))
            )
    return Spine(2, verts, edges, [e.faces for e in edges])


def _polygon_thicken_vertex(p: Polygon, vertex: int) -> Polygon:
    cycles = p.corner_cycles()
    if not 0 <= vertex < len(cycles):
        raise InvalidComplex(f"no vertex {vertex}")
    cyc = cycles[vertex]
    k = len(cyc)
    if k == 3:
        raise VertexAlreadyGood(f"vertex {vertex} is trivalent")
    if k < 2:
        raise InvalidComplex("a vertex needs at least two corners")
    tiles = p.cycle_tiles(cyc)
    where = {c: m for m, c in enumerate(cyc)}
    n = len(p.sides)
    # each entry: (label, key) where keys pair up the new sides
    seq: list = []
    for i in range(n):
        m = where.get(i)
        if m == 0:
            # the cut-off corners reappear at corner c_0, met in reverse order
            for mm in range(k - 1, 0, -1):
                seq.append((tiles[mm], ("in", mm)))
        elif m is not None:
            seq.append((tiles[m].inverse(), ("cut", m)))
        seq.append((p.sides[i].label, ("old", i)))
    pos = {key: idx for idx, (_, key) in enumerate(seq)}
    pairs = []
    names = []
    for lab, key in seq:
        tag, m = key
        if tag == "old":
            pairs.append(pos[("old", p.pair(m))])
            names.append(p.sides[m].name)
        elif tag == "cut":
            pairs.append(pos[("in", m)])
            names.append(f"k{vertex}.{m}")
        else:
            pairs.append(pos[("cut", m)])
            names.append(f"k{vertex}.{m}'")
    q = Polygon(p.spec, tuple(Side(seq[i][0], pairs[i], names[i]) for i in range(len(seq))), p.genus)
    return _polygon_smooth(q)


def _polygon_smooth(p: Polygon) -> Polygon:
    """Remove bivalent vertices by joining the two sides that meet there."""
    while True:
        bivalent = [c for c in p.corner_cycles() if len(c) == 2]
        if not bivalent:
            return p
        c, c2 = bivalent[0]
        n = len(p.sides)
        # at corner c the sides c-1 and c share a label; likewise at c2
        a, b = (c - 1) % n, c
        a2, b2 = (c2 - 1) % n, c2
        if p.label(a) != p.label(b) or p.label(a2) != p.label(b2):
            raise InvalidComplex("bivalent vertex between sides with different labels")
        drop = {b, b2}
        keep = [i for i in range(n) if i not in drop]
        newpos = {i: k for k, i in enumerate(keep)}
        # a absorbs b and a2 absorbs b2; the old pairs a-b2 and b-a2 become a-a2
        sides = []
        for i in keep:
            s = p.sides[i]
            partner = s.pair
            if partner in drop:
                partner = (partner - 1) % n
            sides.append(Side(s.label, newpos[partner], s.name))
        p = Polygon(p.spec, tuple(sides), p.genus)


def _polygon_standardize(p: Polygon) -> Polygon:
    p = _polygon_smooth(p)
    while True:
        bad = [k for k, c in enumerate(p.corner_cycles()) if len(c) != 3]
        if not bad:
            return p
        p = _polygon_thicken_vertex(p, bad[0])


# ---------------------------------------------------------------------------
# dispatch


def validate(cx) -> ValidationReport:
    if cx.dimension == 2:
        return _validate_polygon(cx)
    from .polyhedron import validate_polyhedron

    return validate_polyhedron(cx)


def _require_valid(cx) -> None:
    rep = validate(cx)
    if not rep.ok:
        raise InvalidComplex("; ".join(f"{k}: {d}" for k, d in rep.violations))


def spine(cx) -> Spine:
    _require_valid(cx)
    if cx.dimension == 2:
        return _polygon_spine(cx)
    from .polyhedron import polyhedron_spine

    return polyhedron_spine(cx)


def thicken_edge(cx, edge: int):
    if cx.dimension != 3:
        raise WrongDimension("edge thickening is a 3-dimensional move")
    from .polyhedron import thicken_edge as te

    _require_valid(cx)
    return te(cx, edge)


def thicken_vertex(cx, vertex: int):
    _require_valid(cx)
    if cx.dimension == 2:
        return _polygon_thicken_vertex(cx, vertex)
    from .polyhedron import thicken_vertex as tv

    return tv(cx, vertex)


def standardize(cx):
    _require_valid(cx)
    if cx.dimension == 2:
        return _polygon_standardize(cx)
    from .polyhedron import standardize as st

    return st(cx)


__all__ = [
    "AlreadyTrivalent",
    "Polygon",
    "Side",
    "Spine",
    "SpineEdge",
    "SpineVertex",
    "ValidationReport",
    "spine",
    "standardize",
    "thicken_edge",
    "thicken_vertex",
    "validate",
]
