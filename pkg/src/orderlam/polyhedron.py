"""Polyhedral fundamental domains of 3-manifolds and the two thickening moves.

The boundary sphere of the domain is stored as a cell structure with
explicit edge ids, so bigons are allowed. Every occurrence of an edge in a
face boundary is a *slot*; a face is a cyclic list of slots, read
counterclockwise from outside. A face pairing is recorded slot by slot:
mate(s) is the slot of the partner face that t_h glues onto s. Gluing
reverses the boundary cycle, so start(s) is identified with end(mate(s)).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .complex import Spine, SpineEdge, SpineVertex, ValidationReport
from .errors import (
    AlreadyTrivalent,
    InvalidComplex,
    PreconditionEdgesNotTrivalent,
    VertexAlreadyGood,
)
from .group_order import GroupElement, GroupSpec


class _UF:
    def __init__(self):
        self.p: dict = {}

    def find(self, x):
        p = self.p
        p.setdefault(x, x)
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller representative for determinism
            if rb < ra:
                ra, rb = rb, ra
            self.p[rb] = ra


class Polyhedron:
    """An immutable polyhedral domain with slot-level face pairings."""

    dimension = 3

    def __init__(self, spec: GroupSpec, edges: dict, slots: dict, faces: dict,
                 mate: dict, pair: dict, label: dict, names: dict | None = None):
        self.spec = spec
        self.edges = dict(edges)      # edge -> (tail, head)
        self.slots = dict(slots)      # slot -> (edge, +1 | -1)
        self.faces = {f: tuple(c) for f, c in faces.items()}
        self.mate = dict(mate)
        self.pair = dict(pair)
        self.label = dict(label)
        self.names = dict(names or {f: f"F{f}" for f in faces})

    # ------------------------------------------------------------ basics

    @functools.cached_property
    def slot_face(self) -> dict:
        return {s: f for f, cyc in self.faces.items() for s in cyc}

    @functools.cached_property
    def slot_index(self) -> dict:
        return {s: k for cyc in self.faces.values() for k, s in enumerate(cyc)}

    @functools.cached_property
    def edge_slots(self) -> dict:
        out: dict = {e: [] for e in self.edges}
        for s, (e, _) in sorted(self.slots.items()):
            out.setdefault(e, []).append(s)
        return out

    @functools.cached_property
    def vertices(self) -> list:
        return sorted({v for t in self.edges.values() for v in t})

    def start(self, s: int) -> int:
        e, d = self.slots[s]
        return self.edges[e][0 if d > 0 else 1]

    def end(self, s: int) -> int:
        e, d = self.slots[s]
        return self.edges[e][1 if d > 0 else 0]

    def start_key(self, s: int) -> tuple:
        e, d = self.slots[s]
        return (e, 0 if d > 0 else 1)

    def end_key(self, s: int) -> tuple:
        e, d = self.slots[s]
        return (e, 1 if d > 0 else 0)

    def other(self, s: int) -> int:
        a, b = self.edge_slots[self.slots[s][0]]
        return b if s == a else a

    def corners(self) -> list:
        """All corners (face, k): the vertex where slot k of the face starts."""
        return [(f, k) for f, cyc in sorted(self.faces.items()) for k in range(len(cyc))]

    def corner_vertex(self, c) -> int:
        f, k = c
        return self.start(self.faces[f][k])

    def corner_partner(self, c) -> tuple:
        f, k = c
        cyc = self.faces[f]
        s_in = cyc[k - 1]
        m = self.mate[s_in]
        return (self.slot_face[m], self.slot_index[m])

    def wing_next(self, s: int) -> int:
        return self.mate[self.other(s)]

    # ------------------------------------------------------------ orbits

    @functools.cached_property
    def edge_orbits(self) -> list:
        uf = _UF()
        for e in self.edges:
            uf.find(e)
        for s, m in self.mate.items():
            uf.union(self.slots[s][0], self.slots[m][0])
        groups: dict = {}
        for e in sorted(self.edges):
            groups.setdefault(uf.find(e), []).append(e)
        return sorted(groups.values())

    @functools.cached_property
    def end_orbits(self) -> dict:
        """Union-find classes of edge ends (edge, 0 for tail / 1 for head)."""
        uf = _UF()
        for e in self.edges:
            uf.find((e, 0))
            uf.find((e, 1))
        for s, m in self.mate.items():
            uf.union(self.start_key(s), self.end_key(m))
            uf.union(self.end_key(s), self.start_key(m))
        out: dict = {}
        for e in sorted(self.edges):
            for end in (0, 1):
                out[(e, end)] = uf.find((e, end))
        return out

    @functools.cached_property
    def vertex_orbits(self) -> list:
        uf = _UF()
        for v in self.vertices:
            uf.find(v)
        for s, m in self.mate.items():
            uf.union(self.start(s), self.end(m))
            uf.union(self.end(s), self.start(m))
        groups: dict = {}
        for v in self.vertices:
            groups.setdefault(uf.find(v), []).append(v)
        return sorted(groups.values())

    def wing_cycle(self, s: int) -> list:
        out = [s]
        x = self.wing_next(s)
        while x != s:
            out.append(x)
            if len(out) > len(self.slots):
                raise InvalidComplex("wing map does not cycle")
            x = self.wing_next(x)
        return out

    def vertex_tiles(self, orbit: Sequence[int]) -> dict:
        """Tile g(u) with t_g(u) equal to the lift at the first vertex of the orbit."""
        orbit = sorted(orbit)
        g = {orbit[0]: self.spec.identity()}
        stack = [orbit[0]]
        corners_at: dict = {}
        for c in self.corners():
            corners_at.setdefault(self.corner_vertex(c), []).append(c)
        while stack:
            u = stack.pop()
            for c in corners_at.get(u, ()):
                f = c[0]
                p = self.corner_partner(c)
                w = self.corner_vertex(p)
                h = g[u] * self.label[f]
                if w in g:
                    if g[w] != h:
                        raise InvalidComplex(f"vertex {w} meets the lift in two tiles")
                else:
                    g[w] = h
                    stack.append(w)
        return g

    # ------------------------------------------------------------ export

    def vertex_cycles(self) -> dict:
        return {f: [self.start(s) for s in cyc] for f, cyc in self.faces.items()}

    def describe(self) -> dict:
        return {
            "vertices": len(self.vertices),
            "edges": len(self.edges),
            "faces": len(self.faces),
        }


# ---------------------------------------------------------------------------
# construction from vertex cycles


def from_vertex_cycles(spec: GroupSpec, faces: Sequence[Sequence[int]], pairings: Iterable,
                       names: Sequence[str] | None = None) -> Polyhedron:
    """Build a polyhedron from faces given as vertex cycles.

    `pairings` holds (i, j, label, vertex_map): face i lies in Gamma and
    t_h(Gamma) for h = label, and t_h carries face j onto face i sending
    vertex v of face j to vertex_map[v]. Faces must not be bigons here.
    """
    edge_id: dict = {}
    edges: dict = {}
    slots: dict = {}
    fcycles: dict = {}
    sid = 0
    for f, cyc in enumerate(faces):
        cyc = list(cyc)
        n = len(cyc)
        if n < 3:
            raise InvalidComplex(f"face {f} has fewer than three vertices")
        out = []
        for k in range(n):
            a, b = cyc[k], cyc[(k + 1) % n]
            key = (min(a, b), max(a, b))
            if key not in edge_id:
                edge_id[key] = len(edge_id)
                edges[edge_id[key]] = key
            e = edge_id[key]
            slots[sid] = (e, 1 if a == key[0] else -1)
            out.append(sid)
            sid += 1
        fcycles[f] = out
    # relabel edges densely in order of first appearance
    pair: dict = {}
    label: dict = {}
    mate: dict = {}

    def find_slot(face, a, b):
        for s in fcycles[face]:
            e, d = slots[s]
            t, h = edges[e]
            st, en = (t, h) if d > 0 else (h, t)
            if st == a and en == b:
                return s
        raise InvalidComplex(f"face {face} has no side {a}->{b}")

    for i, j, lab, vmap in pairings:
        h = lab if isinstance(lab, GroupElement) else spec.element(lab)
        vmap = {int(k): int(v) for k, v in dict(vmap).items()}
        if i in pair or j in pair:
            raise InvalidComplex(f"face {i} or {j} is paired twice")
        pair[i], pair[j] = j, i
        label[i], label[j] = h, h.inverse()
        cj = list(faces[j])
        if sorted(vmap) != sorted(cj) or sorted(vmap.values()) != sorted(faces[i]):
            raise InvalidComplex(f"vertex map of faces {i}, {j} is not a bijection")
        n = len(cj)
        for k in range(n):
            a, b = cj[k], cj[(k + 1) % n]
            s = find_slot(j, a, b)
            m = find_slot(i, vmap[b], vmap[a])
            mate[s], mate[m] = m, s
    names = list(names) if names is not None else [f"F{f}" for f in range(len(faces))]
    return Polyhedron(spec, edges, slots, fcycles, mate, pair, label,
                      {f: names[f] for f in range(len(faces))})


# ---------------------------------------------------------------------------
# validation


def validate_polyhedron(P: Polyhedron) -> ValidationReport:
    rep = ValidationReport()
    # cell structure
    for e in P.edges:
        ss = P.edge_slots.get(e, [])
        if len(ss) != 2:
            rep.add("EdgeIncidence", f"edge {e} lies in {len(ss)} face sides")
        elif P.slots[ss[0]][1] == P.slots[ss[1]][1]:
            rep.add("Orientation", f"edge {e} is traversed the same way twice")
    for f, cyc in P.faces.items():
        if len(cyc) < 2:
            rep.add("FaceCycle", f"face {f} has {len(cyc)} sides")
        for k, s in enumerate(cyc):
            if P.end(s) != P.start(cyc[(k + 1) % len(cyc)]):
                rep.add("FaceCycle", f"face {f} is not a closed cycle")
                break
    if rep.violations:
        return rep
    # pairings
    for f in P.faces:
        if f not in P.pair:
            rep.add("UnmatchedFace", f"face {f} has no partner")
            continue
        g = P.pair[f]
        if g == f or P.pair.get(g) != f:
            rep.add("NotInvolution", f"faces {f} and {g}")
            continue
        if P.label[g] != P.label[f].inverse():
            rep.add("LabelMismatch", f"faces {f} and {g}")
        if P.label[f].is_identity():
            rep.add("IdentityLabel", f"face {f}")
        cf, cg = P.faces[f], P.faces[g]
        if len(cf) != len(cg):
            rep.add("PairingShape", f"faces {f} and {g} have different side counts")
            continue
        for k, s in enumerate(cf):
            m = P.mate.get(s)
            if m is None or P.mate.get(m) != s or P.slot_face.get(m) != g:
                rep.add("PairingMap", f"side {k} of face {f}")
                break
            nxt = P.mate.get(cf[(k + 1) % len(cf)])
            if cg[(P.slot_index[m] - 1) % len(cg)] != nxt:
                rep.add("PairingMap", f"faces {f}, {g} are not glued by a reversing map")
                break
    if rep.violations:
        return rep
    # the boundary is a sphere
    V, E, F = len(P.vertices), len(P.edges), len(P.faces)
    if V - E + F != 2:
        rep.add("BoundaryNotSphere", f"V - E + F = {V - E + F}")
    # edge cycles close up
    seen = set()
    for s in sorted(P.slots):
        if s in seen:
            continue
        try:
            cyc = P.wing_cycle(s)
        except InvalidComplex as exc:
            rep.add("EdgeCycle", str(exc))
            return rep
        seen.update(cyc)
        g = P.spec.identity()
        for w in cyc:
            g = g * P.label[P.slot_face[P.other(w)]]
        if not g.is_identity():
            rep.add("EdgeCycle", f"labels around edge {P.slots[s][0]} multiply to {g}")
    # vertex links are spheres and tiles are consistent
    ends = P.end_orbits
    corners = P.corners()
    for orbit in P.vertex_orbits:
        oset = set(orbit)
        try:
            P.vertex_tiles(orbit)
        except InvalidComplex as exc:
            rep.add("VertexCycle", str(exc))
        lv = {ends[(e, k)] for e, (t, h) in P.edges.items() for k, v in ((0, t), (1, h)) if v in oset}
        le = sum(1 for c in corners if P.corner_vertex(c) in oset) // 2
        if len(lv) - le + len(orbit) != 2:
            rep.add("VertexLink", f"link of vertex orbit {orbit} has chi {len(lv) - le + len(orbit)}")
    chi = len(P.vertex_orbits) - len(P.edge_orbits) + F // 2 - 1
    rep.euler_characteristic = chi
    if chi != 0:
        rep.add("EulerCharacteristic", f"quotient chi = {chi}")
    return rep


# ---------------------------------------------------------------------------
# spine


def _spine_data(P: Polyhedron):
    orbits = P.edge_orbits
    singular = [o for o in orbits if len(o) >= 3]
    ends = P.end_orbits
    vorb = {v: k for k, o in enumerate(P.vertex_orbits) for v in o}
    end_vertex = {}
    for e, (t, h) in P.edges.items():
        end_vertex[ends[(e, 0)]] = vorb[t]
        end_vertex[ends[(e, 1)]] = vorb[h]
    degree: dict = {}
    edge_ends = []
    for o in singular:
        reps = sorted({ends[(o[0], 0)], ends[(o[0], 1)]})
        if len(reps) != 2:
            raise InvalidComplex(f"edge orbit {o} is glued to itself end to end")
        vs = tuple(end_vertex[r] for r in reps)
        edge_ends.append(vs)
        for v in vs:
            degree[v] = degree.get(v, 0) + 1
    return singular, edge_ends, degree


def polyhedron_spine(P: Polyhedron) -> Spine:
    singular, edge_ends, degree = _spine_data(P)
    vorbits = P.vertex_orbits
    keep = [k for k in range(len(vorbits)) if degree.get(k, 0) > 0]
    vid = {k: i for i, k in enumerate(keep)}
    verts = [SpineVertex(vid[k], tuple(vorbits[k]), degree[k]) for k in keep]
    edges = [
        SpineEdge(i, tuple(o), len(o), tuple(vid[v] for v in edge_ends[i]))
        for i, o in enumerate(singular)
    ]
    sectors = sorted((f, P.pair[f]) for f in P.faces if f < P.pair[f])
    sp = Spine(3, verts, edges, sectors)
    sv, se, circles = _smoothed_counts(verts, edges)
    sp.smoothed_vertices, sp.smoothed_edges = sv, se
    sp.vertexless_circles = circles
    return sp


def _smoothed_counts(verts, edges):
    """Vertex and edge counts after erasing 2-valent vertices."""
    two = {v.id for v in verts if v.valency == 2}
    nv = len(verts) - len(two)
    ne = len(edges) - len(two)
    # a circle made only of 2-valent vertices leaves no cell behind
    uf = _UF()
    for e in edges:
        a, b = e.ends
        uf.find(a)
        uf.union(a, b)
    comps: dict = {}
    for v in verts:
        comps.setdefault(uf.find(v.id), []).append(v)
    circles = 0
    for vs in comps.values():
        if all(v.valency == 2 for v in vs):
            circles += 1
            ne += 0  # edges - vertices of such a circle is already 0
    return nv, ne, circles


# ---------------------------------------------------------------------------
# editing


class _Builder:
    def __init__(self, P: Polyhedron):
        self.spec = P.spec
        self.edges = dict(P.edges)
        self.slots = dict(P.slots)
        self.faces = {f: list(c) for f, c in P.faces.items()}
        self.mate = dict(P.mate)
        self.pair = dict(P.pair)
        self.label = dict(P.label)
        self.names = dict(P.names)
        self._v = max(P.vertices) + 1
        self._e = max(P.edges) + 1
        self._s = max(P.slots) + 1
        self._f = max(P.faces) + 1

    def vertex(self) -> int:
        self._v += 1
        return self._v - 1

    def edge(self, tail: int, head: int) -> int:
        self.edges[self._e] = (tail, head)
        self._e += 1
        return self._e - 1

    def slot(self, edge: int, d: int) -> int:
        self.slots[self._s] = (edge, d)
        self._s += 1
        return self._s - 1

    def face(self, cycle: list, name: str) -> int:
        self.faces[self._f] = list(cycle)
        self.names[self._f] = name
        self._f += 1
        return self._f - 1

    def drop_edge(self, e: int) -> None:
        del self.edges[e]
        for s in [s for s, (x, _) in self.slots.items() if x == e]:
            del self.slots[s]
            self.mate.pop(s, None)

    def glue(self, f: int, g: int, h: GroupElement) -> None:
        self.pair[f], self.pair[g] = g, f
        self.label[f], self.label[g] = h, h.inverse()

    def freeze(self) -> Polyhedron:
        """Renumber every cell densely, keeping the relative order of ids."""
        vs = sorted({v for t in self.edges.values() for v in t})
        vmap = {v: i for i, v in enumerate(vs)}
        emap = {e: i for i, e in enumerate(sorted(self.edges))}
        smap = {s: i for i, s in enumerate(sorted(self.slots))}
        fmap = {f: i for i, f in enumerate(sorted(self.faces))}
        return Polyhedron(
            self.spec,
            {emap[e]: (vmap[t], vmap[h]) for e, (t, h) in self.edges.items()},
            {smap[s]: (emap[e], d) for s, (e, d) in self.slots.items()},
            {fmap[f]: [smap[s] for s in c] for f, c in self.faces.items()},
            {smap[s]: smap[m] for s, m in self.mate.items()},
            {fmap[f]: fmap[g] for f, g in self.pair.items()},
            {fmap[f]: h for f, h in self.label.items()},
            {fmap[f]: n for f, n in self.names.items()},
        )


def merge_bivalent(P: Polyhedron) -> Polyhedron:
    """Erase edge orbits of valency 2 by merging the faces on either side."""
    while True:
        target = next((o for o in P.edge_orbits if len(o) == 2), None)
        if target is None:
            return P
        e = target[0]
        s1, s2 = P.edge_slots[e]
        f1, f2 = P.slot_face[s1], P.slot_face[s2]
        m1, m2 = P.mate[s1], P.mate[s2]
        g1, g2 = P.slot_face[m1], P.slot_face[m2]
        if f1 == f2 or g1 == g2 or {f1, f2} & {g1, g2}:
            raise InvalidComplex(f"merging across edge {e} would glue a face to itself")
        if P.label[f1] != P.label[f2]:
            raise InvalidComplex(f"faces {f1}, {f2} across bivalent edge {e} have different labels")
        B = _Builder(P)

        def merged(fa, sa, fb, sb):
            ca, cb = P.faces[fa], P.faces[fb]
            ia, ib = ca.index(sa), cb.index(sb)
            return list(ca[ia + 1 :] + ca[:ia]) + list(cb[ib + 1 :] + cb[:ib])

        new1 = merged(f1, s1, f2, s2)
        new2 = merged(g1, m1, g2, m2)
        B.faces[f1] = new1
        B.faces[g1] = new2
        del B.faces[f2], B.faces[g2]
        B.names[f1] = f"{P.names[f1]}+{P.names[f2]}"
        B.names[g1] = f"{P.names[g1]}+{P.names[g2]}"
        del B.names[f2], B.names[g2]
        for f in (f2, g2):
            del B.pair[f], B.label[f]
        B.glue(f1, g1, P.label[f1])
        for edge in target:
            B.drop_edge(edge)
        P = B.freeze()


def thicken_edge(P: Polyhedron, edge: int) -> Polyhedron:
    """Replace a spine edge of valency k by k - 2 trivalent edges.

    The neighbourhood of the edge is gathered at the polyhedron edge e_0 of
    the edge cycle; the wedges cut from the other k - 1 tiles become bigon
    faces around e_0 and bigon notches at e_1 .. e_{k-1}.
    """
    sp = polyhedron_spine(P)
    if not 0 <= edge < len(sp.edges):
        raise InvalidComplex(f"no spine edge {edge}")
    orbit = sp.edges[edge].faces
    k = len(orbit)
    if k == 3:
        raise AlreadyTrivalent(f"spine edge {edge} is 3-valent")
    start = min(s for e in orbit for s in P.edge_slots[e])
    wings = P.wing_cycle(start)
    if len(wings) != k:
        raise InvalidComplex("edge cycle length differs from the orbit size")
    tiles = [P.spec.identity()]
    for w in wings[:-1]:
        tiles.append(tiles[-1] * P.label[P.slot_face[P.other(w)]])
    B = _Builder(P)
    eps = [P.slots[w][0] for w in wings]
    d0 = P.slots[wings[0]][1]
    t0, h0 = P.edges[eps[0]]
    # p_0 .. p_{k-1} around e_0, all oriented like e_0
    p = [B.edge(t0, h0) for _ in range(k)]
    X0, Y0 = P.slot_face[wings[0]], P.slot_face[P.other(wings[0])]
    slot_p_in_X0 = B.slot(p[k - 1], d0)
    slot_p_in_Y0 = B.slot(p[0], -d0)
    kprime_slots = {}
    kprime = {}
    for m in range(1, k):
        a = B.slot(p[m - 1], d0)
        b = B.slot(p[m], -d0)
        kprime_slots[m] = (a, b)
        kprime[m] = B.face([a, b], f"k'{eps[0]}.{m}")
    q_in_X, q_in_Y, kappa_slots, kappa = {}, {}, {}, {}
    for m in range(1, k):
        w = wings[m]
        dm = P.slots[w][1]
        tm, hm = P.edges[eps[m]]
        q = B.edge(tm, hm)
        qp = B.edge(tm, hm)
        q_in_X[m] = B.slot(q, dm)
        q_in_Y[m] = B.slot(qp, -dm)
        a = B.slot(q, -dm)
        b = B.slot(qp, dm)
        kappa_slots[m] = (a, b)
        kappa[m] = B.face([a, b], f"k{eps[0]}.{m}")
        B.glue(kappa[m], kprime[m], tiles[m].inverse())
        # t_{g_m} carries q_m to p_{m-1} and q'_m to p_m
        B.mate[a], B.mate[kprime_slots[m][0]] = kprime_slots[m][0], a
        B.mate[b], B.mate[kprime_slots[m][1]] = kprime_slots[m][1], b

    def replace(face, old, new):
        cyc = B.faces[face]
        cyc[cyc.index(old)] = new

    replace(X0, wings[0], slot_p_in_X0)
    replace(Y0, P.other(wings[0]), slot_p_in_Y0)
    for m in range(1, k):
        replace(P.slot_face[wings[m]], wings[m], q_in_X[m])
        replace(P.slot_face[P.other(wings[m])], P.other(wings[m]), q_in_Y[m])
    # mates across the faces between consecutive tiles
    outgoing = {0: slot_p_in_Y0}
    incoming = {0: slot_p_in_X0}
    for m in range(1, k):
        outgoing[m] = q_in_Y[m]
        incoming[m] = q_in_X[m]
    for m in range(k):
        a, b = outgoing[m], incoming[(m + 1) % k]
        B.mate[a], B.mate[b] = b, a
    for e in eps:
        B.drop_edge(e)
    return merge_bivalent(B.freeze())


def thicken_vertex(P: Polyhedron, vertex: int) -> Polyhedron:
    """Replace a spine vertex by the sphere around it, cut open at one tile.

    Every corner of the vertex orbit is truncated. The truncation at the
    chosen base vertex u_0 is replaced by a disk D assembled from translated
    copies of the other truncation faces; D carries the cell structure of
    the vertex link.
    """
    sp = polyhedron_spine(P)
    if any(e.valency != 3 for e in sp.edges):
        raise PreconditionEdgesNotTrivalent("thicken every edge first")
    if not 0 <= vertex < len(sp.vertices):
        raise InvalidComplex(f"no spine vertex {vertex}")
    if sp.vertices[vertex].valency in (2, 4):
        raise VertexAlreadyGood(f"spine vertex {vertex} has valency {sp.vertices[vertex].valency}")
    orbit = sorted(sp.vertices[vertex].corners)
    oset = set(orbit)
    corners = [c for c in P.corners() if P.corner_vertex(c) in oset]
    ends = P.end_orbits
    corner_orbit = {}
    for c in corners:
        p = P.corner_partner(c)
        corner_orbit[c] = min(c, p)

    def disk_ok(u0):
        at0 = [c for c in corners if P.corner_vertex(c) == u0]
        if len({corner_orbit[c] for c in at0}) != len(at0):
            return False
        reps = [ends[(e, k)] for e, th in P.edges.items() for k in (0, 1) if th[k] == u0]
        return len(set(reps)) == len(reps)

    u0 = next((u for u in orbit if disk_ok(u)), None)
    if u0 is None:
        raise InvalidComplex("no vertex of the orbit bounds an embedded disk in the link")
    tiles = P.vertex_tiles([u0] + [u for u in orbit if u != u0])
    B = _Builder(P)
    # A: cut every edge end at the orbit
    x = {}
    for e in sorted(P.edges):
        t, h = P.edges[e]
        nt = h_ = None
        if t in oset:
            x[(e, 0)] = nt = B.vertex()
        if h in oset:
            x[(e, 1)] = h_ = B.vertex()
        B.edges[e] = (nt if nt is not None else t, h_ if h_ is not None else h)
    # B: an arc across every corner
    arc = {}
    arc_slot = {}
    for c in corners:
        f, k = c
        cyc = P.faces[f]
        a = x[P.end_key(cyc[k - 1])]
        b = x[P.start_key(cyc[k])]
        arc[c] = B.edge(a, b)
        arc_slot[c] = B.slot(arc[c], 1)
    for f, cyc in P.faces.items():
        new = []
        for k, s in enumerate(cyc):
            if (f, k) in arc_slot:
                new.append(arc_slot[(f, k)])
            new.append(s)
        B.faces[f] = new
    for c in corners:
        B.mate[arc_slot[c]] = arc_slot[P.corner_partner(c)]
    # C: truncation faces kappa_u for u != u0
    by_vertex: dict = {}
    for c in corners:
        by_vertex.setdefault(P.corner_vertex(c), []).append(c)
    kappa_cycle = {}
    rev_slot = {}
    for u in orbit:
        if u == u0:
            continue
        first = min(by_vertex[u])
        cyc_c = [first]
        c = first
        while True:
            f, k = c
            s_in = P.faces[f][k - 1]
            o = P.other(s_in)
            c = (P.slot_face[o], P.slot_index[o])
            if c == first:
                break
            cyc_c.append(c)
        if sorted(cyc_c) != sorted(by_vertex[u]):
            raise InvalidComplex(f"corners at vertex {u} do not form one cycle")
        for c in cyc_c:
            rev_slot[c] = B.slot(arc[c], -1)
        kappa_cycle[u] = cyc_c
    # D: the disk at u0
    dvert = {}
    for e, th in P.edges.items():
        for k in (0, 1):
            if th[k] == u0:
                dvert[ends[(e, k)]] = x[(e, k)]

    def dv(key):
        r = ends[key]
        if r not in dvert:
            dvert[r] = B.vertex()
        return dvert[r]

    dedge = {}
    dedge_dir = {}
    for c in corners:
        if P.corner_vertex(c) == u0:
            p = P.corner_partner(c)
            dedge[corner_orbit[c]] = arc[c]
            dedge_dir[corner_orbit[c]] = (B.edges[arc[c]], "boundary")
    kappa_face = {}
    kprime_face = {}
    for u in orbit:
        if u == u0:
            continue
        mslots = []
        for c in kappa_cycle[u]:
            f, k = c
            cyc = P.faces[f]
            a = dv(P.end_key(cyc[k - 1]))
            b = dv(P.start_key(cyc[k]))
            key = corner_orbit[c]
            if key not in dedge:
                dedge[key] = B.edge(a, b)
                dedge_dir[key] = ((a, b), "inner")
                d = 1
            else:
                (t, h), kind = dedge_dir[key]
                if (t, h) == (b, a):
                    d = -1
                elif (t, h) == (a, b) and kind == "inner":
                    raise InvalidComplex("disk edge used twice in the same direction")
                else:
                    raise InvalidComplex("disk edge endpoints disagree")
            m = B.slot(dedge[key], d)
            B.mate[m], B.mate[rev_slot[c]] = rev_slot[c], m
            mslots.append(m)
        kappa_face[u] = B.face([rev_slot[c] for c in kappa_cycle[u]], f"k{u}")
        kprime_face[u] = B.face(list(reversed(mslots)), f"k{u}'")
        B.glue(kappa_face[u], kprime_face[u], tiles[u].inverse())
    return merge_bivalent(B.freeze())


def standardize(P: Polyhedron) -> Polyhedron:
    """Thicken bad edges in ascending id order, then bad vertices likewise."""
    P = merge_bivalent(P)
    while True:
        sp = polyhedron_spine(P)
        bad = [e.id for e in sp.edges if e.valency != 3]
        if not bad:
            break
        P = thicken_edge(P, bad[0])
    while True:
        sp = polyhedron_spine(P)
        bad = [v.id for v in sp.vertices if v.valency not in (2, 4)]
        if not bad:
            return P
        P = thicken_vertex(P, bad[0])
