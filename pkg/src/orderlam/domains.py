"""Ready-made fundamental domains: surface polygons, prisms and parallelohedra."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd
from typing import Sequence

from .complex import Polygon
from .errors import InvalidComplex
from .group_order import GroupSpec
from .polyhedron import Polyhedron, from_vertex_cycles


def surface_labels(genus: int) -> list[list[str]]:
    """Side labels of the standard 4g-gon, read counterclockwise.

    Handle i contributes x, y^-1, x^-1, y: the tiles across its four sides.
    """
    names = [chr(ord("a") + k) for k in range(2 * genus)]
    out = []
    for i in range(genus):
        x, y = names[2 * i], names[2 * i + 1]
        out += [[x], ["-" + y], ["-" + x], [y]]
    return out


def torus_square() -> Polygon:
    # bottom, right, top, left: the tile below is b^-1, to the right a, ...
    return Polygon.from_word(GroupSpec.free_abelian(2), [["-b"], ["a"], ["b"], ["-a"]],
                             names=["bottom", "right", "top", "left"])


def surface_polygon(genus: int) -> Polygon:
    if genus == 1:
        return torus_square()
    return Polygon.from_word(GroupSpec.surface(genus), surface_labels(genus))


def prism(base: Polygon, spec: GroupSpec, z: str = "t") -> Polyhedron:
    """The prism over a polygon, glued top to bottom by the generator `z`.

    Side labels of the polygon are reread as words in `spec`. Vertices
    0..n-1 are the bottom corners and n..2n-1 the top ones.
    """
    n = len(base)
    faces = [[i, (i + 1) % n, n + (i + 1) % n, n + i] for i in range(n)]
    faces.append([n + i for i in range(n)])
    faces.append([n - 1 - i for i in range(n)])
    names = [s.name for s in base.sides] + ["top", "bottom"]
    pairings = []
    for i in range(n):
        j = base.pair(i)
        if i > j:
            continue
        # side j is carried onto side i with its direction reversed
        vmap = {j: (i + 1) % n, (j + 1) % n: i, n + j: n + (i + 1) % n, n + (j + 1) % n: n + i}
        word = base.spec.spell(base.label(i).word)
        pairings.append((i, j, spec.element(word), vmap))
    pairings.append((n, n + 1, spec.element([z]), {k: n + k for k in range(n)}))
    return from_vertex_cycles(spec, faces, pairings, names)


def t3_cube() -> Polyhedron:
    return prism(torus_square(), GroupSpec.free_abelian(3), z="c")


def mapping_torus(genus: int = 2, standard_base: bool = True) -> Polyhedron:
    """Surface times circle, as a prism over a fundamental polygon of the surface.

    By default the base is the standardized polygon, whose quotient is a
    trivalent graph, so the vertical faces already form the train track of
    the surface. With standard_base=False the plain 4g-gon is used.
    """
    from .complex import standardize

    inner = GroupSpec.surface(genus)
    base = surface_polygon(genus)
    if standard_base:
        base = standardize(base)
    return prism(base, GroupSpec.direct_sum_z(inner))


# ---------------------------------------------------------------------------
# zonotopes


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _primitive(v):
    g = gcd(gcd(abs(v[0]), abs(v[1])), abs(v[2]))
    return tuple(x // g for x in v)


def _hull_ccw(points, u, w):
    """Convex hull of coplanar points, counterclockwise in the (u, w) frame."""
    pts = sorted(set(points), key=lambda p: (_dot(p, u), _dot(p, w)))
    proj = {p: (_dot(p, u), _dot(p, w)) for p in pts}

    def turn(o, a, b):
        (ox, oy), (ax, ay), (bx, by) = proj[o], proj[a], proj[b]
        return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)

    lower: list = []
    upper: list = []
    for p in pts:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def zonotope(generators: Sequence[Sequence[int]], names: Sequence[str] = ("a", "b", "c")) -> Polyhedron:
    """A parallelohedron given as the zonotope sum of segments [-g, g].

    Opposite faces are glued by translation. The translations are written
    in a basis chosen among them, the first triple (in face order) that
    spans the whole translation lattice over the integers.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    normals: list = []
    for gi, gj in itertools.combinations(gens, 2):
        n = _cross(gi, gj)
        if n == (0, 0, 0):
            continue
        n = _primitive(n)
        for m in (n, tuple(-x for x in n)):
            if m not in normals:
                normals.append(m)
    coords: list = []
    vid: dict = {}
    faces = []
    shifts = []
    for n in normals:
        flat = [g for g in gens if _dot(n, g) == 0]
        centre = [0, 0, 0]
        for g in gens:
            s = _dot(n, g)
            if s:
                centre = [c + (1 if s > 0 else -1) * x for c, x in zip(centre, g)]
        pts = []
        for signs in itertools.product((1, -1), repeat=len(flat)):
            pts.append(tuple(centre[k] + sum(s * g[k] for s, g in zip(signs, flat)) for k in range(3)))
        u = flat[0]
        cyc = _hull_ccw(pts, u, _cross(n, u))
        for p in cyc:
            if p not in vid:
                vid[p] = len(coords)
                coords.append(p)
        faces.append([vid[p] for p in cyc])
        shifts.append(tuple(2 * c for c in centre))
    if len(vid) - sum(len(f) for f in faces) // 2 + len(faces) != 2:
        raise InvalidComplex("generators do not give a polytope")
    basis = None
    for trio in itertools.combinations(shifts, 3):
        det = _dot(trio[0], _cross(trio[1], trio[2]))
        if det == 0:
            continue

        def coords_in(v, trio=trio, det=det):
            return [Fraction(_dot(v, _cross(trio[1], trio[2])), det),
                    Fraction(_dot(trio[0], _cross(v, trio[2])), det),
                    Fraction(_dot(trio[0], _cross(trio[1], v)), det)]

        if all(x.denominator == 1 for v in shifts for x in coords_in(v)):
            basis = coords_in
            break
    if basis is None:
        raise InvalidComplex("face translations do not form a lattice with a basis among them")
    spec = GroupSpec.free_abelian(3, names)
    pairings = []
    for i, n in enumerate(normals):
        j = normals.index(tuple(-x for x in n))
        if i > j:
            continue
        word = []
        for name, x in zip(names, basis(shifts[i])):
            word += [name if x > 0 else "-" + name] * abs(int(x))
        sh = shifts[i]
        target = {coords[v]: v for v in faces[i]}
        vmap = {}
        for v in faces[j]:
            p = tuple(c + s for c, s in zip(coords[v], sh))
            if p not in target:
                raise InvalidComplex(f"face {j} does not translate onto face {i}")
            vmap[v] = target[p]
        pairings.append((i, j, spec.element(word), vmap))
    return from_vertex_cycles(spec, faces, pairings)


BODY_DIAGONALS = ((1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1))


def rhombic_dodecahedron() -> Polyhedron:
    return zonotope(BODY_DIAGONALS)


def elongated_dodecahedron() -> Polyhedron:
    return zonotope(BODY_DIAGONALS + ((0, 0, 2),))


def truncated_octahedron() -> Polyhedron:
    return zonotope(((1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1), (0, 1, 1), (0, 1, -1)))


def hexagonal_prism() -> Polyhedron:
    return zonotope(((2, 0, 0), (1, 2, 0), (-1, 2, 0), (0, 0, 1)))
