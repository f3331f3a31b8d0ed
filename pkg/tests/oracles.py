"""Independent brute-force oracles used by the test suite.

Nothing here imports the package's algorithms. Each oracle recomputes a
quantity from scratch by the most direct route available, so a test that
compares the package against an oracle is a genuine two-route check.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


# ---------------------------------------------------------------- words

def freely_reduce(word):
    word = list(word)
    i = 0
    while i < len(word) - 1:
        if word[i] == -word[i + 1]:
            del word[i : i + 2]
            i = max(i - 1, 0)
        else:
            i += 1
    return tuple(word)


def surface_relator(genus):
    out = []
    for i in range(genus):
        out += [2 * i + 1, 2 * i + 2, -(2 * i + 1), -(2 * i + 2)]
    return tuple(out)


def naive_dehn_trivial(word, genus):
    """Decide triviality by greedy Dehn substitution, searched naively.

    Every cyclic conjugate of the relator and of its inverse is tried at
    every position; any match longer than half a relator is replaced by the
    inverse of the remainder.
    """
    rel = surface_relator(genus)
    inv = tuple(-x for x in reversed(rel))
    n = len(rel)
    cyc = [r[k:] + r[:k] for r in (rel, inv) for k in range(n)]
    w = freely_reduce(word)
    progress = True
    while progress and w:
        progress = False
        for c in cyc:
            for m in range(n, n // 2, -1):
                u = c[:m]
                for i in range(len(w) - m + 1):
                    if w[i : i + m] == u:
                        rest = tuple(-x for x in reversed(c[m:]))
                        w = freely_reduce(w[:i] + rest + w[i + m :])
                        progress = True
                        break
                if progress:
                    break
            if progress:
                break
    return not w


# ---------------------------------------------------------------- Magnus

def magnus_full(word, degree):
    """Truncated Magnus expansion as a dict monomial -> coefficient."""
    series = {(): 1}
    for x in word:
        g = abs(x) - 1
        if x > 0:
            factor = {(): 1, (g,): 1}
        else:
            factor = {(g,) * m: (-1) ** m for m in range(degree + 1)}
        out = {}
        for m1, c1 in series.items():
            for m2, c2 in factor.items():
                if len(m1) + len(m2) <= degree:
                    out[m1 + m2] = out.get(m1 + m2, 0) + c1 * c2
        series = out
    return series


def magnus_lex_less(a, b, ngens, degree):
    """a < b iff M(a) is lexicographically larger than M(b).

    Monomials are listed by degree and then by generator index; the first
    monomial where the coefficients differ decides.
    """
    ma, mb = magnus_full(a, degree), magnus_full(b, degree)
    for d in range(1, degree + 1):
        for mono in itertools.product(range(ngens), repeat=d):
            ca, cb = ma.get(mono, 0), mb.get(mono, 0)
            if ca != cb:
                return ca > cb
    return None


def lex_less(u, v, priority):
    for i in priority:
        if u[i] != v[i]:
            return u[i] < v[i]
    return False


# ---------------------------------------------------------------- orbits

class UnionFind:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry

    def classes(self):
        out = {}
        for x in list(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


def polygon_quotient_counts(word):
    """Cells of the surface obtained from a polygon with a boundary word.

    `word` lists side labels as (name, sign) read around the polygon. Sides
    with the same name are glued so that their arrows match. Returns
    (V, E, F) of the quotient by a direct union-find on corners.
    """
    n = len(word)
    uf = UnionFind(range(n))
    # side i runs from corner i to corner i+1 in reading order
    by_name = {}
    for i, (name, sign) in enumerate(word):
        by_name.setdefault(name, []).append((i, sign))
    for name, sides in by_name.items():
        (i, si), (j, sj) = sides

        def ends(k, s):
            a, b = k, (k + 1) % n
            return (a, b) if s > 0 else (b, a)

        ti, hi = ends(i, si)
        tj, hj = ends(j, sj)
        uf.union(ti, tj)
        uf.union(hi, hj)
    return len(uf.classes()), n // 2, 1


def standard_surface_word(genus):
    out = []
    for i in range(genus):
        x, y = f"x{i}", f"y{i}"
        out += [(x, 1), (y, 1), (x, -1), (y, -1)]
    return out


def euler_trivalent_surface(genus):
    """V and E of a trivalent graph on a genus g surface with one disk face."""
    # V - E + 1 = 2 - 2g and 3V = 2E
    v = Fraction(2 * (2 - 2 * genus - 1), 2 - 3)
    return int(v), int(3 * v / 2)


def cube_census():
    """Cells of the cube boundary and their orbits under opposite-face pairings."""
    verts = list(itertools.product((0, 1), repeat=3))
    edges = []
    for v in verts:
        for k in range(3):
            if v[k] == 0:
                w = list(v)
                w[k] = 1
                edges.append((v, tuple(w)))
    vuf = UnionFind(verts)
    euf = UnionFind(range(len(edges)))
    # translation by a unit vector glues x_k = 0 to x_k = 1
    for k in range(3):
        for v in verts:
            if v[k] == 0:
                w = list(v)
                w[k] = 1
                vuf.union(v, tuple(w))
        for i, (p, q) in enumerate(edges):
            if p[k] == 0 and q[k] == 0:
                p2 = list(p)
                q2 = list(q)
                p2[k] = q2[k] = 1
                j = edges.index((tuple(p2), tuple(q2)))
                euf.union(i, j)
    return len(vuf.classes()), [len(c) for c in euf.classes()], 3


def slot_quotient_counts(edges, slots, faces, mate):
    """Quotient cell counts of a polyhedron boundary from raw slot data.

    edges: id -> (tail, head); slots: id -> (edge, +1/-1); faces: id -> slot
    list; mate: slot -> slot. A glued side reverses direction, so the start
    of a slot is identified with the end of its mate.
    """
    def ends(s):
        e, d = slots[s]
        t, h = edges[e]
        return (t, h) if d > 0 else (h, t)

    vuf = UnionFind({v for t in edges.values() for v in t})
    euf = UnionFind(edges)
    for s, m in mate.items():
        euf.union(slots[s][0], slots[m][0])
        (a, b), (c, d) = ends(s), ends(m)
        vuf.union(a, d)
        vuf.union(b, c)
    return len(vuf.classes()), [len(c) for c in euf.classes()], len(faces) // 2


def lattice_index(vectors):
    """gcd of all 3x3 minors: 1 iff the vectors span Z^3."""
    from math import gcd

    g = 0
    for a, b, c in itertools.combinations(vectors, 3):
        det = (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
               + a[2] * (b[0] * c[1] - b[1] * c[0]))
        g = gcd(g, abs(det))
    return g


# ---------------------------------------------------------------- divisions

def downward_closed_subsets(points, less):
    """Every downward-closed subset of a finite set, by enumerating all subsets."""
    points = list(points)
    out = []
    for mask in range(1 << len(points)):
        s = {p for k, p in enumerate(points) if mask >> k & 1}
        if all(b in s for a in s for b in points if less(b, a)):
            out.append(frozenset(s))
    return out


def coset_witness(g, points, less, closed):
    return frozenset(x for x in points if less(x, g) or (closed and x == g))
