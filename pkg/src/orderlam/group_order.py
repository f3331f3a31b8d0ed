"""Group elements with canonical normal forms, and left-invariant order oracles.

Four families are supported: free abelian groups, free groups, closed
orientable surface groups of genus at least two, and direct sums G + Z.
Letters of a word are nonzero ints, +(i+1) for generator i and -(i+1) for
its inverse.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import SpecMismatch, UndecidedOrder, UnknownGenerator

Word = tuple  # tuple[int, ...]

# Surface elements whose Dehn-reduced word is longer than the cap are kept
# in Dehn form instead of being looked up in the shortlex table. The cap is
# the largest radius whose sphere bound stays within the budget.
SHORTLEX_CAP = 5
SHORTLEX_BUDGET = 20_000
# homs used to bucket table entries; any subset gives a class invariant
KEY_HOMS = 6


def shortlex_cap(genus: int) -> int:
    n = 4 * genus
    r = 0
    while r < SHORTLEX_CAP and n * (n - 1) ** r <= SHORTLEX_BUDGET:
        r += 1
    return r


def free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def _letter_key(x: int) -> tuple[int, int]:
    # shortlex letter order: a < a^-1 < b < b^-1 < ...
    return (abs(x), 0 if x > 0 else 1)


def shortlex_key(word: Sequence[int]):
    return (len(word), [_letter_key(x) for x in word])


class Family(str, enum.Enum):
    FREE_ABELIAN = "FreeAbelian"
    FREE = "Free"
    SURFACE = "SurfaceGroup"
    DIRECT_SUM_Z = "DirectSumWithZ"


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class GroupSpec:
    family: Family
    rank: int
    generators: tuple
    inner: "GroupSpec | None" = None

    def __post_init__(self):
        if self.family is Family.SURFACE:
            if self.rank < 2:
                raise ValueError("surface genus must be at least 2")
            if len(self.generators) != 2 * self.rank:
                raise ValueError("a genus g surface group has 2g generators")
        elif self.family is Family.DIRECT_SUM_Z:
            if self.inner is None:
                raise ValueError("DirectSumWithZ needs an inner spec")
            if len(self.generators) != self.inner.num_gens + 1:
                raise ValueError("DirectSumWithZ has the inner generators plus one")
            if tuple(self.generators[:-1]) != tuple(self.inner.generators):
                raise ValueError("inner generator names must come first")
        else:
            if self.rank < 1:
                raise ValueError("rank must be at least 1")
            if len(self.generators) != self.rank:
                raise ValueError("one name per generator")
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("generator names must be distinct")
        for name in self.generators:
            if not name or name.startswith("-") or "^" in name:
                raise ValueError(f"bad generator name {name!r}")

    # constructors

    @staticmethod
    def free_abelian(n: int, names: Sequence[str] | None = None) -> "GroupSpec":
        return GroupSpec(Family.FREE_ABELIAN, n, tuple(names or _LETTERS[:n]))

    @staticmethod
    def free(n: int, names: Sequence[str] | None = None) -> "GroupSpec":
        return GroupSpec(Family.FREE, n, tuple(names or _LETTERS[:n]))

    @staticmethod
    def surface(genus: int, names: Sequence[str] | None = None) -> "GroupSpec":
        return GroupSpec(Family.SURFACE, genus, tuple(names or _LETTERS[: 2 * genus]))

    @staticmethod
    def direct_sum_z(inner: "GroupSpec", name: str = "t") -> "GroupSpec":
        return GroupSpec(Family.DIRECT_SUM_Z, inner.rank, tuple(inner.generators) + (name,), inner)

    # letters and words

    @property
    def num_gens(self) -> int:
        return len(self.generators)

    def letter(self, token) -> int:
        if isinstance(token, bool):
            raise UnknownGenerator(repr(token))
        if isinstance(token, int):
            if token == 0 or abs(token) > self.num_gens:
                raise UnknownGenerator(repr(token))
            return token
        if not isinstance(token, str):
            raise UnknownGenerator(repr(token))
        sign = 1
        name = token
        if name.startswith("-"):
            sign, name = -1, name[1:]
        elif name.endswith("^-1"):
            sign, name = -1, name[:-3]
        try:
            return sign * (self.generators.index(name) + 1)
        except ValueError:
            raise UnknownGenerator(token) from None

    def parse_word(self, word: Iterable) -> Word:
        return tuple(self.letter(t) for t in word)

    def spell(self, word: Sequence[int]) -> list[str]:
        return [("-" if x < 0 else "") + self.generators[abs(x) - 1] for x in word]

    def element(self, word: Iterable = ()) -> "GroupElement":
        return GroupElement._from_word(self, self.parse_word(word))

    def identity(self) -> "GroupElement":
        return self.element(())

    def gen(self, name: str) -> "GroupElement":
        return self.element([name])

    def gens(self) -> list["GroupElement"]:
        return [self.element([i + 1]) for i in range(self.num_gens)]

    def __str__(self):
        if self.family is Family.DIRECT_SUM_Z:
            return f"DirectSumWithZ({self.inner})"
        return f"{self.family.value}({self.rank})"


def reduce(word: Iterable, spec: GroupSpec) -> "GroupElement":
    """Reduce a word of generator names (or signed ints) to its normal form."""
    return spec.element(word)


# ---------------------------------------------------------------------------
# surface groups: Dehn reduction and shortlex lookup


class _SurfaceData:
    def __init__(self, spec: GroupSpec):
        g = spec.rank
        rel: list[int] = []
        for i in range(g):
            x, y = 2 * i + 1, 2 * i + 2
            rel += [x, y, -x, -y]
        self.relator = tuple(rel)
        n = len(rel)
        self.n = n
        self.half = n // 2 + 1
        cyclic = set()
        for r in (self.relator, invert_word(self.relator)):
            for k in range(n):
                cyclic.add(r[k:] + r[:k])
        self.prefix: dict = {}
        for c in cyclic:
            p = c[: self.half]
            # pieces of the symmetrized relator have length one, so long
            # prefixes pick out a unique cyclic relator
            assert p not in self.prefix
            self.prefix[p] = c
        self.homs = default_surface_homs(g)
        for h in self.homs:
            assert not apply_hom(h, self.relator)
        self.ngens = 2 * g
        self.cap = shortlex_cap(g)
        self.key_homs = self.homs[:KEY_HOMS]
        self.shells: list[list[Word]] = [[()]]
        self.index: dict = {self.key(()): [()]}
        self.memo: dict = {}

    def dehn(self, word: Sequence[int]) -> Word:
        w = list(free_reduce(word))
        half, n = self.half, self.n
        changed = True
        while changed:
            changed = False
            for i in range(len(w) - half + 1):
                c = self.prefix.get(tuple(w[i : i + half]))
                if c is None:
                    continue
                m = half
                while m < n and i + m < len(w) and w[i + m] == c[m]:
                    m += 1
                # c = u v with u = c[:m] read in w, and u = v^-1 in the group
                w = list(free_reduce(w[:i] + list(invert_word(c[m:])) + w[i + m :]))
                changed = True
                break
        return tuple(w)

    def key(self, word: Sequence[int]):
        ab = [0] * self.ngens
        for x in word:
            ab[abs(x) - 1] += 1 if x > 0 else -1
        return (tuple(ab),) + tuple(apply_hom(h, word) for h in self.key_homs)

    def equal(self, u: Sequence[int], v: Sequence[int]) -> bool:
        return not self.dehn(tuple(invert_word(u)) + tuple(v))

    def _find(self, word: Word):
        for c in self.index.get(self.key(word), ()):
            if self.equal(c, word):
                return c
        return None

    def ensure(self, radius: int) -> None:
        letters = sorted(
            [s * (i + 1) for i in range(self.ngens) for s in (1, -1)], key=_letter_key
        )
        while len(self.shells) <= radius:
            shell: list[Word] = []
            for w in self.shells[-1]:
                for x in letters:
                    if w and w[-1] == -x:
                        continue
                    cand = w + (x,)
                    if self._find(cand) is None:
                        shell.append(cand)
                        self.index.setdefault(self.key(cand), []).append(cand)
            self.shells.append(shell)

    def normal(self, word: Sequence[int]) -> tuple[Word, bool]:
        word = tuple(word)
        hit = self.memo.get(word)
        if hit is not None:
            return hit
        w = self.dehn(word)
        if len(w) > self.cap:
            out = (w, False)
        else:
            self.ensure(len(w))
            c = self._find(w)
            assert c is not None, "shortlex table is missing an element"
            out = (c, True)
        if len(self.memo) < 200_000:
            self.memo[word] = out
        return out


@functools.lru_cache(maxsize=None)
def _surface_data(spec: GroupSpec) -> _SurfaceData:
    return _SurfaceData(spec)


def dehn_reduce(word: Iterable, spec: GroupSpec) -> Word:
    """Dehn's algorithm for the surface relator; empty iff the word is trivial."""
    if spec.family is not Family.SURFACE:
        raise SpecMismatch("Dehn reduction needs a surface group")
    return _surface_data(spec).dehn(spec.parse_word(word))


def surface_relator(spec: GroupSpec) -> Word:
    return _surface_data(spec).relator


# ---------------------------------------------------------------------------
# elements


class GroupElement:
    """An immutable group element stored in normal form.

    For surface groups the stored word is the shortlex-least representative
    whenever its Dehn-reduced length is at most shortlex_cap(genus). Longer elements
    keep a Dehn-reduced word and compare through Dehn's algorithm.
    """

    __slots__ = ("spec", "_data", "_canonical", "_hash")

    def __init__(self, spec: GroupSpec, data, canonical: bool = True):
        self.spec = spec
        self._data = data
        self._canonical = canonical
        self._hash = None

    @classmethod
    def _from_word(cls, spec: GroupSpec, word: Word) -> "GroupElement":
        fam = spec.family
        if fam is Family.FREE_ABELIAN:
            v = [0] * spec.rank
            for x in word:
                v[abs(x) - 1] += 1 if x > 0 else -1
            return cls(spec, tuple(v))
        if fam is Family.FREE:
            return cls(spec, free_reduce(word))
        if fam is Family.SURFACE:
            w, canonical = _surface_data(spec).normal(word)
            return cls(spec, w, canonical)
        tgen = spec.num_gens
        n = sum((1 if x > 0 else -1) for x in word if abs(x) == tgen)
        inner = GroupElement._from_word(spec.inner, tuple(x for x in word if abs(x) != tgen))
        return cls(spec, (inner, n))

    @property
    def normal_form(self) -> tuple:
        fam = self.spec.family
        if fam is Family.FREE_ABELIAN:
            v = list(self._data)
            while v and v[-1] == 0:
                v.pop()
            return tuple(v)
        if fam is Family.DIRECT_SUM_Z:
            inner, n = self._data
            if inner.is_identity() and n == 0:
                return ()
            return (inner.normal_form, n)
        return self._data

    @property
    def canonical(self) -> bool:
        if self.spec.family is Family.DIRECT_SUM_Z:
            return self._data[0].canonical
        return self._canonical

    @property
    def exponents(self) -> tuple:
        if self.spec.family is not Family.FREE_ABELIAN:
            raise SpecMismatch("exponent vectors exist only for free abelian groups")
        return self._data

    @property
    def inner(self) -> "GroupElement":
        if self.spec.family is not Family.DIRECT_SUM_Z:
            raise SpecMismatch("not a direct sum with Z")
        return self._data[0]

    @property
    def z(self) -> int:
        if self.spec.family is not Family.DIRECT_SUM_Z:
            raise SpecMismatch("not a direct sum with Z")
        return self._data[1]

    @property
    def word(self) -> Word:
        """A word representing the element, geodesic when the form is canonical."""
        fam = self.spec.family
        if fam is Family.FREE_ABELIAN:
            out: list[int] = []
            for i, e in enumerate(self._data):
                out += [(i + 1) if e > 0 else -(i + 1)] * abs(e)
            return tuple(out)
        if fam is Family.DIRECT_SUM_Z:
            inner, n = self._data
            t = self.spec.num_gens
            return inner.word + ((t if n > 0 else -t),) * abs(n)
        return self._data

    def length(self) -> int:
        return len(self.word)

    def is_identity(self) -> bool:
        fam = self.spec.family
        if fam is Family.FREE_ABELIAN:
            return not any(self._data)
        if fam is Family.DIRECT_SUM_Z:
            return self._data[1] == 0 and self._data[0].is_identity()
        return not self._data

    def _check(self, other: "GroupElement") -> None:
        if not isinstance(other, GroupElement) or other.spec != self.spec:
            raise SpecMismatch(f"{self.spec} vs {getattr(other, 'spec', other)}")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        fam = self.spec.family
        if fam is Family.FREE_ABELIAN:
            return GroupElement(self.spec, tuple(x + y for x, y in zip(self._data, other._data)))
        if fam is Family.FREE:
            return GroupElement(self.spec, free_reduce(self._data + other._data))
        if fam is Family.SURFACE:
            w, canonical = _surface_data(self.spec).normal(self._data + other._data)
            return GroupElement(self.spec, w, canonical)
        return GroupElement(
            self.spec, (self._data[0] * other._data[0], self._data[1] + other._data[1])
        )

    def inverse(self) -> "GroupElement":
        fam = self.spec.family
        if fam is Family.FREE_ABELIAN:
            return GroupElement(self.spec, tuple(-x for x in self._data))
        if fam is Family.DIRECT_SUM_Z:
            return GroupElement(self.spec, (self._data[0].inverse(), -self._data[1]))
        if fam is Family.FREE:
            return GroupElement(self.spec, invert_word(self._data))
        w, canonical = _surface_data(self.spec).normal(invert_word(self._data))
        return GroupElement(self.spec, w, canonical)

    def __pow__(self, k: int) -> "GroupElement":
        base = self if k >= 0 else self.inverse()
        out = self.spec.identity()
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement) or other.spec != self.spec:
            return NotImplemented
        if self.spec.family is Family.SURFACE and not (self._canonical and other._canonical):
            return _surface_data(self.spec).equal(self._data, other._data)
        return self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            if self.spec.family is Family.SURFACE:
                self._hash = hash(_surface_data(self.spec).key(self._data))
            else:
                self._hash = hash((self.spec.family, self._data))
        return self._hash

    def __repr__(self) -> str:
        return f"<{self.spec} {self}>"

    def __str__(self) -> str:
        fam = self.spec.family
        if fam is Family.FREE_ABELIAN:
            return "(" + ",".join(str(x) for x in self._data) + ")"
        if fam is Family.DIRECT_SUM_Z:
            return f"({self._data[0]},{self._data[1]})"
        return " ".join(self.spec.spell(self._data)) or "1"


# ---------------------------------------------------------------------------
# homomorphisms to free groups


def apply_hom(images: Sequence[Word], word: Sequence[int]) -> Word:
    out: list[int] = []
    for x in word:
        img = images[abs(x) - 1]
        out.extend(img if x > 0 else invert_word(img))
    return free_reduce(out)


def default_surface_homs(genus: int) -> list[tuple]:
    """Homomorphisms from the genus g surface group onto the free group F(u, v).

    Each one sends the relator [a1,b1]...[ag,bg] to the identity: two
    handles map so that their commutators cancel, or every handle lands in
    a cyclic subgroup.
    The list was chosen so that it separates every pair of elements in the
    radius 4 ball of the genus 2 group.
    """
    u, v = (1,), (2,)
    U, V = (-1,), (-2,)
    homs: list[tuple] = []

    def one(img_handles):
        return tuple(w for pair in img_handles for w in pair)

    triv = ((), ())
    # two handles whose commutators cancel: [x,y][y x^k, x] = 1
    for i in range(genus):
        for j in range(genus):
            if i == j:
                continue
            for second in ((v, u), (v + u, u), (v + U, u), (v, u + v), (v, u + V)):
                handles = [triv] * genus
                handles[i] = (u, v)
                handles[j] = second
                homs.append(one(handles))
    # handles sent into cyclic subgroups, so every commutator dies
    for i in range(genus):
        for j in range(genus):
            if i == j:
                continue
            for first, second in (((u, ()), (v, ())), (((), u), ((), v)),
                                  ((u, u), (v, v)), ((u, ()), ((), v))):
                handles = [triv] * genus
                handles[i] = first
                handles[j] = second
                homs.append(one(handles))
    return homs


# ---------------------------------------------------------------------------
# order oracles


class Cmp(str, enum.Enum):
    LT = "LT"
    EQ = "EQ"
    GT = "GT"


@dataclass(frozen=True)
class Undecided:
    depth: int

    def __str__(self):
        return f"Undecided({self.depth})"


def magnus_leading(word: Sequence[int], ngens: int, degree: int | None = None):
    """Leading term of M(w) - 1 for a reduced word w of a free group.

    M sends x to 1 + X and x^-1 to 1 - X + X^2 - ... in the ring of
    noncommuting power series with integer coefficients. Monomials are
    ordered by degree and then lexicographically by generator index. The
    result is (monomial, coefficient), or None for the empty word. A nonzero
    word of length L always has a nonzero term of degree at most L.
    """
    word = free_reduce(word)
    if not word:
        return None
    top = max(degree or 0, len(word))
    d = 1
    while True:
        lead = _magnus_lowest(word, min(d, top))
        if lead is not None:
            return lead
        if d >= top:
            raise AssertionError("Magnus expansion vanished on a reduced word")
        d *= 2


def magnus_series(word: Sequence[int], degree: int) -> dict:
    series: dict = {(): 1}
    for x in word:
        i = abs(x) - 1
        new: dict = {}
        for mono, c in series.items():
            room = degree - len(mono)
            if x > 0:
                new[mono] = new.get(mono, 0) + c
                if room >= 1:
                    m2 = mono + (i,)
                    new[m2] = new.get(m2, 0) + c
            else:
                for m in range(room + 1):
                    m2 = mono + (i,) * m
                    new[m2] = new.get(m2, 0) + (c if m % 2 == 0 else -c)
        series = {k: v for k, v in new.items() if v}
    return series


def _magnus_lowest(word, degree):
    series = magnus_series(word, degree)
    best = None
    for mono, c in series.items():
        if mono and (best is None or (len(mono), mono) < (len(best[0]), best[0])):
            best = (mono, c)
    return best


class OrderOracle:
    """A left-invariant order on the group of `spec`.

    Subclasses implement sign(h): +1 when h > 1, -1 when h < 1, 0 for the
    identity, or an Undecided value. compare(a, b) is the sign of a^-1 b,
    so left invariance holds by construction.
    """

    kind = "abstract"

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        self._cache: dict = {}

    def sign(self, h: GroupElement):
        raise NotImplementedError

    def compare(self, a: GroupElement, b: GroupElement):
        if a.spec != self.spec or b.spec != self.spec:
            raise SpecMismatch(f"oracle on {self.spec}, operands on {a.spec} / {b.spec}")
        h = a.inverse() * b
        s = self._cache.get(h)
        if s is None:
            s = self.sign(h)
            self._cache[h] = s
        if isinstance(s, Undecided):
            return s
        return Cmp.EQ if s == 0 else (Cmp.LT if s > 0 else Cmp.GT)

    def is_positive(self, h: GroupElement) -> bool:
        s = self.sign(h)
        if isinstance(s, Undecided):
            raise UndecidedOrder(f"sign of {h} is {s}")
        return s > 0

    def undecided_pairs(self, elements: Sequence[GroupElement]) -> list:
        """All pairs of distinct elements the oracle cannot compare."""
        return []

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"kind": self.kind, **self.params()}


class LexFreeAbelian(OrderOracle):
    """Lexicographic order on Z^n; the first coordinate in `priority` decides."""

    kind = "LexFreeAbelian"

    def __init__(self, spec: GroupSpec, priority: Sequence[int] | None = None):
        if spec.family is not Family.FREE_ABELIAN:
            raise SpecMismatch("LexFreeAbelian needs a free abelian group")
        super().__init__(spec)
        self.priority = tuple(range(spec.rank) if priority is None else priority)
        if sorted(self.priority) != list(range(spec.rank)):
            raise ValueError("priority must be a permutation of the coordinates")

    def sign(self, h):
        v = h.exponents
        for i in self.priority:
            if v[i]:
                return 1 if v[i] > 0 else -1
        return 0

    def params(self):
        return {"priority": list(self.priority)}


class MagnusFree(OrderOracle):
    """Magnus order on a free group.

    h > 1 iff the leading coefficient of M(h) - 1 is negative. With this
    convention the generator listed first is the smallest: a < b < 1.
    """

    kind = "MagnusFree"

    def __init__(self, spec: GroupSpec, degree: int | None = None):
        if spec.family is not Family.FREE:
            raise SpecMismatch("MagnusFree needs a free group")
        if degree is not None and degree < 1:
            raise ValueError("degree must be positive")
        super().__init__(spec)
        self.degree = degree

    def sign(self, h):
        # The leading term does not depend on the truncation once the degree
        # reaches len(h), and len(a^-1 b) never exceeds twice the longer of
        # a and b, so the default truncation is never the deciding factor.
        lead = magnus_leading(h.word, self.spec.num_gens, self.degree)
        if lead is None:
            return 0
        return 1 if lead[1] < 0 else -1

    def params(self):
        return {"degree": self.degree}


class ResidualFamily(OrderOracle):
    """Lexicographic order through a list of homomorphisms to free groups.

    a < b is decided by the first homomorphism (within `depth`) that does
    not identify a and b, using that target's Magnus order. Pairs that no
    homomorphism separates are Undecided.
    """

    kind = "ResidualFamily"

    def __init__(self, spec: GroupSpec, homs: Sequence[Sequence[Word]] | None = None,
                 target_rank: int = 2, depth: int | None = None):
        if spec.family not in (Family.SURFACE, Family.FREE):
            raise SpecMismatch("ResidualFamily needs a surface or free group")
        super().__init__(spec)
        if homs is None:
            if spec.family is not Family.SURFACE:
                raise ValueError("homomorphisms must be given for a free source")
            homs = default_surface_homs(spec.rank)
        self.homs = [tuple(tuple(w) for w in h) for h in homs]
        self.target = GroupSpec.free(target_rank)
        self.target_oracle = MagnusFree(self.target)
        self.depth = len(self.homs) if depth is None else min(depth, len(self.homs))
        for h in self.homs:
            if len(h) != spec.num_gens:
                raise ValueError("a homomorphism needs one image per generator")
            for w in h:
                self.target.parse_word(w)
            if spec.family is Family.SURFACE and apply_hom(h, surface_relator(spec)):
                raise ValueError(f"{h} does not kill the surface relator")

    def image(self, k: int, h: GroupElement) -> GroupElement:
        return GroupElement(self.target, apply_hom(self.homs[k], h.word))

    def sign(self, h):
        if h.is_identity():
            return 0
        for k in range(self.depth):
            img = self.image(k, h)
            if not img.is_identity():
                return self.target_oracle.sign(img)
        return Undecided(self.depth)

    def undecided_pairs(self, elements):
        buckets: dict = {}
        for e in elements:
            key = tuple(apply_hom(self.homs[k], e.word) for k in range(self.depth))
            buckets.setdefault(key, []).append(e)
        out = []
        for group in buckets.values():
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    out.append((group[i], group[j]))
        return out

    def params(self):
        return {
            "homs": [[list(w) for w in h] for h in self.homs],
            "target_rank": self.target.rank,
            "depth": self.depth,
        }


class LexProductWithZ(OrderOracle):
    """Order on G + Z: the Z coordinate decides first, then the inner order."""

    kind = "LexProductWithZ"

    def __init__(self, spec: GroupSpec, inner: OrderOracle):
        if spec.family is not Family.DIRECT_SUM_Z or inner.spec != spec.inner:
            raise SpecMismatch("LexProductWithZ needs G + Z with an order on G")
        super().__init__(spec)
        self.inner = inner

    def sign(self, h):
        if h.z:
            return 1 if h.z > 0 else -1
        return self.inner.sign(h.inner)

    def undecided_pairs(self, elements):
        by_z: dict = {}
        for e in elements:
            by_z.setdefault(e.z, []).append(e)
        out = []
        for group in by_z.values():
            inner = {}
            for e in group:
                inner.setdefault(e.inner, e)
            lookup = {e.inner: e for e in group}
            for x, y in self.inner.undecided_pairs(list(inner)):
                out.append((lookup[x], lookup[y]))
        return out

    def params(self):
        return {"inner": self.inner.describe()}


class ReversedOrder(OrderOracle):
    """The opposite order, which is again left-invariant."""

    kind = "ReversedOrder"

    def __init__(self, base: OrderOracle):
        super().__init__(base.spec)
        self.base = base

    def sign(self, h):
        s = self.base.sign(h)
        return s if isinstance(s, Undecided) else -s

    def undecided_pairs(self, elements):
        return self.base.undecided_pairs(elements)

    def params(self):
        return {"base": self.base.describe()}


def compare(a: GroupElement, b: GroupElement, oracle: OrderOracle):
    return oracle.compare(a, b)


def default_oracle(spec: GroupSpec) -> OrderOracle:
    fam = spec.family
    if fam is Family.FREE_ABELIAN:
        return LexFreeAbelian(spec)
    if fam is Family.FREE:
        return MagnusFree(spec)
    if fam is Family.SURFACE:
        return ResidualFamily(spec)
    return LexProductWithZ(spec, default_oracle(spec.inner))


# ---------------------------------------------------------------------------
# balls


def ball(spec: GroupSpec, radius: int) -> list[GroupElement]:
    """Elements of word length at most `radius`, in breadth-first order."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if spec.family is Family.SURFACE:
        data = _surface_data(spec)
        if radius > data.cap:
            raise ValueError(f"genus {spec.rank} balls are limited to radius {data.cap}")
        data.ensure(radius)
        return [GroupElement(spec, w) for shell in data.shells[: radius + 1] for w in shell]
    seen = {spec.identity()}
    order = [spec.identity()]
    frontier = [spec.identity()]
    gens = []
    for g in spec.gens():
        gens += [g, g.inverse()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for x in gens:
                y = w * x
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    nxt.append(y)
        frontier = nxt
    return order


def sort_elements(elements: Sequence[GroupElement], oracle: OrderOracle) -> list[GroupElement]:
    bad = oracle.undecided_pairs(elements)
    if bad:
        x, y = bad[0]
        raise UndecidedOrder(f"{len(bad)} undecided pairs, e.g. {x} vs {y}")

    def cmp(x, y):
        c = oracle.compare(x, y)
        if isinstance(c, Undecided):
            raise UndecidedOrder(f"{x} vs {y}: {c}")
        return -1 if c is Cmp.LT else (1 if c is Cmp.GT else 0)

    return sorted(elements, key=functools.cmp_to_key(cmp))


def sorted_ball(oracle: OrderOracle, radius: int) -> list[GroupElement]:
    """The radius-r Cayley ball sorted ascending by the oracle."""
    return sort_elements(ball(oracle.spec, radius), oracle)
