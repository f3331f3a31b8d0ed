"""Truncated order divisions and their order-preserving rational embedding.

An order division is a proper nonempty downward-closed subset of the group.
Only the countable subfamily made of the cosets gH and gH-bar matters to
the constructions here, where H = {h < 1} and H-bar = H + {1}. By left
invariance gH = {x < g} and gH-bar = {x <= g}, so on a finite sorted ball
each one is represented by its witness, the set of ball elements it
contains.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import MemberNotFound, UndecidedOrder
from .group_order import Cmp, GroupElement, OrderOracle, Undecided, sorted_ball


class Kind(str, enum.Enum):
    OPEN = "gH"
    CLOSED = "gHbar"


class GapPlace(str, enum.Enum):
    ABSOLUTE_UP = "AbsoluteUp"
    ABSOLUTE_DOWN = "AbsoluteDown"
    RELATIVE_UP = "RelativeUp"
    RELATIVE_DOWN = "RelativeDown"
    NOT_A_GAP_PLACE = "NotAGapPlace"
    UNKNOWN = "UnknownAtTruncation"


@dataclass(frozen=True)
class TruncatedDivision:
    kind: Kind
    g: GroupElement
    witness: frozenset = field(compare=False, hash=False)

    @property
    def key(self) -> tuple:
        return (self.kind, self.g)

    @property
    def partner_key(self) -> tuple:
        other = Kind.CLOSED if self.kind is Kind.OPEN else Kind.OPEN
        return (other, self.g)

    def __str__(self):
        g = "" if self.g.is_identity() else str(self.g)
        return f"{g}H" if self.kind is Kind.OPEN else f"{g}Hbar"


@dataclass
class DivisionFamily:
    """Members sorted by inclusion, with optional rational e-values.

    Two members may have equal witnesses on the ball (gHbar and g'H when g'
    follows g in the ball); they are kept apart and listed in
    `equal_witness`, since they need not agree outside the ball.
    """

    oracle: OrderOracle
    radius: int
    ball: list
    members: list
    e_values: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rank = {g: i for i, g in enumerate(self.ball)}
        self.index = {m.key: i for i, m in enumerate(self.members)}

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def find(self, kind: Kind, g: GroupElement) -> TruncatedDivision:
        i = self.index.get((kind, g))
        if i is None:
            raise MemberNotFound(f"{kind.value} at {g} is not in the family")
        return self.members[i]

    def get(self, kind: Kind, g: GroupElement) -> TruncatedDivision | None:
        i = self.index.get((kind, g))
        return None if i is None else self.members[i]

    def position(self, C: TruncatedDivision) -> int:
        i = self.index.get(C.key)
        if i is None:
            raise MemberNotFound(f"{C} is not in the family")
        return i

    def e(self, C: TruncatedDivision) -> Fraction:
        return self.e_values[C.key]

    @property
    def H(self) -> TruncatedDivision:
        return self.find(Kind.OPEN, self.oracle.spec.identity())

    @property
    def H_bar(self) -> TruncatedDivision:
        return self.find(Kind.CLOSED, self.oracle.spec.identity())

    @property
    def equal_witness(self) -> list:
        return [
            (a, b) for a, b in zip(self.members, self.members[1:]) if a.witness == b.witness
        ]

    @property
    def gaps(self) -> list:
        """Pairs (gH, gHbar) with both ends present, in increasing order."""
        out = []
        for m in self.members:
            if m.kind is Kind.OPEN:
                p = self.get(Kind.CLOSED, m.g)
                if p is not None:
                    out.append((m, p))
        return out

    def translate(self, h: GroupElement, C: TruncatedDivision) -> TruncatedDivision | None:
        """h.C as a member, or None when hg leaves the ball."""
        return self.get(C.kind, h * C.g)

    def window(self, lo: int, hi: int) -> "DivisionFamily":
        """The contiguous sub-chain members[lo:hi]."""
        ms = self.members[lo:hi]
        keys = {m.key for m in ms}
        return DivisionFamily(self.oracle, self.radius, self.ball, ms,
                              {k: v for k, v in self.e_values.items() if k in keys})

    def replace_witness(self, C: TruncatedDivision, witness: Iterable) -> "DivisionFamily":
        """A copy in which one witness is swapped, used as a negative control."""
        ms = [TruncatedDivision(m.kind, m.g, frozenset(witness)) if m.key == C.key else m
              for m in self.members]
        return DivisionFamily(self.oracle, self.radius, self.ball, ms, dict(self.e_values))

    def census(self) -> dict:
        return {
            "radius": self.radius,
            "ball_size": len(self.ball),
            "members": len(self.members),
            "gaps": len(self.gaps),
            "equal_witness_pairs": len(self.equal_witness),
            "e_values": [[str(m), self.e_values[m.key]] for m in self.members if m.key in self.e_values],
        }


def witness(kind: Kind, g: GroupElement, ball: Sequence[GroupElement], oracle: OrderOracle) -> frozenset:
    out = set()
    for x in ball:
        c = oracle.compare(x, g)
        if isinstance(c, Undecided):
            raise UndecidedOrder(f"{x} vs {g}: {c}")
        if c is Cmp.LT or (kind is Kind.CLOSED and c is Cmp.EQ):
            out.add(x)
    return frozenset(out)


def generate_family(oracle: OrderOracle, radius: int) -> DivisionFamily:
    ball = sorted_ball(oracle, radius)
    members = []
    for i, g in enumerate(ball):
        below = frozenset(ball[:i])
        members.append(TruncatedDivision(Kind.OPEN, g, below))
        members.append(TruncatedDivision(Kind.CLOSED, g, below | {g}))
    return DivisionFamily(oracle, radius, ball, members)


# ---------------------------------------------------------------------------
# the embedding e

_NEG_INF = (-1, 0)
_POS_INF = (1, 0)


def _mediant(a: tuple, b: tuple) -> tuple:
    return (a[0] + b[0], a[1] + b[1])


def _stern_brocot(n: int, lo: tuple, hi: tuple, out: list) -> None:
    """Fill out[0:n] with increasing fractions strictly between lo and hi.

    The middle slot takes the mediant of the bounds and each half recurses,
    so every value is a node of the Stern-Brocot tree.
    """
    if n <= 0:
        return
    mid = n // 2
    m = _mediant(lo, hi)
    left: list = [None] * mid
    right: list = [None] * (n - mid - 1)
    _stern_brocot(mid, lo, m, left)
    _stern_brocot(n - mid - 1, m, hi, right)
    out[:mid] = left
    out[mid] = m
    out[mid + 1:] = right


def embed_e(family: DivisionFamily) -> DivisionFamily:
    """Assign e(H) = 0, e(Hbar) = 1 and Stern-Brocot mediants elsewhere.

    Values below H fill (-inf, 0) and values above Hbar fill (1, +inf).
    Since every member sits in the chain, consecutive members gH < gHbar
    bound an interval that contains no other value, which is the gap.
    """
    n = len(family.members)
    iH = family.position(family.H)
    below: list = [None] * iH
    above: list = [None] * (n - iH - 2)
    _stern_brocot(iH, _NEG_INF, (0, 1), below)
    _stern_brocot(n - iH - 2, (1, 1), _POS_INF, above)
    vals = below + [(0, 1), (1, 1)] + above
    e_values = {m.key: Fraction(p, q) for m, (p, q) in zip(family.members, vals)}
    return DivisionFamily(family.oracle, family.radius, family.ball, family.members, e_values)


def e_is_monotone(family: DivisionFamily) -> bool:
    vals = [family.e(m) for m in family.members]
    return all(a < b for a, b in zip(vals, vals[1:]))


def gap_intervals_clean(family: DivisionFamily) -> list:
    """Gaps whose open e-interval contains the value of some other member."""
    bad = []
    vals = [(family.e(m), m) for m in family.members]
    for a, b in family.gaps:
        lo, hi = family.e(a), family.e(b)
        inside = [m for v, m in vals if lo < v < hi]
        if inside:
            bad.append((a, b, inside))
    return bad


def classify_gap(C: TruncatedDivision, family: DivisionFamily) -> GapPlace:
    """Gap type of a member of a coset family.

    gH and gHbar differ by the single element g, so nothing lies strictly
    between them and the gap (e(gH), e(gHbar)) has both ends attained. This
    makes gH an absolute downward and gHbar an absolute upward gap place,
    provided both are present. In a family cut short at the partner the
    type is not visible.
    """
    family.position(C)
    if family.get(*C.partner_key) is None:
        return GapPlace.UNKNOWN
    return GapPlace.ABSOLUTE_DOWN if C.kind is Kind.OPEN else GapPlace.ABSOLUTE_UP


# ---------------------------------------------------------------------------
# facts on the ball


@dataclass
class CheckReport:
    violations: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)
    unknown: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: str) -> None:
        self.violations.append((kind, detail))

    def count(self, what: str, n: int = 1) -> None:
        self.checked[what] = self.checked.get(what, 0) + n

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"kind": k, "detail": d} for k, d in self.violations],
            "checked": dict(sorted(self.checked.items())),
            "unknown": len(self.unknown),
        }


def facts_check(oracle: OrderOracle, radius: int, family: DivisionFamily | None = None) -> CheckReport:
    """Brute-force the closure facts on the witnesses of the ball.

    Downward closure and translation closure go through the oracle
    directly, not through the positions of the sorted ball.
    """
    fam = family if family is not None else generate_family(oracle, radius)
    ball = fam.ball
    inball = set(ball)
    rep = CheckReport()
    wits = [m.witness for m in fam.members]
    # downward closure
    for m in fam.members:
        for a in m.witness:
            for b in ball:
                if b not in m.witness and oracle.compare(b, a) is Cmp.LT:
                    rep.add("DownwardClosure", f"{m} holds {a} but not {b} < {a}")
        rep.count("downward_closure")
    # fact 1: translates of members are members
    for m in fam.members:
        for h in ball:
            target = fam.translate(h, m)
            if target is None:
                rep.unknown.append((str(m), str(h)))
                continue
            for x in ball:
                y = h.inverse() * x
                if y in inball and ((x in target.witness) != (y in m.witness)):
                    rep.add("Fact1", f"{h}.{m} disagrees with {target} at {x}")
                    break
            rep.count("fact1")
    # fact 2: nesting
    for i in range(len(wits)):
        for j in range(i + 1, len(wits)):
            if not (wits[i] <= wits[j] or wits[j] <= wits[i]):
                rep.add("Fact2", f"{fam.members[i]} and {fam.members[j]} are not nested")
            rep.count("fact2")
    # facts 4 and 5: unions and intersections of members are members, here
    # for every pair and for every initial and final segment of the chain
    known = set(wits) | {frozenset(inball), frozenset()}
    groups = [(wits[i], wits[j]) for i in range(len(wits)) for j in range(i + 1, len(wits))]
    for a, b in groups:
        if a | b not in known:
            rep.add("Fact4", "a union of two members is not a member")
        if a & b not in known:
            rep.add("Fact5", "an intersection of two members is not a member")
        rep.count("fact4")
        rep.count("fact5")
    for k in range(1, len(wits) + 1):
        u = frozenset().union(*wits[:k])
        x = frozenset(inball).intersection(*wits[-k:])
        if u not in known:
            rep.add("Fact4", f"union of the first {k} members is not a member")
        if x not in known:
            rep.add("Fact5", f"intersection of the last {k} members is not a member")
        rep.count("fact4")
        rep.count("fact5")
    # gaps are carried to gaps by translations inside the ball
    for m in fam.members:
        t0 = classify_gap(m, fam)
        for h in ball:
            hm = fam.translate(h, m)
            if hm is not None and classify_gap(hm, fam) is not t0:
                rep.add("GapType", f"{m} and {hm} have different gap types")
        rep.count("gap_type")
    return rep
