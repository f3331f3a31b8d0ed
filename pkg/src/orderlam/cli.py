"""Command-line front end: read a complex file, run the stages, write the report.

    orderlam torus --out out/torus
    orderlam path/to/complex.json --stages validate,orient --truncation 2

The input is a JSON document with three sections, `group`, `complex` and
`options`; see README.md for the schema. Bundled inputs can be named by
their stem. Exit status is 0 when every check passes, 1 when a stage fails
(the failing sections are named on standard error) and 2 when the input
does not parse.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import branched, divisions
from .carrier import (
    SAMPLE_MU,
    GapLeaf,
    GluingAtlas,
    assemble_leaf,
    build_charts,
    build_gluing,
    build_immersion,
    double_point_compatibility,
    gluing_check,
    mu_of_leaf,
)
from .complex import Polygon, spine, standardize, validate
from .errors import InconsistentMu, MemberNotFound, OrderlamError, ParseError, StageFailure
from .group_order import (
    Family,
    GroupElement,
    GroupSpec,
    LexFreeAbelian,
    LexProductWithZ,
    MagnusFree,
    ResidualFamily,
    ReversedOrder,
    ball,
)
from .polyhedron import from_vertex_cycles
from .svg import LeafPicture, render_svg

STAGES = ("validate", "standardize", "orient", "diagnostics", "divisions", "carrier")
DEPENDS = {
    "validate": (),
    "standardize": ("validate",),
    "orient": ("standardize",),
    "diagnostics": ("orient",),
    "divisions": ("validate",),
    "carrier": ("orient", "divisions"),
}
BUNDLED = ("torus", "genus2", "genus3", "t3_cube", "mapping_torus_g2")


# ---------------------------------------------------------------------------
# parsing


def _keys(obj, where: str, required=(), optional=()) -> dict:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        raise ParseError(f"{where}: unknown keys {unknown}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ParseError(f"{where}: missing keys {missing}")
    return obj


def _int(x, where: str, lo: int = 0) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < lo:
        raise ParseError(f"{where}: expected an integer >= {lo}")
    return x


def parse_group(doc: dict, where: str = "group") -> GroupSpec:
    _keys(doc, where, ["family"], ["rank", "genus", "generators", "inner", "order"])
    fam = doc["family"]
    names = doc.get("generators")
    try:
        if fam == Family.FREE_ABELIAN.value:
            return GroupSpec.free_abelian(_int(doc.get("rank"), f"{where}.rank", 1), names)
        if fam == Family.FREE.value:
            return GroupSpec.free(_int(doc.get("rank"), f"{where}.rank", 1), names)
        if fam == Family.SURFACE.value:
            return GroupSpec.surface(_int(doc.get("genus"), f"{where}.genus", 2), names)
        if fam == Family.DIRECT_SUM_Z.value:
            inner = parse_group({k: v for k, v in doc["inner"].items() if k != "order"},
                                f"{where}.inner") if "inner" in doc else None
            if inner is None:
                raise ParseError(f"{where}: DirectSumWithZ needs `inner`")
            z = names[-1] if names else "t"
            return GroupSpec.direct_sum_z(inner, z)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None
    raise ParseError(f"{where}: unknown family {fam!r}")


def parse_order(doc, spec: GroupSpec, where: str = "group.order"):
    _keys(doc, where, ["kind"], ["priority", "degree", "homs", "target_rank", "depth", "inner", "base"])
    kind = doc["kind"]
    try:
        if kind == "LexFreeAbelian":
            return LexFreeAbelian(spec, doc.get("priority"))
        if kind == "MagnusFree":
            return MagnusFree(spec, doc.get("degree"))
        if kind == "ResidualFamily":
            homs = doc.get("homs")
            rank = doc.get("target_rank", 2)
            if homs is not None:
                target = GroupSpec.free(rank)
                homs = [[target.parse_word(w) for w in h] for h in homs]
            return ResidualFamily(spec, homs, rank, doc.get("depth"))
        if kind == "LexProductWithZ":
            if spec.inner is None or "inner" not in doc:
                raise ParseError(f"{where}: LexProductWithZ needs an inner order on G + Z")
            return LexProductWithZ(spec, parse_order(doc["inner"], spec.inner, f"{where}.inner"))
        if kind == "ReversedOrder":
            return ReversedOrder(parse_order(doc.get("base"), spec, f"{where}.base"))
    except OrderlamError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{where}: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{where}: {exc}") from None
    raise ParseError(f"{where}: unknown order kind {kind!r}")


def _element(spec: GroupSpec, word, where: str) -> GroupElement:
    if not isinstance(word, list):
        raise ParseError(f"{where}: a label is a list of generator names")
    try:
        h = spec.element(word)
    except OrderlamError as exc:
        raise ParseError(f"{where}: {exc}") from None
    if h.is_identity():
        raise ParseError(f"{where}: label reduces to the identity")
    return h


def parse_complex(doc: dict, spec: GroupSpec):
    _keys(doc, "complex", ["dimension"], ["sides", "pairs", "faces", "names", "pairings"])
    dim = doc["dimension"]
    if dim == 2:
        _keys(doc, "complex", ["dimension", "sides"], ["pairs"])
        sides = doc["sides"]
        if not isinstance(sides, list) or len(sides) < 2:
            raise ParseError("complex.sides: expected a list of sides")
        labels, names = [], []
        for k, s in enumerate(sides):
            _keys(s, f"complex.sides[{k}]", ["label"], ["name"])
            labels.append(_element(spec, s["label"], f"complex.sides[{k}].label"))
            names.append(s.get("name", f"s{k}"))
        try:
            return Polygon.from_word(spec, labels, doc.get("pairs"), names)
        except (OrderlamError, IndexError, TypeError) as exc:
            raise ParseError(f"complex: {exc}") from None
    if dim == 3:
        _keys(doc, "complex", ["dimension", "faces", "pairings"], ["names"])
        faces = doc["faces"]
        pairings = []
        try:
            for k, pr in enumerate(doc["pairings"]):
                where = f"complex.pairings[{k}]"
                _keys(pr, where, ["faces", "label", "vertex_map"])
                i, j = (_int(x, f"{where}.faces") for x in pr["faces"])
                vmap = {_int(a, where): _int(b, where) for a, b in pr["vertex_map"]}
                pairings.append((i, j, _element(spec, pr["label"], f"{where}.label"), vmap))
            return from_vertex_cycles(spec, faces, pairings, doc.get("names"))
        except (OrderlamError, IndexError, TypeError, ValueError) as exc:
            raise ParseError(f"complex: {exc}") from None
    raise ParseError(f"complex.dimension: expected 2 or 3, got {dim!r}")


def group_document(spec: GroupSpec) -> dict:
    if spec.family is Family.DIRECT_SUM_Z:
        return {"family": spec.family.value, "inner": group_document(spec.inner),
                "generators": list(spec.generators)}
    key = "genus" if spec.family is Family.SURFACE else "rank"
    return {"family": spec.family.value, key: spec.rank, "generators": list(spec.generators)}


def complex_document(cx) -> dict:
    """The `complex` section describing a polygon or polyhedron."""
    spell = cx.spec.spell
    if cx.dimension == 2:
        return {"dimension": 2,
                "sides": [{"label": spell(s.label.word), "name": s.name} for s in cx.sides],
                "pairs": [s.pair for s in cx.sides]}
    faces = sorted(cx.faces)
    if faces != list(range(len(faces))):
        raise ValueError("faces must be numbered 0 .. n-1")
    pairings = []
    for i in faces:
        j = cx.pair[i]
        if i > j:
            continue
        # t_h with h = label(i) carries face j onto face i, reversing its sides
        vmap = sorted([cx.start(s), cx.end(cx.mate[s])] for s in cx.faces[j])
        pairings.append({"faces": [i, j], "label": spell(cx.label[i].word), "vertex_map": vmap})
    return {"dimension": 3,
            "faces": [[cx.start(s) for s in cx.faces[f]] for f in faces],
            "names": [cx.names[f] for f in faces],
            "pairings": pairings}


OPTION_KEYS = ("radius", "truncation", "stages", "out", "expect")
EXPECT_KEYS = ("cusps", "switches", "extendability", "vertical_boundary_components")


class ComplexFile:
    """A parsed input document."""

    def __init__(self, doc, name: str = "input"):
        _keys(doc, "document", ["group", "complex"], ["options"])
        self.name = name
        self.spec = parse_group(doc["group"])
        if "order" not in doc["group"]:
            raise ParseError("group: missing keys ['order']")
        self.oracle = parse_order(doc["group"]["order"], self.spec)
        self.complex = parse_complex(doc["complex"], self.spec)
        opts = _keys(doc.get("options", {}), "options", (), OPTION_KEYS)
        self.radius = _int(opts.get("radius", 2), "options.radius")
        self.truncation = _int(opts.get("truncation", 2), "options.truncation")
        self.stages = _stage_list(opts.get("stages", list(STAGES)), "options.stages")
        self.out = opts.get("out")
        self.expect = dict(_keys(opts.get("expect", {}), "options.expect", (), EXPECT_KEYS))

    @classmethod
    def load(cls, path) -> "ComplexFile":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError) as exc:
            raise ParseError(f"cannot read {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
        return cls(doc, path.name)


def _stage_list(stages, where: str) -> list:
    if isinstance(stages, str):
        stages = [s.strip() for s in stages.split(",") if s.strip()]
    if not isinstance(stages, list) or not stages:
        raise ParseError(f"{where}: expected a non-empty list of stages")
    bad = [s for s in stages if s not in STAGES]
    if bad:
        raise ParseError(f"{where}: unknown stages {bad}")
    return stages


def with_dependencies(stages) -> list:
    need = set()

    def add(s):
        if s not in need:
            need.add(s)
            for d in DEPENDS[s]:
                add(d)

    for s in stages:
        add(s)
    return [s for s in STAGES if s in need]


def bundled_path(name: str) -> Path:
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUNDLED:
        raise ParseError(f"no input file {name!r} and no bundled input of that name")
    return Path(str(resources.files("orderlam") / "data" / f"{stem}.json"))


def resolve_input(arg: str) -> Path:
    p = Path(arg)
    return p if p.exists() else bundled_path(arg)


# ---------------------------------------------------------------------------
# report values


def jsonable(x):
    """Fractions become [num, den]; group elements their names; sets sorted lists."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return [x.numerator, x.denominator]
    if isinstance(x, GroupElement):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if hasattr(x, "value"):
        return x.value
    raise TypeError(f"cannot put {type(x).__name__} into the report")


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# stages


class _Run:
    def __init__(self, cf: ComplexFile):
        self.cf = cf
        self.oracle = cf.oracle
        self.sections: dict = {}
        self.std = None
        self.osp = None
        self.family = None
        self.pictures: list = []
        self.charts: dict = {}

    # each stage returns its report section

    def validate(self) -> dict:
        cx = self.cf.complex
        rep = validate(cx)
        out = {"status": _status(rep.ok), "dimension": cx.dimension, **rep.as_dict()}
        if rep.ok:
            out["spine"] = spine(cx).census()
        return out

    def standardize(self) -> dict:
        self.std = standardize(self.cf.complex)
        sp = spine(self.std)
        if self.std.dimension == 2:
            ok = all(v.valency == 3 for v in sp.vertices)
        else:
            ok = all(e.valency == 3 for e in sp.edges) and all(v.valency in (2, 4) for v in sp.vertices)
        return {"status": _status(ok), "spine": sp.census(), "faces": _face_count(self.std)}

    def orient(self) -> dict:
        self.osp = branched.orient(self.std, self.oracle)
        rep = branched.check_branched(self.osp)
        cx = self.std
        signs = {}
        for f in sorted(self.osp.sector_signs):
            lab = cx.label(f) if cx.dimension == 2 else cx.label[f]
            signs[str(f)] = {"label": lab, "sign": self.osp.sign(f)}
        return {
            "status": _status(rep.ok),
            "order": self.oracle.describe(),
            "signs": signs,
            "branch_sectors": self.osp.branch_sectors,
            "branch_cells": len(self.osp.branch_cells),
            "double_points": len(self.osp.double_points),
            "branched": rep.as_dict(),
        }

    def diagnostics(self) -> dict:
        osp = self.osp
        ext = branched.extendability(osp)
        out = {"extendability": ext.verdict.value, "components": ext.components,
               "verdict": str(ext)}
        if osp.dimension == 2:
            out["cusps"] = branched.cusp_count(osp)
            out["switches"] = len(osp.spine.vertices)
        else:
            out["vertical_boundary_components"] = branched.vertical_boundary_components(osp)
            out["face_regions"] = list(ext.regions)
        mismatched = {}
        for k, v in sorted(self.cf.expect.items()):
            if out.get(k) != v:
                mismatched[k] = {"expected": v, "found": out.get(k)}
        out["expected"] = dict(sorted(self.cf.expect.items()))
        out["mismatched"] = mismatched
        out["status"] = _status(not mismatched)
        return out

    def divisions(self) -> dict:
        fam = divisions.embed_e(divisions.generate_family(self.oracle, self.cf.truncation))
        self.family = fam
        facts = divisions.facts_check(self.oracle, self.cf.truncation, fam)
        mono = divisions.e_is_monotone(fam)
        injective = len(set(fam.e_values.values())) == len(fam)
        dirty = divisions.gap_intervals_clean(fam)
        ok = facts.ok and mono and injective and not dirty
        return {
            "status": _status(ok),
            "unknown": len(facts.unknown),
            "census": fam.census(),
            "facts": facts.as_dict(),
            "e_monotone": mono,
            "e_injective": injective,
            "dirty_gaps": len(dirty),
        }

    def carrier(self) -> dict:
        fam, osp = self.family, self.osp
        charts = build_charts(osp, fam)
        self.charts = charts
        atlas = GluingAtlas(charts, fam)
        violations: list = []
        # gluings across branch cells
        maps, glue = [], {"maps": [], "checked": {}, "unknown": 0}
        for cell in osp.branch_cells:
            pair = build_gluing(cell, osp, atlas)
            maps += pair
            rep = gluing_check(cell, pair, fam)
            violations += [("gluing", k, d) for k, d in rep.violations]
            glue["unknown"] += len(rep.unknown)
            for k, v in rep.checked.items():
                glue["checked"][k] = glue["checked"].get(k, 0) + v
            glue["maps"] += [m.summary() for m in pair]
        glue["cells"] = len(osp.branch_cells)
        # double points
        dps = {"points": len(osp.double_points), "checked": {}, "unknown": 0}
        for dp in osp.double_points:
            rep = double_point_compatibility(dp, atlas)
            violations += [("double_point", k, d) for k, d in rep.violations]
            dps["unknown"] += len(rep.unknown)
            for k, v in rep.checked.items():
                dps["checked"][k] = dps["checked"].get(k, 0) + v
        # the immersion of the leaf space
        patch = build_immersion(charts, atlas, fam)
        violations += [("immersion", k, d) for k, d in patch.report.violations]
        values = [[str(m), fam.e(m)] for m in fam]
        mu = {"leaves": 0, "unknown": 0}
        for g in sorted(patch.gaps, key=lambda x: fam.rank[x]):
            for m in SAMPLE_MU:
                leaf = GapLeaf(g, m)
                values.append([f"{g}:{m}" if not g.is_identity() else f"1:{m}", patch.i_gap(leaf)])
                try:
                    got = mu_of_leaf(leaf, charts, atlas, fam, maps)
                except MemberNotFound:
                    mu["unknown"] += 1
                    continue
                except InconsistentMu as exc:
                    violations.append(("mu", "InconsistentMu", str(exc)))
                    continue
                mu["leaves"] += 1
                if got != m:
                    violations.append(("mu", "WrongMu", f"gap {g}: {got} != {m}"))
        # leaves of H and Hbar in the Cayley ball
        leaves = []
        for C in (fam.H, fam.H_bar):
            cp = assemble_leaf(C, self.cf.radius, self.oracle, self.std, osp.sector_signs)
            if cp.closed:
                violations.append(("leaves", "ClosedLeafComponent", str(C)))
            if cp.sign_violations:
                violations.append(("leaves", "NegativeFace", str(C)))
            entry = cp.summary()
            if self.std.dimension == 3:
                entry["faces_list"] = sorted([str(f.inside), f.face, str(f.outside)] for f in cp.faces)
            leaves.append(entry)
            self.pictures.append((C, cp))
        unknown = glue["unknown"] + dps["unknown"] + mu["unknown"] + len(patch.report.unknown)
        return {
            "status": _status(not violations),
            "unknown": unknown,
            "charts": {str(F): {"g": ch.g, "members": len(ch.psi), "doubled": ch.doubled}
                       for F, ch in sorted(charts.items())},
            "gluings": glue,
            "double_points": dps,
            "immersion": {**patch.summary(), "values": values},
            "mu": mu,
            "leaves": leaves,
            "violations": [{"check": a, "kind": k, "detail": d} for a, k, d in violations],
        }


def _face_count(cx) -> int:
    return len(cx) if cx.dimension == 2 else len(cx.faces)


def run_pipeline(input, stages=None, out=None, radius=None, truncation=None,
                 seed_report: bool = False, stderr=None):
    """Run the requested stages (and what they need) and write the outputs.

    Returns (exit status, report). ParseError propagates to the caller.
    """
    stderr = stderr if stderr is not None else sys.stderr
    path = resolve_input(str(input))
    cf = ComplexFile.load(path)
    if radius is not None:
        cf.radius = radius
    if truncation is not None:
        cf.truncation = truncation
    requested = _stage_list(stages, "--stages") if stages is not None else cf.stages
    order = with_dependencies(requested)
    run = _Run(cf)
    failed: list = []
    for st in order:
        if any(d in failed or run.sections.get(d, {}).get("status") != "pass" for d in DEPENDS[st]):
            run.sections[st] = {"status": "skipped"}
            continue
        try:
            run.sections[st] = getattr(run, st)()
        except OrderlamError as exc:
            run.sections[st] = {"status": "error", "error": type(exc).__name__, "detail": str(exc)}
        if run.sections[st]["status"] != "pass":
            failed.append(st)
    counts = {"pass": 0, "fail": 0, "unknown": 0, "skipped": 0}
    for sec in run.sections.values():
        s = sec["status"]
        counts["pass" if s == "pass" else "skipped" if s == "skipped" else "fail"] += 1
        counts["unknown"] += sec.get("unknown", 0)
    report = {
        "input": path.name,
        "group": str(cf.spec),
        "dimension": cf.complex.dimension,
        "options": {"radius": cf.radius, "truncation": cf.truncation},
        "stages": order,
        "sections": run.sections,
        "summary": counts,
    }
    out_dir = Path(out if out is not None else (cf.out or "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    text = dumps(report)
    (out_dir / "report.json").write_bytes(text.encode("utf-8"))
    if cf.complex.dimension == 2:
        if run.osp is not None:
            render_svg(run.osp, out_dir / "spine.svg")
        cx = run.std if run.std is not None else cf.complex
        tiles = ball(cx.spec, cf.radius) if cx.spec.family is Family.FREE_ABELIAN else [cx.spec.identity()]
        render_svg(LeafPicture(cx, tiles, run.pictures, run.charts), out_dir / "leaves.svg")
    golden = out_dir / "report.golden.json"
    if seed_report:
        golden.write_bytes(text.encode("utf-8"))
    elif golden.exists() and golden.read_bytes() != text.encode("utf-8"):
        old = json.loads(golden.read_text(encoding="utf-8"))
        diff = sorted(k for k in set(old.get("sections", {})) | set(run.sections)
                      if old.get("sections", {}).get(k) != jsonable(run.sections.get(k)))
        print(f"report differs from {golden.name} in: {', '.join(diff) or 'header'}", file=stderr)
        failed.append("golden")
    for st in failed:
        sec = run.sections.get(st, {})
        why = sec.get("detail") or sec.get("error") or "checks failed"
        print(f"stage failed: {st} ({why})", file=stderr)
    return (1 if failed else 0), report


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="orderlam", description=__doc__.split("\n")[0])
    ap.add_argument("input", help="complex file, or the name of a bundled input: " + ", ".join(BUNDLED))
    ap.add_argument("--stages", help="comma-separated subset of " + ",".join(STAGES))
    ap.add_argument("--radius", type=int, help="Cayley ball radius for leaf patches")
    ap.add_argument("--truncation", type=int, help="radius of the division family")
    ap.add_argument("--out", help="output directory (default: options.out or ./out)")
    ap.add_argument("--seed-report", action="store_true",
                    help="store this report as report.golden.json in the output directory; "
                         "later runs into that directory are compared against it")
    args = ap.parse_args(argv)
    try:
        status, _ = run_pipeline(args.input, args.stages, args.out, args.radius, args.truncation,
                                 args.seed_report)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except StageFailure as exc:
        print(f"stage failed: {exc.section}", file=sys.stderr)
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
