import argparse
import os
import sys

from dotenv import load_dotenv
from sympy import isprime
from tqdm import tqdm

from .defm import census_problems, check_transitivity_exactness, deformations, obstruction_vanishes, verify_deformation_theorem
from .ext2 import (
    baer_sum_2ext,
    butterfly_isomorphism,
    check_exal2_group,
    compose,
    exal2_classify,
    identity_butterfly,
    invert,
    is_invertible,
    isomorphic_2ext,
    negate_2ext,
    split_search,
)
from .extn import automorphisms, check_baer_group, derivations, exal_classify
from .finring import PRESETS, preset, residue_module, ring_as_module, ring_homs, structure_map, zmod
from .freealg import FiniteSetMap, TruncFreeAlgebra, constant_map, cover_sweep, equalizer_noncover_check, fiber_image_witness, kernel_witness_check
from .tfunctors import PRESENTATIONS, build_ls_complex, preset_presentation, t_dimensions
from .utils.configs import config
from .utils.errors import Exal2Error, FixtureError, TooLarge, UsageError
from .utils.read import load_fixtures
from .utils.write import build_report, emit_log, render_report

CENSUS_RINGS = [
    "Z2",
    "Z3",
    "Z4",
    "Z2xZ2",
    "F4",
    "F2[x]/(x^2)",
    "F2[x]/(x^3)",
    "F2[x,y]/(x^2,xy,y^2)",
    "Z8",
    "F2[x]/(x^4)",
    "F2[x,y]/(x^2,y^2)",
]


def apply_environment():
    """Reads a .env file and the EXAL2_* variables into the config dict."""
    load_dotenv()
    config["max_candidates"] = int(os.environ.get("EXAL2_MAX_CANDIDATES", config["max_candidates"]))
    config["log_level"] = os.environ.get("EXAL2_LOG_LEVEL", config["log_level"])
    config["fixtures_dir"] = os.environ.get("EXAL2_FIXTURES", config["fixtures_dir"])
    config["progress"] = str(os.environ.get("EXAL2_PROGRESS", config["progress"])).lower() in ("1", "true", "yes")


def record(verb, subject, check, value, passed=True, witness=None):
    return dict(verb=verb, subject=subject, check=check, value=value, passed=bool(passed), witness=witness)


def _named(bundle, kind, name):
    table = getattr(bundle, kind)
    if name is None:
        return sorted(table.items())
    return [(name, bundle.get(kind, name))]


def _ring(name):
    if name not in PRESETS:
        raise UsageError(f"Unknown ring {name}; choose one of {sorted(PRESETS)}")
    return preset(name)


def _residue(B):
    """The residue field of a local ring, or B itself when B is a field."""
    homs = ring_homs(B, zmod(B.characteristic)) if isprime(B.characteristic) else []
    if len(homs) == 1:
        return residue_module(B, homs[0])
    if B.order > 1 and all(any(B.m(x, y) == B.one for y in range(B.order)) for x in range(B.order) if x != B.zero):
        return ring_as_module(B)
    raise UsageError(f"{B.name} has no unique residue field")


# verbs


def verb_validate2(args, bundle):
    records = []
    if args.fixture is None or args.fixture in bundle.two_extensions:
        for name, xi in _named(bundle, "two_extensions", args.fixture):
            orders = {"M": xi.M.order, "N": xi.N.order, "R": xi.R.order, "B": xi.B.order}
            records.append(record("validate2", name, "2-extension laws", orders))
    if args.fixture is None or args.fixture in bundle.butterflies:
        for name, Q in _named(bundle, "butterflies", args.fixture):
            records.append(record("validate2", name, "butterfly axioms", Q.Q.order))
            records.append(record("validate2", name, "invertible", is_invertible(Q)))
    if not records:
        raise FixtureError(f"Unknown 2-extension or butterfly {args.fixture}")
    return records


def verb_compose(args, bundle):
    Q1, Q2 = bundle.get("butterflies", args.first), bundle.get("butterflies", args.second)
    C = compose(Q1, Q2)
    subject = f"{args.first}*{args.second}"
    records = [record("compose", subject, "middle order", C.Q.order)]
    if is_invertible(Q2):
        back = compose(C, invert(Q2))
        records.append(record("compose", subject, "cancels second factor", True, butterfly_isomorphism(back, Q1) is not None))
    return records


def verb_invert(args, bundle):
    Q = bundle.get("butterflies", args.butterfly)
    Qi = invert(Q)
    left = butterfly_isomorphism(compose(Q, Qi), identity_butterfly(Q.source)) is not None
    right = butterfly_isomorphism(compose(Qi, Q), identity_butterfly(Q.target)) is not None
    return [
        record("invert", args.butterfly, "Q then inverse is identity", left, left),
        record("invert", args.butterfly, "inverse then Q is identity", right, right),
    ]


def verb_sum2(args, bundle):
    xi, eta = bundle.get("two_extensions", args.first), bundle.get("two_extensions", args.second)
    total = baer_sum_2ext(xi, eta)
    cancels = split_search(baer_sum_2ext(xi, negate_2ext(xi))) is not None
    subject = f"{args.first}+{args.second}"
    return [
        record("sum2", subject, "middle order", total.R.order),
        record("sum2", args.first, "sum with negative splits", cancels, cancels),
    ]


def verb_split2(args, bundle):
    records = []
    for name, xi in _named(bundle, "two_extensions", args.fixture):
        S = split_search(xi)
        records.append(record("split2", name, "splits", S is not None, witness=None if S is None else S.Q.order))
    return records


def verb_iso2(args, bundle):
    xi, eta = bundle.get("two_extensions", args.first), bundle.get("two_extensions", args.second)
    return [record("iso2", f"{args.first}~{args.second}", "isomorphic", isomorphic_2ext(xi, eta))]


def verb_exal2(args, bundle):
    B = _ring(args.ring)
    M = _residue(B)
    ground = structure_map(zmod(B.characteristic), B)
    cls2 = exal2_classify(ground, M)
    return [
        record("exal2", B.name, "derivations", len(derivations(ground, M))),
        record("exal2", B.name, "exal order", exal_classify(ground, M).order),
        record("exal2", B.name, "exal2 order", cls2.order),
        record("exal2", B.name, "bound |N|, |R|", list(cls2.bound)),
    ]


def verb_tfun(args, bundle):
    P = bundle.get("presentations", args.presentation) if bundle and args.presentation in bundle.presentations else preset_presentation(args.presentation)
    B = P.ring()
    M = _residue(B)
    t0, t1, t2 = t_dimensions(build_ls_complex(P), M)
    records = [record("tfun", args.presentation, f"dim T{k}", v) for k, v in enumerate((t0, t1, t2))]
    if args.compare:
        ground = structure_map(zmod(P.p), B)
        oracle = {
            "T0 = Der": (P.p**t0, len(derivations(ground, M))),
            "T1 = Exal": (P.p**t1, exal_classify(ground, M).order),
            "T2 = Exal2": (P.p**t2, exal2_classify(ground, M).order),
        }
        for check, (got, want) in oracle.items():
            records.append(record("tfun", args.presentation, check, want, got == want, None if got == want else got))
    return records


def verb_cover_check(args, bundle):
    rows = cover_sweep(args.max_size, args.degree, args.modulus)
    bad = [row for row in rows if not row["surjective"]]
    subject = f"|Q|,|R|,|S|<={args.max_size} A=Z/{args.modulus}"
    return [record("cover-check", subject, "fiber products cover", len(rows), not bad, bad[0] if bad else None)]


def verb_kernel_witness(args, bundle):
    zero_image = kernel_witness_check(modulus=args.modulus)
    f = FiniteSetMap((), ("t",), ())
    g = constant_map(("x", "y"), ("t",))
    lift = fiber_image_witness(f, g, 1, args.modulus)
    A_R = TruncFreeAlgebra(g.source, 1, args.modulus)
    witness = None if lift is None else f"(0, {A_R.format(lift[1])})"
    return [
        record("kernel-witness", "Q={x,y} R={x',y'} S={t}", "nonzero element maps to zero", zero_image, zero_image),
        record("kernel-witness", "Q={} R={x,y} S={t}", "element without preimage", lift is not None, lift is not None, witness),
    ]


def verb_equalizer_check(args, bundle):
    R, S = ("x", "y"), ("x", "y")
    report = equalizer_noncover_check(FiniteSetMap(R, S, (0, 1)), FiniteSetMap(R, S, (1, 0)), args.degree, args.modulus)
    records = []
    for row in report.rows:
        records.append(record("equalizer-check", f"identity vs swap, degree {row['degree']}", "equalizer covered", row["surjective"], witness=row["witness"]))
    noncover = not report.surjective
    records.append(record("equalizer-check", "identity vs swap", "non-cover witnessed", noncover, noncover))
    return records


def _expectation(bundle, name):
    return bundle.expectations.get(name)


def verb_obstruct(args, bundle):
    records = []
    for name, prob in _named(bundle, "problems", args.problem):
        vanishes = obstruction_vanishes(prob)
        expected = _expectation(bundle, name)
        passed = expected is None or vanishes == (not expected)
        records.append(record("obstruct", name, "obstruction vanishes", vanishes, passed))
    return records


def verb_deform(args, bundle):
    records = []
    for name, prob in _named(bundle, "problems", args.problem):
        found = deformations(prob)
        expected = _expectation(bundle, name)
        passed = expected is None or bool(found) == (not expected)
        records.append(record("deform", name, "deformations", len(found), passed))
    return records


def verb_defm_theorem(args, bundle):
    records = []
    for name, prob in _named(bundle, "problems", args.problem):
        rep = verify_deformation_theorem(prob)
        records.append(record("defm-theorem", name, "existence iff vanishing", {"exists": rep["exists"], "vanishes": rep["vanishes"]}, rep["existence_iff_vanishing"]))
        records.append(record("defm-theorem", name, "torsor under Exal", {"deformations": rep["deformations"], "exal": rep["exal"]}, rep["torsor"]))
        records.append(record("defm-theorem", name, "Aut = Der", rep["derivations"], rep["automorphisms"]))
    return records


def verb_transitivity(args, bundle):
    records = []
    for name, frame in _named(bundle, "frames", args.frame):
        for node in check_transitivity_exactness(frame):
            records.append(record("transitivity", name, f"exact at {node['node']}", {"image": node["image"], "kernel": node["kernel"]}, node["ok"], node["witness"]))
    return records


def verb_ring(args, bundle):
    B = _ring(args.name)
    units = [x for x in range(B.order) if any(B.m(x, y) == B.one for y in range(B.order))]
    nilpotents = [x for x in range(B.order) if B.power(x, B.order) == B.zero]
    idempotents = [x for x in range(B.order) if B.m(x, x) == x]
    autos = [h for h in ring_homs(B, B) if len(set(h.table.tolist())) == B.order]
    return [
        record("ring", B.name, "order", B.order),
        record("ring", B.name, "characteristic", B.characteristic),
        record("ring", B.name, "units", len(units)),
        record("ring", B.name, "nilpotents", len(nilpotents)),
        record("ring", B.name, "idempotents", len(idempotents)),
        record("ring", B.name, "automorphisms", len(autos)),
    ]


def census_pairs(max_b, max_m):
    """(ring name, B, module name, M) for residue modules F_p with p ≤ max_m of census rings with |B| ≤ max_b."""
    for name in CENSUS_RINGS:
        B = preset(name)
        if B.order > max_b:
            continue
        for p in (2, 3, 5, 7):
            if p > max_m:
                continue
            for k, h in enumerate(ring_homs(B, zmod(p))):
                yield name, B, f"F{p}#{k}", residue_module(B, h)


def verb_census(args, bundle):
    max_b = args.max_b or config["census_bounds"]["max_b"]
    max_m = args.max_m or config["census_bounds"]["max_m"]
    if max_b * max_m > config["max_ring_order"]:
        raise TooLarge(f"census bounds {max_b}x{max_m} exceed max_ring_order")
    pairs = list(census_pairs(max_b, max_m))
    if config["progress"]:
        pairs = tqdm(pairs, desc="census", file=sys.stderr)
    records = []
    for name, B, mname, M in pairs:
        subject = f"{name} | {mname}"
        ground = structure_map(zmod(B.characteristic), B)
        cls = exal_classify(ground, M)
        failures = check_baer_group(cls)
        records.append(record("census", subject, "exal order", cls.order, not failures, failures[0] if failures else None))
        ders = derivations(ground, M)
        mismatch = [c for c in cls.classes() if len(automorphisms(cls.representative(c))) != len(ders)]
        records.append(record("census", subject, "Aut = Der", len(ders), not mismatch, mismatch[0] if mismatch else None))
        if B.characteristic == cls.p:
            cls2 = exal2_classify(ground, M)
            order2 = cls2.order
            failures2 = check_exal2_group(cls2)
            records.append(record("census", subject, "exal2 order", order2, not failures2, failures2[0] if failures2 else None))
            records.append(record("census", subject, "exal2 bound |N|, |R|", list(cls2.bound)))
            if name in PRESENTATIONS:
                P = preset_presentation(name)
                t = t_dimensions(build_ls_complex(P), _residue(P.ring()))
                agree = cls.p ** t[1] == cls.order and cls.p ** t[2] == order2
                records.append(record("census", subject, "T functors agree", list(t), agree))
    problems = list(census_problems(CENSUS_RINGS, max_b, max_m))
    if config["progress"]:
        problems = tqdm(problems, desc="census problems", file=sys.stderr)
    for prob in problems:
        rep = verify_deformation_theorem(prob)
        records.append(record("census", prob.name, "existence iff vanishing", {"exists": rep["exists"], "vanishes": rep["vanishes"]}, rep["existence_iff_vanishing"]))
        records.append(record("census", prob.name, "torsor under Exal", {"deformations": rep["deformations"], "exal": rep["exal"]}, rep["torsor"]))
        records.append(record("census", prob.name, "Aut = Der", rep["derivations"], rep["automorphisms"]))
    emit_log("Census finished", {"records": len(records), "violations": sum(not r["passed"] for r in records)})
    return records


VERBS = {
    "validate2": verb_validate2,
    "compose": verb_compose,
    "invert": verb_invert,
    "sum2": verb_sum2,
    "split2": verb_split2,
    "iso2": verb_iso2,
    "exal2": verb_exal2,
    "tfun": verb_tfun,
    "cover-check": verb_cover_check,
    "kernel-witness": verb_kernel_witness,
    "equalizer-check": verb_equalizer_check,
    "obstruct": verb_obstruct,
    "deform": verb_deform,
    "defm-theorem": verb_defm_theorem,
    "transitivity": verb_transitivity,
    "ring": verb_ring,
    "census": verb_census,
}

NEEDS_FIXTURES = {"validate2", "compose", "invert", "sum2", "split2", "iso2", "obstruct", "deform", "defm-theorem", "transitivity", "tfun"}


def build_parser():
    parser = argparse.ArgumentParser(prog="exal2", description="Square-zero extensions, 2-extensions, butterflies and deformation checks")
    parser.add_argument("--format", choices=["text", "jsonl"], default="text")
    parser.add_argument("--max-candidates", type=int, default=None)
    parser.add_argument("--fixtures", default=None, help="fixture directory")
    sub = parser.add_subparsers(dest="verb", required=True)
    p = sub.add_parser("validate2")
    p.add_argument("--fixture", default=None)
    for verb in ("compose", "sum2", "iso2"):
        p = sub.add_parser(verb)
        p.add_argument("--first", required=True)
        p.add_argument("--second", required=True)
    p = sub.add_parser("invert")
    p.add_argument("--butterfly", required=True)
    p = sub.add_parser("split2")
    p.add_argument("--fixture", default=None)
    p = sub.add_parser("exal2")
    p.add_argument("--ring", required=True)
    p = sub.add_parser("tfun")
    p.add_argument("--presentation", required=True)
    p.add_argument("--compare", action="store_true")
    p = sub.add_parser("cover-check")
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--modulus", type=int, default=4)
    p = sub.add_parser("kernel-witness")
    p.add_argument("--modulus", type=int, default=0)
    p = sub.add_parser("equalizer-check")
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--modulus", type=int, default=0)
    for verb in ("obstruct", "deform", "defm-theorem"):
        p = sub.add_parser(verb)
        p.add_argument("--problem", default=None)
    p = sub.add_parser("transitivity")
    p.add_argument("--frame", default=None)
    p = sub.add_parser("ring")
    p.add_argument("--name", required=True)
    p = sub.add_parser("census")
    p.add_argument("--max-b", type=int, default=None)
    p.add_argument("--max-m", type=int, default=None)
    return parser


def run(argv=None, stream=None):
    """
    Runs one verb and writes its report.

    Returns:
        int: 0 when every check passed, 1 when a check failed or a violation
        was raised, 2 on usage or fixture errors.
    """
    apply_environment()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.max_candidates is not None:
        config["max_candidates"] = args.max_candidates
    if args.fixtures is not None:
        config["fixtures_dir"] = args.fixtures
    emit_log(f"Start verb {args.verb}", f"Args: {vars(args)}")
    try:
        bundle = load_fixtures(config["fixtures_dir"]) if args.verb in NEEDS_FIXTURES else None
        records = VERBS[args.verb](args, bundle)
    except (UsageError, FixtureError, KeyError) as e:
        emit_log(f"Usage error in {args.verb}", str(e), severity="ERROR")
        print(f"exal2: {e}", file=sys.stderr)
        return 2
    except Exal2Error as e:
        emit_log(f"Check failed in {args.verb}", str(e), severity="ERROR")
        witness = getattr(e, "witness", None)
        records = [record(args.verb, type(e).__name__, getattr(e, "law", None) or getattr(e, "axiom", None) or str(e), None, False, witness)]
    render_report(build_report(records), args.format, stream)
    code = 0 if all(r["passed"] for r in records) else 1
    emit_log(f"End verb {args.verb}", f"exit code {code}")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
