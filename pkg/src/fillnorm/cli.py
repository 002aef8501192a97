"""Command-line interface: one binary, one subcommand per operation.

All outputs are JSON (exact rationals as "p/q" strings); exit 0 on success,
1 on a domain error (structured:: {"error": {"code", "message"}}), 2 on a
malformed invocation.  With a fixed --seed, repeated runs emit byte-identical
reports.  FILLNORM_CAPS may hold a JSON object with default cap values.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import report as rpt
from .complexes import homology, euler_characteristic, parse_complex, parse_word
from .covers import (
    CoverTower,
    build_cover,
    extend_tower,
    mod_p_homology_rep,
    parse_permrep,
)
from .diagnostics import (
    ExperimentConfig,
    boundary_trace_decomposition,
    build_tube,
    certify_loop,
    find_essential_loop,
    superlinear_certificate,
    tower_experiment,
)
from .duality import dualize, fill_codim2, parse_triangulation, verify_pd
from .errors import FillnormError, PreconditionViolated
from .filling import (
    FillProblem,
    SolveCaps,
    check_integral_real_agreement,
    fill,
    primitive,
    rho,
)
from .geometry import estimate_delta, metric_ball


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        payload = args.func(args)
    except FillnormError as exc:
        _emit({"error": exc.to_json()}, args)
        return 1
    _emit(payload, args)
    return 0


def _emit(payload, args):
    text = rpt.dumps(payload)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _caps_from(args):
    caps = SolveCaps()
    profile = os.environ.get("FILLNORM_CAPS")
    if profile:
        for key, value in json.loads(profile).items():
            if hasattr(caps, key):
                setattr(caps, key, int(value))
    for flag, attr in (("dim_cap", "dim_cap"), ("support_cap", "support_cap"),
                       ("node_cap", "node_cap"),
                       ("subset_budget", "subset_budget")):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(caps, attr, value)
    return caps


def _load_complex(path):
    with open(path) as handle:
        return parse_complex(handle.read())


def _load_tri(path):
    with open(path) as handle:
        return parse_triangulation(handle.read())


def _load_rep(path):
    with open(path) as handle:
        return parse_permrep(handle.read())


def _load_chain(arg):
    if os.path.exists(arg):
        with open(arg) as handle:
            return rpt.chain_from_json(json.load(handle))
    return rpt.chain_from_json(json.loads(arg))


def _load_reps(arg):
    if not arg:
        return []
    return [_load_rep(p) for p in arg.split(",") if p]


# --- subcommand handlers ------------------------------------------------------


def cmd_homology(args):
    x = _load_complex(args.complex)
    if args.degree is not None:
        return homology(x, args.degree).to_json()
    return {"schema": rpt.schema("homology"), "complex": x.name,
            "chi": euler_characteristic(x),
            "summaries": [homology(x, i).to_json() for i in range(3)]}


def cmd_fill(args):
    x = _load_complex(args.complex)
    target = _load_chain(args.target)
    problem = FillProblem(x, target, degree=2, ring=args.ring)
    problem.node_cap = _caps_from(args).node_cap
    result = fill(problem)
    out = result.to_json()
    out["schema"] = rpt.schema("fill")
    return out


def cmd_primitive(args):
    x = _load_complex(args.complex)
    eta = _load_chain(args.eta)
    result = primitive(x, eta, args.ring, node_cap=_caps_from(args).node_cap)
    out = result.to_json()
    out["schema"] = rpt.schema("primitive")
    return out


def cmd_rho(args):
    x = _load_complex(args.complex)
    result = rho(x, args.ring, _caps_from(args),
                 allow_sampling=args.sampling)
    out = result.to_json()
    out["schema"] = rpt.schema("rho")
    out["complex"] = x.name
    return out


def cmd_agree(args):
    x = _load_complex(args.complex)
    caps = _caps_from(args)
    if args.samples is not None:
        caps.samples = args.samples
    result = check_integral_real_agreement(x, caps, seed=args.seed)
    return {"schema": rpt.schema("agree"), "complex": x.name,
            "constant_real": rpt.frac_str(result["constant_real"]),
            "constant_integer": rpt.frac_str(result["constant_integer"]),
            "equal": result["equal"],
            "samples_checked": result["samples_checked"],
            "samples_agree": result["samples_agree"]}


def cmd_cover(args):
    x = _load_complex(args.complex)
    if args.rep:
        rep = _load_rep(args.rep)
    else:
        rep = mod_p_homology_rep(x, args.modp or 2)
    cover, _ = build_cover(x, rep)
    if args.emit_complex:
        from .complexes import complex_to_text
        with open(args.emit_complex, "w") as handle:
            handle.write(complex_to_text(cover))
    return {"schema": rpt.schema("cover"), "level": 1, "degree": rep.degree,
            "cells": cover.cell_counts(), "chi": euler_characteristic(cover),
            "b1": homology(cover, 1).betti}


def cmd_tower(args):
    base = _load_complex(args.base)
    caps = _caps_from(args)
    if args.caps:
        with open(args.caps) as handle:
            for key, value in json.load(handle).items():
                if hasattr(caps, key):
                    setattr(caps, key, int(value))
    tower = CoverTower(base)
    if args.reps:
        reps = _load_reps(args.reps)
        if args.levels is not None:
            reps = reps[:args.levels]
        for rep in reps:
            tower = extend_tower(tower, rep)
    else:
        levels = args.levels if args.levels is not None else 1
        for _ in range(levels):
            top = tower.complex_at(tower.height())
            tower = extend_tower(tower, mod_p_homology_rep(
                top, args.modp or 2, max_degree=args.degree_cap))
    config = ExperimentConfig(eps=Fraction(args.eps), caps=caps,
                              loop_cap=args.loop_cap)
    result = tower_experiment(tower, config)
    if args.plot:
        from .plots import render_tower_figures
        render_tower_figures(result, args.plot)
    return result.to_json()


def cmd_dualize(args):
    tri = _load_tri(args.tri)
    dual, phi = dualize(tri)
    return {"schema": rpt.schema("dualize"), "triangulation": tri.name,
            "simplices": tri.cell_counts(),
            "dual_cells": dual.cell_counts(),
            "chi": euler_characteristic(tri),
            "orientation": list(tri.orientation),
            "sign_convention": "plus on dims 0-2, tetrahedron orientation on dim 3"}


def cmd_pdcheck(args):
    tri = _load_tri(args.tri)
    dual, phi = dualize(tri)
    result = verify_pd(tri, dual, phi, random_chains=args.chains,
                       seed=args.seed)
    out = result.to_json()
    out["schema"] = rpt.schema("pdcheck")
    out["triangulation"] = tri.name
    return out


def cmd_codim2(args):
    tri = _load_tri(args.tri)
    z = _load_chain(args.target)
    result, ratio = fill_codim2(tri, z, ring=args.ring,
                                skeleton=args.skeleton, caps=_caps_from(args))
    out = result.to_json()
    out["schema"] = rpt.schema("codim2")
    out["skeleton"] = args.skeleton
    out["ratio"] = rpt.frac_str(ratio)
    return out


def cmd_delta(args):
    x = _load_complex(args.complex)
    if args.center is not None:
        ball = metric_ball(x, args.center, args.radius)
        value = estimate_delta(x, ball.subcomplex)
        counts = ball.subcomplex.cell_counts()
    else:
        value = estimate_delta(x)
        counts = x.cell_counts()
    return {"schema": rpt.schema("delta"), "complex": x.name,
            "center": args.center, "radius": args.radius,
            "cells": counts, "delta": rpt.frac_str(value)}


def cmd_systole(args):
    x = _load_complex(args.complex)
    reps = _load_reps(args.reps)
    cert = find_essential_loop(x, reps, args.cap)
    if cert is None:
        return {"schema": rpt.schema("systole"), "complex": x.name,
                "found": False, "cap": args.cap}
    out = cert.to_json()
    out["schema"] = rpt.schema("systole")
    out["complex"] = x.name
    out["found"] = True
    return out


def _certified_loop(x, args):
    loop = parse_word(args.loop)
    reps = _load_reps(getattr(args, "reps", None))
    hit = certify_loop(x, loop, reps)
    if hit is None:
        raise PreconditionViolated(
            "loop could not be certified essential (H1 class is zero and no "
            "rep detects it)")
    return loop, hit


def cmd_tube(args):
    x = _load_complex(args.complex)
    loop, hit = _certified_loop(x, args)
    tube = build_tube(x, loop)
    out = tube.to_json()
    out["schema"] = rpt.schema("tube")
    out["certificate"] = hit[0]
    return out


def cmd_trace(args):
    x = _load_complex(args.complex)
    loop, _ = _certified_loop(x, args)
    tube = build_tube(x, loop)
    center = args.ball_center or x.letter_endpoints(loop[0])[0]
    radius = args.ball_radius if args.ball_radius is not None else tube.radius
    ball = metric_ball(x, center, radius)
    chain = _load_chain(args.chain)
    decomposition = boundary_trace_decomposition(tube, ball, chain, args.m)
    out = decomposition.to_json()
    out["schema"] = rpt.schema("trace")
    out["path_count"] = len(decomposition.paths)
    out["loop_count"] = len(decomposition.loops)
    if args.delta is not None:
        sup = superlinear_certificate(tube, chain, args.m,
                                      Fraction(args.delta))
        out["superlinear"] = sup.to_json()
    return out


# --- parser -------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fillnorm",
        description="Exact l1 filling norms and expansion diagnostics for "
                    "finite complexes")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, helptext):
        p = sub.add_parser(name, help=helptext)
        p.set_defaults(func=handler)
        p.add_argument("--out", help="write the JSON report to a file")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized sampling (default 0)")
        return p

    def add_caps(p):
        p.add_argument("--dim-cap", dest="dim_cap", type=int)
        p.add_argument("--support-cap", dest="support_cap", type=int)
        p.add_argument("--node-cap", dest="node_cap", type=int)
        p.add_argument("--subset-budget", dest="subset_budget", type=int)

    p = add("homology", cmd_homology, "integral homology of a 2-complex")
    p.add_argument("--complex", required=True)
    p.add_argument("--degree", type=int)

    p = add("fill", cmd_fill, "l1-minimal filling of a boundary 1-chain")
    p.add_argument("--complex", required=True)
    p.add_argument("--target", required=True,
                   help="chain JSON (inline or a file path)")
    p.add_argument("--ring", default="int", choices=["int", "real"])
    add_caps(p)

    p = add("primitive", cmd_primitive,
            "minimal-norm primitive of a 2-coboundary")
    p.add_argument("--complex", required=True)
    p.add_argument("--eta", required=True)
    p.add_argument("--ring", default="int", choices=["int", "real"])
    add_caps(p)

    p = add("rho", cmd_rho, "homological expansion constant")
    p.add_argument("--complex", required=True)
    p.add_argument("--ring", default="both", choices=["int", "real", "both"])
    p.add_argument("--sampling", action="store_true",
                   help="fall back to sampled upper bounds past the dim cap")
    add_caps(p)

    p = add("agree", cmd_agree,
            "integral vs real cochain expansion constants")
    p.add_argument("--complex", required=True)
    p.add_argument("--samples", type=int)
    add_caps(p)

    p = add("cover", cmd_cover, "build a finite cover from a permutation rep")
    p.add_argument("--complex", required=True)
    p.add_argument("--rep", help="permrep file; defaults to the mod-p rep")
    p.add_argument("--modp", type=int, help="prime for the default rep")
    p.add_argument("--emit-complex", dest="emit_complex",
                   help="also write the cover in the complex text format")

    p = add("tower", cmd_tower, "residual-tower nonexpansion experiment")
    p.add_argument("--base", required=True)
    p.add_argument("--reps", help="comma-separated permrep files")
    p.add_argument("--modp", type=int,
                   help="build levels from iterated mod-p homology reps")
    p.add_argument("--levels", type=int)
    p.add_argument("--eps", default="1/10")
    p.add_argument("--caps", help="JSON file with cap overrides")
    p.add_argument("--loop-cap", dest="loop_cap", type=int, default=4)
    p.add_argument("--degree-cap", dest="degree_cap", type=int, default=4096)
    p.add_argument("--plot", help="directory for levels.csv and PNG figures")
    add_caps(p)

    p = add("dualize", cmd_dualize, "dual cellulation of a triangulation")
    p.add_argument("--tri", required=True)

    p = add("pdcheck", cmd_pdcheck, "verify the duality chain map")
    p.add_argument("--tri", required=True)
    p.add_argument("--chains", type=int, default=100,
                   help="random chains for the isometry check")

    p = add("codim2", cmd_codim2, "fill a 1-cycle in a 2-skeleton")
    p.add_argument("--tri", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--ring", default="int", choices=["int", "real"])
    p.add_argument("--skeleton", default="dual", choices=["dual", "primal"])
    add_caps(p)

    p = add("delta", cmd_delta, "4-point hyperbolicity defect")
    p.add_argument("--complex", required=True)
    p.add_argument("--center")
    p.add_argument("--radius", type=int, default=1)

    p = add("systole", cmd_systole, "shortest certified essential loop")
    p.add_argument("--complex", required=True)
    p.add_argument("--reps", help="comma-separated permrep files")
    p.add_argument("--cap", type=int, default=6)

    p = add("tube", cmd_tube, "tube of a certified essential loop")
    p.add_argument("--complex", required=True)
    p.add_argument("--loop", required=True, help="edge word, e.g. 'a b -a'")
    p.add_argument("--reps")

    p = add("trace", cmd_trace, "boundary trace decomposition in a tube")
    p.add_argument("--complex", required=True)
    p.add_argument("--loop", required=True)
    p.add_argument("--reps")
    p.add_argument("--chain", required=True, help="2-chain JSON")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ball-center", dest="ball_center")
    p.add_argument("--ball-radius", dest="ball_radius", type=int)
    p.add_argument("--delta", help="also run the superlinear certificate")

    return parser


if __name__ == "__main__":
    sys.exit(main())
