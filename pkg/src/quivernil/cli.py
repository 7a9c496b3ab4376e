"""Command-line interface.

Every verb prints one JSON document (or a plain-text rendering) on stdout.
Exit codes: 0 success, 2 invalid input, 3 budget refusal, 4 undecided search,
1 when a computed table contradicts a known one.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import random
import sys
from pathlib import Path

from . import affine, census, core, cyclic, flags, reps, serialize
from .errors import BudgetExceeded, InternalConsistencyError, QuiverNilError

CONFIG_ENV = "QUIVERNIL_CONFIG"
DEFAULTS = {"budget": str(census.DEFAULT_BUDGET), "cap": str(reps.DEFAULT_EXHAUSTIVE_CAP),
            "field": "Q", "output": "json", "p": "2", "seed": "0"}

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_BUDGET, EXIT_UNDECIDED = 0, 1, 2, 3, 4


class InvalidInput(Exception):
    pass


class Undecided(Exception):
    def __init__(self, payload):
        super().__init__("undecided")
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(message)


# input helpers


def load_config(path: str | None) -> dict:
    cfg = dict(DEFAULTS)
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return cfg
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read config {path}: {exc}") from None
    parser.read_string("[config]\n" + text)
    for key, value in parser["config"].items():
        if key not in DEFAULTS:
            raise InvalidInput(f"unknown config key {key!r}")
        cfg[key] = value.strip().strip('"')
    return cfg


def load_json(arg: str):
    """A file path or an inline JSON string."""
    try:
        # inline JSON can be longer than a legal file name
        if arg.lstrip()[:1] not in ("{", "[", '"') and Path(arg).is_file():
            return json.loads(Path(arg).read_text())
        return json.loads(arg)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot parse {arg!r} as JSON: {exc}") from None


PRESETS = {
    "kronecker": lambda a: core.kronecker(),
    "jordan": lambda a: core.loop_quiver(1),
    "a": lambda a: core.type_a(int(a)),
    "d": lambda a: core.dynkin_d(int(a)),
    "e": lambda a: core.dynkin_e(int(a)),
    "affine_a": lambda a: core.affine_a(a),
    "affine_d": lambda a: core.affine_d(int(a)),
    "affine_e": lambda a: core.affine_e(int(a)),
    "cyclic": lambda a: core.cyclic_quiver(int(a)),
    "loops": lambda a: core.loop_quiver(int(a)),
}


def load_quiver(arg: str) -> core.Quiver:
    name, _, param = arg.partition(":")
    if name.lower() in PRESETS and not Path(arg).is_file():
        return serialize.stringify_quiver(PRESETS[name.lower()](param))
    return serialize.quiver_from_json(load_json(arg))


def _need(args, name):
    v = getattr(args, name, None)
    if v is None:
        raise InvalidInput(f"--{name.replace('_', '-')} is required for {args.verb}")
    return v


def _dim(args, q):
    return serialize.dim_from_json(q, load_json(_need(args, "dim")))


def _flag_type(args, q, name="flagtype"):
    return serialize.flag_type_from_json(q, load_json(_need(args, name)))


def _dims_out(vs):
    return [list(v) for v in vs]


# verbs


def cmd_classify(args, cfg):
    q = load_quiver(_need(args, "quiver"))
    c = core.classify(q)
    return {"kind": c.kind, "label": c.label, "delta": list(c.delta) if c.delta else None,
            "tube_periods": list(c.tube_periods), "cycle_length": c.cycle_length, "notes": c.notes}


def cmd_roots(args, cfg):
    q = load_quiver(_need(args, "quiver"))
    bound = _dim(args, q) if args.dim else None
    roots = core.positive_roots(q, bound)
    return {"vertices": [str(v) for v in q.vertices], "count": len(roots), "roots": _dims_out(roots)}


def cmd_defect(args, cfg):
    q = load_quiver(_need(args, "quiver"))
    d = _dim(args, q)
    delta = core.affine_delta(q)
    return {"defect": core.defect(q, d, delta), "delta": list(delta)}


def cmd_coxeter(args, cfg):
    q = load_quiver(_need(args, "quiver"))
    if args.dim:
        return {"image": list(core.coxeter(q, _dim(args, q), inverse=args.inverse))}
    return {"matrix": core.coxeter_matrix(q, inverse=args.inverse)}


def cmd_orbits(args, cfg):
    n = int(_need(args, "n"))
    d = load_json(_need(args, "dim"))
    ms = cyclic.enumerate_orbits(n, d, aperiodic_only=args.aperiodic)
    return {"count": len(ms), "orbits": [serialize.multipartition_to_json(m) for m in ms]}


def cmd_strata(args, cfg):
    n = int(_need(args, "n"))
    d = load_json(_need(args, "dim"))
    pairs = cyclic.enumerate_cyclic_strata(n, d, args.mu, aperiodic_N=args.aperiodic)
    return {"count": len(pairs), "strata": [{"N": serialize.multipartition_to_json(N), "mu": serialize.mu_to_json(mu)}
                                            for N, mu in pairs]}


def cmd_components(args, cfg):
    q = load_quiver(_need(args, "quiver"))
    comps = affine.components(q, _dim(args, q), args.flavor)
    return [{"kind": c.kind, "label": serialize.to_jsonable(c.label), "stratum_dim": c.stratum_dim,
             "component_dim": c.component_dim, "notes": c.notes} for c in comps]


def cmd_labels(args, cfg):
    q = load_quiver(_need(args, "quiver"))
    labels = affine.lusztig_labels(q, _dim(args, q), args.flavor)
    return [{"kind": s.kind, "data": serialize.to_jsonable(s.data)} for s in labels]


def cmd_resolve(args, cfg):
    m = serialize.multipartition_from_json(load_json(_need(args, "multipartition")))
    r = cyclic.resolution_data(m)
    return {"flag_type": _dims_out(r.flag_type), "coarse": _dims_out(r.coarse),
            "new_socles": _dims_out(r.new_socles), "layer_refinement": _dims_out(r.layer_refinement),
            "top_power": r.top_power}


def cmd_theta(args, cfg):
    ft = serialize.flag_type_from_json(None, load_json(_need(args, "flagtype")))
    if args.count:
        return sum(1 for _ in flags.theta(ft))
    return [serialize.relposition_to_json(z) for z in flags.theta(ft)]


def cmd_smallness(args, cfg):
    q = load_quiver(_need(args, "quiver"))
    return flags.smallness_report(q, _flag_type(args, q), args.nil)


def _point_arg(args):
    return serialize.point_from_json(load_json(_need(args, "point")))


def cmd_lambda_check(args, cfg):
    p = _point_arg(args)
    cap = int(args.cap if args.cap is not None else cfg["cap"])
    rep = reps.lambda_member(p, args.flavor, cap, trust_greedy=not args.strict)
    out = {"member": rep.member, "moment_zero": rep.moment_zero,
           "status": rep.search.status if rep.search else "absent",
           "method": rep.search.method if rep.search else "moment map",
           "flag": serialize.to_jsonable(rep.search.flag) if rep.search and rep.search.flag else None}
    if rep.member is None:
        raise Undecided(out)
    return out


def _duality_pair(p, flavor, cap, strict):
    fl = reps.NilFlavor.parse(flavor)
    a = reps.find_flag(p, fl, cap, trust_greedy=not strict)
    b = reps.find_flag(p.swapped(), fl.dual, cap, trust_greedy=not strict)
    return a, b


def cmd_duality_check(args, cfg):
    cap = int(args.cap if args.cap is not None else cfg["cap"])
    if args.point:
        pts = [_point_arg(args)]
    else:
        q = load_quiver(_need(args, "quiver"))
        d = _dim(args, q)
        F = serialize.field_from_json(args.field or cfg["field"])
        rng = random.Random(int(args.seed if args.seed is not None else cfg["seed"]))
        pts = [reps.DoubledPoint(reps.Rep.random(q, d, F, rng), reps.Rep.random(core.opposite(q), d, F, rng))
               for _ in range(args.samples)]
    mismatches = undecided = agree = 0
    for p in pts:
        a, b = _duality_pair(p, args.flavor, cap, args.strict)
        if not (a.decided and b.decided):
            undecided += 1
        elif a.present == b.present:
            agree += 1
        else:
            mismatches += 1
    out = {"flavor": reps.NilFlavor.parse(args.flavor).value,
           "dual_flavor": reps.NilFlavor.parse(args.flavor).dual.value,
           "samples": len(pts), "agree": agree, "mismatches": mismatches, "undecided": undecided}
    if undecided:
        raise Undecided(out)
    return out


def cmd_census(args, cfg):
    budget = int(args.budget if args.budget is not None else cfg["budget"])
    p = int(args.p if args.p is not None else cfg["p"])
    q = load_quiver(_need(args, "quiver"))
    mode = args.mode
    if mode == "orbits":
        rep = census.orbit_census(q, _dim(args, q), p, budget)
        return {"q_field": rep.q_field, "total_points": rep.total_points, "count": rep.count,
                "orbits": [{"representative": serialize.rep_to_json(o.representative)["mats"], "index": o.index,
                            "size": o.size, "end_dim": o.end_dim} for o in rep.orbits]}
    if mode == "pi-image":
        img = census.image_of_pi(q, _flag_type(args, q), args.flavor, p, budget)
        return {"image_size": int(len(img.image)), "total_points": img.space.size,
                "histogram": {str(k): v for k, v in sorted(img.histogram.items())},
                "image": [int(i) for i in img.image] if args.points else None}
    if mode == "inclusion":
        res = census.inclusion_check(q, _flag_type(args, q), _flag_type(args, q, "flagtype2"), args.flavor, p, budget)
        return serialize.to_jsonable(res)
    if mode == "filtration":
        return serialize.to_jsonable(census.filtration_uniqueness(q, _dim(args, q), p, budget))
    raise InvalidInput(f"unknown census mode {mode!r}")


VERBS = {
    "classify": cmd_classify, "roots": cmd_roots, "defect": cmd_defect, "coxeter": cmd_coxeter,
    "orbits": cmd_orbits, "strata": cmd_strata, "components": cmd_components, "labels": cmd_labels,
    "resolve": cmd_resolve, "theta": cmd_theta, "smallness": cmd_smallness,
    "lambda-check": cmd_lambda_check, "census": cmd_census, "duality-check": cmd_duality_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=["json", "text"])
    common.add_argument("--config")
    parser = _Parser(prog="quivernil", description="Exact computations on quiver nilpotent varieties.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def verb(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    for name in ("classify", "roots", "defect", "coxeter"):
        v = verb(name)
        v.add_argument("--quiver", required=True)
        v.add_argument("--dim")
        if name == "coxeter":
            v.add_argument("--inverse", action="store_true")
    for name in ("orbits", "strata"):
        v = verb(name)
        v.add_argument("--n", required=True, type=int)
        v.add_argument("--dim", required=True)
        v.add_argument("--aperiodic", action="store_true")
        if name == "strata":
            v.add_argument("--mu", default="any", choices=["any", "regular", "regular_semisimple"])
    for name in ("components", "labels"):
        v = verb(name)
        v.add_argument("--quiver", required=True)
        v.add_argument("--dim", required=True)
        v.add_argument("--flavor", default="nil")
    v = verb("resolve")
    v.add_argument("--multipartition", required=True)
    v = verb("theta")
    v.add_argument("--flagtype", required=True)
    v.add_argument("--count", action="store_true")
    v = verb("smallness")
    v.add_argument("--quiver", required=True)
    v.add_argument("--flagtype", required=True)
    v.add_argument("--nil", action="store_true")
    v = verb("lambda-check")
    v.add_argument("--point", required=True)
    v.add_argument("--flavor", default="nil")
    v.add_argument("--cap", type=int)
    v.add_argument("--strict", action="store_true", help="report undecided instead of trusting greedy failure")
    v = verb("duality-check")
    v.add_argument("--point")
    v.add_argument("--quiver")
    v.add_argument("--dim")
    v.add_argument("--field")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int)
    v.add_argument("--flavor", default="nil")
    v.add_argument("--cap", type=int)
    v.add_argument("--strict", action="store_true")
    v = verb("census")
    v.add_argument("mode", choices=["orbits", "pi-image", "inclusion", "filtration"])
    v.add_argument("--quiver", required=True)
    v.add_argument("--dim")
    v.add_argument("--flagtype")
    v.add_argument("--flagtype2")
    v.add_argument("--flavor", default="nil", choices=["nil", "plain"])
    v.add_argument("--p", type=int)
    v.add_argument("--budget", type=int)
    v.add_argument("--points", action="store_true", help="list image point indices")
    return parser


def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in
                                                         (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, sort_keys=True)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {json.dumps(v, sort_keys=True)}" for v in obj) if obj else f"{pad}(none)"
    return f"{pad}{json.dumps(obj)}"


def _emit(payload, fmt, stream):
    data = serialize.to_jsonable(payload)
    if fmt == "text":
        stream.write(render_text(data) + "\n")
    else:
        stream.write(json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n")


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    fmt = "json"
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config)
        fmt = args.output or cfg["output"]
        if fmt not in ("json", "text"):
            raise InvalidInput(f"unknown output format {fmt!r}")
        payload = VERBS[args.verb](args, cfg)
        _emit(payload, fmt, stdout)
        return EXIT_OK
    except Undecided as u:
        _emit(u.payload, fmt, stdout)
        return EXIT_UNDECIDED
    except BudgetExceeded as exc:
        _emit({"error": str(exc), "kind": "budget", "required": exc.required, "budget": exc.budget}, fmt, stdout)
        return EXIT_BUDGET
    except InternalConsistencyError as exc:
        _emit({"error": str(exc), "kind": "internal"}, fmt, stdout)
        return EXIT_INTERNAL
    except KeyError as exc:
        _emit({"error": f"missing key {exc}", "kind": "invalid"}, fmt, stdout)
        return EXIT_INVALID
    except (InvalidInput, QuiverNilError, ValueError, TypeError) as exc:
        _emit({"error": str(exc), "kind": "invalid"}, fmt, stdout)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())
