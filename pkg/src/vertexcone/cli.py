"""Command-line driver.  Reports go to stdout as JSON, logs to stderr.

Exit codes: 0 result, 1 oracle disagreement, 2 input error, 3 budget
exhausted.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction

from . import binpack, group, knapsack, level, lowerbound, oracle
from .errors import NoCertificateError, ResourceLimitError, VertexConeError
from .fileio import instance_to_dict, load_instance, to_jsonable, weights_from_json
from .numeric import format_rational, parse_rational

log = logging.getLogger("vertexcone")

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(VertexConeError):
    pass


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _fracs(text: str) -> tuple:
    return tuple(parse_rational(x) for x in text.replace(" ", "").split(",") if x)


def _weights(text: str) -> level.Weights:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--weights is not valid JSON: {exc}") from exc
    return level.Weights(weights_from_json(data))


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("VERTEXCONE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise UsageError(f"VERTEXCONE_THREADS must be an integer, got {env!r}") from exc
    return 1


def _vertices(inst, args):
    method = getattr(args, "method", "auto")
    if method == "auto":
        method = "unit" if inst.is_unit_fraction else "incremental"
    return knapsack.hull_vertices(inst, method=method, cap=args.config_cap)


# -- commands ------------------------------------------------------------------

def cmd_vertices(args):
    inst = load_instance(args.instance)
    V = _vertices(inst, args)
    out = {"vertices": list(V), "count": len(V), "method": V.method,
           "unit_fraction_fast_path": V.method == "unit-fraction"}
    check = None
    if args.oracle:
        ref = knapsack.hull_vertices(inst, method="direct", cap=args.config_cap)
        check = {"method": "direct", "agree": list(ref) == list(V)}
    return out, check


def cmd_configs(args):
    inst = load_instance(args.instance)
    upper = inst.multiplicities if args.within_b else None
    n = knapsack.count_configs(inst.sizes, cap=args.config_cap, upper=upper)
    out = {"count": n}
    if args.list:
        out["configurations"] = knapsack.enumerate_configs(inst.sizes, cap=args.config_cap,
                                                           upper=upper)
    return out, None


def cmd_group(args):
    basis = group.DiagonalBasis(_ints(args.a))
    out = {"a": basis.a, "det": basis.det, "cofactors": basis.cofactors,
           "coprime": basis.coprime}
    if args.elements:
        if basis.det > 100_000:
            raise ResourceLimitError(f"{basis.det} elements is too many to list",
                                     estimate=basis.det)
        out["elements"] = [[e, format_rational(group.size_of(e, basis.sizes)),
                            group.fractional_index(e, basis)] for e in basis.elements()]
    check = None
    if args.oracle:
        count = sum(1 for _ in basis.elements())
        check = {"element_count": count, "agree": count == basis.det}
    return out, check


def cmd_generator(args):
    basis = group.DiagonalBasis(_ints(args.a))
    g = group.full_generator(basis)
    size = group.size_of(g, basis.sizes)
    out = {"a": basis.a, "det": basis.det, "cofactors": basis.cofactors, "g": g,
           "size": size, "fractional_size": group.fractional_size(g, basis),
           "residues": [r * x % a for r, x, a in zip(basis.cofactors, g, basis.a)]}
    check = None
    if args.oracle:
        want = Fraction(basis.det - 1, basis.det)
        found = [e for e in basis.elements() if group.fractional_size(e, basis) == want]
        check = {"search": found, "agree": found == [g]}
    return out, check


def cmd_orbit(args):
    basis = group.DiagonalBasis(_ints(args.a))
    rows = []
    for K in range(1, args.K + 1):
        e = group.generator_orbit(basis, K)
        s = group.size_of(e, basis.sizes)
        rows.append({"K": K, "element": e, "size": s, "configuration": s <= 1})
    return {"a": basis.a, "g": group.full_generator(basis), "orbit": rows}, None


def cmd_level(args):
    x = _fracs(args.x)
    out = {"x": x, "K": args.K, "level": level.level(x, args.K),
           "jumps": sorted(level.jumps_at(x, args.K)) if args.K >= 1 else [],
           "ceiling_jumps": sorted(level.jumps_at_ceiling(x, args.K)) if args.K >= 1 else []}
    if args.K_max:
        out["recurrence_failures"] = level.recurrence_failures(x, args.K_max)
        out["ceiling_recurrence_failures"] = level.recurrence_failures(x, args.K_max, "ceiling")
    return out, None


def cmd_find_k(args):
    x = _fracs(args.x)
    K = level.find_shift_multiplicity(x, args.cap)
    out = {"x": x, "K": K, "level": level.level(x, K)}
    check = None
    if args.oracle:
        def lev(k):
            return sum(k * v - (k * v).numerator // (k * v).denominator for v in x)
        scan = next(k for k in range(2, K + 1) if lev(k) <= 1)
        check = {"scan": scan, "agree": scan == K}
    return out, check


def cmd_shift(args):
    inst = load_instance(args.instance)
    V = _vertices(inst, args)
    w = _weights(args.weights)
    gamma = _ints(args.gamma)
    coords = knapsack.simplex_containing(gamma, V)
    K = level.find_shift_multiplicity(coords)
    new = level.shift_weight(w, gamma, V, coords)
    return {"gamma": gamma, "K": K, "simplex": coords.basis, "weights": new,
            "distance_before": w.nonvertex_mass(V),
            "distance_after": new.nonvertex_mass(V)}, None


def cmd_reduce_support(args):
    inst = load_instance(args.instance)
    V = _vertices(inst, args)
    w = _weights(args.weights)
    new = level.support_reduce(w, V)
    return {"weights": new, "nonvertex_support_before": len(w.nonvertex_support(V)),
            "nonvertex_support_after": len(new.nonvertex_support(V)),
            "bound": 2 ** inst.d}, None


def cmd_decompose(args):
    inst = load_instance(args.instance)
    V = _vertices(inst, args)
    r = level.structure_decompose(inst, V)
    out = {"weights": r.weights, "vertex_distance_bound": r.vertex_distance_bound,
           "shift_multiplicities": r.shift_multiplicities, "simplices": r.simplices,
           "vertex_support": r.vertex_support, "vertex_support_bound": r.vertex_support_bound,
           "nonvertex_support": r.nonvertex_support,
           "nonvertex_support_bound": r.nonvertex_support_bound,
           "bounds_hold": r.bounds_hold, "shifts": r.shifts, "merges": r.merges}
    check = None
    if args.oracle:
        exact = binpack.vertex_distance(inst, V, lifted=False, config_cap=args.config_cap,
                                        cell_cap=args.cell_cap).value
        check = {"exact_distance": exact, "agree": exact <= r.vertex_distance_bound}
    return out, check


def cmd_dist(args):
    inst = load_instance(args.instance)
    V = _vertices(inst, args)
    lifted = {"lifted": True, "plain": False}.get(args.formulation)
    r = binpack.vertex_distance(inst, V, lifted=lifted, config_cap=args.config_cap,
                                cell_cap=args.cell_cap)
    out = {"formulation": "lifted" if r.lifted else "plain", "distance": r.value,
           "witness": r.witness}
    check = None
    if args.oracle and not r.lifted:
        ref = oracle.vertex_distance_enum(inst, V)
        check = {"enumeration": ref, "agree": ref == r.value}
    return out, check


def cmd_solve(args):
    inst = load_instance(args.instance)
    p = binpack.solve_ilp(inst, node_cap=args.node_cap)
    check = None
    if args.oracle:
        ref = oracle.min_bins(inst)
        check = {"enumeration": ref, "agree": ref == p.bins}
    return {"bins": p.bins, "packing": p.weights}, check


def cmd_lp(args):
    inst = load_instance(args.instance)
    f = binpack.solve_lp(inst, pricing=args.pricing, node_cap=args.node_cap)
    best, _ = binpack.price(f.duals, inst.sizes, node_cap=args.node_cap)
    out = {"value": f.value, "weights": f.weights, "duals": f.duals,
           "max_dual_value": best, "columns": f.columns}
    check = None
    if args.oracle:
        ref = oracle.lp_all_columns(inst)
        check = {"all_columns": ref, "agree": ref == f.value}
    return out, check


def _gap_dict(r: binpack.GapReport):
    return {"ilp_opt": r.ilp_opt, "lp_opt": r.lp_opt, "gap": r.gap,
            "irup": r.irup, "mirup": r.mirup}


def cmd_gap(args):
    inst = load_instance(args.instance)
    r = binpack.gap_report(inst, node_cap=args.node_cap)
    out = _gap_dict(r)
    out["packing"] = r.packing.weights
    return out, None


def cmd_irup_family(args):
    inst = load_instance(args.instance)
    V = _vertices(inst, args)
    fam = binpack.irup_family(inst, _ints(args.gamma), args.Z, node_cap=args.node_cap,
                              threads=_threads(args), vertices=V)
    members = []
    for m in fam.members:
        row = {"K": m.K, "multiplicities": m.multiplicities, "status": m.status}
        if m.report is not None:
            row.update(_gap_dict(m.report))
        else:
            row["message"] = m.message
        members.append(row)
    out = {"members": members, "distinct": fam.distinct, "complete": fam.complete,
           "irup_holds_for": fam.unexpected}
    if not fam.complete:
        log.warning("some members hit the node budget; no verdict for them")
    return out, None


def _lower_bound_body(inst: lowerbound.SylvesterInstance, K, searched: bool):
    premises = lowerbound.verify_construction(inst) if not searched else {
        "pairwise_coprime": group.DiagonalBasis(inst.a).coprime,
        "long_run": lowerbound.check_long_run(inst.g, inst.a, inst.epsilon)}
    premises["long_run_with_slack"] = lowerbound.check_long_run(
        inst.g, inst.a, inst.epsilon, slack=True)
    uniq, orbit = lowerbound.check_uniqueness(inst)
    premises["configuration"] = group.size_of(inst.g, inst.sizes) <= 1
    premises["uniqueness"] = uniq
    out = {"d": inst.d, "epsilon": inst.epsilon, "a": inst.a, "m": inst.m, "g": inst.g,
           "det": inst.det, "size": group.size_of(inst.g, inst.sizes), "premises": premises,
           "orbit": [{"K": k, "element": e, "size": s} for k, e, s in orbit]}
    try:
        c = lowerbound.dist_certificate(inst, K)
        out["certificate"] = {"K": c.K, "target": c.target, "dist": c.dist,
                              "free_space": c.free_space}
    except NoCertificateError as exc:
        out["certificate"] = None
        out["certificate_refused"] = str(exc)
    out["instance"] = instance_to_dict(inst.instance(c.K if out["certificate"] else 1))
    return out


def cmd_lower_bound(args):
    eps = parse_rational(args.epsilon) if args.epsilon else None
    if args.mode == "search":
        inst = lowerbound.search_min_instance(args.d, eps, args.bound)
        if inst is None:
            return {"d": args.d, "bound": args.bound, "instance": None}, None
        out = _lower_bound_body(inst, args.K, searched=True)
    else:
        if args.d < 3:
            return {"d": args.d, "certificate": None,
                    "certificate_refused": f"certificates need d >= 3, got d={args.d}"}, None
        inst = lowerbound.construct_sylvester_instance(
            args.d, eps, enforce_last_window=not args.relax_last_window)
        out = _lower_bound_body(inst, args.K, searched=False)
        out["jump_schedule"] = {str(k): v for k, v in lowerbound.jump_schedule(inst).items()}
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(out["instance"]) + "\n")
    return out, None


def cmd_search_instance(args):
    eps = parse_rational(args.epsilon) if args.epsilon else None
    inst = lowerbound.search_min_instance(args.d, eps, args.bound)
    if inst is None:
        return {"d": args.d, "bound": args.bound, "instance": None}, None
    return {"d": args.d, "bound": args.bound, "a": inst.a, "g": inst.g, "det": inst.det,
            "epsilon": inst.epsilon,
            "uniqueness": lowerbound.check_uniqueness(inst)[0],
            "instance": instance_to_dict(inst.instance(1, lifted=False))}, None


def cmd_verify(args):
    inst = load_instance(args.instance)
    checks = {}
    V = knapsack.hull_vertices(inst, method="incremental", cap=args.config_cap)
    D = knapsack.hull_vertices(inst, method="direct", cap=args.config_cap)
    checks["vertices"] = list(V) == list(D)
    if inst.is_unit_fraction:
        checks["vertices_unit"] = list(knapsack.hull_vertices(inst, method="unit")) == list(V)
    ilp = binpack.solve_ilp(inst, node_cap=args.node_cap).bins
    checks["ilp"] = ilp == oracle.min_bins(inst)
    lp = binpack.solve_lp(inst, node_cap=args.node_cap).value
    checks["lp"] = lp == oracle.lp_all_columns(inst)
    dist = binpack.vertex_distance(inst, V, lifted=False, config_cap=args.config_cap,
                                   cell_cap=args.cell_cap).value
    checks["dist"] = dist == oracle.vertex_distance_enum(inst, V)
    bound = level.structure_decompose(inst, V).vertex_distance_bound
    checks["decompose_bound"] = bound >= dist
    return {"checks": checks, "ilp_opt": ilp, "lp_opt": lp, "distance": dist,
            "agree": all(checks.values())}, None


# -- driver --------------------------------------------------------------------

def _pretty(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in
                                                         (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_pretty(x, indent) if isinstance(x, dict) else f"{pad}- {json.dumps(x)}"
                         for x in obj)
    return pad + json.dumps(obj)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="human-readable output")
    common.add_argument("--oracle", action="store_true",
                        help="also run the brute-force counterpart and compare")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $VERTEXCONE_THREADS or 1)")
    common.add_argument("--config-cap", type=int, default=knapsack.DEFAULT_CONFIG_CAP)
    common.add_argument("--node-cap", type=int, default=binpack.DEFAULT_NODE_CAP)
    common.add_argument("--cell-cap", type=int, default=binpack.DEFAULT_CELL_CAP)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="vertexcone",
                                description="Exact knapsack-cone and bin packing tools.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, instance=True, method=False):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if instance:
            sp.add_argument("instance", help="instance JSON file")
        if method:
            sp.add_argument("--method", default="auto",
                            choices=["auto", "incremental", "direct", "unit"])
        sp.set_defaults(func=fn)
        return sp

    add("vertices", cmd_vertices, "vertices of the integer hull", method=True)
    sp = add("configs", cmd_configs, "count or list configurations")
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--within-b", action="store_true", help="only p <= b")
    sp = add("group", cmd_group, "the residue group of unit-fraction sizes", instance=False)
    sp.add_argument("a", help="denominators, e.g. 3,4")
    sp.add_argument("--elements", action="store_true")
    sp = add("generator", cmd_generator, "full generator of the group", instance=False)
    sp.add_argument("a")
    sp = add("orbit", cmd_orbit, "multiples [K g] of the full generator", instance=False)
    sp.add_argument("a")
    sp.add_argument("--K", type=int, default=5)
    sp = add("level", cmd_level, "level and jumps of K x", instance=False)
    sp.add_argument("--x", required=True, help="barycentric coordinates, e.g. 1/6,1/2,1/3")
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--K-max", type=int, default=0, help="check the recurrence up to K_max")
    sp = add("find-k", cmd_find_k, "smallest K >= 2 with level <= 1", instance=False)
    sp.add_argument("--x", required=True)
    sp.add_argument("--cap", type=int, default=None)
    sp = add("shift", cmd_shift, "shift weight of one configuration", method=True)
    sp.add_argument("--weights", required=True, help='JSON, e.g. [[[1,1],5]]')
    sp.add_argument("--gamma", required=True)
    sp = add("reduce-support", cmd_reduce_support, "shrink non-vertex support", method=True)
    sp.add_argument("--weights", required=True)
    add("decompose", cmd_decompose, "structure decomposition of b", method=True)
    sp = add("dist", cmd_dist, "exact vertex distance", method=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--lifted", dest="formulation", action="store_const", const="lifted")
    g.add_argument("--plain", dest="formulation", action="store_const", const="plain")
    add("solve", cmd_solve, "minimum number of bins")
    sp = add("lp", cmd_lp, "configuration LP value")
    sp.add_argument("--pricing", default="auto", choices=["auto", "dp", "bb"])
    add("gap", cmd_gap, "integrality gap and round-up properties")
    sp = add("irup-family", cmd_irup_family, "residue instances [(d+k) gamma]", method=True)
    sp.add_argument("--gamma", required=True)
    sp.add_argument("--Z", type=int, required=True)
    sp = add("lower-bound", cmd_lower_bound, "instances with large vertex distance",
             instance=False)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--epsilon", default=None)
    sp.add_argument("--mode", default="construct", choices=["construct", "search"])
    sp.add_argument("--bound", type=int, default=10 ** 5, help="determinant bound for search")
    sp.add_argument("--K", type=int, default=None, help="certificate multiplicity")
    sp.add_argument("--relax-last-window", action="store_true")
    sp.add_argument("--emit", default=None, help="write the instance file here")
    sp = add("search-instance", cmd_search_instance, "smallest long-run instance",
             instance=False)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--epsilon", default=None)
    sp.add_argument("--bound", type=int, default=10 ** 5)
    add("verify", cmd_verify, "run every oracle on an instance")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(message)s",
                        level=logging.INFO if args.verbose else logging.WARNING)
    start = time.perf_counter()
    try:
        result, check = args.func(args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (VertexConeError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    log.info("%s finished in %.3fs", args.command, time.perf_counter() - start)

    report = {"command": args.command,
              "budgets": {"config_cap": args.config_cap, "node_cap": args.node_cap,
                          "cell_cap": args.cell_cap},
              "result": to_jsonable(result)}
    code = EXIT_OK
    if check is not None:
        report["oracle"] = to_jsonable(check)
        if not check.get("agree", True):
            code = EXIT_MISMATCH
    if args.command == "verify" and not result["agree"]:
        code = EXIT_MISMATCH
    if args.pretty:
        print(_pretty(report))
    else:
        print(json.dumps(report))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
