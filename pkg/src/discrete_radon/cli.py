"""Command line harness: ``radon <subcommand>``.

Exit status 0 on success, 1 when a checked assertion fails, 2 for invalid input.
Results go to ``--out`` (or stdout) as CSV or JSON tables.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import arithmetic, expsums, geometry, maximal, operators, tables
from ._validation import check_mapping
from .core import LatticeFunction, MultiIndexSet, PolynomialMapping, build_gamma, moment_gamma
from .kernels import dyadic_decompose_kernel, named_kernel
from .seeding import generator
from .verify import delta_family, parse_suite, run_suite


class UsageError(ValueError):
    pass


class CheckFailed(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_grid(text: str) -> list[int]:
    """``dyadic:<nmax>`` for 1, 2, ..., 2^nmax, or a comma list such as ``1,2,4``."""
    if text.startswith("dyadic:"):
        return operators.dyadic_grid(int(text.split(":", 1)[1]))
    return [int(v) for v in text.split(",") if v]


def parse_floats(text: str) -> list[float]:
    return [float(Fraction(v)) for v in text.split(",") if v]


def parse_fractions(text: str) -> list[Fraction]:
    return [Fraction(v) for v in text.split(",") if v]


def parse_ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def parse_gamma(text: str) -> MultiIndexSet:
    """``moment:<d>`` (k=1, degree d), ``box:<k>,<N0>``, or ``pure:<j>`` (only the monomial y^j)."""
    kind, _, rest = text.partition(":")
    if kind == "moment":
        return moment_gamma(int(rest))
    if kind == "box":
        k, N0 = parse_ints(rest)
        return build_gamma(k, N0)
    if kind == "pure":
        j = int(rest)
        return MultiIndexSet(1, j, ((j,),))
    raise UsageError(f"unknown Gamma spec {text!r}")


def parse_family(text: str, dim: int) -> list[LatticeFunction]:
    """``deltas:<m>`` (point masses whose (y, y^2)-orbits meet) or ``file:<path>`` (JSON list)."""
    kind, _, rest = text.partition(":")
    if kind == "deltas":
        m = int(rest)
        if dim != 2:
            return [LatticeFunction.delta(tuple([-t] + [0] * (dim - 1))) for t in range(m)]
        return delta_family(m)
    if kind == "file":
        with open(rest, encoding="utf-8") as fh:
            obj = json.load(fh)
        items = obj if isinstance(obj, list) else [obj]
        return [LatticeFunction.from_json(o) for o in items]
    raise UsageError(f"unknown family spec {text!r}")


def parse_phase(text: str) -> expsums.WeylPhase:
    """A polynomial in x (or x1..xk) with rational or decimal coefficients, e.g. ``x**2/53 + x/7``."""
    import sympy

    expr = sympy.nsimplify(sympy.sympify(text), rational=True)
    names = sorted(str(s) for s in expr.free_symbols)
    symbols = [sympy.Symbol("x")] if names in (["x"], []) else [sympy.Symbol(f"x{i + 1}") for i in range(max(int(n[1:]) for n in names))]
    poly = sympy.Poly(expr, *symbols)
    coeffs = {}
    for mon, c in poly.terms():
        if any(mon):
            coeffs[tuple(int(v) for v in mon)] = Fraction(int(c.p), int(c.q))
    return expsums.WeylPhase(len(symbols), coeffs)


def _kernel_pieces(kernel: str, k: int, jmax: int):
    return dyadic_decompose_kernel(named_kernel(kernel, k), max(jmax, 1))


def _input_functions(args, dim: int) -> list[LatticeFunction]:
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            obj = json.load(fh)
        items = obj if isinstance(obj, list) else [obj]
        return [LatticeFunction.from_json(o) for o in items]
    return parse_family(args.family, dim)


def _function_rows(index: int, g: LatticeFunction) -> list[dict]:
    return [{"function": index, "point": list(x), "re": complex(v).real, "im": complex(v).imag} for x, v in g.data.items()]


# ---------------------------------------------------------------------------
# subcommands; each returns (rows, columns) or raises CheckFailed


def cmd_apply(args):
    P = check_mapping(args.mapping)
    fs = _input_functions(args, P.d0)
    pieces = _kernel_pieces(args.kernel, P.k, args.N) if args.kind == "dyadic-sum" else None
    kernel = named_kernel(args.kernel, P.k) if args.kind == "truncated" else None
    rows = []
    for i, f in enumerate(fs):
        rows += _function_rows(i, operators.apply(f, P, args.kind, args.N, kernel, pieces).values)
    return rows, ["function", "point", "re", "im"]


def cmd_maximal(args):
    P = check_mapping(args.mapping)
    grid = parse_grid(args.grid)
    pieces = _kernel_pieces(args.kernel, P.k, max(grid)) if args.kind == "dyadic-sum" else None
    kernel = named_kernel(args.kernel, P.k) if args.kind == "truncated" else None
    rows = []
    for i, f in enumerate(_input_functions(args, P.d0)):
        rows += _function_rows(i, operators.maximal(f, P, args.kind, grid, kernel, pieces))
    return rows, ["function", "point", "re", "im"]


def cmd_normratio(args):
    P = check_mapping(args.mapping)
    grid = parse_grid(args.grid)
    fam = _input_functions(args, P.d0)
    pieces = _kernel_pieces(args.kernel, P.k, max(grid)) if args.kind == "dyadic-sum" else None
    kernel = named_kernel(args.kernel, P.k) if args.kind == "truncated" else None
    rows = []
    for p in parse_floats(args.p):
        res = operators.norm_ratio_experiment(fam, P, args.kind, p, grid, kernel, pieces)
        rows.append({"p": p, "family_size": len(fam), "grid_max": max(grid), "ratio": res.ratio, "numerator": res.numerator, "denominator": res.denominator})
    return rows, ["p", "family_size", "grid_max", "ratio", "numerator", "denominator"]


def cmd_weyl(args):
    phase = parse_phase(args.phase)
    body = geometry.parse_body(args.body, phase.k)
    S = expsums.weyl_sum(phase, body)
    count = lattice_count = len(body.lattice_points())
    return [{"re": S.real, "im": S.imag, "abs": abs(S), "points": count, "normalized": abs(S) / lattice_count if lattice_count else 0.0}], [
        "re", "im", "abs", "points", "normalized"]


def cmd_gauss(args):
    if args.max:
        rows = []
        for q in range(1, args.qmax + 1):
            g = expsums.gauss_sum_max_moment(q, args.d)
            bound = q ** (-1 / args.d + 0.05)
            rows.append({"q": q, "d": args.d, "max_abs_G": g, "surrogate": bound, "ok": g <= bound * (1 + 1e-12)})
        return rows, ["q", "d", "max_abs_G", "surrogate", "ok"]
    gamma = parse_gamma(args.gamma)
    G = expsums.gauss_sum(expsums.RationalPoint(tuple(parse_ints(args.a)), args.q), gamma)
    return [{"q": args.q, "a": parse_ints(args.a), "re": G.real, "im": G.imag, "abs": abs(G)}], ["q", "a", "re", "im", "abs"]


def cmd_multiplier(args):
    gamma = parse_gamma(args.gamma)
    xi = parse_fractions(args.xi)
    if args.piece is not None:
        piece = _kernel_pieces(args.kernel, gamma.k, args.piece)[args.piece]
        m = expsums.multiplier_m_piece(xi, piece, gamma)
        label = f"m_{args.piece}"
    else:
        m = expsums.multiplier_m(xi, args.N, gamma)
        label = f"m_N N={args.N}"
    return [{"multiplier": label, "re": m.real, "im": m.imag, "abs": abs(m)}], ["multiplier", "re", "im", "abs"]


def cmd_phi(args):
    gamma = parse_gamma(args.gamma)
    xi = parse_floats(args.xi)
    if args.piece is not None:
        piece = _kernel_pieces(args.kernel, gamma.k, args.piece)[args.piece]
        v, err = expsums.phi_piece(xi, piece, gamma, tol=args.tol, return_error=True)
    else:
        v, err = expsums.phi(xi, args.N, gamma, tol=args.tol, return_error=True)
    return [{"re": v.real, "im": v.imag, "abs": abs(v), "error_estimate": err}], ["re", "im", "abs", "error_estimate"]


def cmd_approx(args):
    gamma = parse_gamma(args.gamma)
    a = expsums.RationalPoint(tuple(parse_ints(args.a)), args.q)
    r = expsums.approx_error(a, parse_fractions(args.xi), args.N, gamma, args.L1, args.L2, args.L3)
    return [{"N": args.N, "q": args.q, "error": r.error, "L2_L3_over_N": r.bound_shape, "abs_G": abs(r.gauss), "abs_phi": abs(r.phi_value)}], [
        "N", "q", "error", "L2_L3_over_N", "abs_G", "abs_phi"]


def cmd_weyl_decay(args):
    Ns = parse_ints(args.Ngrid)
    rows = expsums.weyl_log_decay_experiment((2,), args.alpha, Ns, expsums.minor_arc_quadratic(args.beta))
    for r in rows:
        r["row"] = "minor"
    if args.control:
        c = Fraction(args.control)
        ctrl = expsums.weyl_log_decay_experiment((2,), args.alpha, Ns, expsums.fixed_quadratic(c.numerator, c.denominator))
        for r in ctrl:
            r["row"] = "control"
        rows += ctrl
    cols = ["row", "N", "a", "q", "abs_S", "ratio", "bound", "beta", "beta_alpha", "window_ok", "beta_ok"]
    return rows, cols


def cmd_un(args):
    S = arithmetic.build_denominator_set(args.N, args.rho)
    members = sorted(S.members()) if S.size <= args.list_limit else []
    rows = [{
        "N": S.N, "rho": S.rho, "N0": S.N0, "D": S.D, "Q0": str(S.Q0), "primes_window": S.primes_window,
        "size": S.size, "contains_1_to_N": all(S.contains(q) for q in range(1, S.N + 1)),
        "members": [str(q) for q in members],
    }]
    if args.d:
        U = arithmetic.build_rational_set(members or list(S.members()), args.d)
        rows[0]["rational_count"] = len(U)
    return rows, list(rows[0])


def cmd_partition(args):
    fam = arithmetic.partition_family(args.N, args.k, args.seed)
    ok = arithmetic.verify_covering(fam)
    rows = [{"member": i, "parts": fam.parts(i)} for i in range(len(fam))]
    summary = {"member": "summary", "parts": {"size": len(fam), "bound": arithmetic.partition_bound(args.N, args.k), "covering": ok, "attempts": fam.attempts}}
    if not ok:
        raise CheckFailed("covering verification failed")
    return rows + [summary], ["member", "parts"]


def cmd_odecomp(args):
    dec = arithmetic.decompose_o_property(parse_ints(args.primes), args.D, seed=args.seed)
    rows = []
    all_ok = True
    for i, s in enumerate(dec.sets):
        ok = arithmetic.o_property_check(s.members, args.D).ok
        all_ok &= ok
        rows.append({"set": i, "k": s.k, "exponents": list(s.exponents), "slots": [list(x) for x in s.slots], "members": list(s.members), "o_property": ok})
    target = set(arithmetic._prime_powers_products(dec.V, dec.D))
    covers = dec.union == target
    rows.append({"set": "summary", "k": len(dec.sets), "exponents": dec.bound, "slots": None, "members": None, "o_property": all_ok and covers})
    if not (all_ok and covers):
        raise CheckFailed("decomposition does not cover Pi(V) with O-property sets")
    return rows, ["set", "k", "exponents", "slots", "members", "o_property"]


def cmd_rm(args):
    rng = generator(args.seed)
    rows, violations = [], 0
    for t in range(args.trials):
        n = (1 << args.s) + 1
        a = rng.normal(size=n) + 1j * rng.normal(size=n)
        j0 = int(rng.integers(0, n))
        lhs = float(np.max(np.abs(a)))
        rhs = maximal.rm_rhs(a, j0)
        ok = lhs <= rhs + maximal.RM_SLACK
        violations += not ok
        rows.append({"trial": t, "s": args.s, "j0": j0, "max_abs": lhs, "rhs": rhs, "ok": ok})
    if args.check and violations:
        raise CheckFailed(f"{violations} sequences violate the inequality")
    return rows, ["trial", "s", "j0", "max_abs", "rhs", "ok"]


def cmd_lattice(args):
    body = geometry.parse_body(args.body, args.k)
    lc = geometry.lattice_points(body)
    bc = geometry.boundary_near_count(body, args.s, args.sigma)
    return [{
        "kind": body.kind, "r": lc.r, "count": lc.count, "volume": lc.volume, "davenport_residual": lc.davenport_residual,
        "near_boundary": bc.count, "s": bc.s, "sigma": bc.sigma, "s_r_k_minus_1": bc.shape, "s_r_k_minus_1_plus_2sigma": bc.shape_sigma, "ratio": bc.ratio,
    }], None


def cmd_verify(args):
    ids = parse_suite(args.suite)
    summary = run_suite(ids, args.seed)
    text = json.dumps({"suite": args.suite, **summary}, indent=2, sort_keys=True) + "\n"
    rows = [{"id": r["id"], "name": r["name"], "passed": r["passed"], "detail": r["detail"]} for r in summary["criteria"]]
    out_dir = args.out_dir
    tables.write_atomic(os.path.join(out_dir, "summary.json"), text)
    tables.emit_table(rows, os.path.join(out_dir, "criteria.csv"), "csv", ["id", "name", "passed", "detail"])
    for r in summary["criteria"]:
        print(f"[{'PASS' if r['passed'] else 'FAIL'}] {r['id']:2d} {r['name']}")
    if summary["failed"]:
        raise CheckFailed(f"{summary['failed']} of {len(ids)} criteria failed")
    return None, None


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=tables.FORMATS, default="csv")


def _operator_args(p: argparse.ArgumentParser, default_N: bool = True) -> None:
    p.add_argument("--mapping", default="x, x**2", help='polynomials like "x, x**2" or a JSON mapping')
    p.add_argument("--kind", choices=operators.KINDS, default="average")
    p.add_argument("--kernel", default="hilbert", help="hilbert or riesz-<i>")
    p.add_argument("--input", help="JSON lattice function (or list of them)")
    p.add_argument("--family", default="deltas:1", help="deltas:<m> or file:<path>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radon", description="Discrete Radon transforms, maximal functions and exponential sums.")
    parser.add_argument("--config", help="JSON experiment config (keys: experiment, params, output, seed)")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("apply", help="apply an average or singular operator at one scale")
    _operator_args(p)
    p.add_argument("--N", type=int, default=8)
    _common(p)

    p = sub.add_parser("maximal", help="pointwise sup over a grid of scales")
    _operator_args(p)
    p.add_argument("--grid", default="dyadic:6")
    _common(p)

    p = sub.add_parser("normratio", help="vector-valued maximal norm ratio")
    _operator_args(p)
    p.add_argument("--p", default="2", help="one or more exponents, comma separated")
    p.add_argument("--grid", default="dyadic:6")
    _common(p)

    p = sub.add_parser("weyl", help="Weyl sum over the lattice points of a body")
    p.add_argument("--phase", required=True, help="polynomial phase, e.g. x**2/53")
    p.add_argument("--body", required=True, help="ball:r=..., box:lo=..,hi=.. or polytope:...")
    _common(p)

    p = sub.add_parser("gauss", help="complete Gauss sum G(a/q)")
    p.add_argument("--a", help="numerators, comma separated")
    p.add_argument("--q", type=int)
    p.add_argument("--gamma", default="moment:2")
    p.add_argument("--max", action="store_true", help="tabulate max over A_q for the moment curve")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--qmax", type=int, default=50)
    _common(p)

    p = sub.add_parser("multiplier", help="m_N(xi) or m_j(xi)")
    p.add_argument("--xi", required=True)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--gamma", default="moment:2")
    p.add_argument("--piece", type=int, help="dyadic piece index j (uses --kernel)")
    p.add_argument("--kernel", default="hilbert")
    _common(p)

    p = sub.add_parser("phi", help="Phi_N(xi) or Phi_j(xi)")
    p.add_argument("--xi", required=True)
    p.add_argument("--N", type=float, default=8)
    p.add_argument("--gamma", default="moment:2")
    p.add_argument("--piece", type=int)
    p.add_argument("--kernel", default="hilbert")
    p.add_argument("--tol", type=float, default=1e-8)
    _common(p)

    p = sub.add_parser("approx", help="|m_N - G Phi_N| on a major arc")
    p.add_argument("--a", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--xi", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--gamma", default="moment:1")
    p.add_argument("--L1", type=float)
    p.add_argument("--L2", type=float, default=1.0)
    p.add_argument("--L3", type=float)
    _common(p)

    p = sub.add_parser("weyl-decay", help="|S_N| / N on a minor-arc ladder of quadratic phases")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--Ngrid", default="1024,4096,16384,65536")
    p.add_argument("--control", default="1/3", help="leading coefficient of the control row ('' to skip)")
    _common(p)

    p = sub.add_parser("un", help="Ionescu-Wainger denominator set P_N")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--d", type=int, default=0, help="also count the rational set in dimension d")
    p.add_argument("--list-limit", type=int, default=10000)
    _common(p)

    p = sub.add_parser("partition", help="covering partition family")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    _common(p)

    p = sub.add_parser("odecomp", help="O-property decomposition of Pi(V)")
    p.add_argument("--primes", required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    _common(p)

    p = sub.add_parser("rm", help="randomized Rademacher-Menshov audit")
    p.add_argument("--check", action="store_true", help="exit 1 on any violation")
    p.add_argument("--s", type=int, default=4)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    _common(p)

    p = sub.add_parser("lattice", help="lattice points and points near the boundary")
    p.add_argument("--body", required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.0)
    _common(p)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", default="all", help="all, or criterion ids such as 1,3,5")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out-dir", default="radon-verify")
    return parser


COMMANDS = {
    "apply": cmd_apply, "maximal": cmd_maximal, "normratio": cmd_normratio, "weyl": cmd_weyl, "gauss": cmd_gauss,
    "multiplier": cmd_multiplier, "phi": cmd_phi, "approx": cmd_approx, "weyl-decay": cmd_weyl_decay, "un": cmd_un,
    "partition": cmd_partition, "odecomp": cmd_odecomp, "rm": cmd_rm, "lattice": cmd_lattice, "verify": cmd_verify,
}

CONFIG_KEYS = {"experiment", "params", "output", "seed"}


def config_to_argv(config: dict, parser: argparse.ArgumentParser) -> list[str]:
    """Translate a config object into argv, rejecting unknown keys."""
    if not isinstance(config, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(config) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    name = config.get("experiment")
    if name not in COMMANDS:
        raise UsageError(f"unknown experiment {name!r}")
    sub = parser._subparsers._group_actions[0].choices[name]
    known = {a.dest: a for a in sub._actions if a.dest != "help"}
    params = dict(config.get("params", {}))
    if "seed" in config:
        params["seed"] = config["seed"]
    output = config.get("output", {})
    if not isinstance(params, dict) or not isinstance(output, dict):
        raise UsageError("params and output must be objects")
    bad_out = set(output) - {"out", "format", "out_dir"}
    if bad_out:
        raise UsageError(f"unknown output keys {sorted(bad_out)}")
    params.update(output)
    argv = [name]
    for key, val in params.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise UsageError(f"unknown parameter {key!r} for experiment {name!r}")
        flag = known[dest].option_strings[0]
        if isinstance(val, bool):
            if val:
                argv.append(flag)
            continue
        if isinstance(val, list):
            val = ",".join(str(v) for v in val)
        argv += [flag, str(val)]
    return argv


def run_experiment(config: dict) -> int:
    """Run one experiment described by a config object; returns the exit status."""
    parser = build_parser()
    try:
        argv = config_to_argv(config, parser)
    except UsageError as exc:
        print(f"radon: error: {exc}", file=sys.stderr)
        return 2
    return main(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"radon: error: cannot read config: {exc}", file=sys.stderr)
            return 2
        return run_experiment(config)
    if not args.command:
        parser.print_help()
        return 2
    try:
        rows, columns = COMMANDS[args.command](args)
    except CheckFailed as exc:
        print(f"radon: check failed: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, KeyError, TypeError, ZeroDivisionError, MemoryError, OSError) as exc:
        print(f"radon: error: {exc}", file=sys.stderr)
        return 2
    if rows is not None:
        text = tables.render_table(rows, args.format, columns)
        if args.out:
            tables.write_atomic(args.out, text)
        else:
            sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
