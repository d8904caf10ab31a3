"""Batch command-line interface.

Every subcommand validates its parameters, dispatches to the library, and
emits a single JSON document (schema versioned, key-sorted, byte-identical
for a fixed config and seed once timestamps are suppressed).  Exit codes:
0 all checks pass, 1 at least one check failed, 2 usage/configuration error
with no partial output on stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from math import gcd

from .dlring import (
    SUBGROUP_IDS,
    RingParams,
    dl_from_flat,
    dl_one,
    mat_identity,
    ring_mul,
    subgroup,
)
from .juggling import build_gr, enumerate_jugg, jugg_stats, shape_tag, symbolic_det_c
from .reptheory import (
    cyc_context,
    cyclotomic_order,
    extension_select,
    jl_compare,
    make_thetas,
    primitive_characters,
    rep_checks,
    rho_chi,
    vr_trace,
)
from .scalars import field_make
from .variety import (
    ActionTriple,
    XhPoint,
    act,
    enumerate_xh,
    fixed_points_zeta,
    is_member,
    lang,
    lang_fiber_table,
    lefschetz_identity_check,
)
from .witt import EQUAL, MIXED, WittParams, WittVector, universal_polys, witt_neg, witt_one, witt_zero

SCHEMA = 1


# ---------------------------------------------------------------------------
# plumbing

def _config_echo(args):
    cfg = {}
    for name in ("p", "f", "n", "h", "k", "k2", "regime", "ext", "m", "r",
                 "seed", "suite", "count", "units", "trials"):
        if hasattr(args, name):
            cfg[name] = getattr(args, name)
    cfg["threads"] = int(os.environ.get("DLLAB_THREADS", "1"))
    return cfg


def _warnings(args):
    out = []
    if hasattr(args, "n") and hasattr(args, "k") and gcd(args.k, args.n) != 1:
        out.append(f"gcd(k, n) = {gcd(args.k, args.n)} != 1: the finite "
                   "constructions are well-defined but the division-algebra "
                   "interpretation needs gcd(k, n) = 1")
    return out


def _emit(args, doc, failed):
    doc["schema"] = SCHEMA
    doc["config"] = _config_echo(args)
    warn = _warnings(args)
    if warn:
        doc["warnings"] = warn
        for w in warn:
            print(f"warning: {w}", file=sys.stderr)
    if not args.no_timestamps:
        doc["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    if args.format == "csv":
        rows = doc.get("rows")
        if rows is None:
            print("error: --format csv needs a tabular report", file=sys.stderr)
            return 2
        cols = sorted({c for r in rows for c in r})
        lines = [",".join(cols)]
        lines += [",".join(json.dumps(r.get(c), sort_keys=True) for c in cols)
                  for r in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if failed else 0


def _params_ctx(args, ext=None):
    params = RingParams(args.p, args.f, args.n, args.h, args.k, args.regime)
    m = ext if ext is not None else getattr(args, "ext", None) or params.n
    ctx = field_make(args.p, args.f * m, args.f)
    return params, ctx, m


def _cyc_json(c):
    return {"M": c.ctx.M, "coeffs": [str(x) for x in c.coeffs]}


def _check(name, ok, expected, actual, witness=None):
    entry = {"name": name, "status": "pass" if ok else "fail",
             "expected": expected, "actual": actual}
    if not ok and witness is not None:
        entry["witness"] = witness
    return entry


# ---------------------------------------------------------------------------
# leaf subcommands

def cmd_params(args):
    params, _, _ = _params_ctx(args, ext=args.n)
    doc = {"q": params.q, "hk": params.hk, "D_deg": params.D_deg,
           "case": params.case_tag, "S_flat": list(params.S_flat)}
    return _emit(args, doc, failed=False)


def cmd_witt_dump(args):
    up = universal_polys(args.r, args.p, args.f)
    doc = {"S": [up.text("S", r) for r in range(args.r + 1)],
           "M": [up.text("M", r) for r in range(args.r + 1)]}
    return _emit(args, doc, failed=False)


def _index_checks(params, ctx):
    orders = {sid: subgroup(sid, params, ctx, params.n).order
              for sid in SUBGROUP_IDS}
    exp_hp = params.q ** (params.n // 2) if params.case_tag == "Case2" else 1
    exp_u = params.q ** (params.n * params.D_deg // 2)
    checks = [
        _check("index_Hplus_Hprime", orders["Hplus"] // orders["Hprime"] == exp_hp,
               exp_hp, orders["Hplus"] // orders["Hprime"]),
        _check("index_U_Hplus", orders["U"] // orders["Hplus"] == exp_u,
               exp_u, orders["U"] // orders["Hplus"]),
    ]
    return orders, checks


def cmd_group_info(args):
    params, ctx, _ = _params_ctx(args, ext=args.ext or args.n)
    orders, checks = _index_checks(params, ctx)
    doc = {"orders": orders, "case": params.case_tag, "D_deg": params.D_deg,
           "S_flat": list(params.S_flat), "checks": checks}
    return _emit(args, doc, failed=any(c["status"] == "fail" for c in checks))


def cmd_jugg_enum(args):
    params = RingParams(args.p, args.f, args.n, args.h, args.k)
    rows = []
    for j in enumerate_jugg(params, args.m):
        sigma, sign, fj, balls = jugg_stats(j)
        rows.append({"entries": list(j.entries), "sigma": list(sigma),
                     "sign": sign, "antiexceedances": fj, "balls": str(balls),
                     "shape": list(shape_tag(j))})
    return _emit(args, {"rows": rows, "count": len(rows)}, failed=False)


def cmd_gr_print(args):
    params = RingParams(args.p, args.f, args.n, args.h, args.k, args.regime)
    poly = build_gr(params, args.m)
    if not args.oracle:
        print(poly.text())
        return 0
    ok = poly == symbolic_det_c(params, args.m)
    doc = {"poly": poly.text(), "oracle_ok": ok}
    return _emit(args, doc, failed=not ok)


def cmd_variety_count(args):
    params, ctx, m = _params_ctx(args)
    pts = enumerate_xh(params, ctx, m)
    return _emit(args, {"count": len(pts)}, failed=False)


def cmd_variety_fixed(args):
    params, ctx, _ = _params_ctx(args, ext=args.n)
    fixed = fixed_points_zeta(params, ctx, params.n)
    expected = params.q ** (params.n * (params.h - 1))
    checks = [_check("fixed_count", len(fixed) == expected, expected, len(fixed))]
    return _emit(args, {"checks": checks},
                 failed=any(c["status"] == "fail" for c in checks))


def _suite_actions(params, ctx, seed, trials):
    checks = []
    pts = enumerate_xh(params, ctx, params.n)
    keys = {pt.element.key() for pt in pts}
    if params.regime == EQUAL:
        gs = [build_gr(params, m) for m in range(1, params.h)]
        bad = [pt.element.key() for pt in pts
               if not all(g.evaluate({s: pt.element.flat(s) for s in params.S_flat},
                                     ctx).is_zero() for g in gs)]
        checks.append(_check("membership_poly_vanishing", not bad, [],
                             bad[:3], witness=bad[:1] or None))
    H = list(subgroup("H", params, ctx, params.n).elements())
    U = list(subgroup("U", params, ctx, params.n).elements())
    rng = random.Random(seed)
    escaped = []
    for _ in range(trials):
        t = ActionTriple(rng.randrange(params.q**params.n - 1),
                         rng.choice(H), rng.choice(U))
        pt = rng.choice(pts)
        img = act(t, pt)
        if img.element.key() not in keys:
            escaped.append({"z": t.z, "h": t.h_elt.key(), "g": t.g_elt.key(),
                            "x": pt.element.key()})
    checks.append(_check("closure_under_actions", not escaped, 0, len(escaped),
                         witness=escaped[:1] or None))
    return checks


def _suite_lang(params, ctx2n, seed, trials):
    checks = []
    table = lang_fiber_table(params, ctx2n, 2 * params.n)
    ident = mat_identity(params, ctx2n)
    rational = {x.key() for x in subgroup("U", params, ctx2n, params.n).elements()}
    over_one = {g.key() for g in table[ident.key()]}
    checks.append(_check("fiber_over_one_is_rational_group",
                         over_one == rational, len(rational), len(over_one)))
    U_n = list(subgroup("U", params, ctx2n, params.n).elements())
    rng = random.Random(seed)
    els = list(ctx2n.elements())
    bad = []
    for _ in range(trials):
        y = dl_from_flat(params, ctx2n,
                         {s: rng.choice(els) for s in params.S_flat})
        fiber = {g.key() for g in table[lang(y).key()]}
        if fiber != {ring_mul(y, d).key() for d in U_n}:
            bad.append(y.key())
    checks.append(_check("random_fibers_are_torsors", not bad, 0, len(bad),
                         witness=bad[:1] or None))
    return checks


def _suite_lefschetz(params, ctx):
    cyc = cyc_context(cyclotomic_order(params, ctx))
    checks = []
    H = list(subgroup("H", params, ctx, params.n).elements())
    for chi in primitive_characters(params, ctx, cyc):
        bad = [g.key() for g in H
               if not lefschetz_identity_check(params, ctx, chi, g)]
        checks.append(_check(f"lefschetz_{chi.name}", not bad, 0, len(bad),
                             witness=bad[:1] or None))
    return checks


def cmd_variety_verify(args):
    if args.suite == "lang":
        params, ctx, _ = _params_ctx(args, ext=2 * args.n)
        checks = _suite_lang(params, ctx, args.seed, args.trials)
    elif args.suite == "actions":
        params, ctx, _ = _params_ctx(args, ext=args.n)
        checks = _suite_actions(params, ctx, args.seed, args.trials)
    else:
        params, ctx, _ = _params_ctx(args, ext=args.n)
        checks = _suite_lefschetz(params, ctx)
    return _emit(args, {"checks": checks},
                 failed=any(c["status"] == "fail" for c in checks))


def cmd_reps_table(args):
    params, ctx, _ = _params_ctx(args, ext=args.n)
    report = rep_checks(params, ctx)
    rows = [dict(e) for e in report["per_chi"]]
    doc = {"rows": rows, "case": report["case"],
           "primitive_count": report["primitive_count"],
           "distinct_ok": report["distinct_ok"],
           "exhaustion": report["exhaustion"], "ok": report["ok"]}
    return _emit(args, doc, failed=not report["ok"])


def cmd_theta_trace(args):
    params, ctx, _ = _params_ctx(args, ext=args.n)
    thetas = make_thetas(params, ctx, count=args.count)
    order = params.q**params.n - 1
    from .reptheory import is_very_regular
    exps = [a for a in range(order) if is_very_regular(params, a)]
    H = list(subgroup("H", params, ctx, params.n).elements())
    rows = []
    failed = False
    for ti, th in enumerate(thetas):
        for a in exps:
            for u in H[:args.units]:
                r = vr_trace(th, params, ctx, a, u)
                rows.append({"theta": ti, "a": a, "u": list(u.key()),
                             "value": _cyc_json(r["value"]), "ok": r["ok"]})
                failed = failed or not r["ok"]
    return _emit(args, {"rows": rows}, failed=failed)


def cmd_jl_compare(args):
    r = jl_compare(args.p, args.f, args.n, args.h, args.k, args.k2,
                   regime=args.regime, theta_count=args.count)
    rows = [{"theta": row["theta"], "a": row["a"], "u": list(row["u"]),
             "trace": _cyc_json(row["trace"]), "equal": row["equal"]}
            for row in r["rows"]]
    doc = {"dims": list(r["dims"]), "theta_count": r["theta_count"],
           "rows": rows, "equal": r["equal"]}
    return _emit(args, doc, failed=not r["equal"])


# ---------------------------------------------------------------------------
# verify all

def _witt_axiom_checks(params, ctx, seed, trials):
    rng = random.Random(seed)
    els = list(ctx.elements())
    wp = params.witt_params
    one, zero = witt_one(wp, ctx), witt_zero(wp, ctx)

    def rand_vec():
        return WittVector(wp, ctx, (rng.choice(els) for _ in range(wp.h)))

    bad = []
    for _ in range(trials):
        a, b, c = rand_vec(), rand_vec(), rand_vec()
        good = ((a + b) + c == a + (b + c) and (a * b) * c == a * (b * c)
                and a * (b + c) == a * b + a * c
                and a + b == b + a and a * b == b * a
                and a + zero == a and a * one == a
                and a + witt_neg(a) == zero)
        if not good:
            bad.append([[x.code for x in v.coords] for v in (a, b, c)])
    return [_check("witt_ring_axioms", not bad, 0, len(bad),
                   witness=bad[:1] or None)]


def cmd_verify_all(args):
    params, ctx, _ = _params_ctx(args, ext=args.ext or args.n)
    progress = open(args.out + ".jsonl", "w") if args.out else None
    checks = []

    def add(entries):
        for e in entries:
            checks.append(e)
            if progress:
                progress.write(json.dumps(e, sort_keys=True) + "\n")
                progress.flush()

    add(_witt_axiom_checks(params, ctx, args.seed, 200))
    up = universal_polys(2, args.p, args.f)
    ok, witness = up.verify_ghost()
    add([_check("witt_ghost_identities", ok, "ghost additive/multiplicative",
                "verified" if ok else "failed", witness=witness)])
    _, idx = _index_checks(params, ctx)
    add(idx)
    if params.regime == EQUAL and params.n <= 3 and params.h <= 3:
        for m in range(1, params.h):
            ok = build_gr(params, m) == symbolic_det_c(params, m)
            add([_check(f"gr_oracle_m{m}", ok, "canonical-form equality",
                        "equal" if ok else "different")])
    add(_suite_actions(params, ctx, args.seed, 100))
    fixed = fixed_points_zeta(params, ctx, params.n)
    expected = params.q ** (params.n * (params.h - 1))
    add([_check("fixed_count", len(fixed) == expected, expected, len(fixed))])
    report = rep_checks(params, ctx)
    add([_check("rep_suite", report["ok"], "all per-chi checks",
                "pass" if report["ok"] else
                [e for e in report["per_chi"] if not e["ok"]])])
    cyc = cyc_context(cyclotomic_order(params, ctx))
    order = params.q**params.n - 1
    tz = cyc.zeta_pow(cyc.M // order)
    norm_bad = []
    for chi in primitive_characters(params, ctx, cyc):
        try:
            extension_select(rho_chi(chi, params, ctx, cyc)[1], chi, tz,
                             params, ctx)
        except ValueError as exc:
            norm_bad.append({"chi": chi.name, "error": str(exc)})
    add([_check("trace_normalization_unique", not norm_bad, 0, len(norm_bad),
                witness=norm_bad[:1] or None)])
    trace_bad = []
    H = list(subgroup("H", params, ctx, params.n).elements())
    from .reptheory import is_very_regular
    exps = [a for a in range(order) if is_very_regular(params, a)][:2]
    for th in make_thetas(params, ctx, count=2):
        for a in exps:
            for u in H[:2]:
                r = vr_trace(th, params, ctx, a, u)
                if not r["ok"]:
                    trace_bad.append({"a": a, "u": list(u.key())})
    add([_check("very_regular_traces", not trace_bad, 0, len(trace_bad),
                witness=trace_bad[:1] or None)])
    if progress:
        progress.close()
    failed = any(c["status"] == "fail" for c in checks)
    return _emit(args, {"checks": checks}, failed=failed)


# ---------------------------------------------------------------------------
# parser

def _add_common(sp, *, pfnhk=True, ext=False, m=False, r=False):
    if pfnhk:
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--f", type=int, required=True)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--h", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--regime", choices=[EQUAL, MIXED], default=EQUAL)
    if ext:
        sp.add_argument("--ext", type=int, default=None)
    if m:
        sp.add_argument("--m", type=int, required=True)
    if r:
        sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--no-timestamps", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="dlfinite")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("params")
    _add_common(sp)
    sp.set_defaults(func=cmd_params)

    witt = sub.add_parser("witt").add_subparsers(dest="sub", required=True)
    sp = witt.add_parser("dump-polys")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--f", type=int, required=True)
    _add_common(sp, pfnhk=False, r=True)
    sp.set_defaults(func=cmd_witt_dump)

    grp = sub.add_parser("group").add_subparsers(dest="sub", required=True)
    sp = grp.add_parser("info")
    _add_common(sp, ext=True)
    sp.set_defaults(func=cmd_group_info)

    jugg = sub.add_parser("jugg").add_subparsers(dest="sub", required=True)
    sp = jugg.add_parser("enum")
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--f", type=int, default=1)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--regime", choices=[EQUAL, MIXED], default=EQUAL)
    _add_common(sp, pfnhk=False, m=True)
    sp.set_defaults(func=cmd_jugg_enum)

    gr = sub.add_parser("gr").add_subparsers(dest="sub", required=True)
    sp = gr.add_parser("print")
    _add_common(sp, m=True)
    sp.add_argument("--oracle", action="store_true")
    sp.set_defaults(func=cmd_gr_print)

    var = sub.add_parser("variety").add_subparsers(dest="sub", required=True)
    sp = var.add_parser("count")
    _add_common(sp, ext=True)
    sp.set_defaults(func=cmd_variety_count)
    sp = var.add_parser("fixed")
    _add_common(sp, ext=True)
    sp.set_defaults(func=cmd_variety_fixed)
    sp = var.add_parser("verify")
    _add_common(sp, ext=True)
    sp.add_argument("--suite", choices=["actions", "lang", "lefschetz"],
                    required=True)
    sp.add_argument("--trials", type=int, default=20)
    sp.set_defaults(func=cmd_variety_verify)

    reps = sub.add_parser("reps").add_subparsers(dest="sub", required=True)
    sp = reps.add_parser("table")
    _add_common(sp)
    sp.set_defaults(func=cmd_reps_table)

    theta = sub.add_parser("theta").add_subparsers(dest="sub", required=True)
    sp = theta.add_parser("trace")
    _add_common(sp)
    sp.add_argument("--count", type=int, default=4)
    sp.add_argument("--units", type=int, default=2)
    sp.set_defaults(func=cmd_theta_trace)

    jl = sub.add_parser("jl").add_subparsers(dest="sub", required=True)
    sp = jl.add_parser("compare")
    _add_common(sp)
    sp.add_argument("--k2", type=int, required=True)
    sp.add_argument("--count", type=int, default=4)
    sp.set_defaults(func=cmd_jl_compare)

    verify = sub.add_parser("verify").add_subparsers(dest="sub", required=True)
    sp = verify.add_parser("all")
    _add_common(sp, ext=True)
    sp.set_defaults(func=cmd_verify_all)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
