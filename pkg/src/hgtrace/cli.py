"""Command-line verification driver.

Subcommands reproduce the trace tables, run finite-field identity
suites, check congruences against newform coefficients, verify period
identities, exercise the classical transformation, and compute ad-hoc
values.  Reports serialize to JSON/CSV; exit code 0 means no
theorem-status failure, 1 a mathematical failure, 2 a usage error, 3 an
infrastructure problem.
"""

import argparse
import concurrent.futures
import csv
import datetime
import json
import os
import random
import sys
import time
from fractions import Fraction
from functools import lru_cache

import sympy

TOOLKIT_VERSION = "0.1.0"

EXIT_OK = 0
EXIT_MATH_FAIL = 1
EXIT_USAGE = 2
EXIT_INFRA = 3


class InfrastructureError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def load_targets():
    path = os.path.join(os.path.dirname(__file__), "data", "targets.json")
    with open(path) as fh:
        return json.load(fh)


def evaluate_expression(terms, p):
    """Sum of kronecker(D,p) * p^p_power * a_p(label) over the terms."""
    from .modular_forms import ap
    from .newform_search import kronecker
    total = 0
    for t in terms:
        v = p ** t["p_power"]
        if t["kronecker"] is not None:
            v *= kronecker(t["kronecker"], p)
        if t["label"] is not None:
            v *= ap(t["label"], p)
        total += v
    return total


def _row_primes(row, pmin, pmax):
    r = row.get("restrict")
    for p in sympy.primerange(pmin, pmax + 1):
        if r and p % r["mod"] not in r["residues"]:
            continue
        yield p


def table_job(which, row, p):
    """One (row, prime) trace comparison; returns an item record."""
    from .char_sums import BadPrime, frobenius_trace, p_normalized
    from .ff_core import build_field
    from .hg_datum import whipple_family
    t0 = time.perf_counter()
    c, f = (Fraction(x) for x in row["pair"])
    datum = whipple_family(c, f)["HD" + which[-1]]
    item = {"case": "%s(%s,%s)" % (which, c, f), "params": {"p": p},
            "severity": "theorem"}
    try:
        if datum.M % p == 0:
            raise BadPrime("p divides the datum order")
        if which == "hd3" and (p - 1) % datum.M == 0:
            # the period sum is available over the prime field itself
            lhs = p_normalized(datum, 1, build_field(p)) \
                .to_rational_integer()
        else:
            lhs = frobenius_trace(datum, p)
        rhs = evaluate_expression(row["primary"], p)
        ok = lhs == rhs
        if "alt" in row:
            ok = ok and lhs == evaluate_expression(row["alt"], p)
        item.update(status="pass" if ok else "fail", lhs=lhs, rhs=rhs,
                    discrepancy=lhs - rhs)
    except BadPrime as exc:
        item.update(status="skipped", lhs=None, rhs=None, discrepancy=None,
                    reason=str(exc))
    item["runtime_ms"] = round(1000 * (time.perf_counter() - t0), 3)
    return item


def cmd_tables(args):
    targets = load_targets()
    which = args.which
    rows = targets[which]
    if args.pair:
        c, f = args.pair.split(",")
        want = [str(Fraction(c)), str(Fraction(f))]
        rows = [r for r in rows if r["pair"] == want]
        if not rows:
            raise InfrastructureError("no table row for pair %s" % args.pair)
    jobs = [(which, row, p) for row in rows
            for p in _row_primes(row, args.pmin, args.pmax)]
    items = run_jobs(table_job, jobs, args.parallel)
    return make_report("tables:" + which, items)


# ---------------------------------------------------------------------------
# identity suites
# ---------------------------------------------------------------------------

_IDENTITY_ALIASES = {
    "clausen": "clausen",
    "kummer": "kummer",
    "wellposed": "wellposed_6P5",
    "gauss2p1": "gauss_2P1",
    "k3": "k3_count",
    "vanishing": "hd3_vanishing",
    "whipple-ff": "whipple_ff",
}


def _identity_fields(qmax):
    """Small fields for exhaustive suites: F_9, F_25 and odd prime fields."""
    out = []
    if 9 <= qmax:
        out.append((3, 2))
    for p in sympy.primerange(5, qmax + 1):
        out.append((p, 1))
    if 25 <= qmax:
        out.append((5, 2))
    return out


def cmd_identities(args):
    from .char_sums import BadPrime, ff_identity_check
    from .ff_core import build_field
    from .modular_forms import ap
    internal = _IDENTITY_ALIASES.get(args.which)
    if internal is None:
        raise InfrastructureError("unknown identity %r" % args.which)
    items = []
    for p, s in _identity_fields(args.qmax):
        q = p ** s
        if internal == "k3_count" and s != 1:
            continue    # the brute-force count runs over prime fields
        params = {"seed": args.seed}
        lams = [None]
        if internal == "k3_count":
            lams = [2, 3, -1]
        if internal == "whipple_ff":
            if (q - 1) % 12:
                continue
            params.update(pair=(Fraction(1, 2), Fraction(1, 2)),
                          ap=ap, label="8.6.a.a", scale_pow=0)
        for lam in lams:
            if lam is not None:
                params = dict(params, lam=lam)
            t0 = time.perf_counter()
            try:
                rep = ff_identity_check(internal, build_field(p, s), params)
            except BadPrime as exc:
                items.append({"case": "%s@q=%d" % (args.which, q),
                              "params": {"q": q, "lam": lam},
                              "status": "skipped", "reason": str(exc),
                              "severity": "theorem", "lhs": None,
                              "rhs": None, "discrepancy": None,
                              "runtime_ms": 0.0})
                continue
            ms = round(1000 * (time.perf_counter() - t0), 3)
            n_fail = sum(1 for _, ok in rep.cases if not ok)
            items.append({"case": "%s@q=%d" % (args.which, q),
                          "params": {"q": q, "lam": lam,
                                     "n_cases": rep.n_cases},
                          "status": "pass" if n_fail == 0 else "fail",
                          "severity": "theorem",
                          "lhs": rep.n_cases - n_fail, "rhs": rep.n_cases,
                          "discrepancy": n_fail, "runtime_ms": ms})
    return make_report("identities:" + args.which, items)


# ---------------------------------------------------------------------------
# congruences
# ---------------------------------------------------------------------------

def congruence_job(case_id, p, k):
    from .padic_congruence import (CASES, CostGuard, NotPIntegral,
                                   supercongruence_check)
    t0 = time.perf_counter()
    case = CASES[case_id]
    item = {"case": case_id, "params": {"p": p, "k": k or case.stated_k},
            "severity": case.status}
    try:
        rep = supercongruence_check(case_id, p, k)
        status = {"theorem-verified": "pass",
                  "conjectural-verified@p": "conjectural-verified",
                  "fail": "fail"}[rep.status]
        item.update(status=status, lhs=rep.lhs, rhs=rep.rhs,
                    discrepancy=(rep.lhs - rep.rhs) % p ** rep.k)
    except (CostGuard, NotPIntegral) as exc:
        item.update(status="skipped", lhs=None, rhs=None, discrepancy=None,
                    reason=str(exc))
    item["runtime_ms"] = round(1000 * (time.perf_counter() - t0), 3)
    return item


def cmd_congruences(args):
    from .padic_congruence import CASES, UnknownCase
    if args.case not in CASES:
        raise UnknownCase(args.case)
    case = CASES[args.case]
    jobs = [(args.case, p, args.k)
            for p in sympy.primerange(args.pmin, args.pmax + 1)
            if case.valid_at(p)]
    items = run_jobs(congruence_job, jobs, args.parallel)
    return make_report("congruences:" + args.case, items)


# ---------------------------------------------------------------------------
# periods and the classical transformation
# ---------------------------------------------------------------------------

def cmd_periods(args):
    from .period_integrator import verify_period
    t0 = time.perf_counter()
    rep = verify_period(args.case, precision=args.bits)
    ms = round(1000 * (time.perf_counter() - t0), 3)
    item = {"case": args.case, "params": {"bits": args.bits},
            "status": rep.status,
            "severity": "conjectural" if rep.interpretation_dependent
            else "theorem",
            "lhs": str(rep.series_value), "rhs": str(rep.integral_value),
            "discrepancy": float(rep.rel_error), "runtime_ms": ms}
    return make_report("periods:" + args.case, [item])


def random_terminating_tuple(rng):
    """Generic rational parameters with a single designated terminating
    upper entry."""
    def generic():
        return rng.randint(0, 3) + Fraction(1, rng.choice([3, 5, 7, 11]))
    a, c, d, e, f = (generic() for _ in range(5))
    g = -rng.randint(0, 4)
    return a, c, d, e, f, g


def cmd_whipple_classical(args):
    from .classical_series import (DenominatorPole, GammaPole,
                                   whipple_check)
    rng = random.Random(args.seed)
    items = []
    done = 0
    while done < args.count:
        tup = random_terminating_tuple(rng)
        t0 = time.perf_counter()
        try:
            rep = whipple_check(*tup, mode="terminating_exact"
                                if args.mode == "exact" else "numeric")
        except (DenominatorPole, GammaPole, ZeroDivisionError):
            continue
        ms = round(1000 * (time.perf_counter() - t0), 3)
        done += 1
        items.append({"case": "whipple[%d]" % done,
                      "params": {"tuple": [str(x) for x in tup]},
                      "status": "pass" if rep.passed else "fail",
                      "severity": "theorem",
                      "lhs": None, "rhs": None, "discrepancy": None,
                      "runtime_ms": ms})
    return make_report("whipple-classical:" + args.mode, items)


# ---------------------------------------------------------------------------
# ad-hoc computations
# ---------------------------------------------------------------------------

def cmd_compute(args):
    from .char_sums import euler_factor_prim, h_value, p_normalized
    from .ff_core import build_field
    from .hg_datum import e_profile, parse_datum
    from .modular_forms import ap
    what = args.what
    t0 = time.perf_counter()
    if what == "P":
        datum = parse_datum(args.datum)
        val = p_normalized(datum, Fraction(args.lam),
                           build_field(args.p, args.s))
        out = str(val.to_rational()) if val.is_rational() else repr(val)
    elif what == "H":
        datum = parse_datum(args.datum)
        out = str(h_value(datum, Fraction(args.lam),
                          build_field(args.p, args.s)))
    elif what == "euler":
        datum = parse_datum(args.datum)
        one_dim = [int(x) for x in args.onedim.split(",")] \
            if args.onedim else []
        ef = euler_factor_prim(datum, args.p, one_dim=one_dim)
        out = str(list(ef.coeffs))
    elif what == "ap":
        out = str(ap(args.label, args.p))
    elif what == "e-profile":
        prof = e_profile(parse_datum(args.datum))
        out = json.dumps({"breakpoints": [str(x) for x in prof.breakpoints],
                          "values": list(prof.values),
                          "weight": str(prof.weight),
                          "twist": str(prof.twist)})
    else:
        raise InfrastructureError("unknown compute target %r" % what)
    ms = round(1000 * (time.perf_counter() - t0), 3)
    item = {"case": "compute:" + what, "params": vars_without(args),
            "status": "pass", "severity": "theorem", "lhs": out,
            "rhs": None, "discrepancy": None, "runtime_ms": ms}
    return make_report("compute:" + what, [item])


def vars_without(args):
    skip = {"func", "json", "csv", "parallel", "seed", "offline"}
    return {k: v for k, v in vars(args).items()
            if k not in skip and not callable(v)}


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------

def run_jobs(fn, jobs, parallel):
    if parallel and parallel > 1:
        with concurrent.futures.ProcessPoolExecutor(parallel) as pool:
            return list(pool.map(_job_runner, [(fn, j) for j in jobs]))
    return [fn(*j) for j in jobs]


def _job_runner(packed):
    fn, job = packed
    return fn(*job)


def make_report(suite, items):
    return {"suite": suite, "items": items,
            "toolkit_version": TOOLKIT_VERSION,
            "timestamp": datetime.datetime.now(datetime.timezone.utc)
            .isoformat()}


def exit_code_for(report):
    for item in report["items"]:
        if item["status"] == "fail" and item.get("severity") == "theorem":
            return EXIT_MATH_FAIL
    return EXIT_OK


def print_report(report, out=None):
    if out is None:
        out = sys.stdout
    print("suite: %s" % report["suite"], file=out)
    counts = {}
    for item in report["items"]:
        counts[item["status"]] = counts.get(item["status"], 0) + 1
    for item in report["items"]:
        mark = {"pass": "ok  ", "conjectural-verified": "ok? ",
                "inconclusive": "?   ", "skipped": "--  "}.get(
            item["status"], "FAIL")
        line = "%s %-28s %s" % (mark, item["case"],
                                json.dumps(item["params"], default=str))
        if item["status"] == "fail":
            line += "  lhs=%s rhs=%s" % (item["lhs"], item["rhs"])
        print(line, file=out)
    print("summary: " + ", ".join("%s=%d" % kv
                                  for kv in sorted(counts.items())),
          file=out)


def write_outputs(report, args):
    if args.json:
        # all wall-clock data is folded into the timestamp field so that
        # identical invocations are byte-identical minus that one field
        out = dict(report)
        out["items"] = []
        runtimes = []
        for it in report["items"]:
            it = dict(it)
            runtimes.append(it.pop("runtime_ms", None))
            out["items"].append(it)
        out["timestamp"] = {"when": report["timestamp"],
                            "item_runtimes_ms": runtimes}
        with open(args.json, "w") as fh:
            json.dump(out, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["case", "params", "status", "severity", "lhs",
                        "rhs", "discrepancy", "runtime_ms"])
            for it in report["items"]:
                w.writerow([it["case"], json.dumps(it["params"],
                                                   sort_keys=True,
                                                   default=str),
                            it["status"], it.get("severity", ""),
                            it["lhs"], it["rhs"], it["discrepancy"],
                            it["runtime_ms"]])


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def add_global_flags(p):
    p.add_argument("--offline", action="store_true",
                   help="forbid all network use")
    p.add_argument("--json", metavar="PATH", help="write JSON report")
    p.add_argument("--csv", metavar="PATH", help="write CSV report")
    p.add_argument("--parallel", type=int, default=0, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="S")


def build_parser():
    ap_ = argparse.ArgumentParser(
        prog="hgtrace",
        description="verification toolkit for hypergeometric trace "
                    "identities, congruences, and period integrals")
    sub = ap_.add_subparsers(dest="command", required=True)

    ver = sub.add_parser("verify", help="run a verification suite")
    vsub = ver.add_subparsers(dest="suite", required=True)

    t = vsub.add_parser("tables")
    t.add_argument("--which", required=True, choices=["hd1", "hd2", "hd3"])
    t.add_argument("--pair", help="restrict to one pair, e.g. 1/2,1/3")
    t.add_argument("--pmin", type=int, default=7)
    t.add_argument("--pmax", type=int, default=97)
    add_global_flags(t)
    t.set_defaults(func=cmd_tables)

    i = vsub.add_parser("identities")
    i.add_argument("--which", required=True,
                   choices=sorted(_IDENTITY_ALIASES))
    i.add_argument("--qmax", type=int, default=25)
    add_global_flags(i)
    i.set_defaults(func=cmd_identities)

    c = vsub.add_parser("congruences")
    c.add_argument("--case", required=True)
    c.add_argument("--pmin", type=int, default=5)
    c.add_argument("--pmax", type=int, default=37)
    c.add_argument("--k", type=int, default=None,
                   help="modulus exponent (default: the stated one)")
    add_global_flags(c)
    c.set_defaults(func=cmd_congruences)

    pe = vsub.add_parser("periods")
    pe.add_argument("--case", required=True)
    pe.add_argument("--bits", type=int, default=192)
    add_global_flags(pe)
    pe.set_defaults(func=cmd_periods)

    w = vsub.add_parser("whipple-classical")
    w.add_argument("--mode", choices=["exact", "numeric"], default="exact")
    w.add_argument("--count", type=int, default=25)
    add_global_flags(w)
    w.set_defaults(func=cmd_whipple_classical)

    co = sub.add_parser("compute", help="compute a single value")
    co.add_argument("what",
                    choices=["P", "H", "euler", "ap", "e-profile"])
    co.add_argument("--datum", help="e.g. HD3(1/2,1/2)")
    co.add_argument("--lam", default="1")
    co.add_argument("--p", type=int)
    co.add_argument("--s", type=int, default=1)
    co.add_argument("--label")
    co.add_argument("--onedim", help="comma-separated known eigenvalues")
    add_global_flags(co)
    co.set_defaults(func=cmd_compute)

    return ap_


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "offline", False):
        os.environ["HGTRACE_OFFLINE"] = "1"
    from .modular_forms import CoefficientUnavailable, UnknownLabel
    try:
        report = args.func(args)
    except InfrastructureError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INFRA
    except (OSError, KeyError, CoefficientUnavailable, UnknownLabel) as exc:
        print("error: %r" % exc, file=sys.stderr)
        return EXIT_INFRA
    print_report(report)
    write_outputs(report, args)
    return exit_code_for(report)


if __name__ == "__main__":
    sys.exit(main())
