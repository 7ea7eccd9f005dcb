"""tourney command line: gen, analyze, find-dk, verify, experiment.

Exit codes: 0 found or pass, 1 not found or fail, 2 usage or bad input, 3 I/O.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import suites
from .core import FormatError, GeneratorSpec, InvalidParameter, SizeLimitError, parse_tournament, serialize_tournament
from .embed import MODES, PipelineConfig, search_dk, trace_from_dict, trace_to_dict, trace_violations
from .experiment import ExperimentConfig, run_experiment
from .ordering import EXACT_MAX_N, analyze_ordering, exact_min_backward, local_search_ordering
from .triads import as_fraction, count_directed_triangles, measure_triangle_constant

JOBS_ENV = "TOURNEY_JOBS"


class Usage(Exception):
    pass


class IOFailure(Exception):
    pass


def parse_eps(text):
    """Exact rational from "p/q" or a decimal string (0.15 -> 3/20)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc.strerror or exc}")


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc.strerror or exc}")


def _load_tournament(path):
    try:
        return parse_tournament(_read(path))
    except FormatError as exc:
        raise Usage(f"{path}: {exc}")


def _dump(obj):
    return json.dumps(obj, indent=2, default=str) + "\n"


def cmd_gen(args):
    eps = None if args.eps is None else float(args.eps)
    spec = GeneratorSpec(args.family, args.n, args.k, args.m, eps, args.min_length, args.seed)
    T = spec.generate()
    _write(args.out, serialize_tournament(T))
    return 0


def analyze_report(T, eps=None, seed=0):
    order = local_search_ordering(T, seed)
    an = analyze_ordering(T, order)
    tri = count_directed_triangles(T)
    rep = {
        "n": T.n,
        "backward": an.num_backward,
        "exact_backward": exact_min_backward(T)[1] if T.n <= EXACT_MAX_N else None,
        "alpha": str(an.alpha),
        "alpha_float": float(an.alpha),
        "long_backward": an.num_long,
        "long_threshold": an.long_threshold,
        "triangles": tri,
    }
    if eps is not None:
        c = measure_triangle_constant(T, eps, tri)
        rep["eps"] = str(eps)
        rep["c_prime"] = str(c)
        rep["c_prime_float"] = float(c)
    return rep


def cmd_analyze(args):
    T = _load_tournament(args.input)
    _write(args.out, _dump(analyze_report(T, args.eps, args.seed)))
    return 0


def cmd_find_dk(args):
    T = _load_tournament(args.input)
    cfg = PipelineConfig(mode=args.mode, seed=args.seed, time_budget=args.budget)
    report = search_dk(T, args.k, args.eps, cfg)
    if report.found:
        _write(args.out, _dump(trace_to_dict(report.trace)))
        return 0
    diag = {
        "found": False,
        "k": args.k,
        "fail_stage": report.fail_stage,
        "alpha": None if report.alpha is None else str(report.alpha),
        "long_backward": report.num_long,
        "triangle_rich": report.num_rich,
        "attempts": report.attempts,
    }
    _write(args.out, _dump(diag))
    return 1


def cmd_verify(args):
    s = args.suite
    T = None if args.input is None else _load_tournament(args.input)
    if s == "prop21":
        recs = suites.suite_prop21(args.max_n, T, args.input)
    elif s == "lemma22":
        if T is not None and args.eps is None:
            raise Usage("verify --suite lemma22 --input needs --eps")
        recs = suites.suite_lemma22(args.seeds or 20, T, args.eps, args.input)
    elif s == "lemma31":
        recs = suites.suite_lemma31(args.seeds or 3, args.n, args.m, args.min_length, T, args.input)
    elif s == "thm21":
        if T is not None and args.eps is None:
            raise Usage("verify --suite thm21 --input needs --eps")
        recs = suites.suite_thm21(T, args.eps, args.c, args.input)
    else:
        if T is None or args.trace is None:
            raise Usage("verify --suite embedding needs --trace and --input")
        try:
            trace = trace_from_dict(json.loads(_read(args.trace)))
        except (ValueError, KeyError, TypeError) as exc:
            raise Usage(f"{args.trace}: not a trace ({exc})")
        recs = suites.suite_embedding(T, trace, args.trace)
    lines = [json.dumps(r, default=str) for r in recs]
    passed = sum(r["pass"] for r in recs)
    lines.append(json.dumps({"suite": s, "records": len(recs), "passed": passed, "pass": passed == len(recs)}))
    _write(args.out, "\n".join(lines) + "\n")
    return 0 if passed == len(recs) else 1


def cmd_experiment(args):
    try:
        raw = json.loads(_read(args.config))
    except json.JSONDecodeError as exc:
        raise Usage(f"{args.config}: {exc}")
    try:
        cfg = ExperimentConfig.from_dict(raw)
    except TypeError as exc:
        raise Usage(f"{args.config}: {exc}")
    if args.out:
        cfg.output = args.out
    if args.timing:
        cfg.timing = True
    out = cfg.output
    cfg.output = None
    text, _ = run_experiment(cfg, jobs=args.jobs)
    _write(out, text)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="tourney", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated tournament")
    g.add_argument("--family", required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--eps", type=parse_eps)
    g.add_argument("--min-length", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="ordering, backward edges and triangle counts")
    a.add_argument("input")
    a.add_argument("--eps", type=parse_eps)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("find-dk", help="search for D_k and print a trace")
    f.add_argument("input")
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--eps", type=parse_eps, required=True)
    f.add_argument("--mode", choices=MODES, default="adaptive")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--budget", type=float)
    f.add_argument("--out")
    f.set_defaults(func=cmd_find_dk)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True)
    v.add_argument("--input")
    v.add_argument("--trace")
    v.add_argument("--eps", type=parse_eps)
    v.add_argument("--c", type=parse_eps, default=Fraction(1))
    v.add_argument("--max-n", type=int, default=5)
    v.add_argument("--seeds", type=int)
    v.add_argument("--n", type=int, default=2048)
    v.add_argument("--m", type=int, default=60)
    v.add_argument("--min-length", type=int, default=128)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("experiment", help="run a seeded sweep and write CSV")
    e.add_argument("--config", required=True)
    e.add_argument("--out")
    e.add_argument("--jobs", type=int, default=int(os.environ.get(JOBS_ENV, "1") or 1))
    e.add_argument("--timing", action="store_true", help="fill the ms column (breaks byte-identical reruns)")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.command == "verify" and args.suite not in suites.SUITES:
        print(f"tourney: unknown suite {args.suite!r}; expected one of {', '.join(suites.SUITES)}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (Usage, InvalidParameter, SizeLimitError) as exc:
        print(f"tourney: {exc}", file=sys.stderr)
        return 2
    except IOFailure as exc:
        print(f"tourney: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
