"""Command-line front end: constants tables, lemma certification,
corpus-wide inequality verification, sharpness runs, and parameter
sweeps.

Exit codes: 0 pass, 1 contract violation (a certified negative margin
where the theory forbids one, or a failed requested check), 2
usage/domain error, 3 inconclusive or non-convergent.

All artifact writes are atomic (temp file + rename) and deterministic:
identical inputs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from typing import List, Optional

from . import constants, lemma, rearrangement, sharpness, verifier
from .constants import Params
from .corpus import standard_corpus
from .errors import BracketError, ConvergenceError, DomainError
from .quadrature import QuadratureConfig
from .report import DeficitReport, fmt17, reports_to_csv, reports_to_json

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str, filename: str) -> None:
    if args.out:
        _write_atomic(os.path.join(args.out, filename), text)
    else:
        sys.stdout.write(text)


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", default=None, help="artifact directory "
                     "(default: print to stdout)")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--rel-tol", type=float, default=1e-8)
    sub.add_argument("--config", default=None,
                     help="flat key=value file; flags override it")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hypineq",
        description="Sharp constant-dominated inequalities on hyperbolic "
                    "space: verification and sharpness tooling.")
    subs = parser.add_subparsers(dest="command", required=True)
    registry = {}

    sp = subs.add_parser("constants", help="print every applicable constant")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=None)
    _add_common(sp)
    registry["constants"] = sp

    sp = subs.add_parser("lemma", help="certify or refute the kernel comparison")
    sp.add_argument("mode", choices=("verify", "violate"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--t-max", type=float, default=None)
    _add_common(sp)
    registry["lemma"] = sp

    sp = subs.add_parser("verify", help="inequality deficits over a corpus")
    sp.add_argument("--inequality", required=True, choices=(
        "poincare_sobolev", "key_comparison", "gagliardo_nirenberg",
        "morrey_sobolev", "log_sobolev", "mugelli_talenti_sum", "linfty"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--corpus", default=None,
                    help="directory of profile files (default: built-in corpus)")
    sp.add_argument("--constant-scale", type=float, default=1.0,
                    help="test hook: multiply the sharp constant")
    _add_common(sp)
    registry["verify"] = sp

    sp = subs.add_parser("sharpness", help="concentration trend / optimizer run")
    sp.add_argument("--inequality", default="poincare_sobolev",
                    choices=("poincare_sobolev", "key_comparison"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--family", default="truncated-bubble")
    sp.add_argument("--lambdas", type=_float_list,
                    default=[1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-5])
    sp.add_argument("--truncation", type=float, default=1.0)
    sp.add_argument("--gap-max", type=float, default=0.05,
                    help="maximum final gap, as a fraction of the target")
    sp.add_argument("--optimize", action="store_true",
                    help="run the derivative-free minimizer instead of a sweep")
    sp.add_argument("--max-iter", type=int, default=60)
    sp.add_argument("--no-optimize", action="store_true",
                    help="evaluate the ratio at a single --lambda and exit")
    sp.add_argument("--lambda", dest="single_lambda", type=float, default=None)
    _add_common(sp)
    registry["sharpness"] = sp

    sp = subs.add_parser("sweep", help="deficit reports over an (n, p) grid")
    sp.add_argument("--inequality", required=True, choices=(
        "poincare_sobolev", "key_comparison", "gagliardo_nirenberg",
        "morrey_sobolev", "log_sobolev", "mugelli_talenti_sum", "linfty"))
    sp.add_argument("--n-list", type=_int_list, required=True)
    sp.add_argument("--p-list", type=_float_list, required=True)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--corpus", default=None)
    sp.add_argument("--constant-scale", type=float, default=1.0)
    _add_common(sp)
    registry["sweep"] = sp

    return parser, registry


def _apply_config(argv: List[str], registry) -> List[str]:
    """Inject config-file entries as flags ahead of the explicit ones, so
    that explicit flags win.  Unknown keys are rejected."""
    if "--config" not in argv:
        return argv
    path = argv[argv.index("--config") + 1]
    command = argv[0]
    if command not in registry:
        return argv
    known = {}
    for action in registry[command]._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                known[opt[2:]] = action
    injected: List[str] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in known:
                raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
            action = known[key]
            if isinstance(action, (argparse._StoreTrueAction,)):
                if value.lower() in ("1", "true", "yes"):
                    injected.append(f"--{key}")
                elif value.lower() not in ("0", "false", "no"):
                    raise DomainError(f"{path}:{lineno}: bad flag value {value!r}")
            else:
                injected.extend([f"--{key}", value])
    return [command] + injected + argv[1:]


# -- constants ------------------------------------------------------


def cmd_constants(args) -> int:
    n, p, alpha = args.n, args.p, args.alpha
    rows = []

    def attempt(name, fn, needs):
        try:
            rows.append((name, fn(), None))
        except DomainError:
            rows.append((name, None, needs))

    attempt("unit_ball_volume",
            lambda: constants.unit_ball_volume(n), "needs n >= 1")
    attempt("sobolev", lambda: constants.sobolev_constant(Params(n, p)),
            "needs 1 < p < n")
    if alpha is None:
        rows.append(("gagliardo_nirenberg", None, "needs --alpha"))
    else:
        attempt("gagliardo_nirenberg",
                lambda: constants.gn_constant(Params(n, p, alpha)),
                "needs 1 < p < n and admissible alpha")
    attempt("morrey", lambda: constants.morrey_constant(Params(n, p)),
            "needs p > n")
    attempt("linfty", lambda: constants.linfty_constant(Params(n, p)),
            "needs p > n")
    attempt("log_sobolev",
            lambda: constants.log_sobolev_constant(Params(n, p)),
            "needs 1 < p < n")

    populated = [r for r in rows[1:] if r[1] is not None]
    lines = []
    for name, value, needs in rows:
        if value is None:
            lines.append(f"{name:20s} n/a ({needs})")
        else:
            lines.append(f"{name:20s} {fmt17(value)}")
    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    if not populated:
        sys.stderr.write("no constant admits these parameters\n")
        return EXIT_USAGE
    if args.out:
        if args.format == "csv":
            body = "constant,value,note\n" + "".join(
                f"{name},{'' if v is None else fmt17(v)},{'' if note is None else note}\n"
                for name, v, note in rows)
            _write_atomic(os.path.join(args.out, "constants.csv"), body)
        else:
            payload = {name: (None if v is None else fmt17(v)) for name, v, _ in rows}
            _write_atomic(os.path.join(args.out, "constants.json"),
                          json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_PASS


# -- lemma ----------------------------------------------------------


def cmd_lemma(args) -> int:
    n, p = args.n, args.p
    if args.mode == "verify":
        table = lemma.verify_lemma(n, p, t_max=args.t_max or 25.0)
        code = EXIT_PASS if table.passed else EXIT_VIOLATION
    else:
        table = lemma.find_violation(n, p, t_max=args.t_max or 150.0)
        if table.inconclusive:
            code = EXIT_INCONCLUSIVE
        else:
            code = EXIT_PASS
    stem = f"lemma-{args.mode}-n{n}-p{p:g}"
    if args.out:
        _write_atomic(os.path.join(args.out, stem + ".csv"), table.to_csv())
        _write_atomic(os.path.join(args.out, stem + ".json"), table.to_json())
    else:
        sys.stdout.write(table.to_csv() if args.format == "csv"
                         else table.to_json())
    return code


# -- verify / sweep -------------------------------------------------


def _load_corpus(directory: Optional[str]):
    if directory is None:
        return standard_corpus()
    names = sorted(f for f in os.listdir(directory) if f.endswith(".txt"))
    if not names:
        raise DomainError(f"no profile files (*.txt) in {directory!r}")
    return [rearrangement.read_profile(os.path.join(directory, f))
            for f in names]


def _evaluate(inequality, v, n, p, alpha, scale, cfg) -> DeficitReport:
    if inequality == "key_comparison":
        if scale != 1.0:
            raise DomainError(
                "key_comparison is constant-free; --constant-scale not supported")
        return rearrangement.key_comparison(v, n, p, cfg)
    if inequality == "poincare_sobolev":
        return verifier.poincare_sobolev(v, n, p, cfg, constant_scale=scale)
    if inequality == "gagliardo_nirenberg":
        if alpha is None:
            raise DomainError("gagliardo_nirenberg needs --alpha")
        return verifier.gagliardo_nirenberg(v, n, p, alpha, cfg,
                                            constant_scale=scale)
    if inequality == "morrey_sobolev":
        return verifier.morrey_sobolev(v, n, p, cfg, constant_scale=scale)
    if inequality == "log_sobolev":
        return verifier.log_sobolev(v, n, p, cfg, constant_scale=scale)
    if inequality == "mugelli_talenti_sum":
        return verifier.mugelli_talenti_sum(v, n, p, cfg, constant_scale=scale)
    if inequality == "linfty":
        return verifier.linfty_inequality(v, n, p, cfg, constant_scale=scale)
    raise DomainError(f"unknown inequality {inequality!r}")


def _emit_reports(args, reports, stem: str) -> None:
    text = (reports_to_csv(reports) if args.format == "csv"
            else reports_to_json(reports))
    _emit(args, text, f"{stem}.{args.format}")


def cmd_verify(args) -> int:
    corpus = _load_corpus(args.corpus)
    cfg = QuadratureConfig()
    reports = [_evaluate(args.inequality, v, args.n, args.p, args.alpha,
                         args.constant_scale, cfg) for v in corpus]
    _emit_reports(args, reports, f"verify-{args.inequality}")
    ok = all(r.passes(args.rel_tol) for r in reports)
    return EXIT_PASS if ok else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    corpus = _load_corpus(args.corpus)
    cfg = QuadratureConfig()
    reports = []
    for n in args.n_list:
        for p in args.p_list:
            for v in corpus:
                reports.append(_evaluate(args.inequality, v, n, p, args.alpha,
                                         args.constant_scale, cfg))
    _emit_reports(args, reports, f"sweep-{args.inequality}")
    ok = all(r.passes(args.rel_tol) for r in reports)
    return EXIT_PASS if ok else EXIT_VIOLATION


# -- sharpness ------------------------------------------------------


def cmd_sharpness(args) -> int:
    n, p = args.n, args.p
    cfg = QuadratureConfig()
    ratio, target = sharpness.ratio_function(args.inequality, n, p, cfg)

    if args.no_optimize:
        if args.single_lambda is None:
            raise DomainError("--no-optimize needs --lambda")
        value = ratio(sharpness.truncated_bubble(
            n, p, args.single_lambda, args.truncation))
        sys.stdout.write(fmt17(value) + "\n")
        return EXIT_PASS

    if args.optimize:
        res = sharpness.minimize_ratio(
            args.inequality, n, p, family=args.family,
            T0=args.truncation, max_iter=args.max_iter, cfg=cfg)
        if args.out:
            _write_atomic(os.path.join(args.out, "sharpness-trace.csv"),
                          res.trace_csv())
        else:
            sys.stdout.write(res.trace_csv())
        if res.gap < -1e-6 * res.target_constant:
            return EXIT_VIOLATION
        if not res.converged or res.gap > args.gap_max * res.target_constant:
            return EXIT_INCONCLUSIVE
        return EXIT_PASS

    pairs = sharpness.lambda_sweep(args.inequality, n, p, args.lambdas,
                                   T=args.truncation, cfg=cfg)
    lines = ["lambda,T,ratio,gap"]
    for lam, r in pairs:
        lines.append(",".join([fmt17(lam), fmt17(args.truncation),
                               fmt17(r), fmt17(r - target)]))
    _emit(args, "\n".join(lines) + "\n", "sharpness-sweep.csv")
    ratios = [r for _, r in pairs]
    if any(r < target - 1e-6 * target for r in ratios):
        return EXIT_VIOLATION
    monotone = all(b < a for a, b in zip(ratios, ratios[1:]))
    final_ok = ratios[-1] - target <= args.gap_max * target
    return EXIT_PASS if monotone and final_ok else EXIT_INCONCLUSIVE


_DISPATCH = {
    "constants": cmd_constants,
    "lemma": cmd_lemma,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "sharpness": cmd_sharpness,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser, registry = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv, registry)
        args = parser.parse_args(argv)
        return _DISPATCH[args.command](args)
    except (DomainError, BracketError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ConvergenceError as exc:
        sys.stderr.write(f"inconclusive: {exc}\n")
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
