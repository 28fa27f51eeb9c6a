"""Command-line front end.

Exit codes: 0 the property holds, 1 a violation or counterexample was found
(certificates in the report), 2 input error, 3 undecided (no certificate
and no counterexample).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import exact as ex
from .cones import (
    APPROX,
    EXACT,
    ConeError,
    DimensionError,
    PolyhedralH,
    PolyhedralV,
    cone_from_json,
    cone_to_json,
    membership,
    vector_from_json,
    vector_to_json,
    verdict_to_json,
)
from .gallery import CASES, GalleryError, SearchConfig, canonical, golden, run_gallery, search_counterexamples
from .operators import (
    NOT_POSITIVE,
    POSITIVE,
    find_violation,
    identity_map,
    is_positive,
    jordan_profile,
    jordan_to_json,
    map_from_json,
    map_to_json,
    positivity_to_json,
    spectrum,
    spectrum_to_json,
    violation_to_json,
)
from .suites import SUITES, run_suite

HOLDS, VIOLATION, INPUT_ERROR, UNDECIDED = 0, 1, 2, 3


class InputError(Exception):
    """Bad user input; ``kind`` names the diagnostic."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def _load_json(path: str | None, what: str):
    if path is None:
        raise InputError("missing-input", f"--{what} is required for this verb")
    p = Path(path)
    if not p.is_file():
        raise InputError("file-not-found", f"{what} file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError("malformed-json", f"{what} file is not valid JSON ({path}: {exc})") from None


def _wrap(what: str, fn, *args):
    try:
        return fn(*args)
    except InputError:
        raise
    except ex.NotRationalError as exc:
        raise InputError("invalid-rational", f"{what}: {exc}") from None
    except DimensionError as exc:
        raise InputError("dimension-mismatch", f"{what}: {exc}") from None
    except (ConeError, ValueError, KeyError, TypeError, IndexError, ZeroDivisionError) as exc:
        raise InputError("invalid-object", f"{what}: {exc!s}") from None


def load_cone(path):
    return _wrap("cone", cone_from_json, _load_json(path, "cone"))


def load_map(path, mode, what="map"):
    if path == "id":
        return None
    return _wrap(what, map_from_json, _load_json(path, what), mode)


def load_vector(path, mode):
    doc = _load_json(path, "vector")
    if isinstance(doc, dict):
        doc = doc.get("vector")
    if not isinstance(doc, list):
        raise InputError("invalid-object", "vector file must hold a list or {\"vector\": [...]}")
    return _wrap("vector", vector_from_json, doc, mode)


def _check_dims(cone, n, what):
    if n != cone.ambient_dim:
        raise InputError("dimension-mismatch", f"{what} has dimension {n}, cone lives in R^{cone.ambient_dim}")


def _seed(args, required: bool) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CONELAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError("invalid-seed", f"CONELAB_SEED must be an integer, got {env!r}") from None
    if required:
        raise InputError("missing-seed", "this verb is randomized: pass --seed or set CONELAB_SEED")
    return 0


def _randomized(cone) -> bool:
    return not isinstance(cone, (PolyhedralV, PolyhedralH))


# ---- verbs


def cmd_membership(args):
    cone = load_cone(args.cone)
    v = load_vector(args.vector, args.mode)
    _check_dims(cone, len(v), "vector")
    verdict = membership(cone, v, args.mode, args.tol)
    result = {"cone": cone_to_json(cone), "vector": vector_to_json(v), "verdict": verdict_to_json(verdict)}
    return (HOLDS if verdict.inside else VIOLATION), result, f"inside={verdict.inside}"


def cmd_positivity(args):
    cone = load_cone(args.cone)
    T = load_map(args.map, args.mode)
    if T is None:
        T = identity_map(cone.ambient_dim)
    _check_dims(cone, T.n, "map")
    seed = _seed(args, _randomized(cone))
    verdict = is_positive(T, cone, seed=seed, mu_max=args.mu_max, mode=args.mode, tol=args.tol)
    result = {"cone": cone_to_json(cone), "map": map_to_json(T), "seed": seed, "positivity": positivity_to_json(verdict)}
    return _status_code(verdict.status), result, f"status={verdict.status} method={verdict.method}"


def _status_code(status):
    return {POSITIVE: HOLDS, NOT_POSITIVE: VIOLATION}.get(status, UNDECIDED)


def cmd_order(args):
    cone = load_cone(args.cone)
    n = cone.ambient_dim
    S = load_map(args.lhs, args.mode, "lhs") or identity_map(n)
    T = load_map(args.rhs, args.mode, "rhs") or identity_map(n)
    _check_dims(cone, S.n, "lhs")
    _check_dims(cone, T.n, "rhs")
    seed = _seed(args, _randomized(cone))
    verdict = is_positive(T - S, cone, seed=seed, mu_max=args.mu_max, mode=args.mode, tol=args.tol)
    result = {
        "cone": cone_to_json(cone),
        "lhs": "id" if args.lhs == "id" else map_to_json(S),
        "rhs": "id" if args.rhs == "id" else map_to_json(T),
        "seed": seed,
        "difference_positivity": positivity_to_json(verdict),
        "witness": None,
    }
    if verdict.status != POSITIVE:
        violation = find_violation(S, T, cone, seed=seed, tol=args.tol)
        if violation is not None:
            result["witness"] = violation_to_json(violation)
            return VIOLATION, result, f"lhs <= rhs fails; witness {result['witness']['v']}"
    return _status_code(verdict.status), result, f"lhs <= rhs: {verdict.status}"


def _lam(args):
    return _wrap("lambda", ex.parse_rational, args.lam)


def cmd_jordan(args):
    T = load_map(args.map, EXACT)
    if T is None:
        raise InputError("invalid-object", "jordan needs a map file")
    lam = _lam(args)
    prof = jordan_profile(T, lam)
    return HOLDS, {"map": map_to_json(T), "jordan": jordan_to_json(prof)}, f"blocks={list(prof.block_sizes)}"


def cmd_spectrum(args):
    T = load_map(args.map, args.mode)
    if T is None:
        raise InputError("invalid-object", "spectrum needs a map file")
    lam = _lam(args) if T.exact else None
    rep = spectrum(T, lam)
    return HOLDS, {"map": map_to_json(T), "spectrum": spectrum_to_json(rep)}, f"{len(rep.eigenvalues)} eigenvalues"


def cmd_gallery(args):
    try:
        record = run_gallery(args.case)
    except GalleryError as exc:
        return VIOLATION, {"case": args.case, "error": str(exc)}, f"regression: {exc}"
    doc = record.to_json()
    matches = canonical(doc) == golden(args.case)
    doc["matches_golden"] = matches
    return (HOLDS if matches else VIOLATION), doc, f"{args.case}: certificates verified, golden={matches}"


def cmd_theorems(args):
    seed = _seed(args, True)
    names = SUITES if args.suite == "all" else [args.suite]
    reports = [run_suite(name, args.trials, seed) for name in names]
    failures = sum(r.failures for r in reports)
    docs = [r.to_json() for r in reports]
    result = docs[0] if len(docs) == 1 else {"suites": docs, "seed": seed}
    summary = ", ".join(f"{r.suite}: {r.passes}/{r.trials} pass, {r.failures} fail" for r in reports)
    return (HOLDS if failures == 0 else VIOLATION), result, summary


def cmd_search(args):
    cone = load_cone(args.cone)
    seed = _seed(args, args.strategy == "sample" or _randomized(cone))
    config = SearchConfig(cone, args.entry_bound, seed, args.trials, args.strategy)
    records = _wrap("search", search_counterexamples, config)
    result = {
        "cone": cone_to_json(cone),
        "entry_bound": args.entry_bound,
        "strategy": args.strategy,
        "seed": seed,
        "records": [r.to_json() for r in records],
    }
    return (VIOLATION if records else HOLDS), result, f"{len(records)} counterexample(s)"


VERBS = {
    "membership": cmd_membership,
    "positivity": cmd_positivity,
    "order": cmd_order,
    "jordan": cmd_jordan,
    "spectrum": cmd_spectrum,
    "gallery": cmd_gallery,
    "theorems": cmd_theorems,
    "search": cmd_search,
}


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cone", help="cone JSON file")
    common.add_argument("--map", help="map JSON file")
    common.add_argument("--lhs", help="left-hand map file, or 'id'")
    common.add_argument("--rhs", help="right-hand map file, or 'id'")
    common.add_argument("--vector", help="vector JSON file")
    common.add_argument("--seed", type=int, help="seed (falls back to CONELAB_SEED)")
    common.add_argument("--mode", choices=(EXACT, APPROX), default=EXACT)
    common.add_argument("--tol", type=float, default=1e-9, help="approx-mode tolerance")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--mu-max", type=float, help="upper end of the multiplier search")
    common.add_argument("--lam", default="1", help="eigenvalue for jordan/spectrum (rational)")

    parser = argparse.ArgumentParser(prog="conelab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"conelab {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in ("membership", "positivity", "order", "jordan", "spectrum"):
        sub.add_parser(verb, parents=[common])
    g = sub.add_parser("gallery", parents=[common])
    g.add_argument("case", choices=CASES)
    t = sub.add_parser("theorems", parents=[common])
    t.add_argument("--suite", required=True, choices=(*SUITES, "all"))
    t.add_argument("--trials", type=_positive_int, default=1000)
    s = sub.add_parser("search", parents=[common])
    s.add_argument("--entry-bound", type=_positive_int, default=1)
    s.add_argument("--trials", type=_positive_int, default=1000, help="sample budget")
    s.add_argument("--strategy", choices=("enumerate", "sample"), default="enumerate")
    return parser


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _json_default(x):
    if isinstance(x, Fraction):
        return ex.format_rational(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else HOLDS
    start = time.perf_counter()
    try:
        code, result, summary = VERBS[args.verb](args)
    except InputError as exc:
        print(f"conelab: error[{exc.kind}]: {exc}", file=sys.stderr)
        _emit({"verb": args.verb, "error": {"kind": exc.kind, "message": str(exc)}, "exit_code": INPUT_ERROR}, args.out)
        return INPUT_ERROR
    doc = {
        "verb": args.verb,
        "version": __version__,
        "result": result,
        "exit_code": code,
        "timing": {"elapsed_s": round(time.perf_counter() - start, 4)},
    }
    _emit(doc, args.out)
    print(f"conelab {args.verb}: {summary}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
