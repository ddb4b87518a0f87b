"""Command-line front end.

Exit codes: 0 success, 1 not Sahlqvist, 2 parse or input error, 3 a check
found counterexamples.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence, TextIO

import numpy as np

from inlcorr import bimodal, fo, verify
from inlcorr.classifier import classify
from inlcorr.correspondence import NotSahlqvistError
from inlcorr.formula import Formula
from inlcorr.parser import (
    ParseError,
    bimodal_to_json,
    fo_to_json,
    inl_to_json,
    parse_inl,
    print_bimodal,
    print_fo,
    print_inl,
)
from inlcorr.semantics import FrameFormatError, Model, UnknownWorld, read_frame_file, satisfies
from inlcorr.translation import st

EXIT_OK, EXIT_NOT_SAHLQVIST, EXIT_INPUT, EXIT_CHECK = 0, 1, 2, 3
SUITES = ("st", "tau", "mono", "correspond")


class InputError(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    """Raises instead of exiting so usage errors can be reported as JSON."""

    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _default_seed() -> int:
    raw = os.environ.get("INLC_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"INLC_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _ArgParser(add_help=False)
    common.add_argument("formula", nargs="?", help="formula text (or use --file)")
    common.add_argument("--file", help="read the formula (one per line for check) from a file")
    common.add_argument("--format", choices=("text", "json", "latex"), help="output format")

    p = _ArgParser(prog="inlc", description="Sahlqvist correspondence for instantial neighbourhood logic")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)
    sub.add_parser("parse", parents=[common], help="parse and echo a formula")
    sub.add_parser("classify", parents=[common], help="Sahlqvist tier and decomposition (JSON by default)")
    sub.add_parser("st", parents=[common], help="standard translation ST_x")
    sub.add_parser("tau", parents=[common], help="translation into the bimodal language")
    c = sub.add_parser("correspond", parents=[common], help="first-order local correspondent")
    c.add_argument("--route", choices=verify.ROUTES, default="direct")
    k = sub.add_parser("check", parents=[common], help="run an oracle check and print its report")
    k.add_argument("--suite", choices=SUITES, default="st")
    k.add_argument("--route", choices=verify.ROUTES, default="direct", help="route for the correspond suite")
    k.add_argument("--max-worlds", type=int, default=3)
    k.add_argument("--samples", type=int, default=200)
    k.add_argument("--seed", type=int, default=None, help="random seed (default: $INLC_SEED or 0)")
    k.add_argument("--workers", type=int, default=1)
    e = sub.add_parser("eval", parents=[common], help="truth of a formula at a world of a model file")
    e.add_argument("--frame", required=True, help="JSON frame/model file")
    e.add_argument("--world", required=True, help="world name")
    return p


def _read_formulas(args, many: bool = False) -> list[Formula]:
    if (args.formula is None) == (args.file is None):
        if many and args.formula is None:
            return []
        raise InputError("give exactly one of a formula argument or --file")
    if args.formula is not None:
        return [parse_inl(args.formula)]
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from None
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if many:
        return [parse_inl(ln) for ln in lines]
    if len(lines) != 1:
        raise InputError(f"{args.file} must contain exactly one formula")
    return [parse_inl(lines[0])]


def _routes_agree(phi: Formula, alphas: dict[str, fo.FOFormula]) -> bool:
    for frame in verify.frames(verify.EXHAUSTIVE_LIMIT, 0, 0):
        a = fo.world_table(frame, alphas["direct"], verify.X)
        b = fo.world_table(frame, alphas["bimodal"], verify.X)
        if not np.array_equal(*np.broadcast_arrays(a, b)):
            return False
    return True


def _dispatch(args, out: TextIO) -> int:
    fmt = args.format or ("json" if args.command == "classify" else "text")

    def say(payload, text: str | None = None):
        if fmt == "json":
            out.write(json.dumps(payload, sort_keys=True) + "\n")
        else:
            out.write((text if text is not None else str(payload)) + "\n")

    if args.command == "check":
        return _check(args, fmt, out)

    (phi,) = _read_formulas(args)
    if args.command == "parse":
        say(inl_to_json(phi), print_inl(phi, fmt))
        return EXIT_OK
    if args.command == "classify":
        cls = classify(phi)
        payload = cls.to_json()
        label = cls.verdict.label
        say(payload, label if fmt == "text" else f"{label}: ${print_inl(phi, 'latex')}$")
        return EXIT_OK if cls.is_sahlqvist else EXIT_NOT_SAHLQVIST
    if args.command == "st":
        alpha = st(phi, verify.X)
        say(fo_to_json(alpha), print_fo(alpha, fmt))
        return EXIT_OK
    if args.command == "tau":
        chi = bimodal.tau(phi)
        say(bimodal_to_json(chi), print_bimodal(chi, fmt))
        return EXIT_OK
    if args.command == "correspond":
        alphas = verify.correspondents(phi, args.route)
        if args.route != "both":
            (alpha,) = alphas.values()
            say({"route": args.route, "correspondent": fo_to_json(alpha)}, print_fo(alpha, fmt))
            return EXIT_OK
        verdict = "same" if _routes_agree(phi, alphas) else "different"
        payload = {
            "direct": fo_to_json(alphas["direct"]),
            "bimodal": fo_to_json(alphas["bimodal"]),
            "routes": verdict,
        }
        text = "\n".join([
            f"direct: {print_fo(alphas['direct'], fmt)}",
            f"bimodal: {print_fo(alphas['bimodal'], fmt)}",
            f"routes: {verdict} on every frame with at most {verify.EXHAUSTIVE_LIMIT} worlds",
        ])
        say(payload, text)
        return EXIT_OK
    if args.command == "eval":
        try:
            frame, valuation = read_frame_file(args.frame)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read frame file: {exc}") from None
        names = [frame.world_name(w) for w in frame.worlds]
        if args.world not in names:
            raise UnknownWorld(f"unknown world {args.world!r}")
        w = names.index(args.world)
        value = satisfies(Model(frame, valuation), w, phi)
        say({"world": args.world, "formula": print_inl(phi), "value": value}, "true" if value else "false")
        return EXIT_OK
    raise InputError(f"unknown command {args.command}")


def _check(args, fmt: str, out: TextIO) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.max_worlds < 1 or args.samples < 0:
        raise InputError("--max-worlds must be at least 1 and --samples non-negative")
    corpus = _read_formulas(args, many=True)
    opts = dict(max_worlds=args.max_worlds, samples=args.samples, seed=seed, workers=args.workers)
    if args.suite == "st":
        report = verify.check_st_correctness(corpus or verify.default_corpus(seed), **opts)
    elif args.suite == "tau":
        report = verify.check_tau_correctness(corpus or verify.default_corpus(seed), **opts)
    elif args.suite == "mono":
        report = verify.check_lemma_monotonicity(**opts)
    else:
        report = verify.check_correspondence(corpus or verify.correspondence_corpus(), args.route, **opts)
    if fmt == "json":
        out.write(json.dumps(report.to_json(), sort_keys=True) + "\n")
    else:
        status = "PASS" if report.passed else "FAIL"
        out.write(
            f"{status} {report.property}: {report.instances} instances, "
            f"{len(report.counterexamples)} counterexamples, {len(report.disagreements)} disagreements "
            f"(seed {report.seed})\n"
        )
        for c in report.counterexamples[:10]:
            out.write(f"  counterexample: {json.dumps(c, sort_keys=True)}\n")
    return EXIT_OK if report.passed else EXIT_CHECK


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except InputError as exc:
        wants_json = "--format=json" in argv or any(
            a == "--format" and b == "json" for a, b in zip(argv, argv[1:])
        )
        msg = str(exc)
        err.write((json.dumps({"error": "UsageError", "message": msg}) if wants_json else msg) + "\n")
        return EXIT_INPUT
    as_json = args.format == "json" or (args.format is None and args.command == "classify")

    def fail(code: int, payload: dict, text: str) -> int:
        err.write((json.dumps(payload, sort_keys=True) if as_json else text) + "\n")
        return code

    try:
        return _dispatch(args, out)
    except ParseError as exc:
        return fail(EXIT_INPUT, exc.to_json(), exc.pretty())
    except NotSahlqvistError as exc:
        verdict = getattr(exc.verdict, "verdict", None)
        payload = {"error": "NotSahlqvist", "message": str(exc)}
        if verdict is not None:
            payload["verdict"] = verdict.label
        return fail(EXIT_NOT_SAHLQVIST, payload, f"error: {exc}")
    except (InputError, UnknownWorld, FrameFormatError) as exc:
        return fail(EXIT_INPUT, {"error": type(exc).__name__, "message": str(exc)}, f"error: {exc}")


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
