"""Command line entry point: run scripts or the bundled corpus, emit JSON or
text reports, optionally render the delimited/figure report bundle.

Exit codes: 0 all expectations met, 1 a verdict or value mismatch, 2 a parse
or engine error.
"""

import argparse
import json
import os
import random
import sys
from importlib import resources

from . import groebner
from .errors import EngineError, ScriptError
from .rings import FieldSpec
from .runner import Session, SessionOptions, run_script
from .script import parse_script


def _parse_field_flag(text):
    if text is None:
        return None
    low = text.lower()
    if low == "qq":
        return FieldSpec.rationals()
    if low == "gf":
        return FieldSpec.prime_field()
    if low.startswith("gf:"):
        return FieldSpec.prime_field(int(low[3:]))
    raise argparse.ArgumentTypeError(f"unknown field {text!r} (use qq, gf, or gf:P)")


def _parse_trunc_flag(text):
    if text is None or text == "auto":
        return None
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("truncation policy must be 'auto' or an integer")
    if k < 2:
        raise argparse.ArgumentTypeError("fixed truncation level must be >= 2")
    return k


def build_parser():
    ap = argparse.ArgumentParser(
        prog="socle",
        description="Exact checks for socle modules, reductions, and perfect matrices.",
    )
    ap.add_argument("scripts", nargs="*", help="input .sml script files")
    ap.add_argument("--corpus", action="store_true", help="run the bundled example corpus")
    ap.add_argument("--json", action="store_true", help="emit reports as a JSON array")
    ap.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
    ap.add_argument("--fail-fast", action="store_true", help="stop at the first engine error")
    ap.add_argument(
        "--field",
        type=_parse_field_flag,
        default=None,
        metavar="qq|gf:P",
        help="override the declared coefficient field (gf defaults to 32003)",
    )
    ap.add_argument(
        "--trunc",
        type=_parse_trunc_flag,
        default=None,
        metavar="auto|K",
        help="truncation policy: ascending search (auto) or a pinned level K",
    )
    ap.add_argument("--trunc-cap", type=int, default=64, metavar="N", help="certificate search cap")
    ap.add_argument("--seed", type=int, default=None, help="seed for randomized sampling")
    ap.add_argument("--figures", metavar="DIR", help="render CSV and figure reports into DIR")
    ap.add_argument("--cache", metavar="DIR", help="content-addressed Groebner cache directory")
    return ap


def _corpus_files():
    root = resources.files("socle.corpus")
    return sorted(
        (p.name, p.read_text()) for p in root.iterdir() if p.name.endswith(".sml")
    )


def _script_files(paths):
    out = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            out.append((os.path.basename(path), fh.read()))
    return out


def _use_color(stream):
    return stream.isatty() and not os.environ.get("NO_COLOR")


_COLORS = {"holds": "32", "computed": "36", "hypothesis-not-met": "33", "fails": "31", "error": "31"}


def _text_lines(reports, color):
    lines = []
    for rep in reports:
        verdict = rep.get("verdict", "?")
        shown = f"[{verdict}]"
        if color and verdict in _COLORS:
            shown = f"\x1b[{_COLORS[verdict]}m{shown}\x1b[0m"
        target = rep.get("inputs", {}).get("target", "")
        certs = rep.get("certificates", {})
        extras = []
        if rep.get("source"):
            extras.append(rep["source"])
        if "K" in certs:
            extras.append(f"K={certs['K']}")
        if "value" in certs:
            extras.append(f"value={certs['value']}")
        if "reason" in certs:
            extras.append(certs["reason"])
        if "message" in certs:
            extras.append(certs["message"])
        if "expected" in rep:
            mark = "ok" if rep.get("expectation_met") else "MISMATCH"
            extras.append(f"expect {rep['expected']}: {mark}")
        detail = ", ".join(str(e) for e in extras)
        lines.append(f"{shown} {rep.get('command', '')} {target}  ({detail}) {rep.get('elapsed_ms', 0)} ms")
    return lines


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.seed is not None:
        random.seed(args.seed)
    if args.cache:
        groebner.CACHE_DIR = args.cache

    try:
        jobs = []
        if args.corpus:
            jobs.extend(_corpus_files())
        jobs.extend(_script_files(args.scripts))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not jobs:
        build_parser().print_usage(sys.stderr)
        print("error: no scripts given (use --corpus or pass .sml files)", file=sys.stderr)
        return 2

    options = SessionOptions(
        field_override=args.field,
        trunc_fixed=args.trunc,
        trunc_cap=args.trunc_cap,
        fail_fast=args.fail_fast,
        seed=args.seed,
    )

    all_reports = []
    status = 0
    for name, text in jobs:
        try:
            script = parse_script(text, field_override=args.field)
        except ScriptError as exc:
            print(f"{name}:{exc}", file=sys.stderr)
            status = 2
            if args.fail_fast:
                break
            continue
        try:
            reports, st = run_script(script, Session(options=options))
        except EngineError as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            status = 2
            if args.fail_fast:
                break
            continue
        for rep in reports:
            rep["source"] = name
        all_reports.extend(reports)
        status = max(status, st)
        if status and args.fail_fast:
            break

    if args.out:
        stream = open(args.out, "w", encoding="utf-8")
    else:
        stream = sys.stdout
    try:
        if args.json:
            json.dump(all_reports, stream, indent=2, sort_keys=True)
            stream.write("\n")
        else:
            color = _use_color(stream)
            for line in _text_lines(all_reports, color):
                stream.write(line + "\n")
    finally:
        if args.out:
            stream.close()

    if args.figures:
        from .report import render_report_files

        for path in render_report_files(all_reports, args.figures):
            print(f"wrote {path}", file=sys.stderr)

    return status


if __name__ == "__main__":
    sys.exit(main())
