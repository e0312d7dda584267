"""Operator command line: validate scores, run simulations, render, serve.

Exit codes are a stable contract: 0 success, 1 domain error (validation,
causality), 2 I/O or usage problems.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import CausalityError, SkiniError, ValidationError
from .render import parse_csv, render_csv, render_smf
from .score import load_score
from .simulator import SimulatorConfig, run

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="skini",
        description="Interactive structured-music engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="validate a score document")
    p_check.add_argument("score", help="path to a score JSON file")

    p_play = sub.add_parser(
        "play", help="run a seeded audience simulation and render the outputs"
    )
    p_play.add_argument("score")
    p_play.add_argument("--seed", type=int, default=0)
    p_play.add_argument("--audience", type=int, default=30)
    p_play.add_argument("--duration", type=float, default=300.0,
                        help="interaction window in seconds")
    p_play.add_argument("--min-response", type=float, default=2.0)
    p_play.add_argument("--max-response", type=float, default=10.0)
    p_play.add_argument("--max-wait", type=float, default=30.0)
    p_play.add_argument("--out", help="event CSV path (default: stdout)")
    p_play.add_argument("--stats", help="statistics JSON path")
    p_play.add_argument("--midi", help="Standard MIDI File path")
    p_play.add_argument("--plot", help="timeline figure path (png/pdf/svg)")

    p_serve = sub.add_parser("serve", help="run the live performance server")
    p_serve.add_argument("score")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--sim", action="store_true",
                         help="add an in-process simulated audience")
    p_serve.add_argument("--audience", type=int, default=30)
    p_serve.add_argument("--min-response", type=float, default=2.0)
    p_serve.add_argument("--max-response", type=float, default=10.0)
    p_serve.add_argument("--max-wait", type=float, default=30.0)
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.add_argument("--client-dir",
                         help="directory with a built audience client")

    p_render = sub.add_parser(
        "render", help="render an event CSV to a Standard MIDI File"
    )
    p_render.add_argument("events", help="event CSV produced by 'play'")
    p_render.add_argument("--score", required=True,
                          help="the score the events came from")
    p_render.add_argument("--midi", required=True, help="output SMF path")

    return parser


def _load(path_str):
    path = Path(path_str)
    if not path.exists():
        print(f"skini: no such file: {path}", file=sys.stderr)
        raise SystemExit(EXIT_IO)
    return load_score(path)


def cmd_check(args) -> int:
    try:
        score = _load(args.score)
    except ValidationError as e:
        print(f"{args.score}: INVALID")
        for finding in e.findings:
            print(f"  {finding}")
        return EXIT_DOMAIN
    counts = ", ".join(f"{n}: {c}" for n, c in score.per_instrument_counts())
    print(f"{args.score}: OK")
    print(
        f"{score.pattern_count} patterns, {score.group_count} groups, "
        f"{score.instrument_count} instruments"
    )
    print(f"per instrument: {counts}")
    for w in score.warnings:
        print(f"  warning: {w}")
    return EXIT_OK


def cmd_play(args) -> int:
    try:
        score = _load(args.score)
        config = SimulatorConfig(
            audience_size=args.audience,
            min_response_s=args.min_response,
            max_response_s=args.max_response,
            max_wait_s=args.max_wait,
            seed=args.seed,
            run_length_s=args.duration,
        )
    except ValidationError as e:
        print(str(e), file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as e:
        print(f"skini: {e}", file=sys.stderr)
        return EXIT_IO

    try:
        report = run(score, config)
    except CausalityError as e:
        print(f"skini: {e}", file=sys.stderr)
        return EXIT_DOMAIN

    csv_text = render_csv(report.events)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    if args.stats:
        Path(args.stats).write_text(report.stats_json(), encoding="utf-8")
    if args.midi:
        Path(args.midi).write_bytes(render_smf(report.events, score))
    if args.plot:
        from .report import render_timeline

        admissions = [a.time for a in report.attempts if a.outcome == "admitted"]
        render_timeline(report.events, score, args.plot, admissions=admissions)
    stats = report.stats()
    print(
        f"played {stats['admissions']} selections over "
        f"{stats['endTimeSeconds']}s "
        f"({'score complete' if stats['terminated'] else 'time up'})",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import serve

    try:
        score = _load(args.score)
    except ValidationError as e:
        print(str(e), file=sys.stderr)
        return EXIT_DOMAIN
    sim_config = None
    if args.sim:
        sim_config = SimulatorConfig(
            audience_size=args.audience,
            min_response_s=args.min_response,
            max_response_s=args.max_response,
            max_wait_s=args.max_wait,
            seed=args.seed,
            run_length_s=float("inf"),
        )
    serve(
        score,
        host=args.host,
        port=args.port,
        sim_config=sim_config,
        client_dir=args.client_dir,
    )
    return EXIT_OK


def cmd_render(args) -> int:
    events_path = Path(args.events)
    if not events_path.exists():
        print(f"skini: no such file: {events_path}", file=sys.stderr)
        return EXIT_IO
    try:
        score = _load(args.score)
        events = parse_csv(events_path.read_text(encoding="utf-8"))
        Path(args.midi).write_bytes(render_smf(events, score))
    except SkiniError as e:
        print(f"skini: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


_COMMANDS = {
    "check": cmd_check,
    "play": cmd_play,
    "serve": cmd_serve,
    "render": cmd_render,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = _COMMANDS[args.command](args)
    except SystemExit as e:
        return int(e.code or 0)
    except OSError as e:
        print(f"skini: {e}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
