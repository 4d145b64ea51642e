"""Operator command line.

Subcommands: ``process`` (session directory → frisson series file),
``aggregate`` (frisson files → aggregate file), ``simulate`` (synthetic
session directories with ground truth), ``eval`` (precision/recall of
detected vs truth event times), ``keyframes`` (aggregate → animation
timeline) and ``serve`` (run the stream server).

Exit codes: 0 success, 1 usage error, 2 data/format error. Every
subcommand is deterministic: identical inputs, flags and seeds produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, simulator, storage
from .errors import FrissonError, InvalidParameterError, ParseError
from .feedback_map import FeedbackDesign, build_keyframes
from .session_align import build_timeline, grid_to_eda, to_grid
from .signal_core import PipelineConfig, aggregate, pipeline_peaks, quantize

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this CLI's contract says 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="frisson", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"frisson {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("process", help="run the detection pipeline on one session directory")
    p.add_argument("--session", required=True, metavar="DIR", help="session record directory")
    p.add_argument("--out", required=True, metavar="FILE", help="frisson series output file")
    p.add_argument("--config", metavar="FILE", help="JSON file overriding pipeline defaults")
    p.add_argument("--peaks", metavar="FILE", help="also write detected peak times (JSON array, seconds)")

    p = sub.add_parser("aggregate", help="average frisson series files into one aggregate")
    p.add_argument("--video", required=True, metavar="ID")
    p.add_argument("--inputs", required=True, metavar="DIR", help="directory of frisson series files")
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--dump-csv", metavar="FILE", help="also write t_s,value rows for plotting")

    p = sub.add_parser("simulate", help="generate synthetic sessions with ground truth")
    p.add_argument("--duration", required=True, type=float, metavar="S")
    p.add_argument("--participants", required=True, type=int, metavar="N")
    p.add_argument("--events", required=True, type=int, metavar="K")
    p.add_argument("--seed", required=True, type=int, metavar="S")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--video", default="sim", metavar="ID")
    p.add_argument("--rate", type=float, default=5.0, metavar="HZ")
    p.add_argument("--noise-sigma", type=float, default=0.02, metavar="SD")
    p.add_argument("--drift-amplitude", type=float, default=0.5, metavar="A")
    p.add_argument("--amplitude", type=float, default=1.0, metavar="A", help="SCR amplitude")
    p.add_argument("--min-gap", type=float, default=20.0, metavar="S")

    p = sub.add_parser("eval", help="score detected event times against ground truth")
    p.add_argument("--detected", required=True, metavar="FILE")
    p.add_argument("--truth", required=True, metavar="FILE")
    p.add_argument("--tol", type=float, default=2.5, metavar="S")

    p = sub.add_parser("keyframes", help="build a design's animation timeline from an aggregate")
    p.add_argument("--aggregate", required=True, metavar="FILE")
    p.add_argument(
        "--design", required=True, choices=[d.value for d in FeedbackDesign]
    )
    p.add_argument("--out", required=True, metavar="FILE")

    p = sub.add_parser("serve", help="run the stream server")
    p.add_argument("--listen", default="127.0.0.1:8787", metavar="HOST:PORT")
    p.add_argument("--data", metavar="DIR", help="data directory (default: $FRISSON_DATA_DIR or ./frisson-data)")
    p.add_argument("--config", metavar="FILE", help="JSON file overriding pipeline defaults")

    return parser


def _load_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        raw = json.loads(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise FrissonError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed config file {path}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"config file {path} must hold a JSON object")
    return PipelineConfig.from_mapping(raw)


def _read_times(path: str) -> list[float]:
    """Event-time file: a JSON array of seconds, or {\"times_s\": [...]}."""
    try:
        raw = json.loads(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise FrissonError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed times file {path}: {exc.msg}") from exc
    if isinstance(raw, dict) and "times_s" in raw:
        raw = raw["times_s"]
    if not isinstance(raw, list) or any(
        isinstance(t, bool) or not isinstance(t, (int, float)) for t in raw
    ):
        raise ParseError(f"times file {path} must hold a JSON array of seconds")
    return [float(t) for t in raw]


def _cmd_process(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    record = storage.read_session(args.session)
    timeline = build_timeline(record.events)
    grid = to_grid(record.eda, timeline, cfg.sample_rate_hz)
    gridded = grid_to_eda(grid, record.eda.start_wall_ms)
    peaks = pipeline_peaks(gridded, cfg)
    series = quantize(len(gridded), peaks, cfg)
    storage.write_frisson(args.out, record.participant_id, record.video_id, series)
    if args.peaks:
        times = [round(p.index / cfg.sample_rate_hz, 6) for p in peaks]
        Path(args.peaks).write_text(json.dumps(times) + "\n", "utf-8")
    return 0


def _cmd_aggregate(args: argparse.Namespace) -> int:
    inputs = sorted(p for p in Path(args.inputs).glob("*.json") if p.is_file())
    if not inputs:
        raise FrissonError(f"no frisson series files in {args.inputs}")
    series = [storage.read_frisson(p)[2] for p in inputs]
    agg = aggregate(args.video, series)
    storage.write_aggregate(args.out, agg)
    if args.dump_csv:
        rows = ["t_s,value"]
        rows += [f"{i / agg.grid_hz:g},{v:g}" for i, v in enumerate(agg.values)]
        Path(args.dump_csv).write_text("\n".join(rows) + "\n", "utf-8")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    simulator.write_simulation(
        args.out,
        participants=args.participants,
        duration_s=args.duration,
        events=args.events,
        seed=args.seed,
        video_id=args.video,
        sample_rate_hz=args.rate,
        scr=simulator.ScrParams(amplitude=args.amplitude),
        drift_amplitude=args.drift_amplitude,
        noise_sigma=args.noise_sigma,
        min_gap_s=args.min_gap,
    )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    result = simulator.evaluate(_read_times(args.detected), _read_times(args.truth), args.tol)
    print(f"precision={result.precision:.3f}")
    print(f"recall={result.recall:.3f}")
    return 0


def _cmd_keyframes(args: argparse.Namespace) -> int:
    agg = storage.read_aggregate(args.aggregate)
    design = FeedbackDesign(args.design)
    storage.write_keyframes(args.out, design, build_keyframes(agg, design))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    host, _, port_text = args.listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise InvalidParameterError(f"--listen expects host:port, got {args.listen!r}")
    app = create_app(data_dir=args.data, cfg=_load_config(args.config))
    uvicorn.run(app, host=host, port=int(port_text))
    return 0


_COMMANDS = {
    "process": _cmd_process,
    "aggregate": _cmd_aggregate,
    "simulate": _cmd_simulate,
    "eval": _cmd_eval,
    "keyframes": _cmd_keyframes,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FrissonError as exc:
        print(f"frisson {args.command}: {exc}", file=sys.stderr)
        return DATA_EXIT
    except OSError as exc:
        print(f"frisson {args.command}: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
