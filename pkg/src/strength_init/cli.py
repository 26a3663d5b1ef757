"""Command-line pipeline: initialize, rewire, analyze, train, compare.

Every subcommand is seedable through --seed/--layer/--rep and goes through
the derive_stream contract, so any single artifact (a layer file, a sweep
table, a training run) can be regenerated in isolation.

Exit codes: 0 success, 1 usage error, 2 data error (missing or malformed
files, bad configuration values), 3 numeric failure (training diverged).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .dataset import IdxError
from .initializers import METHODS, InitSpec, init
from .manifest import ExperimentManifest, read_run_dir, run_manifest
from .matrix_io import (
    MatrixIOError,
    conv_from_2d,
    conv_to_2d,
    load_matrix,
    save_matrix,
)
from .rewiring import (
    PASS_MODES,
    RewireConfig,
    fit_loglog_slope,
    pa_rewire,
    pa_rewire_conv,
    rewire_cost_probe,
)
from .rng import derive_stream
from .stats import compare
from .strength import max_strength_scaling, strength_stats, sweep_rows_to_csv
from .training import TrainingDivergedError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_stream_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="global seed (default 0)")
    p.add_argument("--layer", type=int, default=0, help="layer index for the stream (default 0)")
    p.add_argument("--rep", type=int, default=0, help="repetition index for the stream (default 0)")


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v != ""]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="strength-init", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="sample a weight matrix and write it as WMAT")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--rows", required=True, type=int)
    p.add_argument("--cols", required=True, type=int)
    p.add_argument("--gain", type=float, default=1.0)
    p.add_argument("--out", required=True)
    _add_stream_args(p)

    p = sub.add_parser("rewire", help="preferential-attachment rewiring of a WMAT file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--passes", choices=PASS_MODES, default="bidirectional")
    p.add_argument(
        "--conv",
        type=_int_list,
        default=None,
        metavar="W,H,Z,O",
        help="treat the payload as a (w,h,z,o) filter bank reshaped to 2-D",
    )
    _add_stream_args(p)

    p = sub.add_parser("analyze", help="strength statistics of a WMAT file")
    p.add_argument("--in", dest="infile")
    p.add_argument("--side", choices=("input", "output"), default="input")
    p.add_argument("--json", action="store_true", help="emit the stats as a JSON object")
    p.add_argument("--sweep", action="store_true", help="run the max-strength size sweep instead")
    p.add_argument("--method", choices=METHODS, default="kaiming-uniform")
    p.add_argument("--sizes", type=_int_list, default=[64, 256, 1024, 4096])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--no-rewire", action="store_true", help="sweep base weights only")
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    _add_stream_args(p)

    p = sub.add_parser("sweep", help="max-strength scaling table across layer sizes (CSV)")
    p.add_argument("--method", choices=METHODS, default="kaiming-uniform")
    p.add_argument("--sizes", type=_int_list, default=[64, 256, 1024, 4096])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--no-rewire", action="store_true")
    p.add_argument("--out", default=None)
    _add_stream_args(p)

    p = sub.add_parser("train", help="train MLP repetitions and write metric files")
    p.add_argument("--arch", type=_int_list, required=True, metavar="784,64,64,10")
    p.add_argument("--dataset", choices=("mnist", "fmnist"), required=True)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--init", dest="init_method", choices=METHODS, default="kaiming-uniform")
    p.add_argument("--gain", type=float, default=1.0)
    p.add_argument("--rewire", default="none", help="none | pa | pa-input | var-min:K | var-max:K")
    p.add_argument("--reps", type=int, default=100, help="population size (default 100)")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--lr0", type=float, default=0.01)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-grad-log", action="store_true")
    p.add_argument("--out", required=True, help="directory for rep_*.jsonl and summary.json")
    _add_stream_args(p)

    p = sub.add_parser("compare", help="statistical comparison of two run directories")
    p.add_argument("--baseline", required=True)
    p.add_argument("--treatment", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--format", choices=("md", "json", "csv"), default="md")
    p.add_argument("--out", default=None)
    _add_stream_args(p)

    p = sub.add_parser("cost", help="wall-time scaling probe of the rewiring pass")
    p.add_argument("--sizes", type=_int_list, default=[256, 512, 1024, 2048, 4096])
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--passes", choices=PASS_MODES, default="bidirectional")
    p.add_argument("--out", default=None)
    _add_stream_args(p)

    p = sub.add_parser("run", help="execute an experiment manifest")
    p.add_argument("--manifest", required=True)
    _add_stream_args(p)

    return parser


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_init(args) -> int:
    stream = derive_stream(args.seed, args.layer, args.rep)
    w = init(InitSpec(args.method, args.rows, args.cols, gain=args.gain), stream)
    save_matrix(w, args.out)
    return EXIT_OK


def _cmd_rewire(args) -> int:
    w = load_matrix(args.infile)
    cfg = RewireConfig(rng=derive_stream(args.seed, args.layer, args.rep), passes=args.passes)
    if args.conv is not None:
        if len(args.conv) != 4:
            raise _UsageError("--conv needs four comma-separated dims w,h,z,o")
        cw, ch, cz, co = args.conv
        if w.shape != (cw * ch * cz, co):
            raise MatrixIOError(
                f"{args.infile}: shape {w.shape} does not match conv dims "
                f"({cw}*{ch}*{cz}, {co})"
            )
        tensor = conv_from_2d(w, (cw, ch, cz))
        out = conv_to_2d(pa_rewire_conv(tensor, cfg))
    else:
        out = pa_rewire(w, cfg)
    save_matrix(out, args.out)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    if args.sweep:
        return _cmd_sweep(args)
    if not args.infile:
        raise _UsageError("analyze needs --in (or --sweep)")
    stats = strength_stats(load_matrix(args.infile), args.side)
    if args.json:
        _emit(json.dumps(stats.to_dict(), indent=2) + "\n", args.out)
    else:
        lines = [f"{k} = {v}" for k, v in stats.to_dict().items()]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    stream = derive_stream(args.seed, args.layer, args.rep)
    rows = max_strength_scaling(
        args.method, args.sizes, args.trials, stream, rewire=not args.no_rewire
    )
    _emit(sweep_rows_to_csv(rows), args.out)
    return EXIT_OK


def _cmd_train(args) -> int:
    manifest = ExperimentManifest(
        dataset=args.dataset,
        arch=tuple(args.arch),
        out_dir=args.out,
        init_method=args.init_method,
        init_gain=args.gain,
        baseline_rewire=args.rewire,
        treatment_rewire=None,
        global_seed=args.seed,
        repetitions=args.reps,
        epochs=args.epochs,
        batch_size=args.batch_size,
        lr0=args.lr0,
        momentum=args.momentum,
        data_dir=args.data_dir,
        jobs=args.jobs,
        log_gradients=not args.no_grad_log,
    )
    # the single arm lands directly in --out/baseline
    return run_manifest(manifest)


def _cmd_compare(args) -> int:
    base = [doc["summary"] for doc in read_run_dir(args.baseline)]
    treat = [doc["summary"] for doc in read_run_dir(args.treatment)]
    report = compare(base, treat, alpha=args.alpha)
    if args.format == "md":
        _emit(report.to_markdown(), args.out)
    elif args.format == "json":
        _emit(report.to_json(), args.out)
    else:
        _emit(report.to_csv(), args.out)
    return EXIT_OK


def _cmd_cost(args) -> int:
    table = rewire_cost_probe(args.sizes, reps=args.reps, passes=args.passes, seed=args.seed)
    lines = ["n,seconds"] + [f"{n},{t:.6f}" for n, t in table]
    if len(table) >= 2:
        lines.append(f"# log-log slope: {fit_loglog_slope(table):.3f}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_run(args) -> int:
    manifest = ExperimentManifest.load(args.manifest)
    return run_manifest(manifest)


_COMMANDS = {
    "init": _cmd_init,
    "rewire": _cmd_rewire,
    "analyze": _cmd_analyze,
    "sweep": _cmd_sweep,
    "train": _cmd_train,
    "compare": _cmd_compare,
    "cost": _cmd_cost,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"strength-init: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"strength-init: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrainingDivergedError as exc:
        print(f"strength-init: training diverged: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (
        MatrixIOError,
        IdxError,
        FileNotFoundError,
        json.JSONDecodeError,
        KeyError,
        ValueError,
    ) as exc:
        print(f"strength-init: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
