"""``chebsurf`` command line interface.

Exit codes: 0 success, 2 argument error, 3 I/O error, 4 internal invariant
violation. ``CHEBSURF_LOG`` (error, warn, info, debug) sets the stderr log
level.
"""

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .bounds import bound_report
from .clustering import ClusterParams
from .decompose import FORMULATIONS, DecomposeParams, DecompositionError
from .evaluation import boundary_fscore, boundary_map
from .hilbert import curve_for_image
from .imageio import read_label_map, save_image, write_label_map
from .pipeline import RunConfig, StageError, decompose_summary, run_segment
from .synth import KINDS, make_synthetic

EXIT_OK = 0
EXIT_ARGS = 2
EXIT_IO = 3
EXIT_INVARIANT = 4

_IMAGE_SUFFIXES = {".png", ".ppm", ".pgm"}
_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}

log = logging.getLogger("chebsurf")


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return v


def _add_decompose_args(p):
    p.add_argument("--epsilon", type=float, required=True, help="Chebyshev parameter (> 0)")
    p.add_argument("--npar", type=float, required=True, help="cosine nearness threshold in [0, 1]")
    p.add_argument("--formulation", choices=FORMULATIONS, default="multivariate")
    p.add_argument("--strict-paper", action="store_true",
                   help="disable the zero-variance fallback of the growth test")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chebsurf",
        description="Decompose images into Chebyshev-bounded surfaces along a Hilbert curve.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="decompose one image into bounded surfaces")
    p.add_argument("--input", type=Path, required=True)
    _add_decompose_args(p)
    p.add_argument("--out-json", type=Path)
    p.add_argument("--out-overlay", type=Path)

    p = sub.add_parser("segment", help="decompose and cluster surfaces into a label map")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path)
    src.add_argument("--input-dir", type=Path,
                     help="batch mode: process every PNG/PPM/PGM in a directory; output paths are directories")
    _add_decompose_args(p)
    p.add_argument("--clusters", type=_positive_int, required=True)
    p.add_argument("--replicates", type=_positive_int, default=100)
    p.add_argument("--iterations", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker threads")
    p.add_argument("--out-labels", type=Path, required=True)
    p.add_argument("--out-overlay", type=Path)
    p.add_argument("--report", type=Path,
                   help="JSON summary; a figure is written beside it with a .png suffix")

    p = sub.add_parser("bounds", help="print the probabilistic bounds for (M, N, eps)")
    p.add_argument("--pixels", type=_positive_int, required=True)
    p.add_argument("--features", type=_positive_int, required=True)
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("curve", help="print the Hilbert traversal of an h x w grid as CSV")
    p.add_argument("--height", type=_positive_int, required=True)
    p.add_argument("--width", type=_positive_int, required=True)

    p = sub.add_parser("eval", help="boundary precision/recall/F of label maps")
    p.add_argument("--pred", type=Path, required=True, help="label PNG or directory of them")
    p.add_argument("--truth", type=Path, required=True, help="label PNG or directory of them")
    p.add_argument("--tolerance", type=int, default=2, help="match radius in pixels")

    p = sub.add_parser("synth", help="write a synthetic test image and its truth labels")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--out-truth", type=Path, required=True)
    return parser


def _decompose_params(args):
    return DecomposeParams(epsilon=args.epsilon, npar=args.npar, formulation=args.formulation,
                           strict_paper=args.strict_paper)


def _print_json(obj):
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def cmd_decompose(args):
    params = _decompose_params(args)
    if args.out_json is None and args.out_overlay is None:
        report = decompose_summary(args.input, params)
    else:
        report = run_segment(RunConfig(input=args.input, decompose=params,
                                       out_json=args.out_json, out_overlay=args.out_overlay))
    _print_json(report)
    return EXIT_OK


def _segment_config(args, src, labels, overlay, report):
    return RunConfig(
        input=src,
        decompose=_decompose_params(args),
        cluster=ClusterParams(k=args.clusters, replicates=args.replicates,
                              max_iterations=args.iterations, seed=args.seed),
        out_labels=labels, out_overlay=overlay, report=report,
        n_jobs=args.jobs if args.input_dir is None else 1)


def cmd_segment(args):
    if args.input is not None:
        report = run_segment(_segment_config(args, args.input, args.out_labels,
                                             args.out_overlay, args.report))
        _print_json(report)
        return EXIT_OK

    if not args.input_dir.is_dir():
        raise StageError("load", FileNotFoundError(f"input directory {args.input_dir} not found"))
    files = sorted(p for p in args.input_dir.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES)
    args.out_labels.mkdir(parents=True, exist_ok=True)
    if args.out_overlay is not None:
        args.out_overlay.mkdir(parents=True, exist_ok=True)

    def one(path):
        overlay = args.out_overlay / f"{path.stem}_overlay.png" if args.out_overlay else None
        cfg = _segment_config(args, path, args.out_labels / f"{path.stem}_labels.png", overlay, None)
        return run_segment(cfg)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        reports = list(pool.map(one, files))
    summary = {"n_images": len(reports),
               "images": sorted(reports, key=lambda r: Path(r["input"]).name)}
    if args.report is not None:
        args.report.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    _print_json(summary)
    return EXIT_OK


def cmd_bounds(args):
    if args.epsilon is not None and not args.epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {args.epsilon}")
    _print_json(bound_report(args.features, args.pixels, args.epsilon).to_dict())
    return EXIT_OK


def cmd_curve(args):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["index", "row", "col"])
    for i, (r, c) in enumerate(curve_for_image(args.height, args.width).tolist()):
        w.writerow([i, r, c])
    return EXIT_OK


def _score_pair(pred_path, truth_path, tol):
    pred = read_label_map(pred_path)
    truth = read_label_map(truth_path)
    return boundary_fscore(boundary_map(pred), boundary_map(truth), tol).to_dict()


def cmd_eval(args):
    if args.tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    if args.pred.is_dir() and args.truth.is_dir():
        names = sorted(p.name for p in args.pred.iterdir() if p.suffix.lower() == ".png")
        per_image = {}
        for name in names:
            if not (args.truth / name).exists():
                raise FileNotFoundError(f"no truth label map {args.truth / name}")
            per_image[name] = _score_pair(args.pred / name, args.truth / name, args.tolerance)
        keys = ("precision", "recall", "f_score")
        mean = {k: (sum(s[k] for s in per_image.values()) / len(per_image) if per_image else None)
                for k in keys}
        _print_json({"aggregation": "arithmetic mean over images", "mean": mean,
                     "images": per_image, "tolerance": args.tolerance})
    else:
        score = _score_pair(args.pred, args.truth, args.tolerance)
        score["tolerance"] = args.tolerance
        _print_json(score)
    return EXIT_OK


def cmd_synth(args):
    img, truth = make_synthetic(args.kind, args.size, args.seed)
    save_image(img, args.out)
    write_label_map(truth, args.out_truth)
    return EXIT_OK


COMMANDS = {
    "decompose": cmd_decompose,
    "segment": cmd_segment,
    "bounds": cmd_bounds,
    "curve": cmd_curve,
    "eval": cmd_eval,
    "synth": cmd_synth,
}


def _exit_code(exc):
    if isinstance(exc, StageError):
        exc = exc.cause
    if isinstance(exc, DecompositionError):
        return EXIT_INVARIANT
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, ValueError):
        return EXIT_ARGS
    return EXIT_INVARIANT


def main(argv=None):
    level = _LOG_LEVELS.get(os.environ.get("CHEBSURF_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:  # mapped to documented exit codes
        code = _exit_code(exc)
        log.error("%s", exc)
        if code == EXIT_INVARIANT:
            log.debug("traceback", exc_info=True)
        return code


if __name__ == "__main__":
    sys.exit(main())
