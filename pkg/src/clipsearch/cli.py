"""Command-line entry points for the offline pipeline and the service."""

from __future__ import annotations

import argparse
import logging
import sys

from . import dake, evaluation, ingest, recap


def _cmd_dake(args):
    series = dake.read_frame_size_series(args.sizes, args.video_id, args.fps)
    selected = dake.select_keyframes(series, args.rho)
    if args.window:
        selected = dake.enforce_coverage(selected, series, args.window)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        dake.write_keyframe_manifest(out, [selected])
    finally:
        if args.out:
            out.close()


def _read_indices(path):
    with open(path, encoding="utf-8") as fh:
        return [int(line.split("\t")[-1]) for line in fh if line.strip()]


def _cmd_eval_coverage(args):
    ratio = dake.coverage_ratio(
        _read_indices(args.detections), _read_indices(args.reference), args.delta
    )
    print(f"{ratio:.6f}")


def _cmd_ingest(args):
    report = ingest.build_database(
        args.manifest,
        args.out,
        rho=args.rho,
        coverage_seconds=args.coverage_seconds,
        index_all_frames=args.index_all_frames,
    )
    gen = report.generation
    print(f"generation {gen.checksum} at {gen.path}")
    for vid, err in report.failures.items():
        print(f"FAILED {vid}: {err}", file=sys.stderr)


def _cmd_recap(args):
    client = recap.make_client(args.lvlm_endpoint)
    videos = ingest.read_corpus_manifest(args.manifest)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for vm in videos:
            if vm.shot_file is None:
                continue
            shots = ingest.read_shot_file(vm.shot_file, vm.video_id)
            results, failures = recap.caption_shots(
                shots, client, memory_bound=args.memory_bound
            )
            recap.write_captions(out, vm.video_id, results, shots)
            for f in failures:
                print(f"FAILED {vm.video_id} shot {f.shot_index}: {f.error}", file=sys.stderr)
    finally:
        if args.out:
            out.close()


def _cmd_eval_curve(args):
    spec, extras = evaluation.load_spec(args.spec)
    series, reference = evaluation.synthesize(spec, fps=extras["fps"])
    deltas = extras["deltas"] or tuple(
        round(s * extras["fps"]) for s in evaluation.DEFAULT_DELTA_SECONDS
    )
    rows = evaluation.coverage_curve(series, reference, extras["rhos"], deltas)
    with open(args.out, "w", encoding="utf-8") as fh:
        evaluation.write_curve_csv(fh, rows)
    print(f"wrote {len(rows)} rows to {args.out}")


def _cmd_serve(args):
    import uvicorn

    from .ingest import load_generation
    from .service import create_app

    generation = load_generation(args.generation)
    app = create_app(generation)
    uvicorn.run(app, host=args.host, port=args.port)


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = argparse.ArgumentParser(prog="clipsearch")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dake", help="select keyframes from a frame-size file")
    p.add_argument("--sizes", required=True)
    p.add_argument("--rho", type=float, default=dake.DEFAULT_RATIO)
    p.add_argument("--window", type=int, default=0, help="coverage window in frames (0 = off)")
    p.add_argument("--video-id", default="video")
    p.add_argument("--fps", type=float, default=25.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_dake)

    p = sub.add_parser("eval-coverage", help="coverage ratio of detections vs reference")
    p.add_argument("--detections", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--delta", type=int, required=True)
    p.set_defaults(func=_cmd_eval_coverage)

    p = sub.add_parser("ingest", help="build a database generation from a corpus manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rho", type=float, default=ingest.DEFAULT_RHO)
    p.add_argument("--coverage-seconds", type=float, default=2.0)
    p.add_argument("--index-all-frames", action="store_true")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("recap", help="caption shots listed in a corpus manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--lvlm-endpoint", required=True, help="HTTP endpoint URL, or 'mock'")
    p.add_argument("--memory-bound", type=int, default=recap.DEFAULT_MEMORY_CHARS)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_recap)

    p = sub.add_parser("eval-curve", help="coverage-ratio grid on a synthetic series")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval_curve)

    p = sub.add_parser("serve", help="run the HTTP search service")
    p.add_argument("--generation", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
