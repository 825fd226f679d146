"""Command-line entry point.

Subcommands cover the whole pipeline: generate synthetic data, inspect
segmentation, run retrieval, evaluate retrieval relevance against labels,
run the multi-mode benchmark, and export SVG overlays of retrieved spans.

Exit codes: 0 success, 1 validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import pathops, synthbench, trajdata
from .errors import HandrvError
from .retrieval import RetrievalParams, retrieve
from .svg import write_bar_chart, write_path_overlay
from .synthbench import BenchConfig, compare_modes, gen_hand, gen_play, run_mode


def _add_common_retrieval_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--M", type=int, default=100, help="visual filter keeps M candidates")
    p.add_argument("--K", type=int, default=25, help="retain K matches per query segment")
    p.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help="pause threshold for play segmentation "
        "(default: 10th percentile of the dataset's kin values)",
    )
    p.add_argument("--min-len", type=int, default=pathops.DEFAULT_MIN_LEN,
                   help="discard segments shorter than this many frames")
    p.add_argument("--no-visual-filter", action="store_true",
                   help="skip the visual filtering stage")
    p.add_argument("--distance-mode", choices=["path", "embedding"], default="path",
                   help="local distance for matching: motion deltas or frame embeddings")
    p.add_argument("--split-even", type=int, default=1, metavar="N",
                   help="split the query demo into N even segments")
    p.add_argument("--weight-scope", choices=["per_query", "union"], default="per_query",
                   help="normalize weights per query segment or over all matches")
    p.add_argument("--seed", type=int, default=0, help="recorded in the manifest")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (never changes output)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="handrv",
        description="Retrieve behaviorally similar sub-trajectories from play data "
        "using a query demonstration's 2D motion path.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synth", help="generate a labeled synthetic dataset")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tasks", type=int, default=6)
    p.add_argument("--per-task", type=int, default=40)
    p.add_argument("--motifs-per-traj", type=int, default=3)
    p.add_argument("--sigma-p", type=float, default=2.0)
    p.add_argument("--sigma-e", type=float, default=1.0)
    p.set_defaults(func=cmd_gen_synth)

    p = sub.add_parser("segment", help="print the segment table of a dataset")
    p.add_argument("--play", required=True, help="dataset.jsonl to segment")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--min-len", type=int, default=pathops.DEFAULT_MIN_LEN)
    p.add_argument("--split-even", type=int, default=None, metavar="N",
                   help="even split instead of kinematic segmentation")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("retrieve", help="retrieve matches for one query demo")
    p.add_argument("--play", required=True)
    p.add_argument("--hand", required=True)
    p.add_argument("--query-id", default=None,
                   help="query trajectory id when the demo file holds several")
    _add_common_retrieval_flags(p)
    p.add_argument("-o", "--out", required=True, help="output directory for manifest.json")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("eval", help="score retrieval modes against ground-truth labels")
    p.add_argument("--play", required=True)
    p.add_argument("--hand", required=True)
    p.add_argument("--labels", required=True)
    _add_common_retrieval_flags(p)
    p.add_argument("-o", "--out", required=True, help="output directory for bench-report.json")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run the seeded multi-mode benchmark")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--seeds", default="0,1,2", help="comma-separated seed list")
    p.add_argument("--tasks", type=int, default=6)
    p.add_argument("--per-task", type=int, default=40)
    p.add_argument("--motifs-per-traj", type=int, default=3)
    p.add_argument("--sigma-p", type=float, default=2.0)
    p.add_argument("--sigma-e", type=float, default=1.0)
    p.add_argument("--M", type=int, default=100)
    p.add_argument("--K", type=int, default=25)
    p.add_argument("--confusable", action="store_true",
                   help="query only the identical-shape motif pair")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-svg", help="draw the query path over its top matches")
    p.add_argument("--manifest", required=True)
    p.add_argument("--play", required=True)
    p.add_argument("--hand", required=True)
    p.add_argument("--top", type=int, default=5)
    p.add_argument("-o", "--out", required=True, help="output SVG file")
    p.set_defaults(func=cmd_export_svg)

    return parser


def _resolve_epsilon(args, trajectories) -> float:
    if args.epsilon is not None:
        if args.epsilon <= 0:
            raise HandrvError("--epsilon must be > 0")
        return args.epsilon
    return pathops.default_epsilon(trajectories)


def cmd_gen_synth(args, parser) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = BenchConfig(
        tasks=args.tasks,
        per_task=args.per_task,
        motifs_per_traj=args.motifs_per_traj,
        sigma_p=args.sigma_p,
        sigma_e=args.sigma_e,
    )
    data = gen_play(cfg, args.seed)
    trajdata.write_dataset(data.trajectories, out / "play.jsonl")
    demos = [
        gen_hand(motif, args.seed * 1009 + i, cfg)
        for i, motif in enumerate(cfg.active_motifs)
    ]
    trajdata.write_dataset(demos, out / "hand.jsonl")
    queries = {demo.id: motif for demo, motif in zip(demos, cfg.active_motifs)}
    synthbench.write_labels(data.labels, queries, out / "labels.json")
    print(f"wrote {len(data.trajectories)} play trajectories, {len(demos)} demos, "
          f"{len(data.labels)} labeled segments to {out}")
    return 0


def cmd_segment(args, parser) -> int:
    trajectories = trajdata.load_dataset(args.play)
    print(f"{'traj_id':<16} {'start':>8} {'end':>8} {'frames':>8}")
    if args.split_even is not None:
        segments = []
        for traj in trajectories:
            segments.extend(pathops.split_even(traj, args.split_even, args.min_len))
    else:
        epsilon = _resolve_epsilon(args, trajectories)
        segments = []
        for traj in trajectories:
            segments.extend(pathops.segment_kinematic(traj, epsilon, args.min_len))
    for seg in segments:
        print(f"{seg.traj_id:<16} {seg.start:>8} {seg.end:>8} {seg.n_frames:>8}")
    print(f"# {len(segments)} segments from {len(trajectories)} trajectories")
    return 0


def _load_query(args):
    demos = trajdata.load_dataset(args.hand)
    if args.query_id is not None:
        by_id = {t.id: t for t in demos}
        if args.query_id not in by_id:
            raise HandrvError(f"query id {args.query_id!r} not in {args.hand}")
        return by_id[args.query_id]
    if len(demos) != 1:
        raise HandrvError(
            f"{args.hand} holds {len(demos)} trajectories; pick one with --query-id"
        )
    return demos[0]


def _params_from_args(args, epsilon: float) -> RetrievalParams:
    return RetrievalParams(
        M=args.M,
        K=args.K,
        epsilon=epsilon,
        min_len=args.min_len,
        split_even=args.split_even,
        use_visual_filter=not args.no_visual_filter,
        distance_mode=args.distance_mode,
        weight_scope=args.weight_scope,
        seed=args.seed,
    )


def cmd_retrieve(args, parser) -> int:
    if not args.no_visual_filter and args.K > args.M:
        parser.error(f"--K {args.K} must not exceed --M {args.M} when filtering is on")
    play = trajdata.load_dataset(args.play)
    query = _load_query(args)
    epsilon = _resolve_epsilon(args, play)
    play_segments = []
    for traj in play:
        play_segments.extend(pathops.segment_kinematic(traj, epsilon, args.min_len))
    hand_segments = pathops.split_even(query, args.split_even, args.min_len)
    manifest = retrieve(
        hand_segments, play_segments, _params_from_args(args, epsilon), threads=args.threads
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trajdata.write_manifest(manifest, out / "manifest.json")
    print(f"wrote {len(manifest.matches)} matches to {out / 'manifest.json'}")
    return 0


def cmd_eval(args, parser) -> int:
    if not args.no_visual_filter and args.K > args.M:
        parser.error(f"--K {args.K} must not exceed --M {args.M} when filtering is on")
    play = trajdata.load_dataset(args.play)
    demos = trajdata.load_dataset(args.hand)
    labels, queries = synthbench.read_labels(args.labels)
    unknown = [d.id for d in demos if d.id not in queries]
    if unknown:
        raise HandrvError(f"demos without a query motif in labels: {unknown}")
    epsilon = _resolve_epsilon(args, play)
    segments = []
    for traj in play:
        segments.extend(pathops.segment_kinematic(traj, epsilon, args.min_len))
    cfg = BenchConfig(K=args.K, M=args.M, min_len=args.min_len, pause_eps=epsilon)
    query_pairs = [(queries[d.id], d) for d in demos]
    modes = []
    for mode in synthbench.MODES:
        t0 = time.perf_counter()
        precision = run_mode(mode, query_pairs, segments, labels, cfg, threads=args.threads)
        modes.append(
            {
                "name": mode,
                "precision_mean": precision,
                "precision_per_seed": [precision],
                "wallclock_s": round(time.perf_counter() - t0, 3),
            }
        )
    report = {
        "cfg": {
            "play": str(args.play),
            "hand": str(args.hand),
            "K": args.K,
            "M": args.M,
            "epsilon": float(epsilon),
            "min_len": args.min_len,
        },
        "seeds": [args.seed],
        "modes": modes,
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "bench-report.json"
    report_path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {report_path}")
    return 0


def cmd_bench(args, parser) -> int:
    seeds = [int(s) for s in args.seeds.split(",") if s.strip() != ""]
    kwargs = dict(
        tasks=args.tasks,
        per_task=args.per_task,
        motifs_per_traj=args.motifs_per_traj,
        sigma_p=args.sigma_p,
        sigma_e=args.sigma_e,
        M=args.M,
        K=args.K,
    )
    cfg = synthbench.confusable_config(**kwargs) if args.confusable else BenchConfig(**kwargs)
    report = compare_modes(cfg, seeds, threads=args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench-report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    write_bar_chart(
        {m["name"]: m["precision_mean"] for m in report["modes"]},
        f"precision@{cfg.K} over {len(seeds)} seeds",
        out / "bench-report.svg",
    )
    for m in report["modes"]:
        print(f"{m['name']:<10} precision@{cfg.K} = {m['precision_mean']:.3f} "
              f"({m['wallclock_s']:.1f}s)")
    print(f"wrote {out / 'bench-report.json'} and {out / 'bench-report.svg'}")
    return 0


def cmd_export_svg(args, parser) -> int:
    manifest = trajdata.read_manifest(args.manifest)
    play = {t.id: t for t in trajdata.load_dataset(args.play)}
    demos = {t.id: t for t in trajdata.load_dataset(args.hand)}
    if manifest.query_id not in demos:
        raise HandrvError(f"query {manifest.query_id!r} not found in {args.hand}")
    query = demos[manifest.query_id]
    if not manifest.matches:
        raise HandrvError("manifest has no matches to draw")
    first_span = (manifest.matches[0].query_start, manifest.matches[0].query_end)
    group = [
        m for m in manifest.matches if (m.query_start, m.query_end) == first_span
    ][: args.top]
    query_deltas = np.diff(query.track[first_span[0]: first_span[1]], axis=0)
    overlays = []
    for m in group:
        if m.traj_id not in play:
            raise HandrvError(f"matched trajectory {m.traj_id!r} not found in {args.play}")
        track = play[m.traj_id].track[m.match_start: m.match_end]
        overlays.append((f"{m.traj_id}[{m.match_start}:{m.match_end}]", np.diff(track, axis=0)))
    write_path_overlay(query_deltas, overlays, args.out,
                       title=f"{manifest.query_id}: top {len(overlays)} matched spans")
    print(f"wrote {args.out}")
    return 0


def dispatch(argv=None) -> int:
    """Parse argv and run the selected subcommand, returning the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, parser)
    except SystemExit as exc:  # parser.error inside a command
        return int(exc.code or 0)
    except (HandrvError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
