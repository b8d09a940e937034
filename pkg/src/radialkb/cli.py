"""Command-line entry point wrapping every pipeline stage.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal
error.  Errors also emit one machine-readable JSON line on stderr.  Every
artifact file starts with a header recording the tool version, the exact
command line, and the seed, so re-running the printed command reproduces
the artifact byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    ParseError,
    letter_frequencies,
    load_letter_frequencies,
    load_lexicon,
    load_phrases,
)
from .geometry import Posture, keyboard_to_dict, load_keyboard
from .partitions import layout_count, total_layout_count

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we own the exit codes
        raise UsageError(message)


def artifact_header(argv: list[str], seed: int | None) -> list[str]:
    return [
        f"tool_version={__version__}",
        f"command=radialkb {shlex.join(argv)}",
        f"seed={seed if seed is not None else '-'}",
    ]


def artifact_meta(argv: list[str], seed: int | None) -> dict:
    return {
        "tool_version": __version__,
        "command": f"radialkb {shlex.join(argv)}",
        "seed": seed if seed is not None else "-",
    }


def build_parser() -> _Parser:
    parser = _Parser(prog="radialkb", description=__doc__)
    parser.add_argument("--version", action="version", version=f"radialkb {__version__}")
    parser.add_argument(
        "--config", type=Path, default=None,
        help="JSON file providing default values for any flag (flags override)",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("lexicon-check", help="validate a lexicon TSV and print a summary")
    p.add_argument("lexicon", type=Path)

    p = sub.add_parser("enumerate", help="enumerate or count contiguous letter layouts")
    p.add_argument("--k", type=int, default=None, help="single group count")
    p.add_argument("--k-min", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--limit", type=int, default=20, help="layouts to print per k")

    p = sub.add_parser("disambiguate", help="score letter layouts against a lexicon")
    p.add_argument("--lexicon", type=Path, required=True)
    p.add_argument("--lexicon-top", type=int, default=None, help="truncate to N words")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--k-min", type=int, default=5)
    p.add_argument("--k-max", type=int, default=13)
    p.add_argument("--per-k", type=int, default=100)
    p.add_argument("--top-n", type=int, default=3)
    p.add_argument("--max-layouts", type=int, default=None,
                   help="cap the enumeration per k (desk-scale runs)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint", type=Path, default=None)
    p.add_argument("--checkpoint-every", type=int, default=100_000)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("cluster", help="fit tap clusters into key layouts per posture")
    p.add_argument("--taps", type=Path, required=True)
    p.add_argument("--posture", choices=["standing", "sitting", "both"], default="both")
    p.add_argument("--n-min", type=int, default=6)
    p.add_argument("--n-max", type=int, default=14)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, required=True)

    p = sub.add_parser("score", help="combine spatial and disambiguation scores")
    p.add_argument("--taps", type=Path, required=True)
    p.add_argument("--clusters-dir", type=Path, required=True)
    p.add_argument("--candidates", type=Path, required=True)
    p.add_argument("--lexicon", type=Path, required=True)
    p.add_argument("--letter-freqs", type=Path, default=None,
                   help="external 26-row table; default derives from the lexicon")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("select", help="pick the final keyboard from score records")
    p.add_argument("--records", type=Path, required=True)
    p.add_argument("--clusters-dir", type=Path, required=True)
    p.add_argument("--n-keys", type=int, default=None,
                   help="explicit key count (letters + space); default: knee policy")
    p.add_argument("--out-standing", type=Path, required=True)
    p.add_argument("--out-sitting", type=Path, required=True)

    p = sub.add_parser("decode", help="decode a key or position sequence")
    p.add_argument("--keyboard", type=Path, required=True)
    p.add_argument("--lexicon", type=Path, required=True)
    p.add_argument("--keys", type=str, default=None, help="comma-separated key indices")
    p.add_argument("--positions", type=str, default=None,
                   help="comma-separated normalized positions (Bayes mode)")
    p.add_argument("--spatial", type=Path, default=None)
    p.add_argument("--max-out", type=int, default=10)

    p = sub.add_parser("simulate", help="run the synthetic typist")
    p.add_argument("--spec", type=Path, default=None, help="JSON simulation spec")
    p.add_argument("--keyboard", type=Path, default=None)
    p.add_argument("--lexicon", type=Path, default=None)
    p.add_argument("--phrases", type=Path, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--seeds", type=str, default=None)
    p.add_argument("--inter-tap-ms", type=float, default=None)
    p.add_argument("--jitter-ms", type=float, default=None)
    p.add_argument("--correction", choices=["never", "always"], default=None)
    p.add_argument("--decode", dest="decode_mode", choices=["exact", "bayes"], default=None)
    p.add_argument("--out-dir", type=Path, required=False, default=None)

    p = sub.add_parser("metrics", help="compute metrics from an event or frame log")
    p.add_argument("--log", type=Path, default=None, help="session event log (JSON lines)")
    p.add_argument("--frames", type=Path, default=None, help="raw sensor frame log to replay")
    p.add_argument("--keyboard", type=Path, default=None)
    p.add_argument("--lexicon", type=Path, default=None)
    p.add_argument("--phrases", type=Path, default=None)
    p.add_argument("--strategy", default="upstand")
    p.add_argument("--calibration", type=str, default=None,
                   help="far_left,rest,far_right degrees for frame replay")
    p.add_argument("--json", dest="as_json", action="store_true")

    p = sub.add_parser("serve", help="run the live session service")
    p.add_argument("--host", default=os.environ.get("RADIALKB_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("RADIALKB_PORT", "8765")))
    p.add_argument("--ws-port", type=int,
                   default=int(os.environ["RADIALKB_WS_PORT"])
                   if "RADIALKB_WS_PORT" in os.environ else None)
    p.add_argument("--keyboard", type=Path, default=None)
    p.add_argument("--lexicon", type=Path, default=None)
    p.add_argument("--phrases", type=Path, default=None)
    p.add_argument("--page-size", type=int, default=5)
    p.add_argument("--decode", dest="decode_mode", choices=["exact", "bayes"], default="exact")
    p.add_argument("--log-dir", type=Path, default=None)
    p.add_argument("--static-dir", type=Path, default=None,
                   help="serve this directory over HTTP for the companion app")
    p.add_argument("--http-port", type=int, default=8080)

    return parser


def _apply_config(parser: _Parser, argv: list[str]) -> None:
    if "--config" not in argv:
        return
    path = Path(argv[argv.index("--config") + 1])
    values = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(values, dict):
        raise UsageError("config file must hold a JSON object")
    for action in parser._subparsers._group_actions[0].choices.values():  # type: ignore[union-attr]
        dests = {a.dest for a in action._actions}
        action.set_defaults(**{k: v for k, v in values.items() if k in dests})
    parser.set_defaults(**{k: v for k, v in values.items()
                           if k in {a.dest for a in parser._actions}})


def _data_path(name: str) -> Path:
    import importlib.resources as resources

    return Path(str(resources.files("radialkb") / "data" / name))


def cmd_lexicon_check(args, argv) -> int:
    lexicon = load_lexicon(args.lexicon)
    freqs = letter_frequencies(lexicon)
    top = ", ".join(e.word for e in lexicon.entries[:5])
    print(f"{len(lexicon)} words; top: {top}")
    common = max(freqs.f, key=freqs.f.get)
    print(f"most frequent letter: {common} ({freqs[common]:.4f})")
    return EXIT_OK


def cmd_enumerate(args, argv) -> int:
    if args.k is not None:
        k_min = k_max = args.k
    elif args.k_min is not None and args.k_max is not None:
        k_min, k_max = args.k_min, args.k_max
    else:
        raise UsageError("give --k or both --k-min and --k-max")
    if args.count_only:
        print(total_layout_count(k_min, k_max))
        return EXIT_OK
    from .partitions import enumerate_letter_layouts

    for k in range(k_min, k_max + 1):
        print(f"# k={k} count={layout_count(k)}")
        for index, layout in enumerate_letter_layouts(k, 0, args.limit):
            print(f"{k}\t{index}\t{'|'.join(layout.groups)}")
    return EXIT_OK


def cmd_disambiguate(args, argv) -> int:
    from .disambiguation import (
        parallel_top_layout_candidates,
        run_sweep,
        top_layout_candidates,
        write_candidates,
    )

    lexicon = load_lexicon(args.lexicon)
    if args.lexicon_top:
        lexicon = lexicon.top(args.lexicon_top)
    if args.k is not None:
        k_range = (args.k, args.k)
    else:
        k_range = (args.k_min, args.k_max)
    if args.checkpoint is not None:
        candidates = run_sweep(
            lexicon, args.checkpoint, k_range=k_range, per_k=args.per_k,
            top_n=args.top_n, checkpoint_every=args.checkpoint_every,
            resume=args.resume,
            progress=lambda k, i, n: print(f"k={k}: {i}/{n}", file=sys.stderr),
        )
    elif args.workers > 1:
        candidates = parallel_top_layout_candidates(
            lexicon, k_range=k_range, per_k=args.per_k, top_n=args.top_n,
            workers=args.workers, max_layouts_per_k=args.max_layouts,
        )
    else:
        candidates = top_layout_candidates(
            lexicon, k_range=k_range, per_k=args.per_k, top_n=args.top_n,
            max_layouts_per_k=args.max_layouts,
        )
    with open(args.out, "w", encoding="utf-8") as fh:
        write_candidates(candidates, fh, artifact_header(argv, None))
    total = sum(len(v) for v in candidates.values())
    print(f"wrote {total} candidates to {args.out}")
    return EXIT_OK


def cmd_cluster(args, argv) -> int:
    from .clusters import fit_cluster_layouts, load_taps, save_cluster_layout

    taps = load_taps(args.taps)
    postures = (
        [Posture.STANDING, Posture.SITTING]
        if args.posture == "both"
        else [Posture(args.posture)]
    )
    args.out_dir.mkdir(parents=True, exist_ok=True)
    meta = artifact_meta(argv, args.seed)
    for posture in postures:
        layouts = fit_cluster_layouts(
            taps, posture, n_keys_range=(args.n_min, args.n_max), seed=args.seed
        )
        for n, layout in layouts.items():
            path = args.out_dir / f"clusters_{posture.value}_{n}.json"
            save_cluster_layout(layout, path, meta=meta)
            print(f"wrote {path}")
    return EXIT_OK


def _load_cluster_pairs(clusters_dir: Path) -> dict[int, tuple]:
    from .clusters import load_cluster_layout

    pairs: dict[int, dict[str, object]] = {}
    for path in sorted(clusters_dir.glob("clusters_*_*.json")):
        layout = load_cluster_layout(path)
        pairs.setdefault(layout.n_keys, {})[layout.posture.value] = layout
    out = {}
    for n, sides in pairs.items():
        if "standing" in sides and "sitting" in sides:
            out[n - 1] = (sides["standing"], sides["sitting"])
    if not out:
        raise ValueError(f"no posture-complete cluster layouts in {clusters_dir}")
    return out


def cmd_score(args, argv) -> int:
    from .clusters import load_taps
    from .disambiguation import read_candidates
    from .scoring import joint_and_final_scores, write_score_records

    lexicon = load_lexicon(args.lexicon)
    freqs = (
        load_letter_frequencies(args.letter_freqs)
        if args.letter_freqs
        else letter_frequencies(lexicon)
    )
    taps = load_taps(args.taps)
    taps_stand = [t for t in taps if t.posture == Posture.STANDING]
    taps_sit = [t for t in taps if t.posture == Posture.SITTING]
    cluster_pairs = _load_cluster_pairs(args.clusters_dir)
    candidates = read_candidates(args.candidates)
    usable = {k: v for k, v in candidates.items() if k in cluster_pairs}
    records, summaries = joint_and_final_scores(
        cluster_pairs, usable, taps_stand, taps_sit, freqs
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        write_score_records(records, fh, artifact_header(argv, None))
    for k in sorted(summaries):
        s = summaries[k]
        print(
            f"k={k}: top10 F={s.mean_final:.4f} L={s.mean_disambiguation:.4f} "
            f"S_joint={s.mean_s_joint:.4f}"
        )
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def cmd_select(args, argv) -> int:
    from .scoring import read_score_records, select_keyboard

    records = read_score_records(args.records)
    cluster_pairs = _load_cluster_pairs(args.clusters_dir)
    stand, sit, winner = select_keyboard(records, cluster_pairs, n_keys=args.n_keys)
    meta = artifact_meta(argv, None)
    for kb, path in ((stand, args.out_standing), (sit, args.out_sitting)):
        doc = {"meta": meta, **keyboard_to_dict(kb)}
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")
    print(
        f"selected k={winner.k} j={winner.j} "
        f"L={winner.disambiguation:.4f} F={winner.final_score:.4f}"
    )
    return EXIT_OK


def cmd_decode(args, argv) -> int:
    from .decoder import SpatialModel, decode_bayes, decode_exact, load_spatial_model

    kb = load_keyboard(args.keyboard)
    lexicon = load_lexicon(args.lexicon)
    if (args.keys is None) == (args.positions is None):
        raise UsageError("give exactly one of --keys or --positions")
    if args.keys is not None:
        seq = [int(v) for v in args.keys.split(",")]
        result = decode_exact(seq, kb, lexicon, max_out=args.max_out)
    else:
        seq = [float(v) for v in args.positions.split(",")]
        spatial = (
            load_spatial_model(args.spatial)
            if args.spatial
            else SpatialModel.from_keyboard(kb)
        )
        result = decode_bayes(seq, kb, spatial, lexicon, max_out=args.max_out)
    for word, score in result.entries:
        print(f"{word}\t{score!r}")
    return EXIT_OK


def cmd_simulate(args, argv) -> int:
    from dataclasses import replace as dc_replace

    from .decoder import SpatialModel
    from .gestures import StrategyConfig
    from .session import Mode, SessionConfig, write_event_log
    from .simulator import TypistModel, simulate_session

    spec = {}
    if args.spec:
        spec = json.loads(args.spec.read_text(encoding="utf-8"))

    def setting(name, flag_value, default=None):
        return flag_value if flag_value not in (None, "") else spec.get(name, default)

    keyboard_path = setting("keyboard", args.keyboard)
    lexicon_path = setting("lexicon", args.lexicon)
    phrases_path = setting("phrases", args.phrases)
    if not (keyboard_path and lexicon_path and phrases_path):
        raise UsageError("need keyboard, lexicon, and phrases (flags or spec file)")
    kb = load_keyboard(keyboard_path)
    lexicon = load_lexicon(lexicon_path)
    phrases = load_phrases(phrases_path)
    sigma = setting("sigma", args.sigma)
    seeds = [int(s) for s in str(setting("seeds", args.seeds, "0")).split(",")]
    out_dir = setting("out_dir", args.out_dir)

    spatial = SpatialModel.from_keyboard(kb)
    if sigma is not None:
        spatial = dc_replace(spatial, sigmas=(float(sigma),) * len(spatial.sigmas))
    decode_mode = setting("decode_mode", args.decode_mode, "exact") or "exact"
    config = SessionConfig(
        mode=Mode.VISUAL,
        strategy=StrategyConfig.upstand(),
        posture=kb.posture,
        keyboard=kb,
        phrases=phrases,
        lexicon=lexicon,
        decode_mode=decode_mode,
        spatial=spatial if decode_mode == "bayes" else None,
    )
    print("seed\twpm\tter\tncer\tforced")
    for seed in seeds:
        typist = TypistModel(
            spatial=spatial,
            inter_tap_ms=float(setting("inter_tap_ms", args.inter_tap_ms, 300.0) or 300.0),
            jitter_ms=float(setting("jitter_ms", args.jitter_ms, 0.0) or 0.0),
            correction_policy=setting("correction_policy", args.correction, "never") or "never",
            seed=seed,
        )
        result = simulate_session(typist, config)
        m = result.metrics
        print(f"{seed}\t{m.wpm:.2f}\t{m.ter:.4f}\t{m.ncer:.4f}\t{len(result.forced_commits)}")
        if out_dir:
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            log_path = out_dir / f"sim_seed{seed}.jsonl"
            with open(log_path, "w", encoding="utf-8") as fh:
                for line in artifact_header(argv, seed):
                    fh.write(f"# {line}\n")
                write_event_log(result.log, fh)
    return EXIT_OK


def cmd_metrics(args, argv) -> int:
    from .metrics import compute_metrics

    if (args.log is None) == (args.frames is None):
        raise UsageError("give exactly one of --log or --frames")
    if args.log is not None:
        from .session import read_event_log

        records = [
            r for r in read_event_log(args.log) if isinstance(r, dict)
        ]
    else:
        if not (args.keyboard and args.lexicon and args.phrases and args.calibration):
            raise UsageError(
                "frame replay needs --keyboard, --lexicon, --phrases, --calibration"
            )
        from .geometry import CalibrationProfile
        from .gestures import GestureStateMachine, StrategyConfig, read_frame_log
        from .session import Mode, Session, SessionConfig

        kb = load_keyboard(args.keyboard)
        left, rest, right = (float(v) for v in args.calibration.split(","))
        cal = CalibrationProfile(kb.posture, left, rest, right)
        strategy = StrategyConfig.named(args.strategy)
        config = SessionConfig(
            mode=Mode.VISUAL,
            strategy=strategy,
            posture=kb.posture,
            keyboard=kb,
            phrases=load_phrases(args.phrases),
            lexicon=load_lexicon(args.lexicon),
        )
        session = Session(config)
        machine = GestureStateMachine(strategy, cal)
        last_ts = 0
        for frame in read_frame_log(args.frames):
            last_ts = frame.timestamp_ms
            for event in machine.process_frame(frame):
                session.apply_event(event)
        session.finish(last_ts)
        records = session.log
    report = compute_metrics(records)
    if args.as_json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(report.summary_table())
        print(f"cheat sheet requests: {report.cheat_sheet_requests}")
    return EXIT_OK


def cmd_serve(args, argv) -> int:
    import asyncio

    from .geometry import Keyboard, LetterLayout, uniform_cluster_layout
    from .service import ServiceDefaults, run_service

    if args.keyboard:
        kb = load_keyboard(args.keyboard)
    else:
        # demo keyboard: nine uniform keys, evenly split alphabet
        groups = ("abcd", "efgh", "ijk", "lmn", "opq", "rst", "uvw", "xyz")
        kb = Keyboard(
            cluster_layout=uniform_cluster_layout(9),
            letter_layout=LetterLayout(groups),
        )
    lexicon = load_lexicon(args.lexicon or _data_path("lexicon_small.tsv"))
    phrases = load_phrases(args.phrases or _data_path("phrases_demo.txt"))
    defaults = ServiceDefaults(
        keyboard=kb, lexicon=lexicon, phrases=phrases,
        page_size=args.page_size, decode_mode=args.decode_mode,
    )
    if args.static_dir:
        import functools
        import http.server
        import threading

        handler = functools.partial(
            http.server.SimpleHTTPRequestHandler, directory=str(args.static_dir)
        )
        httpd = http.server.ThreadingHTTPServer((args.host, args.http_port), handler)
        threading.Thread(target=httpd.serve_forever, daemon=True).start()
        print(f"static app on http://{args.host}:{args.http_port}/")
    print(f"service on tcp://{args.host}:{args.port}"
          + (f" and ws://{args.host}:{args.ws_port}" if args.ws_port else ""))
    asyncio.run(
        run_service(
            defaults, host=args.host, port=args.port,
            ws_port=args.ws_port, log_dir=args.log_dir,
        )
    )
    return EXIT_OK


COMMANDS = {
    "lexicon-check": cmd_lexicon_check,
    "enumerate": cmd_enumerate,
    "disambiguate": cmd_disambiguate,
    "cluster": cmd_cluster,
    "score": cmd_score,
    "select": cmd_select,
    "decode": cmd_decode,
    "simulate": cmd_simulate,
    "metrics": cmd_metrics,
    "serve": cmd_serve,
}


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("no command given (see --help)")
        return COMMANDS[args.command](args, argv)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return EXIT_DATA
    except KeyboardInterrupt:
        return EXIT_OK
    except Exception as exc:  # pragma: no cover - defensive
        print(
            json.dumps({"error": "internal", "message": f"{type(exc).__name__}: {exc}"}),
            file=sys.stderr,
        )
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run(sys.argv[1:]))
