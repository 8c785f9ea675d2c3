"""Command-line entry points.

    streamguard ingest  --input export.csv --output binary.csv [--balance]
    streamguard synth   --output corpus.csv --n 2000 --seed 7
    streamguard run     --input corpus.csv --scenario 1 --model arfc ...
    streamguard serve   --snapshot model.snap --port 8787

`run` performs the full prequential evaluation: cold start (optionally a
grid search), importance-based selection, then test-then-train over the
rest of the stream. The metrics summary prints both the full-stream and
the post-cold-start numbers.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from streamguard.events import EventLog
from streamguard.metrics import MetricsSnapshot
from streamguard.pipeline import (
    PipelineConfig,
    posts_from_csv,
    posts_to_csv,
    run_stream,
)
from streamguard.snapshot import load_bundle, save_bundle
from streamguard.synth import make_synthetic_stream

BINARY_ABSENT = "not_cyberbullying"


def _metrics_block(title: str, snap: MetricsSnapshot) -> str:
    def row(name, values):
        return (
            f"  {name:<9s} macro={values['macro']*100:6.2f}  "
            f"absent={values['absent']*100:6.2f}  "
            f"present={values['present']*100:6.2f}"
        )

    lines = [
        f"[{title}] samples={snap.samples_seen}  accuracy={snap.accuracy*100:6.2f}",
        row("precision", snap.precision),
        row("recall", snap.recall),
        row("f1", snap.f1),
    ]
    return "\n".join(lines)


def _format_metrics(result) -> str:
    parts = [
        f"model={result.config.model} scenario={result.config.scenario} "
        f"seed={result.config.seed} cold_start={result.config.cold_start_size}",
        f"selected_params={json.dumps(result.report.selected, sort_keys=True)}",
        f"mask: version={result.mask.version} active={len(result.mask.active)}",
        _metrics_block("full-stream", result.metrics_full.snapshot()),
        _metrics_block("post-cold-start", result.metrics_stream.snapshot()),
    ]
    return "\n".join(parts) + "\n"


def cmd_ingest(args) -> int:
    """Map a multi-class dataset export to the binary text,label format."""
    rows = []
    with open(args.input, "r", encoding="utf-8", errors="replace", newline="") as fh:
        reader = csv.DictReader(fh)
        if args.text_col not in (reader.fieldnames or []):
            raise SystemExit(f"column {args.text_col!r} missing from {args.input}")
        for row in reader:
            text = (row.get(args.text_col) or "").strip()
            if not text:
                continue  # drop empty entries
            tag = (row.get(args.label_col) or "").strip().lower()
            label = "absent" if tag == BINARY_ABSENT else "present"
            rows.append((text, label))

    if args.balance:
        rng = np.random.default_rng(args.seed)
        absent = [r for r in rows if r[1] == "absent"]
        present = [r for r in rows if r[1] == "present"]
        keep = min(len(absent), len(present))
        absent = [absent[i] for i in rng.permutation(len(absent))[:keep]]
        present = [present[i] for i in rng.permutation(len(present))[:keep]]
        merged = absent + present
        rows = [merged[i] for i in rng.permutation(len(merged))]

    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["text", "label"])
        writer.writerows(rows)
    counts = {
        "absent": sum(1 for _, l in rows if l == "absent"),
        "present": sum(1 for _, l in rows if l == "present"),
    }
    print(f"wrote {len(rows)} rows to {args.output} ({counts})")
    return 0


def cmd_synth(args) -> int:
    posts = make_synthetic_stream(
        seed=args.seed, n=args.n, drift_at=args.drift_at, noise=args.noise
    )
    posts_to_csv(args.output, posts)
    print(f"wrote {len(posts)} synthetic posts to {args.output}")
    return 0


def cmd_run(args) -> int:
    config = PipelineConfig(
        scenario=args.scenario,
        cold_start_size=args.cold_start,
        model=args.model,
        params=json.loads(args.params) if args.params else None,
        grid_search=args.grid,
        seed=args.seed,
        llm=args.llm,
        llm_cache=args.llm_cache,
        llm_workers=args.workers,
    )
    posts = posts_from_csv(args.input, limit=args.limit)
    result = run_stream(config, posts)

    summary = _format_metrics(result)
    print(summary, end="")
    if args.metrics_out:
        with open(args.metrics_out, "w", encoding="utf-8") as fh:
            fh.write(summary)
    if args.log_out:
        with open(args.log_out, "w", encoding="utf-8") as fh:
            for row in result.log:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
    if args.mask_out:
        with open(args.mask_out, "w", encoding="utf-8") as fh:
            fh.write(result.mask.to_text())
    if args.grid_report_out:
        with open(args.grid_report_out, "w", encoding="utf-8") as fh:
            json.dump(result.report.as_dict(), fh, indent=2, sort_keys=True)
    if args.snapshot_out:
        from streamguard.service import bundle_from_pipeline

        save_bundle(args.snapshot_out, bundle_from_pipeline(config, result.pipeline))
        print(f"snapshot written to {args.snapshot_out}")
    return 0


def cmd_serve(args) -> int:
    from streamguard.pipeline import run_cold_start
    from streamguard.service import (
        ModerationService,
        bundle_from_cold,
        serve,
    )

    if args.snapshot:
        bundle = load_bundle(args.snapshot)
    elif args.bootstrap:
        config = PipelineConfig(
            scenario=args.scenario,
            cold_start_size=args.cold_start,
            model=args.model,
            seed=args.seed,
            llm=args.llm,
        )
        posts = posts_from_csv(args.bootstrap, limit=args.cold_start)
        cold = run_cold_start(config, posts)
        bundle = bundle_from_cold(config, cold)
    else:
        raise SystemExit("serve needs --snapshot or --bootstrap")

    service = ModerationService(
        bundle, llm=args.llm, event_log=EventLog(args.event_log),
        llm_cache=args.llm_cache,
    )
    server = serve(service, host=args.host, port=args.port, token=args.token)
    host, port = server.server_address[:2]
    print(f"moderation service listening on http://{host}:{port}/api/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamguard",
        description="stream-based cyberbullying moderation engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="map a dataset export to text,label CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--text-col", default="tweet_text")
    p.add_argument("--label-col", default="cyberbullying_type")
    p.add_argument("--balance", action="store_true",
                   help="undersample to the minority class size")
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate a synthetic labelled corpus")
    p.add_argument("--output", required=True)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--drift-at", type=int, default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="prequential evaluation over a CSV stream")
    p.add_argument("--input", required=True)
    p.add_argument("--scenario", type=int, choices=(1, 2), default=1)
    p.add_argument("--model", choices=("gnb", "hatc", "arfc"), default="arfc")
    p.add_argument("--cold-start", type=int, default=1500)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--llm", choices=("mock", "remote"), default="mock")
    p.add_argument("--llm-cache", default=None)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--metrics-out", default=None)
    p.add_argument("--log-out", default=None)
    p.add_argument("--mask-out", default=None)
    p.add_argument("--grid-report-out", default=None)
    p.add_argument("--snapshot-out", default=None)
    p.add_argument("--grid", action="store_true",
                   help="full hyperparameter grid search during cold start")
    p.add_argument("--params", default=None,
                   help="JSON object of fixed model hyperparameters")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="run the moderation HTTP service")
    p.add_argument("--snapshot", default=None)
    p.add_argument("--bootstrap", default=None,
                   help="labelled CSV used to cold-start a fresh model")
    p.add_argument("--scenario", type=int, choices=(1, 2), default=1)
    p.add_argument("--model", choices=("gnb", "hatc", "arfc"), default="arfc")
    p.add_argument("--cold-start", type=int, default=1500)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--llm", choices=("mock", "remote"), default="mock")
    p.add_argument("--llm-cache", default=None)
    p.add_argument("--event-log", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--token", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
