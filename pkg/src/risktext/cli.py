"""Command line entry points.

Subcommands: ``run`` executes a config and writes an artifact, ``sweep``
re-runs it across one parameter, ``serve`` starts the tagging service,
``synth`` writes a synthetic corpus to play with.
"""

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from .errors import RiskTextError
from .pipeline import PipelineConfig, run_pipeline, sensitivity_sweep
from .validate import load_tags


def _load(args):
    cfg = PipelineConfig.from_yaml(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "out", None):
        cfg = replace(cfg, output_dir=str(Path(args.out).resolve()))
    tags = None
    if getattr(args, "tags", None):
        events = _doc_ids(cfg)
        tags = load_tags(args.tags, events)
    return cfg, tags


def _doc_ids(cfg):
    from .corpus import load_corpus

    return [e.event_id for e in load_corpus(cfg.corpus_path)]


def _cmd_run(args) -> int:
    cfg, tags = _load(args)
    artifact = run_pipeline(cfg, tags=tags)
    print(f"{artifact.n_docs} documents, {artifact.n_terms} terms "
          f"({artifact.weighting})")
    for label, result in artifact.results.items():
        line = f"{label}: k={result.k} objective={result.objective:.6g}"
        report = artifact.validation[label]
        if report.accuracy is not None:
            line += f" accuracy={report.accuracy:.4f}"
        if report.silhouette_index is not None:
            line += f" silhouette={report.silhouette_index:.4f}"
        print(line)
    if cfg.output_dir:
        print(f"artifact written to {cfg.output_dir}")
    return 0


def _cmd_sweep(args) -> int:
    cfg, tags = _load(args)
    if tags is None:
        print("sweep requires --tags", file=sys.stderr)
        return 2
    values = [float(v) for v in args.values.split(",") if v.strip()]
    rows = sensitivity_sweep(cfg, args.param, values, tags)
    print(f"{args.param},accuracy")
    for value, acc in rows:
        print(f"{value},{acc:.6f}")
    if getattr(args, "out", None):
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "sweep.csv", "w", newline="",
                  encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([args.param, "accuracy"])
            writer.writerows(rows)
        print(f"sweep written to {out / 'sweep.csv'}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    serve(args.sessions, host=args.host, port=args.port,
          static_dir=args.static)
    return 0


def _cmd_synth(args) -> int:
    from .synth import generate_corpus, write_corpus

    corpus = generate_corpus(n_docs=args.docs, seed=args.seed or 7)
    paths = write_corpus(corpus, args.out)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risktext",
        description="text clustering workbench for loss descriptions")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a pipeline config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--tags", help="event_id,tag CSV for accuracy")
    p_run.add_argument("--out", help="override the config output_dir")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="accuracy across one parameter")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True,
                         choices=("threshold", "alpha"))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated parameter values")
    p_sweep.add_argument("--tags", required=True)
    p_sweep.add_argument("--out", help="also write sweep.csv here")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_serve = sub.add_parser("serve", help="start the tagging service")
    p_serve.add_argument("--sessions", required=True,
                         help="directory for session event logs")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--static", help="directory of UI assets to serve")
    p_serve.set_defaults(func=_cmd_serve)

    p_synth = sub.add_parser("synth", help="write a synthetic corpus")
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--docs", type=int, default=300)
    p_synth.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RiskTextError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
