"""Command-line front end.

    multinode synth --out-dir bench --seed 7
    multinode rank --events bench/events.jsonl --out ranking.csv
    multinode eval --scores ranking.csv --labels bench/labels.csv

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

from . import evaluation as ev
from .graph import GraphError, UnscorableError, build_graph
from .ingest import ParseError, open_text_out, read_events, read_labels, write_events, write_labels
from .mcl import MclParams
from .scoring import ScoreParams, default_workers, score_many, score_node
from .synth import SynthConfig, generate

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

log = logging.getLogger("multinode")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_model_flags(p):
    p.add_argument("--tau", type=float, default=5.0, help="decay constant in time bins (default 5)")
    p.add_argument("--alpha", type=float, default=0.1, help="weight of the TM-score (default 0.1)")
    p.add_argument("--inflation", type=float, default=1.4, help="MCL inflation (default 1.4)")
    p.add_argument("--window", type=int, default=3, help="moving-average window, odd (default 3)")
    p.add_argument("--laplace", type=float, default=0.01, help="Laplace correction (default 0.01)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: $MULTINODE_THREADS or all cores)")


def _add_events_flags(p, nodes=True):
    p.add_argument("--events", required=True, help="event file (.jsonl or .csv, optionally .gz)")
    p.add_argument("--format", choices=("jsonl", "csv"), help="override format detection")
    p.add_argument("--lenient", action="store_true", help="skip malformed lines instead of failing")
    if nodes:
        p.add_argument("--nodes", help="file with one node id per line (default: all nodes)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="multinode", description="Score collaboration-graph nodes for entity merging.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("score", help="score one node and print it as JSON")
    _add_events_flags(p, nodes=False)
    p.add_argument("--node", required=True)
    p.add_argument("--centrality", action="store_true", help="include ego centrality features")
    _add_model_flags(p)

    p = sub.add_parser("rank", help="score nodes and write them by ascending s-score")
    _add_events_flags(p)
    p.add_argument("--out", help="output CSV (default stdout)")
    _add_model_flags(p)

    p = sub.add_parser("features", help="write the classifier feature matrix")
    _add_events_flags(p)
    p.add_argument("--labels", help="label CSV; adds a label column and defaults --nodes to labeled ids")
    p.add_argument("--out", help="output CSV (default stdout)")
    _add_model_flags(p)

    p = sub.add_parser("eval", help="AUC, precision@k and accuracy of a score file")
    p.add_argument("--scores", required=True, help="CSV with node_id and a score column")
    p.add_argument("--labels", required=True)
    p.add_argument("--column", default="s_score")
    p.add_argument("--threshold", type=float, default=0.5, help="accuracy threshold (default 0.5)")
    p.add_argument("--high-is-positive", action="store_true",
                   help="high scores mean multi-node (default: low scores do)")

    p = sub.add_parser("sweep", help="AUC over a tau x alpha grid")
    _add_events_flags(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--taus", type=_floats, default=[3.0, 5.0, 7.0, 10.0])
    p.add_argument("--alphas", type=_floats, default=[0.0, 0.1, 0.2, 0.5, 1.0])
    p.add_argument("--out", help="output CSV (default stdout)")
    _add_model_flags(p)

    p = sub.add_parser("synth", help="write a labeled synthetic benchmark")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-pure", type=int, default=25)
    p.add_argument("--n-multi", type=int, default=25)
    p.add_argument("--n-mobile", type=int, default=25)
    p.add_argument("--entities-per-multi", type=int, default=2)
    p.add_argument("--collaborators", type=int, default=15)
    p.add_argument("--intra-density", type=float, default=0.3)
    p.add_argument("--inter-noise", type=float, default=0.02)
    p.add_argument("--years", type=int, default=10)
    p.add_argument("--events-per-year", type=float, default=3.0)
    p.add_argument("--mobility-break", type=int, default=None)
    p.add_argument("--gzip", action="store_true", help="compress the event file")
    return parser


def _params(args) -> ScoreParams:
    try:
        return ScoreParams(alpha=args.alpha, tau=args.tau, laplace_eps=args.laplace,
                           smoothing_window=args.window, mcl=MclParams(inflation=args.inflation))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _workers(args) -> int:
    return args.threads if args.threads else default_workers()


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open_text_out(path) as fh:
            yield fh


def _load_graph(args):
    errors: list = []
    events = read_events(args.events, args.format, strict=not args.lenient, errors=errors)
    for err in errors:
        print(f"warning: {err}", file=sys.stderr)
    return build_graph(events)


def _node_list(args, g, labels=None) -> list:
    if getattr(args, "nodes", None):
        with open(args.nodes, encoding="utf-8") as fh:
            return [line.strip() for line in fh if line.strip()]
    if labels is not None:
        return [r.node_id for r in labels]
    return sorted(g.nodes)


def cmd_score(args) -> int:
    params = _params(args)
    g = _load_graph(args)
    rec = score_node(g, args.node, params, with_centrality=args.centrality)
    print(json.dumps(rec.as_dict(), sort_keys=True))
    return EXIT_OK


def cmd_rank(args) -> int:
    params = _params(args)
    g = _load_graph(args)
    records, skipped = score_many(g, _node_list(args, g), params, workers=_workers(args))
    if skipped:
        log.info("%d node(s) unscorable", len(skipped))
    with _output(args.out) as fh:
        ev.write_ranking(records, fh)
    return EXIT_OK


def cmd_features(args) -> int:
    params = _params(args)
    g = _load_graph(args)
    labels = read_labels(args.labels) if args.labels else None
    nodes = _node_list(args, g, labels)
    records, _ = score_many(g, nodes, params, with_centrality=True, workers=_workers(args))
    label_map = {r.node_id: r.label for r in labels} if labels is not None else None
    with _output(args.out) as fh:
        ev.export_features(records, fh, label_map)
    return EXIT_OK


def cmd_eval(args) -> int:
    with open(args.scores, encoding="utf-8") as fh:
        scores = ev.read_scores(fh, args.column)
    labels = read_labels(args.labels)
    ls = ev.join_labels(scores, labels)
    low = not args.high_is_positive
    print(f"n\t{len(ls)}")
    print(f"auc\t{ev.fmt_float(ev.auc(ls, low))}")
    for frac in (0.10, 0.15, 0.20):
        print(f"precision@{round(frac * 100)}%\t{ev.fmt_float(ev.precision_at(ls, frac, low))}")
    print(f"accuracy@{ev.fmt_float(args.threshold)}\t"
          f"{ev.fmt_float(ev.accuracy(ls, args.threshold, low))}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _params(args)
    g = _load_graph(args)
    labels = read_labels(args.labels)
    nodes = _node_list(args, g, labels)
    rows = ev.sweep(g, nodes, labels, args.taus, args.alphas, base, workers=_workers(args))
    with _output(args.out) as fh:
        ev.write_sweep(rows, fh)
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        cfg = SynthConfig(
            n_pure=args.n_pure, n_multi=args.n_multi, n_mobile=args.n_mobile,
            entities_per_multi=args.entities_per_multi,
            collaborators_per_entity=args.collaborators, intra_density=args.intra_density,
            inter_noise=args.inter_noise, years=args.years,
            events_per_year=args.events_per_year, mobility_break=args.mobility_break,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    events, labels = generate(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = "events.jsonl.gz" if args.gzip else "events.jsonl"
    with open_text_out(out / name) as fh:
        write_events(events, fh)
    with open_text_out(out / "labels.csv") as fh:
        write_labels(labels, fh)
    print(f"wrote {len(events)} events and {len(labels)} labels to {out}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "score": cmd_score,
    "rank": cmd_rank,
    "features": cmd_features,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"multinode {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnscorableError as exc:
        print(f"multinode {args.command}: unscorable: {exc.reason} (node {exc.node})", file=sys.stderr)
        return EXIT_DATA
    except (ParseError, GraphError, OSError, ValueError) as exc:
        print(f"multinode {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
