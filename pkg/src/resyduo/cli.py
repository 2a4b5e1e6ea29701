"""Command-line entry point.

One verb per pipeline stage: ingest, synth, build, train, grid-search,
evaluate, recommend, serve. Results go to stdout (machine-readable under
--format json|csv), diagnostics to stderr. Exit codes: 0 success,
1 usage error, 2 data error, 3 internal error.

Every file output is written atomically; report-style outputs also render
a PNG figure next to the delimited file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from dataclasses import asdict

from .corpus import generate_synthetic_corpus, load_corpus, serialize_corpus
from .engine import KnnConfig, build_similarity_model
from .errors import ResyduoError
from .evaluation import cross_validate, report_to_csv, report_to_json
from .matrix import RatingMatrix
from .persistence import load_model, save_model, write_text_atomic
from .projections import CutoffConfig, apply_cutoff, build_projection
from .service import (
    ModelBundle,
    create_app,
    recommend_type1,
    recommend_type2,
    recommend_type3,
)
from .store import ProjectStore
from .tuning import GridSpec, grid_search, scoreboard_to_csv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_cutoff_flags(p):
    p.add_argument("--v-cutoff", type=int, default=1, help="minimum column occurrences")
    p.add_argument("--h-cutoff", type=int, default=1, help="minimum row occurrences")
    p.add_argument("--fixpoint", action="store_true", help="alternate cut-off passes until stable")


def _add_knn_flags(p):
    p.add_argument("--sim", choices=("msd", "cosine", "pearson"), default="msd")
    p.add_argument("--mode", choices=("user", "item"), default="user")
    p.add_argument("--min-support", type=int, default=1)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--positive-only", action="store_true",
                   help="train on positive ratings only (ignore explicit zeros)")


def _add_eval_flags(p):
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--n", type=int, default=5, help="recommendation list length")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="resyduo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("ingest", parents=[], help="validate a corpus file and report stats")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", help="write the normalized corpus here")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p.add_argument("--projects", type=int, default=200)
    p.add_argument("--tags", type=int, default=40)
    p.add_argument("--components", type=int, default=40)
    p.add_argument("--libraries", type=int, default=30)
    p.add_argument("--blocks", type=int, default=4)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("build", help="project a corpus to a rating matrix")
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", choices=("T", "P", "L"), required=True)
    _add_cutoff_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("train", help="train a similarity model on a matrix")
    p.add_argument("--matrix", required=True)
    _add_knn_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("grid-search", help="sweep the full hyperparameter grid")
    p.add_argument("--matrix", required=True)
    _add_cutoff_flags(p)
    _add_eval_flags(p)
    p.add_argument("--criterion", choices=("rmse", "mae", "precision"), default="rmse")
    p.add_argument("--out", help="write the scoreboard CSV (and figure) here")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.set_defaults(func=cmd_grid_search)

    p = sub.add_parser("evaluate", help="cross-validate one configuration")
    p.add_argument("--matrix", required=True)
    _add_cutoff_flags(p)
    _add_knn_flags(p)
    _add_eval_flags(p)
    p.add_argument("--out", help="write the report (and figure) here")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("recommend", help="ad-hoc recommendations from a trained model")
    p.add_argument("--matrix", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--kind", choices=("T", "P", "L"), required=True)
    p.add_argument("--keys", required=True,
                   help="comma-separated tags (T) or component ids (P, L)")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--force", action="store_true", help="ignore a stale-model hash mismatch")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("serve", help="run the recommendation service")
    p.add_argument("--data-dir", required=True,
                   help="directory holding <kind>.mtx / <kind>.model files")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="directory of UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def _emit(args, payload, text_lines):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    elif args.format == "csv":
        keys = sorted(payload)
        print(",".join(keys))
        print(",".join(str(payload[k]) for k in keys))
    else:
        for line in text_lines:
            print(line)


def cmd_ingest(args):
    corpus = load_corpus(args.corpus)
    tags = {t for p in corpus.projects for t in p.tags}
    comps = {c.id for p in corpus.projects for c in p.components}
    libs = {l for p in corpus.projects for l in p.libraries}
    if args.out:
        write_text_atomic(args.out, serialize_corpus(corpus))
    stats = {
        "projects": len(corpus.projects),
        "tags": len(tags),
        "components": len(comps),
        "libraries": len(libs),
    }
    _emit(args, stats, [f"{k}: {v}" for k, v in stats.items()])
    return 0


def cmd_synth(args):
    corpus = generate_synthetic_corpus(
        n_projects=args.projects,
        n_tags=args.tags,
        n_components=args.components,
        n_libraries=args.libraries,
        block_count=args.blocks,
        noise=args.noise,
        seed=args.seed,
    )
    write_text_atomic(args.out, serialize_corpus(corpus))
    payload = {"projects": len(corpus.projects), "out": args.out, "seed": args.seed}
    _emit(args, payload, [f"wrote {len(corpus.projects)} projects to {args.out}"])
    return 0


def cmd_build(args):
    corpus = load_corpus(args.corpus)
    matrix = build_projection(corpus, args.kind)
    cfg = CutoffConfig(v=args.v_cutoff, h=args.h_cutoff, fixpoint=args.fixpoint)
    matrix = apply_cutoff(matrix, cfg)
    write_text_atomic(args.out, matrix.to_text())
    payload = {
        "kind": args.kind,
        "rows": matrix.n_rows,
        "cols": matrix.n_cols,
        "out": args.out,
    }
    _emit(args, payload,
          [f"{args.kind}: {matrix.n_rows} x {matrix.n_cols} -> {args.out}"])
    return 0


def _knn_config(args):
    return KnnConfig(
        similarity=args.sim,
        mode=args.mode,
        min_support=args.min_support,
        k=args.k,
        positive_only=args.positive_only,
    )


def cmd_train(args):
    matrix = RatingMatrix.load(args.matrix)
    model = build_similarity_model(matrix, _knn_config(args))
    save_model(model, args.out)
    payload = dict(asdict(model.config), axis=len(model.axis_labels), out=args.out)
    _emit(args, payload,
          [f"trained {model.config.similarity}/{model.config.mode} over "
           f"{len(model.axis_labels)} axis labels -> {args.out}"])
    return 0


def _figure_path(out, suffix):
    return os.path.splitext(out)[0] + suffix


def cmd_grid_search(args):
    matrix = RatingMatrix.load(args.matrix)
    cutoff = CutoffConfig(v=args.v_cutoff, h=args.h_cutoff, fixpoint=args.fixpoint)
    result = grid_search(
        matrix,
        GridSpec(),
        cutoff,
        k_folds=args.folds,
        n=args.n,
        seed=args.seed,
        criterion=args.criterion,
    )
    csv_text = scoreboard_to_csv(result)
    if args.out:
        write_text_atomic(args.out, csv_text)
        from .report import save_figure, scoreboard_figure

        save_figure(scoreboard_figure(result), _figure_path(args.out, "_scores.png"))
    best = dict(asdict(result.best), criterion=result.criterion, score=result.best_score())
    best.pop("positive_only", None)
    if args.format == "csv":
        sys.stdout.write(csv_text)
    elif args.format == "json":
        print(json.dumps(best, sort_keys=True))
    else:
        print(
            f"best: {result.best.similarity}/{result.best.mode} "
            f"min_support={result.best.min_support} k={result.best.k} "
            f"{result.criterion}={result.best_score()!r}"
        )
        if args.out:
            print(f"scoreboard -> {args.out}")
    return 0


def cmd_evaluate(args):
    matrix = RatingMatrix.load(args.matrix)
    cutoff = CutoffConfig(v=args.v_cutoff, h=args.h_cutoff, fixpoint=args.fixpoint)
    tag = os.path.splitext(os.path.basename(args.matrix))[0]
    report = cross_validate(
        matrix,
        _knn_config(args),
        cutoff,
        k=args.folds,
        n=args.n,
        seed=args.seed,
        dataset_tag=tag,
    )
    if args.out:
        text = report_to_json(report) if args.out.endswith(".json") else report_to_csv(report)
        write_text_atomic(args.out, text)
        from .report import fold_metrics_figure, save_figure

        save_figure(fold_metrics_figure(report), _figure_path(args.out, "_metrics.png"))
    acc, rank = report.averages
    if args.format == "csv":
        sys.stdout.write(report_to_csv(report))
    elif args.format == "json":
        sys.stdout.write(report_to_json(report))
    else:
        print(
            f"avg over {report.folds} folds: precision={acc.precision:.4f} "
            f"recall={acc.recall:.4f} success_rate={acc.success_rate:.4f} "
            f"mae={rank.mae:.4f} rmse={rank.rmse:.4f}"
        )
        if args.out:
            print(f"report -> {args.out}")
    return 0


def cmd_recommend(args):
    matrix = RatingMatrix.load(args.matrix)
    model = load_model(args.model, matrix, force=args.force)
    keys = [k for k in (s.strip() for s in args.keys.split(",")) if k]
    if not keys:
        raise ValueError("--keys must name at least one tag or component id")
    if args.kind == "T":
        recs = recommend_type1(model, keys, args.n)
    elif args.kind == "P":
        recs = recommend_type2(model, keys, args.n)
    else:
        recs = recommend_type3(model, keys, args.n)
    if args.format == "json":
        print(json.dumps(
            {"items": [{"id": c, "score": s} for c, s in recs.entries]}, sort_keys=True
        ))
    elif args.format == "csv":
        print("id,score")
        for c, s in recs.entries:
            print(f"{c},{s!r}")
    else:
        for c, s in recs.entries:
            print(f"{c}\t{s:.6f}")
    return 0


def cmd_serve(args):
    bundle = ModelBundle()
    vocabulary = None
    for kind in ("T", "P", "L"):
        mtx_path = os.path.join(args.data_dir, f"{kind}.mtx")
        model_path = os.path.join(args.data_dir, f"{kind}.model")
        if os.path.exists(mtx_path) and os.path.exists(model_path):
            matrix = RatingMatrix.load(mtx_path)
            setattr(bundle, kind, load_model(model_path, matrix))
            print(f"loaded {kind} model ({matrix.n_rows} x {matrix.n_cols})", file=sys.stderr)
    if bundle.P is not None:
        vocabulary = set(bundle.P.training_matrix.col_labels)
    corpus_path = os.path.join(args.data_dir, "corpus.json")
    if os.path.exists(corpus_path):
        corpus = load_corpus(corpus_path)
        bundle.component_names = {
            c.id: c.name for p in corpus.projects for c in p.components
        }
    store = ProjectStore(os.path.join(args.data_dir, "projects.json"), vocabulary)
    static = args.static or os.path.join(args.data_dir, "ui")
    app = create_app(bundle, store, static_dir=static)

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ResyduoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
