"""Command-line driver: extract-names, extract-plans, train, evaluate,
serve, export. Exit codes: 0 ok, 1 user error, 2 internal error."""

from __future__ import annotations

import argparse
import sys

from .corpus import CorpusError
from .maxent import (
    MaxEntError,
    Model,
    TrainConfig,
    information_gain,
    loo_evaluate,
    train,
)
from .ontology import OntologyError, load_ontology
from .pipeline import (
    PipelineError,
    RunConfig,
    read_feature_dump,
    resolve_names,
    run_extract_names,
    run_extract_plans,
    write_feature_dump,
)
from .ranking import ranking_metrics
from .realize import RealizeError
from .store import Bundle, BundleError, load_bundle, save_bundle

USER_ERRORS = (
    PipelineError, OntologyError, CorpusError, BundleError, MaxEntError,
    RealizeError, FileNotFoundError, ValueError,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nameplan",
        description="Induce entity names and sentence plans from an ontology "
                    "and an annotated corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--ontology", required=True, help="ontology file")
        p.add_argument("--corpus", required=True, help="corpus manifest file")
        p.add_argument("--max-docs", type=int, default=10,
                       help="top documents kept per query (default 10)")
        p.add_argument("--seed", type=int, default=0, help="tie-break seed")

    p = sub.add_parser("extract-names", help="rank candidate names per entity")
    add_common(p)
    p.add_argument("--out", required=True, help="bundle file to write")
    p.add_argument("--top-k", type=int, default=5,
                   help="candidates kept per entity (default 5)")

    p = sub.add_parser("extract-plans", help="rank candidate sentence plans per relation")
    add_common(p)
    p.add_argument("--out", required=True, help="bundle file to write")
    p.add_argument("--bundle", help="existing bundle with name candidates/selections")
    p.add_argument("--names", choices=("manual", "selected", "top1"), default="top1",
                   help="where seed names come from (default top1)")
    p.add_argument("--manual-names", help="manual names file (for --names manual)")
    p.add_argument("--model", help="trained classifier file (default: uniform)")
    p.add_argument("--method", choices=("sp", "boot"), default="sp")
    p.add_argument("--threshold", type=float, default=0.1,
                   help="anchor-match similarity threshold (default 0.1)")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--boot-target", type=int, default=150,
                   help="template count that stops bootstrapping (default 150)")
    p.add_argument("--relax-min-sentences", action="store_true",
                   help="keep templates seen in a single sentence")
    p.add_argument("--features-out", help="also dump candidate feature vectors (TSV)")

    p = sub.add_parser("train", help="train the plan classifier on a labeled feature dump")
    p.add_argument("--data", required=True, help="labeled feature dump (TSV)")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--report-dir", help="write LOO/IG reports and figures here")
    p.add_argument("--loo", action="store_true", help="leave-one-out error curves")
    p.add_argument("--ig", action="store_true", help="information-gain report")
    p.add_argument("--learning-rate", type=float, default=1.0)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("evaluate", help="ranking metrics against gold correctness marks")
    p.add_argument("--bundle", required=True)
    p.add_argument("--gold", required=True,
                   help="lines: <target> <0/1 per rank, space separated>")
    p.add_argument("--ontology", help="weigh targets by ontology mentions")
    p.add_argument("--report-dir", required=True)

    p = sub.add_parser("serve", help="run the local review service")
    p.add_argument("--bundle", required=True)
    p.add_argument("--port", type=int, default=8760)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui", help="directory with the built review UI")

    p = sub.add_parser("export", help="export bundle contents as TSV")
    p.add_argument("--bundle", required=True)
    p.add_argument("--what", choices=("names", "plans", "interest"), required=True)
    p.add_argument("--out", required=True)
    return parser


def _cmd_extract_names(args) -> int:
    config = RunConfig(
        ontology=args.ontology, corpus=args.corpus,
        max_docs_per_query=args.max_docs, top_k=args.top_k, seed=args.seed,
    )
    bundle = run_extract_names(config)
    save_bundle(bundle, args.out)
    anonymous = sum(1 for r in bundle.names.values() if r["anonymous"])
    missing = sum(1 for r in bundle.names.values() if r["no_candidates"])
    print(f"wrote {args.out}: {len(bundle.names)} entities "
          f"({anonymous} anonymous, {missing} without candidates)")
    return 0


def _cmd_extract_plans(args) -> int:
    config = RunConfig(
        ontology=args.ontology, corpus=args.corpus,
        max_docs_per_query=args.max_docs, threshold=args.threshold,
        top_k=args.top_k, seed=args.seed, model_path=args.model or "",
        boot_target=args.boot_target,
        relax_min_sentences=args.relax_min_sentences,
        names_source=args.names, manual_names=args.manual_names or "",
    )
    bundle = load_bundle(args.bundle) if args.bundle else None
    out = run_extract_plans(config, bundle, method=args.method)
    save_bundle(out, args.out)
    for rid in sorted(out.plans):
        record = out.plans[rid]
        flag = " (low confidence: few seed pairs)" if record["low_confidence"] else ""
        print(f"{rid}: {len(record['candidates'])} candidates "
              f"from {record['seed_pair_count']} seed pairs{flag}")
    if args.features_out:
        names = resolve_names(config, bundle)
        rows = write_feature_dump(config, args.features_out, names=names)
        print(f"wrote {rows} feature rows to {args.features_out}")
    print(f"wrote {args.out}")
    return 0


def _cmd_train(args) -> int:
    ids, labels, matrix = read_feature_dump(args.data)
    if len(ids) == 0:
        raise PipelineError(f"{args.data}: no rows")
    bad = [i for i, y in enumerate(labels) if y not in (0.0, 1.0)]
    if bad:
        raise PipelineError(
            f"{args.data}: {len(bad)} rows are unlabeled (label must be 0 or 1, "
            f"first bad row: {ids[bad[0]]})"
        )
    config = TrainConfig(learning_rate=args.learning_rate, l2=args.l2,
                         epochs=args.epochs, seed=args.seed)
    from .features import FEATURE_NAMES

    model = train(matrix, labels, config, feature_names=list(FEATURE_NAMES))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(model.to_json())
    print(f"wrote model {args.out} ({len(ids)} instances)")
    # with a report dir and no narrowing flag, emit both reports
    want_loo = args.loo or (args.report_dir and not args.ig)
    want_ig = args.ig or (args.report_dir and not args.loo)
    if want_loo or want_ig:
        if not args.report_dir:
            raise PipelineError("--loo/--ig need --report-dir")
        from .reports import write_ig_report, write_loo_report

        if want_loo:
            curves = loo_evaluate(matrix, labels, config)
            for path in write_loo_report(curves, args.report_dir):
                print(f"wrote {path}")
        if want_ig:
            ig = information_gain(matrix, labels, list(FEATURE_NAMES))
            for path in write_ig_report(ig, args.report_dir):
                print(f"wrote {path}")
    return 0


def _read_gold(path: str) -> dict[str, list[bool]]:
    gold: dict[str, list[bool]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 2:
                raise PipelineError(f"{path}:{lineno}: expected '<target> <0/1>...'")
            try:
                gold[parts[0]] = [bool(int(v)) for v in parts[1:]]
            except ValueError:
                raise PipelineError(f"{path}:{lineno}: marks must be 0 or 1") from None
    return gold


def _mention_weights(ontology_path: str) -> dict[str, float]:
    onto = load_ontology(ontology_path)
    weights: dict[str, float] = {}
    for t in onto.all_triples():
        for key in (t.s, t.o, t.r):
            weights[key] = weights.get(key, 0.0) + 1.0
    return weights


def _cmd_evaluate(args) -> int:
    load_bundle(args.bundle)  # validates the bundle exists and parses
    gold = _read_gold(args.gold)
    weights = _mention_weights(args.ontology) if args.ontology else None
    metrics = ranking_metrics(gold, weights)
    if not metrics:
        raise PipelineError(f"{args.gold}: no gold marks")
    from .reports import write_metrics_report

    for path in write_metrics_report(metrics, args.report_dir, stem="ranking_metrics"):
        print(f"wrote {path}")
    for name in sorted(metrics):
        print(f"{name}\t{metrics[name]:.4f}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve_review

    serve_review(args.bundle, args.port, args.host, args.ui)
    return 0


def _cmd_export(args) -> int:
    bundle = load_bundle(args.bundle)
    with open(args.out, "w", encoding="utf-8") as fh:
        if args.what == "names":
            fh.write("entity\trank\tphrase\tnotation\tanonymous\tscore\n")
            for eid in sorted(bundle.names):
                record = bundle.names[eid]
                if not record["candidates"]:
                    fh.write(f"{eid}\t-\t-\t-\t{int(record['anonymous'])}\t-\n")
                for c in record["candidates"]:
                    fh.write(
                        f"{eid}\t{c['rank']}\t{c['phrase']}\t{c['notation']}\t"
                        f"{int(record['anonymous'])}\t{c.get('score', '')}\n"
                    )
        elif args.what == "plans":
            fh.write("relation\trank\ttemplate\tnotation\tprobability\tcoverage\tcombined\n")
            for rid in sorted(bundle.plans):
                for c in bundle.plans[rid]["candidates"]:
                    fh.write(
                        f"{rid}\t{c['rank']}\t{c.get('template', '')}\t"
                        f"{c.get('notation', '')}\t{c.get('probability', c.get('confidence', ''))}\t"
                        f"{c.get('coverage', '')}\t{c.get('combined', '')}\n"
                    )
        else:
            fh.write("s\tr\to\tscore\n")
            for row in bundle.interest:
                fh.write(f"{row['s']}\t{row['r']}\t{row['o']}\t{row['score']}\n")
    print(f"wrote {args.out}")
    return 0


COMMANDS = {
    "extract-names": _cmd_extract_names,
    "extract-plans": _cmd_extract_plans,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "serve": _cmd_serve,
    "export": _cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - unexpected
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
