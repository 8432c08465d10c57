"""Command-line interface: synthesize offline, enrich and inspect the graph,
or run the HTTP service.

Exit codes: 0 success, 1 the expression produced no match, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .errors import ApisynthError, EmptyExpression, UnknownDeclaration
from .extractor import LexiconTagger, default_stopwords, load_lexicon, load_stopwords
from .kg import add_sample_expression, enrich_values, load_kg, save_kg
from .embedding import load_embeddings
from .service import ServiceConfig, atomic_write, create_app, question_for
from .synthesis import NEEDS_INPUT, READY, SynthesisResult, synthesize

EXIT_OK = 0
EXIT_NO_MATCH = 1
EXIT_INPUT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apisynth",
        description="Synthesize natural-language expressions into API calls.",
    )
    parser.add_argument("--config", help="JSON config file (or set APISYNTH_CONFIG)")
    parser.add_argument("--graph", help="knowledge-graph JSON file (overrides config)")
    parser.add_argument("--embeddings", help="vector file (overrides config)")
    parser.add_argument("--stopwords", help="stopword file (overrides config)")
    parser.add_argument("--lexicon", help="tagger lexicon file (overrides config)")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="synthesize one expression")
    synth.add_argument("expression")
    synth.add_argument(
        "--bind",
        action="append",
        default=[],
        metavar="PARAM=VALUE",
        help="bind a parameter explicitly (repeatable)",
    )
    synth.add_argument("--json", action="store_true", help="print the result as JSON")
    synth.add_argument(
        "--save-learned",
        action="store_true",
        help="persist values the knowledge-graph updater accepted",
    )

    enrich = sub.add_parser("enrich", help="expand stored values with embedding neighbors")
    enrich.add_argument("--k", type=int, default=5, help="neighbors per value")
    enrich.add_argument("--min-sim", type=float, default=None, help="similarity floor")
    enrich.add_argument(
        "--dry-run", action="store_true", help="report additions without saving"
    )

    kg = sub.add_parser("kg", help="knowledge-graph maintenance")
    kg_sub = kg.add_subparsers(dest="kg_command", required=True)
    add_expr = kg_sub.add_parser("add-expression", help="attach a sample expression")
    add_expr.add_argument("declaration_id")
    add_expr.add_argument("expression")
    kg_sub.add_parser("validate", help="check the graph document")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--host", default="127.0.0.1")
    return parser


def _config_from_args(args: argparse.Namespace) -> ServiceConfig:
    if args.config:
        config = ServiceConfig.from_file(args.config)
    else:
        config = ServiceConfig.from_env()
    if args.graph:
        config.graph_path = args.graph
    if args.embeddings:
        config.embeddings_path = args.embeddings
    if args.stopwords:
        config.stopwords_path = args.stopwords
    if args.lexicon:
        config.lexicon_path = args.lexicon
    return config


def _parse_bindings(pairs: Sequence[str]) -> dict[str, str]:
    bindings = {}
    for pair in pairs:
        name, eq, value = pair.partition("=")
        if not eq or not name:
            raise ValueError(f"--bind expects PARAM=VALUE, got {pair!r}")
        bindings[name] = value
    return bindings


def _print_result(result: SynthesisResult, as_json: bool) -> None:
    if as_json:
        payload = result.to_dict()
        if result.status == NEEDS_INPUT and result.coverage_report:
            payload["questions"] = [
                question_for(p) for p in result.coverage_report.missing_required
            ]
        print(json.dumps(payload, indent=2))
        return
    print(f"status: {result.status}")
    if result.reason:
        print(f"reason: {result.reason}")
    if result.api_score:
        print(f"api: {result.api_score.api_id} (score {result.api_score.score:.3f})")
    if result.declaration_match:
        match = result.declaration_match
        print(f"declaration: {match.declaration_id} (similarity {match.similarity:.3f})")
        print(f'  sample: "{match.best_sample_expression}"')
    if result.call:
        for name, value in result.call.bindings.items():
            entry = result.matrix.entry(name) if result.matrix else None
            if entry is not None:
                print(f"{name} = {value} (confidence {entry.confidence:.3f})")
            else:
                print(f"{name} = {value}")
        print(f"call: {result.call.method} {result.call.url}")
    elif result.status == NEEDS_INPUT and result.coverage_report:
        report = result.coverage_report
        print(f"coverage: {report.required_bound}/{report.required_total}")
        for name in report.missing_required:
            print(f"question: {question_for(name)}")


def _cmd_synth(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    try:
        bindings = _parse_bindings(args.bind)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT_ERROR
    model = load_embeddings(config.embeddings_path)
    graph = load_kg(config.graph_path)
    tagger = (
        LexiconTagger(load_lexicon(config.lexicon_path))
        if config.lexicon_path
        else LexiconTagger()
    )
    stopwords = (
        load_stopwords(config.stopwords_path)
        if config.stopwords_path
        else default_stopwords()
    )
    try:
        result = synthesize(
            args.expression,
            graph,
            model,
            user_bindings=bindings,
            config=config.synthesis_config(),
            tagger=tagger,
            stopwords=stopwords,
        )
    except EmptyExpression:
        print("expression is empty", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if args.save_learned and any(lv.accepted for lv in result.learned):
        atomic_write(config.graph_path, save_kg(graph))
    _print_result(result, args.json)
    return EXIT_OK if result.status in (READY, NEEDS_INPUT) else EXIT_NO_MATCH


def _cmd_enrich(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    min_sim = args.min_sim if args.min_sim is not None else config.thresholds.enrich_min_sim
    model = load_embeddings(config.embeddings_path)
    graph = load_kg(config.graph_path)
    try:
        report = enrich_values(graph, model, args.k, min_sim)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT_ERROR
    for added in report.added_values:
        print(
            f"+ value {added.literal!r} -> {added.declaration_id}.{added.parameter} "
            f"(neighbor of {added.source_literal!r}, similarity {added.similarity:.3f})"
        )
    for d, p, literal in report.skipped_oov:
        print(f"~ skipped out-of-vocabulary value {literal!r} ({d}.{p})")
    print(
        f"added {len(report.added_values)} value(s), {len(report.added_links)} link(s), "
        f"skipped {len(report.skipped_oov)} out-of-vocabulary value(s)"
    )
    if not args.dry_run and (report.added_values or report.added_links):
        atomic_write(config.graph_path, save_kg(graph))
    return EXIT_OK


def _cmd_kg(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    if args.kg_command == "validate":
        try:
            graph = load_kg(config.graph_path)
            graph.validate()
        except (ApisynthError, OSError) as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        print(f"ok: {len(graph.apis())} api(s), {len(graph.declarations())} declaration(s)")
        return EXIT_OK
    # add-expression
    graph = load_kg(config.graph_path)
    try:
        added = add_sample_expression(graph, args.declaration_id, args.expression)
    except UnknownDeclaration as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT_ERROR
    if added:
        atomic_write(config.graph_path, save_kg(graph))
        print(f"added sample expression to {args.declaration_id}")
    else:
        print("already present; nothing to do")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    config = _config_from_args(args)
    port = args.port if args.port is not None else config.listen_port
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=port)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "enrich":
            return _cmd_enrich(args)
        if args.command == "kg":
            return _cmd_kg(args)
        if args.command == "serve":
            return _cmd_serve(args)
    except (ApisynthError, OSError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT_ERROR
    parser.error(f"unknown command {args.command!r}")
    return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
