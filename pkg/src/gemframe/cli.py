"""Command line entry points.

* ``gemframe segment <in> [--lexicon F] -o <xml>``   run the pipeline;
* ``gemframe eval --system X --gold Y --source T``   score system output;
* ``gemframe agree <A> <B> --source T``              annotator agreement;
* ``gemframe serve --port N --store DIR``            start the review service.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .docmodel import DocumentFormatError, decode_source, parse_document
from .evaluation import (
    cohen_kappa,
    evaluate,
    format_report,
    pairwise_agreement,
    sentence_labels,
)
from .gemxml import GemXmlError, parse
from .lexicon import LexiconError, MarkerLexicon, load_lexicon
from .pipeline import run_pipeline


def _fail(message: str) -> int:
    print(f"gemframe: error: {message}", file=sys.stderr)
    return 1


def _load_lexicon_arg(path: str | None) -> MarkerLexicon:
    if path is None:
        return load_lexicon()
    return load_lexicon(Path(path).read_text("utf-8"))


def _read_source(path: str) -> str:
    return decode_source(Path(path).read_bytes())


def cmd_segment(args: argparse.Namespace) -> int:
    try:
        lexicon = _load_lexicon_arg(args.lexicon)
        text = _read_source(args.input)
        doc_id = args.id or Path(args.input).stem
        result = run_pipeline(text, doc_id, lexicon)
    except (DocumentFormatError, LexiconError, OSError) as exc:
        return _fail(str(exc))
    if args.output:
        Path(args.output).write_text(result.xml, "utf-8")
        print(result.summary())
        print(f"output: {args.output}")
    else:
        sys.stdout.write(result.xml)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        source = _read_source(args.source)
        system_tree = parse(Path(args.system).read_text("utf-8"))
        gold_tree = parse(Path(args.gold).read_text("utf-8"))
    except (DocumentFormatError, GemXmlError, OSError) as exc:
        return _fail(str(exc))
    if system_tree.doc_id != gold_tree.doc_id:
        return _fail(f"document id mismatch: system {system_tree.doc_id!r} "
                     f"vs gold {gold_tree.doc_id!r}")
    doc = parse_document(source, gold_tree.doc_id)
    report = evaluate(system_tree, gold_tree, doc)
    print(format_report(report), end="")
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.to_dict(), ensure_ascii=False, indent=2) + "\n", "utf-8")
        print(f"report: {args.report}")
    return 0


def cmd_agree(args: argparse.Namespace) -> int:
    try:
        source = _read_source(args.source)
        tree_a = parse(Path(args.annotation_a).read_text("utf-8"))
        tree_b = parse(Path(args.annotation_b).read_text("utf-8"))
    except (DocumentFormatError, GemXmlError, OSError) as exc:
        return _fail(str(exc))
    if tree_a.doc_id != tree_b.doc_id:
        return _fail(f"document id mismatch: {tree_a.doc_id!r} vs {tree_b.doc_id!r}")
    doc = parse_document(source, tree_a.doc_id)
    agreement = pairwise_agreement(tree_a, tree_b)
    kappa = cohen_kappa(sentence_labels(tree_a, doc), sentence_labels(tree_b, doc))
    print(f"accord (rattachements) : {agreement:.4f}")
    print(f"kappa (étiquettes de phrases) : {kappa:.4f}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    try:
        lexicon = _load_lexicon_arg(args.lexicon)
    except (LexiconError, OSError) as exc:
        return _fail(str(exc))
    ui_dir = Path(args.ui) if args.ui else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = create_app(Path(args.store), lexicon, ui_dir if ui_dir.is_dir() else None)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gemframe",
                                     description="Structure guideline text into "
                                                 "condition/recommendation frame trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_segment = sub.add_parser("segment", help="run the pipeline on one document")
    p_segment.add_argument("input", help="input text file")
    p_segment.add_argument("--lexicon", help="lexicon config file")
    p_segment.add_argument("--id", help="document id (default: input file stem)")
    p_segment.add_argument("-o", "--output", help="output XML file (default: stdout)")
    p_segment.set_defaults(func=cmd_segment)

    p_eval = sub.add_parser("eval", help="score system XML against gold XML")
    p_eval.add_argument("--system", required=True, help="system GEM XML")
    p_eval.add_argument("--gold", required=True, help="gold GEM XML")
    p_eval.add_argument("--source", required=True, help="companion source text")
    p_eval.add_argument("--report", help="write a JSON report here")
    p_eval.set_defaults(func=cmd_eval)

    p_agree = sub.add_parser("agree", help="agreement between two annotations")
    p_agree.add_argument("annotation_a", help="first GEM XML annotation")
    p_agree.add_argument("annotation_b", help="second GEM XML annotation")
    p_agree.add_argument("--source", required=True, help="companion source text")
    p_agree.set_defaults(func=cmd_agree)

    p_serve = sub.add_parser("serve", help="start the review service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--store", required=True, help="store directory")
    p_serve.add_argument("--lexicon", help="lexicon config file")
    p_serve.add_argument("--ui", help="review UI static directory")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
