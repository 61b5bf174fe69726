"""Command-line surface: validate, homology, connect, graph, persist, cubical.

Exit codes: 0 ok, 1 semantic failure (invalid complex, bad extension, ...),
2 parse or usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .conley import connecting_block, connection_matrix, homology
from .cubical import build_complex
from .documents import ParseError, emit_document, load_document, document_to_graded, parse_grid
from .graded import GradedComplex, fiber_graph
from .persistence import diagram_total_order, persistent_betti

OK, SEMANTIC_ERROR, PARSE_ERROR = 0, 1, 2


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _load_graded(path: str, field=None) -> GradedComplex:
    g = document_to_graded(load_document(_read(path)), field_override=field)
    report = g.complex.validate()
    if not report.ok:
        raise ValueError(f"invalid complex:\n{report}")
    return g


def _write_out(text: str, out):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_validate(args) -> int:
    try:
        doc = load_document(_read(args.path))
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return PARSE_ERROR
    try:
        g = document_to_graded(doc, field_override=args.field)
    except ValueError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return SEMANTIC_ERROR
    report = g.complex.validate()
    if not report.ok:
        print(report, file=sys.stderr)
        return SEMANTIC_ERROR
    print("valid", file=sys.stderr)
    return OK


def cmd_homology(args) -> int:
    g = _load_graded(args.path, args.field)
    result = homology(g.complex, strategy=args.strategy)
    _write_out(emit_document(result.graded), args.out)
    print(f"poincare: {result.complex.f_polynomial()}")
    return OK


def cmd_connect(args) -> int:
    g = _load_graded(args.path, args.field)
    result = connection_matrix(g, strategy=args.strategy)
    _write_out(emit_document(result.graded), args.out)
    if args.blocks:
        P = result.graded.poset
        for q in P.elements:
            for p_elt in P.elements:
                if p_elt == q or not P.leq(p_elt, q):
                    continue
                block = connecting_block(result, frozenset([p_elt]), frozenset([q]))
                if block.matrix.any():
                    r, c = block.shape
                    print(f"block {p_elt} {q}: {r}x{c} rank {block.rank()}")
    if args.emit_tower:
        stages = [{"cells": r.source.n, "critical": [str(c) for c in r.target.ids()]} for r in result.tower]
        print("tower: " + json.dumps(stages))
    return OK


def cmd_graph(args) -> int:
    g = _load_graded(args.path, args.field)
    if args.stage == "output":
        g = connection_matrix(g).graded
    print(fiber_graph(g).to_dot())
    return OK


def _parse_pairs_file(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"pairs file is not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ParseError("pairs file must be a JSON list of [a, b] pairs")
    pairs = []
    for ent in data:
        if not (isinstance(ent, list) and len(ent) == 2 and all(isinstance(s, list) for s in ent)):
            raise ParseError("each pair must be [[...a...], [...b...]]")
        pairs.append((frozenset(ent[0]), frozenset(ent[1])))
    return pairs


def _down_set_text(ds) -> str:
    return ";".join(sorted(str(e) for e in ds))


def cmd_persist(args) -> int:
    g = _load_graded(args.path, args.field)
    if (args.extension is None) == (args.pairs is None):
        raise ParseError("need exactly one of --extension or --pairs")
    source = g
    if args.via == "conley":
        source = connection_matrix(g).graded
    if args.extension is not None:
        extension = _typed_extension(args.extension, g)
        diagram = diagram_total_order(source, extension)
        lines = ["dim,birth,death"]
        for d, birth, death in diagram.bars():
            dtext = "inf" if math.isinf(death) else str(death)
            lines.append(f"{d},{birth},{dtext}")
    else:
        pairs = _parse_pairs_file(_read(args.pairs))
        max_dim = int(g.complex.dims.max()) if g.complex.n else 0
        lines = ["dim,a,b,betti"]
        for a, b in pairs:
            for j in range(max_dim + 1):
                betti = persistent_betti(source, a, b, j)
                lines.append(f"{j},{_down_set_text(a)},{_down_set_text(b)},{betti}")
    print("\n".join(lines))
    return OK


def _typed_extension(text: str, g: GradedComplex) -> list:
    """Split the --extension flag and match tokens against poset elements."""
    by_text = {str(e): e for e in g.poset.elements}
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok not in by_text:
            raise ValueError(f"extension element {tok!r} is not a poset element")
        out.append(by_text[tok])
    return out


def cmd_cubical(args) -> int:
    grid = parse_grid(_read(args.path))
    g = build_complex(grid, p=args.field if args.field else 2)
    _write_out(emit_document(g), args.out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conmat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("path")
        p.add_argument("--field", type=int, default=None, help="override the coefficient field modulus")
        p.add_argument("--threads", type=int, default=1, help="upper bound on worker threads")
        p.add_argument("--out", default=None, help="write the emitted document to a file")

    p = sub.add_parser("validate", help="check a complex document")
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("homology", help="minimal complex and Poincare polynomial")
    common(p)
    p.add_argument("--strategy", choices=["coreduction", "coordinate"], default="coreduction")
    p.set_defaults(fn=cmd_homology)

    p = sub.add_parser("connect", help="Conley complex / connection matrix")
    common(p)
    p.add_argument("--strategy", choices=["coreduction", "coordinate"], default="coreduction")
    p.add_argument("--blocks", action="store_true", help="print nonzero block shapes and ranks")
    p.add_argument("--emit-tower", action="store_true", help="print per-round critical cells")
    p.set_defaults(fn=cmd_connect)

    p = sub.add_parser("graph", help="fiber graph as DOT")
    common(p)
    p.add_argument("--stage", choices=["input", "output"], default="input")
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("persist", help="persistence diagram or betti table as CSV")
    common(p)
    p.add_argument("--extension", default=None, help="comma-separated linear extension")
    p.add_argument("--pairs", default=None, help="JSON file of down-set pairs")
    p.add_argument("--via", choices=["direct", "conley"], default="direct")
    p.set_defaults(fn=cmd_persist)

    p = sub.add_parser("cubical", help="build a graded complex document from a grid file")
    common(p)
    p.set_defaults(fn=cmd_cubical)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return PARSE_ERROR
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return SEMANTIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
