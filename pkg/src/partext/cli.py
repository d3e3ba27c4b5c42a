"""Command-line driver for the toolkit.

Each subcommand delegates to one library operation, so batch runs and
direct calls produce the same bytes.  Human diagnostics go to standard
error; results go to standard output or ``--out``.  With ``--porcelain``
the commands that normally print summaries emit tab-separated rows
instead, one item per line.

Exit codes: 0 success, 1 operation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import zipfile
from pathlib import Path

from . import jsonio
from .align import align as align_versions
from .gentext import GenerationError, generate, parse_template
from .langtags import (
    FileLanguageMetadata,
    LanguageTag,
    check_labelling,
    parse_language_list,
    parse_tag,
)
from .lingstore import (
    LinguisticTable,
    export_csv,
    export_tmx,
    harvest,
    import_csv,
    import_tmx,
    load_table,
    parse_marked_text,
    save_table,
)
from .markup import segment_html, segment_marked, segment_rtf
from .medbox import generate_index, pack, unpack, validate
from .segcore import SegmentKind, SegmentedText, segment_text

__all__ = ["main", "build_parser"]


# -- small plumbing ---------------------------------------------------------


def _write_out(data: str | bytes, out: str | None) -> None:
    """Write a result exactly, to a file or to standard output."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(data)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _open_table(directory: str) -> LinguisticTable:
    return load_table(directory)


def _segment_kind(label: str) -> SegmentKind:
    try:
        return SegmentKind.from_label(label)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _language(code: str) -> LanguageTag:
    try:
        return parse_tag(code)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _dotted(path: tuple[int, ...]) -> str:
    return ".".join(str(i) for i in path) if path else "-"


# -- subcommand handlers ----------------------------------------------------


def _cmd_segment(args: argparse.Namespace) -> int:
    text = _read_text(args.input)
    if args.format in ("plain", "html", "rtf") and args.lang is None:
        raise ValueError(f"--lang is required for {args.format} input")
    if args.format == "plain":
        st = segment_text(text, args.lang, target=args.kind)
    elif args.format == "xml":
        st = segment_marked(text)
    elif args.format == "html":
        st = segment_html(text, args.lang, target=args.kind)
    elif args.format == "rtf":
        st = segment_rtf(text, args.lang, target=args.kind)
    else:  # marked
        st = parse_marked_text(text)

    if args.porcelain:
        lines = []
        for path in st.leaf_paths():
            seg = st.resolve(path)
            body = " ".join(st.text_of(seg).split())
            lines.append(f"{seg.kind.label}\t{seg.start}\t{seg.end}\t{body}")
        _write_out("".join(line + "\n" for line in lines), args.out)
    else:
        _write_out(json.dumps(jsonio.st_to_dict(st), ensure_ascii=False) + "\n", args.out)
    return 0


def _cmd_align(args: argparse.Namespace) -> int:
    versions: dict[LanguageTag, SegmentedText] = {}
    for spec in args.version:
        code, sep, path = spec.partition("=")
        if not sep or not path:
            raise ValueError(f"--version wants CODE=FILE, got {spec!r}")
        lang = parse_tag(code)
        if lang in versions:
            raise ValueError(f"language {lang.code} given twice")
        versions[lang] = segment_text(_read_text(path), lang, target=args.kind)
    pt = align_versions(versions, args.kind)

    if args.porcelain:
        lines = []
        for group in pt.groups:
            cells = "\t".join(
                f"{lang.code}={_dotted(path)}" for lang, path in group.members
            )
            lines.append(f"{group.kind.label}\t{cells}")
        _write_out("".join(line + "\n" for line in lines), args.out)
    else:
        payload = jsonio.pt_to_dict(pt, include_sources=True)
        _write_out(json.dumps(payload, ensure_ascii=False) + "\n", args.out)
    return 0


def _cmd_harvest(args: argparse.Namespace) -> int:
    data = json.loads(_read_text(args.input))
    pt = jsonio.pt_from_dict(data)
    directory = Path(args.table)
    if (directory / "manifest.json").is_file():
        table = load_table(directory)
    else:
        table = LinguisticTable(name=directory.name or "table")
    added = harvest(pt, table)
    save_table(table, directory)
    if args.porcelain:
        sys.stdout.write(f"added\t{added}\n")
    else:
        print(f"harvested {added} new record{'s' if added != 1 else ''}", file=sys.stderr)
    return 0


def _cmd_tmx_export(args: argparse.Namespace) -> int:
    table = _open_table(args.table)
    _write_out(export_tmx(table, list(args.langs)), args.out)
    return 0


def _cmd_tmx_import(args: argparse.Namespace) -> int:
    table = import_tmx(_read_text(args.input))
    table.name = args.name or Path(args.table).name or table.name
    save_table(table, args.table)
    print(f"imported {len(table)} records into {args.table}", file=sys.stderr)
    return 0


def _cmd_csv_export(args: argparse.Namespace) -> int:
    table = _open_table(args.table)
    _write_out(export_csv(table, list(args.langs)), args.out)
    return 0


def _cmd_csv_import(args: argparse.Namespace) -> int:
    table = import_csv(_read_text(args.input))
    table.name = args.name or Path(args.table).name or table.name
    save_table(table, args.table)
    print(f"imported {len(table)} records into {args.table}", file=sys.stderr)
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    template = parse_template(_read_text(args.template), name=Path(args.template).stem)
    table = _open_table(args.table)
    extra = {}
    for spec in args.tables or []:
        name, sep, directory = spec.partition("=")
        if not sep or not name or not directory:
            raise ValueError(f"--tables wants NAME=DIR, got {spec!r}")
        extra[name] = load_table(directory)
    st = generate(template, table, args.lang, tables=extra or None)
    save_table(table, args.table)  # persist the use counters the run bumped
    for name, spec in zip(extra, args.tables or []):
        save_table(extra[name], spec.partition("=")[2])
    _write_out(st.source, args.out)
    return 0


def _cmd_med_pack(args: argparse.Namespace) -> int:
    med = unpack(Path(args.input))
    _write_out(pack(med), args.out)
    return 0


def _cmd_med_unpack(args: argparse.Namespace) -> int:
    target = Path(args.out)
    with zipfile.ZipFile(args.input) as archive:
        for info in archive.infolist():
            if info.is_dir():
                continue
            name = info.filename
            destination = target / name
            if not destination.resolve().is_relative_to(target.resolve()):
                raise ValueError(f"archive member {name!r} escapes {target}")
            destination.parent.mkdir(parents=True, exist_ok=True)
            destination.write_bytes(archive.read(name))
    return 0


def _cmd_med_validate(args: argparse.Namespace) -> int:
    source: bytes | str = args.input
    if args.input == "-":
        source = sys.stdin.buffer.read()
    diagnostics = validate(source)
    if args.porcelain:
        for d in diagnostics:
            member = d.member or "-"
            sys.stdout.write(f"{d.severity}\t{d.code}\t{member}\t{d.message}\n")
    else:
        for d in diagnostics:
            print(str(d), file=sys.stderr)
    return 1 if any(d.severity == "error" for d in diagnostics) else 0


def _cmd_med_index(args: argparse.Namespace) -> int:
    source = sys.stdin.buffer.read() if args.input == "-" else Path(args.input)
    _write_out(generate_index(unpack(source)), args.out)
    return 0


def _cmd_langcheck(args: argparse.Namespace) -> int:
    source = sys.stdin.buffer.read() if args.input == "-" else Path(args.input)
    med = unpack(source)
    declared = med.languages
    default = None
    if "default-language" in med.header:
        default = parse_tag(med.header["default-language"])
    metadata = FileLanguageMetadata(
        declared=declared,
        default_processing_language=default or (declared[0] if declared else None),
    )
    observed = sorted(med.parallel.versions, key=lambda l: l.code) if med.parallel else []
    diagnostics = check_labelling(metadata, observed)
    if args.porcelain:
        for d in diagnostics:
            code = d.language.code if d.language else "-"
            sys.stdout.write(f"{d.kind}\t{code}\t{d.message}\t{d.suggestion or '-'}\n")
    else:
        for d in diagnostics:
            line = f"{d.kind}: {d.message}"
            if d.suggestion:
                line += f" ({d.suggestion})"
            print(line, file=sys.stderr)
    return 1 if diagnostics else 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .tmserver import serve

    serve(data_dir=args.data, host=args.host, port=args.port)
    return 0


# -- parser wiring ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="partext",
        description="segment, align, store, generate and serve parallel texts",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="COMMAND")

    p = sub.add_parser("segment", help="segment a document into a span tree")
    p.add_argument("input", help="input file, or - for standard input")
    p.add_argument("--lang", type=_language, help="processing language (plain/html/rtf)")
    p.add_argument(
        "--kind",
        type=_segment_kind,
        default=SegmentKind.SENTENCE,
        help="target fineness: file, paragraph, sentence or sub-sentence",
    )
    p.add_argument(
        "--format",
        choices=("plain", "xml", "html", "rtf", "marked"),
        default="plain",
        help="input flavour (marked = record-linked text with #base header)",
    )
    p.add_argument("--out", help="write the result here instead of standard output")
    p.add_argument("--porcelain", action="store_true", help="emit one TSV row per leaf")
    p.set_defaults(handler=_cmd_segment)

    p = sub.add_parser("align", help="align version files positionally")
    p.add_argument(
        "--version",
        action="append",
        required=True,
        metavar="CODE=FILE",
        help="one language version; repeat per language",
    )
    p.add_argument("--kind", type=_segment_kind, default=SegmentKind.SENTENCE)
    p.add_argument("--out", help="write the alignment JSON here")
    p.add_argument("--porcelain", action="store_true", help="emit one TSV row per group")
    p.set_defaults(handler=_cmd_align)

    p = sub.add_parser("harvest", help="fold an alignment's groups into a table")
    p.add_argument("input", help="alignment JSON as produced by `align`")
    p.add_argument("--table", required=True, help="table directory (created if missing)")
    p.add_argument("--porcelain", action="store_true")
    p.set_defaults(handler=_cmd_harvest)

    p = sub.add_parser("tmx", help="translation memory exchange")
    tmx = p.add_subparsers(dest="direction", required=True, metavar="DIRECTION")
    q = tmx.add_parser("export", help="write a table as TMX 1.4")
    q.add_argument("--table", required=True)
    q.add_argument("--langs", type=parse_language_list, required=True)
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_tmx_export)
    q = tmx.add_parser("import", help="read TMX into a fresh table directory")
    q.add_argument("input")
    q.add_argument("--table", required=True)
    q.add_argument("--name", help="table name (defaults to the directory name)")
    q.set_defaults(handler=_cmd_tmx_import)

    p = sub.add_parser("csv", help="comma-separated table exchange")
    csvp = p.add_subparsers(dest="direction", required=True, metavar="DIRECTION")
    q = csvp.add_parser("export", help="write a table as CSV")
    q.add_argument("--table", required=True)
    q.add_argument("--langs", type=parse_language_list, required=True)
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_csv_export)
    q = csvp.add_parser("import", help="read CSV into a fresh table directory")
    q.add_argument("input")
    q.add_argument("--table", required=True)
    q.add_argument("--name")
    q.set_defaults(handler=_cmd_csv_import)

    p = sub.add_parser("generate", help="expand a template against a table")
    p.add_argument("--template", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--lang", type=_language, required=True)
    p.add_argument(
        "--tables",
        action="append",
        metavar="NAME=DIR",
        help="extra tables referenced as {NAME#rN}; repeatable",
    )
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("med", help="multilingual electronic dossiers")
    med = p.add_subparsers(dest="action", required=True, metavar="ACTION")
    q = med.add_parser("pack", help="pack a dossier directory into canonical bytes")
    q.add_argument("input", help="dossier directory or archive to repack")
    q.add_argument("--out", help="archive path (default: standard output)")
    q.set_defaults(handler=_cmd_med_pack)
    q = med.add_parser("unpack", help="extract an archive's members")
    q.add_argument("input")
    q.add_argument("--out", required=True, help="target directory")
    q.set_defaults(handler=_cmd_med_unpack)
    q = med.add_parser("validate", help="lint a dossier; exit 1 on errors")
    q.add_argument("input", help="archive, directory, or - for standard input")
    q.add_argument("--porcelain", action="store_true")
    q.set_defaults(handler=_cmd_med_validate)
    q = med.add_parser("index", help="regenerate the overview page")
    q.add_argument("input")
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_med_index)

    p = sub.add_parser("langcheck", help="check a dossier's language labelling")
    p.add_argument("input", help="dossier archive or directory")
    p.add_argument("--porcelain", action="store_true")
    p.set_defaults(handler=_cmd_langcheck)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8420)
    p.add_argument(
        "--data",
        default=os.environ.get("PARTEXT_DATA_DIR"),
        help="state directory (default: PARTEXT_DATA_DIR)",
    )
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except GenerationError as exc:
        for failure in exc.failures:
            print(str(failure), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
