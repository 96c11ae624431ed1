"""Command-line entry points: ingest, harvest, query, serve, export."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import bibstore, harvester, metafmt, service, textproc
from .bibstore import BibStore, MalformedXml, UnknownRecord
from .harvester import HarvestError, MissingTitle, OaiEndpoint
from .service import BadConfig, Config
from .taxonomy import TaxonomyError, load_graph


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (MalformedXml, TaxonomyError, HarvestError, UnknownRecord,
            BadConfig, bibstore.BadSnapshot, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glanoir")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="ingest a DBLP-style XML file")
    p_ingest.add_argument("xml", help="path to the XML file (gzip detected by magic)")
    p_ingest.add_argument("--snapshot", help="snapshot file to update and write back")
    p_ingest.add_argument("--lang", default=None, choices=textproc.LANGUAGES,
                          help="title indexing language (default en)")
    p_ingest.set_defaults(handler=_cmd_ingest)

    p_harvest = sub.add_parser("harvest", help="harvest an OAI-PMH endpoint into the store")
    p_harvest.add_argument("base_url")
    p_harvest.add_argument("--from", dest="from_", metavar="YYYY-MM-DD")
    p_harvest.add_argument("--until", metavar="YYYY-MM-DD")
    p_harvest.add_argument("--keywords", help="filter records by these words")
    p_harvest.add_argument("--lang", default="en", choices=textproc.LANGUAGES)
    p_harvest.add_argument("--snapshot", help="snapshot file to update and write back")
    p_harvest.add_argument("--delay", type=float, default=1.0,
                           help="politeness delay between page requests (seconds)")
    p_harvest.add_argument("--retries", type=int, default=3)
    p_harvest.set_defaults(handler=_cmd_harvest)

    p_query = sub.add_parser("query", help="match a query against the taxonomy and the store")
    p_query.add_argument("text")
    p_query.add_argument("--lang", default="en", choices=textproc.LANGUAGES)
    p_query.add_argument("--k", type=int, default=3)
    p_query.add_argument("--threshold", type=float, default=0.1)
    p_query.add_argument("--limit", type=int, default=10)
    p_query.add_argument("--taxonomy", help="graphML file (default: bundled classification)")
    p_query.add_argument("--snapshot", help="snapshot file to search")
    p_query.set_defaults(handler=_cmd_query)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config", help="key = value configuration file")
    p_serve.add_argument("--listen", dest="listen_address", help="host:port")
    p_serve.add_argument("--taxonomy", dest="taxonomy_path")
    p_serve.add_argument("--snapshot", dest="snapshot_path")
    p_serve.add_argument("--stoplists", dest="stoplist_dir")
    p_serve.add_argument("--lang", dest="default_lang", choices=textproc.LANGUAGES)
    p_serve.add_argument("--k", type=int)
    p_serve.add_argument("--threshold", type=float)
    p_serve.add_argument("--limit", dest="result_limit", type=int)
    p_serve.set_defaults(handler=_cmd_serve)

    p_export = sub.add_parser("export", help="serialize records from the store")
    p_export.add_argument("ids", nargs="+")
    p_export.add_argument("--format", required=True, choices=("bibtex", "ris"))
    p_export.add_argument("--snapshot", help="snapshot file to read")
    p_export.set_defaults(handler=_cmd_export)

    return parser


def _open_store(snapshot: str | None) -> BibStore:
    if snapshot and Path(snapshot).exists():
        return BibStore.load(snapshot)
    return BibStore()


def _cmd_ingest(args) -> int:
    store = _open_store(args.snapshot)
    report = bibstore.ingest_stream(args.xml, store, lang=args.lang)
    print(f"ok={report.records_ok} skipped={report.records_skipped}")
    for reason in sorted(report.reasons):
        print(f"  skipped[{reason}]={report.reasons[reason]}")
    if report.unknown_entities:
        print(f"  unknown_entities={report.unknown_entities}")
    if args.snapshot:
        store.save(args.snapshot)
        print(f"snapshot written: {args.snapshot}")
    return 0


def _cmd_harvest(args) -> int:
    endpoint = OaiEndpoint(
        base_url=args.base_url,
        politeness_delay=args.delay,
        max_retries=args.retries,
    )
    keywords = textproc.text_to_lemmas(args.keywords, args.lang) if args.keywords else None
    records = harvester.harvest_filtered(
        endpoint, keywords, lang=args.lang, from_=args.from_, until=args.until
    )
    store = _open_store(args.snapshot)
    merged, skipped = [], 0
    for record in records:
        try:
            merged.append(harvester.oai_to_bib(record))
        except MissingTitle:
            skipped += 1
    store.upsert(merged)
    print(f"harvested={len(records)} merged={len(merged)} skipped={skipped}")
    if args.snapshot:
        store.save(args.snapshot)
        print(f"snapshot written: {args.snapshot}")
    return 0


def _cmd_query(args) -> int:
    graph = load_graph(args.taxonomy) if args.taxonomy else service.load_bundled_taxonomy()
    store = _open_store(args.snapshot)
    matches = textproc.match_query(args.text, args.lang, graph, args.k, args.threshold)
    if not matches:
        print("no taxonomy match")
    for rank, match in enumerate(matches, start=1):
        label = graph.nodes[match.node].label(args.lang)
        print(f"{rank}. {match.node} {label} ({match.score:.4f})")
    bag = textproc.text_to_lemmas(args.text, args.lang)
    results = store.search(bag, args.limit)
    if results:
        print("-- records --")
    for rank, (record, score) in enumerate(results, start=1):
        year = f" [{record.year}]" if record.year is not None else ""
        link = record.url or service.scholar_url(record)
        print(f"{rank}. ({score:.4f}) {record.title}{year} {link}")
    return 0


def _cmd_serve(args) -> int:
    flags = {
        key: getattr(args, key)
        for key in ("listen_address", "taxonomy_path", "snapshot_path", "stoplist_dir",
                    "default_lang", "k", "threshold", "result_limit")
    }
    config = service.load_config(path=args.config, env=dict(os.environ), flags=flags)
    graph, store, _ = service.build_state(config)
    api = service.Api(graph, store, config)
    host, port = config.host_port()
    httpd = service.make_server(api, host, port)
    print(f"listening on http://{host}:{httpd.server_address[1]}/ "
          f"(records={len(store)}, nodes={len(graph.nodes)})")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return 0


def _cmd_export(args) -> int:
    store = _open_store(args.snapshot)
    serialize = metafmt.bibtex_serialize if args.format == "bibtex" else metafmt.ris_serialize
    documents = []
    for record_id in args.ids:
        documents.append(serialize(store.get_record(record_id)))
    sys.stdout.write("".join(documents))
    return 0


if __name__ == "__main__":
    sys.exit(main())
