"""HTTP service tying the pipeline together: query and node endpoints that
pair taxonomy matches with internal search results, export and graph
endpoints for the UI, and a server-rendered results page that embeds COinS
spans and Dublin Core metas so reference managers can glean it directly.

Responses are deterministic: JSON bodies use sorted keys and compact
separators, so an identical request against an identical store snapshot
yields identical bytes.
"""

from __future__ import annotations

import html
import json
import threading
import urllib.parse
from collections import Counter
from dataclasses import dataclass, field, fields as dataclass_fields
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from importlib import resources
from pathlib import Path

from . import metafmt, taxonomy, textproc
from .bibstore import BibRecord, BibStore, FacetCounts, UnknownRecord
from .taxonomy import TaxonomyGraph, UnknownNode
from .textproc import Pipeline

ENV_PREFIX = "GLANOIR_"

_EXPORTERS = {
    "bibtex": (metafmt.bibtex_serialize, "export.bib"),
    "ris": (metafmt.ris_serialize, "export.ris"),
}


class BadConfig(Exception):
    pass


@dataclass
class Config:
    taxonomy_path: str | None = None
    snapshot_path: str | None = None
    stoplist_dir: str | None = None
    listen_address: str = "127.0.0.1:8080"
    default_lang: str = "en"
    k: int = 3
    threshold: float = 0.1
    result_limit: int = 20

    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen_address.rpartition(":")
        if not host or not port.isdigit():
            raise BadConfig(f"bad listen_address {self.listen_address!r}, want host:port")
        return host, int(port)


def load_config(
    path: str | Path | None = None,
    env: dict[str, str] | None = None,
    flags: dict[str, object] | None = None,
) -> Config:
    """Assemble the configuration with precedence file < env < flags."""
    values: dict[str, object] = {}
    known = {f.name: f.type for f in dataclass_fields(Config)}
    if path is not None:
        for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            key, eq, value = stripped.partition("=")
            if not eq:
                raise BadConfig(f"{path}:{lineno}: expected 'key = value'")
            key = key.strip()
            if key not in known:
                raise BadConfig(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value.strip()
    for key in known:
        env_key = ENV_PREFIX + key.upper()
        if env is not None and env_key in env:
            values[key] = env[env_key]
    for key, value in (flags or {}).items():
        if value is not None:
            values[key] = value

    for key in ("k", "result_limit"):
        if key in values:
            try:
                values[key] = int(values[key])
            except (TypeError, ValueError):
                raise BadConfig(f"{key} must be an integer") from None
    if "threshold" in values:
        try:
            values["threshold"] = float(values["threshold"])
        except (TypeError, ValueError):
            raise BadConfig("threshold must be a number") from None

    config = Config(**values)
    _validate_config(config)
    return config


def _validate_config(config: Config) -> None:
    for key in ("taxonomy_path", "snapshot_path", "stoplist_dir"):
        value = getattr(config, key)
        if value is not None and not Path(value).exists():
            raise BadConfig(f"{key} does not exist: {value}")
    if config.k < 1:
        raise BadConfig("k must be >= 1")
    if not 0.0 <= config.threshold <= 1.0:
        raise BadConfig("threshold must be within [0, 1]")
    if config.result_limit < 1:
        raise BadConfig("result_limit must be >= 1")
    if config.default_lang not in textproc.LANGUAGES:
        raise BadConfig(f"default_lang must be one of {textproc.LANGUAGES}")
    config.host_port()


def build_state(config: Config) -> tuple[TaxonomyGraph, BibStore, Pipeline]:
    """Load taxonomy, store, and pipeline per the configuration."""
    pipeline = Pipeline.from_dir(config.stoplist_dir) if config.stoplist_dir else Pipeline.bundled()
    if config.taxonomy_path:
        graph = taxonomy.load_graph(config.taxonomy_path)
    else:
        graph = load_bundled_taxonomy()
    if config.snapshot_path:
        store = BibStore.load(config.snapshot_path, pipeline=pipeline)
    else:
        store = BibStore(pipeline=pipeline)
    return graph, store, pipeline


def load_bundled_taxonomy() -> TaxonomyGraph:
    data = resources.files("glanoir") / "data" / "acm_ccs1998.graphml"
    with data.open("rb") as fh:
        return taxonomy.load_graph(fh)


def scholar_url(record: BibRecord) -> str:
    """Fallback article link: quoted-title Scholar query plus the first
    author's family-name token."""
    title = record.title.replace('"', "")
    url = "https://scholar.google.com/scholar?q=%22" + urllib.parse.quote(title, safe="") + "%22"
    if record.authors:
        name = record.authors[0]
        family = name.partition(",")[0] if "," in name else (name.split() or [""])[-1]
        family = family.strip()
        if family:
            url += "+" + urllib.parse.quote(family, safe="")
    return url


@dataclass
class Response:
    status: int
    content_type: str
    body: bytes
    headers: dict[str, str] = field(default_factory=dict)


def _json_response(status: int, payload: object, headers: dict[str, str] | None = None) -> Response:
    body = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return Response(
        status=status,
        content_type="application/json; charset=utf-8",
        body=body.encode("utf-8"),
        headers={"Access-Control-Allow-Origin": "*", **(headers or {})},
    )


def _error(status: int, message: str, **extra) -> Response:
    return _json_response(status, {"error": message, **extra})


class Api:
    """Route table plus handlers over one immutable graph and a store."""

    def __init__(self, graph: TaxonomyGraph, store: BibStore, config: Config | None = None):
        self.graph = graph
        self.store = store
        self.config = config or Config()
        self.pipeline = store.pipeline
        self.counters: Counter = Counter()
        self._counter_lock = threading.Lock()

    # -- dispatch -------------------------------------------------------------

    def dispatch(self, path: str, params: dict[str, list[str]]) -> Response:
        if path == "/api/query":
            return self._count("api/query", self.query(params))
        if path.startswith("/api/node/"):
            node_id = urllib.parse.unquote(path[len("/api/node/"):])
            return self._count("api/node", self.node(node_id, params))
        if path == "/api/export":
            return self._count("api/export", self.export(params))
        if path == "/api/graph":
            return self._count("api/graph", self.graph_document())
        if path == "/api/stats":
            return self._count("api/stats", self.stats())
        if path == "/results":
            return self._count("results", self.results_page(params))
        if path == "/":
            return self._count("index", self.index_page())
        return _error(404, f"no such path: {path}")

    def _count(self, name: str, response: Response) -> Response:
        with self._counter_lock:
            self.counters[name] += 1
        return response

    # -- parameter helpers ------------------------------------------------------

    def _lang(self, params: dict[str, list[str]]) -> str | None:
        lang = params.get("lang", [self.config.default_lang])[0] or self.config.default_lang
        return lang if lang in textproc.LANGUAGES else None

    def _limit(self, params: dict[str, list[str]]) -> int | None:
        raw = params.get("limit", [str(self.config.result_limit)])[0]
        if not raw.isdigit() or int(raw) < 1:
            return None
        return int(raw)

    # -- handlers ---------------------------------------------------------------

    def query(self, params: dict[str, list[str]]) -> Response:
        q = params.get("q", [""])[0]
        if not q.strip():
            return _error(400, "query parameter q must be non-empty")
        lang = self._lang(params)
        if lang is None:
            return _error(400, "lang must be fr or en")
        limit = self._limit(params)
        if limit is None:
            return _error(400, "limit must be a positive integer")
        return _json_response(200, self._search_payload(q, lang, limit))

    def node(self, node_id: str, params: dict[str, list[str]]) -> Response:
        lang = self._lang(params)
        if lang is None:
            return _error(400, "lang must be fr or en")
        limit = self._limit(params)
        if limit is None:
            return _error(400, "limit must be a positive integer")
        try:
            self.graph.require(node_id)
        except UnknownNode:
            return _error(404, f"unknown node: {node_id}")
        matches = [self._match_json(node_id, 1.0, "match", lang)]
        matches.extend(
            self._match_json(target, 0.0, "crossref", lang)
            for target in taxonomy.crossrefs(self.graph, node_id)
        )
        results = self.store.search_node(self.graph, node_id, lang, limit)
        payload = {
            "query_echo": node_id,
            "lang": lang,
            "matches": matches,
            "results": [self._result_item(record, score) for record, score in results],
            "facets": _facets_json(self.store.facets([record.id for record, _ in results])),
        }
        return _json_response(200, payload)

    def export(self, params: dict[str, list[str]]) -> Response:
        ids = [part for chunk in params.get("ids", []) for part in chunk.split(",") if part]
        if not ids:
            return _error(400, "ids parameter is required")
        fmt = params.get("format", [""])[0]
        if fmt not in _EXPORTERS:
            return _error(400, f"unknown format: {fmt or '(missing)'}")
        state = self.store.snapshot()
        missing = [record_id for record_id in ids if record_id not in state.records]
        if missing:
            return _error(404, "unknown records", missing=missing)
        serialize, filename = _EXPORTERS[fmt]
        body = "".join(serialize(state.records[record_id]) for record_id in ids)
        return Response(
            status=200,
            content_type="text/plain; charset=utf-8",
            body=body.encode("utf-8"),
            headers={
                "Access-Control-Allow-Origin": "*",
                "Content-Disposition": f'attachment; filename="{filename}"',
            },
        )

    def graph_document(self) -> Response:
        nodes = []
        for node_id in sorted(self.graph.nodes):
            node = self.graph.nodes[node_id]
            nodes.append(
                {
                    "id": node.id,
                    "labels": dict(node.labels),
                    "aliases": {lang: list(values) for lang, values in node.aliases.items() if values},
                }
            )
        edges = sorted(
            ({"source": e.source, "target": e.target, "kind": e.kind} for e in self.graph.edges),
            key=lambda e: (e["kind"], e["source"], e["target"]),
        )
        return _json_response(200, {"root": self.graph.root, "nodes": nodes, "edges": edges})

    def stats(self) -> Response:
        with self._counter_lock:
            payload = dict(self.counters)
        return _json_response(200, payload)

    # -- payload assembly ---------------------------------------------------------

    def _search_payload(self, q: str, lang: str, limit: int) -> dict:
        matches = textproc.match_query(
            q, lang, self.graph, self.config.k, self.config.threshold, self.pipeline
        )
        bag = textproc.text_to_lemmas(q, lang, self.pipeline)
        results = self.store.search(bag, limit)
        payload = {
            "query_echo": q,
            "lang": lang,
            "matches": [self._match_json(m.node, m.score, "match", lang) for m in matches],
            "results": [self._result_item(record, score) for record, score in results],
            "facets": _facets_json(self.store.facets([record.id for record, _ in results])),
        }
        if not matches:
            near = textproc.rank_nodes(q, lang, self.graph, self.pipeline)[: self.config.k]
            payload["near_matches"] = [
                self._match_json(m.node, m.score, "near", lang) for m in near
            ]
        return payload

    def _match_json(self, node_id: str, score: float, kind: str, lang: str) -> dict:
        node = self.graph.nodes[node_id]
        return {
            "node": node_id,
            "score": score,
            "kind": kind,
            "label": node.label(lang),
            "labels": dict(node.labels),
            "path": taxonomy.path_to_root(self.graph, node_id),
        }

    def _result_item(self, record: BibRecord, score: float) -> dict:
        link = record.url or scholar_url(record)
        return {
            "record": _record_json(record),
            "score": score,
            "link": link,
            "link_kind": "direct" if record.url else "scholar",
            "coins": metafmt.coins_span(metafmt.coins_encode(record)),
        }

    # -- HTML ---------------------------------------------------------------------

    def index_page(self) -> Response:
        body = (
            "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
            "<title>glanoir</title>\n</head>\n<body>\n"
            "<h1>glanoir</h1>\n"
            "<p>Bibliographic search routed through a bilingual taxonomy.</p>\n"
            "<ul>\n"
            "<li><a href=\"/results?q=information%20retrieval&amp;lang=en\">HTML results page</a></li>\n"
            "<li><a href=\"/api/graph\">taxonomy graph (JSON)</a></li>\n"
            "<li><a href=\"/api/stats\">endpoint counters</a></li>\n"
            "</ul>\n</body>\n</html>\n"
        )
        return Response(200, "text/html; charset=utf-8", body.encode("utf-8"))

    def results_page(self, params: dict[str, list[str]]) -> Response:
        q = params.get("q", [""])[0]
        if not q.strip():
            return Response(
                400, "text/html; charset=utf-8",
                b"<!DOCTYPE html>\n<html><body><p>Missing query.</p></body></html>\n",
            )
        lang = self._lang(params)
        if lang is None:
            return Response(
                400, "text/html; charset=utf-8",
                b"<!DOCTYPE html>\n<html><body><p>Unsupported language.</p></body></html>\n",
            )
        limit = self._limit(params)
        if limit is None:
            return Response(
                400, "text/html; charset=utf-8",
                b"<!DOCTYPE html>\n<html><body><p>Bad limit.</p></body></html>\n",
            )
        payload = self._search_payload(q, lang, limit)
        return Response(
            200, "text/html; charset=utf-8", render_results_page(payload, lang).encode("utf-8")
        )


def _record_json(record: BibRecord) -> dict:
    data = {"id": record.id, "entry_type": record.entry_type, "title": record.title,
            "authors": list(record.authors)}
    for key in ("year", "venue", "pages", "volume", "number", "url"):
        value = getattr(record, key)
        if value is not None:
            data[key] = value
    if record.extra:
        data["extra"] = dict(record.extra)
    return data


def _facets_json(counts: FacetCounts) -> dict:
    return {
        "by_year": {str(year): n for year, n in sorted(counts.by_year.items(), key=lambda kv: str(kv[0]))},
        "by_venue": dict(sorted(counts.by_venue.items())),
        "by_type": dict(sorted(counts.by_type.items())),
    }


def render_results_page(payload: dict, lang: str) -> str:
    """Server-rendered, glanable results page.

    Each displayed record contributes its Dublin Core metas to the head and
    exactly one COinS span next to its entry, so detection tools pick the
    records up from the page itself.
    """
    esc = html.escape
    q = payload["query_echo"]
    head_metas = []
    for item in payload["results"]:
        record = _record_from_json(item["record"])
        head_metas.append(metafmt.dc_meta_emit(record))

    lines = [
        "<!DOCTYPE html>",
        f'<html lang="{esc(lang)}">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>Results: {esc(q)}</title>",
    ]
    lines.extend(head_metas)
    lines.extend(["</head>", "<body>", f"<h1>Results for: {esc(q)}</h1>"])

    lines.append('<section class="matches">')
    lines.append("<h2>Taxonomy matches</h2>")
    if payload["matches"]:
        lines.append("<ol>")
        for match in payload["matches"]:
            crumb = " &gt; ".join(esc(p) for p in reversed(match["path"]))
            lines.append(
                f'<li><a href="/api/node/{urllib.parse.quote(match["node"], safe="")}">'
                f'{esc(match["node"])}</a> {esc(match["label"])} '
                f'(score {match["score"]:.4f}) <span class="path">{crumb}</span></li>'
            )
        lines.append("</ol>")
    else:
        lines.append("<p>No taxonomy branch is close to this query.</p>")
    lines.append("</section>")

    lines.append('<section class="records">')
    lines.append("<h2>Records</h2>")
    if payload["results"]:
        lines.append("<ol>")
        for item in payload["results"]:
            record = item["record"]
            authors = ", ".join(record.get("authors", []))
            venue_bits = " ".join(
                str(record[k]) for k in ("venue", "year") if record.get(k) is not None
            )
            export_id = urllib.parse.quote(record["id"], safe="")
            lines.append('<li class="record">')
            lines.append(f'<a class="title" href="{esc(item["link"], quote=True)}">{esc(record["title"])}</a>')
            if authors:
                lines.append(f'<span class="authors">{esc(authors)}</span>')
            if venue_bits:
                lines.append(f'<span class="venue">{esc(venue_bits)}</span>')
            lines.append(f'<span class="linkkind">{item["link_kind"]}</span>')
            lines.append(
                f'<a class="export" href="/api/export?ids={export_id}&amp;format=bibtex">BibTeX</a>'
            )
            lines.append(
                f'<a class="export" href="/api/export?ids={export_id}&amp;format=ris">RIS</a>'
            )
            lines.append(item["coins"])
            lines.append("</li>")
        lines.append("</ol>")
    else:
        lines.append("<p>No records matched; try one of the taxonomy branches above.</p>")
    lines.append("</section>")
    lines.extend(["</body>", "</html>"])
    return "\n".join(lines) + "\n"


def _record_from_json(data: dict) -> BibRecord:
    return BibRecord(
        id=data["id"],
        entry_type=data["entry_type"],
        title=data["title"],
        authors=tuple(data.get("authors", ())),
        year=data.get("year"),
        venue=data.get("venue"),
        pages=data.get("pages"),
        volume=data.get("volume"),
        number=data.get("number"),
        url=data.get("url"),
    )


# ---------------------------------------------------------------------------
# HTTP plumbing
# ---------------------------------------------------------------------------

def make_server(api: Api, host: str, port: int) -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args) -> None:
            pass

        def do_GET(self) -> None:
            split = urllib.parse.urlsplit(self.path)
            params = urllib.parse.parse_qs(split.query, keep_blank_values=True)
            response = api.dispatch(split.path, params)
            self.send_response(response.status)
            self.send_header("Content-Type", response.content_type)
            self.send_header("Content-Length", str(len(response.body)))
            for name, value in response.headers.items():
                self.send_header(name, value)
            self.end_headers()
            self.wfile.write(response.body)

    return ThreadingHTTPServer((host, port), Handler)
