"""Mock OAI-PMH data provider for protocol-conformance tests.

A declarative fixture (dict or JSON file) drives everything: the record
set, how it is cut into resumption-token pages, and injected failures
(protocol error codes on a given page, HTTP 503 bursts, repeated tokens).
Every request is appended to ``request_log`` with a monotonic timestamp so
tests can assert inter-request politeness delays.

Fixture keys:
    repository_name, protocol_version, earliest_datestamp,
    records: [{identifier, datestamp, deleted?, dc: {element: [values]}}],
    page_sizes: [2, 2, 1],
    final_token_style: "empty" | "absent",
    errors: [{on_page: 2, code: "badResumptionToken", message?}],
    http_failure: {times: 2, status: 503, retry_after?},
    repeat_token_on_page: 2
"""

from __future__ import annotations

import json
import threading
import time
import urllib.parse
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from xml.sax.saxutils import escape


@dataclass
class LoggedRequest:
    timestamp: float
    params: dict[str, str]


class MockOaiServer:
    def __init__(self, fixture: dict | str | Path):
        if isinstance(fixture, (str, Path)):
            fixture = json.loads(Path(fixture).read_text("utf-8"))
        self.fixture = fixture
        self.request_log: list[LoggedRequest] = []
        self._failures_left = int(fixture.get("http_failure", {}).get("times", 0))
        self._lock = threading.Lock()
        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), _make_handler(self))
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/oai"

    def start(self) -> "MockOaiServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self) -> "MockOaiServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    # -- page bookkeeping ----------------------------------------------------

    def pages(self) -> list[list[dict]]:
        records = self.fixture.get("records", [])
        sizes = self.fixture.get("page_sizes") or [len(records)]
        pages, start = [], 0
        for size in sizes:
            pages.append(records[start : start + size])
            start += size
        return pages

    def take_failure(self) -> dict | None:
        with self._lock:
            if self._failures_left > 0:
                self._failures_left -= 1
                return self.fixture["http_failure"]
        return None

    def error_for_page(self, page: int) -> dict | None:
        for error in self.fixture.get("errors", []):
            if error.get("on_page", 1) == page:
                return error
        return None


def _make_handler(server: MockOaiServer):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args) -> None:
            pass

        def do_GET(self) -> None:
            query = urllib.parse.urlsplit(self.path).query
            params = {k: v[0] for k, v in urllib.parse.parse_qs(query).items()}
            server.request_log.append(LoggedRequest(time.monotonic(), params))

            failure = server.take_failure()
            if failure is not None:
                headers = {}
                if failure.get("retry_after") is not None:
                    headers["Retry-After"] = str(failure["retry_after"])
                self._send(failure.get("status", 503), "service unavailable", headers,
                           content_type="text/plain")
                return

            verb = params.get("verb", "")
            if verb == "Identify":
                self._send(200, self._identify())
            elif verb == "ListRecords":
                self._send(200, self._list_records(params))
            else:
                self._send(200, _wrap('<error code="badVerb">unknown verb</error>'))

        def _send(self, status: int, body: str, headers: dict | None = None,
                  content_type: str = "text/xml; charset=utf-8") -> None:
            payload = body.encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(payload)))
            for name, value in (headers or {}).items():
                self.send_header(name, value)
            self.end_headers()
            self.wfile.write(payload)

        def _identify(self) -> str:
            fx = server.fixture
            return _wrap(
                "<Identify>"
                f"<repositoryName>{escape(fx.get('repository_name', 'Mock Repo'))}</repositoryName>"
                f"<baseURL>{escape(server.base_url)}</baseURL>"
                f"<protocolVersion>{escape(fx.get('protocol_version', '2.0'))}</protocolVersion>"
                f"<earliestDatestamp>{escape(fx.get('earliest_datestamp', '2000-01-01'))}</earliestDatestamp>"
                "<deletedRecord>persistent</deletedRecord>"
                "<granularity>YYYY-MM-DD</granularity>"
                "</Identify>"
            )

        def _list_records(self, params: dict[str, str]) -> str:
            token = params.get("resumptionToken")
            if token is not None:
                if not token.startswith("t") or not token[1:].isdigit():
                    return _wrap('<error code="badResumptionToken">unknown token</error>')
                page = int(token[1:]) + 1
            else:
                if params.get("metadataPrefix") != "oai_dc":
                    return _wrap('<error code="cannotDisseminateFormat">oai_dc only</error>')
                page = 1

            error = server.error_for_page(page)
            if error is not None:
                code = escape(error["code"])
                message = escape(error.get("message", ""))
                return _wrap(f'<error code="{code}">{message}</error>')

            pages = server.pages()
            if not server.fixture.get("records"):
                return _wrap('<error code="noRecordsMatch">nothing here</error>')
            if page > len(pages):
                return _wrap('<error code="badResumptionToken">past the end</error>')

            body = ["<ListRecords>"]
            for record in pages[page - 1]:
                body.append(_render_record(record))
            total = len(server.fixture.get("records", []))
            cursor = sum(len(p) for p in pages[: page - 1])
            if page < len(pages):
                issued = page - 1 if server.fixture.get("repeat_token_on_page") == page else page
                body.append(
                    f'<resumptionToken completeListSize="{total}" cursor="{cursor}">'
                    f"t{issued}</resumptionToken>"
                )
            elif server.fixture.get("final_token_style", "empty") == "empty":
                body.append(f'<resumptionToken completeListSize="{total}" cursor="{cursor}"/>')
            body.append("</ListRecords>")
            return _wrap("".join(body))

    return Handler


def _render_record(record: dict) -> str:
    parts = ["<record>"]
    status = ' status="deleted"' if record.get("deleted") else ""
    parts.append(
        f"<header{status}>"
        f"<identifier>{escape(record['identifier'])}</identifier>"
        f"<datestamp>{escape(record.get('datestamp', '2000-01-01'))}</datestamp>"
        "</header>"
    )
    if not record.get("deleted"):
        parts.append(
            "<metadata>"
            '<oai_dc:dc xmlns:oai_dc="http://www.openarchives.org/OAI/2.0/oai_dc/" '
            'xmlns:dc="http://purl.org/dc/elements/1.1/">'
        )
        for element, values in record.get("dc", {}).items():
            for value in values:
                parts.append(f"<dc:{element}>{escape(value)}</dc:{element}>")
        parts.append("</oai_dc:dc></metadata>")
    parts.append("</record>")
    return "".join(parts)


def _wrap(inner: str) -> str:
    return (
        '<?xml version="1.0" encoding="UTF-8"?>'
        '<OAI-PMH xmlns="http://www.openarchives.org/OAI/2.0/">'
        "<responseDate>2024-01-01T00:00:00Z</responseDate>"
        "<request>http://mock/oai</request>"
        f"{inner}"
        "</OAI-PMH>"
    )
