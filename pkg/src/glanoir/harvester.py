"""OAI-PMH 2.0 harvesting client.

Speaks the wire protocol over HTTP GET (verbs Identify and ListRecords with
``oai_dc`` metadata), follows resumption-token paging with a politeness
delay between page requests, and projects keyword filters onto harvested
Dublin Core metadata client-side.
"""

from __future__ import annotations

import re
import time
import urllib.error
import urllib.parse
import urllib.request
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterator

from . import textproc
from .bibstore import BibRecord
from .textproc import LemmaBag

_NS = {
    "oai": "http://www.openarchives.org/OAI/2.0/",
    "dc": "http://purl.org/dc/elements/1.1/",
}
_DC_NS = "{http://purl.org/dc/elements/1.1/}"

_DATE_ARG = re.compile(r"\d{4}-\d{2}-\d{2}$")

_USER_AGENT = "glanoir-harvester/0.1"


class HarvestError(Exception):
    pass


class TransportError(HarvestError):
    pass


class ProtocolError(HarvestError):
    pass


class UnsupportedVersion(ProtocolError):
    pass


class OaiError(HarvestError):
    """A protocol-level <error> response (other than noRecordsMatch)."""

    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code


class MissingTitle(HarvestError):
    pass


@dataclass
class OaiEndpoint:
    base_url: str
    politeness_delay: float = 1.0
    max_retries: int = 3
    backoff_base: float = 1.0

    def __post_init__(self) -> None:
        if "?" in self.base_url:
            raise ValueError("endpoint base URL must not carry a query string")


@dataclass
class OaiRecord:
    identifier: str
    datestamp: datetime
    deleted: bool = False
    dc: dict[str, list[str]] = field(default_factory=dict)


@dataclass
class ResumptionToken:
    value: str
    complete_list_size: int | None = None
    cursor: int | None = None


@dataclass
class RepositoryInfo:
    name: str
    protocol_version: str
    earliest_datestamp: str


def identify(ep: OaiEndpoint) -> RepositoryInfo:
    """Issue ``verb=Identify`` and check the protocol version is 2.0."""
    root = _fetch_xml(ep, {"verb": "Identify"})
    info = root.find("oai:Identify", _NS)
    if info is None:
        raise ProtocolError("response has no Identify element")
    name = info.findtext("oai:repositoryName", default="", namespaces=_NS)
    version = info.findtext("oai:protocolVersion", default="", namespaces=_NS)
    earliest = info.findtext("oai:earliestDatestamp", default="", namespaces=_NS)
    if not name or not version:
        raise ProtocolError("Identify response is missing required fields")
    if version != "2.0":
        raise UnsupportedVersion(f"protocol version {version!r}, need 2.0")
    return RepositoryInfo(name=name, protocol_version=version, earliest_datestamp=earliest)


def list_records(
    ep: OaiEndpoint,
    from_: str | None = None,
    until: str | None = None,
    set_: str | None = None,
) -> Iterator[OaiRecord]:
    """Lazily yield records in server order across resumption-token pages.

    ``noRecordsMatch`` means emptiness, not failure. Follow-up page requests
    carry only verb plus resumptionToken, and wait the endpoint's politeness
    delay first. A server that repeats a token is cut off with an OaiError
    instead of looping forever.
    """
    for name, value in (("from", from_), ("until", until)):
        if value is not None and not _DATE_ARG.match(value):
            raise ValueError(f"{name} must be UTC YYYY-MM-DD, got {value!r}")
    params = {"verb": "ListRecords", "metadataPrefix": "oai_dc"}
    if from_:
        params["from"] = from_
    if until:
        params["until"] = until
    if set_:
        params["set"] = set_

    previous_token: str | None = None
    first_page = True
    while True:
        if not first_page:
            time.sleep(ep.politeness_delay)
        first_page = False
        root = _fetch_xml(ep, params)
        error = root.find("oai:error", _NS)
        if error is not None:
            code = error.get("code", "unknown")
            if code == "noRecordsMatch":
                return
            raise OaiError(code, (error.text or "").strip())
        container = root.find("oai:ListRecords", _NS)
        if container is None:
            raise ProtocolError("response has no ListRecords element")
        for record_el in container.findall("oai:record", _NS):
            yield _parse_record(record_el)
        token = _parse_token(container)
        if token is None or not token.value:
            return
        if token.value == previous_token:
            raise OaiError("repeatedResumptionToken",
                           f"server repeated token {token.value!r}")
        previous_token = token.value
        params = {"verb": "ListRecords", "resumptionToken": token.value}


def harvest_filtered(
    ep: OaiEndpoint,
    keywords: LemmaBag | None,
    lang: str = "en",
    from_: str | None = None,
    until: str | None = None,
) -> list[OaiRecord]:
    """Harvest and keep records whose title/subject/description metadata
    shares at least one lemma with ``keywords``.

    Empty keywords disable the projection (everything but deletions is
    kept); deleted records never survive, having no metadata to project.
    """
    wanted = keywords.distinct() if keywords is not None else frozenset()
    kept = []
    for record in list_records(ep, from_=from_, until=until):
        if record.deleted:
            continue
        if not wanted:
            kept.append(record)
            continue
        projected = " ".join(
            value
            for element in ("title", "subject", "description")
            for value in record.dc.get(element, ())
        )
        lemmas = textproc.text_to_lemmas(projected, lang)
        if lemmas.distinct() & wanted:
            kept.append(record)
    return kept


def oai_to_bib(record: OaiRecord) -> BibRecord:
    """Bridge a harvested Dublin Core record into the internal record shape."""
    if record.deleted:
        raise ValueError(f"cannot convert deleted record {record.identifier}")
    titles = record.dc.get("title", [])
    if not titles or not titles[0].strip():
        raise MissingTitle(record.identifier)
    year = None
    for date_value in record.dc.get("date", []):
        found = re.search(r"\d{4}", date_value)
        if found:
            year = int(found.group())
            break
    url = next(
        (v for v in record.dc.get("identifier", []) if v.startswith(("http://", "https://"))),
        None,
    )
    entry_type = "misc"
    for type_value in record.dc.get("type", []):
        lowered = type_value.strip().lower()
        if lowered == "article":
            entry_type = "article"
            break
        if lowered == "book":
            entry_type = "book"
            break
    return BibRecord(
        id="oai:" + record.identifier,
        entry_type=entry_type,
        title=titles[0].strip(),
        authors=tuple(record.dc.get("creator", [])),
        year=year,
        url=url,
    )


# ---------------------------------------------------------------------------
# Wire plumbing
# ---------------------------------------------------------------------------

def _fetch_xml(ep: OaiEndpoint, params: dict[str, str]) -> ET.Element:
    payload = _request_bytes(ep, params)
    try:
        return ET.fromstring(payload)
    except ET.ParseError as exc:
        raise ProtocolError(f"malformed OAI-PMH XML: {exc}") from exc


def _request_bytes(ep: OaiEndpoint, params: dict[str, str]) -> bytes:
    url = ep.base_url + "?" + urllib.parse.urlencode(params)
    attempts = max(1, ep.max_retries)
    last_error: Exception | None = None
    for attempt in range(attempts):
        request = urllib.request.Request(url, headers={"User-Agent": _USER_AGENT})
        try:
            with urllib.request.urlopen(request, timeout=30) as response:
                return response.read()
        except urllib.error.HTTPError as exc:
            if exc.code != 503:
                raise TransportError(f"HTTP {exc.code} from {url}") from exc
            last_error = exc
            if attempt + 1 < attempts:
                time.sleep(_retry_wait(ep, attempt, exc.headers.get("Retry-After")))
        except OSError as exc:
            last_error = exc
            if attempt + 1 < attempts:
                time.sleep(_retry_wait(ep, attempt, None))
    raise TransportError(f"giving up on {url} after {attempts} attempts: {last_error}")


def _retry_wait(ep: OaiEndpoint, attempt: int, retry_after: str | None) -> float:
    wait = ep.backoff_base * (2 ** attempt)
    if retry_after:
        try:
            wait = max(wait, min(float(retry_after), 60.0))
        except ValueError:
            pass
    return wait


def _parse_record(record_el: ET.Element) -> OaiRecord:
    header = record_el.find("oai:header", _NS)
    if header is None:
        raise ProtocolError("record has no header")
    identifier = (header.findtext("oai:identifier", default="", namespaces=_NS)).strip()
    if not identifier:
        raise ProtocolError("record header has no identifier")
    datestamp = _parse_datestamp(
        header.findtext("oai:datestamp", default="", namespaces=_NS).strip()
    )
    deleted = header.get("status") == "deleted"
    dc: dict[str, list[str]] = {}
    if not deleted:
        metadata = record_el.find("oai:metadata", _NS)
        if metadata is not None:
            for element in metadata.iter():
                if element.tag.startswith(_DC_NS) and element.text and element.text.strip():
                    dc.setdefault(element.tag[len(_DC_NS):], []).append(element.text.strip())
    return OaiRecord(identifier=identifier, datestamp=datestamp, deleted=deleted, dc=dc)


def _parse_datestamp(value: str) -> datetime:
    """Accept day or second granularity, normalized to UTC."""
    for fmt in ("%Y-%m-%d", "%Y-%m-%dT%H:%M:%SZ"):
        try:
            return datetime.strptime(value, fmt).replace(tzinfo=timezone.utc)
        except ValueError:
            continue
    raise ProtocolError(f"bad datestamp {value!r}")


def _parse_token(container: ET.Element) -> ResumptionToken | None:
    token_el = container.find("oai:resumptionToken", _NS)
    if token_el is None:
        return None
    size = token_el.get("completeListSize")
    cursor = token_el.get("cursor")
    return ResumptionToken(
        value=(token_el.text or "").strip(),
        complete_list_size=int(size) if size else None,
        cursor=int(cursor) if cursor else None,
    )
