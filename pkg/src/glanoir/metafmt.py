"""Interop codecs: BibTeX parse/serialize, RIS serialize, OpenURL COinS
(Z39.88 context objects in spans), and Dublin Core meta tags.

These are bit-exact surfaces: serializers emit stable field order, fixed
line endings (LF for BibTeX, CRLF for RIS), and a percent-encoding that
leaves only the unreserved set raw, so reference managers can glean the
output byte for byte.
"""

from __future__ import annotations

import html
import logging
import re
import urllib.parse
from dataclasses import dataclass, field

from .bibstore import BibRecord

log = logging.getLogger(__name__)

COINS_VERSION = "Z39.88-2004"

_FMT_URI = {
    "journal": "info:ofi/fmt:kev:mtx:journal",
    "book": "info:ofi/fmt:kev:mtx:book",
}
_FMT_BY_URI = {uri: name for name, uri in _FMT_URI.items()}

_RIS_TYPE = {
    "article": "JOUR",
    "inproceedings": "CONF",
    "book": "BOOK",
    "incollection": "CHAP",
    "phdthesis": "THES",
    "mastersthesis": "THES",
    "misc": "GEN",
}

# serialization order for first-class BibTeX fields
_BIBTEX_FIELDS = ("author", "title", "venue", "year", "volume", "number", "pages", "url")

_BRACED_FIELDS = {"journal", "booktitle"}


class BadContextObject(ValueError):
    pass


@dataclass
class ContextObject:
    """Ordered Z39.88 KEV payload of one referent."""

    format: str
    pairs: list[tuple[str, str]] = field(default_factory=list)
    version: str = COINS_VERSION


@dataclass
class Diagnostic:
    position: int
    message: str


# ---------------------------------------------------------------------------
# BibTeX
# ---------------------------------------------------------------------------

def bibtex_serialize(record: BibRecord) -> str:
    """Emit one BibTeX entry, LF-terminated, fields in fixed order.

    Braces are not legal in our values (records originate from XML); any
    present are stripped with a logged warning.
    """
    lines = [f"@{record.entry_type}{{{record.id},"]
    venue_key = "booktitle" if record.entry_type in ("inproceedings", "incollection") else "journal"
    values = {
        "author": " and ".join(record.authors) if record.authors else None,
        "title": record.title,
        "venue": record.venue,
        "year": str(record.year) if record.year is not None else None,
        "volume": record.volume,
        "number": record.number,
        "pages": record.pages,
        "url": record.url,
    }
    for field_name in _BIBTEX_FIELDS:
        value = values[field_name]
        if value is None or value == "":
            continue
        key = venue_key if field_name == "venue" else field_name
        lines.append(f"  {key} = {{{_strip_braces(value, record.id, key)}}},")
    for key in sorted(record.extra):
        lines.append(f"  {key} = {{{_strip_braces(record.extra[key], record.id, key)}}},")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _strip_braces(value: str, record_id: str, key: str) -> str:
    if "{" in value or "}" in value:
        log.warning("stripping braces from %s.%s", record_id, key)
        return value.replace("{", "").replace("}", "")
    return value


def bibtex_parse(text: str) -> tuple[list[BibRecord], list[Diagnostic]]:
    """Parse BibTeX entries; malformed entries are skipped, not fatal.

    Returns the records plus position-bearing diagnostics for everything
    skipped or repaired along the way.
    """
    records: list[BibRecord] = []
    diagnostics: list[Diagnostic] = []
    pos = 0
    while True:
        start = text.find("@", pos)
        if start < 0:
            break
        entry, end, diag = _parse_entry(text, start)
        if diag is not None:
            diagnostics.append(diag)
        if entry is not None:
            records.append(entry)
        pos = max(end, start + 1)
    return records, diagnostics


def _parse_entry(text: str, start: int):
    """Parse one @type{...} entry starting at ``start``.

    Returns (record | None, resume_position, diagnostic | None). On brace
    imbalance the resume position is the next '@' so parsing can continue.
    """
    brace = text.find("{", start)
    if brace < 0:
        return None, len(text), Diagnostic(start, "entry has no opening brace")
    entry_type = text[start + 1 : brace].strip().lower()
    body, end = _balanced(text, brace)
    if body is None:
        nxt = text.find("@", start + 1)
        return None, (nxt if nxt >= 0 else len(text)), Diagnostic(start, "unbalanced braces in entry")

    comma = body.find(",")
    if comma < 0:
        key, rest = body.strip(), ""
    else:
        key, rest = body[:comma].strip(), body[comma + 1 :]
    if not key:
        return None, end, Diagnostic(start, "entry has no citation key")

    fields: dict[str, str] = {}
    for name, value in _parse_fields(rest):
        fields.setdefault(name, value)

    diag = None
    if entry_type not in ("article", "inproceedings", "book", "incollection",
                          "phdthesis", "mastersthesis", "misc"):
        diag = Diagnostic(start, f"unknown entry type {entry_type!r}, treated as misc")
        entry_type = "misc"

    authors = tuple(a.strip() for a in fields.pop("author", "").split(" and ") if a.strip())
    title = fields.pop("title", "")
    year_raw = fields.pop("year", "")
    year = int(year_raw) if re.fullmatch(r"[1-9]\d{3}", year_raw) else None
    if year_raw and year is None:
        fields["year"] = year_raw
    venue = fields.pop("journal", None)
    if venue is None:
        venue = fields.pop("booktitle", None)
    else:
        fields.pop("booktitle", None)

    record = BibRecord(
        id=key,
        entry_type=entry_type,
        title=title,
        authors=authors,
        year=year,
        venue=venue,
        volume=fields.pop("volume", None),
        number=fields.pop("number", None),
        pages=fields.pop("pages", None),
        url=fields.pop("url", None),
        extra=fields,
    )
    return record, end, diag


def _balanced(text: str, open_brace: int):
    """Return (content, position after closing brace) or (None, -1)."""
    depth = 0
    for i in range(open_brace, len(text)):
        c = text[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return text[open_brace + 1 : i], i + 1
    return None, -1


def _parse_fields(body: str):
    i = 0
    n = len(body)
    while i < n:
        while i < n and (body[i].isspace() or body[i] == ","):
            i += 1
        if i >= n:
            return
        eq = body.find("=", i)
        if eq < 0:
            return
        name = body[i:eq].strip().lower()
        i = eq + 1
        while i < n and body[i].isspace():
            i += 1
        if i >= n:
            return
        if body[i] == "{":
            value, after = _balanced(body, i)
            if value is None:
                return
            i = after
        elif body[i] == '"':
            close = body.find('"', i + 1)
            if close < 0:
                return
            value = body[i + 1 : close]
            i = close + 1
        else:
            j = i
            while j < n and body[j] != ",":
                j += 1
            value = body[i:j].strip()
            i = j
        if name:
            yield name, value.strip()


# ---------------------------------------------------------------------------
# COinS / Z39.88
# ---------------------------------------------------------------------------

def coins_encode(record: BibRecord) -> ContextObject:
    """Map a record onto a Z39.88 context object.

    Articles and conference papers use the journal matrix (atitle/jtitle,
    genre article/proceeding); everything else uses the book matrix with
    the title as btitle.
    """
    pairs: list[tuple[str, str]] = []
    if record.entry_type in ("article", "inproceedings"):
        fmt = "journal"
        pairs.append(("rft.genre", "article" if record.entry_type == "article" else "proceeding"))
        pairs.append(("rft.atitle", record.title))
        if record.venue:
            pairs.append(("rft.jtitle", record.venue))
    else:
        fmt = "book"
        pairs.append(("rft.btitle", record.title))
    for author in record.authors:
        pairs.append(("rft.au", author))
    if record.year is not None:
        pairs.append(("rft.date", str(record.year)))
    if record.volume:
        pairs.append(("rft.volume", record.volume))
    if record.number:
        pairs.append(("rft.issue", record.number))
    if record.pages:
        first, dash, last = record.pages.partition("-")
        if dash and first and last and "-" not in last:
            pairs.append(("rft.spage", first))
            pairs.append(("rft.epage", last))
        else:
            pairs.append(("rft.pages", record.pages))
    return ContextObject(format=fmt, pairs=pairs)


def coins_kev(obj: ContextObject) -> str:
    """Render the KEV string: percent-encoded, '&'-separated pairs."""
    parts = [
        "ctx_ver=" + _pct(obj.version),
        "rft_val_fmt=" + _pct(_FMT_URI[obj.format]),
    ]
    parts.extend(f"{_pct(key)}={_pct(value)}" for key, value in obj.pairs)
    return "&".join(parts)


def coins_span(obj: ContextObject) -> str:
    """The empty detection span; the title attribute carries the KEV payload."""
    kev = coins_kev(obj)
    escaped = kev.replace("&", "&amp;").replace('"', "&quot;")
    return f'<span class="Z3988" title="{escaped}"></span>'


def _pct(value: str) -> str:
    # quote(safe="") leaves exactly the unreserved set {A-Za-z0-9-._~} raw
    return urllib.parse.quote(value, safe="")


def coins_decode(kev: str) -> ContextObject:
    """Decode a title-attribute payload (already HTML-entity-unescaped).

    '+' is kept literal (strict %20 convention). Unknown keys are preserved
    in order; repeated keys other than rft.au keep their first value.
    """
    version = None
    fmt = None
    pairs: list[tuple[str, str]] = []
    seen: set[str] = set()
    for chunk in kev.split("&"):
        if not chunk:
            continue
        raw_key, _, raw_value = chunk.partition("=")
        key = urllib.parse.unquote(raw_key)
        value = urllib.parse.unquote(raw_value)
        if key == "ctx_ver":
            version = value
        elif key == "rft_val_fmt":
            if value not in _FMT_BY_URI:
                raise BadContextObject(f"unsupported referent format {value!r}")
            fmt = _FMT_BY_URI[value]
        elif key != "rft.au" and key in seen:
            log.warning("repeated key %s in context object, keeping first value", key)
        else:
            seen.add(key)
            pairs.append((key, value))
    if version != COINS_VERSION:
        raise BadContextObject(f"missing or foreign ctx_ver: {version!r}")
    if fmt is None:
        raise BadContextObject("missing rft_val_fmt")
    return ContextObject(format=fmt, pairs=pairs, version=version)


# ---------------------------------------------------------------------------
# RIS
# ---------------------------------------------------------------------------

def ris_serialize(record: BibRecord) -> str:
    """One RIS record, CRLF line endings, TY first and ER last."""
    lines = [f"TY  - {_RIS_TYPE[record.entry_type]}"]
    for author in record.authors:
        lines.append(f"AU  - {author}")
    lines.append(f"TI  - {record.title}")
    if record.year is not None:
        lines.append(f"PY  - {record.year}")
    if record.venue:
        lines.append(f"JO  - {record.venue}")
    if record.pages:
        first, dash, last = record.pages.partition("-")
        if dash and first and last and "-" not in last:
            lines.append(f"SP  - {first}")
            lines.append(f"EP  - {last}")
        else:
            lines.append(f"SP  - {record.pages}")
    if record.url:
        lines.append(f"UR  - {record.url}")
    lines.append("ER  - ")
    return "\r\n".join(lines) + "\r\n"


# ---------------------------------------------------------------------------
# Dublin Core meta tags
# ---------------------------------------------------------------------------

def dc_meta_emit(record: BibRecord) -> str:
    """Dublin Core <meta> tags for embedding in an HTML head."""
    metas = [("DC.title", record.title)]
    metas.extend(("DC.creator", author) for author in record.authors)
    if record.year is not None:
        metas.append(("DC.date", str(record.year)))
    if record.url:
        metas.append(("DC.identifier", record.url))
    metas.append(("DC.type", record.entry_type))
    return "\n".join(
        f'<meta name="{name}" content="{html.escape(value, quote=True)}">'
        for name, value in metas
    )
