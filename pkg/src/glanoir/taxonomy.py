"""Bilingual concept graph: graphML loading, validation, and navigation.

The graph carries two edge kinds: hierarchy edges (a forest rooted at a
single node) and directed cross-references between arbitrary distinct
nodes. Node data keys are ``label_fr``/``label_en`` plus optional
``alias_fr``/``alias_en`` (semicolon-separated); the edge data key ``kind``
is ``hierarchy`` or ``crossref`` and defaults to ``hierarchy``.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Mapping

from . import textproc

HIERARCHY = "hierarchy"
CROSSREF = "crossref"

_NODE_KEYS = ("label_fr", "label_en", "alias_fr", "alias_en")


class TaxonomyError(Exception):
    pass


class MalformedGraph(TaxonomyError):
    pass


class CyclicHierarchy(TaxonomyError):
    pass


class MultipleRoots(TaxonomyError):
    pass


class NoRoot(TaxonomyError):
    pass


class UnknownNode(TaxonomyError, KeyError):
    def __str__(self) -> str:
        return f"unknown node: {self.args[0]}"


@dataclass(frozen=True)
class TaxonomyNode:
    id: str
    labels: Mapping[str, str]
    aliases: Mapping[str, tuple[str, ...]]

    def label(self, lang: str) -> str:
        """Display label in ``lang``, falling back to the other language."""
        textproc.check_lang(lang)
        if lang in self.labels:
            return self.labels[lang]
        return next(iter(self.labels.values()))

    def alias_terms(self, lang: str) -> tuple[str, ...]:
        """Aliases in ``lang``; falls back to the other language when absent."""
        textproc.check_lang(lang)
        if self.aliases.get(lang):
            return self.aliases[lang]
        for other, values in self.aliases.items():
            if other != lang and values:
                return values
        return ()


@dataclass(frozen=True)
class TaxonomyEdge:
    source: str
    target: str
    kind: str


@dataclass
class TaxonomyGraph:
    """Validated, immutable-after-load concept graph."""

    nodes: dict[str, TaxonomyNode]
    edges: list[TaxonomyEdge]
    root: str
    _parent: dict[str, str] = field(repr=False, default_factory=dict)
    _children: dict[str, list[str]] = field(repr=False, default_factory=dict)
    _crossrefs: dict[str, list[str]] = field(repr=False, default_factory=dict)

    def require(self, node_id: str) -> TaxonomyNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None


def load_graph(source: IO[bytes] | str | bytes) -> TaxonomyGraph:
    """Parse and validate a graphML byte stream (or path, or raw bytes)."""
    try:
        if isinstance(source, bytes):
            root_el = ET.fromstring(source)
        else:
            root_el = ET.parse(source).getroot()
    except ET.ParseError as exc:
        raise MalformedGraph(f"not well-formed graphML: {exc}") from exc

    key_names = {}
    for key_el in _iter_local(root_el, "key"):
        key_id = key_el.get("id")
        if key_id:
            key_names[key_id] = key_el.get("attr.name", key_id)

    nodes: dict[str, TaxonomyNode] = {}
    edges: list[TaxonomyEdge] = []
    graph_el = next(_iter_local(root_el, "graph"), None)
    if graph_el is None:
        raise MalformedGraph("no <graph> element")

    for node_el in _iter_local(graph_el, "node"):
        node_id = node_el.get("id") or ""
        if not node_id:
            raise MalformedGraph("node without id")
        if node_id in nodes:
            raise MalformedGraph(f"duplicate node id {node_id!r}")
        data = _read_data(node_el, key_names)
        labels = {
            lang: data[f"label_{lang}"].strip()
            for lang in textproc.LANGUAGES
            if data.get(f"label_{lang}", "").strip()
        }
        if not labels:
            raise MalformedGraph(f"node {node_id!r} has no label in either language")
        aliases = {
            lang: tuple(
                alias.strip()
                for alias in data.get(f"alias_{lang}", "").split(";")
                if alias.strip()
            )
            for lang in textproc.LANGUAGES
        }
        nodes[node_id] = TaxonomyNode(id=node_id, labels=labels, aliases=aliases)

    for edge_el in _iter_local(graph_el, "edge"):
        source_id = edge_el.get("source") or ""
        target_id = edge_el.get("target") or ""
        data = _read_data(edge_el, key_names)
        kind = data.get("kind", "").strip() or HIERARCHY
        if kind not in (HIERARCHY, CROSSREF):
            raise MalformedGraph(f"edge {source_id!r}->{target_id!r} has unknown kind {kind!r}")
        for endpoint in (source_id, target_id):
            if endpoint not in nodes:
                raise MalformedGraph(
                    f"edge {source_id!r}->{target_id!r} references unknown node {endpoint!r}"
                )
        if kind == CROSSREF and source_id == target_id:
            raise MalformedGraph(f"crossref self-loop on {source_id!r}")
        edges.append(TaxonomyEdge(source=source_id, target=target_id, kind=kind))

    parent: dict[str, str] = {}
    children: dict[str, list[str]] = {node_id: [] for node_id in nodes}
    crossrefs: dict[str, list[str]] = {node_id: [] for node_id in nodes}
    for edge in edges:
        if edge.kind == HIERARCHY:
            if edge.target in parent:
                raise MalformedGraph(f"node {edge.target!r} has more than one hierarchy parent")
            parent[edge.target] = edge.source
            children[edge.source].append(edge.target)
        else:
            crossrefs[edge.source].append(edge.target)
    for child_list in children.values():
        child_list.sort()

    _check_acyclic(nodes, parent)
    roots = [node_id for node_id in nodes if node_id not in parent]
    if not roots:
        raise NoRoot("graph has no node without a hierarchy parent")
    if len(roots) > 1:
        raise MultipleRoots(f"multiple hierarchy roots: {sorted(roots)}")

    return TaxonomyGraph(
        nodes=nodes,
        edges=edges,
        root=roots[0],
        _parent=parent,
        _children=children,
        _crossrefs=crossrefs,
    )


def _iter_local(element: ET.Element, local_name: str):
    for child in element.iter():
        if child.tag.rsplit("}", 1)[-1] == local_name:
            yield child


def _read_data(element: ET.Element, key_names: Mapping[str, str]) -> dict[str, str]:
    values = {}
    for data_el in _iter_local(element, "data"):
        key_id = data_el.get("key", "")
        name = key_names.get(key_id, key_id)
        values[name] = "".join(data_el.itertext())
    return values


def _check_acyclic(nodes: Mapping[str, TaxonomyNode], parent: Mapping[str, str]) -> None:
    safe: set[str] = set()
    for start in nodes:
        trail = []
        seen = set()
        current = start
        while current in parent and current not in safe:
            if current in seen:
                raise CyclicHierarchy(f"hierarchy cycle through {current!r}")
            seen.add(current)
            trail.append(current)
            current = parent[current]
        safe.update(trail)


def children(g: TaxonomyGraph, node_id: str) -> list[str]:
    """Hierarchy children of ``node_id``, ordered lexicographically by id."""
    g.require(node_id)
    return list(g._children[node_id])


def crossrefs(g: TaxonomyGraph, node_id: str) -> list[str]:
    """Targets of cross-reference edges leaving ``node_id`` (directed)."""
    g.require(node_id)
    return list(g._crossrefs[node_id])


def path_to_root(g: TaxonomyGraph, node_id: str) -> list[str]:
    """Breadcrumb path [node, parent, ..., root]."""
    g.require(node_id)
    path = [node_id]
    while path[-1] in g._parent:
        path.append(g._parent[path[-1]])
    return path


def node_own_terms(
    g: TaxonomyGraph, node_id: str, lang: str, pipeline: textproc.Pipeline | None = None
) -> Counter:
    """Lemma bag of the node's own label and aliases in ``lang``."""
    node = g.require(node_id)
    text = " ".join((node.label(lang),) + node.alias_terms(lang))
    return textproc.text_to_lemmas(text, lang, pipeline).lemmas


def node_term_bag(
    g: TaxonomyGraph, node_id: str, lang: str, pipeline: textproc.Pipeline | None = None
) -> Counter:
    """Lemma bag of the node plus all of its hierarchy descendants."""
    g.require(node_id)
    bag = Counter()
    stack = [node_id]
    while stack:
        current = stack.pop()
        bag.update(node_own_terms(g, current, lang, pipeline))
        stack.extend(g._children[current])
    return bag


def subtree_term_bags(
    g: TaxonomyGraph, lang: str, pipeline: textproc.Pipeline | None = None
) -> dict[str, Counter]:
    """Term bags for every node, accumulated bottom-up in one pass."""
    bags: dict[str, Counter] = {}
    order: list[str] = []
    stack = [g.root]
    while stack:
        current = stack.pop()
        order.append(current)
        stack.extend(g._children[current])
    for node_id in reversed(order):
        bag = Counter(node_own_terms(g, node_id, lang, pipeline))
        for child in g._children[node_id]:
            bag.update(bags[child])
        bags[node_id] = bag
    return bags
