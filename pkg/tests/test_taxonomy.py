from __future__ import annotations

import io
from collections import Counter

import pytest

from glanoir import taxonomy
from glanoir.taxonomy import (
    CyclicHierarchy,
    MalformedGraph,
    MultipleRoots,
    NoRoot,
    UnknownNode,
    children,
    crossrefs,
    load_graph,
    node_own_terms,
    node_term_bag,
    path_to_root,
    subtree_term_bags,
)

GRAPHML_HEAD = """<?xml version="1.0" encoding="UTF-8"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns">
  <key id="label_fr" for="node" attr.name="label_fr" attr.type="string"/>
  <key id="label_en" for="node" attr.name="label_en" attr.type="string"/>
  <key id="kind" for="edge" attr.name="kind" attr.type="string"/>
  <graph edgedefault="directed">
"""
GRAPHML_TAIL = "  </graph>\n</graphml>\n"


def graphml(body: str) -> bytes:
    return (GRAPHML_HEAD + body + GRAPHML_TAIL).encode("utf-8")


def node(node_id: str, en: str = "", fr: str = "") -> str:
    parts = [f'<node id="{node_id}">']
    if en:
        parts.append(f'<data key="label_en">{en}</data>')
    if fr:
        parts.append(f'<data key="label_fr">{fr}</data>')
    parts.append("</node>")
    return "".join(parts)


def edge(source: str, target: str, kind: str = "") -> str:
    data = f'<data key="kind">{kind}</data>' if kind else ""
    return f'<edge source="{source}" target="{target}">{data}</edge>'


class TestLoadGraph:
    def test_single_node(self):
        g = load_graph(graphml(node("A", en="Alpha")))
        assert g.root == "A"
        assert list(g.nodes) == ["A"]
        assert g.edges == []

    def test_fragment_counts(self, fragment_graph):
        g = fragment_graph
        assert len(g.nodes) == 4
        kinds = Counter(e.kind for e in g.edges)
        assert kinds == {"hierarchy": 3, "crossref": 1}
        assert g.root == "H"

    def test_accepts_byte_stream(self, fixtures_dir):
        raw = (fixtures_dir / "ccs_fragment.graphml").read_bytes()
        g = load_graph(io.BytesIO(raw))
        assert g.root == "H"

    def test_deterministic(self, fixtures_dir):
        raw = (fixtures_dir / "ccs_fragment.graphml").read_bytes()
        first, second = load_graph(raw), load_graph(raw)
        assert first.nodes == second.nodes
        assert first.edges == second.edges
        assert first.root == second.root

    def test_dangling_edge(self):
        doc = graphml(node("A", en="Alpha") + node("B", en="Beta") + edge("B", "Z"))
        with pytest.raises(MalformedGraph):
            load_graph(doc)

    def test_not_xml(self):
        with pytest.raises(MalformedGraph):
            load_graph(b"this is not xml <")

    def test_missing_labels_in_both_languages(self):
        with pytest.raises(MalformedGraph):
            load_graph(graphml(node("A")))

    def test_duplicate_node_id(self):
        with pytest.raises(MalformedGraph):
            load_graph(graphml(node("A", en="x") + node("A", en="y")))

    def test_unknown_edge_kind(self):
        doc = graphml(node("A", en="a") + node("B", en="b") + edge("A", "B", "sibling"))
        with pytest.raises(MalformedGraph):
            load_graph(doc)

    def test_two_hierarchy_parents(self):
        doc = graphml(
            node("A", en="a") + node("B", en="b") + node("C", en="c")
            + edge("A", "B") + edge("A", "C") + edge("B", "C")
        )
        with pytest.raises(MalformedGraph):
            load_graph(doc)

    def test_cycle(self):
        doc = graphml(
            node("R", en="r") + node("A", en="a") + node("B", en="b")
            + edge("R", "A") * 0 + edge("A", "B") + edge("B", "A")
        )
        with pytest.raises((CyclicHierarchy, NoRoot)):
            load_graph(doc)

    def test_cycle_beside_root(self):
        doc = graphml(
            node("R", en="r") + node("A", en="a") + node("B", en="b")
            + edge("A", "B") + edge("B", "A")
        )
        with pytest.raises(CyclicHierarchy):
            load_graph(doc)

    def test_multiple_roots(self):
        doc = graphml(node("A", en="a") + node("B", en="b"))
        with pytest.raises(MultipleRoots):
            load_graph(doc)

    def test_no_nodes(self):
        with pytest.raises(NoRoot):
            load_graph(graphml(""))

    def test_absent_kind_defaults_to_hierarchy(self):
        doc = graphml(node("A", en="a") + node("B", en="b") + edge("A", "B"))
        g = load_graph(doc)
        assert g.edges[0].kind == "hierarchy"

    def test_crossref_self_loop_rejected(self):
        doc = graphml(node("A", en="a") + edge("A", "A", "crossref"))
        with pytest.raises(MalformedGraph):
            load_graph(doc)


class TestNavigation:
    def test_children(self, fragment_graph):
        assert children(fragment_graph, "H.3") == ["H.3.3"]
        assert children(fragment_graph, "H") == ["H.3", "I.7"]

    def test_children_of_leaf(self, fragment_graph):
        assert children(fragment_graph, "H.3.3") == []

    def test_children_unknown(self, fragment_graph):
        with pytest.raises(UnknownNode):
            children(fragment_graph, "missing")

    def test_crossrefs(self, fragment_graph):
        assert crossrefs(fragment_graph, "H.3.3") == ["I.7"]
        assert crossrefs(fragment_graph, "H") == []

    def test_crossrefs_directed_no_symmetric_closure(self, fragment_graph):
        assert crossrefs(fragment_graph, "I.7") == []

    def test_crossrefs_unknown(self, fragment_graph):
        with pytest.raises(UnknownNode):
            crossrefs(fragment_graph, "missing")

    def test_path_to_root(self, fragment_graph):
        assert path_to_root(fragment_graph, "H.3.3") == ["H.3.3", "H.3", "H"]

    def test_path_of_root(self, fragment_graph):
        assert path_to_root(fragment_graph, "H") == ["H"]

    def test_path_unknown(self, fragment_graph):
        with pytest.raises(UnknownNode):
            path_to_root(fragment_graph, "missing")

    def test_every_path_ends_at_root(self, ccs_graph):
        for node_id in ccs_graph.nodes:
            path = path_to_root(ccs_graph, node_id)
            assert path[0] == node_id
            assert path[-1] == ccs_graph.root

    def test_children_counts_equal_hierarchy_edges(self, ccs_graph):
        total = sum(len(children(ccs_graph, n)) for n in ccs_graph.nodes)
        assert total == sum(1 for e in ccs_graph.edges if e.kind == "hierarchy")


class TestTermBags:
    def test_own_label_lemmas(self, fragment_graph):
        assert set(node_own_terms(fragment_graph, "H.3.3", "en")) == {"inform", "search", "retriev"}

    def test_single_letter_label(self):
        g = load_graph(graphml(node("A", en="X")))
        assert set(node_term_bag(g, "A", "en")) == {"x"}

    def test_subtree_union(self, fragment_graph):
        own = node_own_terms(fragment_graph, "H.3", "en")
        child = node_own_terms(fragment_graph, "H.3.3", "en")
        assert node_term_bag(fragment_graph, "H.3", "en") == own + child

    def test_descendant_inclusion(self, ccs_graph):
        for parent_id in ("H", "H.3", "I"):
            parent_bag = node_term_bag(ccs_graph, parent_id, "en")
            for child_id in children(ccs_graph, parent_id):
                child_bag = node_term_bag(ccs_graph, child_id, "en")
                assert not child_bag - parent_bag

    def test_unknown_node(self, fragment_graph):
        with pytest.raises(UnknownNode):
            node_term_bag(fragment_graph, "missing", "en")

    def test_subtree_term_bags_matches_per_node(self, fragment_graph):
        bags = subtree_term_bags(fragment_graph, "en")
        for node_id in fragment_graph.nodes:
            assert bags[node_id] == node_term_bag(fragment_graph, node_id, "en")

    def test_language_fallback(self):
        doc = graphml(node("R", en="Root label") + node("F", fr="Libellé") + edge("R", "F"))
        g = load_graph(doc)
        assert g.nodes["F"].label("en") == "Libellé"
        assert set(node_own_terms(g, "F", "en")) == {"libellé"}

    def test_aliases_contribute(self):
        doc = (
            GRAPHML_HEAD
            + '<node id="A"><data key="label_en">Databases</data>'
            + '<data key="alias_en">data storage</data></node>'
            + GRAPHML_TAIL
        )
        g = load_graph(doc.encode("utf-8"))
        terms = set(node_own_terms(g, "A", "en"))
        assert {"data", "storag"} <= terms
        # singular and plural label forms land on the same lemma
        assert terms & set(node_own_terms(
            load_graph((GRAPHML_HEAD + node("B", en="Database") + GRAPHML_TAIL).encode()), "B", "en"
        ))


class TestBundledCcs:
    def test_loads_and_is_bilingual(self, ccs_graph):
        assert ccs_graph.root == "CCS"
        assert len(ccs_graph.nodes) > 90
        for node_id in ("H", "H.3", "H.3.3", "I.7", "K.8"):
            n = ccs_graph.nodes[node_id]
            assert n.labels["en"] and n.labels["fr"]

    def test_second_level_everywhere(self, ccs_graph):
        for top in "ABCDEFGHIJK":
            assert children(ccs_graph, top)

    def test_crossref_hop_present(self, ccs_graph):
        assert "I.7" in crossrefs(ccs_graph, "H.3.3")
