"""Causal graph invariants and serialization."""

import pytest

from affectcausal import CausalGraph, DataValidationError, Edge, EdgeKind


def small_graph():
    return CausalGraph(["S1", "S2"], ["E1", "E2"])


class TestEdgeInsertion:
    def test_rejects_self_edge(self):
        g = small_graph()
        with pytest.raises(DataValidationError):
            g.add_edge(Edge("S1", "S1", EdgeKind.FORWARD))

    def test_rejects_duplicate_pair(self):
        g = small_graph()
        g.add_edge(Edge("S1", "E1", EdgeKind.FORWARD))
        with pytest.raises(DataValidationError):
            g.add_edge(Edge("E1", "S1", EdgeKind.BACKWARD))

    def test_rejects_unknown_node(self):
        g = small_graph()
        with pytest.raises(DataValidationError):
            g.add_edge(Edge("S1", "E9", EdgeKind.FORWARD))

    def test_forward_requires_situation_source(self):
        g = small_graph()
        with pytest.raises(DataValidationError):
            g.add_edge(Edge("E1", "S1", EdgeKind.FORWARD))

    def test_latent_requires_id(self):
        g = small_graph()
        with pytest.raises(DataValidationError):
            g.add_edge(Edge("S1", "E1", EdgeKind.LATENT))

    def test_latent_canonical_orientation(self):
        g = small_graph()
        g.add_edge(Edge("E1", "S1", EdgeKind.LATENT, latent_id="H1"))
        edge = g.edges[0]
        assert (edge.src, edge.dst) == ("S1", "E1")


class TestSerialization:
    def test_json_round_trip(self):
        g = small_graph()
        g.add_edge(Edge("S1", "E1", EdgeKind.FORWARD, s1=True, s2=False, eta_c=1))
        g.add_edge(Edge("E2", "S2", EdgeKind.BACKWARD, s1=False, s2=True, eta_m=2))
        again = CausalGraph.from_json(g.to_json())
        assert again == g
        assert again.to_json() == g.to_json()

    def test_json_schema_keys(self):
        g = small_graph()
        g.add_edge(Edge("S1", "E1", EdgeKind.LATENT, latent_id="H1", s1=True, s2=True))
        doc = g.to_dict()
        assert {n["kind"] for n in doc["nodes"]} == {"situation", "emotion"}
        edge = doc["edges"][0]
        assert edge["from"] == "S1" and edge["to"] == "E1"
        assert edge["kind"] == "latent" and edge["latent_id"] == "H1"

    def test_dot_rendering(self):
        g = small_graph()
        g.add_edge(Edge("S1", "E1", EdgeKind.FORWARD))
        g.add_edge(Edge("S2", "E2", EdgeKind.LATENT, latent_id="H1"))
        dot = g.to_dot()
        assert '"S1" -> "E1";' in dot
        assert '"H1" -> "S2" [style=dashed];' in dot
        assert '"H1" -> "E2" [style=dashed];' in dot
        assert dot == g.to_dot()  # deterministic

    def test_node_order_is_canonical(self):
        a = CausalGraph(["S2", "S1"], ["E2", "E1"])
        b = CausalGraph(["S1", "S2"], ["E1", "E2"])
        assert a.to_json() == b.to_json()
