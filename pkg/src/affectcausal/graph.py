"""Typed causal graphs over situation and emotion nodes.

Edges come in three kinds: ``forward`` (situation causes emotion),
``backward`` (emotion causes situation) and ``latent`` (both members of
the pair are driven by an unobserved common factor, identified by a
latent id such as ``"H1"``).  A node pair carries at most one edge.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .errors import DataValidationError


class EdgeKind(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    LATENT = "latent"


@dataclass(frozen=True)
class Edge:
    """One causal relation between a situation node and an emotion node.

    ``src`` and ``dst`` point in the causal direction for directional
    kinds; latent edges are canonically oriented situation -> emotion.
    The optional fields record the screening-test audit of a learned
    edge (absent on planted ground-truth edges).
    """

    src: str
    dst: str
    kind: EdgeKind
    latent_id: Optional[str] = None
    s1: Optional[bool] = None
    s2: Optional[bool] = None
    eta_c: Optional[int] = None
    eta_m: Optional[int] = None

    @property
    def pair(self) -> frozenset:
        return frozenset((self.src, self.dst))

    def to_dict(self) -> dict:
        doc = {"from": self.src, "to": self.dst, "kind": self.kind.value}
        if self.latent_id is not None:
            doc["latent_id"] = self.latent_id
        for key in ("s1", "s2", "eta_c", "eta_m"):
            value = getattr(self, key)
            if value is not None:
                doc[key] = value
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Edge":
        return cls(
            src=doc["from"],
            dst=doc["to"],
            kind=EdgeKind(doc["kind"]),
            latent_id=doc.get("latent_id"),
            s1=doc.get("s1"),
            s2=doc.get("s2"),
            eta_c=doc.get("eta_c"),
            eta_m=doc.get("eta_m"),
        )


@dataclass
class CausalGraph:
    """Graph of situation/emotion nodes with typed, singly-occupied pairs."""

    situations: tuple
    emotions: tuple
    edges: tuple = field(default_factory=tuple)

    def __init__(self, situations, emotions, edges=()):
        self.situations = tuple(sorted(situations))
        self.emotions = tuple(sorted(emotions))
        overlap = set(self.situations) & set(self.emotions)
        if overlap:
            raise DataValidationError(
                f"names used as both situation and emotion: {sorted(overlap)}"
            )
        self.edges = ()
        for edge in edges:
            self.add_edge(edge)

    @property
    def nodes(self) -> tuple:
        return self.situations + self.emotions

    def add_edge(self, edge: Edge) -> None:
        if edge.src == edge.dst:
            raise DataValidationError(f"self-edge on node {edge.src!r}")
        known = set(self.nodes)
        for name in (edge.src, edge.dst):
            if name not in known:
                raise DataValidationError(f"edge endpoint {name!r} is not a node")
        if any(edge.pair == e.pair for e in self.edges):
            raise DataValidationError(
                f"pair ({edge.src!r}, {edge.dst!r}) already has an edge"
            )
        if edge.kind is EdgeKind.LATENT and edge.latent_id is None:
            raise DataValidationError("latent edge needs a latent_id")
        situations = set(self.situations)
        if edge.kind is EdgeKind.FORWARD and edge.src not in situations:
            raise DataValidationError("forward edge must run situation -> emotion")
        if edge.kind is EdgeKind.BACKWARD and edge.src not in set(self.emotions):
            raise DataValidationError("backward edge must run emotion -> situation")
        if edge.kind is EdgeKind.LATENT and edge.src not in situations:
            edge = replace(edge, src=edge.dst, dst=edge.src)
        self.edges = self.edges + (edge,)

    def edge_for_pair(self, a: str, b: str) -> Optional[Edge]:
        pair = frozenset((a, b))
        for edge in self.edges:
            if edge.pair == pair:
                return edge
        return None

    def sorted_edges(self) -> tuple:
        return tuple(sorted(self.edges, key=lambda e: (e.src, e.dst, e.kind.value)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CausalGraph):
            return NotImplemented
        return (
            self.situations == other.situations
            and self.emotions == other.emotions
            and self.sorted_edges() == other.sorted_edges()
        )

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {"name": n, "kind": "situation"} for n in self.situations
            ] + [
                {"name": n, "kind": "emotion"} for n in self.emotions
            ],
            "edges": [e.to_dict() for e in self.sorted_edges()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: dict) -> "CausalGraph":
        situations = [n["name"] for n in doc["nodes"] if n["kind"] == "situation"]
        emotions = [n["name"] for n in doc["nodes"] if n["kind"] == "emotion"]
        return cls(situations, emotions, [Edge.from_dict(e) for e in doc["edges"]])

    @classmethod
    def from_json(cls, text: str) -> "CausalGraph":
        return cls.from_dict(json.loads(text))

    def to_dot(self) -> str:
        """DOT-format rendering; latent factors appear as dashed diamond nodes."""
        lines = ["digraph causal {"]
        for name in self.situations:
            lines.append(f'  "{name}" [shape=box];')
        for name in self.emotions:
            lines.append(f'  "{name}" [shape=ellipse];')
        latents = sorted(
            {e.latent_id for e in self.edges if e.kind is EdgeKind.LATENT}
        )
        for latent in latents:
            lines.append(f'  "{latent}" [shape=diamond, style=dashed];')
        for edge in self.sorted_edges():
            if edge.kind is EdgeKind.LATENT:
                lines.append(f'  "{edge.latent_id}" -> "{edge.src}" [style=dashed];')
                lines.append(f'  "{edge.latent_id}" -> "{edge.dst}" [style=dashed];')
            else:
                lines.append(f'  "{edge.src}" -> "{edge.dst}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


#: Planted structures share the learned-graph representation; the latent
#: ids on latent edges are the factor definitions.
GroundTruthGraph = CausalGraph
