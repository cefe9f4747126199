"""Vertices and adjacency of the extension graph Γ^e, and truncated balls in it."""
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import networkx as nx

from errors import AmbientMismatchError
from graph_core import IDENTITY_TOKEN, SimplicialGraph, link, star
from words import NormalForm, ball, coset_min_rep, double_coset_member, format_word, invert, multiply, parse_word

logger = logging.getLogger(__name__)


class ExtVertex:
    """The cyclic parabolic g<v>g^-1, stored as (v, shortest element of g·G_st(v))"""

    __slots__ = ('type', 'conjugator', '_hash')

    def __init__(self, vertex_type: str, conjugator: NormalForm):
        graph = conjugator.graph
        graph.check_vertex(vertex_type)
        self.type = vertex_type
        self.conjugator = coset_min_rep(conjugator, star(graph, vertex_type))
        self._hash = hash((vertex_type, self.conjugator))

    @property
    def graph(self) -> SimplicialGraph:
        return self.conjugator.graph

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExtVertex):
            return NotImplemented
        return self.type == other.type and self.conjugator == other.conjugator

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"ExtVertex({format_word(self.conjugator)!r}, {self.type!r})"

    def __str__(self) -> str:
        return format_ext_vertex(self)

    def sort_key(self) -> Tuple:
        return (self.conjugator.sort_key(), self.graph.index[self.type])


def format_ext_vertex(u: ExtVertex) -> str:
    """CLI spelling "<conjugator>,<type>" """
    return f"{format_word(u.conjugator)},{u.type}"


def parse_ext_vertex(graph: SimplicialGraph, text: str) -> ExtVertex:
    word, sep, v = text.rpartition(',')
    if not sep:
        word, v = IDENTITY_TOKEN, text
    return ExtVertex(v.strip(), parse_word(graph, word))


def ext_vertex(g: NormalForm, v: str) -> ExtVertex:
    return ExtVertex(v, g)


def adjacent(u1: ExtVertex, u2: ExtVertex) -> bool:
    """Commuting cyclic parabolics: adjacent types and intersecting normalizer cosets"""
    graph = u1.graph
    if u2.graph is not graph and u2.graph != graph:
        raise AmbientMismatchError("Extension-graph vertices over different graphs")
    # same type is never adjacent: Γ has no loops
    if not graph.adjacent(u1.type, u2.type):
        return False
    difference = multiply(invert(u1.conjugator), u2.conjugator)
    return double_coset_member(difference, star(graph, u1.type), star(graph, u2.type))


def conj_action(g: NormalForm, u: ExtVertex) -> ExtVertex:
    return ExtVertex(u.type, multiply(g, u.conjugator))


def neighbors_complete(u: ExtVertex) -> bool:
    """True iff u has finitely many neighbours, i.e. st(v) ⊆ st(x) for every x in lk(v)"""
    graph = u.graph
    st = star(graph, u.type)
    return all(st <= star(graph, x) for x in link(graph, u.type))


@dataclass(frozen=True)
class ExtBall:
    base: ExtVertex
    radius: int
    length_bound: int
    vertices: Tuple[ExtVertex, ...]
    distances: Dict[ExtVertex, int]
    edges: Tuple[Tuple[ExtVertex, ExtVertex], ...]
    complete: Dict[ExtVertex, bool]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def neighbors(self, u: ExtVertex) -> List[ExtVertex]:
        return [b if a == u else a for a, b in self.edges if u in (a, b)]


def ext_ball(base: ExtVertex, radius: int, length_bound: int) -> ExtBall:
    """BFS in Γ^e; neighbours of u are the ext_vertex(conj_u·w, x), x in lk(type u), |w| <= L, that are adjacent to u"""
    graph = base.graph
    shifts = ball(graph, length_bound)
    distances: Dict[ExtVertex, int] = {base: 0}
    frontier = [base]
    for depth in range(radius):
        layer = []
        for u in frontier:
            for x in graph.ordered(link(graph, u.type)):
                for w in shifts:
                    candidate = ExtVertex(x, multiply(u.conjugator, w))
                    if candidate in distances or not adjacent(u, candidate):
                        continue
                    distances[candidate] = depth + 1
                    layer.append(candidate)
        frontier = sorted(layer, key=ExtVertex.sort_key)
        logger.debug(f"Extension ball layer {depth + 1}: {len(frontier)} vertices")

    vertices = tuple(sorted(distances, key=lambda u: (distances[u], u.sort_key())))
    position = {u: i for i, u in enumerate(vertices)}
    edges = []
    for i, a in enumerate(vertices):
        for b in vertices[i + 1:]:
            if graph.adjacent(a.type, b.type) and adjacent(a, b):
                edges.append((a, b))
    edges.sort(key=lambda e: (position[e[0]], position[e[1]]))

    complete = {}
    for u in vertices:
        finite = neighbors_complete(u)
        complete[u] = finite and all(
            ExtVertex(x, u.conjugator) in distances for x in link(graph, u.type)
        )
    truncated = sum(1 for u in vertices if not complete[u])
    if truncated:
        logger.info(f"Extension ball: {truncated} of {len(vertices)} vertices have truncated neighbourhoods")
    return ExtBall(base, radius, length_bound, vertices, distances, tuple(edges), complete)
