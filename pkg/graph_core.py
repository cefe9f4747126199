"""Finite simplicial graphs, subgraph operators and the rigidity predicates.

Vertex identifiers are strings. The order in which vertices are given at
construction is the total order used for every lexicographic tie-break in the
rest of the toolkit.
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from config import get_settings
from errors import GraphFormatError, RaagError, UnknownVertexError

logger = logging.getLogger(__name__)

VertexSet = FrozenSet[str]
Automorphism = Dict[str, str]

# names must survive the word syntax ("a^-2") and the CLI separators ("word@a,b")
_VERTEX_NAME = re.compile(r'^[^\s^@,;|]+$')
# spelling of the identity element in word syntax
IDENTITY_TOKEN = 'id'


class SimplicialGraph:
    """Defining graph of a RAAG. Immutable after construction."""

    __slots__ = ('vertices', 'edges', 'index', 'adjacency', '_hash')

    def __init__(self, vertices: Sequence[str], edges: Iterable[Sequence[str]] = ()):
        names = tuple(str(v) for v in vertices)
        index: Dict[str, int] = {}
        for position, name in enumerate(names):
            if not _VERTEX_NAME.match(name) or name == IDENTITY_TOKEN:
                raise GraphFormatError(f"Invalid vertex name: {name!r}")
            if name in index:
                raise GraphFormatError(f"Repeated vertex: {name}")
            index[name] = position

        adjacency: Dict[str, set] = {name: set() for name in names}
        edge_set = set()
        for edge in edges:
            pair = tuple(str(x) for x in edge)
            if len(pair) != 2:
                raise GraphFormatError(f"Edge must have two endpoints: {list(pair)}")
            a, b = pair
            for endpoint in pair:
                if endpoint not in index:
                    raise GraphFormatError(f"Edge {a}-{b} uses unlisted vertex {endpoint}")
            if a == b:
                raise GraphFormatError(f"Loop edge at {a}")
            key = frozenset(pair)
            if key in edge_set:
                raise GraphFormatError(f"Repeated edge {a}-{b}")
            edge_set.add(key)
            adjacency[a].add(b)
            adjacency[b].add(a)

        self.vertices: Tuple[str, ...] = names
        self.index: Dict[str, int] = index
        self.edges: FrozenSet[FrozenSet[str]] = frozenset(edge_set)
        self.adjacency: Dict[str, FrozenSet[str]] = {v: frozenset(n) for v, n in adjacency.items()}
        self._hash = hash((self.vertices, self.edges))

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[str]:
        return iter(self.vertices)

    def __contains__(self, v: object) -> bool:
        return v in self.index

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, SimplicialGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"SimplicialGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def adjacent(self, a: str, b: str) -> bool:
        return b in self.adjacency[a]

    def check_vertex(self, v: str) -> str:
        if v not in self.index:
            raise UnknownVertexError(f"Unknown vertex: {v}")
        return v

    def vertex_set(self, vs: Iterable[str]) -> VertexSet:
        """Validate and freeze a subset of the vertices"""
        result = frozenset(vs)
        for v in result:
            self.check_vertex(v)
        return result

    def ordered(self, vs: Iterable[str]) -> Tuple[str, ...]:
        """Vertices of a subset in the fixed total order"""
        return tuple(sorted(vs, key=self.index.__getitem__))

    def edge_list(self) -> List[Tuple[str, str]]:
        pairs = [self.ordered(e) for e in self.edges]
        return sorted(pairs, key=lambda p: (self.index[p[0]], self.index[p[1]]))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edge_list())
        return g


def link(graph: SimplicialGraph, v: str) -> VertexSet:
    return graph.adjacency[graph.check_vertex(v)]


def star(graph: SimplicialGraph, v: str) -> VertexSet:
    return link(graph, v) | {v}


def orthogonal(graph: SimplicialGraph, subset: Iterable[str]) -> VertexSet:
    """Vertices outside the subset adjacent to every vertex of it (all vertices for the empty set)"""
    subset = graph.vertex_set(subset)
    result = set(graph.vertices)
    for v in subset:
        result &= graph.adjacency[v]
    return frozenset(result - subset)


def induced_subgraph(graph: SimplicialGraph, subset: Iterable[str]) -> SimplicialGraph:
    subset = graph.vertex_set(subset)
    vertices = graph.ordered(subset)
    edges = [e for e in graph.edge_list() if e[0] in subset and e[1] in subset]
    return SimplicialGraph(vertices, edges)


def is_clique(graph: SimplicialGraph, subset: Iterable[str]) -> bool:
    members = graph.ordered(graph.vertex_set(subset))
    return all(graph.adjacent(a, b) for i, a in enumerate(members) for b in members[i + 1:])


def join(g1: SimplicialGraph, g2: SimplicialGraph) -> SimplicialGraph:
    """Disjoint union plus every edge between the two vertex sets"""
    clash = set(g1.vertices) & set(g2.vertices)
    if clash:
        raise GraphFormatError(f"Vertex names collide in join: {sorted(clash)}")
    edges = g1.edge_list() + g2.edge_list()
    edges += [(a, b) for a in g1.vertices for b in g2.vertices]
    return SimplicialGraph(g1.vertices + g2.vertices, edges)


def complement(graph: SimplicialGraph) -> SimplicialGraph:
    vs = graph.vertices
    edges = [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:] if not graph.adjacent(a, b)]
    return SimplicialGraph(vs, edges)


def join_decomposition(graph: SimplicialGraph) -> List[SimplicialGraph]:
    """Maximal join factors: induced subgraphs on the components of the complement"""
    components = nx.connected_components(complement(graph).to_networkx())
    ordered = sorted((graph.ordered(c) for c in components), key=lambda c: graph.index[c[0]])
    return [induced_subgraph(graph, c) for c in ordered]


def cliques(graph: SimplicialGraph, maximal_only: bool = False) -> List[VertexSet]:
    """All cliques (the empty one included) or only the maximal ones, in a fixed order"""
    if not graph.vertices:
        return [frozenset()]
    nxg = graph.to_networkx()
    if maximal_only:
        found = [frozenset(c) for c in nx.find_cliques(nxg)]
    else:
        found = [frozenset()] + [frozenset(c) for c in nx.enumerate_all_cliques(nxg)]
    return sorted(found, key=lambda c: (len(c), [graph.index[v] for v in graph.ordered(c)]))


def flag_completion_simplices(graph: SimplicialGraph) -> List[VertexSet]:
    """Simplices of the flag completion of the graph (non-empty cliques)"""
    return [c for c in cliques(graph) if c]


def automorphisms(graph: SimplicialGraph, fixed: Iterable[str] = ()) -> Iterator[Automorphism]:
    """Enumerate automorphisms fixing `fixed` pointwise, identity first.

    Backtracking over the vertex order; candidates are pruned by degree and by
    the sorted degree sequence of the neighbourhood.
    """
    limit = get_settings().automorphism_limit
    if len(graph) > limit:
        raise RaagError(f"Automorphism enumeration refused above {limit} vertices (got {len(graph)})")
    fixed = graph.vertex_set(fixed)
    vs = graph.vertices
    degree = {v: len(graph.adjacency[v]) for v in vs}
    signature = {v: (degree[v], tuple(sorted(degree[u] for u in graph.adjacency[v]))) for v in vs}

    mapping: Dict[str, str] = {}
    used: set = set()

    def extend(position: int) -> Iterator[Automorphism]:
        if position == len(vs):
            yield dict(mapping)
            return
        v = vs[position]
        candidates = (v,) if v in fixed else vs
        for image in candidates:
            if image in used or signature[image] != signature[v]:
                continue
            if image in fixed and image != v:
                continue
            consistent = all(
                graph.adjacent(v, u) == graph.adjacent(image, mapping[u])
                for u in vs[:position]
            )
            if not consistent:
                continue
            mapping[v] = image
            used.add(image)
            yield from extend(position + 1)
            used.discard(image)
            del mapping[v]

    yield from extend(0)


def is_automorphism(graph: SimplicialGraph, theta: Automorphism) -> bool:
    if set(theta) != set(graph.vertices) or set(theta.values()) != set(graph.vertices):
        return False
    # a bijection sending edges to edges is onto the edge set
    return all(graph.adjacent(theta[a], theta[b]) for a, b in graph.edge_list())


def _is_identity(theta: Automorphism) -> bool:
    return all(k == v for k, v in theta.items())


@dataclass(frozen=True)
class RigidityReport:
    holds: bool
    witness: Optional[Tuple[str, Automorphism]] = None


def is_star_rigid(graph: SimplicialGraph) -> RigidityReport:
    """True iff, for every v, the only automorphism fixing st(v) pointwise is the identity"""
    for v in graph.vertices:
        for theta in automorphisms(graph, fixed=star(graph, v)):
            if not _is_identity(theta):
                logger.debug(f"Star of {v} is not rigid: {theta}")
                return RigidityReport(False, (v, theta))
    return RigidityReport(True)


@dataclass(frozen=True)
class SquareReport:
    holds: bool
    witness: Optional[Tuple[str, str, str, str]] = None


def has_induced_square(graph: SimplicialGraph) -> SquareReport:
    """Look for a 4-cycle a-b-c-d-a with neither diagonal present"""
    vs = graph.vertices
    for i, a in enumerate(vs):
        for c in vs[i + 1:]:
            if graph.adjacent(a, c):
                continue
            common = graph.ordered(graph.adjacency[a] & graph.adjacency[c])
            for j, b in enumerate(common):
                for d in common[j + 1:]:
                    if not graph.adjacent(b, d):
                        return SquareReport(True, (a, b, c, d))
    return SquareReport(False)


@dataclass(frozen=True)
class OutFinitenessReport:
    finite: bool
    dominations: List[Tuple[str, str]] = field(default_factory=list)
    separating_stars: List[str] = field(default_factory=list)


def out_finiteness(graph: SimplicialGraph) -> OutFinitenessReport:
    """Finiteness criterion for Out(G): no domination lk(v) ⊆ st(w), v != w, and no separating star"""
    dominations = [
        (v, w)
        for v in graph.vertices
        for w in graph.vertices
        if v != w and link(graph, v) <= star(graph, w)
    ]
    separating = []
    nxg = graph.to_networkx()
    for v in graph.vertices:
        rest = nxg.subgraph(set(graph.vertices) - star(graph, v))
        if rest.number_of_nodes() and not nx.is_connected(rest):
            separating.append(v)
    return OutFinitenessReport(not dominations and not separating, dominations, separating)


@dataclass(frozen=True)
class GluingData:
    """Copy labels for Γ_n = n copies of Γ glued along st(v).

    `labels` maps every vertex of the glued graph to (original vertex, copy index);
    star vertices are shared and carry copy index None.
    """
    original: SimplicialGraph
    glued: SimplicialGraph
    v: str
    n: int
    labels: Dict[str, Tuple[str, Optional[int]]]

    def copies_of(self, w: str) -> List[str]:
        self.original.check_vertex(w)
        if w in star(self.original, self.v):
            return [w]
        return [name for name, (orig, j) in self.labels.items() if orig == w]

    def copy_index(self, u: str) -> Optional[int]:
        return self.labels[self.glued.check_vertex(u)][1]

    def original_vertex(self, u: str) -> str:
        return self.labels[self.glued.check_vertex(u)][0]

    def copy_subgraph(self, j: int) -> SimplicialGraph:
        """The j-th copy of Γ inside Γ_n (shared star included)"""
        members = [u for u, (_, k) in self.labels.items() if k is None or k == j]
        return induced_subgraph(self.glued, members)


def copy_name(w: str, j: int) -> str:
    return f"{w}[{j}]"


def glue_along_star(graph: SimplicialGraph, v: str, n: int) -> GluingData:
    """n copies of the graph glued along st(v); for n = 1 the input graph itself"""
    if n < 1:
        raise RaagError(f"Number of copies must be at least 1, got {n}")
    st = star(graph, v)
    if n == 1:
        labels = {u: (u, None if u in st else 1) for u in graph.vertices}
        return GluingData(graph, graph, v, 1, labels)

    outside = [u for u in graph.vertices if u not in st]
    labels: Dict[str, Tuple[str, Optional[int]]] = {u: (u, None) for u in graph.vertices if u in st}
    vertices = [u for u in graph.vertices if u in st]
    for j in range(1, n + 1):
        for u in outside:
            labels[copy_name(u, j)] = (u, j)
            vertices.append(copy_name(u, j))

    def rename(u: str, j: int) -> str:
        return u if u in st else copy_name(u, j)

    edges = set()
    for a, b in graph.edge_list():
        if a in st and b in st:
            edges.add((a, b))
            continue
        for j in range(1, n + 1):
            edges.add((rename(a, j), rename(b, j)))
    glued = SimplicialGraph(vertices, sorted(edges))
    logger.info(f"Glued {n} copies along st({v}): {len(glued)} vertices")
    return GluingData(graph, glued, v, n, labels)


# Named graphs used throughout tests and fixtures

def cycle_graph(n: int, names: Optional[Sequence[str]] = None) -> SimplicialGraph:
    names = list(names) if names else [str(i) for i in range(1, n + 1)]
    return SimplicialGraph(names, [(names[i], names[(i + 1) % n]) for i in range(n)])


def path_graph(names: Sequence[str]) -> SimplicialGraph:
    return SimplicialGraph(names, [(names[i], names[i + 1]) for i in range(len(names) - 1)])


def complete_graph(names: Sequence[str]) -> SimplicialGraph:
    return SimplicialGraph(names, [(a, b) for i, a in enumerate(names) for b in names[i + 1:]])
