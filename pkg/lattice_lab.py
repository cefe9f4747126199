"""Embeddings of glued graphs' RAAGs, type cocycles of flat-preserving maps, and
canonical completion of labelled digraphs into coverings of a wedge of circles.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from errors import CocycleError, LabelClashError, RaagError, UnknownVertexError
from extension_graph import ExtVertex, adjacent
from flats import make_flat, span
from graph_core import Automorphism, GluingData, SimplicialGraph, is_automorphism, star
from projections import pi_v
from words import NormalForm, ball, exponent_sum, generator, identity, multiply, power

logger = logging.getLogger(__name__)

PointMap = Callable[[NormalForm], NormalForm]


def phi_n(w: NormalForm, v: str, n: int) -> int:
    """Exponent sum of v, mod n"""
    return exponent_sum(w, v) % n


def q_embed(u: str, data: GluingData) -> NormalForm:
    """Image of a generator of G_{Γ_n}: v ↦ v^n, star vertices fixed, w[j] ↦ v^(j-1) w v^-(j-1)"""
    if u not in data.glued.index:
        raise UnknownVertexError(f"{u!r} is not a vertex of the glued graph")
    graph = data.original
    original, j = data.labels[u]
    if original == data.v:
        return generator(graph, data.v, data.n)
    if j is None or j == 1:
        return generator(graph, original)
    shift = generator(graph, data.v, j - 1)
    return multiply(shift, generator(graph, original), generator(graph, data.v, 1 - j))


def q_word(w: NormalForm, data: GluingData) -> NormalForm:
    """q_embed extended multiplicatively"""
    result = identity(data.original)
    for gen, exp in w.syllables:
        result = multiply(result, power(q_embed(gen, data), exp))
    return result


def relations_preserved(data: GluingData) -> List[Tuple[str, str]]:
    """Edges of Γ_n whose generator images fail to commute"""
    failed = []
    for a, b in data.glued.edge_list():
        qa, qb = q_embed(a, data), q_embed(b, data)
        if multiply(qa, qb) != multiply(qb, qa):
            failed.append((a, b))
    return failed


def q_preimage(g: NormalForm, data: GluingData) -> NormalForm:
    """The element of G_{Γ_n} that q_word sends to g, for g in ker(phi_n)"""
    v, n = data.v, data.n
    if phi_n(g, v, n):
        raise RaagError(f"{g} is not in the kernel of phi_{n}", witness=g)
    glued = data.glued
    st = star(data.original, v)
    running = 0
    syllables = []
    for gen, exp in g.syllables:
        if gen == v:
            running += exp
            continue
        if gen in st:
            syllables.append((gen, exp))
            continue
        m, r = divmod(running, n)
        copy = next(c for c in data.copies_of(gen) if data.copy_index(c) == r + 1)
        syllables += [(v, m), (copy, exp), (v, -m)]
    # running is a multiple of n here
    syllables.append((v, running // n))
    return NormalForm(glued, syllables)


@dataclass(frozen=True)
class IndexCertificate:
    n: int
    checked: int
    residues: Tuple[int, ...]
    holds: bool
    failures: Tuple[NormalForm, ...] = ()


def index_certificate(data: GluingData, radius: int) -> IndexCertificate:
    """Every window element lies in exactly one coset v^i·q(G_{Γ_n}), 0 <= i < n"""
    graph, v, n = data.original, data.v, data.n
    residues = set()
    failures = []
    window = ball(graph, radius)
    for g in window:
        hits = []
        for i in range(n):
            shifted = multiply(generator(graph, v, -i), g) if i else g
            if phi_n(shifted, v, n):
                continue
            if q_word(q_preimage(shifted, data), data) == shifted:
                hits.append(i)
        if len(hits) != 1:
            failures.append(g)
        else:
            residues.add(hits[0])
    holds = not failures and residues == set(range(n))
    return IndexCertificate(n, len(window), tuple(sorted(residues)), holds, tuple(failures))


def q_star(u: ExtVertex, data: GluingData) -> ExtVertex:
    """Image of the class of a standard line: [g<t>] ↦ [q(g)·v^(j-1)<t̄>]"""
    original, j = data.labels[u.type]
    base = q_word(u.conjugator, data)
    if original != data.v and j is not None and j > 1:
        base = multiply(base, generator(data.original, data.v, j - 1))
    return ExtVertex(original, base)


def adjacency_preserved(vertices: Sequence[ExtVertex], data: GluingData) -> List[Tuple[ExtVertex, ExtVertex]]:
    failed = []
    for i, a in enumerate(vertices):
        for b in vertices[i + 1:]:
            if adjacent(a, b) != adjacent(q_star(a, data), q_star(b, data)):
                failed.append((a, b))
    return failed


def star_projection_spread(data: GluingData, w: str) -> Dict[int, int]:
    """Projection onto the v-line of the image classes of the copies w[j] through the identity"""
    graph = data.original
    target = ExtVertex(data.v, identity(graph))
    spread = {}
    for copy in data.copies_of(w):
        j = data.copy_index(copy)
        spread[j] = pi_v(target, q_star(ExtVertex(copy, identity(data.glued)), data))
    return dict(sorted(spread.items()))


# Type cocycles

def type_cocycle(h: PointMap, x: NormalForm, patch_radius: int = 1) -> Automorphism:
    """v ↦ type of the image of the v-line through x"""
    graph = x.graph
    theta = {}
    for v in graph.vertices:
        line = make_flat(x, [v])
        image = span(h(p) for p in line.points(patch_radius))
        if image.dimension != 1:
            raise CocycleError(f"The {v}-line through {x} does not map to a line", witness=(v, x))
        (theta[v],) = image.type
    if not is_automorphism(graph, theta):
        raise CocycleError(f"Line types at {x} permute as {theta}, not an automorphism", witness=x)
    return theta


@dataclass(frozen=True)
class TypeCocycleTable:
    entries: Dict[Tuple[str, NormalForm], Automorphism]

    def __call__(self, name: str, x: NormalForm) -> Automorphism:
        return self.entries[(name, x)]


def build_type_cocycle(maps: Dict[str, PointMap], points: Iterable[NormalForm]) -> TypeCocycleTable:
    points = list(points)
    return TypeCocycleTable({(name, x): type_cocycle(h, x) for name, h in maps.items() for x in points})


@dataclass(frozen=True)
class CocycleLawReport:
    holds: bool
    checked: int
    violations: Tuple[Tuple[str, str, NormalForm], ...] = ()


def cocycle_law_check(maps: Dict[str, PointMap], points: Iterable[NormalForm]) -> CocycleLawReport:
    """c(h1h2, x) = c(h1, h2·x) ∘ c(h2, x) for every ordered pair of the named maps"""
    points = list(points)
    violations = []
    checked = 0
    for n1, h1 in maps.items():
        for n2, h2 in maps.items():
            def composite(x: NormalForm, h1=h1, h2=h2) -> NormalForm:
                return h1(h2(x))

            for x in points:
                outer = type_cocycle(h1, h2(x))
                inner = type_cocycle(h2, x)
                checked += 1
                if type_cocycle(composite, x) != {v: outer[inner[v]] for v in inner}:
                    violations.append((n1, n2, x))
    return CocycleLawReport(not violations, checked, tuple(violations))


# Labelled digraphs

Edge = Tuple[str, str, str]


class LabeledDigraph:
    """Directed multigraph with labelled edges and optional vertex colours"""

    def __init__(self):
        self.colors: Dict[str, Optional[str]] = {}
        self.edges: List[Edge] = []
        self._out: Dict[str, Dict[str, str]] = {}
        self._in: Dict[str, Dict[str, str]] = {}

    def add_vertex(self, v: str, color: Optional[str] = None) -> None:
        if v not in self.colors:
            self.colors[v] = color
            self._out[v] = {}
            self._in[v] = {}
        elif color is not None:
            self.colors[v] = color

    def add_edge(self, src: str, dst: str, label: str) -> None:
        self.add_vertex(src)
        self.add_vertex(dst)
        if label in self._out[src]:
            raise LabelClashError(f"{src} already has an outgoing {label}-edge", witness=(src, label))
        if label in self._in[dst]:
            raise LabelClashError(f"{dst} already has an incoming {label}-edge", witness=(dst, label))
        self._out[src][label] = dst
        self._in[dst][label] = src
        self.edges.append((src, dst, label))

    @property
    def vertices(self) -> List[str]:
        return list(self.colors)

    def out_edge(self, v: str, label: str) -> Optional[str]:
        return self._out[v].get(label)

    def in_edge(self, v: str, label: str) -> Optional[str]:
        return self._in[v].get(label)

    def loops(self, v: str) -> List[str]:
        return [label for s, d, label in self.edges if s == v == d]

    def copy(self) -> 'LabeledDigraph':
        other = LabeledDigraph()
        for v, c in self.colors.items():
            other.add_vertex(v, c)
        for e in self.edges:
            other.add_edge(*e)
        return other

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        for v, c in self.colors.items():
            g.add_node(v, color=c)
        for s, d, label in self.edges:
            g.add_edge(s, d, label=label)
        return g

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], colors: Optional[Dict[str, Optional[str]]] = None) -> 'LabeledDigraph':
        d = cls()
        for v, c in (colors or {}).items():
            d.add_vertex(v, c)
        for e in edges:
            d.add_edge(*e)
        return d


@dataclass(frozen=True)
class CoveringCertificate:
    """Per-vertex local bijectivity onto the wedge of circles"""
    total: bool
    deficits: Tuple[Tuple[str, str, str], ...] = ()


def covering_certificate(d: LabeledDigraph, alphabet: Sequence[str]) -> CoveringCertificate:
    deficits = []
    for v in d.vertices:
        for label in alphabet:
            if d.out_edge(v, label) is None:
                deficits.append((v, label, 'out'))
            if d.in_edge(v, label) is None:
                deficits.append((v, label, 'in'))
    return CoveringCertificate(not deficits, tuple(deficits))


def canonical_complete(d: LabeledDigraph, alphabet: Sequence[str], reverse_edges: bool = False,
                       color_loops: Optional[Dict[str, Optional[Sequence[str]]]] = None
                       ) -> Tuple[LabeledDigraph, CoveringCertificate]:
    """Complete a labelled digraph to a covering of the wedge of |alphabet| circles.

    Optional steps run first: each edge gets its reverse, then every vertex of a listed colour
    receives loops on the given labels (None: on every label still missing there). Finally each
    maximal path of a-edges is closed up by an a-edge from its end back to its start.
    """
    result = d.copy()
    unknown = {label for _, _, label in result.edges} - set(alphabet)
    if unknown:
        raise LabelClashError(f"Labels outside the alphabet: {sorted(unknown)}")
    if reverse_edges:
        for s, t, label in list(d.edges):
            if s != t:
                result.add_edge(t, s, label)
    for v in list(result.vertices):
        color = result.colors[v]
        if color_loops is None or color not in color_loops:
            continue
        labels = color_loops[color]
        if labels is None:
            labels = [a for a in alphabet if result.out_edge(v, a) is None and result.in_edge(v, a) is None]
        for label in labels:
            result.add_edge(v, v, label)
    for label in alphabet:
        for v in list(result.vertices):
            if result.in_edge(v, label) is not None:
                continue
            # v starts a maximal path; walk to its end and close it
            end = v
            while result.out_edge(end, label) is not None:
                end = result.out_edge(end, label)
            result.add_edge(end, v, label)
    certificate = covering_certificate(result, alphabet)
    added = len(result.edges) - len(d.edges)
    logger.info(f"Canonical completion added {added} edges over {len(result.vertices)} vertices")
    return result, certificate


def tprime_alphabet(n: int) -> List[str]:
    return [f"a{i}" for i in range(1, n + 1)] + [f"a'{i}" for i in range(1, n + 1)]


def tprime_loop_rules(n: int) -> Dict[str, Optional[List[str]]]:
    """White vertices loop on every a'_i, black on every a_i, gray on whatever is still missing"""
    return {
        'white': [f"a'{i}" for i in range(1, n + 1)],
        'black': [f"a{i}" for i in range(1, n + 1)],
        'gray': None,
    }


@dataclass
class TreeWindow:
    """Finite window of the valence-n tree: bipartition colours and s-labelled edges (label index 1..n)"""
    n: int
    colors: Dict[str, str] = field(default_factory=dict)
    edges: List[Tuple[str, str, int]] = field(default_factory=list)


def tree_window(n: int, depth: int) -> TreeWindow:
    if n < 1:
        raise RaagError(f"Tree valence must be positive, got {n}")
    window = TreeWindow(n, {'o': 'white'})
    frontier = [('o', None)]
    for _ in range(depth):
        layer = []
        for v, parent_label in frontier:
            child_color = 'black' if window.colors[v] == 'white' else 'white'
            for i in range(1, n + 1):
                if i == parent_label:
                    continue
                child = f"{v}-{i}"
                window.colors[child] = child_color
                window.edges.append((v, child, i))
                layer.append((child, i))
        frontier = layer
    return window


def barycentric_label(window: TreeWindow) -> LabeledDigraph:
    """Subdivide every edge; white→gray edges carry a_i, black→gray edges carry a'_i"""
    d = LabeledDigraph()
    for v, c in window.colors.items():
        d.add_vertex(v, c)
    for u, w, i in window.edges:
        if not 1 <= i <= window.n:
            raise LabelClashError(f"Edge {u}-{w} has label s{i} outside s1..s{window.n}")
        if window.colors[u] == window.colors[w]:
            raise LabelClashError(f"Edge {u}-{w} joins two {window.colors[u]} vertices")
        mid = f"{u}|{w}"
        d.add_vertex(mid, 'gray')
        for end in (u, w):
            label = f"a{i}" if window.colors[end] == 'white' else f"a'{i}"
            d.add_edge(end, mid, label)
    return d


def complete_tprime(n: int, depth: int) -> Tuple[LabeledDigraph, CoveringCertificate]:
    return canonical_complete(barycentric_label(tree_window(n, depth)), tprime_alphabet(n),
                              reverse_edges=True, color_loops=tprime_loop_rules(n))


def kernel_completion(d: LabeledDigraph, alphabet: Sequence[str], outer_labels: Sequence[str]
                      ) -> Tuple[LabeledDigraph, CoveringCertificate]:
    """Loops on the outer labels at every vertex, then the canonical completion over the enlarged alphabet"""
    result = d.copy()
    for v in result.vertices:
        for label in outer_labels:
            if result.out_edge(v, label) is None and result.in_edge(v, label) is None:
                result.add_edge(v, v, label)
    return canonical_complete(result, list(alphabet) + [a for a in outer_labels if a not in alphabet])


def commutation_check(d: LabeledDigraph, graph: SimplicialGraph) -> List[Tuple[str, str, str]]:
    """Vertices where the a·b and b·a paths differ for labels adjacent in the graph"""
    failures = []
    labels = [a for a in graph.vertices if any(label == a for _, _, label in d.edges)]
    for v in d.vertices:
        for i, a in enumerate(labels):
            for b in labels[i + 1:]:
                if not graph.adjacent(a, b):
                    continue
                ab = d.out_edge(v, a)
                ab = d.out_edge(ab, b) if ab is not None else None
                ba = d.out_edge(v, b)
                ba = d.out_edge(ba, a) if ba is not None else None
                if ab is None or ab != ba:
                    failures.append((v, a, b))
    return failures
