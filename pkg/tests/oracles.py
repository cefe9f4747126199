"""Brute-force references the fast routines are checked against.

They work directly on raw syllable tuples and never call into words.py.
"""
from collections import deque
from typing import Iterable, List, Optional, Set, Tuple

import networkx as nx

from graph_core import SimplicialGraph

RawWord = Tuple[Tuple[str, int], ...]


def letters(word: RawWord) -> Tuple[Tuple[str, int], ...]:
    """Expand syllables into unit letters (gen, ±1)"""
    out = []
    for g, e in word:
        out.extend([(g, 1 if e > 0 else -1)] * abs(e))
    return tuple(out)


def _moves(graph: SimplicialGraph, w: Tuple[Tuple[str, int], ...]) -> Iterable[Tuple[Tuple[str, int], ...]]:
    for i in range(len(w) - 1):
        (a, s), (b, t) = w[i], w[i + 1]
        if a == b and s == -t:
            yield w[:i] + w[i + 2:]
        elif a != b and graph.adjacent(a, b):
            yield w[:i] + (w[i + 1], w[i]) + w[i + 2:]


def rewriting_closure(graph: SimplicialGraph, word: RawWord) -> Set[Tuple[Tuple[str, int], ...]]:
    """Every letter word reachable by commutations and free cancellations"""
    start = letters(word)
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for n in _moves(graph, w):
            if n not in seen:
                seen.add(n)
                queue.append(n)
    return seen


def shortest_spelling(graph: SimplicialGraph, word: RawWord) -> int:
    return min(len(w) for w in rewriting_closure(graph, word))


def reduced_spellings(graph: SimplicialGraph, word: RawWord) -> frozenset:
    closure = rewriting_closure(graph, word)
    m = min(len(w) for w in closure)
    return frozenset(w for w in closure if len(w) == m)


def same_element(graph: SimplicialGraph, w1: RawWord, w2: RawWord) -> bool:
    """Both words reduce to a common shortest spelling"""
    return bool(reduced_spellings(graph, w1) & reduced_spellings(graph, w2))


def cayley_ball(graph: SimplicialGraph, radius: int,
                generators: Optional[Iterable[str]] = None) -> List[Tuple[Tuple[str, int], ...]]:
    """One letter word per element of the word-length ball, by BFS in the Cayley graph"""
    gens = list(generators) if generators is not None else list(graph.vertices)
    start: Tuple[Tuple[str, int], ...] = ()
    found = {frozenset([start]): start}
    frontier = [start]
    for _ in range(radius):
        layer = []
        for w in frontier:
            for v in gens:
                for s in (1, -1):
                    n = w + ((v, s),)
                    key = reduced_spellings(graph, n)
                    if key in found:
                        continue
                    found[key] = n
                    layer.append(n)
        frontier = layer
    return list(found.values())


def nearest_distance(graph: SimplicialGraph, point: RawWord, coset_rep: RawWord, subset: Iterable[str],
                     radius: int) -> int:
    """min |point^-1 · rep · h| over h in G_subset with |h| <= radius"""
    inv_point = tuple((g, -e) for g, e in reversed(letters(point)))
    return min(shortest_spelling(graph, inv_point + letters(coset_rep) + h)
               for h in cayley_ball(graph, radius, subset))


def coset_members(graph: SimplicialGraph, rep: RawWord, subset: Iterable[str], radius: int) -> Set[frozenset]:
    """Elements rep·h, h in G_subset with |h| <= radius, each as the set of its shortest spellings"""
    return {reduced_spellings(graph, letters(rep) + h) for h in cayley_ball(graph, radius, subset)}


def small_graphs(max_vertices: int) -> List[SimplicialGraph]:
    """Every graph on 1..max_vertices vertices up to isomorphism, vertices named 1, 2, ..."""
    found = []
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if 1 <= n <= max_vertices:
            names = {v: str(v + 1) for v in g.nodes}
            found.append(SimplicialGraph([names[v] for v in sorted(g.nodes)],
                                         [(names[a], names[b]) for a, b in g.edges]))
    return found


def graph_id(graph: SimplicialGraph) -> str:
    edges = ','.join(f'{a}{b}' for a, b in graph.edge_list())
    return f'{len(graph)}v:{edges or "-"}'
