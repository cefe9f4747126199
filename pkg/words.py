"""Exact arithmetic in the RAAG G_Γ.

Elements are stored as syllable sequences (generator, exponent). Reduction
follows the usual piling idea: a new syllable slides left past the syllables it
commutes with and merges with the first syllable of the same generator it
meets. The canonical form is then the lexicographically least shuffle of the
reduced word: repeatedly take, among the syllables that can be moved to the
front, the one whose generator comes first in the vertex order.
"""
import logging
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from errors import AmbientMismatchError, InputFormatError, UnknownVertexError
from graph_core import IDENTITY_TOKEN, SimplicialGraph, VertexSet

logger = logging.getLogger(__name__)

Syllable = Tuple[str, int]

_TOKEN = re.compile(r'^(?P<gen>[^\s^]+?)(?:\^(?P<exp>[+-]?\d+))?$')


def _push(graph: SimplicialGraph, out: List[Syllable], gen: str, exp: int) -> None:
    """Multiply a reduced syllable list on the right by gen^exp, keeping it reduced"""
    adj = graph.adjacency[gen]
    i = len(out) - 1
    while i >= 0:
        other, other_exp = out[i]
        if other == gen:
            total = other_exp + exp
            if total:
                out[i] = (gen, total)
            else:
                del out[i]
            return
        if other not in adj:
            break
        i -= 1
    out.append((gen, exp))


def _canonical_order(graph: SimplicialGraph, syllables: Sequence[Syllable]) -> Tuple[Syllable, ...]:
    remaining = list(syllables)
    index = graph.index
    adjacency = graph.adjacency
    result = []
    while remaining:
        best = 0
        for position in range(1, len(remaining)):
            gen = remaining[position][0]
            if index[gen] >= index[remaining[best][0]]:
                continue
            adj = adjacency[gen]
            if all(other in adj for other, _ in remaining[:position]):
                best = position
        result.append(remaining.pop(best))
    return tuple(result)


class NormalForm:
    """Canonical word of a group element; equality is syllable equality"""

    __slots__ = ('graph', 'syllables', '_hash')

    def __init__(self, graph: SimplicialGraph, syllables: Iterable[Syllable] = ()):
        out: List[Syllable] = []
        for gen, exp in syllables:
            if gen not in graph.index:
                raise UnknownVertexError(f"Unknown generator {gen!r}")
            exp = int(exp)
            if exp:
                _push(graph, out, gen, exp)
        self.graph = graph
        self.syllables: Tuple[Syllable, ...] = _canonical_order(graph, out)
        self._hash = hash(self.syllables)

    @classmethod
    def _reduced(cls, graph: SimplicialGraph, syllables: Sequence[Syllable]) -> 'NormalForm':
        """Build from a word already known to be reduced"""
        w = cls.__new__(cls)
        w.graph = graph
        w.syllables = _canonical_order(graph, syllables)
        w._hash = hash(w.syllables)
        return w

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NormalForm):
            return NotImplemented
        return self.syllables == other.syllables and (self.graph is other.graph or self.graph == other.graph)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"NormalForm({format_word(self)!r})"

    def __str__(self) -> str:
        return format_word(self)

    def __mul__(self, other: 'NormalForm') -> 'NormalForm':
        return multiply(self, other)

    @property
    def length(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    @property
    def is_identity(self) -> bool:
        return not self.syllables

    def inverse(self) -> 'NormalForm':
        return invert(self)

    def times(self, gen: str, exp: int = 1) -> 'NormalForm':
        out = list(self.syllables)
        _push(self.graph, out, gen, exp)
        return NormalForm._reduced(self.graph, out)

    def sort_key(self) -> Tuple:
        index = self.graph.index
        return (self.length, tuple((index[g], e) for g, e in self.syllables))


def _check_same(*words: NormalForm) -> SimplicialGraph:
    graph = words[0].graph
    for w in words[1:]:
        if w.graph is not graph and w.graph != graph:
            raise AmbientMismatchError("Words live over different defining graphs")
    return graph


def identity(graph: SimplicialGraph) -> NormalForm:
    return NormalForm._reduced(graph, ())


def generator(graph: SimplicialGraph, v: str, exp: int = 1) -> NormalForm:
    graph.check_vertex(v)
    return NormalForm(graph, [(v, exp)])


def normalize(graph: SimplicialGraph, raw: Union[str, Iterable[Syllable]]) -> NormalForm:
    if isinstance(raw, str):
        return parse_word(graph, raw)
    return NormalForm(graph, raw)


def parse_word(graph: SimplicialGraph, text: str) -> NormalForm:
    """Parse whitespace-separated tokens `gen`, `gen^k`, `gen^-k`; `id` or blank is the identity"""
    syllables = []
    for token in text.split():
        if token == IDENTITY_TOKEN:
            continue
        match = _TOKEN.match(token)
        if not match:
            raise InputFormatError(f"Cannot read word token {token!r}")
        gen = match.group('gen')
        if gen not in graph.index:
            raise UnknownVertexError(f"Unknown generator {gen!r} in word {text!r}")
        exp = int(match.group('exp')) if match.group('exp') is not None else 1
        syllables.append((gen, exp))
    return NormalForm(graph, syllables)


def format_word(w: NormalForm) -> str:
    if not w.syllables:
        return IDENTITY_TOKEN
    return " ".join(g if e == 1 else f"{g}^{e}" for g, e in w.syllables)


def multiply(*words: NormalForm) -> NormalForm:
    graph = _check_same(*words)
    out = list(words[0].syllables)
    for w in words[1:]:
        for gen, exp in w.syllables:
            _push(graph, out, gen, exp)
    return NormalForm._reduced(graph, out)


def invert(w: NormalForm) -> NormalForm:
    return NormalForm._reduced(w.graph, [(g, -e) for g, e in reversed(w.syllables)])


def equals(w1: NormalForm, w2: NormalForm) -> bool:
    _check_same(w1, w2)
    return w1.syllables == w2.syllables


def word_length(w: NormalForm) -> int:
    return w.length


def support(w: NormalForm) -> VertexSet:
    return frozenset(g for g, _ in w.syllables)


def power(w: NormalForm, k: int) -> NormalForm:
    base = w if k >= 0 else invert(w)
    result = identity(w.graph)
    for _ in range(abs(k)):
        result = multiply(result, base)
    return result


def conjugate(w: NormalForm, h: NormalForm) -> NormalForm:
    """h w h^-1"""
    return multiply(h, w, invert(h))


def exponent_sum(w: NormalForm, v: str) -> int:
    return sum(e for g, e in w.syllables if g == v)


def coset_split(w: NormalForm, subset: Iterable[str]) -> Tuple[NormalForm, NormalForm]:
    """w = u·s with s the maximal right divisor of w in G_Λ; u is the shortest element of wG_Λ"""
    subset = w.graph.vertex_set(subset)
    adjacency = w.graph.adjacency
    keep: List[Syllable] = []
    tail: List[Syllable] = []
    kept_gens: List[str] = []
    # a syllable moves into the tail iff it lies in Λ and commutes with every kept syllable to its right
    for gen, exp in reversed(w.syllables):
        if gen in subset and all(k in adjacency[gen] for k in kept_gens):
            tail.append((gen, exp))
        else:
            keep.append((gen, exp))
            kept_gens.append(gen)
    keep.reverse()
    tail.reverse()
    return NormalForm._reduced(w.graph, keep), NormalForm._reduced(w.graph, tail)


def coset_min_rep(w: NormalForm, subset: Iterable[str]) -> NormalForm:
    return coset_split(w, subset)[0]


def left_divisor(w: NormalForm, subset: Iterable[str]) -> Tuple[NormalForm, NormalForm]:
    """w = s·r with s the maximal left divisor of w supported in the subset"""
    subset = w.graph.vertex_set(subset)
    adjacency = w.graph.adjacency
    head: List[Syllable] = []
    rest: List[Syllable] = []
    rest_gens: List[str] = []
    for gen, exp in w.syllables:
        if gen in subset and all(k in adjacency[gen] for k in rest_gens):
            head.append((gen, exp))
        else:
            rest.append((gen, exp))
            rest_gens.append(gen)
    return NormalForm._reduced(w.graph, head), NormalForm._reduced(w.graph, rest)


def double_coset_factor(g: NormalForm, a: Iterable[str], b: Iterable[str]) -> Optional[Tuple[NormalForm, NormalForm]]:
    """Return (x, y) with g = x·y, x ∈ G_A, y ∈ G_B, or None when g ∉ G_A·G_B"""
    head, rest = left_divisor(g, a)
    if support(rest) <= g.graph.vertex_set(b):
        return head, rest
    return None


def double_coset_member(g: NormalForm, a: Iterable[str], b: Iterable[str]) -> bool:
    return double_coset_factor(g, a, b) is not None


def in_subgroup(w: NormalForm, subset: Iterable[str]) -> bool:
    return support(w) <= frozenset(subset)


def ball(graph: SimplicialGraph, radius: int, subset: Optional[Iterable[str]] = None) -> List[NormalForm]:
    """All elements of G_subset (default G_Γ) of word length at most radius, in sort order"""
    gens = graph.ordered(graph.vertex_set(subset)) if subset is not None else graph.vertices
    start = identity(graph)
    seen: Dict[Tuple[Syllable, ...], NormalForm] = {start.syllables: start}
    frontier = [start]
    for _ in range(radius):
        layer = []
        for w in frontier:
            for v in gens:
                for e in (1, -1):
                    x = w.times(v, e)
                    if x.syllables not in seen:
                        seen[x.syllables] = x
                        layer.append(x)
        frontier = layer
    return sorted(seen.values(), key=NormalForm.sort_key)


def apply_automorphism(w: NormalForm, theta: Dict[str, str]) -> NormalForm:
    """Relabel generators by a graph automorphism (reducedness is preserved)"""
    return NormalForm._reduced(w.graph, [(theta[g], e) for g, e in w.syllables])


@dataclass(frozen=True)
class TransvectionReport:
    v: str
    w: str
    preserves_relations: bool
    infinite_order: bool
    failed_relation: Optional[Tuple[str, str]] = None


def transvection_check(graph: SimplicialGraph, v: str, w: str) -> TransvectionReport:
    """Check that v ↦ v·w (other generators fixed) respects every commutation relation"""
    graph.check_vertex(v)
    graph.check_vertex(w)
    images = {u: generator(graph, u) for u in graph.vertices}
    images[v] = multiply(generator(graph, v), generator(graph, w))
    for a, b in graph.edge_list():
        if multiply(images[a], images[b]) != multiply(images[b], images[a]):
            return TransvectionReport(v, w, False, v != w, (a, b))
    # on the abelianization the k-th power sends e_v to e_v + k·e_w
    return TransvectionReport(v, w, True, v != w)
