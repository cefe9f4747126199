"""Standard cosets and flats, parallelism, parallel sets and product regions.

A standard coset gG_Λ is always stored with its shortest representative, so
two cosets are equal exactly when their fields are equal.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from errors import NotACliqueError, NotInFlatError, NotParallelError, RaagError
from extension_graph import ExtVertex
from graph_core import IDENTITY_TOKEN, SimplicialGraph, VertexSet, cliques, is_clique, link, orthogonal, star
from words import (
    NormalForm,
    ball,
    coset_min_rep,
    double_coset_factor,
    exponent_sum,
    format_word,
    generator,
    in_subgroup,
    invert,
    multiply,
    parse_word,
    support,
)

logger = logging.getLogger(__name__)


class StandardCoset:
    __slots__ = ('rep', 'type', '_hash')

    def __init__(self, rep: NormalForm, subset: Iterable[str]):
        subset = rep.graph.vertex_set(subset)
        self.rep = coset_min_rep(rep, subset)
        self.type: VertexSet = subset
        self._hash = hash((self.rep, self.type))

    @property
    def graph(self) -> SimplicialGraph:
        return self.rep.graph

    @property
    def dimension(self) -> int:
        return len(self.type)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StandardCoset):
            return NotImplemented
        return self.type == other.type and self.rep == other.rep

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"{type(self).__name__}({format_flat(self)!r})"

    def __str__(self) -> str:
        return format_flat(self)

    def __contains__(self, g: NormalForm) -> bool:
        return member(self, g)

    def sort_key(self) -> Tuple:
        index = self.graph.index
        return (len(self.type), sorted(index[v] for v in self.type), self.rep.sort_key())

    def points(self, radius: int) -> List[NormalForm]:
        """Points rep·h with h in G_type of length at most radius"""
        return [multiply(self.rep, h) for h in ball(self.graph, radius, self.type)]


class StandardFlat(StandardCoset):
    """Standard coset whose type is a clique"""

    __slots__ = ()

    def __init__(self, rep: NormalForm, subset: Iterable[str]):
        super().__init__(rep, subset)
        if not is_clique(self.graph, self.type):
            raise NotACliqueError(f"Type {sorted(self.type)} is not a clique")


def format_flat(c: StandardCoset) -> str:
    """CLI spelling "<word>@<v1>,<v2>" """
    return f"{format_word(c.rep)}@{','.join(c.graph.ordered(c.type))}"


def parse_flat(graph: SimplicialGraph, text: str) -> StandardFlat:
    word, _, types = text.rpartition('@')
    if not _:
        word, types = text, ''
    subset = [t for t in types.split(',') if t.strip()]
    return make_flat(parse_word(graph, word or IDENTITY_TOKEN), subset)


def make_flat(g: NormalForm, subset: Iterable[str]) -> StandardFlat:
    return StandardFlat(g, subset)


def make_coset(g: NormalForm, subset: Iterable[str]) -> StandardCoset:
    return StandardCoset(g, subset)


def member(c: StandardCoset, g: NormalForm) -> bool:
    return in_subgroup(multiply(invert(c.rep), g), c.type)


def flat_leq(f1: StandardCoset, f2: StandardCoset) -> bool:
    return f1.type <= f2.type and member(f2, f1.rep)


def normalizer_type(graph: SimplicialGraph, subset: Iterable[str]) -> VertexSet:
    subset = graph.vertex_set(subset)
    return subset | orthogonal(graph, subset)


def are_parallel(f1: StandardCoset, f2: StandardCoset) -> bool:
    if f1.type != f2.type:
        return False
    return in_subgroup(multiply(invert(f1.rep), f2.rep), normalizer_type(f1.graph, f1.type))


def parallel_set(f: StandardCoset) -> StandardCoset:
    return StandardCoset(f.rep, normalizer_type(f.graph, f.type))


def _split(h: NormalForm, subset: VertexSet) -> Tuple[NormalForm, NormalForm]:
    """Split an element of G_Λ × G_Λ⊥ into its two commuting factors"""
    inside = [(g, e) for g, e in h.syllables if g in subset]
    outside = [(g, e) for g, e in h.syllables if g not in subset]
    return NormalForm._reduced(h.graph, inside), NormalForm._reduced(h.graph, outside)


def parallel_coordinates(f: StandardCoset, x: NormalForm) -> Tuple[NormalForm, NormalForm]:
    """Coordinates of x in P_F ≅ F × F⊥: x = rep(P_F)·a·b with a in G_Λ, b in G_Λ⊥"""
    region = parallel_set(f)
    h = multiply(invert(region.rep), x)
    if not in_subgroup(h, region.type):
        raise NotInFlatError(f"{format_word(x)} is not in the parallel set of {format_flat(f)}")
    return _split(h, f.type)


def parallelism_map(f1: StandardFlat, f2: StandardFlat, x: NormalForm) -> NormalForm:
    """Image of x ∈ F1 in the parallel flat F2: keep the F-coordinate, take F2's F⊥-coordinate"""
    if not are_parallel(f1, f2):
        raise NotParallelError(f"{format_flat(f1)} and {format_flat(f2)} are not parallel")
    if not member(f1, x):
        raise NotInFlatError(f"{format_word(x)} is not in {format_flat(f1)}")
    region = parallel_set(f1)
    along, _ = parallel_coordinates(f1, x)
    _, across = parallel_coordinates(f1, f2.rep)
    return multiply(region.rep, along, across)


def coset_intersection(c1: StandardCoset, c2: StandardCoset) -> Optional[StandardCoset]:
    factor = double_coset_factor(multiply(invert(c1.rep), c2.rep), c1.type, c2.type)
    if factor is None:
        return None
    # rep1·x = rep2·y^-1 is a common point
    common = multiply(c1.rep, factor[0])
    cls = StandardFlat if isinstance(c1, StandardFlat) or isinstance(c2, StandardFlat) else StandardCoset
    return cls(common, c1.type & c2.type)


def flat_intersection(f1: StandardCoset, f2: StandardCoset) -> Optional[StandardCoset]:
    return coset_intersection(f1, f2)


def flats_through(g: NormalForm, only_maximal: bool = False) -> List[StandardFlat]:
    return [make_flat(g, c) for c in cliques(g.graph, maximal_only=only_maximal)]


def delta(f: StandardCoset) -> FrozenSet[ExtVertex]:
    """The clique of cyclic parabolics generating the stabilizer of the flat"""
    return frozenset(ExtVertex(v, f.rep) for v in f.type)


def flat_from_clique(vertices: Iterable[ExtVertex]) -> StandardFlat:
    """A standard flat F with delta(F) equal to the given clique (the unique one for maximal cliques)"""
    vertices = sorted(vertices, key=ExtVertex.sort_key)
    if not vertices:
        raise RaagError("Empty clique has no distinguished flat")
    graph = vertices[0].graph
    region: Optional[StandardCoset] = StandardCoset(vertices[0].conjugator, star(graph, vertices[0].type))
    for u in vertices[1:]:
        region = coset_intersection(region, StandardCoset(u.conjugator, star(graph, u.type)))
        if region is None:
            raise RaagError(f"Vertices do not form a clique in the extension graph (at {u})", witness=u)
    types = [u.type for u in vertices]
    if len(set(types)) != len(types):
        raise RaagError("Repeated type in clique")
    return make_flat(region.rep, types)


def point_distance(g: NormalForm, c: StandardCoset) -> int:
    """Word distance from a point to a standard coset"""
    return coset_min_rep(multiply(invert(g), c.rep), c.type).length


def span(points: Iterable[NormalForm]) -> StandardCoset:
    """Smallest standard coset containing the points"""
    points = sorted(points, key=NormalForm.sort_key)
    if not points:
        raise RaagError("Cannot span an empty set of points")
    base = points[0]
    subset = set()
    for p in points[1:]:
        subset |= support(multiply(invert(base), p))
    return StandardCoset(base, subset)


@dataclass(frozen=True)
class ProductRegion:
    """P_v = g·G_st(v) ≅ Z_v × L_v, truncated to a window"""
    vertex: ExtVertex
    coset: StandardCoset
    radius: int
    z_window: Tuple[int, ...]
    line_window: Tuple[StandardFlat, ...]


def product_region(u: ExtVertex, radius: int = 2) -> ProductRegion:
    graph = u.graph
    coset = StandardCoset(u.conjugator, star(graph, u.type))
    lines = tuple(make_flat(multiply(u.conjugator, h), [u.type]) for h in ball(graph, radius, link(graph, u.type)))
    return ProductRegion(u, coset, radius, tuple(range(-radius, radius + 1)), lines)


def decompose_point(u: ExtVertex, g: NormalForm) -> Tuple[int, StandardFlat]:
    """(Z-coordinate, line of type v through g) for a point g of P_v"""
    h = multiply(invert(u.conjugator), g)
    if not in_subgroup(h, star(g.graph, u.type)):
        raise NotInFlatError(f"{format_word(g)} is not in the product region of {u}")
    z = exponent_sum(h, u.type)
    across = NormalForm._reduced(g.graph, [(x, e) for x, e in h.syllables if x != u.type])
    return z, make_flat(multiply(u.conjugator, across), [u.type])


def z_coordinate(u: ExtVertex, g: NormalForm) -> int:
    return decompose_point(u, g)[0]


def recombine(u: ExtVertex, z: int, line: StandardFlat) -> NormalForm:
    """Inverse of decompose_point"""
    if line.type != frozenset([u.type]) or not member(StandardCoset(u.conjugator, star(line.graph, u.type)), line.rep):
        raise NotInFlatError(f"{format_flat(line)} is not a line of the product region of {u}")
    offset = z_coordinate(u, line.rep)
    return multiply(line.rep, generator(line.graph, u.type, z - offset)) if z != offset else line.rep


class WindowMap:
    """Finite partial map of group elements.

    Either table-backed, or a function defined on the word-length ball of a
    given radius (radius None means everywhere).
    """

    def __init__(self, graph: SimplicialGraph, table: Optional[Dict[NormalForm, NormalForm]] = None,
                 func: Optional[Callable[[NormalForm], NormalForm]] = None, radius: Optional[int] = None,
                 name: str = ''):
        if (table is None) == (func is None):
            raise RaagError("WindowMap needs exactly one of a table or a function")
        self.graph = graph
        self.table = dict(table) if table is not None else None
        self.func = func
        self.radius = radius
        self.name = name

    def __repr__(self) -> str:
        size = f"{len(self.table)} points" if self.table is not None else f"radius {self.radius}"
        return f"WindowMap({self.name or 'anonymous'}, {size})"

    @classmethod
    def translation(cls, g: NormalForm, radius: Optional[int] = None) -> 'WindowMap':
        return cls(g.graph, func=lambda x: multiply(g, x), radius=radius, name=f"translation by {format_word(g)}")

    @classmethod
    def identity(cls, graph: SimplicialGraph, radius: Optional[int] = None) -> 'WindowMap':
        return cls(graph, func=lambda x: x, radius=radius, name='identity')

    def defined_at(self, x: NormalForm) -> bool:
        if self.table is not None:
            return x in self.table
        return self.radius is None or x.length <= self.radius

    def __call__(self, x: NormalForm) -> NormalForm:
        if not self.defined_at(x):
            raise KeyError(format_word(x))
        if self.table is not None:
            return self.table[x]
        return self.func(x)

    def domain(self) -> List[NormalForm]:
        if self.table is not None:
            return sorted(self.table, key=NormalForm.sort_key)
        if self.radius is None:
            raise RaagError("Unbounded window map has no finite domain")
        return ball(self.graph, self.radius)

    def compose(self, inner: 'WindowMap') -> 'WindowMap':
        """self ∘ inner, defined where both steps are"""
        outer = self

        def composite(x: NormalForm) -> NormalForm:
            return outer(inner(x))

        if inner.table is not None:
            table = {x: outer(y) for x, y in inner.table.items() if outer.defined_at(y)}
            return WindowMap(self.graph, table=table, name=f"{self.name}∘{inner.name}")
        if outer.table is None and outer.radius is None:
            return WindowMap(self.graph, func=composite, radius=inner.radius, name=f"{self.name}∘{inner.name}")
        table = {x: outer(inner(x)) for x in inner.domain() if outer.defined_at(inner(x))}
        return WindowMap(self.graph, table=table, name=f"{self.name}∘{inner.name}")

    def restrict(self, points: Iterable[NormalForm]) -> 'WindowMap':
        return WindowMap(self.graph, table={x: self(x) for x in points if self.defined_at(x)}, name=self.name)

    def patch_image(self, f: StandardCoset, patch_radius: int) -> Optional[List[NormalForm]]:
        """Images of the patch rep·Ball(G_type, r) of a flat, or None if some patch point is undefined"""
        images = []
        for p in f.points(patch_radius):
            if not self.defined_at(p):
                return None
            images.append(self(p))
        return images

    def image_flat(self, f: StandardCoset, patch_radius: int) -> Optional[StandardCoset]:
        """Smallest standard coset containing the image of a patch of f"""
        images = self.patch_image(f, patch_radius)
        return span(images) if images else None
