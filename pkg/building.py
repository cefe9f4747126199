"""Truncated right-angled building B_Γ.

Vertices are standard flats, edges join F' < F with rank difference one, and
cubes are the intervals [F_low, F_high] whose members are all present. Balls
are cut off both by combinatorial distance and by the length of canonical
representatives, so every rank >= 1 vertex is reported as truncated.
"""
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from errors import LoopError, NotAJoinError, NotInFlatError, RaagError
from extension_graph import ExtVertex
from flats import (
    StandardCoset,
    StandardFlat,
    WindowMap,
    coset_intersection,
    delta,
    flat_from_clique,
    flat_leq,
    format_flat,
    make_flat,
    member,
    span,
)
from graph_core import (
    Automorphism,
    SimplicialGraph,
    VertexSet,
    cliques,
    induced_subgraph,
    is_automorphism,
    is_clique,
    join_decomposition,
)
from words import NormalForm, apply_automorphism, format_word, generator, identity, invert, multiply, power

logger = logging.getLogger(__name__)


def rank(flat: StandardCoset) -> int:
    return len(flat.type)


def up_neighbors(flat: StandardFlat) -> List[StandardFlat]:
    graph = flat.graph
    return [
        make_flat(flat.rep, flat.type | {x})
        for x in graph.vertices
        if x not in flat.type and is_clique(graph, flat.type | {x})
    ]


def down_neighbors(flat: StandardFlat, length_bound: int,
                   exponent_bound: Optional[int] = None) -> List[StandardFlat]:
    """Codimension-one subflats g·x^k·G_{Λ-x} whose representative has length <= length_bound"""
    budget = length_bound - flat.rep.length
    if budget < 0:
        return []
    if exponent_bound is not None:
        budget = min(budget, exponent_bound)
    graph = flat.graph
    found = []
    for x in graph.ordered(flat.type):
        rest = flat.type - {x}
        for k in range(-budget, budget + 1):
            step = multiply(flat.rep, generator(graph, x, k)) if k else flat.rep
            lower = make_flat(step, rest)
            if lower.rep.length <= length_bound:
                found.append(lower)
    return found


def _neighbors(flat: StandardFlat, length_bound: int, exponent_bound: Optional[int]) -> Iterator[StandardFlat]:
    for f in up_neighbors(flat):
        if f.rep.length <= length_bound:
            yield f
    yield from down_neighbors(flat, length_bound, exponent_bound)


@dataclass(frozen=True)
class Cube:
    """The interval [low, high]; its members are the flats low.rep·G_S, type(low) ⊆ S ⊆ type(high)"""
    low: StandardFlat
    high: StandardFlat

    @property
    def dimension(self) -> int:
        return rank(self.high) - rank(self.low)

    def members(self) -> List[StandardFlat]:
        free = self.low.graph.ordered(self.high.type - self.low.type)
        return [
            make_flat(self.low.rep, self.low.type | set(extra))
            for size in range(len(free) + 1)
            for extra in combinations(free, size)
        ]

    def contains(self, flat: StandardFlat) -> bool:
        return flat_leq(self.low, flat) and flat_leq(flat, self.high)

    def __str__(self) -> str:
        return f"[{format_flat(self.low)} .. {format_flat(self.high)}]"


@dataclass(frozen=True)
class BuildingBall:
    base: StandardFlat
    radius: int
    length_bound: int
    vertices: Tuple[StandardFlat, ...]
    distances: Dict[StandardFlat, int]
    cubes: Tuple[Cube, ...]
    complete: Dict[StandardFlat, bool]

    @property
    def graph(self) -> SimplicialGraph:
        return self.base.graph

    def __contains__(self, flat: object) -> bool:
        return flat in self.distances

    @property
    def edges(self) -> List[Tuple[StandardFlat, StandardFlat]]:
        return [(c.low, c.high) for c in self.cubes if c.dimension == 1]

    @cached_property
    def cubes_at(self) -> Dict[StandardFlat, List[Cube]]:
        index: Dict[StandardFlat, List[Cube]] = {v: [] for v in self.vertices}
        for c in self.cubes:
            for m in c.members():
                if m in index:
                    index[m].append(c)
        return index

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def rank0(self) -> List[StandardFlat]:
        return [v for v in self.vertices if not v.type]

    def without_cube(self, cube: Cube) -> 'BuildingBall':
        """Copy with one cube deleted; used to build corrupted complexes"""
        if cube not in self.cubes:
            raise RaagError(f"Cube {cube} is not in the ball")
        return replace(self, cubes=tuple(c for c in self.cubes if c != cube))


def building_ball(base: StandardFlat, radius: int, length_bound: int, cubes: bool = True,
                  exponent_bound: Optional[int] = None) -> BuildingBall:
    """Flats within combinatorial distance `radius` of base (through flats whose rep has length <= length_bound)"""
    if radius < 0 or length_bound < 0:
        raise RaagError("Radius and length bound must be non-negative")
    graph = base.graph
    distances: Dict[StandardFlat, int] = {base: 0}
    frontier = [base]
    for depth in range(radius):
        layer = []
        for f in frontier:
            for n in _neighbors(f, length_bound, exponent_bound):
                if n not in distances:
                    distances[n] = depth + 1
                    layer.append(n)
        frontier = layer
        logger.debug(f"Building ball layer {depth + 1}: {len(layer)} flats")

    vertices = tuple(sorted(distances, key=lambda f: (distances[f], f.sort_key())))
    found: List[Cube] = []
    if cubes:
        all_cliques = cliques(graph)
        for low in vertices:
            for clique in all_cliques:
                if len(clique) <= len(low.type) or not low.type <= clique:
                    continue
                cube = Cube(low, make_flat(low.rep, clique))
                if all(m in distances for m in cube.members()):
                    found.append(cube)
    else:
        # edges only
        for low in vertices:
            for high in up_neighbors(low):
                if high in distances:
                    found.append(Cube(low, high))

    complete = {}
    for f in vertices:
        complete[f] = not f.type and all(n in distances for n in up_neighbors(f))
    logger.info(f"Building ball around {format_flat(base)}: {len(vertices)} flats, {len(found)} cubes")
    return BuildingBall(base, radius, length_bound, vertices, distances, tuple(found), complete)


def check_intervals(ball: BuildingBall) -> List[Cube]:
    """Cubes whose Boolean interval is not fully present"""
    bad = []
    for c in ball.cubes:
        members = c.members()
        if len(members) != 2 ** c.dimension or any(m not in ball for m in members):
            bad.append(c)
    return bad


def distance_between(ball: BuildingBall, f1: StandardFlat, f2: StandardFlat) -> int:
    return nx.shortest_path_length(ball.to_networkx(), f1, f2)


# Links and the flag condition

@dataclass(frozen=True)
class VertexLink:
    flat: StandardFlat
    vertices: Tuple[StandardFlat, ...]
    simplices: FrozenSet[FrozenSet[StandardFlat]]
    up: Tuple[StandardFlat, ...]
    classes: Dict[str, Tuple[StandardFlat, ...]]
    truncated: bool

    def skeleton(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(s) for s in self.simplices if len(s) == 2)
        return g


def vertex_link(ball: BuildingBall, flat: StandardFlat) -> VertexLink:
    """Link of a vertex inside the ball, split into lk+ and one class per removable type"""
    if flat not in ball:
        raise NotInFlatError(f"{format_flat(flat)} is not a vertex of the ball")
    simplices = set()
    for c in ball.cubes_at[flat]:
        members = c.members()
        simplex = frozenset(m for m in members if abs(rank(m) - rank(flat)) == 1 and (
            flat_leq(m, flat) or flat_leq(flat, m)))
        simplices.add(simplex)
    vertices = sorted({v for s in simplices if len(s) == 1 for v in s}, key=StandardFlat.sort_key)
    up = tuple(v for v in vertices if rank(v) > rank(flat))
    classes: Dict[str, Tuple[StandardFlat, ...]] = {}
    for x in flat.graph.ordered(flat.type):
        classes[x] = tuple(v for v in vertices if rank(v) < rank(flat) and flat.type - v.type == {x})
    return VertexLink(flat, tuple(vertices), frozenset(simplices), up, classes, not ball.complete[flat])


@dataclass(frozen=True)
class FlagViolation:
    vertex: StandardFlat
    kind: str
    simplex: FrozenSet[StandardFlat]


@dataclass(frozen=True)
class FlagReport:
    holds: bool
    judged: Tuple[StandardFlat, ...]
    skipped: int
    violations: Tuple[FlagViolation, ...] = ()


def _fully_enumerated(ball: BuildingBall, flat: StandardFlat, all_cliques: Sequence[VertexSet]) -> bool:
    return not flat.type and all(make_flat(flat.rep, c) in ball for c in all_cliques)


def check_flag(ball: BuildingBall) -> FlagReport:
    """Gromov link condition on every rank-0 vertex whose whole star lies in the ball; others are skipped"""
    all_cliques = cliques(ball.graph)
    judged = []
    violations: List[FlagViolation] = []
    for v in ball.vertices:
        if not _fully_enumerated(ball, v, all_cliques):
            continue
        judged.append(v)
        lk = vertex_link(ball, v)
        for s in lk.simplices:
            for size in range(1, len(s)):
                for face in combinations(sorted(s, key=StandardFlat.sort_key), size):
                    if frozenset(face) not in lk.simplices:
                        violations.append(FlagViolation(v, 'missing_face', frozenset(face)))
        for clique in nx.enumerate_all_cliques(lk.skeleton()):
            if len(clique) >= 3 and frozenset(clique) not in lk.simplices:
                violations.append(FlagViolation(v, 'empty_simplex', frozenset(clique)))
    skipped = len(ball.vertices) - len(judged)
    if violations:
        logger.warning(f"Flag check found {len(violations)} violations")
    return FlagReport(not violations, tuple(judged), skipped, tuple(violations))


# Joins

@dataclass(frozen=True)
class ProductSplit:
    first: SimplicialGraph
    second: SimplicialGraph
    first_ball: BuildingBall
    second_ball: BuildingBall
    image: Dict[StandardFlat, Tuple[StandardFlat, StandardFlat]]
    problems: Tuple[str, ...]

    @property
    def consistent(self) -> bool:
        return not self.problems


def split_flat(flat: StandardFlat, first: SimplicialGraph, second: SimplicialGraph) -> Tuple[StandardFlat, StandardFlat]:
    """Factor gG_Λ = g1G_Λ1 × g2G_Λ2 along the join"""
    syllables = flat.rep.syllables
    w1 = NormalForm(first, [s for s in syllables if s[0] in first.index])
    w2 = NormalForm(second, [s for s in syllables if s[0] in second.index])
    return (make_flat(w1, [v for v in flat.type if v in first.index]),
            make_flat(w2, [v for v in flat.type if v in second.index]))


def combine_flats(graph: SimplicialGraph, f1: StandardFlat, f2: StandardFlat) -> StandardFlat:
    return make_flat(NormalForm(graph, f1.rep.syllables + f2.rep.syllables), f1.type | f2.type)


def product_split(ball: BuildingBall) -> ProductSplit:
    graph = ball.graph
    factors = join_decomposition(graph)
    if len(factors) < 2:
        raise NotAJoinError(f"{graph!r} does not split as a join", witness=graph.vertices)
    first = factors[0]
    second = induced_subgraph(graph, [v for v in graph.vertices if v not in first.index])
    base1, base2 = split_flat(ball.base, first, second)
    ball1 = building_ball(base1, ball.radius, ball.length_bound)
    ball2 = building_ball(base2, ball.radius, ball.length_bound)

    problems = []
    image = {}
    for f in ball.vertices:
        f1, f2 = split_flat(f, first, second)
        image[f] = (f1, f2)
        if f1 not in ball1 or f2 not in ball2:
            problems.append(f"{format_flat(f)} falls outside the factor balls")
        if combine_flats(graph, f1, f2) != f:
            problems.append(f"{format_flat(f)} does not recombine")
    if len(set(image.values())) != len(image):
        problems.append("factor map is not injective")
    for c in ball.cubes:
        (l1, l2), (h1, h2) = image[c.low], image[c.high]
        for low, high, factor in ((l1, h1, ball1), (l2, h2, ball2)):
            if low != high and Cube(low, high) not in factor.cubes:
                problems.append(f"cube {c} has no factor cube over {format_flat(low)}")
    logger.info(f"Product split: {len(ball1.vertices)} x {len(ball2.vertices)} factor flats, {len(problems)} problems")
    return ProductSplit(first, second, ball1, ball2, image, tuple(problems))


def product_ball(split: ProductSplit) -> List[StandardFlat]:
    """All products F1 × F2 of factor-ball vertices"""
    if not split.image:
        raise RaagError("Empty product split")
    ambient = next(iter(split.image)).graph
    return [combine_flats(ambient, f1, f2) for f1 in split.first_ball.vertices for f2 in split.second_ball.vertices]


# The extended group G ⋊ Aut(Γ)

@dataclass(frozen=True)
class HatElement:
    g: NormalForm
    theta: Automorphism = field(default_factory=dict)

    def __post_init__(self):
        graph = self.g.graph
        if not self.theta:
            object.__setattr__(self, 'theta', {v: v for v in graph.vertices})
        elif not is_automorphism(graph, self.theta):
            raise RaagError(f"{self.theta} is not an automorphism of the defining graph", witness=self.theta)

    @classmethod
    def translation(cls, g: NormalForm) -> 'HatElement':
        return cls(g)

    def compose(self, other: 'HatElement') -> 'HatElement':
        """(g1, θ1)(g2, θ2) = (g1·θ1(g2), θ1θ2)"""
        theta = {v: self.theta[other.theta[v]] for v in other.theta}
        return HatElement(multiply(self.g, apply_automorphism(other.g, self.theta)), theta)

    def inverse(self) -> 'HatElement':
        back = {w: v for v, w in self.theta.items()}
        return HatElement(apply_automorphism(invert(self.g), back), back)

    def act_point(self, x: NormalForm) -> NormalForm:
        return multiply(self.g, apply_automorphism(x, self.theta))

    def act_flat(self, flat: StandardFlat) -> StandardFlat:
        return make_flat(self.act_point(flat.rep), [self.theta[v] for v in flat.type])

    def act_ext(self, u: ExtVertex) -> ExtVertex:
        return ExtVertex(self.theta[u.type], self.act_point(u.conjugator))

    def __str__(self) -> str:
        moved = {v: w for v, w in self.theta.items() if v != w}
        return f"({format_word(self.g)}, {moved or 'id'})"


def hat_action(h: HatElement, flat: StandardFlat) -> StandardFlat:
    return h.act_flat(flat)


def hat_window_map(h: HatElement, radius: Optional[int] = None) -> WindowMap:
    return WindowMap(h.g.graph, func=h.act_point, radius=radius, name=f"hat {h}")


# Flat-preserving maps and partial automorphisms

@dataclass(frozen=True)
class PartialAutomorphism:
    mapping: Dict[StandardFlat, StandardFlat]
    undetermined: Tuple[StandardFlat, ...]
    violations: Tuple[Tuple[StandardFlat, str], ...]

    @property
    def flat_preserving(self) -> bool:
        return not self.violations

    def __call__(self, flat: StandardFlat) -> StandardFlat:
        return self.mapping[flat]


def fp_to_auto(fmap: WindowMap, ball: BuildingBall, strict: bool = False) -> PartialAutomorphism:
    """Induced poset map on the flats of the ball that the window of points determines"""
    points = [f.rep for f in ball.rank0() if fmap.defined_at(f.rep)]
    mapping: Dict[StandardFlat, StandardFlat] = {}
    undetermined = []
    violations = []
    for f in ball.vertices:
        inside = [p for p in points if member(f, p)]
        if not inside or span(inside) != f:
            undetermined.append(f)
            continue
        image = span([fmap(p) for p in inside])
        if image.dimension != f.dimension or not is_clique(f.graph, image.type):
            violations.append((f, f"image {format_flat(image)} is not a flat of rank {f.dimension}"))
            continue
        mapping[f] = make_flat(image.rep, image.type)
    for low, high in ball.edges:
        if low in mapping and high in mapping and not flat_leq(mapping[low], mapping[high]):
            violations.append((low, f"containment in {format_flat(high)} is not preserved"))
    if violations:
        logger.warning(f"Window map is not flat-preserving at {len(violations)} flats")
        if strict:
            raise RaagError(violations[0][1], witness=violations[0][0])
    return PartialAutomorphism(mapping, tuple(undetermined), tuple(violations))


def auto_to_fp(auto: PartialAutomorphism) -> WindowMap:
    """Restriction of a partial automorphism to rank-0 vertices, as a map of group elements"""
    if not auto.mapping:
        raise RaagError("Partial automorphism has an empty domain")
    graph = next(iter(auto.mapping)).graph
    table = {f.rep: g.rep for f, g in auto.mapping.items() if not f.type}
    return WindowMap(graph, table=table, name='rank-0 restriction')


@dataclass(frozen=True)
class InducedPointMap:
    points: WindowMap
    failures: Dict[NormalForm, str]


def ext_to_fp(alpha: Dict[ExtVertex, ExtVertex], points: Iterable[NormalForm]) -> InducedPointMap:
    """A map on the extension graph induces a point map: p goes to the intersection of the flats realising α(Δ(F)), F ∋ p maximal"""
    table: Dict[NormalForm, NormalForm] = {}
    failures: Dict[NormalForm, str] = {}
    graph = None
    for p in points:
        graph = p.graph
        meet: Optional[StandardCoset] = None
        reason = None
        for clique in cliques(graph, maximal_only=True):
            vertices = delta(make_flat(p, clique))
            if any(u not in alpha for u in vertices):
                reason = 'outside the domain of the extension-graph map'
                break
            try:
                target = flat_from_clique(alpha[u] for u in vertices)
            except RaagError as e:
                reason = str(e)
                break
            meet = target if meet is None else coset_intersection(meet, target)
            if meet is None:
                reason = 'image flats do not meet'
                break
        if reason is None and meet is not None and meet.dimension:
            reason = f"image flats meet in {format_flat(meet)}, not a point"
        if reason:
            failures[p] = reason
        else:
            table[p] = meet.rep
    if graph is None:
        raise RaagError("No points given")
    return InducedPointMap(WindowMap(graph, table=table, name='induced by extension-graph map'), failures)


def fp_to_ext(fmap: WindowMap, classes: Iterable[ExtVertex], patch_radius: int = 1) -> Tuple[Dict[ExtVertex, ExtVertex], Dict[ExtVertex, str]]:
    """Map induced on parallelism classes of lines by a flat-preserving window map"""
    alpha: Dict[ExtVertex, ExtVertex] = {}
    failures: Dict[ExtVertex, str] = {}
    for u in classes:
        line = make_flat(u.conjugator, [u.type])
        image = fmap.image_flat(line, patch_radius)
        if image is None:
            failures[u] = 'patch leaves the window'
        elif image.dimension != 1:
            failures[u] = f"line maps into {format_flat(image)}"
        else:
            (t,) = image.type
            alpha[u] = ExtVertex(t, image.rep)
    return alpha, failures


def conjugation_map(h: HatElement, classes: Iterable[ExtVertex]) -> Dict[ExtVertex, ExtVertex]:
    return {u: h.act_ext(u) for u in classes}


# Complement loops and geodesics

def complement_loop_path(graph: SimplicialGraph, loop: Sequence[str]) -> List[StandardFlat]:
    """{id}, <a1>, a1, a1<a2>, ..., a1...an for an immersed loop a1,...,an,a1 in the complement graph"""
    loop = list(loop)
    if len(loop) > 1 and loop[0] == loop[-1]:
        loop = loop[:-1]
    for v in loop:
        graph.check_vertex(v)
    n = len(loop)
    if n < 2:
        raise LoopError(f"A complement loop needs at least two vertices, got {loop}")
    for i in range(n):
        a, b = loop[i], loop[(i + 1) % n]
        if a == b or graph.adjacent(a, b):
            raise LoopError(f"{a} and {b} are not joined in the complement graph", witness=(a, b))
        if n >= 3 and loop[i - 1] == b:
            raise LoopError(f"Loop backtracks at {a}", witness=a)
    path = []
    point = identity(graph)
    for v in loop:
        path.append(make_flat(point, []))
        path.append(make_flat(point, [v]))
        point = point.times(v)
    path.append(make_flat(point, []))
    return path


def axis_path(graph: SimplicialGraph, loop: Sequence[str], periods: int) -> List[StandardFlat]:
    """Concatenation of the translates w^i·Q, w = a1...an"""
    segment = complement_loop_path(graph, loop)
    step = segment[-1].rep
    path = [segment[0]]
    for i in range(periods):
        shift = power(step, i)
        path.extend(make_flat(multiply(shift, f.rep), f.type) for f in segment[1:])
    return path


def _in_box(flat: StandardFlat, length_bound: int, exponent_bound: Optional[int]) -> bool:
    if flat.rep.length > length_bound:
        return False
    return exponent_bound is None or all(abs(e) <= exponent_bound for _, e in flat.rep.syllables)


def flat_distance(start: StandardFlat, target: StandardFlat, radius: int, length_bound: int,
                  exponent_bound: Optional[int] = None) -> Optional[int]:
    """Distance inside the box of flats with representatives no longer than length_bound and
    syllable exponents at most exponent_bound, or None beyond radius.

    Searches from both ends a layer at a time; the first layer that meets the other side fixes the distance.
    """
    if not (_in_box(start, length_bound, exponent_bound) and _in_box(target, length_bound, exponent_bound)):
        return None
    if start == target:
        return 0
    seen = [{start: 0}, {target: 0}]
    frontiers = [[start], [target]]
    depths = [0, 0]
    while depths[0] + depths[1] < radius and frontiers[0] and frontiers[1]:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        mine, other = seen[side], seen[1 - side]
        depths[side] += 1
        layer = []
        for f in frontiers[side]:
            for n in _neighbors(f, length_bound, exponent_bound):
                if n in other:
                    return depths[side] + other[n]
                if n not in mine:
                    mine[n] = depths[side]
                    layer.append(n)
        frontiers[side] = layer
    return None


@dataclass(frozen=True)
class GeodesicReport:
    holds: bool
    path_length: int
    bfs_distance: Optional[int]
    radius: int
    length_bound: int
    exponent_bound: Optional[int] = None
    # closed-form distance, only when both ends have rank 0
    exact_distance: Optional[int] = None


def verify_geodesic(path: Sequence[StandardFlat], ball: Optional[BuildingBall] = None) -> GeodesicReport:
    """Compare the path length with the BFS distance between its ends.

    Without a ball, BFS runs to radius len+1 inside a box: representatives at most len longer than the
    longest one on the path, syllable exponents no larger than the path's largest. The box is part of
    the report. When both ends have rank 0 the closed-form distance must agree as well.
    """
    length = len(path) - 1
    for a, b in zip(path, path[1:]):
        if abs(rank(a) - rank(b)) != 1 or not (flat_leq(a, b) or flat_leq(b, a)):
            raise RaagError(f"{format_flat(a)} and {format_flat(b)} are not adjacent", witness=(a, b))
    exact = None
    if rank(path[0]) == 0 and rank(path[-1]) == 0:
        exact = rank0_distance(path[0].rep, path[-1].rep)
    if ball is not None:
        try:
            distance = distance_between(ball, path[0], path[-1])
        except (nx.NetworkXNoPath, nx.NodeNotFound):
            distance = None
        holds = distance == length and exact in (None, length)
        return GeodesicReport(holds, length, distance, ball.radius, ball.length_bound, exact_distance=exact)
    bound = max(f.rep.length for f in path) + length
    exponent = max([abs(e) for f in path for _, e in f.rep.syllables] or [1])
    distance = flat_distance(path[0], path[-1], length + 1, bound, exponent)
    logger.info(f"Geodesic check: path {length}, BFS {distance}, closed form {exact}")
    holds = distance == length and exact in (None, length)
    return GeodesicReport(holds, length, distance, length + 1, bound, exponent, exact)


def rank0_distance(g: NormalForm, h: NormalForm) -> int:
    """Building distance between rank-0 vertices: twice the syllable length of g^-1 h"""
    return 2 * len(multiply(invert(g), h).syllables)
