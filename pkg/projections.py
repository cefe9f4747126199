"""Star projections onto product regions, factor actions on Z-coordinates,
straightening of quasi-isometries into flat-preserving maps, and orbit analysis
of finitely generated partial actions on integer windows.
"""
import logging
import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import pandas as pd

from errors import NotInFlatError, ProjectionError, StraighteningError
from extension_graph import ExtVertex, adjacent
from flats import (
    StandardCoset,
    StandardFlat,
    WindowMap,
    coset_intersection,
    decompose_point,
    flats_through,
    format_flat,
    make_flat,
    point_distance,
)
from graph_core import cliques, link, star
from words import NormalForm, ball, exponent_sum, format_word, generator, invert, left_divisor, multiply

logger = logging.getLogger(__name__)

PointMap = Callable[[NormalForm], NormalForm]


def star_project(u: ExtVertex, x: NormalForm) -> int:
    """Z-coordinate of the gate of x in P_u = conj·G_st(v)"""
    h = multiply(invert(u.conjugator), x)
    head, _ = left_divisor(h, star(x.graph, u.type))
    return exponent_sum(head, u.type)


def gate(u: ExtVertex, x: NormalForm) -> NormalForm:
    """Nearest point of P_u to x"""
    h = multiply(invert(u.conjugator), x)
    head, _ = left_divisor(h, star(x.graph, u.type))
    return multiply(u.conjugator, head)


def parallel_lines(u: ExtVertex, count: int = 2) -> List[StandardFlat]:
    """The first `count` lines conj·h·<v>, h in G_lk(v), of a parallelism class"""
    graph = u.graph
    lines = []
    radius = 0
    lk = link(graph, u.type)
    while len(lines) < count:
        candidates = ball(graph, radius, lk)
        lines = []
        for h in candidates:
            line = make_flat(multiply(u.conjugator, h), [u.type])
            if line not in lines:
                lines.append(line)
        if not lk or radius > count:
            break
        radius += 1
    return lines[:count]


def _line_projection(u: ExtVertex, line: StandardFlat, reach: int = 2) -> set:
    (t,) = line.type
    return {
        star_project(u, multiply(line.rep, generator(line.graph, t, k)) if k else line.rep)
        for k in range(-reach, reach + 1)
    }


def pi_v(u: ExtVertex, w: ExtVertex, count: int = 2) -> int:
    """Common projection onto Z_u of the lines of class w, checked on `count` representative lines"""
    if u == w or adjacent(u, w):
        raise ProjectionError(f"{w} lies in the star of {u}; its projection is not a point", witness=w)
    values = set()
    for line in parallel_lines(w, count):
        values |= _line_projection(u, line)
    if len(values) != 1:
        raise ProjectionError(f"Lines of {w} project onto {sorted(values)}, not a single point", witness=sorted(values))
    return values.pop()


@dataclass(frozen=True)
class FactorActionWindow:
    vertex: ExtVertex
    window: Tuple[int, ...]
    table: Dict[int, int]

    def __call__(self, z: int) -> int:
        return self.table[z]

    def compose(self, inner: 'FactorActionWindow') -> 'FactorActionWindow':
        """self ∘ inner where both are defined"""
        table = {z: self.table[m] for z, m in inner.table.items() if m in self.table}
        return FactorActionWindow(self.vertex, inner.window, table)


def _defined(h: PointMap, x: NormalForm) -> bool:
    return not isinstance(h, WindowMap) or h.defined_at(x)


def _factor_value(h: PointMap, u: ExtVertex, z: int) -> Optional[int]:
    point = multiply(u.conjugator, generator(u.graph, u.type, z)) if z else u.conjugator
    if not _defined(h, point):
        return None
    try:
        image, _ = decompose_point(u, h(point))
    except NotInFlatError:
        raise ProjectionError(f"Map moves {format_word(point)} off the product region of {u}", witness=point)
    return image


def factor_action(h: PointMap, u: ExtVertex, window: Iterable[int], check_radius: int = 1) -> FactorActionWindow:
    """π1 ∘ h on Z_u: where h sends conj·v^z, read in Z-coordinates.

    Points conj·l·v^z with l in G_lk(v) of length <= check_radius must land on the same coordinate.
    """
    window = tuple(window)
    graph = u.graph
    across = [l for l in ball(graph, check_radius, link(graph, u.type)) if not l.is_identity]
    table = {}
    for z in window:
        image = _factor_value(h, u, z)
        if image is None:
            continue
        for l in across:
            point = multiply(u.conjugator, l, generator(graph, u.type, z)) if z else multiply(u.conjugator, l)
            if not _defined(h, point):
                continue
            try:
                other, _ = decompose_point(u, h(point))
            except NotInFlatError:
                raise ProjectionError(f"Map moves {format_word(point)} off the product region of {u}", witness=point)
            if other != image:
                raise ProjectionError(
                    f"Map does not respect the line direction of {u}: coordinate {z} goes to {image} and {other}",
                    witness=point)
        table[z] = image
    if len(set(table.values())) != len(table):
        raise ProjectionError(f"Induced map on Z-coordinates of {u} is not injective")
    return FactorActionWindow(u, window, table)


@dataclass(frozen=True)
class ConsistencyReport:
    holds: bool
    checked: int
    witnesses: Tuple[Tuple[StandardFlat, str], ...] = ()


def consistency_check(h: WindowMap, u: ExtVertex, lines: Iterable[StandardFlat], patch_radius: int = 2) -> ConsistencyReport:
    """α_u(h)(π_u(Δ(ℓ))) = π_u(Δ(h(ℓ))) on every supplied line with Δ(ℓ) outside st(u)"""
    witnesses = []
    checked = 0
    for line in lines:
        (t,) = line.type
        w = ExtVertex(t, line.rep)
        if w == u or adjacent(u, w):
            continue
        checked += 1
        z = pi_v(u, w)
        lhs = _factor_value(h, u, z)
        image = h.image_flat(line, patch_radius)
        if lhs is None or image is None:
            witnesses.append((line, 'outside the window'))
            continue
        if image.dimension != 1:
            witnesses.append((line, f"image {format_flat(image)} is not a line"))
            continue
        (t2,) = image.type
        try:
            rhs = pi_v(u, ExtVertex(t2, image.rep))
        except ProjectionError as e:
            witnesses.append((line, str(e)))
            continue
        if lhs != rhs:
            witnesses.append((line, f"factor action gives {lhs}, image line projects to {rhs}"))
    return ConsistencyReport(not witnesses, checked, tuple(witnesses))


# Straightening

def default_search_radius(multiplicative: float, additive: float) -> int:
    return max(1, math.ceil(multiplicative * additive / 2))


def boundary_ring_width(search_radius: int) -> int:
    return 2 * search_radius + 2


def perturbed_translation(g: NormalForm, radius: int) -> WindowMap:
    """x ↦ g·x·s(x), s(x) in {id} ∪ generators^±1 chosen from a checksum of x's normal form"""
    graph = g.graph
    steps = [None] + [(v, e) for v in graph.vertices for e in (1, -1)]

    def perturbed(x: NormalForm) -> NormalForm:
        step = steps[zlib.crc32(format_word(x).encode()) % len(steps)]
        image = multiply(g, x)
        return image.times(*step) if step else image

    return WindowMap(graph, func=perturbed, radius=radius, name=f"perturbed translation by {format_word(g)}")


@dataclass(frozen=True)
class StraighteningReport:
    straightened: WindowMap
    search_radius: int
    ring_width: int
    interior: Tuple[NormalForm, ...]
    window_radius: int
    failures: Dict[NormalForm, str] = field(default_factory=dict)
    sup_distance: int = 0

    @property
    def conclusive(self) -> bool:
        return bool(self.interior) and not self.failures


def _image_flat(q: WindowMap, x: NormalForm, f: StandardFlat, patch: int, search: int,
                candidates: List[StandardFlat]) -> Tuple[Optional[StandardFlat], str]:
    images = [q(multiply(x, h)) for h in ball(x.graph, patch, f.type)]
    center = q(x)
    images.sort(key=lambda y: multiply(invert(center), y).length, reverse=True)
    matches = [c for c in candidates if all(point_distance(y, c) <= search for y in images)]
    if not matches:
        return None, f"no flat within {search} of the image of {format_flat(f)}"
    if len(matches) > 1:
        return None, f"{len(matches)} flats fit the image of {format_flat(f)}"
    return matches[0], ''


def straighten_qi(q: WindowMap, multiplicative: float, additive: float, search_radius: Optional[int] = None,
                  radius: Optional[int] = None) -> StraighteningReport:
    """q'(x) = the common point of the maximal flats shadowing q on the maximal flats through x.

    Only points at least one ring width inside the window are straightened; the rest are inconclusive.
    """
    graph = q.graph
    window_radius = radius if radius is not None else q.radius
    if window_radius is None:
        window_radius = max(x.length for x in q.domain())
    search = search_radius if search_radius is not None else default_search_radius(multiplicative, additive)
    ring = boundary_ring_width(search)
    inner_radius = window_radius - ring
    interior = ball(graph, inner_radius) if inner_radius >= 0 else []
    if not interior:
        logger.warning(f"Window radius {window_radius} is inside the boundary ring {ring}; nothing is conclusive")
        empty = WindowMap(graph, table={}, name=f"straightened {q.name}")
        return StraighteningReport(empty, search, ring, (), window_radius)
    maximal = cliques(graph, maximal_only=True)
    shifts = ball(graph, search)

    table: Dict[NormalForm, NormalForm] = {}
    failures: Dict[NormalForm, str] = {}
    for x in interior:
        center = q(x)
        candidates = []
        for s in shifts:
            for clique in maximal:
                c = make_flat(multiply(center, s), clique)
                if c not in candidates:
                    candidates.append(c)
        meet: Optional[StandardCoset] = None
        for f in flats_through(x, only_maximal=True):
            target, reason = _image_flat(q, x, f, ring, search, candidates)
            if target is None:
                failures[x] = reason
                break
            meet = target if meet is None else coset_intersection(meet, target)
            if meet is None:
                failures[x] = 'shadowing flats do not meet'
                break
        else:
            if meet is not None and meet.dimension:
                failures[x] = f"shadowing flats meet in {format_flat(meet)}"
            elif meet is not None:
                table[x] = meet.rep
    sup = max((multiply(invert(q(x)), y).length for x, y in table.items()), default=0)
    if failures:
        logger.warning(f"Straightening failed at {len(failures)} of {len(interior)} interior points")
    logger.info(f"Straightened {len(table)} points (search {search}, ring {ring}), sup distance {sup}")
    straightened = WindowMap(graph, table=table, name=f"straightened {q.name}")
    return StraighteningReport(straightened, search, ring, tuple(interior), window_radius, failures, sup)


def require_straightened(report: StraighteningReport) -> WindowMap:
    if report.failures:
        x, reason = next(iter(report.failures.items()))
        raise StraighteningError(f"Straightening failed at {format_word(x)}: {reason}", witness=x)
    return report.straightened


# Orbits of partial actions on integer windows

@dataclass(frozen=True)
class OrbitReport:
    orbits: pd.DataFrame
    translation_numbers: Dict[str, float]

    @property
    def finite_orbits(self) -> pd.DataFrame:
        return self.orbits[~self.orbits['exits']]


def _translation_number(table: Dict[int, int], window: Sequence[int]) -> float:
    start = window[len(window) // 2]
    z, steps, seen = start, 0, {start}
    while z in table and table[z] in table:
        z = table[z]
        steps += 1
        if z in seen:
            return 0.0
        seen.add(z)
    if z in table:
        z, steps = table[z], steps + 1
    return (z - start) / steps if steps else 0.0


def orbit_analysis(generators: Dict[str, Dict[int, int]], window: Sequence[int]) -> OrbitReport:
    """Orbit partition of the window under the partial action generated by the tables"""
    window = list(window)
    inside = set(window)
    g = nx.Graph()
    g.add_nodes_from(window)
    exits = set()
    for table in generators.values():
        for z in window:
            image = table.get(z)
            if image is None or image not in inside:
                exits.add(z)
            else:
                g.add_edge(z, image)
        # z with no preimage inside the window leaves it under the inverse
        images = {table[z] for z in window if z in table}
        exits.update(z for z in window if z not in images)
    rows = []
    for component in sorted(nx.connected_components(g), key=min):
        members = sorted(component)
        rows.append({
            'size': len(members),
            'min': members[0],
            'max': members[-1],
            'exits': any(z in exits for z in members),
            'members': ','.join(str(z) for z in members),
        })
    orbits = pd.DataFrame(rows, columns=['size', 'min', 'max', 'exits', 'members'])
    numbers = {name: _translation_number(table, window) for name, table in generators.items()}
    logger.info(f"{len(rows)} orbits on a window of {len(window)} points")
    return OrbitReport(orbits, numbers)
