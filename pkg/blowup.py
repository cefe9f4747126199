"""Blow-up data, branched lines and flats, the blow-up complex Y over a building ball,
the collapse map π: Y → B and empirical quasi-isometry constants.

A vertex of Y is named by its carrier (a standard flat F') and the core
coordinates along the types of F'. A vertex of the branched flat β_F whose
coordinates in T ⊆ type(F) sit on tips is the all-core vertex of the smaller
branched flat over the flat of type type(F) - T through the point the tips
pick out; this is the gluing β_F' ↪ β_F.
"""
import logging
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import pandas as pd

from building import BuildingBall, Cube, rank
from config import get_settings
from errors import CompatibilityError, DatumError, RaagError
from extension_graph import ExtVertex
from flats import StandardFlat, coset_intersection, decompose_point, flat_leq, format_flat, make_flat, z_coordinate
from words import NormalForm, generator, invert, multiply

logger = logging.getLogger(__name__)


class LineTable:
    """Finite surjection g: [lo, hi] → [min g, max g] with bounded fibers"""

    def __init__(self, values: Dict[int, int], rule: str = 'explicit', divisor: int = 1):
        if not values:
            raise DatumError("Empty line table")
        self.values = {int(k): int(v) for k, v in sorted(values.items())}
        self.lo = min(self.values)
        self.hi = max(self.values)
        if sorted(self.values) != list(range(self.lo, self.hi + 1)):
            raise DatumError(f"Table window [{self.lo}, {self.hi}] has holes")
        self.rule = rule
        self.divisor = divisor

    @classmethod
    def identity(cls, lo: int, hi: int) -> 'LineTable':
        return cls({z: z for z in range(lo, hi + 1)}, rule='identity')

    @classmethod
    def floor_div(cls, lo: int, hi: int, divisor: int = 2) -> 'LineTable':
        if divisor < 1:
            raise DatumError(f"Divisor must be positive, got {divisor}")
        return cls({z: z // divisor for z in range(lo, hi + 1)}, rule='floor_div', divisor=divisor)

    @classmethod
    def explicit(cls, values: Dict[int, int]) -> 'LineTable':
        return cls(values)

    def __call__(self, z: int) -> int:
        return self.values[z]

    def __contains__(self, z: object) -> bool:
        return z in self.values

    def __repr__(self) -> str:
        return f"LineTable({self.rule}, [{self.lo}, {self.hi}])"

    @property
    def window(self) -> Tuple[int, int]:
        return self.lo, self.hi

    @property
    def image(self) -> Tuple[int, int]:
        return min(self.values.values()), max(self.values.values())

    def fiber(self, n: int) -> List[int]:
        return [z for z, v in self.values.items() if v == n]

    def fiber_sizes(self) -> Dict[int, int]:
        low, high = self.image
        return {n: len(self.fiber(n)) for n in range(low, high + 1)}

    def validate(self, fiber_bound: int) -> None:
        sizes = self.fiber_sizes()
        if len(self.values) > 1 and len(set(self.values.values())) == 1:
            raise DatumError(f"Constant table on a window of {len(self.values)} points")
        gaps = [n for n, size in sizes.items() if size == 0]
        if gaps:
            raise DatumError(f"Table is not surjective onto its image interval; misses {gaps[0]}", witness=gaps[0])
        fat = [n for n, size in sizes.items() if size > fiber_bound]
        if fat:
            raise DatumError(f"Fiber over {fat[0]} has {sizes[fat[0]]} points, bound is {fiber_bound}", witness=fat[0])


@dataclass(frozen=True)
class BranchedLine:
    core: Tuple[int, int]
    tips: Tuple[Tuple[int, int], ...]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        lo, hi = self.core
        g.add_nodes_from(('core', n) for n in range(lo, hi + 1))
        g.add_edges_from((('core', n), ('core', n + 1)) for n in range(lo, hi))
        g.add_edges_from((('tip', z), ('core', n)) for z, n in self.tips)
        return g


def make_branched_line(table: LineTable, window: Optional[Tuple[int, int]] = None,
                       fiber_bound: Optional[int] = None) -> BranchedLine:
    """One tip per domain point, attached at its image"""
    if window is not None:
        lo, hi = window
        missing = [z for z in range(lo, hi + 1) if z not in table]
        if missing:
            raise DatumError(f"Window [{lo}, {hi}] exceeds the table at {missing[0]}", witness=missing[0])
        table = LineTable({z: table(z) for z in range(lo, hi + 1)}, rule=table.rule, divisor=table.divisor)
    table.validate(fiber_bound if fiber_bound is not None else get_settings().fiber_bound)
    return BranchedLine(table.image, tuple(table.values.items()))


@dataclass
class BlowupDatum:
    """A table per vertex type of Γ, read in the local Z-coordinate of each line.

    Overrides replace the table on individual parallelism classes. Since the
    parallelism maps preserve the Z-coordinate, every line of a class gets
    g_ℓ2 = g_ℓ1 ∘ p automatically.
    """
    tables: Dict[str, LineTable]
    overrides: Dict[ExtVertex, LineTable] = field(default_factory=dict)
    fiber_bound: int = 4

    def __post_init__(self):
        for name, t in list(self.tables.items()) + [(str(u), t) for u, t in self.overrides.items()]:
            try:
                t.validate(self.fiber_bound)
            except DatumError as e:
                raise DatumError(f"Table for {name}: {e}", witness=e.witness)

    @classmethod
    def uniform(cls, types: Iterable[str], table: LineTable, fiber_bound: Optional[int] = None) -> 'BlowupDatum':
        bound = fiber_bound if fiber_bound is not None else get_settings().fiber_bound
        return cls({v: table for v in types}, fiber_bound=bound)

    def table_for(self, u: ExtVertex) -> LineTable:
        if u in self.overrides:
            return self.overrides[u]
        if u.type not in self.tables:
            raise DatumError(f"No table for vertex type {u.type}", witness=u.type)
        return self.tables[u.type]


YVertex = Tuple[StandardFlat, Tuple[int, ...]]
Cell = FrozenSet[YVertex]


def format_y_vertex(y: YVertex) -> str:
    return f"{format_flat(y[0])}|{','.join(str(n) for n in y[1])}"


@dataclass(frozen=True)
class BlowupComplex:
    datum: BlowupDatum
    ball: BuildingBall
    vertices: FrozenSet[YVertex]
    cells: FrozenSet[Cell]
    branched_flats: Dict[StandardFlat, FrozenSet[YVertex]]

    def edges(self) -> List[Tuple[YVertex, YVertex]]:
        return [tuple(sorted(c, key=_y_key)) for c in self.cells if len(c) == 2]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges())
        return g

    def tip(self, point: NormalForm) -> YVertex:
        """f: G → Y on the window"""
        y = (make_flat(point, []), ())
        if y not in self.vertices:
            raise RaagError(f"{point} is outside the window of the blow-up")
        return y


def _y_key(y: YVertex) -> Tuple:
    return (y[0].sort_key(), y[1])


def _line_class(flat: StandardFlat, x: str) -> ExtVertex:
    return ExtVertex(x, flat.rep)


def _name(flat: StandardFlat, assignment: Dict[str, Tuple[str, int]]) -> YVertex:
    """Global name of the vertex of β_F with the given per-coordinate (kind, value) assignment"""
    graph = flat.graph
    point = flat.rep
    cores = []
    core_types = []
    for x in graph.ordered(flat.type):
        kind, value = assignment[x]
        if kind == 'tip':
            offset = value - z_coordinate(_line_class(flat, x), point)
            if offset:
                point = multiply(point, generator(graph, x, offset))
        else:
            core_types.append(x)
            cores.append(value)
    return make_flat(point, core_types), tuple(cores)


def _pieces(table: LineTable) -> List[Tuple[str, Tuple]]:
    """Cells of one branched line: core vertices, tips, core edges and tip edges"""
    low, high = table.image
    pieces: List[Tuple[str, Tuple]] = [('v', (('core', n),)) for n in range(low, high + 1)]
    pieces += [('v', (('tip', z),)) for z in range(table.lo, table.hi + 1)]
    pieces += [('e', (('core', n), ('core', n + 1))) for n in range(low, high)]
    pieces += [('e', (('tip', z), ('core', table(z)))) for z in range(table.lo, table.hi + 1)]
    return pieces


def _check_windows(datum: BlowupDatum, ball: BuildingBall) -> None:
    for low, high in ball.edges:
        (x,) = high.type - low.type
        u = _line_class(high, x)
        table = datum.table_for(u)
        z = z_coordinate(u, low.rep)
        if z not in table:
            raise DatumError(
                f"{format_flat(low)} sits at coordinate {z} of the {x}-line class {u}, outside the table window "
                f"[{table.lo}, {table.hi}]", witness=(low, high))


def assemble(datum: BlowupDatum, ball: BuildingBall) -> BlowupComplex:
    """Branched flats over every flat of the ball, glued along their common faces"""
    _check_windows(datum, ball)
    present = set(ball.vertices)
    cells = set()
    branched: Dict[StandardFlat, FrozenSet[YVertex]] = {}
    for flat in ball.vertices:
        types = flat.graph.ordered(flat.type)
        per_type = [_pieces(datum.table_for(_line_class(flat, x))) for x in types]
        members = set()
        for choice in product(*per_type):
            corners = []
            for combo in product(*[piece for _, piece in choice]):
                y = _name(flat, dict(zip(types, combo)))
                if y[0] not in present:
                    break
                corners.append(y)
            else:
                cell = frozenset(corners)
                cells.add(cell)
                members.update(corners)
        branched[flat] = frozenset(members)
    vertices = frozenset(y for c in cells for y in c)
    logger.info(f"Assembled blow-up over {len(ball.vertices)} flats: {len(vertices)} vertices, {len(cells)} cells")
    return BlowupComplex(datum, ball, vertices, frozenset(cells), branched)


def project_pi(y_complex: BlowupComplex, cell: Iterable[YVertex]) -> Cube:
    """Image of a cell of Y: the interval spanned by the carriers of its corners"""
    cell = frozenset(cell)
    if cell not in y_complex.cells:
        raise RaagError("Cell is not in the blow-up complex", witness=cell)
    carriers = {y[0] for y in cell}
    low = min(carriers, key=lambda f: (rank(f), f.sort_key()))
    high = max(carriers, key=lambda f: (rank(f), f.sort_key()))
    image = Cube(low, high)
    if any(not image.contains(c) for c in carriers):
        raise RaagError("Cell image is not an interval", witness=cell)
    return image


def cell_image_kind(y_complex: BlowupComplex, cell: Iterable[YVertex]) -> str:
    """'isometry' when π maps the cell onto a cube of the same dimension, else 'collapse'"""
    cell = frozenset(cell)
    image = project_pi(y_complex, cell)
    dimension = int(math.log2(len(cell)))
    carriers = {y[0] for y in cell}
    if image.dimension == dimension and len(carriers) == len(cell):
        return 'isometry'
    return 'collapse'


def collapse_graph(y_complex: BlowupComplex) -> nx.Graph:
    """Quotient of the 1-skeleton of Y by π"""
    g = nx.Graph()
    g.add_nodes_from({y[0] for y in y_complex.vertices})
    for a, b in y_complex.edges():
        if a[0] != b[0]:
            g.add_edge(a[0], b[0])
    return g


@dataclass(frozen=True)
class TipReport:
    holds: bool
    missing: Tuple[StandardFlat, ...]
    extra: Tuple[StandardFlat, ...]
    injective_lines: bool


def check_tip_bijection(y_complex: BlowupComplex) -> TipReport:
    """Rank-0 vertices of Y against rank-0 vertices of the base ball"""
    tips = {y[0] for y in y_complex.vertices if not y[0].type}
    points = set(y_complex.ball.rank0())
    injective = True
    for flat in y_complex.ball.vertices:
        if rank(flat) != 1:
            continue
        (x,) = flat.type
        table = y_complex.datum.table_for(_line_class(flat, x))
        attached = [table(z_coordinate(_line_class(flat, x), p.rep)) for p in points if flat_leq(p, flat)]
        injective = injective and len(attached) == len(set(attached))
    missing = tuple(sorted(points - tips, key=StandardFlat.sort_key))
    extra = tuple(sorted(tips - points, key=StandardFlat.sort_key))
    return TipReport(not missing and not extra, missing, extra, injective)


def check_intersections(y_complex: BlowupComplex) -> List[Tuple[StandardFlat, StandardFlat]]:
    """Pairs of flats with β_F1 ∩ β_F2 ≠ β_(F1∩F2)"""
    bad = []
    flats = list(y_complex.branched_flats)
    for i, f1 in enumerate(flats):
        for f2 in flats[i + 1:]:
            meet = y_complex.branched_flats[f1] & y_complex.branched_flats[f2]
            inter = coset_intersection(f1, f2)
            if inter is None or inter not in y_complex.branched_flats:
                # only the part of β over the ball is built
                expected = frozenset(y for y in meet if inter is not None and flat_leq(y[0], inter))
            else:
                expected = y_complex.branched_flats[inter]
            if meet != expected:
                bad.append((f1, f2))
    return bad


def is_isomorphic_to_ball(y_complex: BlowupComplex) -> bool:
    """Trivial-datum test: collapse equals the ball's 1-skeleton and tips attach injectively"""
    return (nx.utils.graphs_equal(collapse_graph(y_complex), y_complex.ball.to_networkx())
            and check_tip_bijection(y_complex).injective_lines)


@dataclass(frozen=True)
class DistortionReport:
    multiplicative: float
    additive: float
    pairs: int
    samples: pd.DataFrame


def _sample_pairs(points: Sequence[StandardFlat], limit: int) -> List[Tuple[StandardFlat, StandardFlat]]:
    pairs = [(a, b) for i, a in enumerate(points) for b in points[i + 1:]]
    if len(pairs) <= limit:
        return pairs
    stride = len(pairs) / limit
    return [pairs[int(i * stride)] for i in range(limit)]


def distortion(y_complex: BlowupComplex, sample_limit: Optional[int] = None) -> DistortionReport:
    """Empirical (L, A) comparing the word metric on the window with the 1-skeleton metric of Y.

    L is the worst two-sided ratio over far pairs (word distance at least half the window diameter),
    A the least additive constant making d_G/L - A <= d_Y <= L·d_G + A hold on every sampled pair.
    """
    limit = sample_limit if sample_limit is not None else get_settings().sample_limit
    points = sorted(y_complex.ball.rank0(), key=StandardFlat.sort_key)
    columns = ['p', 'q', 'd_G', 'd_Y']
    if len(points) < 2:
        return DistortionReport(1.0, 0.0, 0, pd.DataFrame(columns=columns))
    skeleton = y_complex.to_networkx()
    pairs = _sample_pairs(points, limit)
    rows = []
    lengths: Dict[StandardFlat, Dict] = {}
    for a, b in pairs:
        if a not in lengths:
            lengths[a] = nx.single_source_shortest_path_length(skeleton, (a, ()))
        d_y = lengths[a].get((b, ()))
        if d_y is None:
            raise RaagError(f"Blow-up is disconnected between {format_flat(a)} and {format_flat(b)}")
        d_g = multiply(invert(a.rep), b.rep).length
        rows.append({'p': str(a.rep), 'q': str(b.rep), 'd_G': d_g, 'd_Y': d_y})
    samples = pd.DataFrame(rows, columns=columns)
    diameter = int(samples['d_G'].max())
    far = samples[samples['d_G'] >= max(1, math.ceil(diameter / 2))]
    ratio = max((far['d_Y'] / far['d_G']).max(), (far['d_G'] / far['d_Y']).max(), 1.0)
    slack = max((samples['d_Y'] - ratio * samples['d_G']).max(), (samples['d_G'] / ratio - samples['d_Y']).max(), 0.0)
    logger.info(f"Distortion over {len(samples)} pairs: L={ratio:.3f}, A={slack:.3f}")
    return DistortionReport(float(ratio), float(slack), len(samples), samples)


# Data from actions

ZMap = Dict[int, int]
Isometry = Tuple[int, int]


def _check_equivariance(name: str, table: LineTable, alpha: ZMap, gamma: Isometry) -> None:
    sign, shift = gamma
    for z, image in sorted(alpha.items()):
        if z in table and image in table and table(image) != sign * table(z) + shift:
            raise CompatibilityError(
                f"{name}: g({image}) = {table(image)} but the action predicts {sign * table(z) + shift}", witness=z)


def datum_from_actions(orbit_tables: Dict[str, LineTable],
                       actions: Optional[Dict[str, List[Tuple[ZMap, Isometry]]]] = None,
                       conjugators: Optional[Dict[ExtVertex, Tuple[str, ZMap]]] = None,
                       fiber_bound: Optional[int] = None) -> BlowupDatum:
    """Datum from per-orbit semiconjugacies: g_w = g_v ∘ h_w for the chosen h_w moving w to the orbit representative.

    Each action entry is a map α on Z-coordinates with the isometry z ↦ sign·z + shift it should be
    semiconjugate to; equivariance g(α(z)) = sign·g(z) + shift is verified on the window.
    """
    bound = fiber_bound if fiber_bound is not None else get_settings().fiber_bound
    for v, entries in (actions or {}).items():
        if v not in orbit_tables:
            raise DatumError(f"Action given for type {v} with no table", witness=v)
        for alpha, gamma in entries:
            _check_equivariance(v, orbit_tables[v], alpha, gamma)
    overrides = {}
    for u, (target, zmap) in (conjugators or {}).items():
        table = orbit_tables[target]
        values = {z: table(image) for z, image in zmap.items() if image in table}
        overrides[u] = LineTable.explicit(values)
    return BlowupDatum(dict(orbit_tables), overrides, bound)


@dataclass(frozen=True)
class CompatibilityReport:
    holds: bool
    witnesses: Tuple[Tuple[ExtVertex, ExtVertex, str], ...] = ()


def check_compatibility(action: Iterable, datum: BlowupDatum, classes: Iterable[ExtVertex]) -> CompatibilityReport:
    """For each group element h and line class u, the tip map induced by h must descend to an isometry of cores.

    `action` holds HatElement-like objects with act_point / act_ext.
    """
    witnesses = []
    classes = list(classes)
    for h in action:
        for u in classes:
            target = h.act_ext(u)
            source_table = datum.table_for(u)
            target_table = datum.table_for(target)
            core_map: Dict[int, int] = {}
            problem = None
            for z in range(source_table.lo, source_table.hi + 1):
                point = multiply(u.conjugator, generator(u.graph, u.type, z)) if z else u.conjugator
                z_image, _ = decompose_point(target, h.act_point(point))
                if z_image not in target_table:
                    continue
                n, n_image = source_table(z), target_table(z_image)
                if core_map.setdefault(n, n_image) != n_image:
                    problem = f"fiber over {n} splits between cores {core_map[n]} and {n_image}"
                    break
            if problem is None and len(core_map) >= 2:
                (n0, m0), (n1, m1) = sorted(core_map.items())[:2]
                sign = (m1 - m0) // (n1 - n0) if (m1 - m0) % (n1 - n0) == 0 else 0
                if sign not in (1, -1) or any(m != sign * (n - n0) + m0 for n, m in core_map.items()):
                    problem = f"core map {dict(sorted(core_map.items()))} is not an isometry"
            if problem:
                witnesses.append((u, target, problem))
    return CompatibilityReport(not witnesses, tuple(witnesses))
