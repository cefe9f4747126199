"""JSON and DOT readers / writers. Orderings are fixed so identical inputs give identical bytes."""
import json
import logging
from typing import Any, Dict, List

from blowup import BlowupComplex, BlowupDatum, LineTable, format_y_vertex
from building import BuildingBall
from errors import DatumError, GraphFormatError, InputFormatError
from extension_graph import ExtBall, format_ext_vertex
from flats import StandardCoset, format_flat
from graph_core import SimplicialGraph
from lattice_lab import LabeledDigraph
from words import NormalForm, format_word

logger = logging.getLogger(__name__)

RANK_COLORS = ['black', 'blue', 'red', 'darkgreen', 'orange']


def load_json(path: str) -> Any:
    """Read a JSON file, reporting decode errors with their position"""
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except FileNotFoundError:
        raise InputFormatError(f"File {path} not found")
    except json.JSONDecodeError as e:
        raise InputFormatError(f"Invalid JSON in {path}: {e.msg}", e.lineno, e.colno)


def dump_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False)


def graph_from_json(data: Any) -> SimplicialGraph:
    if not isinstance(data, dict) or 'vertices' not in data:
        raise GraphFormatError("Graph JSON needs a 'vertices' list and an optional 'edges' list")
    vertices = data['vertices']
    edges = data.get('edges', [])
    if not isinstance(vertices, list) or not isinstance(edges, list):
        raise GraphFormatError("'vertices' and 'edges' must be lists")
    for e in edges:
        if not isinstance(e, list) or len(e) != 2:
            raise GraphFormatError(f"Edge {e!r} is not a pair")
    return SimplicialGraph([str(v) for v in vertices], [(str(a), str(b)) for a, b in edges])


def load_graph(path: str) -> SimplicialGraph:
    graph = graph_from_json(load_json(path))
    logger.debug(f"Loaded graph {path}: {len(graph)} vertices")
    return graph


def graph_to_json(graph: SimplicialGraph) -> Dict[str, Any]:
    return {'vertices': list(graph.vertices), 'edges': [list(e) for e in graph.edge_list()]}


def _quote(name: str) -> str:
    return '"' + name.replace('\\', '\\\\').replace('"', '\\"') + '"'


def graph_to_dot(graph: SimplicialGraph, name: str = 'G') -> str:
    lines = [f"graph {name} {{"]
    lines += [f"  {_quote(v)};" for v in graph.vertices]
    lines += [f"  {_quote(a)} -- {_quote(b)};" for a, b in graph.edge_list()]
    lines.append("}")
    return "\n".join(lines) + "\n"


def word_to_json(w: NormalForm) -> List[List[Any]]:
    return [[g, e] for g, e in w.syllables]


def flat_to_json(c: StandardCoset) -> Dict[str, Any]:
    return {'rep': format_word(c.rep), 'type': list(c.graph.ordered(c.type))}


def ext_ball_to_json(b: ExtBall) -> Dict[str, Any]:
    return {
        'base': format_ext_vertex(b.base),
        'radius': b.radius,
        'length_bound': b.length_bound,
        'vertices': [
            {'id': format_ext_vertex(u), 'distance': b.distances[u], 'complete': b.complete[u]}
            for u in b.vertices
        ],
        'edges': [[format_ext_vertex(a), format_ext_vertex(c)] for a, c in b.edges],
    }


def ext_ball_to_dot(b: ExtBall) -> str:
    lines = ["graph extension {"]
    for u in b.vertices:
        style = '' if b.complete[u] else ', style=dashed'
        lines.append(f"  {_quote(format_ext_vertex(u))} [label={_quote(str(u))}{style}];")
    for a, c in b.edges:
        lines.append(f"  {_quote(format_ext_vertex(a))} -- {_quote(format_ext_vertex(c))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def building_ball_to_json(ball: BuildingBall) -> Dict[str, Any]:
    return {
        'base': format_flat(ball.base),
        'radius': ball.radius,
        'length_bound': ball.length_bound,
        'vertices': [
            {'id': format_flat(f), 'rank': len(f.type), 'distance': ball.distances[f], 'complete': ball.complete[f]}
            for f in ball.vertices
        ],
        'cubes': [[format_flat(c.low), format_flat(c.high)] for c in ball.cubes],
    }


def building_ball_to_dot(ball: BuildingBall) -> str:
    lines = ["graph building {"]
    for f in ball.vertices:
        color = RANK_COLORS[min(len(f.type), len(RANK_COLORS) - 1)]
        lines.append(f"  {_quote(format_flat(f))} [color={color}];")
    for low, high in ball.edges:
        lines.append(f"  {_quote(format_flat(low))} -- {_quote(format_flat(high))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def blowup_to_json(y: BlowupComplex) -> Dict[str, Any]:
    vertices = sorted(format_y_vertex(v) for v in y.vertices)
    cells = sorted(sorted(format_y_vertex(v) for v in c) for c in y.cells)
    return {'vertices': vertices, 'cells': cells}


def blowup_to_dot(y: BlowupComplex) -> str:
    lines = ["graph blowup {"]
    for v in sorted(format_y_vertex(v) for v in y.vertices):
        lines.append(f"  {_quote(v)};")
    for a, b in sorted((format_y_vertex(a), format_y_vertex(b)) for a, b in y.edges()):
        lines.append(f"  {_quote(a)} -- {_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _int(value: Any, what: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise DatumError(f"{what} must be an integer, got {value!r}", witness=value)


def table_from_json(entry: Any) -> LineTable:
    """{"window": [lo, hi], "rule": "identity" | "floor_div" | "explicit", "divisor": d, "values": {z: n}}"""
    if not isinstance(entry, dict):
        raise DatumError(f"Table entry must be an object, got {entry!r}")
    rule = entry.get('rule', 'identity')
    if rule == 'explicit':
        values = entry.get('values')
        if not isinstance(values, dict):
            raise DatumError("Explicit table needs a 'values' object")
        return LineTable.explicit({_int(k, 'Table point'): _int(v, 'Table value') for k, v in values.items()})
    try:
        lo, hi = entry['window']
    except (KeyError, TypeError, ValueError):
        raise DatumError("Table needs a 'window' pair [lo, hi]")
    lo, hi = _int(lo, 'Window end'), _int(hi, 'Window end')
    if rule == 'identity':
        return LineTable.identity(lo, hi)
    if rule == 'floor_div':
        return LineTable.floor_div(lo, hi, _int(entry.get('divisor', 2), 'Divisor'))
    raise DatumError(f"Unknown table rule {rule!r}")


def table_to_json(table: LineTable) -> Dict[str, Any]:
    data: Dict[str, Any] = {'window': [table.lo, table.hi], 'rule': table.rule}
    if table.rule == 'floor_div':
        data['divisor'] = table.divisor
    if table.rule == 'explicit':
        data['values'] = {str(z): n for z, n in table.values.items()}
    return data


def datum_from_json(graph: SimplicialGraph, data: Any, fiber_bound: int) -> BlowupDatum:
    if not isinstance(data, dict) or not isinstance(data.get('types'), dict):
        raise DatumError("Datum JSON needs a 'types' object")
    tables = {}
    for v, entry in data['types'].items():
        graph.check_vertex(v)
        tables[v] = table_from_json(entry)
    missing = [v for v in graph.vertices if v not in tables]
    if missing:
        raise DatumError(f"Datum has no table for {missing}", witness=missing)
    return BlowupDatum(tables, fiber_bound=_int(data.get('fiber_bound', fiber_bound), 'fiber_bound'))


def datum_to_json(datum: BlowupDatum) -> Dict[str, Any]:
    return {
        'types': {v: table_to_json(t) for v, t in sorted(datum.tables.items())},
        'fiber_bound': datum.fiber_bound,
    }


def digraph_to_json(d: LabeledDigraph) -> Dict[str, Any]:
    return {
        'vertices': [{'id': v, 'color': c} for v, c in d.colors.items()],
        'edges': [{'from': s, 'to': t, 'label': label} for s, t, label in d.edges],
    }


def digraph_from_json(data: Any) -> LabeledDigraph:
    if not isinstance(data, dict):
        raise InputFormatError("Digraph JSON must be an object")
    d = LabeledDigraph()
    try:
        for v in data.get('vertices', []):
            d.add_vertex(str(v['id']), v.get('color'))
        for e in data.get('edges', []):
            d.add_edge(str(e['from']), str(e['to']), str(e['label']))
    except (KeyError, TypeError, AttributeError) as e:
        raise InputFormatError(f"Digraph JSON entry is malformed: {e!r}")
    return d


def write_text(path: str, text: str) -> None:
    with open(path, 'w') as f:
        f.write(text)
    logger.info(f"Wrote {path}")
