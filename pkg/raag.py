"""raag: command-line front end.

Every command prints one JSON report on stdout. Exit codes: 0 when every
certificate is proved or refuted, 2 when some certificate is inconclusive
because of truncation, 1 on bad input.
"""
import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from colorama import Fore, Style, init

import blowup
import building
import coupling_sim
import export
import extension_graph
import flats
import graph_core
import lattice_lab
import projections
import words
from config import get_settings, setup_logging
from errors import InputFormatError, RaagError

# Initialize colorama for cross-platform colored output
init()

logger = logging.getLogger(__name__)

PROVED = 'proved'
REFUTED = 'refuted'
INCONCLUSIVE = 'inconclusive'


@dataclass
class RunReport:
    command: str
    inputs: Dict[str, Any]
    truncation: Dict[str, Any] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    certificates: List[Dict[str, Any]] = field(default_factory=list)

    def certify(self, name: str, status: str, witness: Any = None, truncation: Optional[Dict[str, Any]] = None) -> None:
        if status == INCONCLUSIVE and not (truncation or self.truncation):
            raise RaagError(f"Inconclusive certificate {name} without a truncation")
        entry: Dict[str, Any] = {'name': name, 'status': status}
        if witness is not None:
            entry['witness'] = witness
        if status == INCONCLUSIVE:
            entry['truncation'] = truncation or self.truncation
        self.certificates.append(entry)

    def digest(self) -> str:
        return hashlib.sha256(export.dump_json(self.inputs).encode()).hexdigest()

    def to_json(self) -> str:
        return export.dump_json({
            'command': self.command,
            'inputs': self.inputs,
            'inputs_digest': self.digest(),
            'truncation': self.truncation,
            'results': self.results,
            'certificates': self.certificates,
        })

    @property
    def exit_code(self) -> int:
        return 2 if any(c['status'] == INCONCLUSIVE for c in self.certificates) else 0


class RaagArgumentParser(argparse.ArgumentParser):
    """Argument errors become input errors (exit 1) instead of argparse's exit 2"""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise InputFormatError(message)


def _graph_input(path: str) -> Dict[str, Any]:
    with open(path, 'rb') as f:
        content = f.read()
    return {'path': path, 'sha256': hashlib.sha256(content).hexdigest()}


def _types(text: str) -> List[str]:
    return [t.strip() for t in text.split(',') if t.strip()]


def _status(holds: bool) -> str:
    return PROVED if holds else REFUTED


def _records(frame) -> List[Dict[str, Any]]:
    """DataFrame rows as plain JSON values"""
    return json.loads(frame.to_json(orient='records'))


# graph

def cmd_graph_analyze(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph_file)
    report = RunReport('graph analyze', {'graph': _graph_input(args.graph_file)})
    rigid = graph_core.is_star_rigid(graph)
    square = graph_core.has_induced_square(graph)
    out = graph_core.out_finiteness(graph)
    factors = graph_core.join_decomposition(graph)
    report.results = {
        'vertices': len(graph),
        'edges': len(graph.edge_list()),
        'out_finite': out.finite,
        'star_rigid': rigid.holds,
        'induced_square': square.holds,
        'dominations': [list(d) for d in out.dominations],
        'separating_stars': out.separating_stars,
        'join_factors': [list(f.vertices) for f in factors],
        'maximal_cliques': [list(graph.ordered(c)) for c in graph_core.cliques(graph, maximal_only=True)],
    }
    report.certify('star_rigid', _status(rigid.holds),
                   None if rigid.holds else {'vertex': rigid.witness[0], 'automorphism': rigid.witness[1]})
    report.certify('induced_square', _status(square.holds), list(square.witness) if square.witness else None)
    report.certify('out_finite', _status(out.finite))
    if out.dominations:
        v, w = out.dominations[0]
        check = words.transvection_check(graph, v, w)
        report.results['transvection'] = {'v': v, 'w': w, 'preserves_relations': check.preserves_relations,
                                          'infinite_order': check.infinite_order}
        report.certify('transvection', _status(check.preserves_relations and check.infinite_order))
    return report


def cmd_graph_dot(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph_file)
    report = RunReport('graph dot', {'graph': _graph_input(args.graph_file)})
    text = export.graph_to_dot(graph)
    if args.dot:
        export.write_text(args.dot, text)
    report.results = {'dot': text if not args.dot else args.dot}
    return report


# word

def cmd_word_normalize(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    w = words.parse_word(graph, args.word)
    report = RunReport('word normalize', {'graph': _graph_input(args.graph), 'word': args.word})
    report.results = {'normal_form': words.format_word(w), 'length': w.length, 'syllables': export.word_to_json(w)}
    return report


def cmd_word_multiply(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    factors = [words.parse_word(graph, w) for w in args.words]
    product = words.multiply(*factors)
    report = RunReport('word multiply', {'graph': _graph_input(args.graph), 'words': args.words})
    report.results = {'product': words.format_word(product), 'length': product.length}
    return report


def cmd_word_coset(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    w = words.parse_word(graph, args.word)
    subset = _types(args.type)
    rep, tail = words.coset_split(w, subset)
    report = RunReport('word coset', {'graph': _graph_input(args.graph), 'word': args.word, 'type': subset})
    report.results = {'min_rep': words.format_word(rep), 'tail': words.format_word(tail)}
    return report


# flat

def cmd_flat_member(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    f = flats.parse_flat(graph, args.flat)
    w = words.parse_word(graph, args.word)
    report = RunReport('flat member', {'graph': _graph_input(args.graph), 'flat': args.flat, 'word': args.word})
    report.results = {'flat': export.flat_to_json(f), 'member': flats.member(f, w),
                      'distance': flats.point_distance(w, f)}
    return report


def cmd_flat_parallel(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    f1, f2 = flats.parse_flat(graph, args.flat1), flats.parse_flat(graph, args.flat2)
    report = RunReport('flat parallel', {'graph': _graph_input(args.graph), 'flats': [args.flat1, args.flat2]})
    report.results = {
        'parallel': flats.are_parallel(f1, f2),
        'parallel_set': export.flat_to_json(flats.parallel_set(f1)),
    }
    return report


def cmd_flat_delta(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    f = flats.parse_flat(graph, args.flat)
    report = RunReport('flat delta', {'graph': _graph_input(args.graph), 'flat': args.flat})
    clique = sorted(flats.delta(f), key=extension_graph.ExtVertex.sort_key)
    report.results = {'flat': export.flat_to_json(f),
                      'delta': [extension_graph.format_ext_vertex(u) for u in clique]}
    return report


def cmd_flat_intersect(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    f1, f2 = flats.parse_flat(graph, args.flat1), flats.parse_flat(graph, args.flat2)
    meet = flats.flat_intersection(f1, f2)
    report = RunReport('flat intersect', {'graph': _graph_input(args.graph), 'flats': [args.flat1, args.flat2]})
    report.results = {'intersection': export.flat_to_json(meet) if meet is not None else None}
    return report


# ext

def cmd_ext_ball(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    base = extension_graph.parse_ext_vertex(graph, args.base)
    b = extension_graph.ext_ball(base, args.radius, args.length_bound)
    report = RunReport('ext ball', {'graph': _graph_input(args.graph), 'base': args.base},
                       {'radius': args.radius, 'length_bound': args.length_bound})
    report.results = export.ext_ball_to_json(b)
    if args.dot:
        export.write_text(args.dot, export.ext_ball_to_dot(b))
    return report


# building

def _building_report(args: argparse.Namespace, command: str) -> Tuple[RunReport, building.BuildingBall]:
    graph = export.load_graph(args.graph)
    base = flats.parse_flat(graph, args.flat)
    ball = building.building_ball(base, args.radius, args.length_bound)
    report = RunReport(command, {'graph': _graph_input(args.graph), 'flat': args.flat},
                       {'radius': args.radius, 'length_bound': args.length_bound})
    return report, ball


def _certify_flag(report: RunReport, ball: building.BuildingBall) -> None:
    flag = building.check_flag(ball)
    report.results['flag'] = {'judged': len(flag.judged), 'skipped': flag.skipped}
    if flag.violations:
        v = flag.violations[0]
        report.certify('flag_links', REFUTED, {'vertex': flats.format_flat(v.vertex), 'kind': v.kind,
                                               'simplex': sorted(flats.format_flat(f) for f in v.simplex)})
    elif flag.judged:
        report.certify('flag_links', PROVED)
    else:
        report.certify('flag_links', INCONCLUSIVE)


def cmd_building_ball(args: argparse.Namespace) -> RunReport:
    report, ball = _building_report(args, 'building ball')
    report.results = export.building_ball_to_json(ball)
    bad = building.check_intervals(ball)
    report.certify('intervals', _status(not bad), str(bad[0]) if bad else None)
    _certify_flag(report, ball)
    if args.dot:
        export.write_text(args.dot, export.building_ball_to_dot(ball))
    return report


def cmd_building_flag(args: argparse.Namespace) -> RunReport:
    report, ball = _building_report(args, 'building flag')
    report.results = {'vertices': len(ball.vertices), 'cubes': len(ball.cubes)}
    _certify_flag(report, ball)
    return report


def cmd_building_geodesic(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    loop = _types(args.loop)
    path = building.complement_loop_path(graph, loop)
    check = building.verify_geodesic(path)
    report = RunReport('building geodesic', {'graph': _graph_input(args.graph), 'loop': loop},
                       {'radius': check.radius, 'length_bound': check.length_bound,
                        'exponent_bound': check.exponent_bound})
    report.results = {'path': [flats.format_flat(f) for f in path], 'length': check.path_length,
                      'bfs_distance': check.bfs_distance, 'exact_distance': check.exact_distance}
    report.certify('geodesic', _status(check.holds),
                   None if check.holds else {'bfs_distance': check.bfs_distance})
    return report


# blowup

def _blowup_inputs(args: argparse.Namespace):
    graph = export.load_graph(args.graph)
    datum = export.datum_from_json(graph, export.load_json(args.datum), get_settings().fiber_bound)
    base = flats.parse_flat(graph, args.flat)
    ball = building.building_ball(base, args.radius, args.length_bound)
    y = blowup.assemble(datum, ball)
    inputs = {'graph': _graph_input(args.graph), 'datum': export.datum_to_json(datum), 'flat': args.flat}
    return y, inputs


def cmd_blowup_assemble(args: argparse.Namespace) -> RunReport:
    y, inputs = _blowup_inputs(args)
    report = RunReport('blowup assemble', inputs, {'radius': args.radius, 'length_bound': args.length_bound})
    tips = blowup.check_tip_bijection(y)
    bad = blowup.check_intersections(y)
    collapse = blowup.collapse_graph(y)
    report.results = {
        'vertices': len(y.vertices),
        'cells': len(y.cells),
        'tip_attachment_injective': tips.injective_lines,
    }
    report.certify('tip_bijection', _status(tips.holds),
                   None if tips.holds else [flats.format_flat(f) for f in tips.missing + tips.extra])
    report.certify('branched_intersections', _status(not bad),
                   [flats.format_flat(f) for f in bad[0]] if bad else None)
    same = sorted(map(str, collapse.nodes)) == sorted(map(str, y.ball.vertices)) and \
        collapse.number_of_edges() == len(y.ball.edges)
    report.certify('collapse_is_ball', _status(same))
    if args.json_out:
        export.write_text(args.json_out, export.dump_json(export.blowup_to_json(y)))
    if args.dot:
        export.write_text(args.dot, export.blowup_to_dot(y))
    return report


def cmd_blowup_distort(args: argparse.Namespace) -> RunReport:
    y, inputs = _blowup_inputs(args)
    limit = args.samples if args.samples is not None else get_settings().sample_limit
    d = blowup.distortion(y, limit)
    report = RunReport('blowup distort', inputs,
                       {'radius': args.radius, 'length_bound': args.length_bound, 'sample_limit': limit})
    report.results = {'multiplicative': round(d.multiplicative, 6), 'additive': round(d.additive, 6),
                      'pairs': d.pairs, 'samples': _records(d.samples.head(20))}
    return report


# project

def cmd_project_star(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    u = extension_graph.parse_ext_vertex(graph, args.vertex)
    x = words.parse_word(graph, args.word)
    report = RunReport('project star', {'graph': _graph_input(args.graph), 'vertex': args.vertex, 'word': args.word})
    report.results = {'coordinate': projections.star_project(u, x),
                      'gate': words.format_word(projections.gate(u, x))}
    return report


def _parse_window(text: str) -> Tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(','))
    except ValueError:
        raise InputFormatError(f"Window {text!r} is not a pair such as -3,3")
    if lo > hi:
        raise InputFormatError(f"Window {text!r} is empty")
    return lo, hi


def cmd_project_factor(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    u = extension_graph.parse_ext_vertex(graph, args.vertex)
    g = words.parse_word(graph, args.translate)
    lo, hi = _parse_window(args.window)
    action = projections.factor_action(flats.WindowMap.translation(g), u, range(lo, hi + 1))
    report = RunReport('project factor', {'graph': _graph_input(args.graph), 'vertex': args.vertex,
                                          'translate': args.translate}, {'window': [lo, hi]})
    report.results = {'table': {str(z): n for z, n in sorted(action.table.items())}}
    return report


def cmd_project_straighten(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    g = words.parse_word(graph, args.translate)
    if args.perturb:
        q = projections.perturbed_translation(g, args.radius)
    else:
        q = flats.WindowMap.translation(g, args.radius)
    result = projections.straighten_qi(q, args.L, args.A, args.search)
    report = RunReport('project straighten', {'graph': _graph_input(args.graph), 'translate': args.translate,
                                              'perturb': args.perturb, 'L': args.L, 'A': args.A},
                       {'radius': args.radius, 'search_radius': result.search_radius,
                        'ring_width': result.ring_width})
    recovered = all(result.straightened(x) == words.multiply(g, x) for x in result.straightened.domain())
    report.results = {'interior': len(result.interior), 'straightened': len(result.straightened.table),
                      'sup_distance': result.sup_distance, 'recovers_translation': recovered,
                      'failures': {words.format_word(x): r for x, r in sorted(
                          result.failures.items(), key=lambda item: item[0].sort_key())}}
    if not result.interior:
        report.certify('straightening', INCONCLUSIVE)
    else:
        report.certify('straightening', _status(result.conclusive))
    return report


# lab

def cmd_lab_complete(args: argparse.Namespace) -> RunReport:
    if args.input:
        d = export.digraph_from_json(export.load_json(args.input))
        alphabet = lattice_lab.tprime_alphabet(args.n)
        completed, cert = lattice_lab.canonical_complete(d, alphabet, reverse_edges=args.reverse,
                                                         color_loops=lattice_lab.tprime_loop_rules(args.n))
    else:
        completed, cert = lattice_lab.complete_tprime(args.n, args.depth)
    report = RunReport('lab complete', {'n': args.n, 'depth': args.depth, 'input': args.input,
                                        'reverse': args.reverse})
    gray = [v for v, c in completed.colors.items() if c == 'gray']
    report.results = {
        'vertices': len(completed.vertices),
        'edges': len(completed.edges),
        'gray_loops': sorted({len(completed.loops(v)) for v in gray}),
        'digraph': export.digraph_to_json(completed),
    }
    report.certify('covering', _status(cert.total), list(cert.deficits[0]) if cert.deficits else None)
    return report


def cmd_lab_qembed(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    data = graph_core.glue_along_star(graph, args.v, args.n)
    report = RunReport('lab qembed', {'graph': _graph_input(args.graph), 'v': args.v, 'n': args.n},
                       {'radius': args.radius})
    images = {u: words.format_word(lattice_lab.q_embed(u, data)) for u in data.glued.vertices}
    failed = lattice_lab.relations_preserved(data)
    kernel = all(lattice_lab.phi_n(lattice_lab.q_embed(u, data), args.v, args.n) == 0 for u in data.glued.vertices)
    index = lattice_lab.index_certificate(data, args.radius)
    report.results = {'glued': export.graph_to_json(data.glued), 'images': images,
                      'residues': list(index.residues)}
    report.certify('homomorphism', _status(not failed), [list(e) for e in failed[:1]] or None)
    report.certify('kernel', _status(kernel))
    report.certify('index', _status(index.holds),
                   words.format_word(index.failures[0]) if index.failures else None)
    return report


def _parse_theta(graph: graph_core.SimplicialGraph, text: Optional[str]) -> Dict[str, str]:
    theta = {v: v for v in graph.vertices}
    for pair in _types(text or ''):
        a, _, b = pair.partition(':')
        theta[graph.check_vertex(a)] = graph.check_vertex(b)
    return theta


def cmd_lab_cocycle(args: argparse.Namespace) -> RunReport:
    graph = export.load_graph(args.graph)
    h = building.HatElement(words.parse_word(graph, args.translate), _parse_theta(graph, args.theta))
    maps = {'h': h.act_point, 'h^-1': h.inverse().act_point}
    points = words.ball(graph, args.radius)
    table = lattice_lab.build_type_cocycle({'h': h.act_point}, points)
    law = lattice_lab.cocycle_law_check(maps, points)
    report = RunReport('lab cocycle', {'graph': _graph_input(args.graph), 'translate': args.translate,
                                       'theta': args.theta}, {'radius': args.radius})
    report.results = {'cocycle': {words.format_word(x): table('h', x) for x in points}, 'checked': law.checked}
    report.certify('cocycle_law', _status(law.holds),
                   list(map(str, law.violations[0])) if law.violations else None)
    return report


# couple

def _parse_support(text: str) -> List[int]:
    try:
        return [int(t) for t in text.strip().strip('{}').split(',') if t.strip()]
    except ValueError:
        raise InputFormatError(f"Support {text!r} is not a set of bit positions such as {{0,2}}")


def cmd_couple_odometer(args: argparse.Namespace) -> RunReport:
    space = coupling_sim.CylinderSpace(args.bits)
    gens = [_parse_support(g) for g in (args.gen or ['{0}'])]
    table = coupling_sim.build_oe_table(space, gens)
    law = coupling_sim.cocycle_law_check(table)
    stats = coupling_sim.cocycle_statistics(table)
    report = RunReport('couple odometer', {'bits': args.bits, 'gens': [sorted(g) for g in gens]})
    report.results = {'statistics': _records(stats), 'checked': law.checked,
                      'linfty': {coupling_sim.format_generator(('L', frozenset(g))):
                                 coupling_sim.linfty_bound(space, g) for g in gens}}
    report.certify('cocycle_law', _status(law.holds),
                   [sorted(law.violations[0][0]), sorted(law.violations[0][1]), law.violations[0][2]]
                   if law.violations else None)
    if args.stats:
        export.write_text(args.stats, export.dump_json(report.results['statistics']))
    return report


# parser

def _add_window_args(parser: argparse.ArgumentParser) -> None:
    settings = get_settings()
    parser.add_argument('-r', '--radius', type=int, default=settings.default_radius)
    parser.add_argument('-L', '--length-bound', type=int, default=settings.default_length_bound)


def build_parser() -> argparse.ArgumentParser:
    parser = RaagArgumentParser(prog='raag', description="Finite-window computations for right-angled Artin groups")
    parser.add_argument('--log-level', default=None, help="overrides RAAG_LOG_LEVEL")
    groups = parser.add_subparsers(dest='group', required=True)

    graph = groups.add_parser('graph').add_subparsers(dest='command', required=True)
    p = graph.add_parser('analyze')
    p.add_argument('graph_file')
    p.set_defaults(handler=cmd_graph_analyze)
    p = graph.add_parser('dot')
    p.add_argument('graph_file')
    p.add_argument('--dot')
    p.set_defaults(handler=cmd_graph_dot)

    word = groups.add_parser('word').add_subparsers(dest='command', required=True)
    p = word.add_parser('normalize')
    p.add_argument('--graph', required=True)
    p.add_argument('word')
    p.set_defaults(handler=cmd_word_normalize)
    p = word.add_parser('multiply')
    p.add_argument('--graph', required=True)
    p.add_argument('words', nargs='+')
    p.set_defaults(handler=cmd_word_multiply)
    p = word.add_parser('coset')
    p.add_argument('--graph', required=True)
    p.add_argument('--type', required=True)
    p.add_argument('word')
    p.set_defaults(handler=cmd_word_coset)

    flat = groups.add_parser('flat').add_subparsers(dest='command', required=True)
    p = flat.add_parser('member')
    p.add_argument('--graph', required=True)
    p.add_argument('flat')
    p.add_argument('word')
    p.set_defaults(handler=cmd_flat_member)
    for name, handler in (('parallel', cmd_flat_parallel), ('intersect', cmd_flat_intersect)):
        p = flat.add_parser(name)
        p.add_argument('--graph', required=True)
        p.add_argument('flat1')
        p.add_argument('flat2')
        p.set_defaults(handler=handler)
    p = flat.add_parser('delta')
    p.add_argument('--graph', required=True)
    p.add_argument('flat')
    p.set_defaults(handler=cmd_flat_delta)

    ext = groups.add_parser('ext').add_subparsers(dest='command', required=True)
    p = ext.add_parser('ball')
    p.add_argument('--graph', required=True)
    p.add_argument('--base', required=True, help='"<conjugator>,<type>"')
    _add_window_args(p)
    p.add_argument('--dot')
    p.set_defaults(handler=cmd_ext_ball)

    bld = groups.add_parser('building').add_subparsers(dest='command', required=True)
    for name, handler in (('ball', cmd_building_ball), ('flag', cmd_building_flag)):
        p = bld.add_parser(name)
        p.add_argument('--graph', required=True)
        p.add_argument('flat', nargs='?', default='id@', help='"<word>@<types>"')
        _add_window_args(p)
        p.add_argument('--dot')
        p.set_defaults(handler=handler)
    p = bld.add_parser('geodesic')
    p.add_argument('--graph', required=True)
    p.add_argument('loop', help='comma-separated complement loop, e.g. 1,3,5,2,4')
    p.set_defaults(handler=cmd_building_geodesic)

    blw = groups.add_parser('blowup').add_subparsers(dest='command', required=True)
    for name, handler in (('assemble', cmd_blowup_assemble), ('distort', cmd_blowup_distort)):
        p = blw.add_parser(name)
        p.add_argument('--graph', required=True)
        p.add_argument('--datum', required=True)
        p.add_argument('flat', nargs='?', default='id@')
        _add_window_args(p)
        p.add_argument('--dot')
        p.add_argument('--json', dest='json_out')
        p.add_argument('--samples', type=int)
        p.set_defaults(handler=handler)

    proj = groups.add_parser('project').add_subparsers(dest='command', required=True)
    p = proj.add_parser('star')
    p.add_argument('--graph', required=True)
    p.add_argument('vertex')
    p.add_argument('word')
    p.set_defaults(handler=cmd_project_star)
    p = proj.add_parser('factor')
    p.add_argument('--graph', required=True)
    p.add_argument('vertex')
    p.add_argument('--translate', required=True)
    p.add_argument('--window', default='-3,3')
    p.set_defaults(handler=cmd_project_factor)
    p = proj.add_parser('straighten')
    p.add_argument('--graph', required=True)
    p.add_argument('--translate', required=True)
    p.add_argument('--perturb', action='store_true')
    p.add_argument('-r', '--radius', type=int, default=6)
    p.add_argument('--L', type=float, default=1.0)
    p.add_argument('--A', type=float, default=2.0)
    p.add_argument('--search', type=int)
    p.set_defaults(handler=cmd_project_straighten)

    lab = groups.add_parser('lab').add_subparsers(dest='command', required=True)
    p = lab.add_parser('complete')
    p.add_argument('--n', type=int, default=2)
    p.add_argument('--depth', type=int, default=2)
    p.add_argument('--input')
    p.add_argument('--reverse', action='store_true')
    p.set_defaults(handler=cmd_lab_complete)
    p = lab.add_parser('qembed')
    p.add_argument('--graph', required=True)
    p.add_argument('--v', required=True)
    p.add_argument('--n', type=int, default=2)
    p.add_argument('-r', '--radius', type=int, default=2)
    p.set_defaults(handler=cmd_lab_qembed)
    p = lab.add_parser('cocycle')
    p.add_argument('--graph', required=True)
    p.add_argument('--translate', default='id')
    p.add_argument('--theta', help='vertex permutation "a:b,b:a"')
    p.add_argument('-r', '--radius', type=int, default=1)
    p.set_defaults(handler=cmd_lab_cocycle)

    couple = groups.add_parser('couple').add_subparsers(dest='command', required=True)
    p = couple.add_parser('odometer')
    p.add_argument('--bits', type=int, default=8)
    p.add_argument('--gen', action='append', help='support set such as "{0,2}"; repeatable')
    p.add_argument('--stats')
    p.set_defaults(handler=cmd_couple_odometer)
    return parser


def _status_line(report: RunReport) -> str:
    statuses = [c['status'] for c in report.certificates]
    if REFUTED in statuses:
        color = Fore.RED
    elif INCONCLUSIVE in statuses:
        color = Fore.YELLOW
    else:
        color = Fore.GREEN
    summary = ', '.join(f"{c['name']}={c['status']}" for c in report.certificates) or 'done'
    return f"{color}{report.command}: {summary}{Style.RESET_ALL}"


def dispatch(argv: Optional[Sequence[str]] = None) -> RunReport:
    """Parse the arguments and run the selected command"""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level.upper() if args.log_level else None)
    logger.info(f"Running {args.group} {args.command}")
    return args.handler(args)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        report = dispatch(argv)
    except (RaagError, OSError) as e:
        print(f"{Fore.RED}Error: {e}{Style.RESET_ALL}", file=sys.stderr)
        return 1
    print(report.to_json())
    print(_status_line(report), file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
