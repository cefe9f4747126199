import random

import pytest

from building import HatElement, hat_window_map
from errors import ProjectionError, StraighteningError
from extension_graph import ExtVertex
from flats import WindowMap, make_flat
from graph_core import star
from projections import (
    StraighteningReport,
    boundary_ring_width,
    consistency_check,
    default_search_radius,
    factor_action,
    gate,
    orbit_analysis,
    parallel_lines,
    perturbed_translation,
    pi_v,
    require_straightened,
    star_project,
    straighten_qi,
)
from words import ball, identity, in_subgroup, invert, multiply, parse_word
import oracles


def w(graph, text):
    return parse_word(graph, text)


@pytest.fixture
def u1(pentagon):
    return ExtVertex('1', identity(pentagon))


def test_gate_and_star_projection(pentagon, u1):
    assert gate(u1, w(pentagon, '3 1')) == identity(pentagon)
    assert gate(u1, w(pentagon, '2 1^2 3')) == w(pentagon, '1^2 2')
    assert star_project(u1, w(pentagon, '2 1^2 3')) == 2


def _steps_into(u, x, radius):
    """Fewest generator steps from x to a point of P_u, by breadth-first search in the Cayley graph"""
    graph = x.graph
    around = star(graph, u.type)

    def inside(y):
        return in_subgroup(multiply(invert(u.conjugator), y), around)

    if inside(x):
        return 0
    seen = {x}
    layer = [x]
    for depth in range(1, radius + 1):
        following = []
        for y in layer:
            for v in graph.vertices:
                for e in (1, -1):
                    z = y.times(v, e)
                    if z in seen:
                        continue
                    if inside(z):
                        return depth
                    seen.add(z)
                    following.append(z)
        layer = following
    return None


@pytest.mark.parametrize('graph', oracles.small_graphs(5), ids=oracles.graph_id)
def test_gate_is_the_nearest_point(graph):
    rng = random.Random(oracles.graph_id(graph))
    window = ball(graph, 4)
    far = rng.sample(window, min(len(window), 5))
    near = ball(graph, 1) + rng.sample(ball(graph, 2), 3)
    conjugator = rng.choice(ball(graph, 1))
    for v in graph.vertices:
        around = star(graph, v)
        u = ExtVertex(v, identity(graph))
        for x in far:
            g = gate(u, x)
            assert in_subgroup(g, around)
            assert multiply(invert(x), g).length == _steps_into(u, x, x.length)
        shifted = ExtVertex(v, conjugator)
        for x in near:
            best = oracles.nearest_distance(graph, x.syllables, (), around, x.length)
            assert multiply(invert(x), gate(u, x)).length == best
            g = gate(shifted, x)
            assert in_subgroup(multiply(invert(shifted.conjugator), g), around)
            assert multiply(invert(x), g).length == _steps_into(shifted, x, x.length + 1)


def test_parallel_lines(pentagon):
    lines = parallel_lines(ExtVertex('3', identity(pentagon)))
    assert lines == [make_flat(identity(pentagon), ['3']), make_flat(w(pentagon, '2^-1'), ['3'])]


def test_pi_v(pentagon, u1):
    assert pi_v(u1, ExtVertex('3', identity(pentagon))) == 0
    assert pi_v(u1, ExtVertex('3', w(pentagon, '1^2'))) == 2
    assert pi_v(u1, ExtVertex('4', w(pentagon, '1^-1 3'))) == -1
    with pytest.raises(ProjectionError):
        pi_v(u1, ExtVertex('2', identity(pentagon)))
    with pytest.raises(ProjectionError):
        pi_v(u1, u1)


def test_factor_action_of_translations(pentagon, u1):
    window = range(-3, 4)
    shift = factor_action(WindowMap.translation(w(pentagon, '1^2')), u1, window)
    assert shift.table == {z: z + 2 for z in window}
    assert shift.compose(shift).table == {z: z + 4 for z in range(-3, 2)}

    along_link = factor_action(WindowMap.translation(w(pentagon, '2')), u1, window)
    assert along_link.table == {z: z for z in window}

    with pytest.raises(ProjectionError):
        factor_action(WindowMap.translation(w(pentagon, '3')), u1, window)


def test_factor_action_of_a_reflection(pentagon, u1):
    # fixes 1 and flips its link
    theta = {'1': '1', '2': '5', '5': '2', '3': '4', '4': '3'}
    action = factor_action(hat_window_map(HatElement(identity(pentagon), theta)), u1, range(-3, 4))
    assert action(2) == 2
    assert set(action.table) == set(range(-3, 4))


def _translation_table(g, points):
    return {x: multiply(g, x) for x in points}


def test_consistency_on_the_path(p3):
    u = ExtVertex('a', identity(p3))
    a = w(p3, 'a')
    points = [w(p3, f'c^{k}') for k in range(-2, 3)] + [w(p3, f'a c^{k}') for k in range(-2, 3)]
    lines = [make_flat(identity(p3), ['c']), make_flat(a, ['c'])]

    table = _translation_table(a, points)
    report = consistency_check(WindowMap(p3, table=table), u, lines)
    assert report.holds
    assert report.checked == 2

    table[a] = w(p3, 'a^3')
    report = consistency_check(WindowMap(p3, table=table), u, lines)
    assert not report.holds
    assert report.witnesses[0][0] == lines[1]


def test_search_constants():
    assert default_search_radius(1, 2) == 1
    assert default_search_radius(2.5, 3) == 4
    assert boundary_ring_width(1) == 4


def test_straighten_translation(pentagon):
    g = w(pentagon, '1 3')
    report = straighten_qi(WindowMap.translation(g, radius=5), 1, 2)
    assert report.conclusive
    assert len(report.interior) == 11
    assert report.sup_distance == 0
    straightened = require_straightened(report)
    assert straightened(w(pentagon, '4')) == w(pentagon, '1 3 4')


def test_straighten_perturbed_translation(pentagon):
    g = w(pentagon, '1 3')
    report = straighten_qi(perturbed_translation(g, 6), 1, 2)
    assert report.conclusive
    assert len(report.interior) == 81
    assert report.sup_distance <= 1
    for x in report.interior:
        assert report.straightened(x) == multiply(g, x)


def test_window_too_small_is_inconclusive(pentagon):
    report = straighten_qi(WindowMap.translation(w(pentagon, '1'), radius=5), 10, 10)
    assert not report.conclusive
    assert report.interior == ()
    assert report.ring_width == 102


def test_require_straightened_reports_failures(pentagon):
    x = identity(pentagon)
    report = StraighteningReport(WindowMap(pentagon, table={}), 1, 4, (x,), 5, failures={x: 'no flat'})
    with pytest.raises(StraighteningError):
        require_straightened(report)


def test_orbits():
    window = range(-3, 4)
    shift = {z: z + 1 for z in window}
    flip = {z: -z for z in window}

    report = orbit_analysis({'t': shift}, window)
    assert len(report.orbits) == 1
    assert bool(report.orbits['exits'].iloc[0])
    assert report.translation_numbers['t'] == 1.0

    report = orbit_analysis({'s': flip}, window)
    assert len(report.finite_orbits) == 4
    assert list(report.orbits['size']) == [2, 2, 2, 1]
    assert report.translation_numbers['s'] == 0.0
