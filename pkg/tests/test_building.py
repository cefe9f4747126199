import itertools

import networkx as nx
import pytest

from building import (
    Cube,
    HatElement,
    axis_path,
    building_ball,
    check_flag,
    check_intervals,
    complement_loop_path,
    conjugation_map,
    distance_between,
    down_neighbors,
    ext_to_fp,
    flat_distance,
    fp_to_auto,
    fp_to_ext,
    auto_to_fp,
    hat_action,
    hat_window_map,
    product_ball,
    product_split,
    rank,
    rank0_distance,
    up_neighbors,
    verify_geodesic,
    vertex_link,
)
from errors import LoopError, NotAJoinError, NotInFlatError, RaagError
from extension_graph import ExtVertex
from flats import WindowMap, are_parallel, delta, make_flat, parallel_set, parse_flat
from graph_core import cliques, flag_completion_simplices
from words import identity, parse_word
import oracles


def w(graph, text):
    return parse_word(graph, text)


def test_neighbours(pentagon, k1):
    base = parse_flat(pentagon, 'id@1')
    assert [str(f) for f in up_neighbors(base)] == ['id@1,2', 'id@1,5']
    line = parse_flat(k1, 'id@a')
    assert [str(f) for f in down_neighbors(line, 1)] == ['a^-1@', 'id@', 'a@']
    assert down_neighbors(parse_flat(k1, 'a^3@a'), 1) == down_neighbors(line, 1)


@pytest.mark.parametrize('fixture, base, radius, bound, vertices, edges', [
    ('k1', 'id@a', 1, 2, 6, 5),
    ('edge', 'id@', 1, 2, 3, 2),
    ('edge', 'id@', 2, 1, 8, 8),
])
def test_ball_sizes(request, fixture, base, radius, bound, vertices, edges):
    graph = request.getfixturevalue(fixture)
    ball = building_ball(parse_flat(graph, base), radius, bound)
    assert len(ball.vertices) == vertices
    assert len(ball.edges) == edges
    assert check_intervals(ball) == []


def test_square_in_the_plane(edge):
    ball = building_ball(parse_flat(edge, 'id@'), 2, 1)
    squares = [c for c in ball.cubes if c.dimension == 2]
    assert squares == [Cube(parse_flat(edge, 'id@'), parse_flat(edge, 'id@a,b'))]
    assert distance_between(ball, parse_flat(edge, 'id@'), parse_flat(edge, 'a@')) == 2
    assert len(ball.rank0()) == 5
    assert ball.to_networkx().number_of_edges() == 8


def test_edges_only(edge):
    ball = building_ball(parse_flat(edge, 'id@'), 2, 1, cubes=False)
    assert all(c.dimension == 1 for c in ball.cubes)
    assert len(ball.edges) == 8


def test_negative_radius(k1):
    with pytest.raises(RaagError):
        building_ball(parse_flat(k1, 'id@'), -1, 1)


def test_pentagon_link_is_the_pentagon(pentagon):
    ball = building_ball(parse_flat(pentagon, 'id@'), 2, 0)
    lk = vertex_link(ball, ball.base)
    assert nx.is_isomorphic(lk.skeleton(), nx.cycle_graph(5))
    assert len(lk.up) == 5
    report = check_flag(ball)
    assert report.holds
    assert report.judged == (ball.base,)
    assert report.skipped == len(ball.vertices) - 1


def test_link_of_a_plane(edge):
    ball = building_ball(parse_flat(edge, 'id@a,b'), 2, 2)
    lk = vertex_link(ball, ball.base)
    skeleton = lk.skeleton()
    assert skeleton.number_of_nodes() == 10
    assert skeleton.number_of_edges() == 13
    assert nx.is_bipartite(skeleton)
    assert len(lk.classes['a']) == 5
    assert lk.up == ()
    assert lk.truncated
    with pytest.raises(NotInFlatError):
        vertex_link(ball, parse_flat(edge, 'a^5@'))


def test_missing_cube_breaks_the_flag_condition(triangle):
    ball = building_ball(parse_flat(triangle, 'id@'), 3, 0)
    assert check_flag(ball).holds
    cube = Cube(parse_flat(triangle, 'id@'), parse_flat(triangle, 'id@a,b,c'))
    broken = ball.without_cube(cube)
    report = check_flag(broken)
    assert not report.holds
    assert [v.kind for v in report.violations] == ['empty_simplex']
    with pytest.raises(RaagError):
        broken.without_cube(cube)


def test_product_split(edge, pentagon):
    split = product_split(building_ball(parse_flat(edge, 'id@'), 2, 1))
    assert split.consistent
    assert len(split.first_ball.vertices) == 4
    assert len(product_ball(split)) == 16
    with pytest.raises(NotAJoinError):
        product_split(building_ball(parse_flat(pentagon, 'id@'), 1, 0))


def test_square_splits_into_tree_balls(square):
    ball = building_ball(parse_flat(square, 'id@'), 2, 1)
    split = product_split(ball)
    assert split.consistent
    assert [split.first.vertices, split.second.vertices] == [('1', '3'), ('2', '4')]
    for factor in (split.first_ball, split.second_ball):
        assert nx.is_tree(factor.to_networkx())
        assert len(factor.vertices) == 7
    product = product_ball(split)
    assert len(product) == len(split.first_ball.vertices) * len(split.second_ball.vertices) == 49
    assert set(ball.vertices) <= set(product)


@pytest.mark.parametrize('graph', oracles.small_graphs(5), ids=oracles.graph_id)
def test_balls_on_small_graphs(graph):
    ball = building_ball(parse_flat(graph, 'id@'), 3, 3)
    assert check_intervals(ball) == []
    report = check_flag(ball)
    assert report.holds
    if max(len(c) for c in cliques(graph)) > 3:
        return
    # the link of a rank-0 vertex is the flag completion of the graph
    assert ball.base in report.judged
    lk = vertex_link(ball, ball.base)
    assert nx.is_isomorphic(lk.skeleton(), graph.to_networkx())
    simplices = {frozenset().union(*(m.type for m in s)) for s in lk.simplices if s}
    assert simplices == set(flag_completion_simplices(graph))


@pytest.mark.parametrize('graph', oracles.small_graphs(5), ids=oracles.graph_id)
def test_equal_delta_means_parallel(graph):
    window = [f for f in building_ball(parse_flat(graph, 'id@'), 3, 4, cubes=False).vertices if f.type]
    groups = {}
    for f in window:
        groups.setdefault(delta(f), []).append(f)
    for group in groups.values():
        for f1, f2 in itertools.combinations(group, 2):
            assert are_parallel(f1, f2)
    # parallel flats of positive rank share delta as well: both keys split the window alike
    keys = [(delta(f), (f.type, parallel_set(f))) for f in window]
    assert len({k for k, _ in keys}) == len({p for _, p in keys}) == len(set(keys))


def test_hat_elements(pentagon):
    rotation = {'1': '2', '2': '3', '3': '4', '4': '5', '5': '1'}
    h = HatElement(w(pentagon, '1'), rotation)
    assert h.compose(h.inverse()) == HatElement(identity(pentagon))
    assert h.act_point(w(pentagon, '3')) == w(pentagon, '1 4')
    assert hat_action(HatElement(w(pentagon, '3')), parse_flat(pentagon, 'id@1')) == parse_flat(pentagon, '3@1')
    assert h.act_ext(ExtVertex('1', identity(pentagon))) == ExtVertex('2', identity(pentagon))
    assert hat_window_map(h, radius=1)(identity(pentagon)) == w(pentagon, '1')
    with pytest.raises(RaagError):
        HatElement(identity(pentagon), {'1': '1', '2': '3', '3': '2', '4': '4', '5': '5'})


def test_translation_is_flat_preserving(edge):
    ball = building_ball(parse_flat(edge, 'id@'), 2, 1)
    auto = fp_to_auto(hat_window_map(HatElement(w(edge, 'a'))), ball)
    assert auto.flat_preserving
    assert auto.undetermined == ()
    assert auto(parse_flat(edge, 'id@b')) == parse_flat(edge, 'a@b')
    assert auto_to_fp(auto)(identity(edge)) == w(edge, 'a')


def test_swap_is_not_flat_preserving(edge):
    ball = building_ball(parse_flat(edge, 'id@'), 2, 1)
    points = {x: x for x in (w(edge, 'a^-1'), w(edge, 'b'), w(edge, 'b^-1'))}
    points[identity(edge)] = w(edge, 'a')
    points[w(edge, 'a')] = identity(edge)
    auto = fp_to_auto(WindowMap(edge, table=points), ball)
    assert not auto.flat_preserving
    assert parse_flat(edge, 'id@b') in [f for f, _ in auto.violations]
    with pytest.raises(RaagError):
        fp_to_auto(WindowMap(edge, table=points), ball, strict=True)


def test_extension_map_induces_point_map(pentagon):
    classes = [ExtVertex(v, identity(pentagon)) for v in pentagon.vertices]
    alpha = conjugation_map(HatElement(w(pentagon, '3')), classes)
    induced = ext_to_fp(alpha, [identity(pentagon)])
    assert induced.failures == {}
    assert induced.points(identity(pentagon)) == w(pentagon, '3')

    missing = ext_to_fp({}, [identity(pentagon)])
    assert identity(pentagon) in missing.failures


def test_point_map_induces_extension_map(pentagon):
    base = ExtVertex('1', identity(pentagon))
    alpha, failures = fp_to_ext(WindowMap.translation(w(pentagon, '3')), [base])
    assert alpha == {base: ExtVertex('1', w(pentagon, '3'))}
    assert failures == {}
    _, failures = fp_to_ext(WindowMap.translation(w(pentagon, '3'), radius=0), [base])
    assert failures == {base: 'patch leaves the window'}


def test_pentagon_complement_loop(pentagon):
    loop = ['1', '3', '5', '2', '4']
    path = complement_loop_path(pentagon, loop)
    assert len(path) == 11
    assert [rank(f) for f in path[:4]] == [0, 1, 0, 1]
    assert str(path[-1]) == '1 3 5 2 4@'
    assert rank0_distance(path[0].rep, path[-1].rep) == len(path) - 1
    assert len(axis_path(pentagon, loop, 2)) == 21


@pytest.mark.parametrize('fixture, loop', [
    ('p3', ['a', 'c']),
    ('square', ['1', '3']),
])
def test_two_vertex_loops_are_geodesic(request, fixture, loop):
    graph = request.getfixturevalue(fixture)
    report = verify_geodesic(complement_loop_path(graph, loop))
    assert report.holds
    assert report.path_length == 4
    assert report.bfs_distance == 4


def test_pentagon_loop_is_geodesic(pentagon):
    report = verify_geodesic(complement_loop_path(pentagon, ['1', '3', '5', '2', '4']))
    assert report.holds
    assert (report.path_length, report.bfs_distance, report.exact_distance) == (10, 10, 10)
    assert (report.radius, report.length_bound, report.exponent_bound) == (11, 15, 1)


def test_detour_is_not_geodesic(edge):
    detour = [parse_flat(edge, text) for text in ('id@', 'id@a', 'a@', 'a@b', 'id@a,b', 'b@a', 'b@')]
    report = verify_geodesic(detour)
    assert not report.holds
    assert report.path_length == 6
    assert report.bfs_distance == report.exact_distance == 2
    # the search box grows with the path, beyond the longest representative on it
    assert (report.length_bound, report.exponent_bound) == (7, 1)


def test_geodesic_inside_a_ball(edge):
    ball = building_ball(parse_flat(edge, 'id@'), 2, 1)
    path = [parse_flat(edge, 'id@'), parse_flat(edge, 'id@a'), parse_flat(edge, 'a@')]
    assert verify_geodesic(path, ball).holds
    with pytest.raises(RaagError):
        verify_geodesic([parse_flat(edge, 'id@'), parse_flat(edge, 'a@')])


def test_bad_loops(edge, pentagon):
    with pytest.raises(LoopError):
        complement_loop_path(edge, ['a', 'b'])
    with pytest.raises(LoopError):
        complement_loop_path(pentagon, ['1', '3', '1', '4'])
    with pytest.raises(LoopError):
        complement_loop_path(pentagon, ['1'])


def test_flat_distance(edge):
    start = parse_flat(edge, 'id@')
    assert flat_distance(start, parse_flat(edge, 'a@'), 3, 1) == 2
    assert flat_distance(start, parse_flat(edge, 'a^2@'), 3, 1) is None
    assert rank0_distance(identity(edge), w(edge, 'a^3 b')) == 4
    assert make_flat(identity(edge), []) == start
