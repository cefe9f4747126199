import pytest

from blowup import (
    BlowupDatum,
    LineTable,
    assemble,
    cell_image_kind,
    check_compatibility,
    check_intersections,
    check_tip_bijection,
    collapse_graph,
    datum_from_actions,
    distortion,
    format_y_vertex,
    is_isomorphic_to_ball,
    make_branched_line,
    project_pi,
)
from building import Cube, HatElement, building_ball
from errors import CompatibilityError, DatumError, RaagError
from extension_graph import ExtVertex
from flats import parse_flat
from words import identity, parse_word


def line_ball(k1, bound=16):
    return building_ball(parse_flat(k1, 'id@a'), 1, bound)


@pytest.fixture
def identity_y(k1):
    datum = BlowupDatum.uniform(['a'], LineTable.identity(-16, 16))
    return assemble(datum, line_ball(k1))


@pytest.fixture
def halving_y(k1):
    datum = BlowupDatum.uniform(['a'], LineTable.floor_div(-16, 16, 2))
    return assemble(datum, line_ball(k1))


def test_line_tables():
    table = LineTable.floor_div(-3, 3)
    assert table.image == (-2, 1)
    assert table.fiber(-1) == [-2, -1]
    assert table.fiber_sizes() == {-2: 1, -1: 2, 0: 2, 1: 2}
    table.validate(2)


@pytest.mark.parametrize('values', [
    {0: 0, 1: 0, 2: 0},
    {0: 0, 1: 2},
    {z: z // 5 for z in range(-10, 10)},
])
def test_invalid_tables(values):
    with pytest.raises(DatumError):
        LineTable.explicit(values).validate(4)


def test_table_window_must_be_an_interval():
    with pytest.raises(DatumError):
        LineTable({0: 0, 2: 1})
    with pytest.raises(DatumError):
        LineTable.floor_div(0, 4, 0)


def test_branched_line():
    line = make_branched_line(LineTable.identity(-16, 16), window=(-2, 2))
    assert line.core == (-2, 2)
    assert len(line.tips) == 5
    g = line.to_networkx()
    assert g.number_of_nodes() == 10
    assert g.number_of_edges() == 9
    with pytest.raises(DatumError):
        make_branched_line(LineTable.identity(-1, 1), window=(-2, 2))


def test_datum_lookup(k1):
    datum = BlowupDatum.uniform(['a'], LineTable.identity(-2, 2))
    assert datum.table_for(ExtVertex('a', identity(k1))).rule == 'identity'
    with pytest.raises(DatumError):
        BlowupDatum({'a': LineTable.explicit({0: 0, 1: 0})})


def test_identity_datum_gives_the_ball(identity_y):
    assert len(identity_y.vertices) == 66
    assert len(identity_y.cells) == 131
    assert is_isomorphic_to_ball(identity_y)
    assert check_tip_bijection(identity_y).holds
    assert check_intersections(identity_y) == []


def test_tips_and_cells(identity_y, k1):
    line = parse_flat(k1, 'id@a')
    point = parse_flat(k1, 'id@')
    assert identity_y.tip(identity(k1)) == (point, ())
    with pytest.raises(RaagError):
        identity_y.tip(parse_word(k1, 'a^20'))

    core_edge = [(line, (0,)), (line, (1,))]
    tip_edge = [(point, ()), (line, (0,))]
    assert cell_image_kind(identity_y, core_edge) == 'collapse'
    assert cell_image_kind(identity_y, tip_edge) == 'isometry'
    assert project_pi(identity_y, tip_edge) == Cube(point, line)
    with pytest.raises(RaagError):
        project_pi(identity_y, [(point, ()), (line, (5,))])
    assert format_y_vertex((line, (3,))) == 'id@a|3'


def test_identity_distortion(identity_y):
    report = distortion(identity_y, sample_limit=1000)
    assert report.pairs == 528
    assert report.multiplicative == pytest.approx(1.125)
    assert report.additive == pytest.approx(1.875)
    assert list(report.samples.columns) == ['p', 'q', 'd_G', 'd_Y']


def test_halving_datum(halving_y):
    report = distortion(halving_y, sample_limit=1000)
    assert report.multiplicative == pytest.approx(31 / 17)
    assert report.multiplicative <= 2.25
    tips = check_tip_bijection(halving_y)
    assert tips.holds
    assert not tips.injective_lines
    assert not is_isomorphic_to_ball(halving_y)
    assert collapse_graph(halving_y).number_of_edges() == 33


def test_ball_beyond_the_window(k1):
    datum = BlowupDatum.uniform(['a'], LineTable.identity(-16, 16))
    with pytest.raises(DatumError):
        assemble(datum, line_ball(k1, bound=20))


def test_datum_from_actions():
    table = LineTable.identity(-16, 16)
    shift = {z: z + 1 for z in range(-16, 16)}
    datum = datum_from_actions({'a': table}, {'a': [(shift, (1, 1))]}, fiber_bound=4)
    assert datum.tables['a'] is table
    with pytest.raises(CompatibilityError):
        datum_from_actions({'a': table}, {'a': [(shift, (1, 2))]})
    with pytest.raises(DatumError):
        datum_from_actions({'a': table}, {'b': [(shift, (1, 1))]})


def test_compatibility(two_points):
    base = ExtVertex('a', identity(two_points))
    moved = ExtVertex('a', parse_word(two_points, 'b'))
    action = [HatElement(parse_word(two_points, 'b'))]
    plain = BlowupDatum.uniform(['a', 'b'], LineTable.identity(-16, 16))
    assert check_compatibility(action, plain, [base]).holds

    bent = BlowupDatum(dict(plain.tables), {moved: LineTable.floor_div(-16, 16, 2)}, fiber_bound=4)
    report = check_compatibility(action, bent, [base])
    assert not report.holds
    assert report.witnesses[0][:2] == (base, moved)
