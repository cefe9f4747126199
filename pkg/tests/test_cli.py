import json
import os

import pytest

from errors import RaagError
from raag import INCONCLUSIVE, PROVED, REFUTED, RunReport, dispatch, main


@pytest.fixture
def graph_path(graphs_dir):
    def path(name):
        return os.path.join(graphs_dir, name)
    return path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    report = json.loads(captured.out) if captured.out else None
    return code, report, captured.err


def statuses(report):
    return {c['name']: c['status'] for c in report['certificates']}


def test_graph_analyze_pentagon(capsys, graph_path):
    code, report, err = run(capsys, 'graph', 'analyze', graph_path('pentagon.json'))
    assert code == 0
    assert report['results']['star_rigid']
    assert report['results']['out_finite']
    assert statuses(report) == {'star_rigid': PROVED, 'induced_square': REFUTED, 'out_finite': PROVED}
    assert 'graph analyze' in err


def test_graph_analyze_square_reports_a_transvection(capsys, graph_path):
    code, report, _ = run(capsys, 'graph', 'analyze', graph_path('c4.json'))
    assert code == 0
    assert report['results']['transvection']['v'] == '1'
    assert report['results']['transvection']['w'] == '3'
    assert statuses(report)['transvection'] == PROVED
    assert report['results']['join_factors'] == [['1', '3'], ['2', '4']]


def test_graph_dot_to_file(capsys, graph_path, tmp_path):
    target = tmp_path / 'edge.dot'
    code, report, _ = run(capsys, 'graph', 'dot', graph_path('edge.json'), '--dot', str(target))
    assert code == 0
    assert target.read_text() == 'graph G {\n  "a";\n  "b";\n  "a" -- "b";\n}\n'


def test_word_commands(capsys, graph_path):
    pentagon = graph_path('pentagon.json')
    _, report, _ = run(capsys, 'word', 'normalize', '--graph', pentagon, '2 1')
    assert report['results']['normal_form'] == '1 2'
    _, report, _ = run(capsys, 'word', 'multiply', '--graph', pentagon, '1 3', '3^-1 2')
    assert report['results']['product'] == '1 2'
    _, report, _ = run(capsys, 'word', 'coset', '--graph', pentagon, '--type', '4', '1 3 4')
    assert report['results'] == {'min_rep': '1 3', 'tail': '4'}


def test_flat_commands(capsys, graph_path):
    pentagon = graph_path('pentagon.json')
    _, report, _ = run(capsys, 'flat', 'parallel', '--graph', pentagon, 'id@1', '2@1')
    assert report['results']['parallel']
    _, report, _ = run(capsys, 'flat', 'intersect', '--graph', pentagon, 'id@1,2', 'id@2,3')
    assert report['results']['intersection'] == {'rep': 'id', 'type': ['2']}
    _, report, _ = run(capsys, 'flat', 'member', '--graph', pentagon, 'id@1', '3 4')
    assert report['results']['member'] is False
    assert report['results']['distance'] == 2
    _, report, _ = run(capsys, 'flat', 'delta', '--graph', pentagon, '3@1,2')
    assert report['results']['delta'] == ['id,2', '3,1']


def test_ext_ball(capsys, graph_path, tmp_path):
    target = tmp_path / 'ext.dot'
    code, report, _ = run(capsys, 'ext', 'ball', '--graph', graph_path('pentagon.json'), '--base', '1',
                          '-r', '1', '-L', '1', '--dot', str(target))
    assert code == 0
    assert len(report['results']['vertices']) == 7
    assert report['truncation'] == {'radius': 1, 'length_bound': 1}
    assert target.read_text().startswith('graph extension {')

    code, report, _ = run(capsys, 'ext', 'ball', '--graph', graph_path('pentagon.json'), '--base', '3,1',
                          '-r', '1', '-L', '1')
    assert code == 0
    assert report['inputs']['base'] == '3,1'
    assert len(report['results']['vertices']) == 7


def test_building_ball_is_inconclusive_when_truncated(capsys, graph_path):
    code, report, err = run(capsys, 'building', 'ball', '--graph', graph_path('edge.json'), '-r', '1')
    assert code == 2
    flag = next(c for c in report['certificates'] if c['name'] == 'flag_links')
    assert flag['status'] == INCONCLUSIVE
    assert flag['truncation'] == {'radius': 1, 'length_bound': 2}
    assert statuses(report)['intervals'] == PROVED


def test_building_flag_is_proved(capsys, graph_path):
    code, report, _ = run(capsys, 'building', 'flag', '--graph', graph_path('edge.json'), '-r', '2', '-L', '1')
    assert code == 0
    assert statuses(report) == {'flag_links': PROVED}
    assert report['results']['flag']['judged'] == 1


def test_building_geodesic(capsys, graph_path):
    code, report, _ = run(capsys, 'building', 'geodesic', '--graph', graph_path('p3.json'), 'a,c')
    assert code == 0
    assert report['results']['length'] == 4
    assert report['results']['path'] == ['id@', 'id@a', 'a@', 'a@c', 'a c@']
    assert statuses(report) == {'geodesic': PROVED}
    assert report['results']['exact_distance'] == 4
    assert report['truncation'] == {'radius': 5, 'length_bound': 6, 'exponent_bound': 1}

    code, report, err = run(capsys, 'building', 'geodesic', '--graph', graph_path('edge.json'), 'a,b')
    assert code == 1
    assert report is None
    assert 'Error' in err


def test_blowup_distortion(capsys, graph_path):
    code, report, _ = run(capsys, 'blowup', 'distort', '--graph', graph_path('k1.json'),
                          '--datum', graph_path('k1_identity.json'), 'id@a', '-r', '1', '-L', '16',
                          '--samples', '1000')
    assert code == 0
    assert report['results']['multiplicative'] == 1.125
    assert report['results']['pairs'] == 528
    assert len(report['results']['samples']) == 20


def test_blowup_assemble(capsys, graph_path, tmp_path):
    target = tmp_path / 'y.json'
    code, report, _ = run(capsys, 'blowup', 'assemble', '--graph', graph_path('k1.json'),
                          '--datum', graph_path('k1_floor_div.json'), 'id@a', '-r', '1', '-L', '16',
                          '--json', str(target))
    assert code == 0
    assert report['results']['tip_attachment_injective'] is False
    assert statuses(report)['tip_bijection'] == PROVED
    assert len(json.loads(target.read_text())['vertices']) == report['results']['vertices']


def test_blowup_window_too_small(capsys, graph_path):
    code, _, err = run(capsys, 'blowup', 'assemble', '--graph', graph_path('k1.json'),
                       '--datum', graph_path('k1_identity.json'), 'id@a', '-r', '1', '-L', '20')
    assert code == 1
    assert 'outside the table window' in err


def test_project_commands(capsys, graph_path):
    pentagon = graph_path('pentagon.json')
    _, report, _ = run(capsys, 'project', 'star', '--graph', pentagon, '1', '2 1^2 3')
    assert report['results'] == {'coordinate': 2, 'gate': '1^2 2'}
    _, report, _ = run(capsys, 'project', 'factor', '--graph', pentagon, '1', '--translate', '1^2',
                       '--window=-1,1')
    assert report['results']['table'] == {'-1': 1, '0': 2, '1': 3}


def test_project_straighten(capsys, graph_path):
    code, report, _ = run(capsys, 'project', 'straighten', '--graph', graph_path('pentagon.json'),
                          '--translate', '1 3', '-r', '5')
    assert code == 0
    assert report['results']['recovers_translation']
    assert statuses(report) == {'straightening': PROVED}

    code, report, _ = run(capsys, 'project', 'straighten', '--graph', graph_path('pentagon.json'),
                          '--translate', '1 3', '-r', '5', '--L', '10', '--A', '10')
    assert code == 2
    assert statuses(report) == {'straightening': INCONCLUSIVE}


def test_project_straighten_perturbed(capsys, graph_path):
    code, report, _ = run(capsys, 'project', 'straighten', '--graph', graph_path('pentagon.json'),
                          '--translate', '1 3', '--perturb', '-r', '6')
    assert code == 0
    assert report['inputs']['perturb'] is True
    assert report['results']['interior'] == 81
    assert report['results']['recovers_translation']
    assert report['results']['sup_distance'] <= 1
    assert report['results']['failures'] == {}
    assert statuses(report) == {'straightening': PROVED}


def test_lab_commands(capsys, graph_path):
    code, report, _ = run(capsys, 'lab', 'complete', '--n', '2', '--depth', '2')
    assert code == 0
    assert report['results']['gray_loops'] == [2]
    assert statuses(report) == {'covering': PROVED}

    code, report, _ = run(capsys, 'lab', 'qembed', '--graph', graph_path('p3.json'), '--v', 'a', '-r', '2')
    assert code == 0
    assert report['results']['images']['c[2]'] == 'a c a^-1'
    assert set(statuses(report).values()) == {PROVED}

    code, report, _ = run(capsys, 'lab', 'cocycle', '--graph', graph_path('pentagon.json'),
                          '--translate', '1', '--theta', '2:5,5:2,3:4,4:3')
    assert code == 0
    assert statuses(report) == {'cocycle_law': PROVED}


def test_couple_odometer(capsys, tmp_path):
    target = tmp_path / 'stats.json'
    code, report, _ = run(capsys, 'couple', 'odometer', '--bits', '4', '--gen', '{0}', '--gen', '{1}',
                          '--gen', '{0,1}', '--stats', str(target))
    assert code == 0
    assert report['results']['checked'] == 96
    assert report['results']['linfty'] == {'{0}': 1, '{1}': 2, '{0,1}': 3}
    assert len(json.loads(target.read_text())) == 3


def test_bad_input_exits_with_one(capsys, graph_path, tmp_path):
    code, _, _ = run(capsys, 'graph', 'analyze', str(tmp_path / 'missing.json'))
    assert code == 1
    code, _, _ = run(capsys, 'graph', 'frobnicate')
    assert code == 1
    code, _, err = run(capsys, 'word', 'normalize', '--graph', graph_path('pentagon.json'), '1 9')
    assert code == 1
    assert '9' in err


def test_malformed_values_exit_with_one(capsys, graph_path, tmp_path):
    code, report, err = run(capsys, 'couple', 'odometer', '--bits', '4', '--gen', '{a}')
    assert (code, report) == (1, None)
    assert 'bit positions' in err

    code, report, _ = run(capsys, 'project', 'factor', '--graph', graph_path('pentagon.json'), '1',
                          '--translate', '1', '--window', '0;3')
    assert (code, report) == (1, None)

    datum = tmp_path / 'datum.json'
    datum.write_text(json.dumps({'types': {'a': {'window': ['low', 3]}}}))
    code, report, err = run(capsys, 'blowup', 'assemble', '--graph', graph_path('k1.json'),
                            '--datum', str(datum), 'id@a', '-r', '1', '-L', '1')
    assert (code, report) == (1, None)
    assert 'must be an integer' in err

    digraph = tmp_path / 'digraph.json'
    digraph.write_text(json.dumps({'vertices': [{'name': 'x'}]}))
    code, report, _ = run(capsys, 'lab', 'complete', '--input', str(digraph))
    assert (code, report) == (1, None)


def test_output_is_deterministic(capsys, graph_path):
    argv = ['building', 'ball', '--graph', graph_path('pentagon.json'), '-r', '2', '-L', '1']
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
    assert json.loads(first)['inputs_digest']


def test_dispatch_returns_the_report(graph_path):
    report = dispatch(['word', 'normalize', '--graph', graph_path('edge.json'), 'a b a^-1'])
    assert report.results['normal_form'] == 'b'
    assert report.exit_code == 0


def test_inconclusive_needs_a_truncation():
    report = RunReport('test', {})
    with pytest.raises(RaagError):
        report.certify('x', INCONCLUSIVE)
    report.certify('x', INCONCLUSIVE, truncation={'radius': 1})
    assert report.exit_code == 2
