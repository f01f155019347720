"""End-to-end tests for the command-line front end."""

import json

import numpy as np
import pandas as pd
import pytest

from primaldual.cli import EXIT_MAX_ITERS, EXIT_OK, EXIT_PARSE, EXIT_SEMANTIC, json_safe, main
from primaldual.prox import PLUS_INF, to_float
from primaldual.solvers import METHODS
from primaldual.utils.parsers import read_problem, read_vector

TV_PROBLEM = """\
# 0.5 ||x - y||^2 + 0.4 sum |x_{i+1} - x_i|
N 4
VECTOR y 1.0 1.2 -0.5 0.3
H SQ 1 y
GRAPH chain
V 4
E 0 1
E 1 2
E 2 3
END
G L1(0.4) INC chain
"""

TOY_COVER = """\
4 3
0.5 2 0 1
1.0 2 2 3
2.0 3 1 2 3
"""

PARTITION_COVER = """\
4 3
1.0 1 0
2.0 2 1 2
0.5 1 3
"""

GRID_MRF = """\
V 4 L 2
GRID 2 2
0.0 1.0
0.8 0.0
0.2 0.0
1.0 0.0
E 0 1
0 0.5
0.5 0
E 2 3
0 0.5
0.5 0
E 0 2
0 0.5
0.5 0
E 1 3
0 0.5
0.5 0
"""

REPULSIVE_MRF = """\
V 2 L 2
0 0
0 0
E 0 1
1 0
0 1
"""

STAR_MRF = """\
# center 0; edges to 1 and 2 prefer the center at label 1, edge to 3 is flat
V 4 L 2
0 0
0 0
0 0
0 0
E 0 1
1 1
0 0
E 0 2
1 1
0 0
E 0 3
0 0
0 0
"""

ONE_D_LP = "1 1\n1\n1\n1\n"

TIGHT = ['--max-iters', '20000', '--tol', '1e-10']


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / 'tv.txt').write_text(TV_PROBLEM)
    (tmp_path / 'toy.txt').write_text(TOY_COVER)
    (tmp_path / 'partition.txt').write_text(PARTITION_COVER)
    (tmp_path / 'grid.txt').write_text(GRID_MRF)
    (tmp_path / 'repulsive.txt').write_text(REPULSIVE_MRF)
    (tmp_path / 'lp.txt').write_text(ONE_D_LP)
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    payload = json.loads(capsys.readouterr().out)
    assert payload['exit_code'] == code
    return code, payload


# ============================================
# SOLVE
# ============================================

def test_solve_writes_solution_files(workdir, capsys):
    out = workdir / 'out'
    code, payload = run(capsys, 'solve', workdir / 'tv.txt', '--method', 'fb', '--output', out, *TIGHT)
    assert code in (EXIT_OK, EXIT_MAX_ITERS)
    assert payload['success']
    (result,) = payload['data']['results']
    assert result['method'] == 'fb'
    assert result['status'] == ('converged' if code == EXIT_OK else 'max_iters')

    x = read_vector(out / 'fb_x.txt')
    assert read_vector(out / 'fb_v.txt').size == 3
    problem = read_problem(workdir / 'tv.txt')
    assert to_float(problem.objective(x)) == pytest.approx(result['primal'], abs=1e-12)
    assert np.allclose(x, result['x'])


def test_solve_all_methods_writes_one_trace_each(workdir, capsys):
    trace = workdir / 'trace.csv'
    code, payload = run(capsys, 'solve', workdir / 'tv.txt', '--method', 'all', '--trace', trace, *TIGHT)
    assert code in (EXIT_OK, EXIT_MAX_ITERS)
    methods = [r['method'] for r in payload['data']['results']]
    assert methods == list(METHODS)
    for name in methods:
        frame = pd.read_csv(workdir / f'trace_{name}.csv')
        assert list(frame.columns) == ['iter', 'primal', 'dual', 'gap', 'r_primal', 'r_dual', 'step_change']
    primals = [r['primal'] for r in payload['data']['results']]
    assert max(primals) - min(primals) <= 1e-5


def test_solve_is_deterministic(workdir, capsys):
    outputs = []
    for run_id in range(2):
        trace = workdir / f'run{run_id}.csv'
        run(capsys, 'solve', workdir / 'tv.txt', '--method', 'fbf', '--trace', trace, '--max-iters', '500')
        outputs.append(trace.read_bytes())
    assert outputs[0] == outputs[1]


def test_guard_violation_names_inequality(workdir, capsys):
    code, payload = run(capsys, 'solve', workdir / 'tv.txt', '--method', 'fb', '--tau', '2', '--sigma', '2')
    assert code == EXIT_SEMANTIC
    assert not payload['success']
    assert '1/tau - sigma ||L||^2 >= beta/2' in payload['error']


def test_malformed_problem_exits_64(workdir, capsys):
    bad = workdir / 'bad.txt'
    bad.write_text("N 2\nFOO 1\n")
    code, payload = run(capsys, 'solve', bad)
    assert code == EXIT_PARSE
    assert 'line 2' in payload['error']


def test_missing_file_exits_64(workdir, capsys):
    code, _ = run(capsys, 'solve', workdir / 'absent.txt')
    assert code == EXIT_PARSE


def test_run_spec_file(workdir, capsys):
    spec = workdir / 'spec.json'
    spec.write_text(json.dumps({'method': 'fb2', 'max_iters': 20000, 'tol': 1e-10}))
    code, payload = run(capsys, '--spec', spec, 'solve', workdir / 'tv.txt')
    assert code in (EXIT_OK, EXIT_MAX_ITERS)
    assert payload['data']['results'][0]['method'] == 'fb2'

    spec.write_text(json.dumps({'colour': 'blue'}))
    code, _ = run(capsys, '--spec', spec, 'solve', workdir / 'tv.txt')
    assert code == EXIT_PARSE


# ============================================
# SET COVER
# ============================================

def test_setcover_toy(workdir, capsys):
    out = workdir / 'cover'
    code, payload = run(capsys, 'setcover', workdir / 'toy.txt', '--output', out)
    assert code == EXIT_OK
    data = payload['data']
    assert data['cover'] == [0, 1]
    assert data['cost'] == pytest.approx(1.5)
    assert data['f_max'] == 2
    assert data['certificate_passed']
    assert read_vector(out / 'cover.txt').tolist() == [1.0, 1.0, 0.0]
    assert read_vector(out / 'dual.txt').size == 4


def test_setcover_partition_is_exact(workdir, capsys):
    _, payload = run(capsys, 'setcover', workdir / 'partition.txt')
    assert payload['data']['ratio'] == pytest.approx(1.0)


def test_setcover_malformed(workdir, capsys):
    bad = workdir / 'bad_cover.txt'
    bad.write_text("4 3\n0.5 2 0\n")
    code, _ = run(capsys, 'setcover', bad)
    assert code == EXIT_PARSE


def test_setcover_uncovered_element(workdir, capsys):
    bad = workdir / 'uncovered.txt'
    bad.write_text("3 1\n1.0 2 0 1\n")
    code, _ = run(capsys, 'setcover', bad)
    assert code == EXIT_SEMANTIC


# ============================================
# MRF
# ============================================

def test_mrf_graphcut_matches_bruteforce(workdir, capsys):
    out = workdir / 'mrf'
    _, cut = run(capsys, 'mrf', workdir / 'grid.txt', '--method', 'graphcut', '--output', out)
    _, brute = run(capsys, 'mrf', workdir / 'grid.txt', '--method', 'bruteforce')
    assert cut['data']['energy'] == pytest.approx(brute['data']['energy'])
    labels = (out / 'labeling.txt').read_text().split()
    assert [int(v) for v in labels] == cut['data']['labeling']


def test_mrf_dual_decomposition_trace(workdir, capsys):
    trace = workdir / 'dd.csv'
    code, payload = run(capsys, 'mrf', workdir / 'grid.txt', '--method', 'dd', '--trace', trace,
                        '--max-iters', '500')
    assert code in (EXIT_OK, EXIT_MAX_ITERS)
    data = payload['data']
    assert data['decomposition'] == 'rows_cols'
    frame = pd.read_csv(trace)
    assert list(frame.columns) == ['iter', 'dual', 'best_primal', 'disagreements']
    assert np.all(frame['dual'] <= data['value'] + 1e-9)
    assert data['best_dual'] <= data['energy'] + 1e-9


def test_mrf_non_submodular_graphcut(workdir, capsys):
    code, payload = run(capsys, 'mrf', workdir / 'repulsive.txt', '--method', 'graphcut')
    assert code == EXIT_SEMANTIC
    assert '[0]' in payload['error']


def test_mrf_unknown_strategy(workdir, capsys):
    code, _ = run(capsys, 'mrf', workdir / 'grid.txt', '--decomposition', 'bogus')
    assert code == EXIT_SEMANTIC


# ============================================
# LP CERTIFICATE
# ============================================

def test_lp_certificate_pass_and_fail(workdir, capsys):
    (workdir / 'x.txt').write_text("1\n")
    (workdir / 'y.txt').write_text("1\n")
    (workdir / 'x2.txt').write_text("2\n")
    code, payload = run(capsys, 'lp-cert', workdir / 'lp.txt', '--x', workdir / 'x.txt', '--y', workdir / 'y.txt')
    assert code == EXIT_OK
    assert payload['data']['slackness_passed'] and payload['data']['nu'] == 1.0

    code, payload = run(capsys, 'lp-cert', workdir / 'lp.txt', '--x', workdir / 'x2.txt', '--y', workdir / 'y.txt')
    assert code == EXIT_SEMANTIC
    assert payload['data']['violations'][0]['kind'] == 'dual_slackness'

    code, _ = run(capsys, 'lp-cert', workdir / 'lp.txt', '--x', workdir / 'x2.txt', '--y', workdir / 'y.txt',
                  '--nu-dual', '2')
    assert code == EXIT_OK


# ============================================
# USAGE ERRORS AND OUTPUT
# ============================================

def test_bad_flag_value_exits_64(workdir, capsys):
    code, payload = run(capsys, 'solve', workdir / 'tv.txt', '--max-iters', 'ten')
    assert code == EXIT_PARSE
    assert not payload['success']
    assert '--max-iters' in payload['error']


def test_missing_subcommand_exits_64(capsys):
    code, _ = run(capsys)
    assert code == EXIT_PARSE


def test_seed_reaches_norm_estimate(workdir, capsys):
    bounds = []
    for seed in (0, 11):
        _, payload = run(capsys, 'solve', workdir / 'tv.txt', '--method', 'fbf', '--max-iters', '50',
                         '--seed', seed)
        bounds.append(payload['data']['results'][0]['norm_bound'])
    # chain of 4 vertices: ||L|| = 2 cos(pi / 8)
    for bound in bounds:
        assert bound == pytest.approx(2 * np.cos(np.pi / 8), rel=1e-5)


def test_mrf_bounds_met_on_last_iteration_is_success(workdir, capsys):
    (workdir / 'star.txt').write_text(STAR_MRF)
    code, payload = run(capsys, 'mrf', workdir / 'star.txt', '--method', 'dd', '--decomposition', 'per_edge',
                        '--max-iters', '1')
    assert code == EXIT_OK
    assert not payload['data']['agreement']
    assert payload['data']['bounds_met']
    assert payload['data']['iterations'] == 1


def test_json_safe_has_no_bare_infinity():
    payload = {'gap': PLUS_INF, 'dual': float('-inf'), 'trace': np.array([1.0, np.nan]), 'n': np.int64(3)}
    text = json.dumps(json_safe(payload), allow_nan=False)
    assert 'Infinity' not in text and 'NaN' not in text
    assert json.loads(text) == {'gap': 'inf', 'dual': '-inf', 'trace': [1.0, 'nan'], 'n': 3}
