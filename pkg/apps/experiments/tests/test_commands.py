import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest.mock import patch

import jsonschema
import pandas as pd
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from services.oscillation import BoundViolationError
from services.schemas import SuiteResult, schema_bundle


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def call(self, *args):
        out, err = StringIO(), StringIO()
        call_command(*args, '--workers', '1', stdout=out, stderr=err)
        return out.getvalue()

    def call_json(self, *args):
        return json.loads(self.call(*args))

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as ctx:
            self.call(*args)
        self.assertEqual(ctx.exception.returncode, code, str(ctx.exception))

    def write(self, name, text):
        path = Path(self.tmp.name) / name
        path.write_text(text)
        return str(path)


class FeketeCommandTest(CommandTestCase):
    def test_json_output(self):
        data = self.call_json('fekete', '7', '--count', '8')
        self.assertEqual(data['coefficients'], [0, 1, 1, -1, 1, -1, -1, 0])
        self.assertEqual(data['p'], 7)

    def test_csv_output(self):
        frame = pd.read_csv(StringIO(self.call('fekete', '5', '--format', 'csv')))
        self.assertEqual(list(frame.columns), ['n', 'symbol'])
        self.assertEqual(frame['symbol'].tolist(), [0, 1, -1, -1, 1])

    def test_out_file(self):
        target = str(Path(self.tmp.name) / 'fekete.json')
        self.assertEqual(self.call('fekete', '3', '--out', target), '')
        self.assertEqual(json.loads(Path(target).read_text())['coefficients'], [0, 1, -1])

    def test_usage_errors(self):
        self.assertExitCode(2, 'fekete', '9')
        self.assertExitCode(2, 'fekete', '7', '--count', '0')
        with override_settings(FEKETELAB_MAX_PRIME=100):
            self.assertExitCode(2, 'fekete', '101')

    def test_negative_workers(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('fekete', '7', '--workers', '-1', stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)


class CharsumCommandTest(CommandTestCase):
    def test_shifted_scan_csv(self):
        frame = pd.read_csv(StringIO(self.call('charsum', '11', '13', '--shift', '0', '1', '--format', 'csv')))
        self.assertEqual(list(frame.columns),
                         ['p', 'shift_j', 'shift_h', 'start', 'length', 'value', 'normalized'])
        self.assertEqual(frame['p'].tolist(), [11, 13])
        self.assertTrue((frame['shift_h'] == 1).all())

    def test_max_length_range(self):
        self.assertExitCode(2, 'charsum', '11', '--max-length', '12')


class Alg2RecCommandTest(CommandTestCase):
    def test_catalan_file(self):
        path = str(settings.FEKETELAB_DATA_DIR / 'catalan.txt')
        data = self.call_json('alg2rec', path, '--branch', '1')
        self.assertEqual(len(data['bounds']), 4)
        self.assertTrue(all(b['satisfied'] for b in data['bounds']))
        self.assertGreaterEqual(data['recurrence']['order'], 1)

        audited = self.call_json('alg2rec', path, '--audit')
        self.assertEqual(len(audited['bounds']), 8)

    def test_geometric_recurrence_coefficients(self):
        data = self.call_json('alg2rec', str(settings.FEKETELAB_DATA_DIR / 'geometric.txt'))
        # -(n+1) A_n + (n+1) A_{n+1} = 0
        self.assertEqual(data['recurrence']['coeffs'], [[[-1, 1], [-1, 1]], [[1, 1], [1, 1]]])

    def test_error_codes(self):
        self.assertExitCode(2, 'alg2rec', str(Path(self.tmp.name) / 'missing.txt'))
        self.assertExitCode(2, 'alg2rec', self.write('bad.txt', '1 x\n'))
        # (Y - 1)^2
        self.assertExitCode(3, 'alg2rec', self.write('square.txt', '1\n-2\n1\n'))
        self.assertExitCode(3, 'alg2rec', self.write('geometric.txt', '-1 0\n1 -1\n'), '--branch', '2')


class ExtendCommandTest(CommandTestCase):
    def test_extend_from_alg2rec_report(self):
        report = str(Path(self.tmp.name) / 'central.json')
        self.call('alg2rec', str(settings.FEKETELAB_DATA_DIR / 'central_binomial.txt'), '--out', report)
        data = self.call_json('extend', report, '--initial', '1', '--count', '6')
        self.assertEqual(data['order'], 1)
        self.assertEqual(data['terms'], [[1, 1], [2, 1], [6, 1], [20, 1], [70, 1], [252, 1]])

    def test_singular_index_is_a_precondition_error(self):
        # n A_{n+1} = A_n
        path = self.write('singular.json', json.dumps({'order': 1, 'coeffs': [[[-1, 1]], [[0, 1], [1, 1]]]}))
        self.assertExitCode(3, 'extend', path, '--initial', '1', '--count', '3')
        data = self.call_json('extend', path, '--initial', '1', '1', '--count', '4')
        self.assertEqual(data['terms'], [[1, 1], [1, 1], [1, 1], [1, 2]])

    def test_malformed_recurrence(self):
        self.assertExitCode(2, 'extend', self.write('broken.json', '{not json'), '--initial', '1', '--count', '3')
        self.assertExitCode(2, 'extend', self.write('shape.json', '{"order": 1}'), '--initial', '1', '--count', '3')


class GuessCommandTest(CommandTestCase):
    def test_algebraic_mode(self):
        data = self.call_json('guess', '--terms', '0', '1', '1', '--mode', 'algebraic', '--degree', '1')
        self.assertTrue(data['found'])
        self.assertEqual(data['d'], 1)
        data = self.call_json('guess', '--terms', '0', '1', '1', '-1', '--mode', 'algebraic', '--degree', '1')
        self.assertFalse(data['found'])

    def test_min_degree_from_file(self):
        path = self.write('terms.txt', '1 1 2 5 14 42 132 429 1430 4862 16796 58786\n')
        data = self.call_json('guess', '--terms-file', path)
        self.assertEqual(data['d'], 2)

    def test_recurrence_mode(self):
        self.assertExitCode(3, 'guess', '--terms', '1', '1', '2', '5', '--mode', 'recurrence')
        self.assertExitCode(2, 'guess', '--terms', '1', '1/0')


class DpnCommandTest(CommandTestCase):
    def test_d7(self):
        data = self.call_json('dpn', '--primes', '7', '--n-min', '3', '--n-max', '4')
        self.assertEqual([row['d'] for row in data], [1, 2])

    def test_csv_columns(self):
        frame = pd.read_csv(StringIO(self.call('dpn', '--primes', '7', '--n-max', '8', '--format', 'csv')))
        self.assertEqual(frame.columns[:3].tolist(), ['p', 'N', 'd_p(N)'])
        self.assertTrue(frame['n_at_least_p'].tolist()[-2:] == [True, True])

    def test_bad_range(self):
        self.assertExitCode(2, 'dpn', '--primes', '7', '--n-min', '5', '--n-max', '4')


class SchemasCommandTest(CommandTestCase):
    def setUp(self):
        super().setUp()
        self.committed = json.loads((settings.FEKETELAB_DATA_DIR / 'schemas.json').read_text())

    def test_every_report_has_a_schema(self):
        data = self.call_json('schemas')
        self.assertIn('CharSumReport', data)
        self.assertIn('SuiteResult', data)
        self.assertIn('coeffs', data['PRecurrenceModel']['properties'])

    def test_committed_schemas_match_models(self):
        self.assertEqual(json.loads(json.dumps(schema_bundle())), self.committed)
        self.assertEqual(self.call_json('schemas'), self.committed)

    def test_command_output_validates_against_committed_schema(self):
        report = self.call_json('alg2rec', str(settings.FEKETELAB_DATA_DIR / 'catalan.txt'))
        jsonschema.validate(report, self.committed['Alg2RecReport'])
        for suite in self.call_json('oscillation', '--suite', 'constant'):
            jsonschema.validate(suite, self.committed['SuiteResult'])

        report['bounds'][0]['measured'] = 'six'
        with self.assertRaises(jsonschema.ValidationError):
            jsonschema.validate(report, self.committed['Alg2RecReport'])


class SuiteCommandTest(CommandTestCase):
    def test_constant_oscillation_suite(self):
        data = self.call_json('oscillation', '--suite', 'constant')
        self.assertEqual(len(data), 1)
        self.assertTrue(data[0]['passed'])

    def test_failed_suite_exits_with_bound_violation(self):
        failed = SuiteResult(criterion=0, name='oscillation_smoke', passed=False, failures=['forced'])
        with patch.dict('services.experiments.OSCILLATION_SUITES',
                        {'constant': lambda seed, workers: failed}):
            self.assertExitCode(4, 'oscillation', '--suite', 'constant')

    def test_repro_selected_criteria(self):
        data = self.call_json('repro', '--criteria', '1', '4')
        self.assertEqual([r['criterion'] for r in data], [1, 4])
        self.assertTrue(all(r['passed'] for r in data))

    @patch('apps.experiments.management.commands.repro.run_suite')
    def test_bound_violation_report_goes_to_stderr(self, mock_run_suite):
        # Setup mocks
        mock_run_suite.side_effect = BoundViolationError('no witness', {'m': 2, 'scanned': 10})

        err = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command('repro', '--criteria', '7', stdout=StringIO(), stderr=err)

        # Verify exit code and report
        self.assertEqual(ctx.exception.returncode, 4)
        self.assertEqual(json.loads(err.getvalue())['scanned'], 10)
