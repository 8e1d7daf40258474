"""Oscillation suites: interval plans, Delta(n) witnesses and lemma checks."""
import json

from django.core.management.base import CommandError

from services.experiments import OSCILLATION_SUITES

from ._base import EXIT_BOUND_VIOLATION, FeketeLabCommand

SUITE_COLUMNS = ['criterion', 'name', 'passed', 'checks', 'failures']


def suite_rows(results):
    return [{'criterion': r.criterion, 'name': r.name, 'passed': r.passed,
             'checks': r.checks, 'failures': len(r.failures)} for r in results]


class Command(FeketeLabCommand):
    help = 'Run oscillation suites; any unexpected bound violation exits with code 4'

    def add_command_arguments(self, parser):
        parser.add_argument('--suite', choices=sorted(OSCILLATION_SUITES) + ['all'], default='all')

    def run(self, suite, **options):
        names = sorted(OSCILLATION_SUITES) if suite == 'all' else [suite]
        results = [OSCILLATION_SUITES[name](seed=options['seed'], workers=options['workers'])
                   for name in names]
        self.emit(results, rows=suite_rows(results), columns=SUITE_COLUMNS, **options)

        failed = [r for r in results if not r.passed]
        if failed:
            for r in failed:
                self.stderr.write(json.dumps(r.model_dump(mode='json'), indent=2))
            raise CommandError(f'{len(failed)} suite(s) failed: {", ".join(r.name for r in failed)}',
                               returncode=EXIT_BOUND_VIOLATION)
