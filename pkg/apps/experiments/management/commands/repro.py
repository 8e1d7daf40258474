"""Run the acceptance suites end to end."""
from django.core.management.base import CommandError

from services.experiments import SUITES, run_suite

from ._base import EXIT_BOUND_VIOLATION, FeketeLabCommand
from .oscillation import SUITE_COLUMNS, suite_rows


class Command(FeketeLabCommand):
    help = 'Reproduce every acceptance criterion (or a selection) and report pass/fail'

    def add_command_arguments(self, parser):
        parser.add_argument('--criteria', type=int, nargs='+', choices=sorted(SUITES),
                            default=sorted(SUITES))

    def run(self, criteria, **options):
        results = [run_suite(c, seed=options['seed'], workers=options['workers']) for c in criteria]
        self.emit(results, rows=suite_rows(results), columns=SUITE_COLUMNS, **options)
        failed = [r for r in results if not r.passed]
        if failed:
            for r in failed:
                self.stderr.write(f'criterion {r.criterion} ({r.name}): ' + '; '.join(r.failures[:20]))
            raise CommandError(f'{len(failed)} criteria failed', returncode=EXIT_BOUND_VIOLATION)
