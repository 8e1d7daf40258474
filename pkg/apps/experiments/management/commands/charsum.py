"""Exhaustive maximal incomplete (shifted) character sums."""
from django.core.management.base import CommandError

from services import grid
from services.number_theory import max_incomplete_sum

from ._base import EXIT_USAGE, FeketeLabCommand

COLUMNS = ['p', 'shift_j', 'shift_h', 'start', 'length', 'value', 'normalized']


def scan(cell):
    p, max_length, shifts = cell
    return max_incomplete_sum(p, max_length, shifts)


class Command(FeketeLabCommand):
    help = 'Scan every start and length up to --max-length and report the largest |sum|'

    def add_command_arguments(self, parser):
        parser.add_argument('primes', type=int, nargs='+')
        parser.add_argument('--max-length', type=int, default=None, help='default p')
        parser.add_argument('--shift', type=int, nargs=2, metavar=('J', 'H'), default=None,
                            help='sum f(n+J) f(n+H) instead of f(n)')

    def run(self, primes, max_length, shift, **options):
        cells = []
        for p in primes:
            modulus = self.prime(p)
            length = modulus.p if max_length is None else max_length
            if not 1 <= length <= modulus.p:
                raise CommandError(f'--max-length must lie in [1, p] for p = {p}', returncode=EXIT_USAGE)
            cells.append((modulus.p, length, tuple(shift) if shift else None))

        reports = grid.run_grid(scan, cells, options['workers'])
        rows = [{
            'p': r.p,
            'shift_j': r.shift_pair[0] if r.shift_pair else None,
            'shift_h': r.shift_pair[1] if r.shift_pair else None,
            'start': r.interval[0],
            'length': r.interval[1],
            'value': r.value,
            'normalized': r.normalized,
        } for r in reports]
        self.emit(reports, rows=rows, columns=COLUMNS, **options)
