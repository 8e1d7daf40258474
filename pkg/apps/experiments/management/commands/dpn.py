"""d_p(N) grid over primes and prefix lengths."""
from django.core.management.base import CommandError

from services import grid
from services.experiments import dpn_cell

from ._base import EXIT_USAGE, FeketeLabCommand

COLUMNS = ['p', 'N', 'd_p(N)', 'bound_value', 'reference_ratio', 'witness_total_degree',
           'chain_shape', 'chain_shape_exceeds_n', 'n_at_least_p']


class Command(FeketeLabCommand):
    help = 'Compute d_p(N) with witnesses; rows with N >= p are flagged, not rejected'

    def add_command_arguments(self, parser):
        parser.add_argument('--primes', type=int, nargs='+', required=True)
        parser.add_argument('--n-min', type=int, default=2)
        parser.add_argument('--n-max', type=int, default=30)

    def run(self, primes, n_min, n_max, **options):
        if not 1 <= n_min <= n_max:
            raise CommandError('need 1 <= --n-min <= --n-max', returncode=EXIT_USAGE)
        cells = [(self.prime(p).p, n) for p in primes for n in range(n_min, n_max + 1)]
        results = grid.run_grid(dpn_cell, cells, options['workers'])
        rows = [{
            'p': r['p'],
            'N': r['N'],
            'd_p(N)': r['d'],
            'bound_value': r['theorem_reference_value'],
            'reference_ratio': r['reference_ratio'],
            'witness_total_degree': r['witness_total_degree'],
            'chain_shape': r['chain_shape'],
            'chain_shape_exceeds_n': r['chain_shape_exceeds_n'],
            'n_at_least_p': r['n_at_least_p'],
        } for r in results]
        self.emit(results, rows=rows, columns=COLUMNS, **options)
