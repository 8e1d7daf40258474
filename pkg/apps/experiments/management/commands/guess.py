"""Guess an algebraic equation or a P-recurrence from a coefficient prefix."""
from pathlib import Path

from django.core.management.base import CommandError

from services.guesser import guess_algebraic, guess_recurrence, min_algebraic_degree

from ._base import EXIT_USAGE, FeketeLabCommand, parse_rational


class Command(FeketeLabCommand):
    help = 'Find h with h(X, G) = 0 mod X^N, the minimal such degree, or a P-recurrence'

    def add_command_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--terms', nargs='+', help='A_0 A_1 ... as exact rationals')
        source.add_argument('--terms-file', help='whitespace-separated terms')
        parser.add_argument('--mode', choices=['algebraic', 'min-degree', 'recurrence'],
                            default='min-degree')
        parser.add_argument('--degree', type=int, default=1,
                            help='per-variable degree of h, or coefficient degree of the recurrence')
        parser.add_argument('--order', type=int, default=1, help='recurrence order cap')

    def run(self, terms, terms_file, mode, degree, order, **options):
        if terms_file:
            terms = Path(terms_file).read_text().split()
        prefix = [parse_rational(t) for t in terms]
        if degree < (1 if mode == 'algebraic' else 0) or order < 1:
            raise CommandError('--degree and --order out of range', returncode=EXIT_USAGE)

        if mode == 'recurrence':
            rec = guess_recurrence(prefix, order, degree)
            self.emit({'found': rec is not None, 'recurrence': rec.to_model() if rec else None},
                      **options)
            return
        if mode == 'algebraic':
            guess = guess_algebraic(prefix, degree)
            d = degree if guess else None
        else:
            d, guess = min_algebraic_degree(prefix)
        model = guess.to_model() if guess else None
        rows = [{'N': len(prefix), 'd': d, 'total_degree': model.total_degree if model else None}]
        self.emit({'N': len(prefix), 'd': d, 'found': guess is not None, 'guess': model},
                  rows=rows, columns=['N', 'd', 'total_degree'], **options)
