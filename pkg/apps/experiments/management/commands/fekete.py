"""Emit Fekete coefficients (n|p) for n = 0..count-1."""
from django.core.management.base import CommandError

from services.number_theory import fekete_coefficients

from ._base import EXIT_USAGE, FeketeLabCommand


class Command(FeketeLabCommand):
    help = 'Emit the Legendre-symbol coefficients of the Fekete polynomial, periodically extended'

    def add_command_arguments(self, parser):
        parser.add_argument('p', type=int, help='odd prime')
        parser.add_argument('--count', type=int, default=None, help='number of coefficients (default p)')

    def run(self, p, count, **options):
        modulus = self.prime(p)
        count = modulus.p if count is None else count
        if count < 1:
            raise CommandError('--count must be positive', returncode=EXIT_USAGE)
        values = fekete_coefficients(modulus, count)
        rows = [{'n': n, 'symbol': value} for n, value in enumerate(values)]
        self.emit({'p': modulus.p, 'count': count, 'coefficients': values},
                  rows=rows, columns=['n', 'symbol'], **options)
