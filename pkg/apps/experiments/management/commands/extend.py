"""Extend a holonomic sequence from its recurrence."""
import json
from pathlib import Path

from django.core.management.base import CommandError

from services.holonomy import PRecurrence, extend
from services.schemas import PRecurrenceModel, rational_to_pair

from ._base import EXIT_USAGE, FeketeLabCommand, parse_rational


def load_recurrence(path: str) -> PRecurrence:
    """PRecurrenceModel JSON, or an alg2rec report carrying one under 'recurrence'."""
    data = json.loads(Path(path).read_text())
    if 'recurrence' in data:
        data = data['recurrence']
    return PRecurrence.from_model(PRecurrenceModel.model_validate(data))


class Command(FeketeLabCommand):
    help = 'Solve the recurrence forward from initial terms; stops at the earliest singular index'

    def add_command_arguments(self, parser):
        parser.add_argument('recurrence_file', help='recurrence JSON (as emitted by alg2rec)')
        parser.add_argument('--initial', nargs='+', required=True, help='A_0 A_1 ... as exact rationals')
        parser.add_argument('--count', type=int, required=True)

    def run(self, recurrence_file, initial, count, **options):
        if count < 1:
            raise CommandError('--count must be positive', returncode=EXIT_USAGE)
        rec = load_recurrence(recurrence_file)
        terms = extend(rec, [parse_rational(value) for value in initial], count)
        pairs = [rational_to_pair(t) for t in terms]
        rows = [{'n': n, 'numerator': num, 'denominator': den} for n, (num, den) in enumerate(pairs)]
        self.emit({'order': rec.order, 'terms': pairs}, rows=rows,
                  columns=['n', 'numerator', 'denominator'], **options)
