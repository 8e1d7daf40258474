"""
Shared command plumbing for FeketeLab.
Common flags, JSON/CSV emission and the exit-code contract
(0 success, 2 usage, 3 precondition, 4 bound violation).
"""

import json
import logging
from fractions import Fraction
from io import StringIO
from pathlib import Path
from typing import Optional

import pandas as pd
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from pydantic import BaseModel, ValidationError

from services.exact_poly import ExactPolyError
from services.experiments import ExperimentError
from services.guesser import GuesserError
from services.holonomy import HolonomyError
from services.number_theory import InvalidModulusError, NumberTheoryError, PrimeModulus, as_modulus
from services.oscillation import BoundViolationError, OscillationError

logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_BOUND_VIOLATION = 4

USAGE_ERRORS = (ExperimentError, InvalidModulusError, OSError, json.JSONDecodeError, ValidationError)
PRECONDITION_ERRORS = (NumberTheoryError, ExactPolyError, HolonomyError, GuesserError, OscillationError)


def to_jsonable(data):
    if isinstance(data, BaseModel):
        return data.model_dump(mode="json")
    if isinstance(data, Fraction):
        return [data.numerator, data.denominator]
    if isinstance(data, dict):
        return {key: to_jsonable(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [to_jsonable(value) for value in data]
    return data


def parse_rational(text: str) -> Fraction:
    """'3', '-2/5' or '0.25' as an exact rational."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise CommandError(f"not an exact rational: {text!r}", returncode=EXIT_USAGE) from e


class FeketeLabCommand(BaseCommand):
    """Base for every FeketeLab command; subclasses implement add_command_arguments and run."""

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=None,
                            help='RNG seed (default FEKETELAB_SEED)')
        parser.add_argument('--workers', type=int, default=None,
                            help='worker processes, 0 = one per CPU (default FEKETELAB_WORKERS)')
        parser.add_argument('--format', choices=['json', 'csv'], default='json')
        parser.add_argument('--out', default=None, help='write data here instead of stdout')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        if options['seed'] is None:
            options['seed'] = settings.FEKETELAB_SEED
        if options['workers'] is None:
            options['workers'] = settings.FEKETELAB_WORKERS
        if options['workers'] < 0:
            raise CommandError('--workers must be >= 0', returncode=EXIT_USAGE)

        try:
            self.run(**options)
        except BoundViolationError as e:
            self.stderr.write(json.dumps(to_jsonable(e.report), indent=2))
            raise CommandError(f'Bound violation: {e}', returncode=EXIT_BOUND_VIOLATION) from e
        except USAGE_ERRORS as e:
            raise CommandError(str(e), returncode=EXIT_USAGE) from e
        except PRECONDITION_ERRORS as e:
            logger.error(f'{type(e).__name__}: {e}')
            raise CommandError(f'{type(e).__name__}: {e}', returncode=EXIT_PRECONDITION) from e

    def run(self, **options):
        raise NotImplementedError

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def prime(self, p: int) -> PrimeModulus:
        if p >= settings.FEKETELAB_MAX_PRIME:
            raise CommandError(f'p = {p} exceeds FEKETELAB_MAX_PRIME', returncode=EXIT_USAGE)
        return as_modulus(p)

    def emit(self, data, rows: Optional[list[dict]] = None, columns: Optional[list[str]] = None,
             **options):
        """
        Write `data` as JSON, or `rows` as CSV with a fixed column order.

        Args:
            data: pydantic model, dict or list
            rows: flat records for CSV (defaults to data when it is a list)
            columns: CSV header order
        """
        if options.get('format') == 'csv':
            records = to_jsonable(rows if rows is not None else data)
            frame = pd.DataFrame(records, columns=columns)
            buffer = StringIO()
            frame.to_csv(buffer, index=False)
            text = buffer.getvalue()
        else:
            text = json.dumps(to_jsonable(data), indent=2) + '\n'

        out = options.get('out')
        if out:
            Path(out).write_text(text)
            logger.info(f'Wrote {len(text)} bytes to {out}')
        else:
            self.stdout.write(text, ending='')
