"""h file -> linear ODE -> P-recurrence, with the stated bound reports."""
from pathlib import Path

from services.experiments import parse_h_text
from services.holonomy import algebraic_to_ode, audit_bounds, check_bounds, ode_to_recurrence
from services.schemas import Alg2RecReport, scalar_to_json

from ._base import FeketeLabCommand, parse_rational


class Command(FeketeLabCommand):
    help = 'Derive the ODE and recurrence of the series root of an annihilating polynomial'

    def add_command_arguments(self, parser):
        parser.add_argument('h_file', help='integer grid, rows = Y-degree, columns = X-degree')
        parser.add_argument('--branch', nargs='+', default=None,
                            help='initial coefficients A_0 ... of the series root to check against')
        parser.add_argument('--audit', action='store_true',
                            help='add the proof-sketch expressions to the bound reports')

    def run(self, h_file, branch, audit, **options):
        h = parse_h_text(Path(h_file).read_text())
        branch = [parse_rational(value) for value in branch] if branch else None
        ode = algebraic_to_ode(h, branch)
        rec = ode_to_recurrence(ode)
        bounds = (audit_bounds if audit else check_bounds)(h, ode, rec)
        report = Alg2RecReport(
            h=[[scalar_to_json(c) for c in row] for row in h.to_grid()],
            ode=ode.to_model(),
            recurrence=rec.to_model(),
            bounds=bounds,
        )
        self.emit(report, rows=[b.model_dump() for b in bounds],
                  columns=['quantity', 'measured', 'bound', 'satisfied', 'formula'], **options)
