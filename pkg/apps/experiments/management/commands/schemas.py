"""Emit the JSON schemas of every report type."""
from services.schemas import schema_bundle

from ._base import FeketeLabCommand


class Command(FeketeLabCommand):
    help = 'Print the JSON schema of each report model, keyed by model name'

    def run(self, **options):
        options['format'] = 'json'
        self.emit(schema_bundle(), **options)
