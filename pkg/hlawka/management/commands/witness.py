from django.core.management.base import BaseCommand, CommandError

from hlawka.exceptions import HlawkaError
from hlawka.gram import DEFAULT_TOL
from hlawka.reports import witness_report
from hlawka.serializers import WitnessReportSerializer

from ._common import emit, setting


class Command(BaseCommand):
    help = "Print a built-in sharpness witness (ones or planar120) with its corollary slack."

    def add_arguments(self, parser):
        parser.add_argument('name', help="Witness name: ones or planar120")
        parser.add_argument('--tol', type=float)
        parser.add_argument('--out', help="Write the JSON report here instead of stdout")

    def handle(self, *args, **options):
        tol = options['tol'] if options.get('tol') is not None else setting('HLAWKA_TOL', DEFAULT_TOL)
        try:
            report = witness_report(options['name'], tol)
        except HlawkaError as exc:
            raise CommandError(str(exc))
        emit(self, WitnessReportSerializer(report).data, options.get('out'))
