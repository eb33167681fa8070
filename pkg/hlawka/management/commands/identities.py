import argparse

from django.core.management.base import BaseCommand, CommandError

from hlawka.exceptions import HlawkaError
from hlawka.reports import run_identities
from hlawka.serializers import IdentityReportSerializer

from ._common import emit, record_run, setting


class Command(BaseCommand):
    help = "Randomized check of the xi factorization identities and the Q/R substitution identity."

    def add_arguments(self, parser):
        parser.add_argument('--count', type=int, default=10000, help="Random draws per identity")
        parser.add_argument('--seed', type=int)
        parser.add_argument('--out', help="Write the JSON report here instead of stdout")
        parser.add_argument('--record', action='store_true', help="Store the report as a VerificationRun")
        parser.add_argument('--tamper', action='store_true', help=argparse.SUPPRESS)

    def handle(self, *args, **options):
        seed = options['seed'] if options.get('seed') is not None else setting('HLAWKA_SEED', 42)
        try:
            report = run_identities(options['count'], seed, tamper=options.get('tamper', False))
        except HlawkaError as exc:
            raise CommandError(str(exc))

        payload = IdentityReportSerializer(report).data
        emit(self, payload, options.get('out'))
        if options.get('record'):
            record_run('identities', seed, report.verdict, report.elapsed, payload)

        if not report.passed:
            failing = ", ".join(row.identity for row in report.rows if not row.passed)
            raise CommandError(f"Identity check failed: {failing}", returncode=1)
        self.stderr.write(self.style.SUCCESS(f"All {len(report.rows)} identities hold over {report.count} draws"))
