import argparse

from django.core.management.base import BaseCommand, CommandError

from hlawka.exceptions import HlawkaError
from hlawka.gram import DEFAULT_TOL, GramParams, ScaleLaw
from hlawka.inequalities import InequalityId
from hlawka.reports import SuiteConfig, parse_inequalities, run_verification
from hlawka.serializers import GramParamsSerializer, SuiteConfigSerializer, SuiteReportSerializer

from ._common import emit, load_json, record_run, setting, validated

SUITE_KEYS = ('trials', 'dimension', 'seed', 'tol', 'strategies', 'inequalities', 'scale_law', 'chunk_size')


class Command(BaseCommand):
    help = "Sample random triples and check every requested inequality; exits nonzero on a violation."

    def add_arguments(self, parser):
        parser.add_argument('--trials', type=int)
        parser.add_argument('--dim', type=int, dest='dimension')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--tol', type=float)
        parser.add_argument(
            '--strategy', action='append', dest='strategies',
            help="ambient-vectors(d), factor-3x3, boundary-rank2 or boundary-rank1 (repeatable)",
        )
        parser.add_argument(
            '--inequality', action='append', dest='inequalities',
            choices=[inequality_id.value for inequality_id in InequalityId],
            help="Inequality to check (repeatable, default: all)",
        )
        parser.add_argument('--scale-law', dest='scale_law', choices=[law.value for law in ScaleLaw])
        parser.add_argument('--chunk-size', type=int, dest='chunk_size')
        parser.add_argument('--config', help="JSON file with suite settings; flags take precedence")
        parser.add_argument('--out', help="Write the JSON report here instead of stdout")
        parser.add_argument('--record', action='store_true', help="Store the report as a VerificationRun")
        parser.add_argument('--inject-gram', dest='inject_gram', help=argparse.SUPPRESS)

    def suite_values(self, options):
        values = {
            'trials': setting('HLAWKA_TRIALS', 10000),
            'dimension': setting('HLAWKA_DIMENSION', 5),
            'seed': setting('HLAWKA_SEED', 42),
            'tol': setting('HLAWKA_TOL', DEFAULT_TOL),
            'chunk_size': setting('HLAWKA_CHUNK_SIZE', 4096),
        }
        if options.get('config'):
            values.update(validated(SuiteConfigSerializer(data=load_json(options['config'])), options['config']))
        for key in SUITE_KEYS:
            if options.get(key) is not None:
                values[key] = options[key]
        values['inequalities'] = parse_inequalities(values.get('inequalities'))
        return values

    def injected(self, path):
        if not path:
            return ()
        data = load_json(path)
        rows = validated(GramParamsSerializer(data=data if isinstance(data, list) else [data], many=True), path)
        return tuple(GramParams(**row) for row in rows)

    def handle(self, *args, **options):
        values = self.suite_values(options)
        inject = self.injected(options.get('inject_gram'))
        try:
            cfg = SuiteConfig(**values)
            report = run_verification(cfg, inject=inject)
        except HlawkaError as exc:
            raise CommandError(str(exc))

        payload = SuiteReportSerializer(report).data
        emit(self, payload, options.get('out'))
        if options.get('record'):
            record_run('verify', cfg.seed, report.verdict, report.elapsed, payload)

        if not report.passed:
            raise CommandError("Verification failed: an inequality has negative scaled slack.", returncode=1)
        self.stderr.write(self.style.SUCCESS(
            f"Verification passed: {cfg.trials} trials per strategy in {report.elapsed:.2f}s"
        ))
