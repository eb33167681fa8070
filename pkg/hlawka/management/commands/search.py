import time

from django.core.management.base import BaseCommand, CommandError

from hlawka.exceptions import HlawkaError
from hlawka.gram import DEFAULT_TOL
from hlawka.inequalities import InequalityId, WeightTriple
from hlawka.search import SearchConfig, find_equality_points, grid_oracle, minimize_xi
from hlawka.serializers import EqualityPointSerializer, GridOracleSerializer, SearchResultSerializer

from ._common import emit, record_run, setting

NONNEGATIVITY_FLOOR = -1e-9


class Command(BaseCommand):
    help = "Minimize xi (or another slack) over the PSD cone, or hunt equality points with --equality."

    def add_arguments(self, parser):
        parser.add_argument('--restarts', type=int)
        parser.add_argument('--max-iters', type=int, dest='max_iters')
        parser.add_argument('--step-init', type=float, dest='step_init')
        parser.add_argument('--grad-tol', type=float, dest='grad_tol')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--tol', type=float)
        parser.add_argument(
            '--objective', default=InequalityId.XI_QUARTIC.value,
            choices=[inequality_id.value for inequality_id in InequalityId],
        )
        parser.add_argument(
            '--weights', type=float, nargs=3, metavar=('ALPHA', 'BETA', 'GAMMA'),
            help="Weights of the Q and R forms (default 1 1 1)",
        )
        parser.add_argument('--equality', action='store_true', help="Hunt equality points of the objective")
        parser.add_argument('--grid', type=int, metavar='RESOLUTION', help="Also run the grid oracle")
        parser.add_argument('--out', help="Write the JSON report here instead of stdout")
        parser.add_argument('--record', action='store_true', help="Store the report as a VerificationRun")

    def search_config(self, options):
        def pick(key, name, default):
            return options[key] if options.get(key) is not None else setting(name, default)

        weights = options.get('weights')
        return SearchConfig(
            restarts=pick('restarts', 'HLAWKA_RESTARTS', 64),
            max_iters=pick('max_iters', 'HLAWKA_MAX_ITERS', 2000),
            step_init=pick('step_init', 'HLAWKA_STEP_INIT', 0.1),
            grad_tol=pick('grad_tol', 'HLAWKA_GRAD_TOL', 1e-8),
            seed=pick('seed', 'HLAWKA_SEED', 42),
            tol=pick('tol', 'HLAWKA_TOL', DEFAULT_TOL),
            objective=options.get('objective') or InequalityId.XI_QUARTIC.value,
            weights=WeightTriple(*weights) if weights else WeightTriple(),
        )

    def handle(self, *args, **options):
        started = time.perf_counter()
        try:
            cfg = self.search_config(options)
            if options.get('equality'):
                points = find_equality_points(cfg.objective, cfg)
                payload = {
                    'objective': cfg.objective.value,
                    'seed': cfg.seed,
                    'points': EqualityPointSerializer(points, many=True).data,
                }
                emit(self, payload, options.get('out'))
                self.stderr.write(f"{len(points)} equality points from {cfg.restarts} restarts")
                return

            result = minimize_xi(cfg)
            grid = grid_oracle(options['grid'], cfg.tol) if options.get('grid') else None
        except HlawkaError as exc:
            raise CommandError(str(exc))

        passed = result.min_value >= NONNEGATIVITY_FLOOR and (grid is None or grid.min_value >= NONNEGATIVITY_FLOOR)
        verdict = 'pass' if passed else 'fail'
        payload = {
            'objective': cfg.objective.value,
            'seed': cfg.seed,
            'verdict': verdict,
            'result': SearchResultSerializer(result).data,
        }
        if grid is not None:
            payload['grid'] = GridOracleSerializer(grid).data
        emit(self, payload, options.get('out'))
        if options.get('record'):
            record_run('search', cfg.seed, verdict, time.perf_counter() - started, payload)

        if not passed:
            raise CommandError(f"Negative minimum {result.min_value:.3e} found for {cfg.objective}", returncode=1)
        self.stderr.write(self.style.SUCCESS(
            f"Minimum {result.min_value:.3e} (det {result.det_at_argmin:.3e}) over {cfg.restarts} restarts"
        ))
