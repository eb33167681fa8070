from django.core.management.base import BaseCommand, CommandError

from hlawka.exceptions import HlawkaError
from hlawka.gram import DEFAULT_TOL
from hlawka.reports import classify_triple
from hlawka.serializers import ClassificationSerializer, VectorTripleSerializer

from ._common import emit, load_json, setting, validated


class Command(BaseCommand):
    help = "Report the strong Hornich-Hlawka slack and equality-case witnesses of a vector triple."

    def add_arguments(self, parser):
        parser.add_argument('input_path', help="JSON file with x, y, z coordinate arrays")
        parser.add_argument('--tol', type=float)
        parser.add_argument('--out', help="Write the JSON report here instead of stdout")

    def handle(self, *args, **options):
        tol = options['tol'] if options.get('tol') is not None else setting('HLAWKA_TOL', DEFAULT_TOL)
        serializer = VectorTripleSerializer(data=load_json(options['input_path']))
        validated(serializer, options['input_path'])
        try:
            classification = classify_triple(serializer.save(), tol)
        except HlawkaError as exc:
            raise CommandError(str(exc))
        emit(self, ClassificationSerializer(classification).data, options.get('out'))
