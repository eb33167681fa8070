"""Helpers shared by the verification commands."""
import json
from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError
from rest_framework.renderers import JSONRenderer

from hlawka.serializers import VerificationRunSerializer


def setting(name, default):
    return getattr(settings, name, default)


def render(payload) -> str:
    return JSONRenderer().render(payload, renderer_context={'indent': 2}).decode('utf-8')


def emit(command, payload, out=None):
    """Write the report to --out when given, otherwise to stdout."""
    content = render(payload)
    if not out:
        command.stdout.write(content)
        return
    try:
        Path(out).write_text(content + "\n", encoding='utf-8')
    except OSError as exc:
        raise CommandError(f"Cannot write report to {out}: {exc}")
    command.stderr.write(f"Report written to {out}")


def load_json(path):
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except OSError as exc:
        raise CommandError(f"Cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise CommandError(f"{path} is not valid JSON: {exc}")


def validated(serializer, source):
    if not serializer.is_valid():
        raise CommandError(f"Invalid {source}: {dict(serializer.errors)}")
    return serializer.validated_data


def record_run(command_name, seed, verdict, elapsed, payload):
    serializer = VerificationRunSerializer(data={
        'command': command_name,
        'seed': str(seed),
        'verdict': verdict,
        'elapsed': elapsed,
        'report': json.loads(render(payload)),
    })
    validated(serializer, "run record")
    return serializer.save()
