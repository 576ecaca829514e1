"""Shared plumbing for the management commands.

A command resolves its config (JSON file, then flags on top), validates it
with its serializer, computes a result and writes one artifact. Library
errors become ``CommandError`` with the error's exit code.
"""
import json
import logging
import time
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

import config as project
from toolkit.models import Run
from utils.exceptions import ToolkitError
from utils.rendering import dumps, envelope

logger = logging.getLogger(__name__)

INVALID_CONFIG_EXIT_CODE = 2


def load_config_file(path):
    try:
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise CommandError(f"cannot read config {path}: {exc}", returncode=INVALID_CONFIG_EXIT_CODE)
    if not isinstance(payload, dict):
        raise CommandError(f"config {path} must hold a JSON object", returncode=INVALID_CONFIG_EXIT_CODE)
    return payload


def resolve_config(serializer_class, path=None, flags=None):
    """File values first, flags win; returns the validated config as a plain dict."""
    data = load_config_file(path) if path else {}
    data.update(flags or {})
    serializer = serializer_class(data=data)
    serializer.is_valid(raise_exception=True)
    return json.loads(json.dumps(serializer.validated_data))


def write_text(text, target, stream):
    if target:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(text, encoding="utf-8")
    else:
        stream.write(text, ending="")


class ToolkitCommand(BaseCommand):
    command_name = None
    serializer_class = None
    config_options = ()

    def add_arguments(self, parser):
        parser.add_argument("--config", help="JSON file with config keys; flags override it")
        parser.add_argument("--output", help="write the artifact here instead of stdout")
        parser.add_argument("--record", action="store_true", help="store the run in the database")
        parser.add_argument("--threads", type=int, default=1, help="sample workers, 0 for one per CPU")
        self.add_config_arguments(parser)

    def add_config_arguments(self, parser):
        pass

    def compute(self, config, threads):
        raise NotImplementedError

    def render(self, config, result):
        return dumps(envelope(self.command_name, config, result))

    def handle(self, *args, **options):
        started = time.monotonic()
        flags = {key: options[key] for key in self.config_options if options.get(key) is not None}
        try:
            config = resolve_config(self.serializer_class, options.get("config"), flags)
            if options["threads"] < 0:
                raise CommandError("--threads must be >= 0", returncode=INVALID_CONFIG_EXIT_CODE)
            result = self.compute(config, options["threads"])
        except ValidationError as exc:
            raise CommandError(f"invalid configuration: {json.dumps(exc.detail)}", returncode=INVALID_CONFIG_EXIT_CODE)
        except ToolkitError as exc:
            logger.info("%s failed with exit code %s: %s", self.command_name, exc.exit_code, exc)
            raise CommandError(str(exc), returncode=exc.exit_code)
        write_text(self.render(config, result), options.get("output"), self.stdout)
        duration = time.monotonic() - started
        if options["record"]:
            run = Run.objects.create(
                command=self.command_name,
                config=config,
                result=result,
                version=project.__version__,
                duration_seconds=duration,
            )
            logger.info("recorded run %s", run.id)
        logger.info("%s finished in %.1fs", self.command_name, duration)
