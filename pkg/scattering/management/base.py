"""Shared plumbing for the scattering management commands.

Exit codes: 0 on success, 1 for usage and configuration errors, 2 for numerical failures.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from functools import partial
from typing import Optional, Tuple

import numpy as np
import sentry_sdk
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from lightning_helm.utils import parse_range

from ..config import ProblemConfig, build_problem, parse_config, read_json
from ..exceptions import ConfigError, LightningError
from ..serializers import parse_solution
from ..solver import Problem, Solution, solve

logger = logging.getLogger(__name__)


def _usage_error(parser, message: str):
    if parser.called_from_command_line:
        parser.print_usage(sys.stderr)
        parser.exit(1, f"{parser.prog}: error: {message}\n")
    raise CommandError(f"Error: {message}", returncode=1)


@dataclass
class LoadedInput:
    config: Optional[ProblemConfig]
    problem: Optional[Problem]
    solution: Optional[Solution]

    def require_problem(self) -> Problem:
        if self.problem is None:
            raise ConfigError("solution file carries no problem configuration", location="config")
        return self.problem


class LightningCommand(BaseCommand):
    """Base for commands that read a problem configuration or a persisted solution."""

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(_usage_error, parser)
        return parser

    def handle(self, *args, **options):
        try:
            return self.run(*args, **options)
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=1) from exc
        except (LightningError, np.linalg.LinAlgError) as exc:
            sentry_sdk.capture_exception(exc)
            logger.error(f"{type(exc).__name__}: {exc}")
            raise CommandError(f"numerical failure: {exc}", returncode=2) from exc

    def run(self, *args, **options):
        raise NotImplementedError("subclasses of LightningCommand must provide a run() method")

    # helpers

    def load_input(self, path: str) -> LoadedInput:
        """Read a configuration, or a solution document when the JSON carries coefficients."""
        data = read_json(path)
        if isinstance(data, dict) and "coefficients" in data:
            solution = parse_solution(data)
            if solution.config is None:
                return LoadedInput(None, None, solution)
            config = parse_config(solution.config)
            return LoadedInput(config, build_problem(config), solution)
        config = parse_config(data)
        return LoadedInput(config, build_problem(config), None)

    def ensure_solution(self, loaded: LoadedInput) -> Solution:
        if loaded.solution is None:
            loaded.solution = solve(loaded.require_problem(), config=loaded.config.model_dump(mode="json"))
        return loaded.solution

    def parse_values(self, text: str, option: str) -> list[float]:
        try:
            return parse_range(text)
        except ValueError as exc:
            raise ConfigError(str(exc), location=option) from exc

    def parse_bounds(self, text: Optional[str], solution: Solution) -> Tuple[float, float, float, float]:
        if text is None:
            corners = np.concatenate([np.asarray(region.vertices) for region in solution.regions]) if solution.regions else np.zeros(1)
            pad = 1.0
            return (corners.real.min() - pad, corners.real.max() + pad, corners.imag.min() - pad, corners.imag.max() + pad)
        try:
            bounds = tuple(float(v) for v in text.split(","))
        except ValueError as exc:
            raise ConfigError(f"bounds must be four numbers, got {text!r}", location="--bounds") from exc
        if len(bounds) != 4:
            raise ConfigError(f"bounds must be xmin,xmax,ymin,ymax, got {text!r}", location="--bounds")
        return bounds

    @property
    def evaluation_chunk(self) -> int:
        return getattr(settings, "LIGHTNING_EVALUATION_CHUNK", 4096)

    @property
    def sweep_workers(self) -> int:
        return getattr(settings, "LIGHTNING_SWEEP_WORKERS", 1)

    @property
    def profile_points(self) -> int:
        return getattr(settings, "LIGHTNING_PROFILE_POINTS", 64)
