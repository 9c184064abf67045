from ...analysis import SWEEP_PARAMETERS, sweep, sweep_grid, with_parameter
from ...config import apply_preset, build_problem, load_config
from ...exceptions import ConfigError, ProblemError
from ...serializers import write_sweep_csv
from ..base import LightningCommand


class Command(LightningCommand):
    help = "Solve once per parameter value (or value pair) and tabulate the boundary error."

    def add_arguments(self, parser):
        parser.add_argument("config", help="Problem configuration JSON used as the template")
        parser.add_argument("--param", choices=sorted(SWEEP_PARAMETERS), help="Parameter to sweep")
        parser.add_argument("--values", help="start:stop:step or a comma-separated list")
        parser.add_argument("--param2", choices=sorted(SWEEP_PARAMETERS), help="Second parameter for a grid sweep")
        parser.add_argument("--values2", help="Values of the second parameter")
        parser.add_argument("--preset", help="Tuning preset: rate-scan, hard-rate-scan, pole-scan, newman-scan")
        parser.add_argument("--points", type=int, default=None, help="Profile points per half-edge")
        parser.add_argument("--workers", type=int, default=None, help="Concurrent solves")
        parser.add_argument("-o", "--out", required=True, help="CSV output path")

    def run(self, *args, **options):
        config = load_config(options["config"])
        parameter, values_text = options["param"], options["values"]
        if options["preset"]:
            config, preset_parameter, preset_values = apply_preset(config, options["preset"])
            parameter = parameter or preset_parameter
            values_text = values_text or preset_values
        if not parameter or not values_text:
            raise ConfigError("give --param and --values, or a --preset", location="--param")
        if bool(options["param2"]) != bool(options["values2"]):
            raise ConfigError("--param2 and --values2 go together", location="--param2")

        template = build_problem(config)
        values = self.parse_values(values_text, "--values")
        self.check_values(template, parameter, values, "--values")
        points = options["points"] or self.profile_points
        workers = options["workers"] or self.sweep_workers

        if options["param2"]:
            values_2 = self.parse_values(options["values2"], "--values2")
            self.check_values(template, options["param2"], values_2, "--values2")
            table = sweep_grid(template, parameter, values, options["param2"], values_2, points, workers)
            for value, best in table.best_by_a().items():
                self.stdout.write(f"{parameter}={value:g}: best {options['param2']}={best:g}")
        else:
            table = sweep(template, parameter, values, points, workers)
            best = table.best()
            self.stdout.write(f"{len(table.rows)} rows; best {parameter}={best.value:g} max_error={best.max_error:.3e}")
        write_sweep_csv(table, options["out"])

    def check_values(self, template, parameter, values, option):
        """Reject swept values no solve could accept before any solve starts."""
        for value in values:
            try:
                with_parameter(template, parameter, value)
            except ProblemError as exc:
                raise ConfigError(str(exc), location=option) from exc
