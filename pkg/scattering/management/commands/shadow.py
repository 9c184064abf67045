import numpy as np

from ...analysis import shadow_trace
from ...exceptions import ConfigError, GeometryError
from ...geometry import exterior_bisector, interior_bisector
from ...serializers import write_shadow_csv
from ..base import LightningCommand


class Command(LightningCommand):
    help = "Sample the total field along a bisector ray leaving an obstacle corner."

    def add_arguments(self, parser):
        parser.add_argument("input", help="Problem configuration or solution JSON")
        parser.add_argument("--corner", default="0:3", help="<region>:<corner> the ray starts from")
        parser.add_argument("--direction", choices=("exterior", "interior"), default="exterior")
        parser.add_argument("--distances", default="1.5:2.5:0.1", help="Distances from the corner")
        parser.add_argument("-o", "--out", required=True, help="CSV output path")

    def run(self, *args, **options):
        try:
            r, k = (int(part) for part in options["corner"].split(":"))
        except ValueError as exc:
            raise ConfigError(f"corner must look like <region>:<corner>, got {options['corner']!r}", location="--corner") from exc
        loaded = self.load_input(options["input"])
        problem = loaded.require_problem()
        solution = self.ensure_solution(loaded)

        try:
            region = problem.scene.region(r)
            corner = region.corner(k)
        except GeometryError as exc:
            raise ConfigError(str(exc), location="--corner") from exc
        bisector = exterior_bisector if options["direction"] == "exterior" else interior_bisector
        trace = shadow_trace(solution, problem, corner, bisector(region, k), self.parse_values(options["distances"], "--distances"))
        write_shadow_csv(trace, options["out"])
        self.stdout.write(f"points={len(trace.distances)} max_abs_total={float(np.nanmax(np.abs(trace.total))):.3e}")
