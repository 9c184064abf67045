import time

from ...analysis import error_profile
from ...serializers import save_solution
from ...solver import solve
from ..base import LightningCommand


class Command(LightningCommand):
    help = "Solve the problem described by a configuration file and write the solution JSON."

    def add_arguments(self, parser):
        parser.add_argument("config", help="Problem configuration JSON")
        parser.add_argument("-o", "--out", required=True, help="Where to write the solution JSON")

    def run(self, *args, **options):
        loaded = self.load_input(options["config"])
        problem = loaded.require_problem()

        started = time.perf_counter()
        solution = solve(problem, config=loaded.config.model_dump(mode="json"))
        profile = error_profile(solution, problem, self.profile_points)
        elapsed = time.perf_counter() - started
        save_solution(solution, options["out"])

        d = solution.diagnostics
        self.stdout.write(
            f"rows={d.rows} cols={d.cols} residual={d.residual:.3e} max_error={profile.max_error:.3e} "
            f"dropped_poles={d.dropped_poles} time={elapsed:.2f}s"
        )
