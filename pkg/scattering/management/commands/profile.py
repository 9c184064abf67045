from ...analysis import error_profile
from ...exceptions import ConfigError
from ...serializers import write_profile_csv
from ..base import LightningCommand


class Command(LightningCommand):
    help = "Trace the boundary error of a solution between its collocation points."

    def add_arguments(self, parser):
        parser.add_argument("input", help="Problem configuration or solution JSON")
        parser.add_argument("--points", type=int, default=None, help="Test points per half-edge (at least 8)")
        parser.add_argument("--offset", type=float, default=0.5, help="Index-grid offset in (0, 1)")
        parser.add_argument("-o", "--out", required=True, help="CSV output path")

    def run(self, *args, **options):
        points = options["points"] or self.profile_points
        if points < 8:
            raise ConfigError(f"need at least 8 points per half-edge, got {points}", location="--points")
        loaded = self.load_input(options["input"])
        problem = loaded.require_problem()
        solution = self.ensure_solution(loaded)

        profile = error_profile(solution, problem, points, options["offset"])
        write_profile_csv(profile, options["out"])
        self.stdout.write(
            f"points={len(profile.errors)} max_error={profile.max_error:.3e} "
            f"worst_corner={profile.worst_corner:.3e} worst_edge_interior={profile.worst_edge_interior:.3e}"
        )
