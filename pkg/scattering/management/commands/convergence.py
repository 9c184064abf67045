from ...analysis import convergence_study
from ...config import build_problem, load_config
from ...serializers import write_convergence_csv
from ..base import LightningCommand


class Command(LightningCommand):
    help = "Solve at several pole counts with the recommended rate and fit log10(error) against sqrt(p)."

    def add_arguments(self, parser):
        parser.add_argument("config", help="Problem configuration JSON")
        parser.add_argument("--poles", default="20,40,60,80,100", help="Pole counts per corner, list or start:stop:step")
        parser.add_argument("--points", type=int, default=None, help="Profile points per half-edge")
        parser.add_argument("-o", "--out", required=True, help="CSV output path")

    def run(self, *args, **options):
        problem = build_problem(load_config(options["config"]))
        counts = [int(p) for p in self.parse_values(options["poles"], "--poles")]
        study = convergence_study(problem, counts, options["points"] or self.profile_points, self.sweep_workers)
        write_convergence_csv(study, options["out"])
        self.stdout.write(f"slope={study.slope:.4f} intercept={study.intercept:.4f} correlation={study.correlation:.4f}")
