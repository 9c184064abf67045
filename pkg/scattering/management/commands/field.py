from ...fieldgrid import COMPONENTS, sample_grid, write_csv
from ..base import LightningCommand


class Command(LightningCommand):
    help = "Sample the scattered, incident or total field on a grid and write it as CSV."

    def add_arguments(self, parser):
        parser.add_argument("input", help="Problem configuration or solution JSON")
        parser.add_argument("--bounds", help="xmin,xmax,ymin,ymax (default: obstacles padded by 1)")
        parser.add_argument("--nx", type=int, default=200)
        parser.add_argument("--ny", type=int, default=200)
        parser.add_argument("--component", choices=COMPONENTS, default="total")
        parser.add_argument("-o", "--out", required=True, help="CSV output path")

    def sample(self, options):
        loaded = self.load_input(options["input"])
        solution = self.ensure_solution(loaded)
        bounds = self.parse_bounds(options["bounds"], solution)
        return sample_grid(solution, loaded.problem, bounds, options["nx"], options["ny"], options["component"], self.evaluation_chunk)

    def run(self, *args, **options):
        grid = self.sample(options)
        write_csv(grid, options["out"])
        self.stdout.write(f"cells={grid.nx * grid.ny} masked={int(grid.mask.sum())}")
