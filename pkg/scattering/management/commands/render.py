from ...fieldgrid import PARTS, write_ppm
from .field import Command as FieldCommand


class Command(FieldCommand):
    help = "Sample a field on a grid and write one of its parts as a PPM image."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--part", choices=PARTS, default="re")
        parser.add_argument("--vmax", type=float, default=None, help="Colour scale limit (default: twice the largest value)")

    def run(self, *args, **options):
        grid = self.sample(options)
        write_ppm(grid, options["part"], options["vmax"], options["out"])
        self.stdout.write(f"image={grid.nx}x{grid.ny} masked={int(grid.mask.sum())}")
