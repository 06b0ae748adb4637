import argparse
import os

from tango.commands.common import resolve_out, resolve_seed, seed_parent
from tango.services.artifacts import write_csv
from tango.services.landscape import LANDSCAPE_COLUMNS, landscape_grid

NAME = "landscape"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, parents=[seed_parent()], help="energy and vector fields of a 2-d toy model")
    p.add_argument("--extent", type=float, default=2.0, help="grid covers [-extent, extent]^2")
    p.add_argument("--resolution", type=int, default=41, help="points per axis")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    seed = resolve_seed(args)
    rows = landscape_grid(args.extent, args.resolution, seed=seed)
    path = os.path.join(resolve_out(args), f"landscape_seed{seed}.csv")
    write_csv(path, LANDSCAPE_COLUMNS, rows)
    print(f"{path}: {len(rows)} points (seed {seed})")
    return 0
