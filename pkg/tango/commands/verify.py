import argparse
import os

from tango.commands.common import resolve_out, resolve_seed, seed_parent
from tango.services.verification import COMPLEXITY_SIZES, VerifySizes, run_verify

NAME = "verify"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, parents=[seed_parent()], help="run the property suite")
    p.add_argument("--instances", type=int, default=100, help="random instances for the gradient check; other checks scale from it")
    p.add_argument("--complexity-sizes", type=int, nargs="+", default=list(COMPLEXITY_SIZES), help="target |V|+|E| values for the timing fit")
    p.add_argument("--break-projection", action="store_true", help="use the unnormalised projection (negative control)")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    seed = resolve_seed(args)
    sizes = VerifySizes.scaled(args.instances, args.complexity_sizes)
    report = run_verify(seed, sizes, break_projection=args.break_projection)
    path = os.path.join(resolve_out(args), f"verify_seed{seed}.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    print(report.table())
    print(f"report: {path}")
    return 0 if report.passed else 1
