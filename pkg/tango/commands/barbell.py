import argparse
import os

from tango import config
from tango.commands.common import resolve_out, resolve_seed, seed_parent
from tango.services.artifacts import SNAPSHOT_COLUMNS, write_csv, write_json
from tango.services.barbell import MODES, run_barbell_demo

NAME = "demo-barbell"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, parents=[seed_parent()], help="propagate one unit of mass across a barbell graph")
    p.add_argument("--k", type=int, default=5, help="clique size")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--mode", choices=MODES, default="dirichlet")
    p.add_argument("--eps", type=float, default=config.BARBELL_DIRICHLET_EPS, help="Dirichlet step size")
    p.add_argument("--epochs", type=int, default=config.BARBELL_EPOCHS, help="training epochs for tango mode")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    result = run_barbell_demo(args.k, args.steps, args.mode, seed=resolve_seed(args), eps=args.eps, epochs=args.epochs)
    out = resolve_out(args)
    stem = os.path.join(out, f"barbell_{args.mode}_k{args.k}")
    write_csv(f"{stem}.csv", SNAPSHOT_COLUMNS, result.rows())
    write_json(
        f"{stem}.meta.json",
        {
            "mode": result.mode,
            "k": result.k,
            "steps": result.steps,
            "right_clique_mean": result.right_clique_mean,
            "uniform_value": result.uniform_value,
            "final_mse": result.final_mse,
            **result.meta,
        },
    )
    print(f"right-clique mean after {result.steps} steps: {result.right_clique_mean!r} (uniform {result.uniform_value!r})")
    return 0
