import argparse
import os

from tango.commands.common import resolve_out
from tango.dynamics.step import write_trajectory_csv
from tango.services.artifacts import write_json
from tango.services.experiments import checkpoint_trajectory, evaluate_checkpoint
from tango.training.losses import METRICS

NAME = "eval"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, help="evaluate a checkpoint on a dataset split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", default=None, help="dataset file (default: the checkpoint's data source)")
    p.add_argument("--metric", choices=sorted(METRICS), default="log10_mse")
    p.add_argument("--split", choices=("train", "val", "test"), default="test")
    p.add_argument("--out", default=None, help="directory for eval.json (default: next to the checkpoint)")
    p.add_argument("--trajectory", default=None, help="also write per-step diagnostics of one sample to this CSV")
    p.add_argument("--index", type=int, default=0, help="sample index for --trajectory")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    value = evaluate_checkpoint(args.checkpoint, args.dataset, args.metric, args.split)
    out = resolve_out(args, os.path.dirname(os.path.abspath(args.checkpoint)))
    payload = {
        "checkpoint": args.checkpoint,
        "dataset": args.dataset,
        "split": args.split,
        "metric": args.metric,
        "value": value,
    }
    write_json(os.path.join(out, "eval.json"), payload)
    if args.trajectory:
        write_trajectory_csv(args.trajectory, checkpoint_trajectory(args.checkpoint, args.dataset, args.split, args.index))
    print(f"{args.metric} = {value!r}")
    return 0
